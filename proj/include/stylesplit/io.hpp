#pragma once

// File formats for stage artifacts and results. Word positions in every
// file are 1-based and inclusive ("words 1-1000"); in memory they are
// 0-based half-open.

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "stylesplit/attribution.hpp"
#include "stylesplit/cluster.hpp"
#include "stylesplit/corpus.hpp"
#include "stylesplit/error.hpp"
#include "stylesplit/matching.hpp"

namespace stylesplit::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Plain files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << contents;
}

// ---------------------------------------------------------------------------
// CSV

// Text that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline std::size_t parse_index(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ValidationError(field, "expected a nonnegative integer, got '" + s + "'");
  }
}

inline double parse_double(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(field, "expected a number, got '" + s + "'");
  }
}

inline void expect_header(const std::vector<std::string>& header,
                          const std::vector<std::string>& names, const std::string& what) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i >= header.size() || header[i] != names[i]) {
      throw ValidationError(names[i], "missing column in " + what);
    }
  }
}

// 1-based inclusive pair -> 0-based half-open span.
inline Span span_from_words(std::size_t first, std::size_t last, const std::string& field) {
  if (first < 1 || last < first) throw ValidationError(field, "invalid word range");
  return {first - 1, last};
}

}  // namespace detail

// start_word,end_word,label
inline GroundTruth truth_from_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw ValidationError("start_word", "ground-truth file is empty");
  detail::expect_header(rows[0], {"start_word", "end_word", "label"}, "ground truth");
  GroundTruth truth;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 3) throw ValidationError("label", "short ground-truth row");
    const auto first = detail::parse_index(rows[r][0], "start_word");
    const auto last = detail::parse_index(rows[r][1], "end_word");
    truth.spans.push_back({detail::span_from_words(first, last, "start_word"),
                           detail::parse_index(rows[r][2], "label")});
  }
  truth.sorted();
  return truth;
}

inline std::string truth_to_csv(const GroundTruth& truth) {
  std::string out = "start_word,end_word,label\n";
  for (const auto& t : truth.sorted()) {
    out += std::to_string(t.span.start + 1) + "," + std::to_string(t.span.end) + "," +
           std::to_string(t.label) + "\n";
  }
  return out;
}

// start_word,end_word,label
inline std::string clustering_to_csv(const Clustering& c) {
  std::string out = "start_word,end_word,label\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out += std::to_string(c.spans[i].start + 1) + "," + std::to_string(c.spans[i].end) + "," +
           std::to_string(c.labels[i]) + "\n";
  }
  return out;
}

inline Clustering clustering_from_csv(const std::string& text, std::size_t n) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw ValidationError("start_word", "clustering file is empty");
  detail::expect_header(rows[0], {"start_word", "end_word", "label"}, "clustering");
  Clustering c;
  c.n = n;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 3) throw ValidationError("label", "short clustering row");
    const auto first = detail::parse_index(rows[r][0], "start_word");
    const auto last = detail::parse_index(rows[r][1], "end_word");
    const auto label = detail::parse_index(rows[r][2], "label");
    if (label >= n) throw ValidationError("label", "label " + std::to_string(label) + " >= n");
    c.spans.push_back(detail::span_from_words(first, last, "start_word"));
    c.labels.push_back(label);
  }
  if (c.spans.empty()) throw ValidationError("start_word", "clustering has no rows");
  c.offset = c.spans.front().start;
  c.fragment_size = c.spans.front().size();
  return c;
}

// First column is the fragment's start word; the rest are features.
inline std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<Span>& rows,
                                 const std::vector<std::string>& column_names) {
  std::string out = "start_word";
  for (const auto& name : column_names) out += "," + csv_field(name);
  out += "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += std::to_string(rows[static_cast<std::size_t>(i)].start + 1);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += "," + format_double(m(i, j));
    out += "\n";
  }
  return out;
}

struct LabeledMatrix {
  Eigen::MatrixXd values;
  std::vector<std::size_t> start_words;  // 1-based
  std::vector<std::string> column_names;
};

inline LabeledMatrix matrix_from_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "start_word") {
    throw ValidationError("start_word", "missing column in matrix file");
  }
  LabeledMatrix out;
  out.column_names.assign(rows[0].begin() + 1, rows[0].end());
  const auto cols = static_cast<Eigen::Index>(out.column_names.size());
  out.values.resize(static_cast<Eigen::Index>(rows.size() - 1), cols);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != out.column_names.size() + 1) {
      throw ValidationError("start_word", "row " + std::to_string(r) + " has " +
                                              std::to_string(rows[r].size()) + " fields");
    }
    out.start_words.push_back(detail::parse_index(rows[r][0], "start_word"));
    for (Eigen::Index j = 0; j < cols; ++j) {
      out.values(static_cast<Eigen::Index>(r - 1), j) =
          detail::parse_double(rows[r][static_cast<std::size_t>(j) + 1],
                               out.column_names[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline json result_to_json(const AttributionResult& r) {
  json segments = json::array();
  for (const auto& s : r.segments) {
    segments.push_back({{"start_word", s.span.start + 1},
                        {"end_word", s.span.end},
                        {"weights", s.weights},
                        {"coverage", s.coverage}});
  }
  return {{"segment_width", r.segment_width}, {"n", r.n}, {"segments", std::move(segments)}};
}

namespace detail {

inline const json& require(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(key, "missing field");
  return j.at(key);
}

inline std::size_t require_index(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number_unsigned()) throw ValidationError(key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

}  // namespace detail

inline AttributionResult result_from_json(const json& j) {
  AttributionResult r;
  r.segment_width = detail::require_index(j, "segment_width");
  r.n = detail::require_index(j, "n");
  const json& segments = detail::require(j, "segments");
  if (!segments.is_array()) throw ValidationError("segments", "expected an array");
  for (const auto& s : segments) {
    Segment seg;
    seg.span = detail::span_from_words(detail::require_index(s, "start_word"),
                                       detail::require_index(s, "end_word"), "start_word");
    const json& w = detail::require(s, "weights");
    if (!w.is_array() || w.size() != r.n) {
      throw ValidationError("weights", "expected " + std::to_string(r.n) + " numbers");
    }
    seg.weights = w.get<WeightVector>();
    seg.coverage = detail::require_index(s, "coverage");
    r.segments.push_back(std::move(seg));
  }
  return r;
}

// start_word,end_word,coverage,w0..w{n-1}
inline std::string result_to_csv(const AttributionResult& r) {
  std::string out = "start_word,end_word,coverage";
  for (std::size_t i = 0; i < r.n; ++i) out += ",w" + std::to_string(i);
  out += "\n";
  for (const auto& s : r.segments) {
    out += std::to_string(s.span.start + 1) + "," + std::to_string(s.span.end) + "," +
           std::to_string(s.coverage);
    for (double w : s.weights) out += "," + format_double(w);
    out += "\n";
  }
  return out;
}

// Manifest written by the fragment stage and read by every later stage.
struct Manifest {
  std::string input;
  std::size_t words = 0;
  std::size_t n = 0;
  std::size_t fragment_size = 0;
  std::size_t step = 0;
  std::vector<std::size_t> offsets;
};

inline json manifest_to_json(const Manifest& m) {
  return {{"input", m.input},       {"words", m.words}, {"n", m.n},
          {"fragment", m.fragment_size}, {"step", m.step}, {"offsets", m.offsets}};
}

inline Manifest manifest_from_json(const json& j) {
  Manifest m;
  const json& input = detail::require(j, "input");
  if (!input.is_string()) throw ValidationError("input", "expected a string");
  m.input = input.get<std::string>();
  m.words = detail::require_index(j, "words");
  m.n = detail::require_index(j, "n");
  m.fragment_size = detail::require_index(j, "fragment");
  m.step = detail::require_index(j, "step");
  const json& offsets = detail::require(j, "offsets");
  if (!offsets.is_array()) throw ValidationError("offsets", "expected an array");
  m.offsets = offsets.get<std::vector<std::size_t>>();
  return m;
}

inline json fragment_set_to_json(const FragmentSet& s) {
  json frags = json::array();
  for (const auto& f : s.fragments) {
    frags.push_back({{"start_word", f.span.start + 1}, {"end_word", f.span.end}});
  }
  return {{"offset", s.offset + 1},
          {"fragment_size", s.fragment_size},
          {"n", s.n},
          {"fragments", std::move(frags)}};
}

inline FragmentSet fragment_set_from_json(const json& j) {
  FragmentSet s;
  const std::size_t first = detail::require_index(j, "offset");
  if (first < 1) throw ValidationError("offset", "word positions are 1-based");
  s.offset = first - 1;
  s.fragment_size = detail::require_index(j, "fragment_size");
  s.n = detail::require_index(j, "n");
  if (s.n < 1) throw ValidationError("n", "must be positive");
  const json& frags = detail::require(j, "fragments");
  if (!frags.is_array()) throw ValidationError("fragments", "expected an array");
  for (const auto& f : frags) {
    s.fragments.push_back({detail::span_from_words(detail::require_index(f, "start_word"),
                                                   detail::require_index(f, "end_word"),
                                                   "start_word"),
                           uniform_weights(s.n)});
  }
  return s;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::matching: return "matching";
    case AlignMode::maxcut: return "maxcut";
    case AlignMode::automatic: return "auto";
  }
  return "auto";
}

// Audit record of an alignment: the matrices it was computed from and the
// relabeling chosen for every clustering.
inline json alignment_to_json(const Alignment& a) {
  json perms = json::array();
  for (const auto& p : a.permutations) perms.push_back(p.map);
  json out = {{"mode", to_string(a.mode)},
              {"offsets", json::array()},
              {"permutations", std::move(perms)}};
  for (const auto& c : a.clusterings) out["offsets"].push_back(c.offset + 1);
  if (a.mode == AlignMode::matching) {
    out["overlap"] = matrix_to_json(a.pairwise);
  } else if (a.mode == AlignMode::maxcut) {
    out["agreement"] = matrix_to_json(a.pairwise);
    out["flip_agreement"] = matrix_to_json(a.flip_matrix);
  }
  if (a.flips) out["flips"] = a.flips->y;
  return out;
}

}  // namespace stylesplit::io
