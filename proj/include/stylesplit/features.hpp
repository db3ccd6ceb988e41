#pragma once

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylesplit/corpus.hpp"
#include "stylesplit/error.hpp"
#include "stylesplit/parallel.hpp"

namespace stylesplit {

// Rows are fragments (in fragment order), columns are features.
using FeatureMatrix = Eigen::MatrixXd;

namespace detail {

inline std::vector<char32_t> code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto len = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) c = 0xFFFD;
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

inline bool is_punct(char32_t c) { return u_ispunct(static_cast<UChar32>(c)); }

// A token with leading and trailing punctuation removed. Word-length
// features count code points of this form.
inline std::u32string strip_punct(std::string_view token) {
  const auto cps = code_points(token);
  std::size_t b = 0, e = cps.size();
  while (b < e && is_punct(cps[b])) ++b;
  while (e > b && is_punct(cps[e - 1])) --e;
  return std::u32string(cps.begin() + static_cast<std::ptrdiff_t>(b),
                        cps.begin() + static_cast<std::ptrdiff_t>(e));
}

// Case-folded UTF-8 form used as the word-frequency key.
inline std::string fold(const std::u32string& word) {
  icu::UnicodeString u;
  for (char32_t c : word) u.append(static_cast<UChar32>(c));
  u.foldCase();
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline std::string code_point_label(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
  return buf;
}

}  // namespace detail

// Fixed punctuation inventory: ASCII punctuation plus dashes, curly quotes,
// ellipsis and the middle dot (the NFC form of the Greek ano teleia).
inline const std::vector<char32_t>& punctuation_inventory() {
  static const std::vector<char32_t> inventory = [] {
    std::vector<char32_t> v;
    for (char32_t c = 0x21; c < 0x7F; ++c) {
      const bool alnum = (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') ||
                         (c >= 'a' && c <= 'z');
      if (!alnum) v.push_back(c);
    }
    for (char32_t c : {U'—', U'–', U'‘', U'’', U'“',
                       U'”', U'…', U'·'}) {
      v.push_back(c);
    }
    return v;
  }();
  return inventory;
}

inline constexpr std::size_t kWordLengthBins = 16;  // 1..15 and 16+

// Document-wide feature vocabulary shared by every fragment of a run.
struct FeatureSpec {
  std::vector<char32_t> chars;
  std::vector<std::string> words;
  std::vector<char32_t> punctuation = punctuation_inventory();

  std::size_t dimension() const {
    return chars.size() + words.size() + kWordLengthBins +
           2 * punctuation.size() + 4;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(dimension());
    for (char32_t c : chars) out.push_back("char:" + detail::code_point_label(c));
    for (const auto& w : words) out.push_back("word:" + w);
    for (std::size_t b = 1; b < kWordLengthBins; ++b) {
      out.push_back("len:" + std::to_string(b));
    }
    out.push_back("len:" + std::to_string(kWordLengthBins) + "+");
    for (char32_t c : punctuation) {
      out.push_back("punct_end:" + detail::code_point_label(c));
    }
    for (char32_t c : punctuation) {
      out.push_back("punct_in:" + detail::code_point_label(c));
    }
    out.insert(out.end(), {"word_len_mean", "word_len_var", "type_token_ratio",
                           "hapax_ratio"});
    return out;
  }
};

// Tracks the `char_top_k` most frequent non-whitespace code points and the
// `word_top_f` most frequent case-folded words of the whole text. Ties go
// to the smaller code point / lexicographically smaller word.
inline FeatureSpec build_feature_spec(const Text& text, std::size_t char_top_k,
                                      std::size_t word_top_f) {
  if (text.empty()) throw InputError("cannot build a feature spec for empty text");
  std::map<char32_t, std::size_t> char_counts;
  std::map<std::string, std::size_t> word_counts;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto tok = text.token(i);
    for (char32_t c : detail::code_points(tok)) ++char_counts[c];
    const auto stripped = detail::strip_punct(tok);
    if (!stripped.empty()) ++word_counts[detail::fold(stripped)];
  }

  auto top = [](const auto& counts, std::size_t k) {
    using Key = typename std::decay_t<decltype(counts)>::key_type;
    std::vector<std::pair<Key, std::size_t>> v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    std::vector<Key> out;
    for (std::size_t i = 0; i < std::min(k, v.size()); ++i) out.push_back(v[i].first);
    return out;
  };

  FeatureSpec spec;
  spec.chars = top(char_counts, char_top_k);
  spec.words = top(word_counts, word_top_f);
  return spec;
}

// Feature vector of one fragment, laid out as FeatureSpec::names().
// Character frequencies are relative to every code point of the fragment
// (whitespace included); all other frequencies are relative to its token
// count; length statistics and ratios are over punctuation-stripped words.
inline Eigen::VectorXd extract_features(std::string_view fragment,
                                        const FeatureSpec& spec) {
  const Text toks = tokenize(fragment);
  if (toks.empty()) throw InputError("cannot extract features from an empty fragment");

  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dimension()));
  Eigen::Index col = 0;

  const auto cps = detail::code_points(toks.source());
  std::unordered_map<char32_t, std::size_t> char_counts;
  for (char32_t c : cps) ++char_counts[c];
  const double total_chars = static_cast<double>(cps.size());
  for (char32_t c : spec.chars) {
    const auto it = char_counts.find(c);
    v[col++] = it == char_counts.end() ? 0.0 : static_cast<double>(it->second) / total_chars;
  }

  const double ntok = static_cast<double>(toks.size());
  std::unordered_map<char32_t, std::size_t> punct_end, punct_in;
  std::unordered_map<std::string, std::size_t> word_counts;
  std::vector<double> lengths;
  lengths.reserve(toks.size());
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto tok = toks.token(i);
    const auto tcps = detail::code_points(tok);
    for (std::size_t j = 0; j < tcps.size(); ++j) {
      if (j + 1 == tcps.size()) ++punct_end[tcps[j]];
      else ++punct_in[tcps[j]];
    }
    const auto stripped = detail::strip_punct(tok);
    if (stripped.empty()) continue;
    lengths.push_back(static_cast<double>(stripped.size()));
    ++word_counts[detail::fold(stripped)];
  }

  for (const auto& w : spec.words) {
    const auto it = word_counts.find(w);
    v[col++] = it == word_counts.end() ? 0.0 : static_cast<double>(it->second) / ntok;
  }

  std::vector<std::size_t> bins(kWordLengthBins, 0);
  for (double len : lengths) {
    const auto b = std::min(static_cast<std::size_t>(len), kWordLengthBins);
    ++bins[b - 1];
  }
  for (std::size_t b : bins) v[col++] = static_cast<double>(b) / ntok;

  auto lookup = [](const auto& m, char32_t c) {
    const auto it = m.find(c);
    return it == m.end() ? std::size_t{0} : it->second;
  };
  for (char32_t c : spec.punctuation) v[col++] = static_cast<double>(lookup(punct_end, c)) / ntok;
  for (char32_t c : spec.punctuation) v[col++] = static_cast<double>(lookup(punct_in, c)) / ntok;

  double mean = 0.0, var = 0.0, ttr = 0.0, hapax = 0.0;
  if (!lengths.empty()) {
    const double w = static_cast<double>(lengths.size());
    for (double len : lengths) mean += len;
    mean /= w;
    for (double len : lengths) var += (len - mean) * (len - mean);
    var /= w;
    std::size_t once = 0;
    for (const auto& [word, count] : word_counts) once += count == 1;
    ttr = static_cast<double>(word_counts.size()) / w;
    hapax = static_cast<double>(once) / w;
  }
  v[col++] = mean;
  v[col++] = var;
  v[col++] = ttr;
  v[col++] = hapax;
  return v;
}

inline FeatureMatrix feature_matrix(const Text& text, const FragmentSet& set,
                                    const FeatureSpec& spec,
                                    std::size_t threads = 1) {
  FeatureMatrix m(static_cast<Eigen::Index>(set.size()),
                  static_cast<Eigen::Index>(spec.dimension()));
  parallel_for(set.size(), threads, [&](std::size_t i) {
    m.row(static_cast<Eigen::Index>(i)) =
        extract_features(fragment_text(text, set.fragments[i].span), spec).transpose();
  });
  return m;
}

// Per-column z-score with population variance. Constant columns become 0.
inline FeatureMatrix standardize(const FeatureMatrix& m) {
  if (m.rows() < 2) throw ParameterError("standardize needs at least 2 rows");
  FeatureMatrix out(m.rows(), m.cols());
  const double rows = static_cast<double>(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).sum() / rows;
    const Eigen::ArrayXd centered = m.col(j).array() - mean;
    const double spread = centered.abs().maxCoeff();
    if (spread <= 1e-12 * std::max(1.0, std::abs(mean))) {
      out.col(j).setZero();
      continue;
    }
    const double sd = std::sqrt(centered.square().sum() / rows);
    out.col(j) = (centered / sd).matrix();
  }
  return out;
}

// Target width t = ceil(c k / eps^2) of the random projection.
inline std::size_t projection_dimension(double eps, double c, std::size_t k) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  if (!(c >= 1.0)) throw ParameterError("c must be at least 1");
  if (k < 2) throw ParameterError("cluster count k must be at least 2");
  // The tolerance absorbs representation error, e.g. 0.2*0.2 > 0.04.
  return static_cast<std::size_t>(
      std::ceil(c * static_cast<double>(k) / (eps * eps) - 1e-9));
}

// d x t matrix of i.i.d. uniform signs scaled by 1/sqrt(t).
inline Eigen::MatrixXd sign_projection(std::size_t d, std::size_t t,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  Eigen::MatrixXd r(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t));
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      r(i, j) = (rng() >> 63) ? scale : -scale;
    }
  }
  return r;
}

inline FeatureMatrix random_project(const FeatureMatrix& m, double eps, double c,
                                    std::size_t k, std::uint64_t seed) {
  const std::size_t t = projection_dimension(eps, c, k);
  const auto d = static_cast<std::size_t>(m.cols());
  if (t > d) {
    throw ParameterError("projection width " + std::to_string(t) +
                         " exceeds feature dimension " + std::to_string(d));
  }
  return m * sign_projection(d, t, seed);
}

}  // namespace stylesplit
