// Command-line front end: one-shot attribution, stage-by-stage runs over a
// work directory, and SVG rendering of results.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stylesplit/stylesplit.hpp"

namespace fs = std::filesystem;
namespace io = stylesplit::io;
using stylesplit::AlignMode;
using stylesplit::Method;
using stylesplit::PipelineConfig;

namespace {

enum class Format { json, csv, svg };

struct Options {
  PipelineConfig cfg;
  std::string input;
  std::string output;  // empty: stdout
  std::string truth;
  std::string workdir = ".";
  std::string stage;
  std::string result_path;
  Format format = Format::json;
  bool project = false;
  bool no_standardize = false;
  double eps = 0.2;
  double c = 2.0;
};

std::string set_file(const std::string& stem, std::size_t index, const std::string& ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02zu.%s", stem.c_str(), index, ext.c_str());
  return buf;
}

void emit(const Options& o, const std::string& contents) {
  if (o.output.empty()) {
    std::cout << contents;
  } else {
    io::write_file(o.output, contents);
  }
}

std::string render(const Options& o, const stylesplit::AttributionResult& result,
                   const std::vector<stylesplit::Clustering>* raw,
                   const std::vector<stylesplit::Clustering>* aligned,
                   const std::optional<stylesplit::GroundTruth>& truth) {
  switch (o.format) {
    case Format::json: return io::result_to_json(result).dump(2) + "\n";
    case Format::csv: return io::result_to_csv(result);
    case Format::svg:
      return stylesplit::render_svg({&result, raw, aligned, truth ? &*truth : nullptr});
  }
  return {};
}

std::optional<stylesplit::GroundTruth> load_truth(const Options& o) {
  if (o.truth.empty()) return std::nullopt;
  return io::truth_from_csv(io::read_file(o.truth));
}

void report_evaluation(const Options& o, const stylesplit::AttributionResult& result,
                       const stylesplit::GroundTruth& truth, std::size_t words) {
  const double n = static_cast<double>(std::max(result.n, truth.label_count()));
  const io::json report = {
      {"evaluation",
       {{"agreement", stylesplit::evaluate(result, truth)},
        {"upper_bound", stylesplit::agreement_upper_bound(truth, o.cfg.fragment_size, words)},
        {"random_baseline", 1.0 / n}}}};
  (o.output.empty() ? std::cerr : std::cout) << report.dump() << "\n";
}

void warn(const std::string& message) {
  std::cerr << io::json{{"warning", message}}.dump() << "\n";
}

stylesplit::Text load_text(const std::string& path) {
  return stylesplit::tokenize(io::read_file(path));
}

int run_attribute(Options& o) {
  const stylesplit::Text text = load_text(o.input);
  const auto truth = load_truth(o);
  const auto run = stylesplit::attribute(text, o.cfg);
  for (const auto& w : run.warnings) warn(w);
  if (run.result.degenerate) warn("a clustering had an empty or duplicated label class");
  emit(o, render(o, run.result, &run.raw, &run.alignment.clusterings, truth));
  if (truth) report_evaluation(o, run.result, *truth, text.size());
  return 0;
}

// ---------------------------------------------------------------------------
// Stages

fs::path in_workdir(const Options& o, const std::string& name) {
  return fs::path(o.workdir) / name;
}

io::Manifest load_manifest(const Options& o) {
  const auto path = in_workdir(o, "manifest.json");
  io::json j;
  try {
    j = io::json::parse(io::read_file(path.string()));
  } catch (const io::json::parse_error& e) {
    throw stylesplit::ValidationError("manifest", e.what());
  }
  return io::manifest_from_json(j);
}

// Stage flags n/fragment/step always come from the manifest.
void adopt_manifest(Options& o, const io::Manifest& m) {
  o.cfg.n = m.n;
  o.cfg.fragment_size = m.fragment_size;
  o.cfg.step = m.step;
}

std::vector<stylesplit::FragmentSet> load_sets(const Options& o, const io::Manifest& m) {
  std::vector<stylesplit::FragmentSet> sets;
  for (std::size_t j = 0; j < m.offsets.size(); ++j) {
    const auto path = in_workdir(o, set_file("fragments", j, "json"));
    io::json doc;
    try {
      doc = io::json::parse(io::read_file(path.string()));
    } catch (const io::json::parse_error& e) {
      throw stylesplit::ValidationError("fragments", e.what());
    }
    auto set = io::fragment_set_from_json(doc);
    if (set.offset != m.offsets[j]) {
      throw stylesplit::ValidationError("offset", path.string() + " disagrees with manifest");
    }
    if (set.n != m.n) throw stylesplit::ValidationError("n", path.string() + " disagrees with manifest");
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<stylesplit::Clustering> load_clusterings(const Options& o, const io::Manifest& m,
                                                     const std::vector<stylesplit::FragmentSet>& sets,
                                                     const std::string& stem) {
  std::vector<stylesplit::Clustering> out;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    auto c = io::clustering_from_csv(
        io::read_file(in_workdir(o, set_file(stem, j, "csv")).string()), m.n);
    if (c.spans != sets[j].spans()) {
      throw stylesplit::ValidationError("start_word", set_file(stem, j, "csv") +
                                                          " does not match its fragment set");
    }
    c.fragment_size = sets[j].fragment_size;
    out.push_back(std::move(c));
  }
  return out;
}

void check_matrix_rows(const io::LabeledMatrix& lm, const stylesplit::FragmentSet& set,
                       const std::string& file) {
  std::vector<std::size_t> expected;
  for (const auto& f : set.fragments) expected.push_back(f.span.start + 1);
  if (lm.start_words != expected) {
    throw stylesplit::ValidationError("start_word", file + " rows do not match its fragment set");
  }
}

int run_stage(Options& o) {
  fs::create_directories(o.workdir);
  if (o.stage == "fragment") {
    if (o.input.empty()) throw stylesplit::ParameterError("fragment stage needs an input file");
    const auto text = load_text(o.input);
    const auto sets = stylesplit::fragment_stage(text, o.cfg);
    io::Manifest m{o.input, text.size(), o.cfg.n, o.cfg.fragment_size, o.cfg.step, {}};
    for (std::size_t j = 0; j < sets.size(); ++j) {
      m.offsets.push_back(sets[j].offset);
      io::write_file(in_workdir(o, set_file("fragments", j, "json")).string(),
                     io::fragment_set_to_json(sets[j]).dump(2) + "\n");
    }
    io::write_file(in_workdir(o, "manifest.json").string(), io::manifest_to_json(m).dump(2) + "\n");
    return 0;
  }

  const auto m = load_manifest(o);
  adopt_manifest(o, m);
  const auto sets = load_sets(o, m);

  if (o.stage == "features" || o.stage == "distances") {
    const auto text = load_text(m.input);
    if (text.size() != m.words) {
      throw stylesplit::ValidationError("words", "input text changed since the fragment stage");
    }
    if (o.stage == "features") {
      const auto matrices = stylesplit::feature_stage(text, sets, o.cfg);
      std::vector<std::string> names;
      if (o.cfg.features.projection) {
        for (Eigen::Index k = 0; k < matrices.front().cols(); ++k) {
          names.push_back("proj:" + std::to_string(k));
        }
      } else {
        names = stylesplit::build_feature_spec(text, o.cfg.features.char_top_k,
                                               o.cfg.features.word_top_f)
                    .names();
      }
      for (std::size_t j = 0; j < sets.size(); ++j) {
        io::write_file(in_workdir(o, set_file("features", j, "csv")).string(),
                       io::matrix_to_csv(matrices[j], sets[j].spans(), names));
      }
    } else {
      const auto matrices = stylesplit::distance_stage(text, sets, o.cfg);
      for (std::size_t j = 0; j < sets.size(); ++j) {
        for (const auto& w : matrices[j].warnings) warn(w);
        std::vector<std::string> names;
        for (const auto& f : sets[j].fragments) names.push_back(std::to_string(f.span.start + 1));
        io::write_file(in_workdir(o, set_file("distances", j, "csv")).string(),
                       io::matrix_to_csv(matrices[j].values, sets[j].spans(), names));
      }
    }
    return 0;
  }

  if (o.stage == "cluster") {
    const bool stylo = o.cfg.method == Method::stylo;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      const std::string file = set_file(stylo ? "features" : "distances", j, "csv");
      const auto lm = io::matrix_from_csv(io::read_file(in_workdir(o, file).string()));
      check_matrix_rows(lm, sets[j], file);
      const auto params = stylesplit::cluster_params(o.cfg, sets[j].offset);
      auto c = stylo ? stylesplit::kmeans(lm.values, params)
                     : stylesplit::kmedoids(lm.values, params);
      if (c.degenerate) warn(file + ": empty or duplicated label class");
      io::write_file(in_workdir(o, set_file("clustering", j, "csv")).string(),
                     io::clustering_to_csv(stylesplit::attach(std::move(c), sets[j])));
    }
    return 0;
  }

  if (o.stage == "align") {
    const auto raw = load_clusterings(o, m, sets, "clustering");
    const auto alignment =
        stylesplit::align_labels(raw, o.cfg.align, stylesplit::maxcut_options(o.cfg));
    for (std::size_t j = 0; j < sets.size(); ++j) {
      io::write_file(in_workdir(o, set_file("aligned", j, "csv")).string(),
                     io::clustering_to_csv(alignment.clusterings[j]));
    }
    const std::string audit = io::alignment_to_json(alignment).dump(2) + "\n";
    io::write_file(in_workdir(o, "alignment.json").string(), audit);
    if (o.output.empty() == false) io::write_file(o.output, audit);
    return 0;
  }

  if (o.stage == "average") {
    const auto aligned = load_clusterings(o, m, sets, "aligned");
    const auto result = stylesplit::average_stage(aligned, o.cfg, m.words);
    const auto truth = load_truth(o);
    const auto raw = load_clusterings(o, m, sets, "clustering");
    emit(o, render(o, result, &raw, &aligned, truth));
    if (truth) report_evaluation(o, result, *truth, m.words);
    return 0;
  }

  throw stylesplit::ParameterError("unknown stage '" + o.stage + "'");
}

int run_render(Options& o) {
  io::json j;
  try {
    j = io::json::parse(io::read_file(o.result_path));
  } catch (const io::json::parse_error& e) {
    throw stylesplit::ValidationError("result", e.what());
  }
  const auto result = io::result_from_json(j);
  const auto truth = load_truth(o);
  emit(o, stylesplit::render_svg({&result, nullptr, nullptr, truth ? &*truth : nullptr}));
  return 0;
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << io::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
  return code;
}

void add_pipeline_flags(CLI::App* cmd, Options& o) {
  auto& c = o.cfg;
  cmd->add_option("--n", c.n, "Number of presumed authors")->envname("STYLESPLIT_N");
  cmd->add_option("--fragment", c.fragment_size, "Fragment length L in words")
      ->envname("STYLESPLIT_FRAGMENT");
  cmd->add_option("--step", c.step, "Shift s between fragment sets in words")
      ->envname("STYLESPLIT_STEP");
  cmd->add_option("--method", c.method, "Clustering input: stylo or ncd")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Method>{{"stylo", Method::stylo}, {"ncd", Method::ncd}}))
      ->envname("STYLESPLIT_METHOD");
  cmd->add_option("--align", c.align, "Label alignment: auto, matching or maxcut")
      ->transform(CLI::CheckedTransformer(std::map<std::string, AlignMode>{
          {"auto", AlignMode::automatic},
          {"matching", AlignMode::matching},
          {"maxcut", AlignMode::maxcut}}))
      ->envname("STYLESPLIT_ALIGN");
  cmd->add_flag("--project", o.project, "Random-project features before k-means");
  cmd->add_option("--eps", o.eps, "Projection error parameter (implies --project)")
      ->envname("STYLESPLIT_EPS");
  cmd->add_option("--c", o.c, "Projection constant")->envname("STYLESPLIT_C");
  cmd->add_flag("--no-standardize", o.no_standardize, "Keep raw feature scales");
  cmd->add_option("--char-top-k", c.features.char_top_k, "Tracked characters")
      ->envname("STYLESPLIT_CHAR_TOP_K");
  cmd->add_option("--word-top-f", c.features.word_top_f, "Tracked words")
      ->envname("STYLESPLIT_WORD_TOP_F");
  cmd->add_option("--seed", c.seed, "Run seed")->envname("STYLESPLIT_SEED");
  cmd->add_option("--restarts", c.restarts, "Clustering restarts")->envname("STYLESPLIT_RESTARTS");
  cmd->add_option("--max-iters", c.max_iters, "k-means iteration cap")
      ->envname("STYLESPLIT_MAX_ITERS");
  cmd->add_option("--rounds", c.rounds, "Hyperplane roundings for max-cut alignment")
      ->envname("STYLESPLIT_ROUNDS");
  cmd->add_option("--threads", c.threads, "Worker threads")->envname("STYLESPLIT_THREADS");
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format: json, csv or svg")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{
          {"json", Format::json}, {"csv", Format::csv}, {"svg", Format::svg}}))
      ->envname("STYLESPLIT_FORMAT");
  cmd->add_option("-o,--output", o.output, "Output file (default: stdout)");
  cmd->add_option("--truth", o.truth, "Ground-truth CSV (start_word,end_word,label)");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Unsupervised attribution of a text to n unknown authors"};
  app.require_subcommand(1);

  auto* attribute = app.add_subcommand("attribute", "Run the whole pipeline on a text file");
  add_pipeline_flags(attribute, o);
  add_output_flags(attribute, o);
  attribute->add_option("input", o.input, "UTF-8 text file")->required();

  auto* stage = app.add_subcommand("stage", "Run one pipeline stage inside a work directory");
  stage->add_option("name", o.stage, "fragment|features|distances|cluster|align|average")
      ->required()
      ->check(CLI::IsMember({"fragment", "features", "distances", "cluster", "align", "average"}));
  stage->add_option("input", o.input, "UTF-8 text file (fragment stage)");
  stage->add_option("--workdir", o.workdir, "Directory holding stage artifacts");
  add_pipeline_flags(stage, o);
  add_output_flags(stage, o);

  auto* render_cmd = app.add_subcommand("render", "Render a result JSON file as SVG");
  render_cmd->add_option("result", o.result_path, "Result JSON")->required();
  render_cmd->add_option("-o,--output", o.output, "Output file (default: stdout)");
  render_cmd->add_option("--truth", o.truth, "Ground-truth CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  const bool eps_given = attribute->count("--eps") + stage->count("--eps") > 0;
  if (o.project || eps_given) o.cfg.features.projection = stylesplit::ProjectionOptions{o.eps, o.c};
  o.cfg.features.standardize = !o.no_standardize;

  try {
    if (attribute->parsed()) return run_attribute(o);
    if (stage->parsed()) return run_stage(o);
    return run_render(o);
  } catch (const stylesplit::Error& e) {
    return fail(std::string(stylesplit::to_string(e.kind())), e.what(),
                e.kind() == stylesplit::ErrorKind::solver ? 1 : 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 2);
  }
}
