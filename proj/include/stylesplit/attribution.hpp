#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "stylesplit/cluster.hpp"
#include "stylesplit/corpus.hpp"
#include "stylesplit/error.hpp"
#include "stylesplit/features.hpp"
#include "stylesplit/matching.hpp"
#include "stylesplit/ncd.hpp"
#include "stylesplit/seeding.hpp"

namespace stylesplit {

struct Segment {
  Span span;
  WeightVector weights;
  // Number of clusterings with a fragment covering this segment.
  std::size_t coverage = 0;
};

// Averaged per-segment author weights: the pipeline's output.
struct AttributionResult {
  std::size_t segment_width = 0;
  std::size_t n = 0;
  std::vector<Segment> segments;
  // Some clustering had an empty label class or coincident medoids.
  bool degenerate = false;

  std::size_t covered_words() const {
    std::size_t total = 0;
    for (const auto& s : segments) total += s.span.size();
    return total;
  }
};

struct TruthSpan {
  Span span;
  std::size_t label = 0;
};

// Known authorship, used only for evaluation.
struct GroundTruth {
  std::vector<TruthSpan> spans;

  std::size_t label_count() const {
    std::size_t n = 0;
    for (const auto& s : spans) n = std::max(n, s.label + 1);
    return n;
  }
  // Spans sorted by start; throws if any two overlap.
  std::vector<TruthSpan> sorted() const {
    auto out = spans;
    std::sort(out.begin(), out.end(),
              [](const TruthSpan& a, const TruthSpan& b) { return a.span.start < b.span.start; });
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].span.start >= out[i].span.end) throw ParameterError("empty ground-truth span");
      if (i > 0 && out[i - 1].span.end > out[i].span.start) {
        throw ParameterError("ground-truth spans overlap");
      }
    }
    return out;
  }
};

inline FragmentSet to_fragment_set(const GroundTruth& truth, std::size_t n) {
  FragmentSet set;
  set.n = n;
  for (const auto& t : truth.sorted()) {
    if (t.label >= n) throw ParameterError("ground-truth label exceeds n");
    WeightVector w(n, 0.0);
    w[t.label] = 1.0;
    set.fragments.push_back({t.span, std::move(w)});
  }
  return set;
}

inline FragmentSet to_fragment_set(const AttributionResult& r, std::size_t n) {
  if (n < r.n) throw ParameterError("cannot shrink the label space of a result");
  FragmentSet set;
  set.fragment_size = r.segment_width;
  set.n = n;
  for (const auto& s : r.segments) {
    WeightVector w = s.weights;
    w.resize(n, 0.0);
    set.fragments.push_back({s.span, std::move(w)});
  }
  return set;
}

// Mean of the covering fragments' weight vectors on every s-word segment.
// Segments no clustering covers are omitted; edge segments average over the
// clusterings that do cover them.
inline AttributionResult average_clusterings(const std::vector<FragmentSet>& sets,
                                             std::size_t step, std::size_t t_len) {
  if (sets.empty()) throw ParameterError("nothing to average");
  if (step == 0) throw ParameterError("segment width must be positive");
  const std::size_t n = sets.front().n;
  const std::size_t count = (t_len + step - 1) / step;
  std::vector<WeightVector> sum(count, WeightVector(n, 0.0));
  std::vector<std::size_t> coverage(count, 0);
  for (const auto& set : sets) {
    if (set.n != n) throw ParameterError("fragment sets disagree on n");
    for (const auto& f : set.fragments) {
      if (f.span.end > t_len) throw ParameterError("fragment extends past the text");
      if (f.span.start % step != 0 || (f.span.end % step != 0 && f.span.end != t_len)) {
        throw ParameterError("fragment boundaries are not on the segment grid");
      }
      if (f.weights.size() != n) throw ParameterError("weight vector length differs from n");
      const std::size_t last = (f.span.end + step - 1) / step;
      for (std::size_t k = f.span.start / step; k < last; ++k) {
        for (std::size_t i = 0; i < n; ++i) sum[k][i] += f.weights[i];
        ++coverage[k];
      }
    }
  }

  AttributionResult out;
  out.segment_width = step;
  out.n = n;
  for (std::size_t k = 0; k < count; ++k) {
    if (coverage[k] == 0) continue;
    Segment seg;
    seg.span = {k * step, std::min((k + 1) * step, t_len)};
    seg.coverage = coverage[k];
    seg.weights = sum[k];
    double total = 0.0;
    for (double& w : seg.weights) {
      w /= static_cast<double>(coverage[k]);
      total += w;
    }
    if (std::abs(total - 1.0) <= 1e-9) {
      for (double& w : seg.weights) w /= total;
    }
    out.segments.push_back(std::move(seg));
  }
  return out;
}

inline constexpr std::size_t kExhaustiveEvaluationLimit = 8;

// Agreement between the result and the best consistent relabeling of the
// ground truth, normalized by the number of words the result covers.
// n <= 8 enumerates all n! relabelings; larger n picks the relabeling with
// a maximum-weight matching of soft label overlaps.
inline double evaluate(const AttributionResult& result, const GroundTruth& truth) {
  const std::size_t n = std::max(result.n, truth.label_count());
  const FragmentSet res = to_fragment_set(result, n);
  const FragmentSet tru = to_fragment_set(truth, n);
  const std::size_t covered = result.covered_words();
  if (covered == 0) throw ParameterError("result covers no words");
  std::size_t extent = covered_extent({res, tru});

  if (common_coverage(res, tru, extent) != covered) {
    throw ParameterError("ground truth does not cover every word of the result");
  }

  // soft(i, j): words weighted by result label i and truth label j.
  Eigen::MatrixXd soft = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(n));
  detail::sweep_overlaps(res, tru, extent, [&](const Fragment& fr, const Fragment& ft,
                                               std::size_t o) {
    const auto j = static_cast<Eigen::Index>(detail::hard_label(ft.weights));
    for (std::size_t i = 0; i < n; ++i) {
      soft(static_cast<Eigen::Index>(i), j) += static_cast<double>(o) * fr.weights[i];
    }
  });

  // Renaming truth label j to perm[j] scores sum_j soft(perm[j], j).
  double best = 0.0;
  if (n <= kExhaustiveEvaluationLimit) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        v += soft(static_cast<Eigen::Index>(perm[j]), static_cast<Eigen::Index>(j));
      }
      best = std::max(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    const Eigen::MatrixXd by_truth = soft.transpose();
    best = assignment_value(by_truth, max_weight_matching(by_truth).map);
  }
  return best / static_cast<double>(covered);
}

// Heuristic ceiling (|T| - changes * L/2) / |T| on evaluate(): the average
// cannot switch authors in fewer than L words, so each change point costs
// about L/2 words. Change points closer than L to the previous counted one
// are merged.
inline double agreement_upper_bound(const GroundTruth& truth, std::size_t fragment_size,
                                    std::size_t t_len) {
  if (t_len == 0) throw ParameterError("text length must be positive");
  const auto spans = truth.sorted();
  std::size_t changes = 0;
  std::optional<std::size_t> last;
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].label == spans[i - 1].label) continue;
    const std::size_t at = spans[i].span.start;
    if (!last || at - *last >= fragment_size) {
      ++changes;
      last = at;
    }
  }
  const double lost = static_cast<double>(changes) * static_cast<double>(fragment_size) / 2.0;
  return (static_cast<double>(t_len) - lost) / static_cast<double>(t_len);
}

// ---------------------------------------------------------------------------
// Pipeline

enum class Method { stylo, ncd };

struct ProjectionOptions {
  double eps = 0.2;
  double c = 2.0;
};

struct FeatureOptions {
  std::size_t char_top_k = 60;
  std::size_t word_top_f = 300;
  bool standardize = true;
  std::optional<ProjectionOptions> projection;
};

struct PipelineConfig {
  std::size_t n = 2;
  std::size_t fragment_size = 1000;
  std::size_t step = 100;
  Method method = Method::stylo;
  AlignMode align = AlignMode::automatic;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  std::size_t rounds = 1000;
  FeatureOptions features;
  std::size_t threads = 1;
};

// Per-set random streams are keyed by the set's word offset so that any
// stage can recover them from its own artifact.
inline std::uint64_t cluster_seed(std::uint64_t seed, std::size_t offset) {
  return mix_seed(seed, 2 * static_cast<std::uint64_t>(offset) + 1);
}
inline std::uint64_t projection_seed(std::uint64_t seed, std::size_t offset) {
  return mix_seed(seed, 2 * static_cast<std::uint64_t>(offset) + 2);
}
inline std::uint64_t alignment_seed(std::uint64_t seed) { return mix_seed(seed, 0); }

inline ClusterParams cluster_params(const PipelineConfig& cfg, std::size_t offset) {
  return {cfg.n, cluster_seed(cfg.seed, offset), cfg.restarts, cfg.max_iters, cfg.tol};
}

inline MaxCutOptions maxcut_options(const PipelineConfig& cfg) {
  MaxCutOptions opt;
  opt.rounds = cfg.rounds;
  opt.seed = alignment_seed(cfg.seed);
  return opt;
}

inline std::vector<FragmentSet> fragment_stage(const Text& text, const PipelineConfig& cfg) {
  auto sets = make_fragment_sets(text, cfg.fragment_size, cfg.step, cfg.n);
  for (const auto& s : sets) {
    if (s.size() < cfg.n) {
      throw InputError("fragment set at word " + std::to_string(s.offset + 1) + " has " +
                       std::to_string(s.size()) + " fragments, fewer than n = " +
                       std::to_string(cfg.n));
    }
  }
  return sets;
}

// Feature matrices ready for clustering: one per set, standardized and
// projected as configured.
inline std::vector<FeatureMatrix> feature_stage(const Text& text,
                                                const std::vector<FragmentSet>& sets,
                                                const PipelineConfig& cfg) {
  const FeatureSpec spec =
      build_feature_spec(text, cfg.features.char_top_k, cfg.features.word_top_f);
  std::vector<FeatureMatrix> out;
  out.reserve(sets.size());
  for (const auto& s : sets) {
    FeatureMatrix m = feature_matrix(text, s, spec, cfg.threads);
    if (cfg.features.standardize) m = standardize(m);
    if (cfg.features.projection) {
      m = random_project(m, cfg.features.projection->eps, cfg.features.projection->c, cfg.n,
                         projection_seed(cfg.seed, s.offset));
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<DistanceMatrix> distance_stage(const Text& text,
                                                  const std::vector<FragmentSet>& sets,
                                                  const PipelineConfig& cfg) {
  const DeflateCompressor compressor;
  std::vector<DistanceMatrix> out;
  out.reserve(sets.size());
  for (const auto& s : sets) {
    std::vector<std::string> fragments;
    for (const auto& f : s.fragments) fragments.push_back(fragment_text(text, f.span));
    out.push_back(distance_matrix(fragments, compressor, cfg.threads));
  }
  return out;
}

struct AttributionRun {
  AttributionResult result;
  std::vector<Clustering> raw;
  Alignment alignment;
  std::vector<std::string> warnings;
};

inline AttributionResult average_stage(const std::vector<Clustering>& aligned,
                                       const PipelineConfig& cfg, std::size_t t_len) {
  std::vector<FragmentSet> weighted;
  weighted.reserve(aligned.size());
  bool degenerate = false;
  for (const auto& c : aligned) {
    weighted.push_back(to_weighted(c));
    degenerate = degenerate || c.degenerate;
  }
  AttributionResult r = average_clusterings(weighted, cfg.step, t_len);
  r.degenerate = degenerate;
  return r;
}

// Fragment, cluster each set independently, align labels, average.
inline AttributionRun attribute(const Text& text, const PipelineConfig& cfg) {
  const auto sets = fragment_stage(text, cfg);
  const std::size_t m = sets.size();
  if (m > 2 && cfg.n > 2) {
    throw UnsupportedCaseError(
        "aligning more than two clusterings of more than two authors is not supported");
  }

  AttributionRun run;
  run.raw.reserve(m);
  if (cfg.method == Method::stylo) {
    const auto matrices = feature_stage(text, sets, cfg);
    for (std::size_t j = 0; j < m; ++j) {
      run.raw.push_back(attach(kmeans(matrices[j], cluster_params(cfg, sets[j].offset)), sets[j]));
    }
  } else {
    const auto matrices = distance_stage(text, sets, cfg);
    for (std::size_t j = 0; j < m; ++j) {
      for (const auto& w : matrices[j].warnings) run.warnings.push_back(w);
      run.raw.push_back(
          attach(kmedoids(matrices[j], cluster_params(cfg, sets[j].offset)), sets[j]));
    }
  }
  run.alignment = align_labels(run.raw, cfg.align, maxcut_options(cfg));
  run.result = average_stage(run.alignment.clusterings, cfg, text.size());
  return run;
}

}  // namespace stylesplit
