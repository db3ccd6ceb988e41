#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stylesplit/cluster.hpp"
#include "stylesplit/corpus.hpp"
#include "stylesplit/error.hpp"
#include "stylesplit/seeding.hpp"

namespace stylesplit {

// Bijection on labels {0..n-1}; map[old] = new.
struct LabelPermutation {
  std::vector<std::size_t> map;

  static LabelPermutation identity(std::size_t n) {
    LabelPermutation p;
    p.map.resize(n);
    std::iota(p.map.begin(), p.map.end(), std::size_t{0});
    return p;
  }
  std::size_t size() const { return map.size(); }
  bool is_bijection() const {
    std::vector<char> seen(map.size(), 0);
    for (std::size_t v : map) {
      if (v >= map.size() || seen[v]) return false;
      seen[v] = 1;
    }
    return true;
  }
  LabelPermutation inverse() const {
    LabelPermutation inv;
    inv.map.resize(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) inv.map[map[i]] = i;
    return inv;
  }
  bool operator==(const LabelPermutation&) const = default;
};

// y[i] = -1 means "swap the two labels of clustering i". y and -y describe
// the same alignment.
struct FlipAssignment {
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  bool operator==(const FlipAssignment&) const = default;
};

// ---------------------------------------------------------------------------
// Agreement

namespace detail {

inline std::vector<std::size_t> order_by_start(const FragmentSet& s, std::size_t t_len) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s.fragments[a].span.start < s.fragments[b].span.start;
  });
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Span& sp = s.fragments[idx[k]].span;
    if (sp.start >= sp.end || sp.end > t_len) {
      throw ParameterError("span [" + std::to_string(sp.start) + ", " +
                           std::to_string(sp.end) + ") outside text of " +
                           std::to_string(t_len) + " words");
    }
    if (k > 0 && s.fragments[idx[k - 1]].span.end > sp.start) {
      throw ParameterError("fragments within a set overlap");
    }
  }
  return idx;
}

inline void check_same_n(const FragmentSet& a, const FragmentSet& b) {
  if (a.n != b.n) {
    throw ParameterError("fragment sets have different author counts (" +
                         std::to_string(a.n) + " vs " + std::to_string(b.n) + ")");
  }
  for (const auto* s : {&a, &b}) {
    for (const auto& f : s->fragments) {
      if (f.weights.size() != s->n) throw ParameterError("weight vector length differs from n");
    }
  }
}

// Calls visit(fa, fb, overlap) for every pair of fragments with a nonempty
// intersection, in O(|A| + |B|) after sorting.
template <class Visit>
void sweep_overlaps(const FragmentSet& a, const FragmentSet& b, std::size_t t_len,
                    Visit&& visit) {
  const auto ia = order_by_start(a, t_len);
  const auto ib = order_by_start(b, t_len);
  std::size_t i = 0, j = 0;
  while (i < ia.size() && j < ib.size()) {
    const Fragment& fa = a.fragments[ia[i]];
    const Fragment& fb = b.fragments[ib[j]];
    if (const std::size_t o = intersection_size(fa.span, fb.span); o > 0) visit(fa, fb, o);
    if (fa.span.end < fb.span.end) ++i;
    else if (fb.span.end < fa.span.end) ++j;
    else ++i, ++j;
  }
}

inline double dot(const WeightVector& a, const WeightVector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline bool is_hard(const FragmentSet& s) {
  for (const auto& f : s.fragments) {
    for (double w : f.weights) {
      if (w != 0.0 && w != 1.0) return false;
    }
  }
  return true;
}

inline std::size_t hard_label(const WeightVector& w) {
  return static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
}

}  // namespace detail

// (1/|T|) sum over fragment pairs of |fa ∩ fb| times the dot product of
// their weight vectors.
inline double agreement(const FragmentSet& a, const FragmentSet& b, std::size_t t_len) {
  detail::check_same_n(a, b);
  if (t_len == 0) throw ParameterError("text length must be positive");
  double total = 0.0;
  detail::sweep_overlaps(a, b, t_len, [&](const Fragment& fa, const Fragment& fb, std::size_t o) {
    total += static_cast<double>(o) * detail::dot(fa.weights, fb.weights);
  });
  return total / static_cast<double>(t_len);
}

// Number of words covered by both sets.
inline std::size_t common_coverage(const FragmentSet& a, const FragmentSet& b,
                                   std::size_t t_len) {
  std::size_t total = 0;
  detail::sweep_overlaps(a, b, t_len,
                         [&](const Fragment&, const Fragment&, std::size_t o) { total += o; });
  return total;
}

inline double sum_of_pairs_agreement(const std::vector<FragmentSet>& sets, std::size_t t_len) {
  const std::size_t m = sets.size();
  if (m < 2) throw ParameterError("sum-of-pairs agreement needs at least 2 sets");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) total += agreement(sets[i], sets[j], t_len);
  }
  return total / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

inline FragmentSet apply_permutation(FragmentSet s, const LabelPermutation& p) {
  if (p.size() != s.n || !p.is_bijection()) throw ParameterError("invalid label permutation");
  for (auto& f : s.fragments) {
    WeightVector w(s.n, 0.0);
    for (std::size_t k = 0; k < s.n; ++k) w[p.map[k]] = f.weights[k];
    f.weights = std::move(w);
  }
  return s;
}

// Swaps the two labels of a two-author set.
inline FragmentSet flip(FragmentSet s) {
  if (s.n != 2) throw ParameterError("flip is defined for two authors");
  for (auto& f : s.fragments) std::swap(f.weights[0], f.weights[1]);
  return s;
}

struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Word-mass confusion counts of two hard two-label sets on the same span
// grid, with label 0 of `a` as the positive class.
inline ConfusionCounts binary_confusion(const FragmentSet& a, const FragmentSet& b) {
  if (a.n != 2 || b.n != 2) throw ParameterError("binary confusion needs n = 2");
  if (!detail::is_hard(a) || !detail::is_hard(b)) {
    throw ParameterError("binary confusion needs hard labels");
  }
  if (a.size() != b.size()) throw ParameterError("span grids differ");
  ConfusionCounts c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& fa = a.fragments[i];
    const auto& fb = b.fragments[i];
    if (!(fa.span == fb.span)) throw ParameterError("span grids differ");
    const bool pa = detail::hard_label(fa.weights) == 0;
    const bool pb = detail::hard_label(fb.weights) == 0;
    const std::size_t w = fa.span.size();
    if (pa && pb) c.tp += w;
    else if (!pa && !pb) c.tn += w;
    else if (!pa && pb) c.fp += w;
    else c.fn += w;
  }
  return c;
}

// (TP + TN) / |T|. With full coverage this is (TP+TN)/(TP+TN+FP+FN).
inline double binary_confusion_agreement(const FragmentSet& a, const FragmentSet& b,
                                         std::size_t t_len) {
  if (t_len == 0) throw ParameterError("text length must be positive");
  const auto c = binary_confusion(a, b);
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(t_len);
}

// ---------------------------------------------------------------------------
// Two clusterings, n authors

// Entry (i, j): words where `a` says label i and `b` says label j.
inline Eigen::MatrixXd overlap_matrix(const FragmentSet& a, const FragmentSet& b,
                                      std::size_t t_len) {
  detail::check_same_n(a, b);
  if (!detail::is_hard(a) || !detail::is_hard(b)) {
    throw ParameterError("overlap matrix is defined for hard labels");
  }
  const auto n = static_cast<Eigen::Index>(a.n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  detail::sweep_overlaps(a, b, t_len, [&](const Fragment& fa, const Fragment& fb, std::size_t o) {
    w(static_cast<Eigen::Index>(detail::hard_label(fa.weights)),
      static_cast<Eigen::Index>(detail::hard_label(fb.weights))) += static_cast<double>(o);
  });
  return w;
}

namespace detail {

// Hungarian algorithm (shortest augmenting paths with potentials), O(n^3).
// Returns col[i] for each row i of a square minimization problem.
inline std::vector<std::size_t> hungarian_min(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col(n);
  for (std::size_t j = 1; j <= n; ++j) col[p[j] - 1] = j - 1;
  return col;
}

inline double best_assignment_value(const Eigen::MatrixXd& w) {
  if (w.rows() == 0) return 0.0;
  const Eigen::MatrixXd cost = (w.maxCoeff() - w.array()).matrix();
  const auto col = hungarian_min(cost);
  double total = 0.0;
  for (std::size_t i = 0; i < col.size(); ++i) {
    total += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col[i]));
  }
  return total;
}

inline Eigen::MatrixXd drop(const Eigen::MatrixXd& w, std::size_t row, std::size_t col) {
  const auto n = w.rows();
  Eigen::MatrixXd out(n - 1, n - 1);
  for (Eigen::Index i = 0, oi = 0; i < n; ++i) {
    if (i == static_cast<Eigen::Index>(row)) continue;
    for (Eigen::Index j = 0, oj = 0; j < n; ++j) {
      if (j == static_cast<Eigen::Index>(col)) continue;
      out(oi, oj++) = w(i, j);
    }
    ++oi;
  }
  return out;
}

}  // namespace detail

inline double assignment_value(const Eigen::MatrixXd& w, const std::vector<std::size_t>& pi) {
  double total = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    total += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pi[i]));
  }
  return total;
}

// Maximum-weight perfect matching of an n x n bipartite graph. Returns
// map[i] = right vertex matched to left vertex i. Among optimal matchings
// the lexicographically smallest map is chosen.
inline LabelPermutation max_weight_matching(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw ParameterError("weight matrix must be square");
  if (w.size() > 0 && w.minCoeff() < 0.0) throw ParameterError("weights must be nonnegative");
  const auto n = static_cast<std::size_t>(w.rows());
  const double optimum = detail::best_assignment_value(w);
  const double tol = 1e-9 * std::max(1.0, std::abs(optimum));

  LabelPermutation result;
  result.map.assign(n, 0);
  std::vector<std::size_t> rows(n), cols(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  Eigen::MatrixXd rest = w;
  double fixed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // rest is indexed by remaining rows (front = row i) and remaining cols.
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double gain = rest(0, static_cast<Eigen::Index>(k));
      const Eigen::MatrixXd sub = detail::drop(rest, 0, k);
      if (fixed + gain + detail::best_assignment_value(sub) >= optimum - tol) {
        result.map[i] = cols[k];
        fixed += gain;
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
        rest = sub;
        break;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// m clusterings, two authors

namespace detail {

inline void check_agreement_matrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ParameterError("agreement matrix must be square");
  if (a.rows() < 2) throw ParameterError("agreement matrix needs m >= 2");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12) {
        throw ParameterError("agreement matrix is not symmetric");
      }
    }
  }
}

inline double pair_count(std::size_t m) {
  return static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
}

}  // namespace detail

// Mean post-flip pairwise agreement: pair (i, j) contributes a_ij when the
// two sets are flipped alike and 1 - a_ij otherwise.
inline double flip_objective(const Eigen::MatrixXd& a, const FlipAssignment& f) {
  detail::check_agreement_matrix(a);
  const auto m = static_cast<std::size_t>(a.rows());
  if (f.size() != m) throw ParameterError("flip assignment length differs from m");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double aij = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      total += f.y[i] == f.y[j] ? aij : 1.0 - aij;
    }
  }
  return total / detail::pair_count(m);
}

inline constexpr std::size_t kBruteForceFlipLimit = 24;

// Exhaustive search over the 2^(m-1) assignments with y[0] = +1. Ties go to
// the lexicographically smallest flip pattern (fewest early flips).
inline FlipAssignment solve_flips_bruteforce(const Eigen::MatrixXd& a) {
  detail::check_agreement_matrix(a);
  const auto m = static_cast<std::size_t>(a.rows());
  if (m > kBruteForceFlipLimit) {
    throw ParameterError("brute-force flip search refuses m = " + std::to_string(m) +
                         " > " + std::to_string(kBruteForceFlipLimit));
  }
  FlipAssignment cur{std::vector<int>(m, 1)};
  FlipAssignment best = cur;
  double best_value = -std::numeric_limits<double>::infinity();
  const std::uint64_t count = std::uint64_t{1} << (m - 1);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    // Position i (1-based) maps to bit m-1-i, so increasing mask is
    // lexicographic order over positions 1..m-1.
    for (std::size_t i = 1; i < m; ++i) cur.y[i] = (mask >> (m - 1 - i)) & 1 ? -1 : 1;
    const double v = flip_objective(a, cur);
    if (v > best_value + 1e-12) {
      best_value = v;
      best = cur;
    }
  }
  return best;
}

struct MaxCutOptions {
  std::size_t rounds = 1000;
  std::uint64_t seed = 0;
  // Columns of the factor V; 0 means m.
  std::size_t rank = 0;
  double tolerance = 1e-7;
  std::size_t max_iters = 10000;
};

// Unit vectors v_i maximizing sum_{i<j} (a_ij - 1/2) <v_i, v_j>.
struct Relaxation {
  Eigen::MatrixXd vectors;  // m x rank, unit rows
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline Eigen::MatrixXd shifted_coefficients(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd c = a.array() - 0.5;
  c.diagonal().setZero();
  return c;
}

inline double relaxation_value(const Eigen::MatrixXd& c, const Eigen::MatrixXd& v) {
  return 0.5 * (c.array() * (v * v.transpose()).array()).sum();
}

}  // namespace detail

// Block coordinate ascent on the unit sphere: each v_i is replaced by the
// normalized gradient sum_j c_ij v_j, which never lowers the objective.
inline Relaxation solve_maxcut_relaxation(const Eigen::MatrixXd& a, const MaxCutOptions& opt) {
  detail::check_agreement_matrix(a);
  const auto m = a.rows();
  const Eigen::Index rank = opt.rank == 0 ? m : static_cast<Eigen::Index>(opt.rank);
  const Eigen::MatrixXd c = detail::shifted_coefficients(a);

  std::mt19937_64 rng(mix_seed(opt.seed, 0));
  std::normal_distribution<double> normal;
  Relaxation r;
  r.vectors.resize(m, rank);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < rank; ++k) r.vectors(i, k) = normal(rng);
    r.vectors.row(i).normalize();
  }
  r.value = detail::relaxation_value(c, r.vectors);
  for (r.iterations = 1; r.iterations <= opt.max_iters; ++r.iterations) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::RowVectorXd g = c.row(i) * r.vectors;
      const double norm = g.norm();
      if (norm > 0.0) r.vectors.row(i) = g / norm;
    }
    const double value = detail::relaxation_value(c, r.vectors);
    const double gain = value - r.value;
    r.value = value;
    if (gain <= opt.tolerance * std::max(1.0, std::abs(value))) {
      r.converged = true;
      break;
    }
  }
  return r;
}

// Random-hyperplane rounding of a relaxation; the all-(+1) assignment is
// also a candidate. Returns the best by flip_objective, y[0] = +1, earliest
// candidate on ties.
inline FlipAssignment round_relaxation(const Eigen::MatrixXd& a, const Relaxation& r,
                                       const MaxCutOptions& opt) {
  const auto m = static_cast<std::size_t>(a.rows());
  FlipAssignment best{std::vector<int>(m, 1)};
  double best_value = flip_objective(a, best);
  std::mt19937_64 rng(mix_seed(opt.seed, 1));
  std::normal_distribution<double> normal;
  Eigen::VectorXd h(r.vectors.cols());
  FlipAssignment cur{std::vector<int>(m, 1)};
  for (std::size_t round = 0; round < opt.rounds; ++round) {
    for (Eigen::Index k = 0; k < h.size(); ++k) h[k] = normal(rng);
    const Eigen::VectorXd side = r.vectors * h;
    const int anchor = side[0] >= 0.0 ? 1 : -1;
    for (std::size_t i = 0; i < m; ++i) {
      cur.y[i] = (side[static_cast<Eigen::Index>(i)] >= 0.0 ? 1 : -1) * anchor;
    }
    const double v = flip_objective(a, cur);
    if (v > best_value) {
      best_value = v;
      best = cur;
    }
  }
  return best;
}

// Relaxation plus rounding. Throws SolverError (carrying the best rounding
// of the unconverged vectors) if the ascent hits its iteration cap.
inline FlipAssignment solve_flips_maxcut(const Eigen::MatrixXd& a, const MaxCutOptions& opt = {}) {
  if (opt.rounds < 1) throw ParameterError("rounds must be at least 1");
  const Relaxation r = solve_maxcut_relaxation(a, opt);
  FlipAssignment best = round_relaxation(a, r, opt);
  if (!r.converged) {
    throw SolverError("relaxation did not converge in " + std::to_string(opt.max_iters) +
                          " iterations",
                      best.y);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Alignment of whole clusterings

enum class AlignMode { automatic, matching, maxcut };

struct Alignment {
  std::vector<Clustering> clusterings;
  AlignMode mode = AlignMode::automatic;
  // Relabeling applied to each input clustering (map[old] = new).
  std::vector<LabelPermutation> permutations;
  std::optional<FlipAssignment> flips;
  // Matching mode: overlap matrix of clusterings 0 and 1. Max-cut mode:
  // plain pairwise agreements.
  Eigen::MatrixXd pairwise;
  // Max-cut mode: matrix handed to the flip solver (see flip_agreements).
  Eigen::MatrixXd flip_matrix;
};

inline std::size_t covered_extent(const std::vector<FragmentSet>& sets) {
  std::size_t end = 0;
  for (const auto& s : sets) {
    for (const auto& f : s.fragments) end = std::max(end, f.span.end);
  }
  return end;
}

// Pairwise agreements re-centred so that flipping one set of a pair maps
// a_ij to 1 - a_ij even when the two sets cover different words:
// a'_ij = 1/2 + a_ij - cov_ij / 2, with cov_ij the shared coverage over
// |T|. For full coverage a' = a, and maximizing flip_objective(a', y)
// maximizes the literal sum-of-pairs agreement of the flipped sets.
inline Eigen::MatrixXd flip_agreements(const std::vector<FragmentSet>& sets, std::size_t t_len,
                                       Eigen::MatrixXd* plain = nullptr) {
  const auto m = static_cast<Eigen::Index>(sets.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  if (plain) *plain = Eigen::MatrixXd::Zero(m, m);
  const double t = static_cast<double>(t_len);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const auto& si = sets[static_cast<std::size_t>(i)];
      const auto& sj = sets[static_cast<std::size_t>(j)];
      const double a = agreement(si, sj, t_len);
      const double cov = static_cast<double>(common_coverage(si, sj, t_len)) / t;
      out(i, j) = out(j, i) = 0.5 + a - 0.5 * cov;
      if (plain) (*plain)(i, j) = (*plain)(j, i) = a;
    }
  }
  return out;
}

inline Clustering relabel(Clustering c, const LabelPermutation& p) {
  for (auto& l : c.labels) l = p.map[l];
  return c;
}

// Permutes labels within each clustering to maximize agreement between
// them. Matching mode (exactly two clusterings) keeps clustering 0 and
// relabels clustering 1 by a maximum-weight matching of label overlaps.
// Max-cut mode (two authors) flips the clusterings on one side of the
// rounded cut.
inline Alignment align_labels(const std::vector<Clustering>& clusterings, AlignMode mode,
                              const MaxCutOptions& opt = {}) {
  const std::size_t m = clusterings.size();
  if (m == 0) throw ParameterError("no clusterings to align");
  const std::size_t n = clusterings.front().n;
  for (const auto& c : clusterings) {
    if (c.n != n) throw ParameterError("clusterings disagree on n");
  }
  if (m > 2 && n > 2) {
    throw UnsupportedCaseError(
        "aligning more than two clusterings of more than two authors is not supported");
  }
  if (mode == AlignMode::automatic) mode = m <= 2 ? AlignMode::matching : AlignMode::maxcut;
  if (mode == AlignMode::matching && m != 2 && m != 1) {
    throw ParameterError("matching alignment needs exactly 2 clusterings");
  }
  if (mode == AlignMode::maxcut && n != 2) {
    throw ParameterError("max-cut alignment needs n = 2");
  }

  Alignment out;
  out.mode = mode;
  out.clusterings = clusterings;
  out.permutations.assign(m, LabelPermutation::identity(n));
  if (m == 1) return out;

  std::vector<FragmentSet> sets;
  sets.reserve(m);
  for (const auto& c : clusterings) sets.push_back(to_weighted(c));
  const std::size_t t_len = covered_extent(sets);

  if (mode == AlignMode::matching) {
    out.pairwise = overlap_matrix(sets[0], sets[1], t_len);
    const LabelPermutation pairing = max_weight_matching(out.pairwise);
    // Left label i is matched to right label pairing[i]; rename right to left.
    out.permutations[1] = pairing.inverse();
    out.clusterings[1] = relabel(clusterings[1], out.permutations[1]);
    return out;
  }

  out.flip_matrix = flip_agreements(sets, t_len, &out.pairwise);
  out.flips = solve_flips_maxcut(out.flip_matrix, opt);
  for (std::size_t i = 0; i < m; ++i) {
    if (out.flips->y[i] == -1) {
      out.permutations[i].map = {1, 0};
      out.clusterings[i] = relabel(clusterings[i], out.permutations[i]);
    }
  }
  return out;
}

}  // namespace stylesplit
