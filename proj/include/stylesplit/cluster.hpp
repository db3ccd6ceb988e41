#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "stylesplit/corpus.hpp"
#include "stylesplit/error.hpp"
#include "stylesplit/ncd.hpp"
#include "stylesplit/seeding.hpp"

namespace stylesplit {

struct ClusterParams {
  std::size_t n = 2;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iters = 300;
  double tol = 1e-6;
};

// Hard n-way labeling of one fragment set. `spans` is empty until the
// clustering is attached to the fragment set it was computed from.
struct Clustering {
  std::size_t offset = 0;
  std::size_t fragment_size = 0;
  std::vector<Span> spans;
  std::vector<std::size_t> labels;
  std::size_t n = 0;
  // Set when some label class is empty (k-means) or two medoids coincide.
  bool degenerate = false;
  double objective = 0.0;
  // Objective after each iteration of the winning k-means restart.
  std::vector<double> objective_trace;

  std::size_t size() const { return labels.size(); }
};

inline Clustering attach(Clustering c, const FragmentSet& set) {
  if (c.labels.size() != set.size()) {
    throw ParameterError("clustering has " + std::to_string(c.labels.size()) +
                         " labels for " + std::to_string(set.size()) + " fragments");
  }
  c.offset = set.offset;
  c.fragment_size = set.fragment_size;
  c.spans = set.spans();
  return c;
}

// Within-cluster sum of squares of a labeling, using cluster means.
inline double within_cluster_ss(const Eigen::MatrixXd& x,
                                const std::vector<std::size_t>& labels, std::size_t n) {
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), x.cols());
  std::vector<std::size_t> sizes(n, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    centers.row(static_cast<Eigen::Index>(labels[i])) += x.row(static_cast<Eigen::Index>(i));
    ++sizes[labels[i]];
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (sizes[c] > 0) centers.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += (x.row(static_cast<Eigen::Index>(i)) -
              centers.row(static_cast<Eigen::Index>(labels[i])))
                 .squaredNorm();
  }
  return total;
}

namespace detail {

// Relabels so that labels appear in order 0, 1, 2, ... by first occurrence.
inline std::vector<std::size_t> renumber_by_first_occurrence(
    const std::vector<std::size_t>& labels, std::size_t n) {
  std::vector<std::size_t> map(n, n);
  std::size_t next = 0;
  for (std::size_t l : labels) {
    if (map[l] == n) map[l] = next++;
  }
  for (auto& m : map) {
    if (m == n) m = next++;
  }
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = map[labels[i]];
  return out;
}

struct KMeansRun {
  std::vector<std::size_t> labels;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool degenerate = false;
};

inline std::vector<std::size_t> kmeanspp_init(const Eigen::MatrixXd& x, std::size_t k,
                                              std::mt19937_64& rng) {
  const auto rows = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> chosen;
  chosen.push_back(std::uniform_int_distribution<std::size_t>(0, rows - 1)(rng));
  std::vector<double> d2(rows, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const auto& last = x.row(static_cast<Eigen::Index>(chosen.back()));
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      d2[i] = std::min(d2[i], (x.row(static_cast<Eigen::Index>(i)) - last).squaredNorm());
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      pick = rows - 1;
      for (std::size_t i = 0; i < rows; ++i) {
        r -= d2[i];
        if (r < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, rows - 1)(rng);
    }
    chosen.push_back(pick);
  }
  return chosen;
}

inline KMeansRun kmeans_once(const Eigen::MatrixXd& x, const ClusterParams& p,
                             std::mt19937_64& rng) {
  const auto rows = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<Eigen::Index>(p.n);
  Eigen::MatrixXd centers(k, x.cols());
  const auto init = kmeanspp_init(x, p.n, rng);
  for (Eigen::Index c = 0; c < k; ++c) {
    centers.row(c) = x.row(static_cast<Eigen::Index>(init[static_cast<std::size_t>(c)]));
  }

  KMeansRun run;
  run.labels.assign(rows, 0);
  std::vector<double> cost(rows);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < p.max_iters; ++iter) {
    for (std::size_t i = 0; i < rows; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = (x.row(static_cast<Eigen::Index>(i)) - centers.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          run.labels[i] = static_cast<std::size_t>(c);
        }
      }
      cost[i] = best;
    }

    // Repair empty clusters with the point farthest from its center.
    std::vector<std::size_t> sizes(p.n, 0);
    for (std::size_t l : run.labels) ++sizes[l];
    for (std::size_t c = 0; c < p.n; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = rows;
      double far_cost = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        if (sizes[run.labels[i]] > 1 && cost[i] > far_cost) {
          far_cost = cost[i];
          far = i;
        }
      }
      if (far == rows) continue;
      --sizes[run.labels[far]];
      run.labels[far] = c;
      sizes[c] = 1;
      cost[far] = 0.0;
      centers.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(far));
    }

    const double objective = std::accumulate(cost.begin(), cost.end(), 0.0);
    run.trace.push_back(objective);

    centers.setZero();
    for (std::size_t i = 0; i < rows; ++i) {
      centers.row(static_cast<Eigen::Index>(run.labels[i])) += x.row(static_cast<Eigen::Index>(i));
    }
    for (std::size_t c = 0; c < p.n; ++c) {
      if (sizes[c] > 0) centers.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
    }
    if (prev - objective <= p.tol * std::max(1.0, objective)) break;
    prev = objective;
  }

  // Hartigan single-point moves: escapes Lloyd fixed points that are not local optima.
  std::vector<std::size_t> sizes(p.n, 0);
  for (std::size_t l : run.labels) ++sizes[l];
  for (std::size_t sweep = 0; sweep < p.max_iters; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < rows; ++i) {
      const auto xi = x.row(static_cast<Eigen::Index>(i));
      const std::size_t a = run.labels[i];
      if (sizes[a] < 2) continue;
      const double na = static_cast<double>(sizes[a]);
      const double loss = na / (na - 1.0) * (xi - centers.row(static_cast<Eigen::Index>(a))).squaredNorm();
      std::size_t to = a;
      double gain = 1e-12 * std::max(1.0, loss);
      for (std::size_t b = 0; b < p.n; ++b) {
        if (b == a) continue;
        const double nb = static_cast<double>(sizes[b]);
        const double add = nb / (nb + 1.0) * (xi - centers.row(static_cast<Eigen::Index>(b))).squaredNorm();
        if (loss - add > gain) {
          gain = loss - add;
          to = b;
        }
      }
      if (to == a) continue;
      const auto ea = static_cast<Eigen::Index>(a), eb = static_cast<Eigen::Index>(to);
      centers.row(ea) = (centers.row(ea) * na - xi) / (na - 1.0);
      const double nb = static_cast<double>(sizes[to]);
      centers.row(eb) = (centers.row(eb) * nb + xi) / (nb + 1.0);
      --sizes[a];
      ++sizes[to];
      run.labels[i] = to;
      moved = true;
    }
    if (!moved) break;
    run.trace.push_back(within_cluster_ss(x, run.labels, p.n));
  }

  run.degenerate = std::find(sizes.begin(), sizes.end(), 0) != sizes.end();
  run.objective = within_cluster_ss(x, run.labels, p.n);
  return run;
}

}  // namespace detail

// Lloyd's k-means with k-means++ seeding; best of `restarts` runs by WCSS.
inline Clustering kmeans(const Eigen::MatrixXd& x, const ClusterParams& p) {
  if (p.n < 2) throw ParameterError("cluster count must be at least 2");
  if (p.restarts < 1) throw ParameterError("restarts must be at least 1");
  if (static_cast<std::size_t>(x.rows()) < p.n) {
    throw ParameterError("k-means needs at least n = " + std::to_string(p.n) +
                         " rows, got " + std::to_string(x.rows()));
  }
  detail::KMeansRun best;
  for (std::size_t r = 0; r < p.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(p.seed, r));
    auto run = detail::kmeans_once(x, p, rng);
    if (run.objective < best.objective) best = std::move(run);
  }
  Clustering c;
  c.n = p.n;
  c.labels = detail::renumber_by_first_occurrence(best.labels, p.n);
  c.degenerate = best.degenerate;
  c.objective = best.objective;
  c.objective_trace = std::move(best.trace);
  return c;
}

namespace detail {

inline double medoid_cost(const Eigen::MatrixXd& d, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : medoids) best = std::min(best, d(i, static_cast<Eigen::Index>(m)));
    total += best;
  }
  return total;
}

// Greedy BUILD from a given first medoid, then SWAP to a local optimum.
inline std::vector<std::size_t> pam(const Eigen::MatrixXd& d, std::size_t n,
                                    std::size_t first) {
  const auto p = static_cast<std::size_t>(d.rows());
  std::vector<std::size_t> medoids{first};
  std::vector<char> is_medoid(p, 0);
  is_medoid[first] = 1;
  while (medoids.size() < n) {
    std::size_t pick = p;
    double pick_cost = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < p; ++c) {
      if (is_medoid[c]) continue;
      medoids.push_back(c);
      const double cost = medoid_cost(d, medoids);
      medoids.pop_back();
      if (cost < pick_cost) {
        pick_cost = cost;
        pick = c;
      }
    }
    medoids.push_back(pick);
    is_medoid[pick] = 1;
  }

  double current = medoid_cost(d, medoids);
  for (;;) {
    double best_cost = current;
    std::size_t best_slot = n, best_candidate = p;
    for (std::size_t slot = 0; slot < n; ++slot) {
      for (std::size_t c = 0; c < p; ++c) {
        if (is_medoid[c]) continue;
        const std::size_t old = medoids[slot];
        medoids[slot] = c;
        const double cost = medoid_cost(d, medoids);
        medoids[slot] = old;
        if (cost < best_cost - 1e-12) {
          best_cost = cost;
          best_slot = slot;
          best_candidate = c;
        }
      }
    }
    if (best_slot == n) break;
    is_medoid[medoids[best_slot]] = 0;
    is_medoid[best_candidate] = 1;
    medoids[best_slot] = best_candidate;
    current = best_cost;
  }
  std::sort(medoids.begin(), medoids.end());
  return medoids;
}

}  // namespace detail

// PAM k-medoids on a precomputed distance matrix. Restart 0 starts from the
// point with the smallest distance sum; later restarts from a seeded random
// point. Each medoid labels itself; other points go to the nearest medoid.
inline Clustering kmedoids(const Eigen::MatrixXd& d, const ClusterParams& p) {
  if (d.rows() != d.cols()) throw ParameterError("distance matrix must be square");
  if (p.n < 2) throw ParameterError("cluster count must be at least 2");
  if (p.restarts < 1) throw ParameterError("restarts must be at least 1");
  const auto size = static_cast<std::size_t>(d.rows());
  if (size < p.n) {
    throw ParameterError("k-medoids needs at least n = " + std::to_string(p.n) +
                         " points, got " + std::to_string(size));
  }

  std::vector<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < p.restarts; ++r) {
    std::size_t first = 0;
    if (r == 0) {
      Eigen::Index arg = 0;
      d.rowwise().sum().minCoeff(&arg);
      first = static_cast<std::size_t>(arg);
    } else {
      std::mt19937_64 rng(mix_seed(p.seed, r));
      first = std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
    }
    auto medoids = detail::pam(d, p.n, first);
    const double cost = detail::medoid_cost(d, medoids);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(medoids);
    }
  }

  std::vector<std::size_t> labels(size, 0);
  for (std::size_t i = 0; i < size; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < best.size(); ++k) {
      if (best[k] == i) {
        labels[i] = k;
        break;
      }
      const double dist = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(best[k]));
      if (dist < nearest) {
        nearest = dist;
        labels[i] = k;
      }
    }
  }

  Clustering c;
  c.n = p.n;
  c.labels = detail::renumber_by_first_occurrence(labels, p.n);
  c.objective = best_cost;
  for (std::size_t a = 0; a < best.size(); ++a) {
    for (std::size_t b = a + 1; b < best.size(); ++b) {
      if (d(static_cast<Eigen::Index>(best[a]), static_cast<Eigen::Index>(best[b])) == 0.0) {
        c.degenerate = true;
      }
    }
  }
  return c;
}

inline Clustering kmedoids(const DistanceMatrix& d, const ClusterParams& p) {
  return kmedoids(d.values, p);
}

// One-hot weights at each fragment's label.
inline FragmentSet to_weighted(const Clustering& c) {
  if (c.spans.size() != c.labels.size()) {
    throw ParameterError("clustering is not attached to a fragment set");
  }
  FragmentSet set;
  set.offset = c.offset;
  set.fragment_size = c.fragment_size;
  set.n = c.n;
  set.fragments.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.labels[i] >= c.n) throw ParameterError("label out of range");
    WeightVector w(c.n, 0.0);
    w[c.labels[i]] = 1.0;
    set.fragments.push_back({c.spans[i], std::move(w)});
  }
  return set;
}

}  // namespace stylesplit
