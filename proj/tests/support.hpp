#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stylesplit/stylesplit.hpp"

namespace testing_support {

using namespace stylesplit;

inline std::string fixture_path(const std::string& name) {
  return std::string(STYLESPLIT_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  return io::read_file(fixture_path(name));
}

inline WeightVector random_weights(std::size_t n, bool hard, std::mt19937_64& rng) {
  WeightVector w(n, 0.0);
  if (hard) {
    w[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
    return w;
  }
  std::exponential_distribution<double> e(1.0);
  double total = 0.0;
  for (auto& x : w) total += (x = e(rng));
  for (auto& x : w) x /= total;
  return w;
}

// Random contiguous cut of [0, t_len) into pieces; with `gaps`, some pieces
// are dropped so that coverage is partial.
inline FragmentSet random_set(std::size_t t_len, std::size_t n, bool hard, bool gaps,
                              std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pieces(1, std::max<std::size_t>(1, t_len / 3));
  std::vector<std::size_t> cuts{0, t_len};
  const std::size_t k = pieces(rng);
  std::uniform_int_distribution<std::size_t> at(1, t_len - 1);
  for (std::size_t i = 0; i + 1 < k && t_len > 1; ++i) cuts.push_back(at(rng));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  FragmentSet s;
  s.n = n;
  std::bernoulli_distribution drop(0.3);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (gaps && drop(rng)) continue;
    s.fragments.push_back({{cuts[i], cuts[i + 1]}, random_weights(n, hard, rng)});
  }
  if (s.fragments.empty()) s.fragments.push_back({{0, t_len}, random_weights(n, hard, rng)});
  std::shuffle(s.fragments.begin(), s.fragments.end(), rng);
  return s;
}

// Grid-aligned hard set: fragments of `width` words starting at `offset`.
inline FragmentSet grid_set(std::size_t t_len, std::size_t width, std::size_t offset,
                            std::size_t n, std::mt19937_64& rng) {
  FragmentSet s;
  s.n = n;
  s.offset = offset;
  s.fragment_size = width;
  for (std::size_t b = offset; b + width <= t_len; b += width) {
    s.fragments.push_back({{b, b + width}, random_weights(n, true, rng)});
  }
  return s;
}

// O(|A||B|) reference for the agreement formula.
inline double brute_agreement(const FragmentSet& a, const FragmentSet& b, std::size_t t_len) {
  double total = 0.0;
  for (const auto& fa : a.fragments) {
    for (const auto& fb : b.fragments) {
      const auto o = static_cast<double>(intersection_size(fa.span, fb.span));
      double dot = 0.0;
      for (std::size_t i = 0; i < fa.weights.size(); ++i) dot += fa.weights[i] * fb.weights[i];
      total += o * dot;
    }
  }
  return total / static_cast<double>(t_len);
}

inline double brute_sum_of_pairs(const std::vector<FragmentSet>& sets, std::size_t t_len) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      total += brute_agreement(sets[i], sets[j], t_len);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

inline Eigen::MatrixXd random_agreements(std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                            static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) a(i, j) = a(j, i) = u(rng);
  }
  return a;
}

// Exhaustive optimum of sum_i w(i, pi(i)).
inline double brute_assignment(const Eigen::MatrixXd& w) {
  std::vector<std::size_t> pi(static_cast<std::size_t>(w.rows()));
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = i;
  double best = -1e300;
  do {
    double v = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      v += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pi[i]));
    }
    best = std::max(best, v);
  } while (std::next_permutation(pi.begin(), pi.end()));
  return best;
}

// Best flip_objective over all 2^(m-1) assignments, by direct enumeration.
inline double brute_flip_optimum(const Eigen::MatrixXd& a) {
  const auto m = static_cast<std::size_t>(a.rows());
  double best = -1.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << (m - 1)); ++mask) {
    FlipAssignment f{std::vector<int>(m, 1)};
    for (std::size_t i = 1; i < m; ++i) f.y[i] = (mask >> (i - 1)) & 1 ? -1 : 1;
    best = std::max(best, flip_objective(a, f));
  }
  return best;
}

// Labels of a partition in canonical first-occurrence form.
inline std::vector<std::size_t> canonical(const std::vector<std::size_t>& labels) {
  std::map<std::size_t, std::size_t> map;
  std::vector<std::size_t> out;
  for (std::size_t l : labels) out.push_back(map.try_emplace(l, map.size()).first->second);
  return out;
}

inline Clustering clustering_of(const std::vector<std::size_t>& labels, std::size_t width,
                                std::size_t offset, std::size_t n) {
  Clustering c;
  c.n = n;
  c.offset = offset;
  c.fragment_size = width;
  c.labels = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    c.spans.push_back({offset + i * width, offset + (i + 1) * width});
  }
  return c;
}

}  // namespace testing_support
