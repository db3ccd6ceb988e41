#pragma once

#include <zlib.h>

#include <Eigen/Dense>
#include <algorithm>
#include <concepts>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stylesplit/error.hpp"
#include "stylesplit/parallel.hpp"

namespace stylesplit {

// A compressor only has to report C(x), the compressed size of x in bytes.
// It must be deterministic and safe to call concurrently.
template <class C>
concept Compressor = requires(const C& c, std::string_view bytes) {
  { c.compressed_size(bytes) } -> std::convertible_to<std::size_t>;
  { c.name() } -> std::convertible_to<std::string>;
};

// zlib-wrapped DEFLATE at level 9, 32 KiB window.
class DeflateCompressor {
 public:
  static constexpr std::size_t kWindowBytes = 32768;

  explicit DeflateCompressor(int level = Z_BEST_COMPRESSION) : level_(level) {}

  std::string name() const { return "deflate-" + std::to_string(level_); }

  std::size_t compressed_size(std::string_view bytes) const {
    uLongf out_len = compressBound(static_cast<uLong>(bytes.size()));
    std::vector<Bytef> out(out_len);
    const int rc = compress2(out.data(), &out_len,
                             reinterpret_cast<const Bytef*>(bytes.data()),
                             static_cast<uLong>(bytes.size()), level_);
    if (rc != Z_OK) throw InputError("deflate failed with code " + std::to_string(rc));
    return static_cast<std::size_t>(out_len);
  }

 private:
  int level_;
};

static_assert(Compressor<DeflateCompressor>);

namespace detail {

inline double ncd_from_sizes(std::size_t cx, std::size_t cy, std::size_t cxy) {
  const auto lo = static_cast<double>(std::min(cx, cy));
  const auto hi = static_cast<double>(std::max(cx, cy));
  return (static_cast<double>(cxy) - lo) / hi;
}

}  // namespace detail

// Normalized compression distance (C(xy) - min(C(x),C(y))) / max(C(x),C(y)),
// unclamped. xy is byte concatenation.
template <Compressor C>
double ncd(std::string_view x, std::string_view y, const C& compressor) {
  if (x.empty() || y.empty()) throw ParameterError("ncd needs nonempty inputs");
  std::string xy;
  xy.reserve(x.size() + y.size());
  xy.append(x).append(y);
  return detail::ncd_from_sizes(compressor.compressed_size(x),
                                compressor.compressed_size(y),
                                compressor.compressed_size(xy));
}

struct DistanceMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> warnings;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

// Symmetrized NCD matrix: entry (i,j) is the mean of NCD(i,j) and NCD(j,i),
// with a zero diagonal. Singles are compressed once each; every ordered
// pair is compressed once.
template <Compressor C>
DistanceMatrix distance_matrix(const std::vector<std::string>& fragments,
                               const C& compressor, std::size_t threads = 1,
                               std::size_t window_bytes = DeflateCompressor::kWindowBytes) {
  const std::size_t p = fragments.size();
  if (p < 2) throw ParameterError("distance matrix needs at least 2 fragments");
  DistanceMatrix out;
  for (std::size_t i = 0; i < p; ++i) {
    if (fragments[i].empty()) {
      throw ParameterError("fragment " + std::to_string(i) + " is empty");
    }
    if (fragments[i].size() > window_bytes / 2) {
      out.warnings.push_back("fragment " + std::to_string(i) + " has " +
                             std::to_string(fragments[i].size()) +
                             " bytes, more than half the compressor window");
    }
  }

  std::vector<std::size_t> single(p);
  parallel_for(p, threads,
               [&](std::size_t i) { single[i] = compressor.compressed_size(fragments[i]); });

  Eigen::MatrixXd directed = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                   static_cast<Eigen::Index>(p));
  parallel_for(p * p, threads, [&](std::size_t k) {
    const std::size_t i = k / p, j = k % p;
    if (i == j) return;
    std::string xy;
    xy.reserve(fragments[i].size() + fragments[j].size());
    xy.append(fragments[i]).append(fragments[j]);
    directed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        detail::ncd_from_sizes(single[i], single[j], compressor.compressed_size(xy));
  });

  out.values = 0.5 * (directed + directed.transpose());
  out.values.diagonal().setZero();
  return out;
}

}  // namespace stylesplit
