#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lancaster/error.hpp"

namespace lancaster {

// An ordered sequence of n >= 2 real points of common dimension d >= 1,
// stored row-major.
class Series {
 public:
  Series(std::vector<double> values, std::size_t dim) : data_(std::move(values)), dim_(dim) {
    detail::require(dim_ >= 1, "series dimension must be at least 1");
    detail::require(data_.size() % dim_ == 0,
                    "series storage of " + std::to_string(data_.size()) +
                        " values is not a multiple of dimension " + std::to_string(dim_));
    detail::require(size() >= 2, "series needs at least 2 points, got " + std::to_string(size()));
  }

  static Series scalars(std::vector<double> xs) { return Series(std::move(xs), 1); }

  static Series points(const std::vector<std::vector<double>>& pts) {
    detail::require(!pts.empty(), "series needs at least 2 points, got 0");
    const std::size_t dim = pts.front().size();
    std::vector<double> flat;
    flat.reserve(pts.size() * dim);
    for (const auto& p : pts) {
      detail::require(p.size() == dim, "all series points must have identical dimension");
      flat.insert(flat.end(), p.begin(), p.end());
    }
    return Series(std::move(flat), dim);
  }

  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  const std::vector<double>& values() const noexcept { return data_; }

  // Point i of the result is point order[i] of this series.
  Series reindexed(std::span<const std::size_t> order) const {
    std::vector<double> out;
    out.reserve(order.size() * dim_);
    for (std::size_t idx : order) {
      detail::require(idx < size(), "reindex position out of range");
      auto p = (*this)[idx];
      out.insert(out.end(), p.begin(), p.end());
    }
    return Series(std::move(out), dim_);
  }

  Series slice(std::size_t first, std::size_t count) const {
    detail::require(first + count <= size(), "series slice out of range");
    auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * dim_);
    return Series(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * dim_)), dim_);
  }

  friend bool operator==(const Series&, const Series&) = default;

 private:
  std::vector<double> data_;
  std::size_t dim_;
};

// Gaussian kernel k(x, y) = exp(-|x - y|^2 / (2 sigma^2)).
class KernelSpec {
 public:
  KernelSpec() noexcept = default;
  explicit KernelSpec(double bandwidth) : bandwidth_(bandwidth) {
    detail::require(std::isfinite(bandwidth) && bandwidth > 0.0, "kernel bandwidth must be positive and finite");
  }

  double bandwidth() const noexcept { return bandwidth_; }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  double bandwidth_ = 1.0;
};

enum class Centering { raw, empirical, population };

struct GramMatrix {
  Eigen::MatrixXd values;
  Centering centering = Centering::raw;

  Eigen::Index size() const noexcept { return values.rows(); }
};

namespace detail {

inline double squared_distance(std::span<const double> x, std::span<const double> y) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    acc += diff * diff;
  }
  return acc;
}

inline double gaussian(double squared_distance, double bandwidth) noexcept {
  return std::exp(-squared_distance / (2.0 * bandwidth * bandwidth));
}

}  // namespace detail

inline double evaluate(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size(), "kernel arguments have different dimensions (" + std::to_string(x.size()) +
                                            " vs " + std::to_string(y.size()) + ")");
  return detail::gaussian(detail::squared_distance(x, y), spec.bandwidth());
}

inline double evaluate(const KernelSpec& spec, double x, double y) {
  return detail::gaussian((x - y) * (x - y), spec.bandwidth());
}

// Raw Gram matrix. Only the upper triangle is evaluated; the lower triangle is
// a copy, so the result is exactly symmetric.
inline GramMatrix gram(const KernelSpec& spec, const Series& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  GramMatrix out{Eigen::MatrixXd(n, n), Centering::raw};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto pj = s[static_cast<std::size_t>(j)];
    out.values(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = detail::gaussian(detail::squared_distance(s[static_cast<std::size_t>(i)], pj), spec.bandwidth());
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

// H M H with H = I - (1/n) 1 1^T, evaluated in one pass as
// M_ij - rowmean_i - colmean_j + grandmean.
//
// For symmetric M the row and column means are bitwise identical, and the
// result is exactly symmetric because rowmean_i + rowmean_j commutes.
inline Eigen::MatrixXd center_matrix(const Eigen::MatrixXd& m) {
  detail::require(m.rows() == m.cols(), "centering needs a square matrix, got " + std::to_string(m.rows()) + "x" +
                                            std::to_string(m.cols()));
  const Eigen::Index n = m.rows();
  if (n == 0) return m;
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd row_mean(n);
  Eigen::VectorXd col_mean(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = 0.0;
    double c = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      r += m(i, j);
      c += m(j, i);
    }
    row_mean(i) = r * inv_n;
    col_mean(i) = c * inv_n;
  }
  double grand = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) grand += row_mean(i);
  grand *= inv_n;

  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = m(i, j) - (row_mean(i) + col_mean(j)) + grand;
  return out;
}

inline GramMatrix center_empirical(const GramMatrix& g) {
  return GramMatrix{center_matrix(g.values), Centering::empirical};
}

// Median of the pairwise Euclidean distances over distinct index pairs
// (mean of the two middle values when the pair count is even).
inline double median_heuristic_bandwidth(const Series& s) {
  std::vector<double> d;
  d.reserve(s.size() * (s.size() - 1) / 2);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) d.push_back(std::sqrt(detail::squared_distance(s[i], s[j])));
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; }))
    throw InputError("median heuristic is undefined: all pairwise distances are zero; set the bandwidth explicitly");
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  const double upper = d[mid];
  const double med =
      d.size() % 2 == 1 ? upper
                        : 0.5 * (*std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid)) + upper);
  if (med == 0.0)
    throw InputError("median heuristic gives zero bandwidth (most points coincide); set the bandwidth explicitly");
  return med;
}

}  // namespace lancaster
