#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lancaster/lancaster.hpp"

namespace testing_support {

inline lancaster::Series normal_series(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n * dim);
  for (double& x : v) x = normal(rng);
  return lancaster::Series(std::move(v), dim);
}

inline lancaster::TripleSeries normal_triple(std::size_t n, std::mt19937_64& rng) {
  return {normal_series(n, 1, rng), normal_series(n, 1, rng), normal_series(n, 1, rng)};
}

// X, Y independent normals and Z = XY + noise.
inline lancaster::TripleSeries interacting_triple(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> x(n), y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = normal(rng);
    y[i] = normal(rng);
    z[i] = x[i] * y[i] + 0.3 * normal(rng);
  }
  using lancaster::Series;
  return {Series::scalars(x), Series::scalars(y), Series::scalars(z)};
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

inline Eigen::MatrixXd centering_projector(Eigen::Index n) {
  return Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
}

}  // namespace testing_support
