#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lancaster/error.hpp"
#include "lancaster/random.hpp"
#include "lancaster/statistics.hpp"

namespace lancaster {

enum class BootstrapMethod { wild, permutation };

inline const char* to_string(BootstrapMethod m) { return m == BootstrapMethod::wild ? "wild" : "permutation"; }

// Parameters of the Gaussian AR(1) multiplier process
//   W_1 ~ N(0,1),  W_t = exp(-1/l_n) W_{t-1} + sqrt(1 - exp(-2/l_n)) eps_t.
struct WildProcessParams {
  double ln = 20.0;  // dependence length, in samples
  std::size_t n = 1;

  void validate() const {
    detail::require(std::isfinite(ln) && ln > 0.0, "wild bootstrap l_n must be positive");
    detail::require(n >= 1, "wild bootstrap needs n >= 1");
  }

  double autocorrelation() const { return std::exp(-1.0 / ln); }
};

struct BootstrapDraws {
  std::vector<double> values;
  BootstrapMethod method = BootstrapMethod::wild;

  std::size_t size() const noexcept { return values.size(); }
};

namespace detail {

template <class Engine>
void fill_wild_multipliers(const WildProcessParams& p, Engine& rng, double* out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double rho = p.autocorrelation();
  const double innovation_scale = std::sqrt(1.0 - std::exp(-2.0 / p.ln));
  double w = normal(rng);
  out[0] = w;
  for (std::size_t t = 1; t < p.n; ++t) {
    w = rho * w + innovation_scale * normal(rng);
    out[t] = w;
  }
}

}  // namespace detail

template <class Engine>
Eigen::VectorXd draw_wild_multipliers(const WildProcessParams& p, Engine& rng) {
  p.validate();
  Eigen::VectorXd w(static_cast<Eigen::Index>(p.n));
  detail::fill_wild_multipliers(p, rng, w.data());
  return w;
}

// (1/n) w^T core w.
inline double wild_statistic(const CoreMatrix& core, const Eigen::VectorXd& w) {
  detail::require(w.size() == core.size(), "wild multiplier length " + std::to_string(w.size()) +
                                               " does not match core dimension " + std::to_string(core.size()));
  return w.dot(core.values * w) / static_cast<double>(core.size());
}

// N wild-bootstrap statistics. Draw b uses multipliers from stream.child(b);
// draws are evaluated in blocks through one matrix product per block.
inline BootstrapDraws wild_bootstrap(const CoreMatrix& core, double ln, std::size_t draws, const Stream& stream) {
  detail::require(draws >= 1, "bootstrap count must be at least 1");
  const Eigen::Index n = core.size();
  WildProcessParams params{ln, static_cast<std::size_t>(n)};
  params.validate();

  constexpr Eigen::Index kBlock = 64;
  BootstrapDraws out{std::vector<double>(draws), BootstrapMethod::wild};
  Eigen::MatrixXd w;
  Eigen::MatrixXd cw;
  for (std::size_t first = 0; first < draws; first += kBlock) {
    const auto width = static_cast<Eigen::Index>(std::min<std::size_t>(kBlock, draws - first));
    w.resize(n, width);
    for (Eigen::Index b = 0; b < width; ++b) {
      auto rng = stream.child(first + static_cast<std::size_t>(b)).engine();
      detail::fill_wild_multipliers(params, rng, w.col(b).data());
    }
    cw.noalias() = core.values * w;
    for (Eigen::Index b = 0; b < width; ++b)
      out.values[first + static_cast<std::size_t>(b)] = w.col(b).dot(cw.col(b)) / static_cast<double>(n);
  }
  return out;
}

template <class Engine>
std::vector<std::size_t> random_permutation(std::size_t n, Engine& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Lancaster statistic after re-indexing the target series by a uniform random
// permutation, recomputed from scratch.
template <class Engine>
double permutation_statistic(const TripleSeries& t, const KernelTriple& kernels, Target target, Engine& rng) {
  auto order = random_permutation(t.size(), rng);
  auto shuffled = t.with_target_reindexed(target, order);
  return lancaster_statistic(shuffled, kernels.x, kernels.y, kernels.z);
}

// (1/n) sum_ij pair_ij * target_{pi(i) pi(j)}: the statistic of core = pair o target
// after permuting the target variable. Equivalent to recomputing the statistic
// on re-indexed data because empirical centring commutes with re-indexing.
inline double permuted_core_statistic(const Eigen::MatrixXd& pair, const Eigen::MatrixXd& target,
                                      std::span<const std::size_t> order) {
  const Eigen::Index n = pair.rows();
  detail::require(order.size() == static_cast<std::size_t>(n), "permutation length does not match the factors");
  std::vector<std::uint32_t> idx(order.begin(), order.end());
  const std::uint32_t* o = idx.data();
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double* a = pair.col(j).data();
    const double* c = target.col(static_cast<Eigen::Index>(o[j])).data();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    Eigen::Index i = 0;
    for (; i + 4 <= n; i += 4) {
      s0 += a[i] * c[o[i]];
      s1 += a[i + 1] * c[o[i + 1]];
      s2 += a[i + 2] * c[o[i + 2]];
      s3 += a[i + 3] * c[o[i + 3]];
    }
    for (; i < n; ++i) s0 += a[i] * c[o[i]];
    total += (s0 + s1) + (s2 + s3);
  }
  return total / static_cast<double>(n);
}

// N permutation-bootstrap statistics; permutation b comes from stream.child(b).
inline BootstrapDraws permutation_bootstrap(const Eigen::MatrixXd& pair, const Eigen::MatrixXd& target,
                                            std::size_t draws, const Stream& stream) {
  detail::require(draws >= 1, "bootstrap count must be at least 1");
  detail::require(pair.rows() == target.rows() && pair.cols() == target.cols() && pair.rows() == pair.cols(),
                  "permutation bootstrap factors must be square and equal in size");
  BootstrapDraws out{std::vector<double>(draws), BootstrapMethod::permutation};
  for (std::size_t b = 0; b < draws; ++b) {
    auto rng = stream.child(b).engine();
    auto order = random_permutation(static_cast<std::size_t>(pair.rows()), rng);
    out.values[b] = permuted_core_statistic(pair, target, order);
  }
  return out;
}

// Add-one Monte-Carlo p-value (1 + #{draws >= observed}) / (N + 1).
inline double p_value(double observed, const BootstrapDraws& draws) {
  detail::require(!draws.values.empty(), "p-value needs at least one bootstrap draw");
  const auto exceed = std::count_if(draws.values.begin(), draws.values.end(), [&](double d) { return d >= observed; });
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(draws.values.size()) + 1.0);
}

}  // namespace lancaster
