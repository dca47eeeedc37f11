#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "lancaster/error.hpp"
#include "lancaster/kernels.hpp"
#include "lancaster/random.hpp"
#include "lancaster/statistics.hpp"

namespace lancaster {

// Autoregressive triples used in the experiments:
//   weak_pairwise:   X, Y AR(1) with coefficient 1/2,
//                    Z_t = Z_{t-1}/2 + d |theta_t| sign(X_t Y_t) + zeta_t
//   independent:     three independent AR(1) chains with coefficient a
//   strong_pairwise: X, Y AR(1) with coefficient 1/2,
//                    Z_t = Z_{t-1}/2 + d (X_t + Y_t) + zeta_t
// Initial values and all innovations are standard normal.
enum class ArKind { weak_pairwise, independent, strong_pairwise };

struct ArTripleSpec {
  ArKind kind = ArKind::weak_pairwise;
  std::size_t n = 1200;
  double coeff = 0.0;  // d for the dependence kinds, a for the independent kind
  std::size_t burn_in = 0;

  void validate() const {
    detail::require(n >= 2, "generated series need n >= 2");
    detail::require(std::isfinite(coeff), "generator coefficient must be finite");
    if (kind == ArKind::independent)
      detail::require(std::abs(coeff) < 1.0, "AR(1) coefficient must satisfy |a| < 1, got " + std::to_string(coeff));
  }
};

namespace detail {

// Per-variable innovation streams: x, y, z and the theta multiplier.
struct InnovationStreams {
  std::mt19937_64 x, y, z, theta;

  explicit InnovationStreams(const Stream& s)
      : x(s.child(0).engine()), y(s.child(1).engine()), z(s.child(2).engine()), theta(s.child(3).engine()) {}
};

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

template <class Step>
TripleSeries run_recursion(const ArTripleSpec& spec, const Stream& stream, double ax, double ay, Step&& z_step) {
  InnovationStreams rng(stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  double x = normal(rng.x);
  double y = normal(rng.y);
  double z = normal(rng.z);
  std::vector<double> xs, ys, zs;
  xs.reserve(spec.n);
  ys.reserve(spec.n);
  zs.reserve(spec.n);
  for (std::size_t t = 0; t < spec.burn_in + spec.n; ++t) {
    x = ax * x + normal(rng.x);
    y = ay * y + normal(rng.y);
    z = z_step(z, x, y, rng, normal);
    if (t >= spec.burn_in) {
      xs.push_back(x);
      ys.push_back(y);
      zs.push_back(z);
    }
  }
  return {Series::scalars(std::move(xs)), Series::scalars(std::move(ys)), Series::scalars(std::move(zs))};
}

}  // namespace detail

inline TripleSeries gen_weak_pairwise(const ArTripleSpec& spec, const Stream& stream) {
  spec.validate();
  const double d = spec.coeff;
  return detail::run_recursion(spec, stream, 0.5, 0.5, [d](double z, double x, double y, auto& rng, auto& normal) {
    const double theta = normal(rng.theta);
    return 0.5 * z + d * std::abs(theta) * detail::sign(x * y) + normal(rng.z);
  });
}

inline TripleSeries gen_independent_ar(const ArTripleSpec& spec, const Stream& stream) {
  spec.validate();
  const double a = spec.coeff;
  return detail::run_recursion(spec, stream, a, a, [a](double z, double, double, auto& rng, auto& normal) {
    return a * z + normal(rng.z);
  });
}

inline TripleSeries gen_strong_pairwise(const ArTripleSpec& spec, const Stream& stream) {
  spec.validate();
  const double d = spec.coeff;
  return detail::run_recursion(spec, stream, 0.5, 0.5, [d](double z, double x, double y, auto& rng, auto& normal) {
    return 0.5 * z + d * (x + y) + normal(rng.z);
  });
}

inline TripleSeries generate(const ArTripleSpec& spec, const Stream& stream) {
  switch (spec.kind) {
    case ArKind::weak_pairwise: return gen_weak_pairwise(spec, stream);
    case ArKind::independent: return gen_independent_ar(spec, stream);
    case ArKind::strong_pairwise: return gen_strong_pairwise(spec, stream);
  }
  throw InputError("unknown generator kind");
}

// Probability tensor p[i][j][k] over scalar supports of sizes (Sx, Sy, Sz).
class DiscreteJoint {
 public:
  DiscreteJoint(std::vector<double> support_x, std::vector<double> support_y, std::vector<double> support_z,
                std::vector<double> probabilities)
      : support_{std::move(support_x), std::move(support_y), std::move(support_z)}, p_(std::move(probabilities)) {
    for (const auto& s : support_) detail::require(!s.empty(), "discrete joint supports must be nonempty");
    detail::require(p_.size() == support_[0].size() * support_[1].size() * support_[2].size(),
                    "probability tensor size does not match the supports");
    double total = 0.0;
    for (double v : p_) {
      detail::require(std::isfinite(v) && v >= 0.0, "probabilities must be nonnegative");
      total += v;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }

  // Outer product p_xy[i][j] * p_z[k]; under it Z is independent of (X, Y).
  static DiscreteJoint pair_times_single(std::vector<double> sx, std::vector<double> sy, std::vector<double> sz,
                                         const std::vector<double>& p_xy, const std::vector<double>& p_z) {
    std::vector<double> p;
    p.reserve(p_xy.size() * p_z.size());
    for (double a : p_xy)
      for (double b : p_z) p.push_back(a * b);
    return DiscreteJoint(std::move(sx), std::move(sy), std::move(sz), std::move(p));
  }

  std::size_t size(std::size_t axis) const { return support_.at(axis).size(); }
  const std::vector<double>& support(std::size_t axis) const { return support_.at(axis); }
  const std::vector<double>& probabilities() const noexcept { return p_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return p_[(i * support_[1].size() + j) * support_[2].size() + k];
  }

  // Single-variable marginal of `axis`, by exhaustive summation.
  std::vector<double> marginal(std::size_t axis) const {
    std::vector<double> out(size(axis), 0.0);
    for_each_cell([&](std::size_t i, std::size_t j, std::size_t k, double p) {
      const std::size_t idx[3] = {i, j, k};
      out[idx[axis]] += p;
    });
    return out;
  }

  // Two-variable marginal over (a, b) with a < b, row-major in a.
  std::vector<double> marginal(std::size_t a, std::size_t b) const {
    std::vector<double> out(size(a) * size(b), 0.0);
    for_each_cell([&](std::size_t i, std::size_t j, std::size_t k, double p) {
      const std::size_t idx[3] = {i, j, k};
      out[idx[a] * size(b) + idx[b]] += p;
    });
    return out;
  }

  template <class Fn>
  void for_each_cell(Fn&& fn) const {
    for (std::size_t i = 0; i < support_[0].size(); ++i)
      for (std::size_t j = 0; j < support_[1].size(); ++j)
        for (std::size_t k = 0; k < support_[2].size(); ++k) fn(i, j, k, (*this)(i, j, k));
  }

 private:
  std::array<std::vector<double>, 3> support_;
  std::vector<double> p_;
};

// n i.i.d. draws from the joint, returned as three scalar series.
inline TripleSeries sample_discrete(const DiscreteJoint& joint, std::size_t n, const Stream& stream) {
  auto rng = stream.engine();
  const auto& p = joint.probabilities();
  std::discrete_distribution<std::size_t> cell(p.begin(), p.end());
  const std::size_t sy = joint.size(1);
  const std::size_t sz = joint.size(2);
  std::vector<double> xs(n), ys(n), zs(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t c = cell(rng);
    xs[t] = joint.support(0)[c / (sy * sz)];
    ys[t] = joint.support(1)[(c / sz) % sy];
    zs[t] = joint.support(2)[c % sz];
  }
  return {Series::scalars(std::move(xs)), Series::scalars(std::move(ys)), Series::scalars(std::move(zs))};
}

// Finite-state Markov chain on scalar states, started from `initial`.
struct MarkovChain {
  std::vector<double> states;
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<double> initial;

  // Symmetric two-state chain that stays put with probability `stay`;
  // its stationary law is uniform, and stay = 1/2 gives i.i.d. draws.
  static MarkovChain two_state(double low, double high, double stay) {
    detail::require(stay >= 0.0 && stay <= 1.0, "stay probability must lie in [0, 1]");
    return {{low, high}, {{stay, 1.0 - stay}, {1.0 - stay, stay}}, {0.5, 0.5}};
  }
};

inline std::vector<double> gen_markov_chain(const MarkovChain& chain, std::size_t n, const Stream& stream) {
  detail::require(!chain.states.empty() && chain.transition.size() == chain.states.size() &&
                      chain.initial.size() == chain.states.size(),
                  "Markov chain dimensions are inconsistent");
  auto rng = stream.engine();
  std::vector<std::discrete_distribution<std::size_t>> rows;
  rows.reserve(chain.transition.size());
  for (const auto& r : chain.transition) {
    detail::require(r.size() == chain.states.size(), "Markov transition row has wrong length");
    rows.emplace_back(r.begin(), r.end());
  }
  std::discrete_distribution<std::size_t> start(chain.initial.begin(), chain.initial.end());
  std::vector<double> out(n);
  std::size_t s = start(rng);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) s = rows[s](rng);
    out[t] = chain.states[s];
  }
  return out;
}

}  // namespace lancaster
