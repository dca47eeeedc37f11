#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string>
#include <utility>

#include "lancaster/error.hpp"
#include "lancaster/kernels.hpp"

namespace lancaster {

// Which variable a sub-hypothesis claims is independent of the other two.
enum class Target { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Target, 3> kAllTargets{Target::X, Target::Y, Target::Z};

inline const char* to_string(Target t) {
  switch (t) {
    case Target::X: return "X";
    case Target::Y: return "Y";
    case Target::Z: return "Z";
  }
  return "?";
}

// Indices of the two variables paired against `target`, in (X, Y, Z) order.
inline std::pair<std::size_t, std::size_t> paired_variables(Target target) {
  switch (target) {
    case Target::X: return {1, 2};
    case Target::Y: return {0, 2};
    case Target::Z: return {0, 1};
  }
  return {0, 1};
}

class TripleSeries {
 public:
  TripleSeries(Series x, Series y, Series z) : vars_{std::move(x), std::move(y), std::move(z)} {
    detail::require(vars_[0].size() == vars_[1].size() && vars_[1].size() == vars_[2].size(),
                    "triple series lengths differ: " + std::to_string(vars_[0].size()) + ", " +
                        std::to_string(vars_[1].size()) + ", " + std::to_string(vars_[2].size()));
  }

  std::size_t size() const noexcept { return vars_[0].size(); }
  const Series& x() const noexcept { return vars_[0]; }
  const Series& y() const noexcept { return vars_[1]; }
  const Series& z() const noexcept { return vars_[2]; }
  const Series& operator[](std::size_t i) const { return vars_.at(i); }
  const Series& operator[](Target t) const { return vars_[static_cast<std::size_t>(t)]; }

  // Applies one re-indexing to all three series.
  TripleSeries reindexed(std::span<const std::size_t> order) const {
    return {vars_[0].reindexed(order), vars_[1].reindexed(order), vars_[2].reindexed(order)};
  }

  // Re-indexes only the `target` series.
  TripleSeries with_target_reindexed(Target target, std::span<const std::size_t> order) const {
    auto vars = vars_;
    vars[static_cast<std::size_t>(target)] = vars_[static_cast<std::size_t>(target)].reindexed(order);
    return {std::move(vars[0]), std::move(vars[1]), std::move(vars[2])};
  }

  friend bool operator==(const TripleSeries&, const TripleSeries&) = default;

 private:
  std::array<Series, 3> vars_;
};

struct KernelTriple {
  KernelSpec x{1.0};
  KernelSpec y{1.0};
  KernelSpec z{1.0};

  const KernelSpec& operator[](std::size_t i) const {
    return i == 0 ? x : (i == 1 ? y : z);
  }
};

// Symmetric n x n matrix whose normalised V-statistic (1/n) * sum is the test
// statistic for one sub-hypothesis, and which the wild bootstrap resamples.
struct CoreMatrix {
  Eigen::MatrixXd values;
  Target target = Target::Z;

  Eigen::Index size() const noexcept { return values.rows(); }
  double statistic() const { return values.sum() / static_cast<double>(values.rows()); }
};

// Raw and empirically centred Gram matrices of all three variables,
// computed once and shared by every statistic on the same data.
struct GramSet {
  std::array<GramMatrix, 3> raw;
  std::array<GramMatrix, 3> centered;

  static GramSet build(const TripleSeries& t, const KernelTriple& kernels) {
    GramSet out;
    for (std::size_t v = 0; v < 3; ++v) {
      out.raw[v] = gram(kernels[v], t[v]);
      out.centered[v] = center_empirical(out.raw[v]);
    }
    return out;
  }

  Eigen::Index size() const noexcept { return raw[0].values.rows(); }
};

namespace detail {

inline void require_statistic_length(std::size_t n) {
  require(n >= 4, "interaction statistics need at least 4 observations, got " + std::to_string(n));
}

// The two Hadamard factors of a sub-hypothesis core: core = pair o target.
struct CoreFactors {
  Eigen::MatrixXd pair;    // centred product of the paired variables' Gram matrices
  Eigen::MatrixXd target;  // empirically centred Gram matrix of the target
};

inline CoreFactors lancaster_factors(const GramSet& g, Target target) {
  auto [a, b] = paired_variables(target);
  return {center_matrix(g.centered[a].values.cwiseProduct(g.centered[b].values)),
          g.centered[static_cast<std::size_t>(target)].values};
}

inline CoreFactors threeway_hsic_factors(const GramSet& g, Target target) {
  auto [a, b] = paired_variables(target);
  return {center_matrix(g.raw[a].values.cwiseProduct(g.raw[b].values)),
          g.centered[static_cast<std::size_t>(target)].values};
}

}  // namespace detail

// n * |mu_L|^2 = (1/n) (K~ o L~ o M~)_{++}; symmetric in the three variables.
inline double lancaster_statistic(const GramSet& g) {
  detail::require_statistic_length(static_cast<std::size_t>(g.size()));
  const Eigen::MatrixXd& k = g.centered[0].values;
  const Eigen::MatrixXd& l = g.centered[1].values;
  const Eigen::MatrixXd& m = g.centered[2].values;
  return k.cwiseProduct(l).cwiseProduct(m).sum() / static_cast<double>(g.size());
}

inline double lancaster_statistic(const TripleSeries& t, const KernelSpec& kx, const KernelSpec& ky,
                                  const KernelSpec& kz) {
  detail::require_statistic_length(t.size());
  return lancaster_statistic(GramSet::build(t, {kx, ky, kz}));
}

// centre(A~ o B~) o C~ for the pair (A, B) opposite `target` and the target's C.
inline CoreMatrix lancaster_core(const GramSet& g, Target target) {
  detail::require_statistic_length(static_cast<std::size_t>(g.size()));
  auto f = detail::lancaster_factors(g, target);
  return {f.pair.cwiseProduct(f.target), target};
}

inline CoreMatrix lancaster_core(const TripleSeries& t, const KernelSpec& kx, const KernelSpec& ky,
                                 const KernelSpec& kz, Target target) {
  detail::require_statistic_length(t.size());
  return lancaster_core(GramSet::build(t, {kx, ky, kz}), target);
}

// Same as lancaster_core with the pair's Gram matrices left uncentred before
// the Hadamard product: the HSIC core of the paired variable under the
// product kernel against the target.
inline CoreMatrix threeway_hsic_core(const GramSet& g, Target target) {
  detail::require_statistic_length(static_cast<std::size_t>(g.size()));
  auto f = detail::threeway_hsic_factors(g, target);
  return {f.pair.cwiseProduct(f.target), target};
}

inline CoreMatrix threeway_hsic_core(const TripleSeries& t, const KernelSpec& kx, const KernelSpec& ky,
                                     const KernelSpec& kz, Target target) {
  detail::require_statistic_length(t.size());
  return threeway_hsic_core(GramSet::build(t, {kx, ky, kz}), target);
}

// K~ o L~; (1/n) of its sum is n * HSIC_b.
inline Eigen::MatrixXd hsic_core(const GramMatrix& k_centered, const GramMatrix& l_centered) {
  detail::require(k_centered.size() == l_centered.size(), "HSIC Gram matrices differ in size");
  return k_centered.values.cwiseProduct(l_centered.values);
}

inline double hsic_statistic(const GramMatrix& k_raw, const GramMatrix& l_raw) {
  detail::require(k_raw.size() == l_raw.size(), "HSIC Gram matrices differ in size");
  return hsic_core(center_empirical(k_raw), center_empirical(l_raw)).sum() / static_cast<double>(k_raw.size());
}

// n * HSIC_b = (1/n) (K~ o L~)_{++}.
inline double hsic_statistic(const Series& a, const Series& b, const KernelSpec& ka, const KernelSpec& kb) {
  detail::require(a.size() == b.size(), "HSIC series lengths differ: " + std::to_string(a.size()) + " vs " +
                                            std::to_string(b.size()));
  return hsic_statistic(gram(ka, a), gram(kb, b));
}

// The same quantity from uncentred matrices:
// (1/n)(K o L)_{++} - (2/n^2)(K L)_{++} + (1/n^3) K_{++} L_{++}.
inline double hsic_statistic_expanded(const GramMatrix& k_raw, const GramMatrix& l_raw) {
  detail::require(k_raw.size() == l_raw.size(), "HSIC Gram matrices differ in size");
  const double n = static_cast<double>(k_raw.size());
  const Eigen::MatrixXd& k = k_raw.values;
  const Eigen::MatrixXd& l = l_raw.values;
  const Eigen::VectorXd k_cols = k.colwise().sum().transpose();
  const Eigen::VectorXd l_rows = l.rowwise().sum();
  return k.cwiseProduct(l).sum() / n - 2.0 * k_cols.dot(l_rows) / (n * n) + k.sum() * l.sum() / (n * n * n);
}

}  // namespace lancaster
