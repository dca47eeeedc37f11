#pragma once

// Exhaustive small-instance reference computations. Everything here works from
// kernel evaluations and explicit expectations under finite measures; nothing
// goes through the centred-matrix path of statistics.hpp.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "lancaster/error.hpp"
#include "lancaster/kernels.hpp"
#include "lancaster/random.hpp"
#include "lancaster/statistics.hpp"
#include "lancaster/synthdata.hpp"

namespace lancaster::oracle {

// Delta_L P evaluated cell by cell on a DiscreteJoint's support.
struct SignedMeasureTable {
  std::array<std::size_t, 3> shape{};
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values[(i * shape[1] + j) * shape[2] + k];
  }
  double total() const { return std::accumulate(values.begin(), values.end(), 0.0); }
  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

// P_XYZ - P_XY P_Z - P_XZ P_Y - P_X P_YZ + 2 P_X P_Y P_Z.
inline SignedMeasureTable lancaster_measure(const DiscreteJoint& j) {
  const auto px = j.marginal(0);
  const auto py = j.marginal(1);
  const auto pz = j.marginal(2);
  const auto pxy = j.marginal(0, 1);
  const auto pxz = j.marginal(0, 2);
  const auto pyz = j.marginal(1, 2);
  const std::size_t sy = j.size(1);
  const std::size_t sz = j.size(2);
  SignedMeasureTable out{{j.size(0), sy, sz}, {}};
  out.values.reserve(j.probabilities().size());
  j.for_each_cell([&](std::size_t x, std::size_t y, std::size_t z, double p) {
    out.values.push_back(p - pxy[x * sy + y] * pz[z] - pxz[x * sz + z] * py[y] - px[x] * pyz[y * sz + z] +
                         2.0 * px[x] * py[y] * pz[z]);
  });
  return out;
}

// Finite measure sum_a weights[a] * delta(points[a]).
struct DiscreteMeasure {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;

  static DiscreteMeasure scalars(const std::vector<double>& xs, const std::vector<double>& ws) {
    DiscreteMeasure m;
    for (double x : xs) m.points.push_back({x});
    m.weights = ws;
    return m;
  }

  static DiscreteMeasure empirical(const Series& s) {
    DiscreteMeasure m;
    for (std::size_t i = 0; i < s.size(); ++i) m.points.emplace_back(s[i].begin(), s[i].end());
    m.weights.assign(s.size(), 1.0 / static_cast<double>(s.size()));
    return m;
  }

  void validate() const {
    detail::require(!points.empty() && points.size() == weights.size(), "measure needs matching points and weights");
  }
};

// k_bar(u, v) = <k(u,.) - mu, k(v,.) - mu> with mu the embedding of a finite measure:
//   k(u,v) - E k(S,v) - E k(u,S) + E E k(S,S').
class CenteredKernel {
 public:
  CenteredKernel(KernelSpec spec, DiscreteMeasure measure) : spec_(spec), measure_(std::move(measure)) {
    measure_.validate();
    for (std::size_t a = 0; a < measure_.points.size(); ++a)
      for (std::size_t b = 0; b < measure_.points.size(); ++b)
        mean_norm_ += measure_.weights[a] * measure_.weights[b] * evaluate(spec_, measure_.points[a], measure_.points[b]);
  }

  // mu(u) = E k(S, u).
  double mean_embedding(std::span<const double> u) const {
    double acc = 0.0;
    for (std::size_t a = 0; a < measure_.points.size(); ++a)
      acc += measure_.weights[a] * evaluate(spec_, measure_.points[a], u);
    return acc;
  }

  double operator()(std::span<const double> u, std::span<const double> v) const {
    return evaluate(spec_, u, v) - mean_embedding(u) - mean_embedding(v) + mean_norm_;
  }

  // |mu|^2 = E E k(S, S').
  double mean_norm() const noexcept { return mean_norm_; }

 private:
  KernelSpec spec_;
  DiscreteMeasure measure_;
  double mean_norm_ = 0.0;
};

// Population-centred Gram matrix of `series` against a known marginal.
inline GramMatrix population_centered_gram(const Series& series, const KernelSpec& spec, const DiscreteMeasure& marginal) {
  CenteredKernel kbar(spec, marginal);
  const auto n = static_cast<Eigen::Index>(series.size());
  GramMatrix out{Eigen::MatrixXd(n, n), Centering::population};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.values(i, j) = kbar(series[static_cast<std::size_t>(i)], series[static_cast<std::size_t>(j)]);
  return out;
}

// A point (x, y, z) of the triple space.
using TriplePoint = std::array<std::vector<double>, 3>;

// Finite measure on triples: weights[a] at (coords[0][a], coords[1][a], coords[2][a]).
struct TripleMeasure {
  std::array<std::vector<std::vector<double>>, 3> coords;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  TriplePoint atom(std::size_t a) const { return {coords[0][a], coords[1][a], coords[2][a]}; }

  DiscreteMeasure marginal(std::size_t v) const { return {coords[v], weights}; }

  static TripleMeasure from_joint(const DiscreteJoint& j) {
    TripleMeasure m;
    j.for_each_cell([&](std::size_t x, std::size_t y, std::size_t z, double p) {
      if (p == 0.0) return;
      m.coords[0].push_back({j.support(0)[x]});
      m.coords[1].push_back({j.support(1)[y]});
      m.coords[2].push_back({j.support(2)[z]});
      m.weights.push_back(p);
    });
    return m;
  }

  static TripleMeasure empirical(const TripleSeries& t) {
    TripleMeasure m;
    for (std::size_t v = 0; v < 3; ++v)
      for (std::size_t i = 0; i < t.size(); ++i) m.coords[v].emplace_back(t[v][i].begin(), t[v][i].end());
    m.weights.assign(t.size(), 1.0 / static_cast<double>(t.size()));
    return m;
  }
};

// The sub-hypothesis core h = centre(a_bar (x) b_bar) (x) c_bar, where (a, b) is
// the pair opposite `target`, every single-variable kernel is centred against
// its marginal under the measure, and the outer centring of the pair kernel is
// taken against the pair's joint marginal. With pair_centering off, the pair
// kernels enter uncentred (the 3-way HSIC core).
class InteractionCore {
 public:
  InteractionCore(TripleMeasure measure, const KernelTriple& kernels, Target target, bool pair_centering = true)
      : measure_(std::move(measure)), pair_centering_(pair_centering) {
    detail::require(measure_.size() > 0, "interaction core needs a nonempty measure");
    for (std::size_t v = 0; v < 3; ++v) {
      specs_[v] = kernels[v];
      centered_.emplace_back(kernels[v], measure_.marginal(v));
    }
    std::tie(a_, b_) = paired_variables(target);
    c_ = static_cast<std::size_t>(target);

    const std::size_t m = measure_.size();
    atom_pair_.resize(m * m);
    atom_target_.resize(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        atom_pair_[i * m + j] = pair_kernel(measure_.atom(i), measure_.atom(j));
        atom_target_[i * m + j] = centered_[c_](measure_.coords[c_][i], measure_.coords[c_][j]);
      }
    atom_pair_mean_.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) atom_pair_mean_[j] += measure_.weights[i] * atom_pair_[i * m + j];
    for (std::size_t j = 0; j < m; ++j) pair_norm_ += measure_.weights[j] * atom_pair_mean_[j];
  }

  double operator()(const TriplePoint& s, const TriplePoint& t) const {
    const double pair = pair_kernel(s, t) - pair_mean(t) - pair_mean(s) + pair_norm_;
    return pair * centered_[c_](s[c_], t[c_]);
  }

  // h between atoms i and j of the measure, from cached evaluations.
  double at_atoms(std::size_t i, std::size_t j) const {
    const std::size_t m = measure_.size();
    const double pair = atom_pair_[i * m + j] - atom_pair_mean_[j] - atom_pair_mean_[i] + pair_norm_;
    return pair * atom_target_[i * m + j];
  }

  // E_S h(S, s) under the measure.
  double expectation(const TriplePoint& s) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < measure_.size(); ++i) acc += measure_.weights[i] * (*this)(measure_.atom(i), s);
    return acc;
  }

  const TripleMeasure& measure() const noexcept { return measure_; }

 private:
  double single(std::size_t v, std::span<const double> u, std::span<const double> w) const {
    return pair_centering_ ? centered_[v](u, w) : evaluate(specs_[v], u, w);
  }

  double pair_kernel(const TriplePoint& s, const TriplePoint& t) const {
    return single(a_, s[a_], t[a_]) * single(b_, s[b_], t[b_]);
  }

  // E_U g(U, s) over the pair marginal.
  double pair_mean(const TriplePoint& s) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < measure_.size(); ++i)
      acc += measure_.weights[i] * single(a_, measure_.coords[a_][i], s[a_]) * single(b_, measure_.coords[b_][i], s[b_]);
    return acc;
  }

  TripleMeasure measure_;
  bool pair_centering_;
  std::array<KernelSpec, 3> specs_;
  std::vector<CenteredKernel> centered_;
  std::size_t a_ = 0, b_ = 1, c_ = 2;
  std::vector<double> atom_pair_;
  std::vector<double> atom_target_;
  std::vector<double> atom_pair_mean_;
  double pair_norm_ = 0.0;
};

// E_S h(S, s) for S drawn from the joint, with every centring exact.
inline double core_h_expectation(const DiscreteJoint& j, const KernelTriple& kernels, const TriplePoint& s,
                                 Target target = Target::Z) {
  InteractionCore h(TripleMeasure::from_joint(j), kernels, target);
  return h.expectation(s);
}

// (1/n^2) sum_i sum_j h(S_i, S_j) by a double loop.
template <class Sample, class Core>
double naive_v_statistic(std::span<const Sample> samples, Core&& h) {
  detail::require(!samples.empty(), "V-statistic needs at least one sample");
  double acc = 0.0;
  for (const Sample& si : samples)
    for (const Sample& sj : samples) acc += h(si, sj);
  const double n = static_cast<double>(samples.size());
  return acc / (n * n);
}

// Normalised V-statistic n * V_n of the empirically centred core on `t`, i.e.
// the sub-hypothesis statistic computed by the double loop. For the Lancaster
// core it equals lancaster_statistic; with pair_centering off it equals the
// 3-way HSIC statistic.
inline double naive_interaction_statistic(const TripleSeries& t, const KernelTriple& kernels, Target target,
                                          bool pair_centering = true) {
  InteractionCore h(TripleMeasure::empirical(t), kernels, target, pair_centering);
  std::vector<std::size_t> idx(t.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return static_cast<double>(t.size()) *
         naive_v_statistic(std::span<const std::size_t>(idx), [&](std::size_t i, std::size_t j) { return h.at_atoms(i, j); });
}

// n * HSIC_b of (a, b) by the double loop over the empirically centred kernels.
inline double naive_hsic_statistic(const Series& a, const Series& b, const KernelSpec& ka, const KernelSpec& kb) {
  detail::require(a.size() == b.size(), "HSIC series lengths differ");
  CenteredKernel kt(ka, DiscreteMeasure::empirical(a));
  CenteredKernel lt(kb, DiscreteMeasure::empirical(b));
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return static_cast<double>(a.size()) * naive_v_statistic(std::span<const std::size_t>(idx), [&](std::size_t i, std::size_t j) {
           return kt(a[i], a[j]) * lt(b[i], b[j]);
         });
}

// |mu_hat - mu| in the RKHS for scalar samples against a finite marginal,
// using exact sums over the distinct sample values.
inline double embedding_error(std::span<const double> samples, const KernelSpec& spec, const DiscreteMeasure& marginal) {
  detail::require(!samples.empty(), "embedding error needs samples");
  std::map<double, double> freq;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double x : samples) freq[x] += w;
  CenteredKernel ref(spec, marginal);
  double emp = 0.0;
  double cross = 0.0;
  for (auto [u, fu] : freq) {
    for (auto [v, fv] : freq) emp += fu * fv * evaluate(spec, u, v);
    const double pu[1] = {u};
    cross += fu * ref.mean_embedding(pu);
  }
  return std::sqrt(std::max(0.0, emp - 2.0 * cross + ref.mean_norm()));
}

using ScalarGenerator = std::function<std::vector<double>(std::size_t n, const Stream& stream)>;

// Least-squares slope of log(median embedding error) against log(n).
inline double embedding_convergence_slope(const ScalarGenerator& gen, const KernelSpec& spec,
                                          const DiscreteMeasure& true_marginal, const std::vector<std::size_t>& n_grid,
                                          std::size_t replicates, const Stream& stream) {
  detail::require(n_grid.size() >= 2, "convergence slope needs at least two sample sizes");
  detail::require(std::adjacent_find(n_grid.begin(), n_grid.end(), std::greater_equal<>()) == n_grid.end(),
                  "sample-size grid must be strictly increasing");
  detail::require(n_grid.front() >= 1 && replicates >= 1, "convergence slope needs n >= 1 and replicates >= 1");
  std::vector<double> log_n, log_err;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::vector<double> errs(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
      const auto xs = gen(n_grid[g], stream.child(g).child(r));
      errs[r] = embedding_error(xs, spec, true_marginal);
    }
    std::sort(errs.begin(), errs.end());
    const double med = replicates % 2 == 1 ? errs[replicates / 2] : 0.5 * (errs[replicates / 2 - 1] + errs[replicates / 2]);
    if (!(med > 0.0))
      throw NumericalError("median embedding error is zero at n = " + std::to_string(n_grid[g]) +
                           "; the convergence slope is undefined");
    log_n.push_back(std::log(static_cast<double>(n_grid[g])));
    log_err.push_back(std::log(med));
  }
  const double k = static_cast<double>(log_n.size());
  const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / k;
  const double my = std::accumulate(log_err.begin(), log_err.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sxy += (log_n[i] - mx) * (log_err[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace lancaster::oracle
