#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lancaster/error.hpp"
#include "lancaster/interaction_tests.hpp"
#include "lancaster/io.hpp"
#include "lancaster/parallel.hpp"
#include "lancaster/random.hpp"
#include "lancaster/statistics.hpp"
#include "lancaster/synthdata.hpp"

namespace lancaster {

enum class ExperimentKind { power_weak_pairwise, power_strong_pairwise, fpr_study, single_test };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::power_weak_pairwise: return "power_weak_pairwise";
    case ExperimentKind::power_strong_pairwise: return "power_strong_pairwise";
    case ExperimentKind::fpr_study: return "fpr_study";
    case ExperimentKind::single_test: return "single_test";
  }
  return "?";
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::power_weak_pairwise;
  std::vector<double> grid;
  std::size_t n = 1200;
  std::size_t replications = 300;
  TestConfig test;
  std::size_t burn_in = 0;
  std::size_t workers = 1;
  bool record_timing = false;  // wall seconds in rows; off keeps output byte-reproducible

  void validate() const {
    detail::require(!grid.empty(), "experiment grid must be nonempty");
    detail::require(replications >= 1, "replications must be at least 1");
    detail::require(n >= 4, "experiment sample size must be at least 4");
    test.validate();
    if (kind == ExperimentKind::fpr_study)
      for (double a : grid)
        detail::require(std::abs(a) < 1.0, "fpr_study grid value " + std::to_string(a) + " violates |a| < 1");
  }

  // Scales used in the published experiments: 1200 observations, 300 data
  // sets and 250 bootstraps for the power curves; 1000 observations and 200
  // data sets for the false-positive study.
  static ExperimentSpec paper(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    s.test.bootstraps = 250;
    switch (kind) {
      case ExperimentKind::power_weak_pairwise: s.grid = {0.0, 0.5, 1.0, 1.5, 2.0}; break;
      case ExperimentKind::power_strong_pairwise: s.grid = {0.0, 0.1, 0.2, 0.3, 0.4}; break;
      case ExperimentKind::fpr_study:
        s.grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        s.n = 1000;
        s.replications = 200;
        break;
      case ExperimentKind::single_test: s.grid = {0.0}; break;
    }
    return s;
  }

  // Reduced scale for routine runs: 600 observations, 100 data sets, 200 bootstraps.
  static ExperimentSpec desk(ExperimentKind kind) {
    ExperimentSpec s = paper(kind);
    s.n = 600;
    s.replications = 100;
    s.test.bootstraps = 200;
    return s;
  }
};

// One simulated data set passed through one testing procedure.
struct ReplicateOutcome {
  double coefficient = 0.0;
  std::size_t replicate = 0;
  std::string method;
  std::array<double, 3> p{};
  double mean_statistic = 0.0;
  bool reject_simple = false;
  bool reject_holm_bonferroni = false;
};

namespace detail {

struct MethodRun {
  std::string method;
  StatisticKind kind;
  BootstrapMethod bootstrap;
};

inline std::string method_name(StatisticKind k, BootstrapMethod m) {
  return std::string(to_string(k)) + "_" + to_string(m);
}

inline ReplicateOutcome summarise(const CompositeResult& r, double coefficient, std::size_t rep, std::string method,
                                  double alpha) {
  ReplicateOutcome o;
  o.coefficient = coefficient;
  o.replicate = rep;
  o.method = std::move(method);
  o.p = r.p_values();
  o.mean_statistic = (r.sub[0].statistic + r.sub[1].statistic + r.sub[2].statistic) / 3.0;
  o.reject_simple = correction_simple(o.p, alpha);
  o.reject_holm_bonferroni = correction_holm_bonferroni(o.p, alpha);
  return o;
}

// For every grid value, simulates `replications` data sets (in parallel) and
// runs each method on them. Data set r at grid index g is generated from
// Stream(seed).child(g).child(r).child(0); its tests use seed child(1).
inline std::vector<io::ResultRow> simulate(const ExperimentSpec& spec, ArKind generator,
                                           const std::vector<MethodRun>& methods,
                                           std::vector<ReplicateOutcome>* trace) {
  spec.validate();
  const Stream root(spec.test.seed);
  std::vector<io::ResultRow> rows;
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    const double coeff = spec.grid[g];
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::vector<ReplicateOutcome>> outcomes(spec.replications);
    parallel_for(spec.replications, spec.workers, [&](std::size_t r) {
      const Stream rep_stream = root.child(g).child(r);
      const TripleSeries data = generate({generator, spec.n, coeff, spec.burn_in}, rep_stream.child(0));
      TestConfig cfg = spec.test;
      cfg.seed = rep_stream.child(1).derive_seed();
      const GramSet grams = GramSet::build(data, resolve_kernels(data, cfg));
      for (const auto& m : methods) {
        cfg.method = m.bootstrap;
        outcomes[r].push_back(summarise(composite_test(grams, cfg, m.kind), coeff, r, m.method, cfg.alpha));
      }
    });
    const double seconds =
        spec.record_timing
            ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
            : 0.0;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      for (Correction c : {Correction::simple, Correction::holm_bonferroni}) {
        std::size_t rejects = 0;
        double stat_sum = 0.0;
        for (const auto& per_rep : outcomes) {
          const auto& o = per_rep[mi];
          rejects += (c == Correction::simple ? o.reject_simple : o.reject_holm_bonferroni) ? 1 : 0;
          stat_sum += o.mean_statistic;
        }
        rows.push_back({to_string(spec.kind), coeff, methods[mi].method, to_string(c),
                        static_cast<double>(rejects) / static_cast<double>(spec.replications), spec.replications,
                        stat_sum / static_cast<double>(spec.replications), seconds});
      }
    }
    if (trace)
      for (auto& per_rep : outcomes)
        for (auto& o : per_rep) trace->push_back(std::move(o));
  }
  return rows;
}

}  // namespace detail

// Power of the Lancaster and 3-way HSIC procedures over a grid of dependence
// coefficients; one row per (coefficient, method, correction).
inline std::vector<io::ResultRow> run_power_curve(const ExperimentSpec& spec,
                                                  std::vector<ReplicateOutcome>* trace = nullptr) {
  ArKind gen;
  if (spec.kind == ExperimentKind::power_weak_pairwise)
    gen = ArKind::weak_pairwise;
  else if (spec.kind == ExperimentKind::power_strong_pairwise)
    gen = ArKind::strong_pairwise;
  else
    throw InputError(std::string("run_power_curve cannot run experiment '") + to_string(spec.kind) + "'");
  const BootstrapMethod b = spec.test.method;
  return detail::simulate(spec, gen,
                          {{detail::method_name(StatisticKind::lancaster, b), StatisticKind::lancaster, b},
                           {detail::method_name(StatisticKind::threeway_hsic, b), StatisticKind::threeway_hsic, b}},
                          trace);
}

// Rejection rates of the Lancaster test under wild and permutation
// calibration on independent AR(1) triples; one row per (a, method, correction).
inline std::vector<io::ResultRow> run_fpr_study(const ExperimentSpec& spec,
                                                std::vector<ReplicateOutcome>* trace = nullptr) {
  if (spec.kind != ExperimentKind::fpr_study)
    throw InputError(std::string("run_fpr_study cannot run experiment '") + to_string(spec.kind) + "'");
  return detail::simulate(
      spec, ArKind::independent,
      {{detail::method_name(StatisticKind::lancaster, BootstrapMethod::wild), StatisticKind::lancaster,
        BootstrapMethod::wild},
       {detail::method_name(StatisticKind::lancaster, BootstrapMethod::permutation), StatisticKind::lancaster,
        BootstrapMethod::permutation}},
      trace);
}

inline std::vector<io::ResultRow> run_experiment(const ExperimentSpec& spec,
                                                 std::vector<ReplicateOutcome>* trace = nullptr) {
  return spec.kind == ExperimentKind::fpr_study ? run_fpr_study(spec, trace) : run_power_curve(spec, trace);
}

// ---------------------------------------------------------------------------
// Single data set: all three procedures plus pairwise HSIC on every pair.
// ---------------------------------------------------------------------------

struct SingleTestReport {
  CompositeResult lancaster;
  CompositeResult threeway_hsic;
  std::array<SubTestResult, 3> pairwise;  // (X,Y), (X,Z), (Y,Z)
  KernelTriple kernels;
  std::size_t n = 0;
  double alpha = 0.05;
};

inline SingleTestReport run_single_test(const TripleSeries& t, const TestConfig& cfg) {
  cfg.validate();
  SingleTestReport rep;
  rep.n = t.size();
  rep.alpha = cfg.alpha;
  rep.kernels = resolve_kernels(t, cfg);
  TestConfig fixed = cfg;
  fixed.kernels = rep.kernels;
  fixed.median_heuristic = false;
  const GramSet grams = GramSet::build(t, rep.kernels);
  rep.lancaster = composite_test(grams, fixed, StatisticKind::lancaster);
  rep.threeway_hsic = composite_test(grams, fixed, StatisticKind::threeway_hsic);
  constexpr std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    TestConfig pc = fixed;
    pc.kernels = {rep.kernels[pairs[i].first], rep.kernels[pairs[i].second], rep.kernels.z};
    pc.seed = Stream(cfg.seed).child(10 + i).derive_seed();
    rep.pairwise[i] = pairwise_hsic_test(t[pairs[i].first], t[pairs[i].second], pc);
  }
  return rep;
}

inline nlohmann::json to_json(const CompositeResult& r, double alpha) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : r.sub)
    subs.push_back({{"target", to_string(s.target)}, {"statistic", s.statistic}, {"p", s.p}, {"draws", s.n_draws}});
  return {{"sub_hypotheses", subs},
          {"correction", to_string(r.correction)},
          {"alpha", alpha},
          {"reject", r.reject_h0},
          {"reject_simple", correction_simple(r.p_values(), alpha)},
          {"reject_holm_bonferroni", correction_holm_bonferroni(r.p_values(), alpha)}};
}

inline nlohmann::json to_json(const SingleTestReport& rep) {
  static constexpr std::array<const char*, 3> pair_names{"X,Y", "X,Z", "Y,Z"};
  nlohmann::json pairwise = nlohmann::json::array();
  for (std::size_t i = 0; i < 3; ++i)
    pairwise.push_back({{"pair", pair_names[i]},
                        {"statistic", rep.pairwise[i].statistic},
                        {"p", rep.pairwise[i].p},
                        {"reject", rep.pairwise[i].p <= rep.alpha}});
  return {{"n", rep.n},
          {"bandwidths", {rep.kernels.x.bandwidth(), rep.kernels.y.bandwidth(), rep.kernels.z.bandwidth()}},
          {"lancaster", to_json(rep.lancaster, rep.alpha)},
          {"threeway_hsic", to_json(rep.threeway_hsic, rep.alpha)},
          {"pairwise_hsic", pairwise}};
}

}  // namespace lancaster
