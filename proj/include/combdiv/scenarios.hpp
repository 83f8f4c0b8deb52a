// Copyright 2026 The combdiv developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "combdiv/json_io.hpp"
#include "combdiv/optimizer.hpp"

namespace combdiv {

//=========================================================================
// Reference setups
//
// Three small qubit setups with closed-form reference values, used by the
// named scenarios, the test suite, and the demo CLI. Each exhibits a
// Choi-divergence quantity that grows under a free transformation while
// the corresponding generalized divergence stays monotone.
//=========================================================================

// A measure-like qubit channel against the completely depolarizing one,
// with a superchannel (fixed-|1> pre-processing) that doubles their
// Choi-state relative entropy.
struct Example1Setup {
  ChoiChannel m;
  ChoiChannel n;
  Superchannel xi;
};

inline Example1Setup example1_setup() {
  Matrix k1 = Matrix::Zero(2, 2), k2 = Matrix::Zero(2, 2), k3 = Matrix::Zero(2, 2);
  k1(0, 0) = std::sqrt(0.5);
  k2(1, 0) = std::sqrt(0.5);
  k3(1, 1) = 1.0;
  ChoiChannel m = choi_from_kraus(KrausChannel{{k1, k2, k3}, {"A", 2}, {"B", 2}});
  ChoiChannel n = choi_from_kraus(depolarizing_channel({"A", 2}, {"B", 2}));

  Superchannel xi{
      choi_from_kraus(fixed_output_channel(
          {"A'", 2}, LabeledOperator::basis_state({"A", 2}, 1))),
      choi_from_kraus(identity_channel({"B", 2}, {"B'", 2}))};
  return {std::move(m), std::move(n), std::move(xi)};
}

// The two-step storage process: the first output is always |0>, the
// first input is kept in memory, and the second input selects between
// returning the memory (input |0>) and emitting noise (input |1>).
inline ProcessComb example_process() {
  const SubsystemLabel a{"A", 2}, b{"B", 2}, c{"C", 2}, d{"D", 2};
  LabeledOperator recall =
      tensor(tensor(LabeledOperator::basis_state(b, 0), LabeledOperator::basis_state(c, 0)),
             LabeledOperator::max_entangled(a, d));
  LabeledOperator noise =
      tensor(tensor(tensor(LabeledOperator::basis_state(b, 0), LabeledOperator::basis_state(c, 1)),
                    LabeledOperator::maximally_mixed({a})),
             LabeledOperator::maximally_mixed({d}));
  LabeledOperator choi(recall.subsystems(), 0.5 * (recall.matrix() + noise.matrix()));
  return ProcessComb{permute(choi, {"A", "B", "C", "D"}), {{"A", "B"}, {"C", "D"}},
                     CombKind::process, {}};
}

struct Example2Setup {
  ProcessComb t;
  ProcessComb t_marg;
  Superprocess g;  // temporal coarse graining between the two steps
};

inline Example2Setup example2_setup() {
  ProcessComb t = example_process();
  ProcessComb t_marg = marginal_comb(t);
  Superprocess g = coarse_graining_superprocess(t, 1);
  return {std::move(t), std::move(t_marg), std::move(g)};
}

struct Example3Setup {
  ProcessComb t;
  Superprocess z;  // independent per-step pre/post processing
};

// The step-local superprocess that feeds |0> into the second step (so
// the storage process always returns its memory) and discards the first
// output into noise. Step-local processing, yet the non-Markovianity
// quantifier of the transformed process doubles.
inline Example3Setup example3_setup() {
  ProcessComb t = example_process();
  std::vector<std::pair<ChoiChannel, ChoiChannel>> steps;
  steps.push_back({choi_from_kraus(identity_channel({"A'", 2}, {"A", 2})),
                   choi_from_kraus(depolarizing_channel({"B", 2}, {"B'", 2}))});
  steps.push_back({choi_from_kraus(fixed_output_channel(
                       {"C'", 2}, LabeledOperator::basis_state({"C", 2}, 0))),
                   choi_from_kraus(identity_channel({"D", 2}, {"D'", 2}))});
  Superprocess z = iqi_superprocess(t, steps);
  return {std::move(t), std::move(z)};
}

//=========================================================================
// Scenario reports
//=========================================================================

struct ScenarioCheck {
  std::string quantity;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string provenance;  // published-value | closed-form | independent-oracle
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  std::vector<ScenarioCheck> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add(const std::string& quantity, double value, double expected, double tolerance,
           const std::string& provenance) {
    const bool ok = std::isfinite(value) && std::abs(value - expected) <= tolerance;
    checks.push_back({quantity, value, expected, tolerance, provenance, ok});
  }
};

inline Json to_json(const ScenarioReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json jc = value_to_json(c.value);
    jc["quantity"] = c.quantity;
    jc["expected"] = c.expected;
    jc["tolerance"] = c.tolerance;
    jc["provenance"] = c.provenance;
    jc["pass"] = c.pass;
    checks.push_back(std::move(jc));
  }
  return Json{{"name", r.name}, {"checks", std::move(checks)}, {"pass", r.pass()}};
}

//=========================================================================
// Property suites
//=========================================================================

enum class Suite { dpi, sandwich, duality };

inline Suite suite_from_string(const std::string& s) {
  if (s == "dpi") return Suite::dpi;
  if (s == "sandwich") return Suite::sandwich;
  if (s == "duality") return Suite::duality;
  throw UnknownScenario("unknown suite: " + s);
}

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::dpi: return "dpi";
    case Suite::sandwich: return "sandwich";
    case Suite::duality: return "duality";
  }
  return "?";
}

struct SuiteReport {
  std::string suite;
  int samples = 0;
  double tolerance = 0.0;
  std::vector<double> residuals;  // one signed violation per sample (<= 0 is clean)
  double max_violation = 0.0;
  int violations = 0;
  bool pass = false;

  void finish(double tol) {
    tolerance = tol;
    max_violation = 0.0;
    violations = 0;
    for (const double r : residuals) {
      max_violation = std::max(max_violation, r);
      if (r > tol) ++violations;
    }
    pass = violations == 0;
  }
};

inline Json to_json(const SuiteReport& r) {
  return Json{{"suite", r.suite},       {"samples", r.samples},
              {"tolerance", r.tolerance}, {"residuals", r.residuals},
              {"max_violation", r.max_violation}, {"violations", r.violations},
              {"pass", r.pass}};
}

namespace detail {

// Full-rank comb sampling: convex mixture with the uniform comb. The
// causality constraints are affine and the uniform state satisfies
// them, so the mixture remains a valid comb of the same shape.
inline ProcessComb mixed_random_comb(Rng& rng, double noise) {
  ProcessComb t = random_comb(rng, {{"A", "B"}, {"C", "D"}},
                              {{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, 2);
  const LabeledOperator uniform = LabeledOperator::maximally_mixed(t.choi.subsystems());
  t.choi.matrix() = (1.0 - noise) * t.choi.matrix() + noise * uniform.matrix();
  return t;
}

inline Superprocess random_iqi(Rng& rng, const ProcessComb& t) {
  std::vector<std::pair<ChoiChannel, ChoiChannel>> steps;
  for (const auto& tooth : t.teeth) {
    const Index di = t.choi.dim_of(tooth.in), dout = t.choi.dim_of(tooth.out);
    steps.push_back(
        {choi_from_kraus(random_channel(rng, {tooth.in + "'", di}, {tooth.in, di})),
         choi_from_kraus(random_channel(rng, {tooth.out, dout}, {tooth.out + "'", dout}))});
  }
  return iqi_superprocess(t, steps);
}

}  // namespace detail

inline SuiteReport run_suite(Suite which, int samples, std::uint64_t seed,
                             OptimizerConfig cfg = {}) {
  if (samples < 1) throw Error("suite needs at least one sample");
  SuiteReport report;
  report.suite = to_string(which);
  report.samples = samples;

  switch (which) {
    case Suite::dpi: {
      // Divergences must contract under channels on every sampled triple.
      for (int i = 0; i < samples; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        const Index d_in = 2 + rng.uniform_index(2);
        const Index d_out = 2 + rng.uniform_index(2);
        const SubsystemLabel in{"A", d_in}, out{"B", d_out};
        LabeledOperator rho = random_density_operator(rng, {in});
        LabeledOperator sigma = random_density_operator(rng, {in});
        const LabeledOperator uniform = LabeledOperator::maximally_mixed({in});
        sigma.matrix() = 0.9 * sigma.matrix() + 0.1 * uniform.matrix();
        const KrausChannel ch = random_channel(rng, in, out);
        double worst = -infinity();
        for (const Measure m : {Measure::relative_entropy, Measure::trace_distance}) {
          const double before = state_divergence(m, rho, sigma);
          const double after = state_divergence(m, apply_kraus(ch, rho), apply_kraus(ch, sigma));
          worst = std::max(worst, after - before);
        }
        report.residuals.push_back(worst);
      }
      report.finish(1e-8);
      break;
    }
    case Suite::sandwich: {
      // The optimized lower bound must sit between the Choi divergence
      // and its dimension-factor multiple on full-rank qubit pairs.
      for (int i = 0; i < samples; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        const ProcessComb t = detail::mixed_random_comb(rng, 0.3);
        const ProcessComb v = detail::mixed_random_comb(rng, 0.3);
        const double c = choi_divergence(Measure::relative_entropy, t, v);
        OptimizerConfig local = cfg;
        local.seed = seed * 1000003ull + static_cast<std::uint64_t>(i);
        const OptimizationResult r =
            generalized_comb_divergence(Measure::relative_entropy, t, v, local);
        Index big_k = 1;
        for (const auto& s : t.choi.subsystems()) big_k *= s.dim;
        big_k /= t.choi.dim_of(t.teeth.back().out);
        const double floor_violation = c - r.value;            // must be <= ~0
        const double ceiling_violation = r.value - static_cast<double>(big_k) * c;
        report.residuals.push_back(std::max(floor_violation, ceiling_violation));
      }
      report.finish(1e-6);
      break;
    }
    case Suite::duality: {
      // Transformed-comb contraction must equal original-comb contraction
      // with the dual-transformed strategy, entry by entry, across
      // coarse-graining, step-local, and ancilla-threaded superprocesses.
      for (int i = 0; i < samples; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        const ProcessComb t = detail::mixed_random_comb(rng, 0.0);
        Superprocess z;
        switch (i % 3) {
          case 0: z = coarse_graining_superprocess(t, 1); break;
          case 1: z = detail::random_iqi(rng, t); break;
          default: z = random_threaded_superprocess(rng, t, 2); break;
        }
        const ProcessComb zt = apply_superprocess(z, t);
        const ProcessComb s = random_control_comb(rng, zt, 2, "@S");
        const LabeledOperator forward = contract(zt, s);
        const LabeledOperator pulled = contract(t, dual_superprocess(z, s));
        report.residuals.push_back(max_abs_diff(forward, permute(pulled, forward.names())));
      }
      report.finish(1e-8);
      break;
    }
  }
  return report;
}

//=========================================================================
// Named scenarios
//=========================================================================

inline ScenarioReport run_scenario(const std::string& name, std::uint64_t seed = 0,
                                   OptimizerConfig cfg = {}) {
  ScenarioReport report;
  report.name = name;

  if (name == "example1") {
    const Example1Setup ex = example1_setup();
    const double before = choi_divergence(Measure::relative_entropy, ex.m, ex.n);
    const ChoiChannel tm = apply_superchannel(ex.xi, ex.m);
    const ChoiChannel tn = apply_superchannel(ex.xi, ex.n);
    const double after = choi_divergence(Measure::relative_entropy, tm, tn);
    report.add("relative-entropy-before", before, 0.5, 1e-9, "published-value");
    report.add("relative-entropy-after", after, 1.0, 1e-9, "published-value");
    report.add("divergence-increase", after - before, 0.5, 1e-9, "published-value");
    report.add("choi-entropy", von_neumann_entropy(ex.m.choi), 1.5, 1e-9, "published-value");
    const Vector evs = eigh(ex.m.choi).values;
    const double want[4] = {0.0, 0.25, 0.25, 0.5};
    double spectral = 0.0;
    for (int i = 0; i < 4; ++i) spectral = std::max(spectral, std::abs(evs(i) - want[i]));
    report.add("choi-spectrum-residual", spectral, 0.0, 1e-9, "published-value");
    return report;
  }

  if (name == "example2") {
    const Example2Setup ex = example2_setup();
    report.add("total-correlations-before", total_correlations(ex.t), 1.0, 1e-9,
               "published-value");
    const ProcessComb gt = apply_superprocess(ex.g, ex.t);
    report.add("total-correlations-after", total_correlations(gt), 2.0, 1e-9,
               "published-value");
    const LabeledOperator ident = LabeledOperator::max_entangled(
        gt.choi.subsystems()[0], gt.choi.subsystems()[1]);
    report.add("coarse-grained-identity-residual", max_abs_diff(gt.choi, ident), 0.0, 1e-9,
               "published-value");
    const ProcessComb g_marg = apply_superprocess(ex.g, ex.t_marg);
    report.add("marginal-commutes-residual",
               max_abs_diff(g_marg.choi, marginal_comb(gt).choi), 0.0, 1e-9,
               "published-value");
    return report;
  }

  if (name == "example3") {
    const Example3Setup ex = example3_setup();
    report.add("non-markovianity-before", non_markovianity(ex.t), 1.0, 1e-9,
               "published-value");
    const ProcessComb zt = apply_superprocess(ex.z, ex.t);
    report.add("non-markovianity-after", non_markovianity(zt), 2.0, 1e-9, "published-value");
    LabeledOperator expected = tensor(
        LabeledOperator::max_entangled({"A'", 2}, {"D'", 2}),
        LabeledOperator::maximally_mixed({{"B'", 2}, {"C'", 2}}));
    report.add("transformed-product-residual",
               max_abs_diff(zt.choi, permute(expected, zt.choi.names())), 0.0, 1e-9,
               "published-value");
    return report;
  }

  if (name == "sandwich-bounds") {
    if (cfg.sweeps > 12) cfg.sweeps = 12;
    const SuiteReport suite = run_suite(Suite::sandwich, 5, seed, cfg);
    report.add("sandwich-violations", static_cast<double>(suite.violations), 0.0, 0.0,
               "independent-oracle");
    report.add("sandwich-max-violation", std::max(0.0, suite.max_violation), 0.0, 1e-6,
               "independent-oracle");
    return report;
  }

  if (name == "dpi-suite") {
    const SuiteReport suite = run_suite(Suite::dpi, 100, seed);
    report.add("dpi-violations", static_cast<double>(suite.violations), 0.0, 0.0,
               "independent-oracle");
    report.add("dpi-max-violation", std::max(0.0, suite.max_violation), 0.0, 1e-8,
               "independent-oracle");
    return report;
  }

  throw UnknownScenario("unknown scenario: " + name);
}

inline std::vector<std::string> scenario_names() {
  return {"example1", "example2", "example3", "sandwich-bounds", "dpi-suite"};
}

}  // namespace combdiv
