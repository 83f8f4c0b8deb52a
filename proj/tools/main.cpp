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

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "combdiv/combdiv.hpp"

namespace {

using namespace combdiv;

struct GlobalOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string output = "text";

  bool json() const { return output == "json"; }
};

void emit(const Json& j) { std::printf("%s\n", j.dump(2).c_str()); }

std::string value_text(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int finish_scenario(const ScenarioReport& report, const GlobalOptions& opt) {
  if (opt.json()) {
    emit(to_json(report));
  } else {
    std::printf("scenario %s\n", report.name.c_str());
    for (const auto& c : report.checks)
      std::printf("  %-34s %-14s (expected %s +- %g, %s) %s\n", c.quantity.c_str(),
                  value_text(c.value).c_str(), value_text(c.expected).c_str(), c.tolerance,
                  c.provenance.c_str(), c.pass ? "ok" : "MISMATCH");
    std::printf("result: %s\n", report.pass() ? "pass" : "fail");
  }
  return report.pass() ? 0 : 1;
}

int finish_suite(const SuiteReport& report, const GlobalOptions& opt) {
  if (opt.json()) {
    emit(to_json(report));
  } else {
    std::printf("suite %s: %d samples, max violation %.3e, %d beyond %.1e\n",
                report.suite.c_str(), report.samples, report.max_violation, report.violations,
                report.tolerance);
    std::printf("result: %s\n", report.pass ? "pass" : "fail");
  }
  return report.pass ? 0 : 1;
}

// Accepts either a channel file or a comb file for divergence inputs.
bool looks_like_comb(const Json& j) { return j.contains("teeth"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distinguishability measures for quantum channels and process tensors"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--seed", opt.seed, "Random seed")->envname("COMBDIV_SEED");
  app.add_option("--jobs", opt.jobs, "Parallel restarts for optimizers")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", opt.output, "Output format")
      ->check(CLI::IsMember({"text", "json"}));

  // repro <scenario>
  auto* repro = app.add_subcommand("repro", "Reproduce a named reference scenario");
  std::string scenario;
  repro->add_option("scenario", scenario, "Scenario name")->required();

  // check <suite>
  auto* check = app.add_subcommand("check", "Run a property suite");
  std::string suite_name;
  int samples = 0;
  check->add_option("suite", suite_name, "Suite: dpi | sandwich | duality")->required();
  check->add_option("--samples", samples, "Sample count (default per suite)");

  // divergence
  auto* div = app.add_subcommand("divergence", "Choi divergence of two channels or combs");
  std::string measure_name = "re", lhs_path, rhs_path;
  div->add_option("--measure", measure_name, "re | td");
  div->add_option("--lhs", lhs_path, "Left operand (JSON)")->required();
  div->add_option("--rhs", rhs_path, "Right operand (JSON)")->required();

  // quantifier
  auto* quant = app.add_subcommand("quantifier", "Correlation quantifiers of a channel or comb");
  std::string which, comb_path;
  quant->add_option("--which", which, "I (total correlations) | N (non-Markovianity) | M (input-output correlation)")
      ->required()
      ->check(CLI::IsMember({"I", "N", "M"}));
  quant->add_option("--comb", comb_path, "Comb or channel file (JSON)")->required();

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Certified lower bounds on generalized divergences");
  std::string kind = "comb";
  OptimizerConfig cfg;
  std::string opt_measure = "re", opt_lhs, opt_rhs;
  optimize->add_option("--kind", kind, "channel | comb | classical")
      ->check(CLI::IsMember({"channel", "comb", "classical"}));
  optimize->add_option("--measure", opt_measure, "re | td");
  optimize->add_option("--lhs", opt_lhs, "Left operand (JSON)")->required();
  optimize->add_option("--rhs", opt_rhs, "Right operand (JSON)")->required();
  optimize->add_option("--restarts", cfg.restarts, "Search restarts")->check(CLI::PositiveNumber);
  optimize->add_option("--max-iters", cfg.sweeps, "Pattern-search sweeps per restart");
  optimize->add_option("--ancilla", cfg.ancilla_dim, "Ancilla dimension (0 = automatic)");
  optimize->add_option("--outcomes", cfg.povm_outcomes, "Measurement outcomes (classical case)");

  // validate-comb
  auto* validate = app.add_subcommand("validate-comb", "Validation report for a comb file");
  std::string validate_path;
  validate->add_option("file", validate_path, "Comb file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (repro->parsed()) {
      OptimizerConfig scfg;
      scfg.jobs = opt.jobs;
      return finish_scenario(run_scenario(scenario, opt.seed, scfg), opt);
    }

    if (check->parsed()) {
      const Suite suite = suite_from_string(suite_name);
      if (samples < 1) {
        switch (suite) {
          case Suite::dpi: samples = 100; break;
          case Suite::sandwich: samples = 20; break;
          case Suite::duality: samples = 50; break;
        }
      }
      OptimizerConfig scfg;
      scfg.jobs = opt.jobs;
      scfg.sweeps = 8;
      return finish_suite(run_suite(suite, samples, opt.seed, scfg), opt);
    }

    if (div->parsed()) {
      const Measure measure = measure_from_string(measure_name);
      const Json jl = load_json(lhs_path), jr = load_json(rhs_path);
      double value = 0.0;
      if (looks_like_comb(jl) != looks_like_comb(jr))
        throw ShapeMismatch("operands must both be channels or both be combs");
      if (looks_like_comb(jl))
        value = choi_divergence(measure, comb_from_json(jl), comb_from_json(jr));
      else
        value = choi_divergence(measure, channel_from_json(jl), channel_from_json(jr));
      if (opt.json())
        emit(value_to_json(value));
      else
        std::printf("%s\n", value_text(value).c_str());
      return 0;
    }

    if (quant->parsed()) {
      const Json j = load_json(comb_path);
      double value = 0.0;
      if (which == "M") {
        value = input_output_correlation(looks_like_comb(j)
                                             ? ChoiChannel{comb_from_json(j).choi,
                                                           {comb_from_json(j).teeth.front().in},
                                                           {comb_from_json(j).teeth.front().out}}
                                             : channel_from_json(j));
      } else {
        const ProcessComb t = comb_from_json(j);
        value = which == "I" ? total_correlations(t) : non_markovianity(t);
      }
      if (opt.json())
        emit(value_to_json(value));
      else
        std::printf("%s\n", value_text(value).c_str());
      return 0;
    }

    if (optimize->parsed()) {
      const Measure measure = measure_from_string(opt_measure);
      cfg.seed = opt.seed;
      cfg.jobs = opt.jobs;
      OptimizationResult result;
      Json argmax;
      if (kind == "channel") {
        result = generalized_channel_divergence(measure, load_channel(opt_lhs),
                                                load_channel(opt_rhs), cfg);
        if (result.best_input) argmax = operator_to_json(*result.best_input);
      } else if (kind == "comb") {
        result = generalized_comb_divergence(measure, load_comb(opt_lhs), load_comb(opt_rhs), cfg);
        if (result.best_control) argmax = comb_to_json(*result.best_control);
      } else {
        result = classical_comb_divergence(measure, load_comb(opt_lhs), load_comb(opt_rhs), cfg);
        if (result.best_tester) {
          argmax["control"] = comb_to_json(result.best_tester->control);
          argmax["effects"] = Json::array();
          for (const auto& e : result.best_tester->effects)
            argmax["effects"].push_back(operator_to_json(e));
        }
      }
      if (opt.json()) {
        Json j = value_to_json(result.value);
        j["certified"] = "lower-bound";
        j["reference_value"] = result.reference_value;
        j["restart_values"] = result.restart_values;
        j["best_restart"] = result.best_restart;
        j["converged"] = result.converged;
        j["evaluations"] = result.evaluations;
        j["argmax"] = std::move(argmax);
        emit(j);
      } else {
        std::printf("certified lower bound: %s\n", value_text(result.value).c_str());
        std::printf("reference probe:       %s\n", value_text(result.reference_value).c_str());
        std::printf("restarts:             ");
        for (const double v : result.restart_values) std::printf(" %s", value_text(v).c_str());
        std::printf("\n");
      }
      return 0;
    }

    if (validate->parsed()) {
      const ProcessComb comb = comb_from_json(load_json(validate_path), /*validate=*/false);
      const ValidationReport report = validate_comb(comb);
      if (opt.json()) {
        Json checks = Json::array();
        for (const auto& c : report.checks)
          checks.push_back(Json{{"name", c.name},
                                {"residual", c.residual},
                                {"tolerance", c.tolerance},
                                {"pass", c.pass}});
        emit(Json{{"checks", std::move(checks)}, {"pass", report.pass()}});
      } else {
        for (const auto& c : report.checks)
          std::printf("  %-24s residual %.3e (tol %.1e) %s\n", c.name.c_str(), c.residual,
                      c.tolerance, c.pass ? "ok" : "FAIL");
        std::printf("result: %s\n", report.pass() ? "pass" : "fail");
      }
      return report.pass() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
