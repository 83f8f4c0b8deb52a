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
#include <limits>
#include <string>
#include <vector>

#include "combdiv/comb.hpp"

namespace combdiv {

//=========================================================================
// State divergences
//=========================================================================

enum class Measure { relative_entropy, trace_distance };

inline std::string to_string(Measure m) {
  return m == Measure::relative_entropy ? "re" : "td";
}

inline Measure measure_from_string(const std::string& s) {
  if (s == "re") return Measure::relative_entropy;
  if (s == "td") return Measure::trace_distance;
  throw ParseError("unknown measure '" + s + "' (expected 're' or 'td')");
}

namespace detail {

// Permutes b to a's label order; throws if the label sets differ.
inline LabeledOperator aligned(const LabeledOperator& a, const LabeledOperator& b) {
  if (a.subsystems().size() != b.subsystems().size())
    throw ShapeMismatch("operators live on different label sets");
  for (const auto& s : a.subsystems())
    if (!b.has_label(s.name) || b.dim_of(s.name) != s.dim)
      throw ShapeMismatch("operators live on different label sets (mismatch at '" + s.name + "')");
  return permute(b, a.names());
}

}  // namespace detail

// Umegaki relative entropy in bits, extended to +infinity when the first
// state has weight outside the support of the second. Support membership
// uses the spectral cutoff; a kernel mass above the PSD tolerance is
// treated as genuine.
inline double relative_entropy(const LabeledOperator& rho_in, const LabeledOperator& sigma_in) {
  check_density_operator(rho_in, "relative entropy, first argument");
  check_density_operator(sigma_in, "relative entropy, second argument");
  const LabeledOperator& rho = rho_in;
  const LabeledOperator sigma = detail::aligned(rho_in, sigma_in);

  const EigSystem er = eigh(rho);
  const EigSystem es = eigh(sigma);
  const Eigen::MatrixXd overlap = (er.vectors.adjoint() * es.vectors).cwiseAbs2();

  double kernel_mass = 0.0;
  double cross = 0.0;
  for (Index j = 0; j < es.values.size(); ++j) {
    const double q = es.values(j);
    if (q <= tol::support) {
      for (Index i = 0; i < er.values.size(); ++i)
        if (er.values(i) > tol::support) kernel_mass += er.values(i) * overlap(i, j);
    } else {
      for (Index i = 0; i < er.values.size(); ++i)
        if (er.values(i) > tol::support) cross += er.values(i) * overlap(i, j) * std::log2(q);
    }
  }
  if (kernel_mass > tol::psd) return infinity();

  double self = 0.0;
  for (Index i = 0; i < er.values.size(); ++i)
    if (er.values(i) > tol::support) self += er.values(i) * std::log2(er.values(i));
  return std::max(0.0, self - cross);
}

// Trace distance ||rho - sigma||_1 (between 0 and 2).
inline double trace_distance(const LabeledOperator& rho, const LabeledOperator& sigma_in) {
  check_density_operator(rho, "trace distance, first argument");
  check_density_operator(sigma_in, "trace distance, second argument");
  const LabeledOperator sigma = detail::aligned(rho, sigma_in);
  return trace_norm(LabeledOperator(rho.subsystems(), rho.matrix() - sigma.matrix()));
}

inline double state_divergence(Measure m, const LabeledOperator& rho, const LabeledOperator& sigma) {
  return m == Measure::relative_entropy ? relative_entropy(rho, sigma) : trace_distance(rho, sigma);
}

//=========================================================================
// Choi divergences
//=========================================================================

// Divergence evaluated directly between Choi states: cheap, convex in
// useful ways, but not contractive under superprocesses in general.
inline double choi_divergence(Measure m, const ChoiChannel& a, const ChoiChannel& b) {
  if (a.in_labels != b.in_labels || a.out_labels != b.out_labels)
    throw ShapeMismatch("channels have different input/output label groups");
  return state_divergence(m, a.choi, b.choi);
}

inline double choi_divergence(Measure m, const ProcessComb& a, const ProcessComb& b) {
  if (!(a.teeth == b.teeth)) throw ShapeMismatch("combs have different teeth");
  return state_divergence(m, a.choi, b.choi);
}

//=========================================================================
// Correlation quantifiers
//=========================================================================

// Mutual information between the input copy and the output of a channel
// Choi state.
inline double input_output_correlation(const ChoiChannel& ch) {
  const double h_in = von_neumann_entropy(partial_trace(ch.choi, ch.in_labels));
  const double h_out = von_neumann_entropy(partial_trace(ch.choi, ch.out_labels));
  return h_in + h_out - von_neumann_entropy(ch.choi);
}

// Relative entropy from the fully uncorrelated marginal comb. Equals the
// entropy gap between the product of all single-subsystem marginals and
// the comb itself.
inline double total_correlations(const ProcessComb& t) {
  if (t.kind != CombKind::process) throw ShapeMismatch("total_correlations expects a process comb");
  double h_singles = 0.0;
  for (const auto& tooth : t.teeth) {
    h_singles += von_neumann_entropy(partial_trace(t.choi, {tooth.in}));
    h_singles += von_neumann_entropy(partial_trace(t.choi, {tooth.out}));
  }
  return h_singles - von_neumann_entropy(t.choi);
}

// Minimum relative entropy to a comb whose Choi state is a product over
// the steps. The minimizer over product states with a fixed partition is
// the product of the corresponding marginals, giving the closed form
// sum_k H(step-k marginal) - H(comb).
inline double non_markovianity(const ProcessComb& t) {
  if (t.kind != CombKind::process) throw ShapeMismatch("non_markovianity expects a process comb");
  double h_steps = 0.0;
  for (const auto& tooth : t.teeth)
    h_steps += von_neumann_entropy(partial_trace(t.choi, {tooth.in, tooth.out}));
  return h_steps - von_neumann_entropy(t.choi);
}

//=========================================================================
// Classical divergences
//=========================================================================

inline void check_distribution(const std::vector<double>& p) {
  if (p.empty()) throw NotADistribution("empty probability vector");
  double sum = 0.0;
  for (const double x : p) {
    if (!(x >= -tol::psd)) throw NotADistribution("negative probability " + std::to_string(x));
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol::trace)
    throw NotADistribution("probabilities sum to " + std::to_string(sum));
}

// Kullback-Leibler divergence in bits, +infinity outside the support of q.
inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  check_distribution(p);
  check_distribution(q);
  if (p.size() != q.size()) throw ShapeMismatch("distributions have different lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= tol::support) continue;
    if (q[i] <= tol::support) return infinity();
    acc += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(0.0, acc);
}

// Total variation style trace distance: sum_i |p_i - q_i|.
inline double classical_trace_distance(const std::vector<double>& p, const std::vector<double>& q) {
  check_distribution(p);
  check_distribution(q);
  if (p.size() != q.size()) throw ShapeMismatch("distributions have different lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return acc;
}

inline double classical_divergence(Measure m, const std::vector<double>& p, const std::vector<double>& q) {
  return m == Measure::relative_entropy ? kl_divergence(p, q) : classical_trace_distance(p, q);
}

//=========================================================================
// Testers
//=========================================================================

// A tester turns a process comb into a probability distribution: feed
// the comb through a control strategy, then measure the resulting state
// with a POVM.
struct Tester {
  ProcessComb control;                   // CombKind::control
  std::vector<LabeledOperator> effects;  // POVM on the strategy's final state space
};

inline ValidationReport validate_tester(const Tester& p) {
  ValidationReport report = validate_comb(p.control);
  if (p.effects.empty()) throw ShapeMismatch("tester has no POVM effects");
  Matrix sum = Matrix::Zero(p.effects.front().dim(), p.effects.front().dim());
  for (std::size_t x = 0; x < p.effects.size(); ++x) {
    const LabeledOperator eff = detail::aligned(p.effects.front(), p.effects[x]);
    report.add("effect-" + std::to_string(x) + "-hermitian", hermiticity_defect(eff), tol::herm);
    report.add("effect-" + std::to_string(x) + "-psd", std::max(0.0, -min_eigenvalue(eff)), tol::psd);
    sum += eff.matrix();
  }
  const double defect = (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
  report.add("effects-sum-to-identity", defect, tol::trace);
  return report;
}

inline std::vector<double> apply_tester(const Tester& p, const ProcessComb& t) {
  const LabeledOperator state = contract(t, p.control);
  std::vector<double> probs;
  probs.reserve(p.effects.size());
  for (const auto& eff : p.effects) {
    const LabeledOperator e = detail::aligned(state, eff);
    const double val = std::real((state.matrix() * e.matrix()).trace());
    probs.push_back(std::max(0.0, val));
  }
  return probs;
}

}  // namespace combdiv
