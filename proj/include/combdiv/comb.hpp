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

#include <string>
#include <utility>
#include <vector>

#include "combdiv/channel.hpp"
#include "combdiv/labeled_operator.hpp"
#include "combdiv/random.hpp"

namespace combdiv {

//=========================================================================
// Link product
//=========================================================================

// Contraction of two labeled operators over their shared labels:
//
//   a * b = d_shared tr_shared[ a . b^(T_shared) ]
//
// with the partial transpose taken on the second argument and identity
// padding on the non-shared factors of each side. With no shared labels
// this reduces to the tensor product. Composing normalized Choi states
// this way yields the normalized Choi state of the composite.
inline LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b) {
  std::vector<std::string> shared;
  Index d_shared = 1;
  for (const auto& s : a.subsystems())
    if (b.has_label(s.name)) {
      if (b.dim_of(s.name) != s.dim)
        throw DimensionMismatch("shared label '" + s.name + "' has dimension " + std::to_string(s.dim) +
                                " on one side and " + std::to_string(b.dim_of(s.name)) + " on the other");
      shared.push_back(s.name);
      d_shared *= s.dim;
    }
  if (shared.empty()) return tensor(a, b);

  Subsystems a_only_subs, b_only_subs;
  std::vector<std::string> keep;
  for (const auto& s : a.subsystems())
    if (!b.has_label(s.name)) {
      a_only_subs.push_back(s);
      keep.push_back(s.name);
    }
  for (const auto& s : b.subsystems())
    if (!a.has_label(s.name)) {
      b_only_subs.push_back(s);
      keep.push_back(s.name);
    }

  LabeledOperator lhs = tensor(a, LabeledOperator::identity(b_only_subs));
  LabeledOperator rhs = tensor(partial_transpose(b, shared), LabeledOperator::identity(a_only_subs));
  rhs = permute(rhs, lhs.names());

  LabeledOperator prod(lhs.subsystems(), lhs.matrix() * rhs.matrix());
  LabeledOperator out = partial_trace(prod, keep);
  out.matrix() *= static_cast<double>(d_shared);
  return out;
}

//=========================================================================
// Process combs
//=========================================================================

// One open slot of a comb: the label fed into the process at this step
// and the label it emits afterwards.
struct Tooth {
  std::string in;
  std::string out;

  friend bool operator==(const Tooth& a, const Tooth& b) { return a.in == b.in && a.out == b.out; }
};

using Teeth = std::vector<Tooth>;

// `process`: an n-step process in Choi form, labels I1 O1 ... In On.
// `control`: a strategy composable with such a process - it emits I1,
// reacts to each Ok with the next input, and may keep ancilla labels
// that survive the contraction.
enum class CombKind { process, control };

struct ProcessComb {
  LabeledOperator choi;
  Teeth teeth;
  CombKind kind = CombKind::process;
  std::vector<std::string> ancilla;  // control combs only

  std::size_t n_steps() const { return teeth.size(); }
};

namespace detail {

struct CausalityGroup {
  std::vector<std::string> in;   // labels received at this step
  std::vector<std::string> out;  // labels emitted at this step
};

// The step structure against which the causality hierarchy is checked,
// in causal order.
inline std::vector<CausalityGroup> causality_groups(const ProcessComb& c) {
  std::vector<CausalityGroup> groups;
  if (c.kind == CombKind::process) {
    for (const auto& t : c.teeth) groups.push_back({{t.in}, {t.out}});
  } else {
    groups.push_back({{}, {c.teeth.front().in}});
    for (std::size_t k = 1; k < c.teeth.size(); ++k)
      groups.push_back({{c.teeth[k - 1].out}, {c.teeth[k].in}});
    if (c.choi.has_label(c.teeth.back().out)) {
      // The strategy also post-processes the final output (e.g. a
      // superprocess dual); its leftovers surface after receiving it.
      groups.push_back({{c.teeth.back().out}, c.ancilla});
    } else {
      // The ancilla is whatever memory the strategy still holds once
      // its last input has been emitted; it surfaces with that emission.
      for (const auto& n : c.ancilla) groups.back().out.push_back(n);
    }
  }
  return groups;
}

}  // namespace detail

// Checks that the Choi operator is a state and satisfies the full
// descending hierarchy of causality conditions: at each step, tracing
// out what the comb emits afterwards must destroy all dependence on what
// it has not yet received. Residuals are trace norms.
inline ValidationReport validate_comb(const ProcessComb& c) {
  if (c.teeth.empty()) throw ShapeMismatch("comb has no teeth");
  // Structural checks throw; numeric conditions go into the report.
  std::vector<std::string> expected;
  for (const auto& t : c.teeth) {
    expected.push_back(t.in);
    expected.push_back(t.out);
  }
  if (c.kind == CombKind::control) {
    // A plain strategy leaves the final process output alone; a dual of
    // a superprocess may also post-process it, in which case the label
    // legitimately appears in the operator.
    if (!c.choi.has_label(c.teeth.back().out)) expected.pop_back();
    for (const auto& n : c.ancilla) expected.push_back(n);
  }
  for (const auto& n : expected)
    if (!c.choi.has_label(n)) throw UnknownLabel("comb operator is missing label '" + n + "'");
  if (static_cast<std::size_t>(c.choi.subsystems().size()) != expected.size())
    throw ShapeMismatch("comb operator carries labels outside its teeth/ancilla structure");

  ValidationReport report;
  const LabeledOperator& u = c.choi;
  report.add("hermitian", hermiticity_defect(u), tol::herm);
  report.add("unit-trace", std::abs(std::real(trace(u)) - 1.0) + std::abs(std::imag(trace(u))), tol::trace);
  report.add("psd", std::max(0.0, -min_eigenvalue(u)), tol::psd);

  const auto groups = detail::causality_groups(c);
  LabeledOperator x = c.choi;
  for (std::size_t k = groups.size(); k-- > 0;) {
    const auto& g = groups[k];
    LabeledOperator y = trace_out(x, g.out);
    LabeledOperator next = g.in.empty() ? y : trace_out(y, g.in);
    if (!g.in.empty()) {
      Subsystems in_subs;
      for (const auto& n : g.in) in_subs.push_back(y.subsystems()[y.position(n)]);
      LabeledOperator want = tensor(next, LabeledOperator::maximally_mixed(in_subs));
      want = permute(want, y.names());
      const LabeledOperator diff(y.subsystems(), y.matrix() - want.matrix());
      report.add("causality-step-" + std::to_string(k + 1), trace_norm(diff), tol::trace);
    }
    x = next;
  }
  return report;
}

inline void require_valid_comb(const ProcessComb& c, const std::string& what) {
  const ValidationReport report = validate_comb(c);
  if (!report.pass()) {
    std::string detail;
    for (const auto& chk : report.checks)
      if (!chk.pass) detail += " " + chk.name + "(" + std::to_string(chk.residual) + ")";
    throw NotACombChoi(what + ": failed checks:" + detail);
  }
}

//=========================================================================
// Contraction of a process with a control strategy
//=========================================================================

// Feeds a process comb through a control comb. Everything except the
// final process output and the control's ancilla is contracted; the
// result is the output state the strategy actually produces.
inline LabeledOperator contract(const ProcessComb& t, const ProcessComb& s) {
  if (t.kind != CombKind::process || s.kind != CombKind::control)
    throw ShapeMismatch("contract expects (process, control)");
  if (!(t.teeth == s.teeth)) throw ShapeMismatch("control comb teeth do not match the process");
  for (const auto& tooth : t.teeth) {
    if (t.choi.dim_of(tooth.in) != s.choi.dim_of(tooth.in) ||
        (s.choi.has_label(tooth.out) && t.choi.dim_of(tooth.out) != s.choi.dim_of(tooth.out)))
      throw DimensionMismatch("tooth dimensions differ between process and control");
  }
  return link_product(t.choi, s.choi);
}

//=========================================================================
// Stock combs
//=========================================================================

namespace detail {
inline std::string copy_label(const std::string& name) { return name + "'"; }
}  // namespace detail

// The control strategy that stores every wire of the process into
// ancilla copies: a tensor product of maximally entangled pairs, one per
// process label except the final output. Contracting any process comb
// with it reproduces that comb's Choi state on the primed copies.
inline ProcessComb choi_control_comb(const ProcessComb& t) {
  if (t.kind != CombKind::process) throw ShapeMismatch("choi_control_comb expects a process comb");
  LabeledOperator acc({}, Matrix::Identity(1, 1));
  std::vector<std::string> ancilla;
  for (std::size_t k = 0; k < t.teeth.size(); ++k) {
    const auto& tooth = t.teeth[k];
    std::vector<std::string> wires{tooth.in};
    if (k + 1 < t.teeth.size()) wires.push_back(tooth.out);
    for (const auto& w : wires) {
      const SubsystemLabel sub{w, t.choi.dim_of(w)};
      const SubsystemLabel copy{detail::copy_label(w), sub.dim};
      acc = tensor(acc, LabeledOperator::max_entangled(sub, copy));
      ancilla.push_back(copy.name);
    }
  }
  return ProcessComb{std::move(acc), t.teeth, CombKind::control, std::move(ancilla)};
}

// Product comb running one fixed channel per step, with no memory
// between steps.
inline ProcessComb markov_comb(const std::vector<ChoiChannel>& steps) {
  if (steps.empty()) throw ShapeMismatch("markov_comb needs at least one step");
  LabeledOperator acc({}, Matrix::Identity(1, 1));
  Teeth teeth;
  for (const auto& step : steps) {
    if (step.in_labels.size() != 1 || step.out_labels.size() != 1)
      throw ShapeMismatch("markov_comb steps must map one label to one label");
    acc = tensor(acc, step.choi);
    teeth.push_back({step.in_labels.front(), step.out_labels.front()});
  }
  return ProcessComb{std::move(acc), std::move(teeth), CombKind::process, {}};
}

// Fully uncorrelated version of the comb: the tensor product of all its
// single-subsystem marginals. Input marginals of a valid comb are
// maximally mixed, so the result is again a valid comb (each step a
// fixed-output channel).
inline ProcessComb marginal_comb(const ProcessComb& t) {
  if (t.kind != CombKind::process) throw ShapeMismatch("marginal_comb expects a process comb");
  LabeledOperator acc({}, Matrix::Identity(1, 1));
  for (const auto& tooth : t.teeth) {
    acc = tensor(acc, partial_trace(t.choi, {tooth.in}));
    acc = tensor(acc, partial_trace(t.choi, {tooth.out}));
  }
  return ProcessComb{std::move(acc), t.teeth, CombKind::process, {}};
}

//=========================================================================
// Circuit-form samplers
//=========================================================================

// Random process comb realized by a system-environment circuit: each
// step routes the tooth input together with an environment of dimension
// env_dim through a Haar unitary. env_dim = 1 gives memoryless combs;
// larger environments carry memory between steps.
inline ProcessComb random_comb(Rng& rng, const Teeth& teeth, const Subsystems& dims, Index env_dim = 2) {
  if (env_dim < 1) throw DimensionMismatch("environment dimension must be >= 1");
  auto dim_of = [&](const std::string& n) -> Index {
    for (const auto& s : dims)
      if (s.name == n) return s.dim;
    throw UnknownLabel("no dimension given for label '" + n + "'");
  };

  const SubsystemLabel env{"@env", env_dim};
  LabeledOperator acc = LabeledOperator::basis_state(env, 0);
  for (const auto& t : teeth) {
    const Index di = dim_of(t.in), dj = dim_of(t.out);
    if (di * env_dim != dj * env_dim || di != dj)
      throw DimensionMismatch("circuit sampler needs equal tooth input/output dimensions");
    const SubsystemLabel fed{"@fed", di};
    acc = tensor(acc, LabeledOperator::max_entangled({t.in, di}, fed));
    acc = apply_unitary(acc, {fed.name, env.name}, haar_unitary(rng, di * env_dim));
    acc = rename(acc, {{fed.name, t.out}});
  }
  acc = trace_out(acc, {env.name});

  std::vector<std::string> order;
  for (const auto& t : teeth) {
    order.push_back(t.in);
    order.push_back(t.out);
  }
  return ProcessComb{permute(acc, order), teeth, CombKind::process, {}};
}

// Control comb realized by a concrete strategy circuit: a pure state on
// (first input x ancilla) followed by one unitary junction per step
// boundary, acting on (received output x ancilla) and emitting the next
// input. Always a valid control comb by construction.
inline ProcessComb control_comb_from_circuit(const ProcessComb& t, const Vector& psi,
                                             const std::vector<Matrix>& junctions, Index anc_dim,
                                             const std::string& anc_name = "R") {
  if (t.kind != CombKind::process) throw ShapeMismatch("control_comb_from_circuit expects a process comb");
  const std::size_t n = t.teeth.size();
  if (junctions.size() != n - 1)
    throw ShapeMismatch("expected " + std::to_string(n - 1) + " junction unitaries, got " +
                        std::to_string(junctions.size()));
  if (anc_dim < 1) throw DimensionMismatch("ancilla dimension must be >= 1");

  const SubsystemLabel anc{anc_name, anc_dim};
  const SubsystemLabel first_in{t.teeth.front().in, t.choi.dim_of(t.teeth.front().in)};
  LabeledOperator acc = LabeledOperator::pure_state({first_in, anc}, psi);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::string& got = t.teeth[k].out;
    const std::string& next = t.teeth[k + 1].in;
    const Index d_got = t.choi.dim_of(got);
    const Index d_next = t.choi.dim_of(next);
    if (d_got != d_next)
      throw DimensionMismatch("unitary junction needs matching wire dimensions at step " +
                              std::to_string(k + 1));
    const SubsystemLabel fed{"@fed", d_got};
    acc = tensor(acc, LabeledOperator::max_entangled({got, d_got}, fed));
    acc = apply_unitary(acc, {fed.name, anc.name}, junctions[k]);
    acc = rename(acc, {{fed.name, next}});
  }
  return ProcessComb{std::move(acc), t.teeth, CombKind::control, {anc.name}};
}

inline ProcessComb random_control_comb(Rng& rng, const ProcessComb& t, Index anc_dim,
                                       const std::string& anc_name = "R") {
  const Index d_first = t.choi.dim_of(t.teeth.front().in);
  const Vector psi = random_pure_vector(rng, d_first * anc_dim);
  std::vector<Matrix> junctions;
  for (std::size_t k = 0; k + 1 < t.teeth.size(); ++k)
    junctions.push_back(haar_unitary(rng, t.choi.dim_of(t.teeth[k].out) * anc_dim));
  return control_comb_from_circuit(t, psi, junctions, anc_dim, anc_name);
}

}  // namespace combdiv
