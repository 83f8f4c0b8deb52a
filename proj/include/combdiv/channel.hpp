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

#include "combdiv/labeled_operator.hpp"
#include "combdiv/random.hpp"

namespace combdiv {

//=========================================================================
// Validation reports
//=========================================================================

struct ValidationCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  void add(const std::string& name, double residual, double tolerance) {
    checks.push_back({name, residual, tolerance, residual <= tolerance});
  }

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

//=========================================================================
// Kraus channels
//=========================================================================

struct KrausChannel {
  std::vector<Matrix> kraus;
  SubsystemLabel in;
  SubsystemLabel out;
};

inline void check_kraus_channel(const KrausChannel& ch) {
  if (ch.kraus.empty()) throw ShapeMismatch("channel has no Kraus operators");
  Matrix sum = Matrix::Zero(ch.in.dim, ch.in.dim);
  for (const auto& k : ch.kraus) {
    if (k.rows() != ch.out.dim || k.cols() != ch.in.dim)
      throw ShapeMismatch("Kraus operator is " + std::to_string(k.rows()) + "x" +
                          std::to_string(k.cols()) + ", expected " + std::to_string(ch.out.dim) +
                          "x" + std::to_string(ch.in.dim));
    sum += k.adjoint() * k;
  }
  const double defect = (sum - Matrix::Identity(ch.in.dim, ch.in.dim)).cwiseAbs().maxCoeff();
  if (defect > tol::trace)
    throw NotTracePreserving("Kraus operators sum to identity with defect " + std::to_string(defect));
}

// Applies the channel to an operator carrying (at least) the input label;
// other tensor factors pass through untouched. The map is applied
// linearly, so non-state operators are fine.
inline LabeledOperator apply_kraus(const KrausChannel& ch, const LabeledOperator& x) {
  // Move the input factor to the front, act, rename to the output label.
  std::vector<std::string> order{ch.in.name};
  for (const auto& s : x.subsystems())
    if (s.name != ch.in.name) order.push_back(s.name);
  LabeledOperator y = permute(x, order);
  if (y.subsystems().front().dim != ch.in.dim)
    throw DimensionMismatch("input subsystem dimension does not match the channel");

  const Index d_rest = y.dim() / ch.in.dim;
  Matrix acc = Matrix::Zero(ch.out.dim * d_rest, ch.out.dim * d_rest);
  for (const auto& k : ch.kraus) {
    const Matrix kk = Eigen::kroneckerProduct(k, Matrix::Identity(d_rest, d_rest));
    acc += kk * y.matrix() * kk.adjoint();
  }
  Subsystems subs = y.subsystems();
  subs.front() = ch.out;
  return LabeledOperator(std::move(subs), std::move(acc));
}

//=========================================================================
// Choi representation
//=========================================================================

// A channel stored as its normalized Choi state: the channel applied to
// half of a maximally entangled pair, so the Choi operator has unit trace
// and its input marginal is maximally mixed. Input and output label
// groups may each span several subsystems; all labels must be distinct.
struct ChoiChannel {
  LabeledOperator choi;  // labels: in_labels ++ out_labels (any order)
  std::vector<std::string> in_labels;
  std::vector<std::string> out_labels;

  Index in_dim() const {
    Index d = 1;
    for (const auto& n : in_labels) d *= choi.dim_of(n);
    return d;
  }
  Index out_dim() const {
    Index d = 1;
    for (const auto& n : out_labels) d *= choi.dim_of(n);
    return d;
  }
};

// Checks state-ness plus the causality marginal: tracing out the output
// must leave the maximally mixed state on the input copy.
inline ValidationReport validate_choi_channel(const ChoiChannel& ch) {
  ValidationReport report;
  const LabeledOperator& u = ch.choi;
  report.add("hermitian", hermiticity_defect(u), tol::herm);
  report.add("unit-trace", std::abs(std::real(trace(u)) - 1.0) + std::abs(std::imag(trace(u))), tol::trace);
  report.add("psd", std::max(0.0, -min_eigenvalue(u)), tol::psd);
  const LabeledOperator marg = partial_trace(u, ch.in_labels);
  const LabeledOperator want = LabeledOperator::maximally_mixed(marg.subsystems());
  report.add("input-marginal", max_abs_diff(marg, want), tol::trace);
  return report;
}

inline void require_valid_choi_channel(const ChoiChannel& ch, const std::string& what) {
  const ValidationReport report = validate_choi_channel(ch);
  for (const auto& c : report.checks) {
    if (c.pass) continue;
    if (c.name == "input-marginal")
      throw NotTracePreserving(what + ": input marginal differs from maximally mixed by " +
                               std::to_string(c.residual));
    throw NotDensityOperator(what + ": check '" + c.name + "' failed with residual " +
                             std::to_string(c.residual));
  }
}

inline ChoiChannel choi_from_kraus(const KrausChannel& ch) {
  check_kraus_channel(ch);
  const Index di = ch.in.dim, dj = ch.out.dim;
  Matrix m = Matrix::Zero(di * dj, di * dj);
  for (const auto& k : ch.kraus) {
    // Column-stacked |K>> with composite index (in, out), leftmost most
    // significant, matching the [in, out] label order below.
    Vector v(di * dj);
    for (Index i = 0; i < di; ++i)
      for (Index b = 0; b < dj; ++b) v(i * dj + b) = k(b, i);
    m += v * v.adjoint();
  }
  m /= static_cast<double>(di);
  return ChoiChannel{LabeledOperator({ch.in, ch.out}, std::move(m)), {ch.in.name}, {ch.out.name}};
}

// Recovers a Kraus decomposition from the Choi eigenvectors. Input and
// output label groups are flattened row-major in their stored order.
inline std::vector<Matrix> kraus_from_choi(const ChoiChannel& ch) {
  std::vector<std::string> order = ch.in_labels;
  order.insert(order.end(), ch.out_labels.begin(), ch.out_labels.end());
  const LabeledOperator sorted = permute(ch.choi, order);
  const Index di = ch.in_dim(), dj = ch.out_dim();

  const EigSystem es = eigh(sorted);
  std::vector<Matrix> kraus;
  for (Index v = 0; v < es.values.size(); ++v) {
    const double lam = es.values(v);
    if (lam <= tol::support) continue;
    const double scale = std::sqrt(lam * static_cast<double>(di));
    Matrix k(dj, di);
    for (Index i = 0; i < di; ++i)
      for (Index b = 0; b < dj; ++b) k(b, i) = scale * es.vectors(i * dj + b, v);
    kraus.push_back(std::move(k));
  }
  return kraus;
}

// Applies the channel to the factors of x named by its input labels; all
// other factors pass through. Action on the Choi state: d_in times the
// partial trace against the input-transposed Choi operator.
inline LabeledOperator apply_choi(const ChoiChannel& ch, const LabeledOperator& x) {
  for (const auto& n : ch.in_labels)
    if (x.dim_of(n) != ch.choi.dim_of(n))
      throw DimensionMismatch("dimension of '" + n + "' does not match the channel input");
  for (const auto& n : ch.out_labels)
    if (x.has_label(n))
      throw DuplicateLabel("operand already carries the channel output label '" + n + "'");

  // Labels of x that are untouched by the channel.
  std::vector<std::string> rest;
  Subsystems rest_subs;
  for (const auto& s : x.subsystems())
    if (std::find(ch.in_labels.begin(), ch.in_labels.end(), s.name) == ch.in_labels.end()) {
      rest.push_back(s.name);
      rest_subs.push_back(s);
    }

  Subsystems out_subs;
  for (const auto& n : ch.out_labels) out_subs.push_back(ch.choi.subsystems()[ch.choi.position(n)]);

  LabeledOperator lhs = tensor(x, LabeledOperator::identity(out_subs));
  LabeledOperator rhs = tensor(partial_transpose(ch.choi, ch.in_labels),
                               LabeledOperator::identity(rest_subs));
  rhs = permute(rhs, lhs.names());

  LabeledOperator prod(lhs.subsystems(), lhs.matrix() * rhs.matrix());
  std::vector<std::string> keep = rest;
  keep.insert(keep.end(), ch.out_labels.begin(), ch.out_labels.end());
  LabeledOperator out = partial_trace(prod, keep);
  out.matrix() *= static_cast<double>(ch.in_dim());
  return out;
}

//=========================================================================
// Superchannels
//=========================================================================

// A channel transformation in factored form: a pre-processing channel
// feeding the input (plus a side memory), and a post-processing channel
// consuming the output together with that memory. Acting on any channel
// in Choi form yields the Choi form of the transformed channel.
struct Superchannel {
  ChoiChannel pre;   // in: new input label; out: inner input label + memory labels
  ChoiChannel post;  // in: inner output label + memory labels; out: new output label
};

inline ChoiChannel apply_superchannel(const Superchannel& xi, const ChoiChannel& ch) {
  Subsystems in_subs;
  for (const auto& n : xi.pre.in_labels) in_subs.push_back(xi.pre.choi.subsystems()[xi.pre.choi.position(n)]);
  const Index d_in = total_dim(in_subs);

  Matrix acc;
  bool first = true;
  Subsystems full_subs;
  // Assemble the transformed Choi column by column over a matrix-unit
  // basis of the new input space; the composite map is linear.
  for (Index i = 0; i < d_in; ++i)
    for (Index j = 0; j < d_in; ++j) {
      Matrix unit = Matrix::Zero(d_in, d_in);
      unit(i, j) = 1.0;
      LabeledOperator y(in_subs, std::move(unit));
      y = apply_choi(xi.pre, y);
      y = apply_choi(ch, y);
      y = apply_choi(xi.post, y);
      if (first) {
        full_subs = in_subs;
        for (const auto& s : y.subsystems()) full_subs.push_back(s);
        acc = Matrix::Zero(d_in * y.dim(), d_in * y.dim());
        first = false;
      }
      Matrix unit2 = Matrix::Zero(d_in, d_in);
      unit2(i, j) = 1.0;
      acc += Eigen::kroneckerProduct(unit2, y.matrix());
    }
  acc /= static_cast<double>(d_in);
  return ChoiChannel{LabeledOperator(std::move(full_subs), std::move(acc)), xi.pre.in_labels,
                     xi.post.out_labels};
}

//=========================================================================
// Stock channels and random sampling
//=========================================================================

inline KrausChannel identity_channel(const SubsystemLabel& in, const SubsystemLabel& out) {
  if (in.dim != out.dim) throw DimensionMismatch("identity channel needs equal dimensions");
  return KrausChannel{{Matrix::Identity(in.dim, in.dim)}, in, out};
}

// Discards the input and prepares the given state.
inline KrausChannel fixed_output_channel(const SubsystemLabel& in, const LabeledOperator& state) {
  check_density_operator(state, "prepared state");
  if (state.subsystems().size() != 1) throw ShapeMismatch("prepared state must live on a single label");
  const EigSystem es = eigh(state);
  std::vector<Matrix> kraus;
  for (Index v = 0; v < es.values.size(); ++v) {
    const double lam = std::max(0.0, es.values(v));
    if (lam <= tol::support) continue;
    for (Index i = 0; i < in.dim; ++i) {
      Matrix k = Matrix::Zero(state.dim(), in.dim);
      k.col(i) = std::sqrt(lam) * es.vectors.col(v);
      kraus.push_back(std::move(k));
    }
  }
  return KrausChannel{std::move(kraus), in, state.subsystems().front()};
}

// Discards the input and prepares the maximally mixed state.
inline KrausChannel depolarizing_channel(const SubsystemLabel& in, const SubsystemLabel& out) {
  return fixed_output_channel(in, LabeledOperator::maximally_mixed({out}));
}

// Random channel through a Haar-distributed Stinespring isometry into
// output x environment; env_dim tunes the Kraus rank.
inline KrausChannel random_channel(Rng& rng, const SubsystemLabel& in, const SubsystemLabel& out,
                                   Index env_dim = 0) {
  if (env_dim <= 0) env_dim = in.dim;
  if (out.dim * env_dim < in.dim)
    throw DimensionMismatch("Stinespring dilation needs out.dim * env_dim >= in.dim");
  const Matrix v = haar_isometry(rng, out.dim * env_dim, in.dim);
  std::vector<Matrix> kraus;
  kraus.reserve(env_dim);
  for (Index e = 0; e < env_dim; ++e) {
    Matrix k(out.dim, in.dim);
    for (Index b = 0; b < out.dim; ++b) k.row(b) = v.row(b * env_dim + e);
    kraus.push_back(std::move(k));
  }
  return KrausChannel{std::move(kraus), in, out};
}

}  // namespace combdiv
