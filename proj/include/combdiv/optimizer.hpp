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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "combdiv/divergence.hpp"
#include "combdiv/superprocess.hpp"

namespace combdiv {

//=========================================================================
// Configuration and results
//=========================================================================

struct OptimizerConfig {
  int restarts = 8;
  int sweeps = 100;              // pattern-search sweeps per restart
  double initial_step = 0.5;     // initial rotation angle (radians)
  double step_tolerance = 1e-6;  // converged once the step shrinks below this
  Index ancilla_dim = 0;         // 0 = automatic (input dimension per wire)
  int povm_outcomes = 0;         // classical case; 0 = (final output dim)^2, capped
  std::uint64_t seed = 0;
  int jobs = 1;                  // parallel restarts
};

// Reported maxima are lower bounds on the true suprema: the search
// parameterizes explicit strategies, every one of which is feasible.
struct OptimizationResult {
  double value = 0.0;                 // best feasible probe (may be +infinity)
  double reference_value = 0.0;       // fixed full-information probe (see below)
  std::vector<double> restart_values; // best value of each restart
  int best_restart = -1;
  bool converged = false;
  long evaluations = 0;

  std::optional<LabeledOperator> best_input;  // channel case: optimal joint input
  std::optional<ProcessComb> best_control;    // comb cases: optimal strategy
  std::optional<Tester> best_tester;          // classical case: optimal tester
};

//=========================================================================
// Pattern search over products of unitary groups
//=========================================================================

namespace detail {

// Ranking value used while searching: infinities are clamped so they
// compare equal to each other and above every finite probe.
inline double rank_value(double v) { return std::isinf(v) ? 1e6 : v; }

// Left-multiplies u by a closed-form one-parameter rotation: a real or
// imaginary Givens rotation on rows (i, j), or a single-row phase. These
// are exactly the exponentials of an (anti-)symmetric generator basis of
// the unitary algebra, so the search can reach any unitary.
enum class MoveKind { givens_re, givens_im, phase };

inline void apply_move(Matrix& u, MoveKind kind, Index i, Index j, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  switch (kind) {
    case MoveKind::givens_re: {
      const Eigen::RowVectorXcd ri = u.row(i), rj = u.row(j);
      u.row(i) = c * ri - s * rj;
      u.row(j) = s * ri + c * rj;
      break;
    }
    case MoveKind::givens_im: {
      const Eigen::RowVectorXcd ri = u.row(i), rj = u.row(j);
      const Complex is(0.0, s);
      u.row(i) = c * ri + is * rj;
      u.row(j) = is * ri + c * rj;
      break;
    }
    case MoveKind::phase:
      u.row(i) *= Complex(c, s);
      break;
  }
}

using Point = std::vector<Matrix>;
using Objective = std::function<double(const Point&)>;

struct SearchOutcome {
  double value = 0.0;  // true objective at the final point (may be inf)
  bool converged = false;
  long evaluations = 0;
};

// Greedy coordinate pattern search: try every one-parameter rotation on
// every unitary with the current step, accept improvements immediately,
// halve the step after a sweep without progress.
inline SearchOutcome pattern_search(Point& point, const Objective& f, const OptimizerConfig& cfg,
                                    const std::function<void(const Point&)>& on_accept = {}) {
  SearchOutcome out;
  out.value = f(point);
  ++out.evaluations;
  if (on_accept) on_accept(point);
  double best_rank = rank_value(out.value);
  double step = cfg.initial_step;

  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t which = 0; which < point.size(); ++which) {
      const Index d = point[which].rows();
      for (Index i = 0; i < d; ++i) {
        for (Index j = i; j < d; ++j) {
          std::vector<MoveKind> kinds;
          if (i == j)
            kinds = {MoveKind::phase};
          else
            kinds = {MoveKind::givens_re, MoveKind::givens_im};
          for (const MoveKind kind : kinds) {
            for (const double sign : {1.0, -1.0}) {
              Point candidate = point;
              apply_move(candidate[which], kind, i, j, sign * step);
              const double val = f(candidate);
              ++out.evaluations;
              if (rank_value(val) > best_rank + 1e-12) {
                point = std::move(candidate);
                best_rank = rank_value(val);
                out.value = val;
                improved = true;
                if (on_accept) on_accept(point);
              }
            }
          }
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < cfg.step_tolerance) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

// Completes a partially specified isometry to a full unitary: specified
// columns are kept, the rest are filled deterministically with
// orthonormalized standard basis vectors.
inline Matrix complete_unitary(Index d, const std::vector<std::pair<Index, Vector>>& columns) {
  Matrix u = Matrix::Zero(d, d);
  std::vector<bool> used(d, false);
  for (const auto& [idx, col] : columns) {
    u.col(idx) = col;
    used[idx] = true;
  }
  Index candidate = 0;
  for (Index c = 0; c < d; ++c) {
    if (used[c]) continue;
    while (true) {
      if (candidate >= d) throw Error("failed to complete isometry to a unitary");
      Vector v = Vector::Zero(d);
      v(candidate) = 1.0;
      ++candidate;
      for (Index k = 0; k < d; ++k)
        if (used[k]) v -= u.col(k).dot(v) * u.col(k);
      const double norm = v.norm();
      if (norm > 1e-6) {
        u.col(c) = v / norm;
        used[c] = true;
        break;
      }
    }
  }
  return u;
}

// First internal label name of the given base that does not collide
// with any label of the operator.
inline std::string fresh_label(const LabeledOperator& x, std::string base) {
  while (x.has_label(base)) base += "'";
  return base;
}

// Deterministic unitary whose first column is the given unit vector.
inline Matrix unitary_with_first_column(const Vector& psi) {
  return complete_unitary(psi.size(), {{0, psi / psi.norm()}});
}

// Runs restarts (possibly in parallel), merging deterministically: the
// highest value wins, ties broken towards the lowest restart index.
template <typename MakeStart>
inline OptimizationResult run_restarts(const OptimizerConfig& cfg, const Objective& f,
                                       const MakeStart& make_start,
                                       const std::function<void(const Point&)>& on_accept,
                                       std::vector<Point>* best_points) {
  const int n = std::max(1, cfg.restarts);
  std::vector<SearchOutcome> outcomes(n);
  std::vector<Point> points(n);

  auto run_one = [&](int r) {
    Point p = make_start(r);
    outcomes[r] = pattern_search(p, f, cfg, on_accept);
    points[r] = std::move(p);
  };

  if (cfg.jobs > 1) {
    std::vector<std::future<void>> jobs;
    std::atomic<int> next{0};
    const int workers = std::min(cfg.jobs, n);
    for (int w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&]() {
        for (int r = next.fetch_add(1); r < n; r = next.fetch_add(1)) run_one(r);
      }));
    for (auto& j : jobs) j.get();
  } else {
    for (int r = 0; r < n; ++r) run_one(r);
  }

  OptimizationResult result;
  for (int r = 0; r < n; ++r) {
    result.restart_values.push_back(outcomes[r].value);
    result.evaluations += outcomes[r].evaluations;
    if (result.best_restart < 0 ||
        rank_value(outcomes[r].value) > rank_value(result.restart_values[result.best_restart]) + 1e-15) {
      result.best_restart = r;
    }
  }
  result.value = outcomes[result.best_restart].value;
  result.converged = outcomes[result.best_restart].converged;
  if (best_points) *best_points = std::move(points);
  return result;
}

}  // namespace detail

//=========================================================================
// Generalized channel divergence
//=========================================================================

namespace detail {

struct ChannelObjective {
  std::vector<Matrix> kraus_a;
  std::vector<Matrix> kraus_b;
  Index d_in = 0, d_out = 0, anc = 0;
  Measure measure;

  LabeledOperator output(const std::vector<Matrix>& kraus, const Vector& psi) const {
    // psi is indexed (ancilla, input) row-major; each Kraus operator
    // acts on the input factor.
    Matrix psi_mat(anc, d_in);
    for (Index r = 0; r < anc; ++r)
      for (Index a = 0; a < d_in; ++a) psi_mat(r, a) = psi(r * d_in + a);
    Matrix rho = Matrix::Zero(anc * d_out, anc * d_out);
    for (const auto& k : kraus) {
      const Matrix phi = psi_mat * k.transpose();  // (anc x d_out)
      Vector v(anc * d_out);
      for (Index r = 0; r < anc; ++r)
        for (Index b = 0; b < d_out; ++b) v(r * d_out + b) = phi(r, b);
      rho += v * v.adjoint();
    }
    return LabeledOperator({{"@R", anc}, {"@out", d_out}}, std::move(rho));
  }

  double operator()(const Point& p) const {
    const Vector psi = p.front().col(0);
    return state_divergence(measure, output(kraus_a, psi), output(kraus_b, psi));
  }
};

}  // namespace detail

// Lower bound on the generalized channel divergence: the maximum of the
// state divergence over joint (ancilla x input) probe states, with the
// ancilla as large as the input - enough to reach the supremum, which is
// attained on pure inputs by isometric invariance. The fixed probe
// through a maximally entangled input (the Choi state itself) is always
// included, so the result never falls below the Choi divergence.
inline OptimizationResult generalized_channel_divergence(Measure measure, const ChoiChannel& a,
                                                         const ChoiChannel& b,
                                                         const OptimizerConfig& cfg = {}) {
  if (a.in_labels != b.in_labels || a.out_labels != b.out_labels)
    throw ShapeMismatch("channels have different input/output label groups");

  detail::ChannelObjective obj;
  obj.kraus_a = kraus_from_choi(a);
  obj.kraus_b = kraus_from_choi(b);
  obj.d_in = a.in_dim();
  obj.d_out = a.out_dim();
  obj.anc = cfg.ancilla_dim > 0 ? cfg.ancilla_dim : obj.d_in;
  obj.measure = measure;

  const Index d_psi = obj.anc * obj.d_in;
  auto make_start = [&](int r) -> detail::Point {
    if (r == 0 && obj.anc >= obj.d_in) {
      // Maximally entangled seed: reproduces the Choi probe exactly.
      Vector psi = Vector::Zero(d_psi);
      for (Index i = 0; i < obj.d_in; ++i) psi(i * obj.d_in + i) = 1.0;
      psi.normalize();
      return {detail::unitary_with_first_column(psi)};
    }
    Rng rng(cfg.seed, static_cast<std::uint64_t>(r));
    return {haar_unitary(rng, d_psi)};
  };

  std::vector<detail::Point> points;
  OptimizationResult result = detail::run_restarts(cfg, obj, make_start, {}, &points);

  Subsystems in_subs;
  for (const auto& n : a.in_labels) in_subs.push_back(a.choi.subsystems()[a.choi.position(n)]);
  const std::string anc_name = detail::fresh_label(a.choi, "@R");
  const std::string flat_name = detail::fresh_label(a.choi, "@in");
  auto package_input = [&](const Vector& psi, Index anc) {
    LabeledOperator flat =
        LabeledOperator::pure_state({{anc_name, anc}, {flat_name, obj.d_in}}, psi);
    return split_label(flat, flat_name, in_subs);
  };

  result.reference_value = choi_divergence(measure, a, b);
  if (detail::rank_value(result.reference_value) > detail::rank_value(result.value)) {
    result.value = result.reference_value;
    // The Choi probe corresponds to the maximally entangled input state.
    Vector psi = Vector::Zero(obj.d_in * obj.d_in);
    for (Index i = 0; i < obj.d_in; ++i) psi(i * obj.d_in + i) = 1.0;
    result.best_input = package_input(psi, obj.d_in);
  } else {
    result.best_input = package_input(points[result.best_restart].front().col(0), obj.anc);
  }
  return result;
}

//=========================================================================
// Generalized comb divergence
//=========================================================================

namespace detail {

struct CircuitShape {
  Teeth teeth;
  std::vector<Index> wire_dims;  // I1, O1, I2, ..., In (all but the final output)
  Index d_first = 0;
  Index anc = 0;
  Index d_final = 0;
  std::string anc_name;

  static CircuitShape from(const ProcessComb& t, Index anc_override) {
    CircuitShape sh;
    sh.teeth = t.teeth;
    for (std::size_t k = 0; k < t.teeth.size(); ++k) {
      sh.wire_dims.push_back(t.choi.dim_of(t.teeth[k].in));
      if (k + 1 < t.teeth.size()) sh.wire_dims.push_back(t.choi.dim_of(t.teeth[k].out));
    }
    sh.d_first = t.choi.dim_of(t.teeth.front().in);
    sh.d_final = t.choi.dim_of(t.teeth.back().out);
    Index def = 1;
    for (const auto& tooth : t.teeth) def *= t.choi.dim_of(tooth.in);
    sh.anc = anc_override > 0 ? anc_override : def;
    sh.anc_name = fresh_label(t.choi, "@R");
    return sh;
  }

  Index full_information_dim() const {
    Index k = 1;
    for (const auto& d : wire_dims) k *= d;
    return k;
  }

  std::vector<Index> point_dims() const {
    std::vector<Index> dims{d_first * anc};
    for (std::size_t w = 1; w < wire_dims.size(); w += 2) dims.push_back(wire_dims[w] * anc);
    return dims;
  }
};

inline ProcessComb control_from_point(const ProcessComb& t, const CircuitShape& sh, const Point& p) {
  const Vector psi = p.front().col(0);
  std::vector<Matrix> junctions(p.begin() + 1, p.begin() + 1 + (sh.teeth.size() - 1));
  return control_comb_from_circuit(t, psi, junctions, sh.anc, sh.anc_name);
}

// Start that plays the full-information strategy: store every wire into
// a dedicated ancilla slot, maximally entangling emitted inputs with
// theirs. Only representable when the ancilla factors through all wire
// dimensions.
inline std::optional<Point> full_information_start(const CircuitShape& sh) {
  const Index k = sh.full_information_dim();
  if (sh.anc % k != 0) return std::nullopt;

  // Mixed-radix layout of the ancilla: one slot per wire plus slack.
  std::vector<Index> slot_dims = sh.wire_dims;
  slot_dims.push_back(sh.anc / k);
  std::vector<Index> strides(slot_dims.size(), 1);
  for (std::size_t j = slot_dims.size(); j-- > 1;) strides[j - 1] = strides[j] * slot_dims[j];

  Point point;
  {
    Vector psi = Vector::Zero(sh.d_first * sh.anc);
    for (Index a = 0; a < sh.d_first; ++a) psi(a * sh.anc + a * strides[0]) = 1.0;
    psi.normalize();
    point.push_back(unitary_with_first_column(psi));
  }
  // Junction b: stores the received wire 2b+1 and entangles the emitted
  // wire 2b+2 with its slot. Specified on the subspace where those and
  // all later slots are still empty; completed arbitrarily elsewhere.
  for (std::size_t b = 0; b + 1 < sh.teeth.size(); ++b) {
    const std::size_t w_store = 2 * b + 1, w_emit = 2 * b + 2;
    const Index d_store = sh.wire_dims[w_store];
    const Index d_emit = sh.wire_dims[w_emit];
    const Index dim = d_store * sh.anc;
    std::vector<std::pair<Index, Vector>> cols;
    // Enumerate ancilla indices whose slots >= w_store are all zero.
    for (Index r = 0; r < sh.anc; ++r) {
      bool clean = true;
      for (std::size_t sl = w_store; sl < slot_dims.size(); ++sl)
        if ((r / strides[sl]) % slot_dims[sl] != 0) clean = false;
      if (!clean) continue;
      for (Index f = 0; f < d_store; ++f) {
        Vector v = Vector::Zero(dim);
        for (Index m = 0; m < d_emit; ++m) {
          const Index r_new = r + f * strides[w_store] + m * strides[w_emit];
          v(m * sh.anc + r_new) = 1.0 / std::sqrt(static_cast<double>(d_emit));
        }
        cols.push_back({f * sh.anc + r, std::move(v)});
      }
    }
    point.push_back(complete_unitary(dim, cols));
  }
  return point;
}

inline Point random_circuit_point(Rng& rng, const CircuitShape& sh) {
  Point p;
  for (const Index d : sh.point_dims()) p.push_back(haar_unitary(rng, d));
  return p;
}

}  // namespace detail

// Lower bound on the generalized comb divergence: maximizes the state
// divergence of the contracted outputs over explicit strategy circuits
// (initial pure state on input x ancilla, one unitary junction per step
// boundary). The full-information strategy that reconstructs the Choi
// state is always evaluated as a fixed reference probe, so the reported
// value never falls below the Choi divergence of the combs.
inline OptimizationResult generalized_comb_divergence(
    Measure measure, const ProcessComb& t, const ProcessComb& v, const OptimizerConfig& cfg = {},
    const std::function<void(const ProcessComb&)>& probe_sink = {}) {
  if (t.kind != CombKind::process || v.kind != CombKind::process)
    throw ShapeMismatch("generalized_comb_divergence expects process combs");
  if (!(t.teeth == v.teeth)) throw ShapeMismatch("combs have different teeth");

  const detail::CircuitShape sh = detail::CircuitShape::from(t, cfg.ancilla_dim);

  std::mutex sink_mutex;
  std::function<void(const detail::Point&)> on_accept;
  if (probe_sink) {
    on_accept = [&](const detail::Point& p) {
      ProcessComb s = detail::control_from_point(t, sh, p);
      std::lock_guard<std::mutex> lock(sink_mutex);
      probe_sink(s);
    };
  }

  auto objective = [&](const detail::Point& p) -> double {
    const ProcessComb s = detail::control_from_point(t, sh, p);
    return state_divergence(measure, contract(t, s), contract(v, s));
  };

  const std::optional<detail::Point> fi_start = detail::full_information_start(sh);
  auto make_start = [&](int r) -> detail::Point {
    if (r == 0 && fi_start) return *fi_start;
    Rng rng(cfg.seed, static_cast<std::uint64_t>(r));
    return detail::random_circuit_point(rng, sh);
  };

  std::vector<detail::Point> points;
  OptimizationResult result = detail::run_restarts(cfg, objective, make_start, on_accept, &points);
  result.best_control = detail::control_from_point(t, sh, points[result.best_restart]);

  // Fixed reference probe: the strategy that reconstructs the Choi state.
  const ProcessComb s_choi = choi_control_comb(t);
  result.reference_value = state_divergence(measure, contract(t, s_choi), contract(v, s_choi));
  if (probe_sink) probe_sink(s_choi);
  if (detail::rank_value(result.reference_value) > detail::rank_value(result.value)) {
    result.value = result.reference_value;
    result.best_control = s_choi;
  }
  return result;
}

//=========================================================================
// Classical generalized comb divergence
//=========================================================================

namespace detail {

inline std::vector<Index> povm_ranks(Index dim, Index outcomes) {
  std::vector<Index> ranks(outcomes, dim / outcomes);
  for (Index x = 0; x < dim % outcomes; ++x) ++ranks[x];
  return ranks;
}

inline std::vector<double> block_probabilities(const Matrix& rotated, const std::vector<Index>& ranks) {
  std::vector<double> p;
  p.reserve(ranks.size());
  Index offset = 0;
  for (const Index r : ranks) {
    double acc = 0.0;
    for (Index i = 0; i < r; ++i) acc += std::real(rotated(offset + i, offset + i));
    p.push_back(std::max(0.0, acc));
    offset += r;
  }
  return p;
}

}  // namespace detail

// Lower bound on the classical generalized comb divergence: testers are
// parameterized as a strategy circuit followed by a rank-partitioned
// projective measurement (a rotated complete set of orthogonal
// projectors) on the final state.
inline OptimizationResult classical_comb_divergence(Measure measure, const ProcessComb& t,
                                                    const ProcessComb& v,
                                                    const OptimizerConfig& cfg = {}) {
  if (t.kind != CombKind::process || v.kind != CombKind::process)
    throw ShapeMismatch("classical_comb_divergence expects process combs");
  if (!(t.teeth == v.teeth)) throw ShapeMismatch("combs have different teeth");

  const detail::CircuitShape sh = detail::CircuitShape::from(t, cfg.ancilla_dim);
  const Index final_dim = sh.d_final * sh.anc;
  Index outcomes = cfg.povm_outcomes > 0 ? cfg.povm_outcomes : sh.d_final * sh.d_final;
  outcomes = std::min(outcomes, final_dim);
  const std::vector<Index> ranks = detail::povm_ranks(final_dim, outcomes);

  // Point layout: circuit unitaries, then the measurement basis rotation.
  auto objective = [&](const detail::Point& p) -> double {
    detail::Point circuit(p.begin(), p.end() - 1);
    const Matrix& w = p.back();
    const ProcessComb s = detail::control_from_point(t, sh, circuit);
    // The contracted state is ordered (final output, ancilla) because
    // the process contributes its leftover label first.
    const Matrix rt = w.adjoint() * contract(t, s).matrix() * w;
    const Matrix rv = w.adjoint() * contract(v, s).matrix() * w;
    std::vector<double> pt = detail::block_probabilities(rt, ranks);
    std::vector<double> pv = detail::block_probabilities(rv, ranks);
    // Guard against tiny negative diagonal noise before normalizing.
    double st = 0.0, sv = 0.0;
    for (double x : pt) st += x;
    for (double x : pv) sv += x;
    for (double& x : pt) x /= st;
    for (double& x : pv) x /= sv;
    return classical_divergence(measure, pt, pv);
  };

  const std::optional<detail::Point> fi_start = detail::full_information_start(sh);
  auto make_start = [&](int r) -> detail::Point {
    detail::Point p;
    if (r == 0 && fi_start) {
      p = *fi_start;
      p.push_back(Matrix::Identity(final_dim, final_dim));
    } else {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(r));
      p = detail::random_circuit_point(rng, sh);
      p.push_back(haar_unitary(rng, final_dim));
    }
    return p;
  };

  std::vector<detail::Point> points;
  OptimizationResult result = detail::run_restarts(cfg, objective, make_start, {}, &points);

  // Package the winning tester explicitly.
  const detail::Point& best = points[result.best_restart];
  detail::Point circuit(best.begin(), best.end() - 1);
  ProcessComb control = detail::control_from_point(t, sh, circuit);
  const Matrix& w = best.back();
  const LabeledOperator state = contract(t, control);
  std::vector<LabeledOperator> effects;
  Index offset = 0;
  for (const Index r : ranks) {
    Matrix proj = Matrix::Zero(final_dim, final_dim);
    for (Index i = 0; i < r; ++i) proj(offset + i, offset + i) = 1.0;
    effects.push_back(LabeledOperator(state.subsystems(), w * proj * w.adjoint()));
    offset += r;
  }
  result.best_tester = Tester{std::move(control), std::move(effects)};
  result.reference_value = 0.0;
  return result;
}

//=========================================================================
// Steering channel
//=========================================================================

// The measure-one-bit construction that steers a maximally entangled
// reference into any strategy's output: with probability 1/K the channel
// reproduces the strategy's contraction with the comb encoded in its
// input, and flags success on a classical bit. K is the total dimension
// of the contracted wires. The complement term uses the strategy's
// marginal on those wires, which keeps the channel completely positive
// for every valid strategy.
inline ChoiChannel steering_channel(const ProcessComb& s) {
  if (s.kind != CombKind::control) throw ShapeMismatch("steering_channel expects a control comb");
  if (s.choi.has_label(s.teeth.back().out))
    throw ShapeMismatch("steering_channel expects a plain strategy without final-output processing");
  {
    const ValidationReport report = validate_comb(s);
    if (!report.pass()) {
      std::string detail;
      for (const auto& c : report.checks)
        if (!c.pass) detail += " " + c.name + "(" + std::to_string(c.residual) + ")";
      throw NotACombChoi("steering_channel input:" + detail);
    }
  }

  std::vector<std::string> gamma;
  Subsystems gamma_subs;
  for (std::size_t k = 0; k < s.teeth.size(); ++k) {
    gamma.push_back(s.teeth[k].in);
    if (k + 1 < s.teeth.size()) gamma.push_back(s.teeth[k].out);
  }
  for (const auto& n : gamma) gamma_subs.push_back(s.choi.subsystems()[s.choi.position(n)]);
  const double big_k = static_cast<double>(total_dim(gamma_subs));

  Subsystems anc_subs;
  for (const auto& n : s.ancilla) anc_subs.push_back(s.choi.subsystems()[s.choi.position(n)]);

  const LabeledOperator mu = permute(partial_trace(s.choi, gamma), gamma);
  {
    const double lam = eigh(mu).values.maxCoeff();
    if (lam > 1.0 + tol::psd)
      throw NotACombChoi("strategy marginal eigenvalue " + std::to_string(lam) +
                         " exceeds 1; complement would not be positive");
  }

  std::vector<std::string> order = gamma;
  order.push_back("@X");
  for (const auto& n : s.ancilla) order.push_back(n);

  const SubsystemLabel flag{"@X", 2};
  std::vector<std::string> choi_order = gamma;
  for (const auto& n : s.ancilla) choi_order.push_back(n);
  LabeledOperator success = tensor(permute(s.choi, choi_order), LabeledOperator::basis_state(flag, 0));
  success.matrix() /= big_k;

  LabeledOperator complement(gamma_subs,
                             LabeledOperator::maximally_mixed(gamma_subs).matrix() - mu.matrix() / big_k);
  LabeledOperator failure = tensor(tensor(complement, LabeledOperator::basis_state(flag, 1)),
                                   LabeledOperator::maximally_mixed(anc_subs));

  LabeledOperator choi = permute(success, order);
  choi.matrix() += permute(failure, order).matrix();

  std::vector<std::string> out_labels{"@X"};
  for (const auto& n : s.ancilla) out_labels.push_back(n);
  return ChoiChannel{std::move(choi), gamma, out_labels};
}

//=========================================================================
// Monotonicity checking via the dual action
//=========================================================================

struct MonotonicityReport {
  double lhs_value = 0.0;  // lower bound after the superprocess
  double rhs_value = 0.0;  // lower bound before the superprocess
  double max_duality_residual = 0.0;
  long probes_replayed = 0;
  bool monotone = false;
};

// Optimizes the divergence of the transformed pair, then replays every
// accepted strategy probe on the original pair through the dual action.
// Each replay first verifies the dual-action identity entrywise, then
// contributes a feasible value to the original-pair bound; that makes
// the reported pair of bounds structurally ordered, which is exactly the
// mechanism behind contractivity of generalized comb divergences.
inline MonotonicityReport check_monotonicity(const Superprocess& z, const ProcessComb& t,
                                             const ProcessComb& v, Measure measure,
                                             const OptimizerConfig& cfg = {}) {
  const ProcessComb zt = apply_superprocess(z, t);
  const ProcessComb zv = apply_superprocess(z, v);

  std::vector<ProcessComb> probes;
  const OptimizationResult lhs = generalized_comb_divergence(
      measure, zt, zv, cfg, [&](const ProcessComb& s) { probes.push_back(s); });

  MonotonicityReport report;
  report.lhs_value = lhs.value;

  // Original-pair floor: the full-information strategy on (t, v).
  {
    const ProcessComb s_choi = choi_control_comb(t);
    report.rhs_value = state_divergence(measure, contract(t, s_choi), contract(v, s_choi));
  }

  for (const ProcessComb& s : probes) {
    const ProcessComb pulled = dual_superprocess(z, s);
    const LabeledOperator via_forward = contract(zt, s);
    const LabeledOperator via_dual = contract(t, pulled);
    const double residual = max_abs_diff(via_forward, permute(via_dual, via_forward.names()));
    report.max_duality_residual = std::max(report.max_duality_residual, residual);
    if (residual > tol::eig)
      throw DualityViolation("dual-action identity fails with residual " + std::to_string(residual));

    const double val = state_divergence(measure, via_dual, contract(v, pulled));
    if (detail::rank_value(val) > detail::rank_value(report.rhs_value)) report.rhs_value = val;
    ++report.probes_replayed;
  }

  report.monotone =
      detail::rank_value(report.rhs_value) + 1e-9 >= detail::rank_value(report.lhs_value);
  return report;
}

}  // namespace combdiv
