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

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "combdiv/errors.hpp"

namespace combdiv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Divergences use +inf for support violations; JSON serialization round
// trips it as the string "inf".
inline double infinity() { return std::numeric_limits<double>::infinity(); }

//=========================================================================
// Subsystem labels
//=========================================================================

// A named tensor factor. Composite indices are row-major: the leftmost
// label is the most significant digit.
struct SubsystemLabel {
  std::string name;
  Index dim = 0;

  friend bool operator==(const SubsystemLabel& a, const SubsystemLabel& b) {
    return a.name == b.name && a.dim == b.dim;
  }
};

using Subsystems = std::vector<SubsystemLabel>;

inline Index total_dim(const Subsystems& subs) {
  Index d = 1;
  for (const auto& s : subs) d *= s.dim;
  return d;
}

namespace detail {

inline void check_subsystems(const Subsystems& subs) {
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i].name.empty()) throw UnknownLabel("subsystem label names must be non-empty");
    if (subs[i].dim < 1)
      throw DimensionMismatch("subsystem '" + subs[i].name + "' has dimension " +
                              std::to_string(subs[i].dim) + " < 1");
    for (std::size_t j = i + 1; j < subs.size(); ++j)
      if (subs[i].name == subs[j].name)
        throw DuplicateLabel("duplicate subsystem label '" + subs[i].name + "'");
  }
  if (total_dim(subs) > kMaxOperatorSide)
    throw DimensionMismatch("operator side " + std::to_string(total_dim(subs)) +
                            " exceeds the supported maximum " + std::to_string(kMaxOperatorSide));
}

// stride[j] = product of the dimensions to the right of label j.
inline std::vector<Index> strides(const Subsystems& subs) {
  std::vector<Index> st(subs.size(), 1);
  for (std::size_t j = subs.size(); j-- > 1;) st[j - 1] = st[j] * subs[j].dim;
  return st;
}

// Decomposes a flat composite index into per-label digits.
inline void digits_of(Index flat, const Subsystems& subs, const std::vector<Index>& st,
                      std::vector<Index>& out) {
  out.resize(subs.size());
  for (std::size_t j = 0; j < subs.size(); ++j) {
    out[j] = flat / st[j];
    flat %= st[j];
  }
}

}  // namespace detail

//=========================================================================
// LabeledOperator
//=========================================================================

// A square operator on a tensor product of named subsystems. All
// structural operations (tensor, partial trace, permutations, ...) are
// driven by label names, never by positional index conventions.
class LabeledOperator {
 public:
  LabeledOperator() = default;

  LabeledOperator(Subsystems subs, Matrix m) : subs_(std::move(subs)), m_(std::move(m)) {
    detail::check_subsystems(subs_);
    const Index d = total_dim(subs_);
    if (m_.rows() != d || m_.cols() != d)
      throw ShapeMismatch("matrix is " + std::to_string(m_.rows()) + "x" +
                          std::to_string(m_.cols()) + " but labels imply side " +
                          std::to_string(d));
  }

  const Subsystems& subsystems() const { return subs_; }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  Index dim() const { return m_.rows(); }

  bool has_label(const std::string& name) const {
    return std::any_of(subs_.begin(), subs_.end(),
                       [&](const SubsystemLabel& s) { return s.name == name; });
  }

  std::size_t position(const std::string& name) const {
    for (std::size_t j = 0; j < subs_.size(); ++j)
      if (subs_[j].name == name) return j;
    throw UnknownLabel("no subsystem labelled '" + name + "'");
  }

  Index dim_of(const std::string& name) const { return subs_[position(name)].dim; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(subs_.size());
    for (const auto& s : subs_) out.push_back(s.name);
    return out;
  }

  //--- factories ---------------------------------------------------------

  // Unnormalized identity (trace = dim).
  static LabeledOperator identity(const Subsystems& subs) {
    return LabeledOperator(subs, Matrix::Identity(total_dim(subs), total_dim(subs)));
  }

  // Maximally mixed state I/d (trace 1).
  static LabeledOperator maximally_mixed(const Subsystems& subs) {
    const Index d = total_dim(subs);
    return LabeledOperator(subs, Matrix::Identity(d, d) / static_cast<double>(d));
  }

  // |k><k| on a single subsystem.
  static LabeledOperator basis_state(const SubsystemLabel& sub, Index k) {
    if (k < 0 || k >= sub.dim)
      throw DimensionMismatch("basis index " + std::to_string(k) + " out of range for '" +
                              sub.name + "'");
    Matrix m = Matrix::Zero(sub.dim, sub.dim);
    m(k, k) = 1.0;
    return LabeledOperator({sub}, std::move(m));
  }

  // Projector onto the given (not necessarily normalized) vector.
  static LabeledOperator pure_state(const Subsystems& subs, const Vector& psi) {
    if (psi.size() != total_dim(subs))
      throw ShapeMismatch("state vector length does not match subsystem dimensions");
    const Vector n = psi / psi.norm();
    return LabeledOperator(subs, n * n.adjoint());
  }

  // Normalized maximally entangled state between two equal-dimension labels.
  static LabeledOperator max_entangled(const SubsystemLabel& a, const SubsystemLabel& b) {
    if (a.dim != b.dim)
      throw DimensionMismatch("maximally entangled state needs equal dimensions, got " +
                              std::to_string(a.dim) + " and " + std::to_string(b.dim));
    Vector psi = Vector::Zero(a.dim * b.dim);
    for (Index i = 0; i < a.dim; ++i) psi(i * b.dim + i) = 1.0;
    return pure_state({a, b}, psi);
  }

 private:
  Subsystems subs_;
  Matrix m_;
};

//=========================================================================
// Structural operations
//=========================================================================

inline LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b) {
  Subsystems subs = a.subsystems();
  for (const auto& s : b.subsystems()) subs.push_back(s);
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return LabeledOperator(std::move(subs), std::move(m));
}

namespace detail {

// Positions of the given names inside subs, in the order given.
inline std::vector<std::size_t> positions_of(const Subsystems& subs,
                                             const std::vector<std::string>& names) {
  std::vector<std::size_t> pos;
  pos.reserve(names.size());
  for (const auto& n : names) {
    bool found = false;
    for (std::size_t j = 0; j < subs.size(); ++j)
      if (subs[j].name == n) {
        pos.push_back(j);
        found = true;
        break;
      }
    if (!found) throw UnknownLabel("no subsystem labelled '" + n + "'");
  }
  return pos;
}

}  // namespace detail

// Traces out every label not listed in `keep`. Kept labels stay in their
// original relative order.
inline LabeledOperator partial_trace(const LabeledOperator& x, const std::vector<std::string>& keep) {
  const Subsystems& subs = x.subsystems();
  // Validate and mark the kept positions.
  std::vector<bool> kept(subs.size(), false);
  for (const auto& p : detail::positions_of(subs, keep)) {
    if (kept[p]) throw DuplicateLabel("label '" + subs[p].name + "' listed twice");
    kept[p] = true;
  }

  Subsystems keep_subs, drop_subs;
  for (std::size_t j = 0; j < subs.size(); ++j)
    (kept[j] ? keep_subs : drop_subs).push_back(subs[j]);

  const Index dk = total_dim(keep_subs);
  const Index dt = total_dim(drop_subs);
  const auto st = detail::strides(subs);

  // Flat-index contribution of each kept (resp. dropped) sub-index.
  std::vector<Index> keep_off(dk, 0), drop_off(dt, 0);
  {
    const auto kst = detail::strides(keep_subs);
    const auto dst = detail::strides(drop_subs);
    std::vector<Index> dig;
    for (Index i = 0; i < dk; ++i) {
      detail::digits_of(i, keep_subs, kst, dig);
      Index off = 0;
      std::size_t c = 0;
      for (std::size_t j = 0; j < subs.size(); ++j)
        if (kept[j]) off += dig[c++] * st[j];
      keep_off[i] = off;
    }
    for (Index i = 0; i < dt; ++i) {
      detail::digits_of(i, drop_subs, dst, dig);
      Index off = 0;
      std::size_t c = 0;
      for (std::size_t j = 0; j < subs.size(); ++j)
        if (!kept[j]) off += dig[c++] * st[j];
      drop_off[i] = off;
    }
  }

  Matrix out = Matrix::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r)
    for (Index c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (Index t = 0; t < dt; ++t) acc += x.matrix()(keep_off[r] + drop_off[t], keep_off[c] + drop_off[t]);
      out(r, c) = acc;
    }
  return LabeledOperator(std::move(keep_subs), std::move(out));
}

// Convenience: traces out exactly the listed labels.
inline LabeledOperator trace_out(const LabeledOperator& x, const std::vector<std::string>& drop) {
  std::vector<bool> dropped(x.subsystems().size(), false);
  for (const auto& p : detail::positions_of(x.subsystems(), drop)) dropped[p] = true;
  std::vector<std::string> keep;
  for (std::size_t j = 0; j < x.subsystems().size(); ++j)
    if (!dropped[j]) keep.push_back(x.subsystems()[j].name);
  return partial_trace(x, keep);
}

// Transposes the listed tensor factors in the computational basis.
inline LabeledOperator partial_transpose(const LabeledOperator& x, const std::vector<std::string>& on) {
  const Subsystems& subs = x.subsystems();
  std::vector<bool> flip(subs.size(), false);
  for (const auto& p : detail::positions_of(subs, on)) flip[p] = true;

  const Index d = x.dim();
  const auto st = detail::strides(subs);
  Matrix out(d, d);
  std::vector<Index> rd, cd;
  for (Index r = 0; r < d; ++r) {
    detail::digits_of(r, subs, st, rd);
    for (Index c = 0; c < d; ++c) {
      detail::digits_of(c, subs, st, cd);
      Index rr = 0, cc = 0;
      for (std::size_t j = 0; j < subs.size(); ++j) {
        rr += (flip[j] ? cd[j] : rd[j]) * st[j];
        cc += (flip[j] ? rd[j] : cd[j]) * st[j];
      }
      out(rr, cc) = x.matrix()(r, c);
    }
  }
  return LabeledOperator(subs, std::move(out));
}

// Reorders the tensor factors. `order` must name every label exactly once.
inline LabeledOperator permute(const LabeledOperator& x, const std::vector<std::string>& order) {
  const Subsystems& subs = x.subsystems();
  if (order.size() != subs.size())
    throw BadPermutation("permutation lists " + std::to_string(order.size()) + " labels, operator has " +
                         std::to_string(subs.size()));
  const auto pos = detail::positions_of(subs, order);
  std::vector<bool> seen(subs.size(), false);
  for (const auto& p : pos) {
    if (seen[p]) throw BadPermutation("label '" + subs[p].name + "' listed twice in permutation");
    seen[p] = true;
  }

  Subsystems new_subs;
  new_subs.reserve(subs.size());
  for (const auto& p : pos) new_subs.push_back(subs[p]);

  const Index d = x.dim();
  const auto st_old = detail::strides(subs);
  const auto st_new = detail::strides(new_subs);

  // new_index[old flat index] under the digit shuffle.
  std::vector<Index> remap(d);
  std::vector<Index> dig;
  for (Index i = 0; i < d; ++i) {
    detail::digits_of(i, subs, st_old, dig);
    Index ni = 0;
    for (std::size_t j = 0; j < pos.size(); ++j) ni += dig[pos[j]] * st_new[j];
    remap[i] = ni;
  }

  Matrix out(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) out(remap[r], remap[c]) = x.matrix()(r, c);
  return LabeledOperator(std::move(new_subs), std::move(out));
}

// Reinterprets one label as a product of finer labels (dimensions must
// multiply up). The matrix is untouched: with row-major composite
// indices the refined digits occupy exactly the old label's positions.
inline LabeledOperator split_label(const LabeledOperator& x, const std::string& name,
                                   const Subsystems& parts) {
  const std::size_t p = x.position(name);
  if (total_dim(parts) != x.subsystems()[p].dim)
    throw DimensionMismatch("refined dimensions do not multiply to the dimension of '" + name + "'");
  Subsystems subs;
  for (std::size_t j = 0; j < x.subsystems().size(); ++j) {
    if (j == p)
      for (const auto& s : parts) subs.push_back(s);
    else
      subs.push_back(x.subsystems()[j]);
  }
  return LabeledOperator(std::move(subs), x.matrix());
}

// Renames labels in place (dimensions unchanged); mapping entries are
// old-name -> new-name pairs.
inline LabeledOperator rename(const LabeledOperator& x, const std::map<std::string, std::string>& m) {
  Subsystems subs = x.subsystems();
  for (auto& s : subs) {
    auto it = m.find(s.name);
    if (it != m.end()) s.name = it->second;
  }
  detail::check_subsystems(subs);  // catches collisions introduced by the rename
  return LabeledOperator(std::move(subs), x.matrix());
}

// Conjugates x by (u on the listed factors) tensor (identity elsewhere).
// u is indexed row-major over `on` in the order given.
inline LabeledOperator apply_unitary(const LabeledOperator& x, const std::vector<std::string>& on,
                                     const Matrix& u) {
  std::vector<std::string> order = on;
  for (const auto& s : x.subsystems())
    if (std::find(on.begin(), on.end(), s.name) == on.end()) order.push_back(s.name);

  LabeledOperator y = permute(x, order);
  Index d_on = 1;
  for (const auto& n : on) d_on *= x.dim_of(n);
  if (u.rows() != d_on || u.cols() != d_on)
    throw ShapeMismatch("unitary side " + std::to_string(u.rows()) + " does not match factor dimension " +
                        std::to_string(d_on));
  const Index d_rest = x.dim() / d_on;
  Matrix full = Eigen::kroneckerProduct(u, Matrix::Identity(d_rest, d_rest));
  y.matrix() = full * y.matrix() * full.adjoint();
  return permute(y, x.names());
}

//=========================================================================
// Spectral helpers
//=========================================================================

inline Complex trace(const LabeledOperator& x) { return x.matrix().trace(); }

inline double hermiticity_defect(const LabeledOperator& x) {
  return (x.matrix() - x.matrix().adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const LabeledOperator& x, double tolerance = tol::herm) {
  return hermiticity_defect(x) <= tolerance;
}

struct EigSystem {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns match values
};

// Eigendecomposition of a Hermitian operator.
inline EigSystem eigh(const LabeledOperator& x) {
  if (!is_hermitian(x))
    throw NotHermitian("eigendecomposition requested for a non-Hermitian operator (defect " +
                       std::to_string(hermiticity_defect(x)) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x.matrix());
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const LabeledOperator& x) { return eigh(x).values.minCoeff(); }

// Trace norm (sum of singular values).
inline double trace_norm(const LabeledOperator& x) {
  if (is_hermitian(x)) return eigh(x).values.cwiseAbs().sum();
  Eigen::BDCSVD<Matrix> svd(x.matrix());
  return svd.singularValues().sum();
}

inline double max_abs_diff(const LabeledOperator& a, const LabeledOperator& b) {
  if (a.dim() != b.dim()) throw ShapeMismatch("operators have different dimensions");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

inline void check_density_operator(const LabeledOperator& x, const std::string& what) {
  if (!is_hermitian(x))
    throw NotDensityOperator(what + ": not Hermitian (defect " + std::to_string(hermiticity_defect(x)) + ")");
  const double tr = std::real(trace(x));
  if (std::abs(tr - 1.0) > tol::trace)
    throw NotDensityOperator(what + ": trace " + std::to_string(tr) + " differs from 1");
  const double lam = min_eigenvalue(x);
  if (lam < -tol::psd)
    throw NotDensityOperator(what + ": minimum eigenvalue " + std::to_string(lam) + " is negative");
}

inline bool is_density_operator(const LabeledOperator& x) {
  try {
    check_density_operator(x, "operator");
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Von Neumann entropy in bits. Eigenvalues at or below the support
// threshold contribute zero.
inline double von_neumann_entropy(const LabeledOperator& x) {
  check_density_operator(x, "entropy argument");
  const EigSystem es = eigh(x);
  double h = 0.0;
  for (Index i = 0; i < es.values.size(); ++i) {
    const double p = es.values(i);
    if (p > tol::support) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace combdiv
