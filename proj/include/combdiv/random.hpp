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
#include <cstdint>
#include <random>

#include "combdiv/labeled_operator.hpp"

namespace combdiv {

//=========================================================================
// Deterministic random streams
//=========================================================================

// A seeded random stream. Substreams derived from (seed, index) are
// independent of evaluation order, which keeps parallel restarts and
// sampled test suites reproducible. Gaussians use an explicit Box-Muller
// transform so that the produced sequence depends only on the mt19937_64
// output, not on library-specific distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed_with(seed, 0x6a09e667f3bcc908ull)) {}

  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seed_with(seed, stream)) {}

  Rng substream(std::uint64_t index) {
    return Rng(engine_(), index);  // derived, still deterministic for a fixed call order
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Index uniform_index(Index n) { return static_cast<Index>(engine_() % static_cast<std::uint64_t>(n)); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
  }

 private:
  static std::mt19937_64 seed_with(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

//=========================================================================
// Haar-distributed objects
//=========================================================================

inline Matrix ginibre(Rng& rng, Index rows, Index cols) {
  Matrix g(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) g(r, c) = rng.complex_gaussian();
  return g;
}

// Haar-uniform unitary from the QR decomposition of a Ginibre matrix,
// with the phases of the R diagonal folded back in so the distribution
// is exactly the Haar measure.
inline Matrix haar_unitary(Rng& rng, Index d) {
  const Matrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= (a > 0.0) ? rjj / a : Complex(1.0, 0.0);
  }
  return q;
}

// First `cols` columns of a Haar unitary: a Haar-distributed isometry.
inline Matrix haar_isometry(Rng& rng, Index rows, Index cols) {
  if (cols > rows) throw DimensionMismatch("isometry needs cols <= rows");
  return haar_unitary(rng, rows).leftCols(cols);
}

inline Vector random_pure_vector(Rng& rng, Index d) {
  Vector psi(d);
  for (Index i = 0; i < d; ++i) psi(i) = rng.complex_gaussian();
  psi.normalize();
  return psi;
}

inline LabeledOperator random_pure_state(Rng& rng, const Subsystems& subs) {
  return LabeledOperator::pure_state(subs, random_pure_vector(rng, total_dim(subs)));
}

// Full-rank random density operator (Hilbert-Schmidt measure).
inline LabeledOperator random_density_operator(Rng& rng, const Subsystems& subs) {
  const Index d = total_dim(subs);
  const Matrix g = ginibre(rng, d, d);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return LabeledOperator(subs, std::move(rho));
}

}  // namespace combdiv
