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

#include <catch2/catch_amalgamated.hpp>

#include "combdiv/labeled_operator.hpp"
#include "combdiv/random.hpp"

using namespace combdiv;

namespace {

const SubsystemLabel A{"A", 2};
const SubsystemLabel B{"B", 2};
const SubsystemLabel C{"C", 2};

// Measure in the computational basis; re-prepare the maximally mixed
// state on outcome 0 and |1><1| on outcome 1. Its Choi state
// diag(1/4, 1/4, 0, 1/2) is the workhorse fixture of these tests.
LabeledOperator measure_prepare_choi() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 0.25;
  m(1, 1) = 0.25;
  m(3, 3) = 0.5;
  return LabeledOperator({A, B}, m);
}

}  // namespace

TEST_CASE("constructor validates labels and shape", "[operator]") {
  CHECK_THROWS_AS(LabeledOperator({A, {"A", 3}}, Matrix::Identity(6, 6)), DuplicateLabel);
  CHECK_THROWS_AS(LabeledOperator({A, B}, Matrix::Identity(3, 3)), ShapeMismatch);
  CHECK_THROWS_AS(LabeledOperator({{"A", 0}}, Matrix::Identity(1, 1)), DimensionMismatch);
  CHECK_THROWS_AS(LabeledOperator({{"A", 8192}}, Matrix::Identity(1, 1)), DimensionMismatch);
  const LabeledOperator x = LabeledOperator::identity({A, B});
  CHECK_THROWS_AS(x.position("Q"), UnknownLabel);
  CHECK(x.dim_of("A") == 2);
  CHECK(x.dim() == 4);
}

TEST_CASE("tensor products of maximally mixed states stay maximally mixed", "[operator]") {
  const LabeledOperator ab = tensor(LabeledOperator::maximally_mixed({A}), LabeledOperator::maximally_mixed({B}));
  CHECK(max_abs_diff(ab, LabeledOperator::maximally_mixed({A, B})) == 0.0);
}

TEST_CASE("tensor is trace-multiplicative and positive on random states", "[operator]") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const LabeledOperator a = random_density_operator(rng, {A});
    const LabeledOperator b = random_density_operator(rng, {B, C});
    const LabeledOperator ab = tensor(a, b);
    CHECK(std::abs(std::real(trace(ab)) - 1.0) <= 1e-12);
    CHECK(min_eigenvalue(ab) >= -tol::psd);
  }
}

TEST_CASE("partial trace of a maximally entangled pair is maximally mixed", "[operator]") {
  const LabeledOperator phi = LabeledOperator::max_entangled(A, B);
  CHECK(max_abs_diff(partial_trace(phi, {"A"}), LabeledOperator::maximally_mixed({A})) <= 1e-15);
  CHECK(max_abs_diff(partial_trace(phi, {"B"}), LabeledOperator::maximally_mixed({B})) <= 1e-15);
}

TEST_CASE("partial trace of the measure-prepare Choi state over B is maximally mixed", "[operator]") {
  const LabeledOperator u = measure_prepare_choi();
  CHECK(max_abs_diff(partial_trace(u, {"A"}), LabeledOperator::maximally_mixed({A})) <= 1e-15);
}

TEST_CASE("partial trace preserves trace and rejects unknown labels", "[operator]") {
  Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    const LabeledOperator x = random_density_operator(rng, {A, B, C});
    for (const auto& keep :
         std::vector<std::vector<std::string>>{{"A"}, {"B"}, {"C"}, {"A", "C"}, {"B", "C"}}) {
      const LabeledOperator y = partial_trace(x, keep);
      CHECK(std::abs(std::real(trace(y)) - 1.0) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(partial_trace(LabeledOperator::identity({A}), {"Q"}), UnknownLabel);
}

TEST_CASE("tracing out one side of a tensor product leaves the other scaled by its trace",
          "[operator]") {
  Rng rng(13);
  for (int i = 0; i < 25; ++i) {
    const LabeledOperator a = random_density_operator(rng, {A});
    LabeledOperator b = random_density_operator(rng, {B});
    b.matrix() *= 1.7;  // non-unit trace to catch missing scale factors
    const LabeledOperator left = partial_trace(tensor(a, b), {"A"});
    CHECK((left.matrix() - 1.7 * a.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("partial transpose is an involution and reproduces the swap identity", "[operator]") {
  Rng rng(17);
  const LabeledOperator x = random_density_operator(rng, {A, B});
  CHECK(max_abs_diff(partial_transpose(partial_transpose(x, {"B"}), {"B"}), x) <= 1e-15);

  // (I x T) on the maximally entangled pair gives SWAP / d.
  const LabeledOperator phi = LabeledOperator::max_entangled(A, B);
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  CHECK((partial_transpose(phi, {"B"}).matrix() - swap / 2.0).cwiseAbs().maxCoeff() <= 1e-15);

  // Transposing every factor is the plain matrix transpose.
  CHECK((partial_transpose(x, {"A", "B"}).matrix() - x.matrix().transpose()).cwiseAbs().maxCoeff() <=
        1e-15);
}

TEST_CASE("permute round-trips, keeps spectra, and validates its argument", "[operator]") {
  Rng rng(19);
  const LabeledOperator x = random_density_operator(rng, {A, B, C});
  const LabeledOperator y = permute(x, {"C", "A", "B"});
  CHECK(max_abs_diff(permute(y, {"A", "B", "C"}), x) <= 1e-15);

  const Eigen::VectorXd sx = eigh(x).values;
  const Eigen::VectorXd sy = eigh(y).values;
  CHECK((sx - sy).cwiseAbs().maxCoeff() <= tol::eig);

  CHECK_THROWS_AS(permute(x, {"A", "B"}), BadPermutation);
  CHECK_THROWS_AS(permute(x, std::vector<std::string>{"A", "B", "B"}), BadPermutation);

  // Permuting a product reorders its factors.
  const LabeledOperator a = random_density_operator(rng, {A});
  const LabeledOperator b = random_density_operator(rng, {B});
  CHECK(max_abs_diff(permute(tensor(a, b), {"B", "A"}), tensor(b, a)) <= 1e-15);
}

TEST_CASE("rename and split_label reshape metadata without touching entries", "[operator]") {
  Rng rng(23);
  const LabeledOperator x = random_density_operator(rng, {A, B});
  const LabeledOperator y = rename(x, {{"B", "Z"}});
  CHECK(y.has_label("Z"));
  CHECK((y.matrix() - x.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(rename(x, {{"B", "A"}}), DuplicateLabel);

  const LabeledOperator flat = random_density_operator(rng, {{"F", 4}});
  const LabeledOperator fine = split_label(flat, "F", {{"F1", 2}, {"F2", 2}});
  CHECK(fine.dim_of("F1") == 2);
  CHECK((fine.matrix() - flat.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(split_label(flat, "F", Subsystems{{"F1", 3}}), DimensionMismatch);
}

TEST_CASE("eigh recovers the known spectrum of the measure-prepare Choi state", "[operator]") {
  const EigSystem es = eigh(measure_prepare_choi());
  const std::vector<double> expected{0.0, 0.25, 0.25, 0.5};
  REQUIRE(es.values.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(es.values(i) - expected[i]) <= tol::eig);
}

TEST_CASE("eigh reconstructs random Hermitian operators and rejects others", "[operator]") {
  Rng rng(29);
  for (const Index side : {2, 4, 8, 16, 64}) {
    Matrix g = ginibre(rng, side, side);
    Matrix h = (g + g.adjoint()) / 2.0;
    const LabeledOperator x({{"H", side}}, h);
    const EigSystem es = eigh(x);
    const Matrix back = es.vectors * es.values.asDiagonal() * es.vectors.adjoint();
    CHECK((back - h).cwiseAbs().maxCoeff() <= tol::eig);
  }
  Matrix bad = ginibre(rng, 3, 3);
  bad(0, 1) += Complex(0.0, 1.0);
  bad(1, 0) = 0.0;
  CHECK_THROWS_AS(eigh(LabeledOperator({{"H", 3}}, bad)), NotHermitian);
}

TEST_CASE("apply_unitary conjugates the selected factors only", "[operator]") {
  Rng rng(31);
  const LabeledOperator x = random_density_operator(rng, {A, B, C});
  const Matrix u = haar_unitary(rng, 4);
  const LabeledOperator y = apply_unitary(x, {"A", "C"}, u);
  CHECK(std::abs(std::real(trace(y)) - 1.0) <= 1e-12);
  // Spectrum is untouched by any unitary conjugation.
  CHECK((eigh(x).values - eigh(y).values).cwiseAbs().maxCoeff() <= tol::eig);
  // Undoing with the adjoint returns the original operator.
  CHECK(max_abs_diff(apply_unitary(y, {"A", "C"}, u.adjoint()), x) <= 1e-12);
  // The untouched factor's marginal is unchanged when the acted factors
  // are traced out.
  CHECK(max_abs_diff(partial_trace(y, {"B"}), partial_trace(x, {"B"})) <= 1e-12);
}

TEST_CASE("entropy of the measure-prepare Choi state is 1.5 bits", "[operator]") {
  CHECK(std::abs(von_neumann_entropy(measure_prepare_choi()) - 1.5) <= 1e-12);
}

TEST_CASE("entropy vanishes on pure states and is maximal on maximally mixed states", "[operator]") {
  Rng rng(37);
  CHECK(std::abs(von_neumann_entropy(random_pure_state(rng, {A, B}))) <= 1e-9);
  CHECK(std::abs(von_neumann_entropy(LabeledOperator::maximally_mixed({A, B})) - 2.0) <= 1e-12);
  CHECK_THROWS_AS(von_neumann_entropy(LabeledOperator::identity({A, B})), NotDensityOperator);
}

TEST_CASE("entropy of classical-quantum states splits into classical and average parts",
          "[operator]") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    double p = 0.2 + 0.6 * rng.uniform();
    const LabeledOperator rho0 = random_density_operator(rng, {B});
    const LabeledOperator rho1 = random_density_operator(rng, {B});
    Matrix m = Matrix::Zero(4, 4);
    m.block(0, 0, 2, 2) = p * rho0.matrix();
    m.block(2, 2, 2, 2) = (1.0 - p) * rho1.matrix();
    const LabeledOperator cq({A, B}, m);
    const double hp = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
    const double expected =
        hp + p * von_neumann_entropy(rho0) + (1.0 - p) * von_neumann_entropy(rho1);
    CHECK(std::abs(von_neumann_entropy(cq) - expected) <= 1e-9);
  }
}

TEST_CASE("dimension-one labels behave as trivial factors", "[operator]") {
  Rng rng(43);
  const SubsystemLabel e{"E", 1};
  const LabeledOperator a = random_density_operator(rng, {A});
  const LabeledOperator ae = tensor(a, LabeledOperator::identity({e}));
  CHECK(ae.dim() == 2);
  CHECK(max_abs_diff(partial_trace(ae, {"A"}), a) <= 1e-15);
  CHECK(max_abs_diff(permute(ae, {"E", "A"}), rename(tensor(LabeledOperator::identity({e}), a), {})) <=
        1e-15);
}

TEST_CASE("trace_norm matches the absolute eigenvalue sum on Hermitian operators", "[operator]") {
  Rng rng(47);
  Matrix g = ginibre(rng, 6, 6);
  const Matrix h = (g + g.adjoint()) / 2.0;
  const LabeledOperator x({{"H", 6}}, h);
  double expected = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  for (Index i = 0; i < 6; ++i) expected += std::abs(es.eigenvalues()(i));
  CHECK(std::abs(trace_norm(x) - expected) <= 1e-10);
}
