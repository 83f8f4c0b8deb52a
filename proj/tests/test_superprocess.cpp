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

#include "combdiv/divergence.hpp"
#include "combdiv/scenarios.hpp"
#include "combdiv/superprocess.hpp"

using namespace combdiv;

namespace {

// Strips one trailing prime from every label of an operator.
LabeledOperator unprime(const LabeledOperator& x) {
  std::map<std::string, std::string> m;
  for (const auto& n : x.names())
    if (!n.empty() && n.back() == '\'') m[n] = n.substr(0, n.size() - 1);
  return rename(x, m);
}

double duality_residual(const Superprocess& z, const ProcessComb& t, const ProcessComb& zt,
                        const ProcessComb& s) {
  const LabeledOperator forward = contract(zt, s);
  const LabeledOperator pulled = contract(t, dual_superprocess(z, s));
  return max_abs_diff(forward, permute(pulled, forward.names()));
}

}  // namespace

TEST_CASE("the identity superprocess relabels but does not change the comb", "[superprocess]") {
  const ProcessComb t = example_process();
  const Superprocess z = identity_superprocess(t);
  const ProcessComb zt = apply_superprocess(z, t);
  REQUIRE(zt.teeth.size() == t.teeth.size());
  const LabeledOperator back = unprime(zt.choi);
  REQUIRE(max_abs_diff(back, permute(t.choi, back.names())) < 1e-12);
}

TEST_CASE("the dual of the identity superprocess fixes strategies", "[superprocess]") {
  Rng rng(201);
  const ProcessComb t = example_process();
  const Superprocess z = identity_superprocess(t);
  const ProcessComb zt = apply_superprocess(z, t);
  const ProcessComb s = random_control_comb(rng, zt, 2, "@S");
  const ProcessComb pulled = dual_superprocess(z, s);
  REQUIRE(validate_comb(pulled).pass());

  // Identity slots swap primed wire names for the originals; the final
  // output keeps an identity wire-through to its renamed copy.
  const LabeledOperator back =
      tensor(unprime(s.choi), LabeledOperator::max_entangled({"D", 2}, {"D'", 2}));
  REQUIRE(max_abs_diff(pulled.choi, permute(back, pulled.choi.names())) < 1e-10);
}

TEST_CASE("the reference two step superprocess concentrates all correlations", "[superprocess]") {
  const Example3Setup ex = example3_setup();
  const ProcessComb zt = apply_superprocess(ex.z, ex.t);
  const LabeledOperator want = tensor(LabeledOperator::max_entangled({"A'", 2}, {"D'", 2}),
                                      LabeledOperator::maximally_mixed({{"B'", 2}, {"C'", 2}}));
  REQUIRE(max_abs_diff(zt.choi, permute(want, zt.choi.names())) < 1e-9);
}

TEST_CASE("a one step superprocess reproduces the superchannel action", "[superprocess]") {
  // The pre-processing feeds |1>, matching the superchannel used in the
  // channel tests; the transformed Choi state must agree.
  const Example1Setup ex = example1_setup();
  const ProcessComb t = markov_comb({ex.m});
  const Superprocess z = iqi_superprocess(
      t, {{choi_from_kraus(fixed_output_channel({"A'", 2}, LabeledOperator::basis_state({"A", 2}, 1))),
           choi_from_kraus(identity_channel({"B", 2}, {"B'", 2}))}});
  const ProcessComb zt = apply_superprocess(z, t);

  const LabeledOperator want = tensor(LabeledOperator::maximally_mixed({{"A'", 2}}),
                                      LabeledOperator::basis_state({"B'", 2}, 1));
  REQUIRE(max_abs_diff(zt.choi, permute(want, zt.choi.names())) < 1e-12);

  const ChoiChannel via_superchannel = apply_superchannel(ex.xi, ex.m);
  REQUIRE(max_abs_diff(zt.choi, permute(via_superchannel.choi, zt.choi.names())) < 1e-12);
}

TEST_CASE("superprocess and dual satisfy the defining identity", "[superprocess]") {
  Rng rng(202);
  const Example3Setup ex = example3_setup();
  const ProcessComb zt = apply_superprocess(ex.z, ex.t);
  for (int trial = 0; trial < 10; ++trial) {
    const ProcessComb s = random_control_comb(rng, zt, 2, "@S");
    REQUIRE(duality_residual(ex.z, ex.t, zt, s) < 1e-8);
  }
}

TEST_CASE("coarse graining satisfies the duality identity on random combs", "[superprocess]") {
  Rng rng(203);
  for (int trial = 0; trial < 20; ++trial) {
    const ProcessComb t =
        random_comb(rng, {{"A", "B"}, {"C", "D"}}, {{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}});
    const Superprocess z = coarse_graining_superprocess(t, 1);
    const ProcessComb zt = apply_superprocess(z, t);
    const ProcessComb s = random_control_comb(rng, zt, 2, "@S");
    REQUIRE(duality_residual(z, t, zt, s) < 1e-8);
  }
}

TEST_CASE("memory threaded superprocesses are valid and satisfy duality", "[superprocess]") {
  Rng rng(204);
  for (int trial = 0; trial < 5; ++trial) {
    const ProcessComb t =
        random_comb(rng, {{"A", "B"}, {"C", "D"}}, {{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}});
    const Superprocess z = random_threaded_superprocess(rng, t, 2);
    const ProcessComb zt = apply_superprocess(z, t);  // validates internally
    REQUIRE(validate_comb(zt).pass());
    const ProcessComb s = random_control_comb(rng, zt, 2, "@S");
    REQUIRE(duality_residual(z, t, zt, s) < 1e-8);
  }
}

TEST_CASE("make_superprocess rejects bad wiring", "[superprocess]") {
  const ProcessComb t = example_process();
  const Teeth out = {{"A'", "B'"}, {"C'", "D'"}};

  // Missing slots: produced labels touch no slot.
  REQUIRE_THROWS_AS(make_superprocess({}, t.teeth, out), ShapeMismatch);

  // A label appearing in two slots while declared as a tooth.
  std::vector<ChoiChannel> slots;
  for (const auto& tooth : t.teeth) {
    slots.push_back(choi_from_kraus(identity_channel({tooth.in + "'", 2}, {tooth.in, 2})));
    slots.push_back(choi_from_kraus(identity_channel({tooth.out, 2}, {tooth.out + "'", 2})));
  }
  slots.push_back(choi_from_kraus(identity_channel({"A'", 2}, {"@m", 2})));
  REQUIRE_THROWS_AS(make_superprocess(slots, t.teeth, out), ShapeMismatch);
  slots.pop_back();

  // Correct wiring passes.
  const Superprocess ok = make_superprocess(slots, t.teeth, out, /*iqi=*/true);
  REQUIRE(ok.slots.size() == 4);

  // A dangling memory label used exactly once.
  slots.push_back(choi_from_kraus(identity_channel({"@m", 2}, {"@m2", 2})));
  REQUIRE_THROWS_AS(make_superprocess(slots, t.teeth, out), ShapeMismatch);
}

TEST_CASE("iqi_superprocess enforces the slot orientation", "[superprocess]") {
  const ProcessComb t = example_process();
  const auto pre1 = choi_from_kraus(identity_channel({"A'", 2}, {"A", 2}));
  const auto post1 = choi_from_kraus(identity_channel({"B", 2}, {"B'", 2}));
  const auto pre2 = choi_from_kraus(identity_channel({"C'", 2}, {"C", 2}));
  const auto post2 = choi_from_kraus(identity_channel({"D", 2}, {"D'", 2}));

  REQUIRE_THROWS_AS(iqi_superprocess(t, {{pre1, post1}}), ShapeMismatch);  // one pair missing
  REQUIRE_THROWS_AS(iqi_superprocess(t, {{pre2, post1}, {pre1, post2}}), ShapeMismatch);

  const Superprocess z = iqi_superprocess(t, {{pre1, post1}, {pre2, post2}});
  const ProcessComb zt = apply_superprocess(z, t);
  const LabeledOperator back = unprime(zt.choi);
  REQUIRE(max_abs_diff(back, permute(t.choi, back.names())) < 1e-10);
}

TEST_CASE("independent per step superprocesses cannot create memory", "[superprocess]") {
  Rng rng(205);
  for (int trial = 0; trial < 10; ++trial) {
    // A memoryless process comb...
    const ProcessComb t = markov_comb({choi_from_kraus(random_channel(rng, {"A", 2}, {"B", 2})),
                                       choi_from_kraus(random_channel(rng, {"C", 2}, {"D", 2}))});
    // ...transformed by random independent per-tooth operations...
    const Superprocess z = iqi_superprocess(
        t, {{choi_from_kraus(random_channel(rng, {"A'", 2}, {"A", 2})),
             choi_from_kraus(random_channel(rng, {"B", 2}, {"B'", 2}))},
            {choi_from_kraus(random_channel(rng, {"C'", 2}, {"C", 2})),
             choi_from_kraus(random_channel(rng, {"D", 2}, {"D'", 2}))}});
    const ProcessComb zt = apply_superprocess(z, t);
    // ...stays memoryless.
    REQUIRE(non_markovianity(zt) < 1e-8);
  }
}

TEST_CASE("coarse graining is monotone for the correlation quantifier", "[superprocess]") {
  // Transformations in the allowed class may only ever increase the
  // generalized quantities; the correlation measure on the reference
  // process doubles under coarse graining.
  const Example2Setup ex = example2_setup();
  const ProcessComb gt = apply_superprocess(ex.g, ex.t);
  REQUIRE(total_correlations(ex.t) == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(total_correlations(gt) == Catch::Approx(2.0).margin(1e-9));
}
