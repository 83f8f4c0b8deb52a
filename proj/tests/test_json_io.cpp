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

#include <cstdio>

#include "combdiv/json_io.hpp"
#include "combdiv/scenarios.hpp"

using namespace combdiv;

TEST_CASE("operators round trip through JSON", "[json]") {
  Rng rng(501);
  const LabeledOperator x = random_density_operator(rng, {{"A", 2}, {"B", 3}});
  const LabeledOperator back = operator_from_json(operator_to_json(x));
  REQUIRE(back.names() == x.names());
  REQUIRE(max_abs_diff(x, back) < 1e-14);
}

TEST_CASE("matrices round trip and reject malformed input", "[json]") {
  Matrix m(2, 2);
  m << Complex(1, 0), Complex(0, -2), Complex(0.5, 0.5), Complex(0, 0);
  const Matrix back = matrix_from_json(matrix_to_json(m));
  REQUIRE((m - back).cwiseAbs().maxCoeff() < 1e-14);

  // Real-only input is accepted with zero imaginary part.
  const Matrix real_only = matrix_from_json(Json{{"re", {{1.0, 0.0}, {0.0, 1.0}}}});
  REQUIRE((real_only - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  REQUIRE_THROWS_AS(matrix_from_json(Json{{"re", {{1.0, 0.0}, {0.0}}}}), ParseError);
  REQUIRE_THROWS_AS(matrix_from_json(Json{{"im", {{1.0}}}}), ParseError);
  REQUIRE_THROWS_AS(
      matrix_from_json(Json{{"re", {{1.0}}}, {"im", {{1.0, 2.0}}}}), ParseError);
}

TEST_CASE("a channel given by Kraus operators loads to the known Choi state", "[json]") {
  const double r = std::sqrt(0.5);
  const Json j{
      {"in", {{"name", "A"}, {"dim", 2}}},
      {"out", {{"name", "B"}, {"dim", 2}}},
      {"kraus",
       {Json{{"re", {{r, 0.0}, {0.0, 0.0}}}},
        Json{{"re", {{0.0, 0.0}, {r, 0.0}}}},
        Json{{"re", {{0.0, 0.0}, {0.0, 1.0}}}}}},
  };
  const ChoiChannel ch = channel_from_json(j);
  Matrix want = Matrix::Zero(4, 4);
  want(0, 0) = 0.25;
  want(1, 1) = 0.25;
  want(3, 3) = 0.50;
  REQUIRE((permute(ch.choi, {"A", "B"}).matrix() - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("channels round trip through the Choi form", "[json]") {
  Rng rng(502);
  const ChoiChannel ch = choi_from_kraus(random_channel(rng, {"A", 2}, {"B", 3}));
  const ChoiChannel back = channel_from_json(channel_to_json(ch));
  REQUIRE(back.in_labels == ch.in_labels);
  REQUIRE(back.out_labels == ch.out_labels);
  REQUIRE(max_abs_diff(back.choi, permute(ch.choi, back.choi.names())) < 1e-12);
}

TEST_CASE("invalid channel JSON raises typed errors", "[json]") {
  REQUIRE_THROWS_AS(channel_from_json(Json{{"in", Json::array()}}), ParseError);

  // Kraus operators that do not preserve the trace.
  const Json not_tp{
      {"in", {{"name", "A"}, {"dim", 2}}},
      {"out", {{"name", "B"}, {"dim", 2}}},
      {"kraus", {Json{{"re", {{1.0, 0.0}, {0.0, 0.0}}}}}},
  };
  REQUIRE_THROWS_AS(channel_from_json(not_tp), NotTracePreserving);

  // A Choi-form operator that is not a channel state.
  Json bad_choi = channel_to_json(
      choi_from_kraus(identity_channel({"A", 2}, {"B", 2})));
  bad_choi["choi"]["re"][0][0] = 0.9;
  REQUIRE_THROWS(channel_from_json(bad_choi));
}

TEST_CASE("combs round trip through JSON", "[json]") {
  const ProcessComb t = example_process();
  const ProcessComb back = comb_from_json(comb_to_json(t));
  REQUIRE(back.kind == CombKind::process);
  REQUIRE(back.teeth == t.teeth);
  REQUIRE(max_abs_diff(back.choi, permute(t.choi, back.choi.names())) < 1e-12);

  // Control combs keep their ancilla list.
  const ProcessComb s = choi_control_comb(t);
  const ProcessComb s_back = comb_from_json(comb_to_json(s));
  REQUIRE(s_back.kind == CombKind::control);
  REQUIRE(s_back.ancilla == s.ancilla);
  REQUIRE(max_abs_diff(s_back.choi, permute(s.choi, s_back.choi.names())) < 1e-12);
}

TEST_CASE("loading an invalid comb can be deferred to validation", "[json]") {
  // Entanglement with an intermediate wire: loads as data, fails checks.
  const LabeledOperator u = tensor(LabeledOperator::max_entangled({"A", 2}, {"C", 2}),
                                   LabeledOperator::maximally_mixed({{"B", 2}, {"D", 2}}));
  const ProcessComb witness{permute(u, {"A", "B", "C", "D"}),
                            {{"A", "B"}, {"C", "D"}},
                            CombKind::process,
                            {}};
  const Json j = comb_to_json(witness);

  REQUIRE_THROWS_AS(comb_from_json(j), NotACombChoi);
  const ProcessComb loose = comb_from_json(j, false);
  REQUIRE_FALSE(validate_comb(loose).pass());
}

TEST_CASE("values round trip including infinity", "[json]") {
  REQUIRE(value_from_json(value_to_json(1.25)) == 1.25);
  REQUIRE(std::isinf(value_from_json(value_to_json(infinity()))));
  const Json j = value_to_json(infinity());
  REQUIRE(j["finite"] == false);
}

TEST_CASE("operators and combs survive a disk round trip", "[json]") {
  const std::string path = "/tmp/combdiv_test_io.json";

  const ProcessComb t = example_process();
  save_json(path, comb_to_json(t));
  const ProcessComb back = load_comb(path);
  REQUIRE(max_abs_diff(back.choi, permute(t.choi, back.choi.names())) < 1e-12);

  Rng rng(503);
  const ChoiChannel ch = choi_from_kraus(random_channel(rng, {"A", 2}, {"B", 2}));
  save_json(path, channel_to_json(ch));
  const ChoiChannel ch_back = load_channel(path);
  REQUIRE(max_abs_diff(ch_back.choi, permute(ch.choi, ch_back.choi.names())) < 1e-12);

  const LabeledOperator x = random_density_operator(rng, {{"Q", 3}});
  save_json(path, operator_to_json(x));
  REQUIRE(max_abs_diff(load_operator(path), x) < 1e-14);

  std::remove(path.c_str());
  REQUIRE_THROWS_AS(load_json(path), ParseError);
}
