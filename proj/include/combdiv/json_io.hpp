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

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "combdiv/channel.hpp"
#include "combdiv/comb.hpp"

namespace combdiv {

using Json = nlohmann::json;

//=========================================================================
// Labeled operators
//
//   {
//     "subsystems": [{"name": "A", "dim": 2}, ...],
//     "re": [[...], ...],
//     "im": [[...], ...]          // optional, defaults to zero
//   }
//=========================================================================

inline Json matrix_to_json(const Matrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row_re = Json::array(), row_im = Json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row_re.push_back(m(r, c).real());
      row_im.push_back(m(r, c).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.contains("re")) throw ParseError("matrix needs a \"re\" field");
  const Json& re = j.at("re");
  if (!re.is_array() || re.empty()) throw ParseError("matrix \"re\" must be a non-empty array of rows");
  const std::size_t rows = re.size();
  const std::size_t cols = re.front().size();
  Matrix m(rows, cols);
  auto fill = [&](const Json& part, bool imag) {
    if (part.size() != rows) throw ParseError("matrix parts have mismatched row counts");
    for (std::size_t r = 0; r < rows; ++r) {
      const Json& row = part.at(r);
      if (!row.is_array() || row.size() != cols) throw ParseError("matrix rows have mismatched lengths");
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = row.at(c).get<double>();
        if (imag)
          m(r, c) += Complex(0.0, v);
        else
          m(r, c) = Complex(v, 0.0);
      }
    }
  };
  fill(re, false);
  if (j.contains("im")) fill(j.at("im"), true);
  return m;
}

inline Json operator_to_json(const LabeledOperator& x) {
  Json subs = Json::array();
  for (const auto& s : x.subsystems()) subs.push_back(Json{{"name", s.name}, {"dim", s.dim}});
  Json j = matrix_to_json(x.matrix());
  j["subsystems"] = std::move(subs);
  return j;
}

inline LabeledOperator operator_from_json(const Json& j) {
  if (!j.contains("subsystems")) throw ParseError("operator needs a \"subsystems\" field");
  Subsystems subs;
  for (const Json& s : j.at("subsystems")) {
    if (!s.contains("name") || !s.contains("dim"))
      throw ParseError("each subsystem needs \"name\" and \"dim\"");
    subs.push_back({s.at("name").get<std::string>(), s.at("dim").get<Index>()});
  }
  Matrix m = matrix_from_json(j);
  if (m.rows() != m.cols() || m.rows() != total_dim(subs))
    throw ParseError("matrix shape does not match the subsystem dimensions");
  return LabeledOperator(std::move(subs), std::move(m));
}

//=========================================================================
// Channels
//
// Kraus form:
//   {"in": {"name": "A", "dim": 2}, "out": {"name": "B", "dim": 2},
//    "kraus": [{"re": [[...]], "im": [[...]]}, ...]}
// Choi form:
//   {"in": ["A"], "out": ["B"], "choi": {operator}}
//=========================================================================

inline Json channel_to_json(const ChoiChannel& ch) {
  Json j;
  j["in"] = ch.in_labels;
  j["out"] = ch.out_labels;
  j["choi"] = operator_to_json(ch.choi);
  return j;
}

inline ChoiChannel channel_from_json(const Json& j) {
  if (j.contains("kraus")) {
    if (!j.contains("in") || !j.contains("out"))
      throw ParseError("a Kraus channel needs \"in\" and \"out\" subsystems");
    auto label = [](const Json& s) -> SubsystemLabel {
      return {s.at("name").get<std::string>(), s.at("dim").get<Index>()};
    };
    KrausChannel kc{{}, label(j.at("in")), label(j.at("out"))};
    for (const Json& k : j.at("kraus")) kc.kraus.push_back(matrix_from_json(k));
    check_kraus_channel(kc);
    return choi_from_kraus(kc);
  }
  if (!j.contains("choi")) throw ParseError("a channel needs either \"kraus\" or \"choi\"");
  ChoiChannel ch{operator_from_json(j.at("choi")),
                 j.at("in").get<std::vector<std::string>>(),
                 j.at("out").get<std::vector<std::string>>()};
  require_valid_choi_channel(ch, "channel from JSON");
  return ch;
}

//=========================================================================
// Process and control combs: an operator plus the teeth, e.g.
//
//   {"subsystems": [...], "re": [[...]],
//    "teeth": [["A", "B"], ["C", "D"]],
//    "kind": "process",            // optional, default "process"
//    "ancilla": ["R"]}             // optional, control combs only
//=========================================================================

inline Json comb_to_json(const ProcessComb& t) {
  Json j = operator_to_json(t.choi);
  Json teeth = Json::array();
  for (const auto& tooth : t.teeth) teeth.push_back(Json::array({tooth.in, tooth.out}));
  j["teeth"] = std::move(teeth);
  j["kind"] = t.kind == CombKind::process ? "process" : "control";
  if (!t.ancilla.empty()) j["ancilla"] = t.ancilla;
  return j;
}

inline ProcessComb comb_from_json(const Json& j, bool validate = true) {
  LabeledOperator choi = operator_from_json(j);
  if (!j.contains("teeth")) throw ParseError("a comb needs a \"teeth\" field");
  Teeth teeth;
  for (const Json& pair : j.at("teeth")) {
    if (!pair.is_array() || pair.size() != 2)
      throw ParseError("each tooth must be an [input, output] pair");
    teeth.push_back({pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
  }
  CombKind kind = CombKind::process;
  if (j.contains("kind")) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "process")
      kind = CombKind::process;
    else if (k == "control")
      kind = CombKind::control;
    else
      throw ParseError("comb \"kind\" must be \"process\" or \"control\"");
  }
  std::vector<std::string> ancilla;
  if (j.contains("ancilla")) ancilla = j.at("ancilla").get<std::vector<std::string>>();
  ProcessComb comb{std::move(choi), std::move(teeth), kind, std::move(ancilla)};
  if (validate) require_valid_comb(comb, "comb from JSON");
  return comb;
}

//=========================================================================
// Scalar results: infinities serialize as the string "inf"
//=========================================================================

inline Json value_to_json(double v) {
  Json j;
  if (std::isinf(v)) {
    j["value"] = "inf";
    j["finite"] = false;
  } else {
    j["value"] = v;
    j["finite"] = true;
  }
  return j;
}

inline double value_from_json(const Json& j) {
  const Json& v = j.is_object() ? j.at("value") : j;
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return infinity();
    throw ParseError("value string must be \"inf\"");
  }
  return v.get<double>();
}

//=========================================================================
// File helpers
//=========================================================================

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

inline LabeledOperator load_operator(const std::string& path) {
  try {
    return operator_from_json(load_json(path));
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline ChoiChannel load_channel(const std::string& path) {
  try {
    return channel_from_json(load_json(path));
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline ProcessComb load_comb(const std::string& path) {
  try {
    return comb_from_json(load_json(path));
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace combdiv
