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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "combdiv/comb.hpp"

namespace combdiv {

//=========================================================================
// Superprocesses
//=========================================================================

// A transformation of process combs, stored in factored form as a list
// of slot channels: each slot is itself a valid channel in Choi form,
// wired by label names. Labels shared with a process comb's teeth are
// contracted away; labels shared between two slots act as memory wires;
// the remaining labels form the transformed comb's teeth. Acting on a
// comb is just a chain of link products, and because the link product is
// associative the very same slot list acts in reverse on control
// strategies - that re-association is the duality this type exists for.
struct Superprocess {
  std::vector<ChoiChannel> slots;
  Teeth in_teeth;   // teeth of combs this superprocess accepts
  Teeth out_teeth;  // teeth of combs it produces
  bool iqi = false;              // slots never share memory across teeth
  bool coarse_graining = false;  // merges adjacent teeth via identity junctions
};

// Builds a superprocess and checks its wiring: every accepted-comb label
// and every produced-comb label must touch exactly one slot, and every
// internal memory label exactly two.
inline Superprocess make_superprocess(std::vector<ChoiChannel> slots, Teeth in_teeth, Teeth out_teeth,
                                      bool iqi = false, bool coarse_graining = false) {
  std::map<std::string, int> uses;
  std::map<std::string, Index> dims;
  for (const auto& slot : slots)
    for (const auto& s : slot.choi.subsystems()) {
      ++uses[s.name];
      auto it = dims.find(s.name);
      if (it != dims.end() && it->second != s.dim)
        throw DimensionMismatch("label '" + s.name + "' has inconsistent dimensions across slots");
      dims[s.name] = s.dim;
    }

  auto expect = [&](const std::string& name, int count, const std::string& role) {
    auto it = uses.find(name);
    if (it == uses.end() || it->second != count)
      throw ShapeMismatch("superprocess wiring: " + role + " label '" + name + "' must touch exactly " +
                          std::to_string(count) + " slot(s)");
    it->second = 0;  // consume
  };
  for (const auto& t : in_teeth) {
    expect(t.in, 1, "accepted-tooth");
    expect(t.out, 1, "accepted-tooth");
  }
  for (const auto& t : out_teeth) {
    expect(t.in, 1, "produced-tooth");
    expect(t.out, 1, "produced-tooth");
  }
  for (const auto& [name, count] : uses)
    if (count != 0 && count != 2)
      throw ShapeMismatch("superprocess wiring: memory label '" + name + "' must touch exactly two slots");

  return Superprocess{std::move(slots), std::move(in_teeth), std::move(out_teeth), iqi, coarse_graining};
}

//=========================================================================
// Action on process combs
//=========================================================================

inline ProcessComb apply_superprocess(const Superprocess& z, const ProcessComb& t) {
  if (t.kind != CombKind::process) throw ShapeMismatch("apply_superprocess expects a process comb");
  if (!(t.teeth == z.in_teeth)) throw ShapeMismatch("comb teeth do not match the superprocess");

  LabeledOperator acc = t.choi;
  for (const auto& slot : z.slots) acc = link_product(acc, slot.choi);

  std::vector<std::string> order;
  for (const auto& tooth : z.out_teeth) {
    order.push_back(tooth.in);
    order.push_back(tooth.out);
  }
  ProcessComb out{permute(acc, order), z.out_teeth, CombKind::process, {}};
  require_valid_comb(out, "superprocess output");
  return out;
}

//=========================================================================
// Dual action on control strategies
//=========================================================================

// Pulls a control strategy for the transformed shape back to one for the
// original shape by contracting it with the same slot list. The defining
// identity, for every process comb t and strategy s,
//
//   contract(apply_superprocess(z, t), s) == contract(t, dual_superprocess(z, s))
//
// holds because both sides are the same multi-factor contraction,
// associated differently. The pulled-back strategy may also carry the
// original comb's final output wire (it post-processes it) - contract()
// and validate_comb() handle that case.
inline ProcessComb dual_superprocess(const Superprocess& z, const ProcessComb& s) {
  if (s.kind != CombKind::control) throw ShapeMismatch("dual_superprocess expects a control comb");
  if (!(s.teeth == z.out_teeth)) throw ShapeMismatch("control comb teeth do not match the superprocess");

  LabeledOperator acc = s.choi;
  for (const auto& slot : z.slots) acc = link_product(acc, slot.choi);

  // Canonical order: the original teeth labels that survived, then
  // everything else (ancilla plus any transformed-output leftovers).
  std::vector<std::string> order;
  std::vector<std::string> extras;
  for (const auto& tooth : z.in_teeth) {
    if (acc.has_label(tooth.in)) order.push_back(tooth.in);
    if (acc.has_label(tooth.out)) order.push_back(tooth.out);
  }
  for (const auto& name : acc.names())
    if (std::find(order.begin(), order.end(), name) == order.end()) {
      order.push_back(name);
      extras.push_back(name);
    }
  return ProcessComb{permute(acc, order), z.in_teeth, CombKind::control, std::move(extras)};
}

//=========================================================================
// Coarse graining
//=========================================================================

// Merges tooth `at` with tooth `at + 1` (1-based) by feeding the earlier
// output straight into the later input. Implemented as a direct index
// contraction; the slot-based superprocess below must agree with it.
inline ProcessComb coarse_grain(const ProcessComb& t, std::size_t at) {
  if (t.kind != CombKind::process) throw ShapeMismatch("coarse_grain expects a process comb");
  if (at < 1 || at + 1 > t.teeth.size())
    throw BadStepIndex("cannot merge teeth " + std::to_string(at) + " and " + std::to_string(at + 1) +
                       " of a " + std::to_string(t.teeth.size()) + "-tooth comb");
  const std::string& mid_out = t.teeth[at - 1].out;
  const std::string& mid_in = t.teeth[at].in;
  const Index d = t.choi.dim_of(mid_out);
  if (d != t.choi.dim_of(mid_in))
    throw DimensionMismatch("cannot identify wires of different dimensions");

  const Subsystems& subs = t.choi.subsystems();
  const auto st = detail::strides(subs);
  const std::size_t po = t.choi.position(mid_out);
  const std::size_t pi = t.choi.position(mid_in);

  Subsystems kept_subs;
  std::vector<std::size_t> kept_pos;
  for (std::size_t j = 0; j < subs.size(); ++j)
    if (j != po && j != pi) {
      kept_subs.push_back(subs[j]);
      kept_pos.push_back(j);
    }
  const Index dk = total_dim(kept_subs);
  const auto kst = detail::strides(kept_subs);

  std::vector<Index> base(dk, 0);
  {
    std::vector<Index> dig;
    for (Index i = 0; i < dk; ++i) {
      detail::digits_of(i, kept_subs, kst, dig);
      Index off = 0;
      for (std::size_t j = 0; j < kept_pos.size(); ++j) off += dig[j] * st[kept_pos[j]];
      base[i] = off;
    }
  }

  // Entry (r, c) of the merged comb sums the original entries with the
  // identified wires set equal on each side, scaled by the wire
  // dimension - the junction wire is read out in the entangled basis.
  Matrix out = Matrix::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r)
    for (Index c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (Index x = 0; x < d; ++x)
        for (Index xp = 0; xp < d; ++xp)
          acc += t.choi.matrix()(base[r] + x * st[po] + x * st[pi], base[c] + xp * st[po] + xp * st[pi]);
      out(r, c) = static_cast<double>(d) * acc;
    }

  Teeth teeth;
  for (std::size_t k = 0; k + 1 < at; ++k) teeth.push_back(t.teeth[k]);
  teeth.push_back({t.teeth[at - 1].in, t.teeth[at].out});
  for (std::size_t k = at + 1; k < t.teeth.size(); ++k) teeth.push_back(t.teeth[k]);

  std::vector<std::string> order;
  for (const auto& tooth : teeth) {
    order.push_back(tooth.in);
    order.push_back(tooth.out);
  }
  return ProcessComb{permute(LabeledOperator(std::move(kept_subs), std::move(out)), order), std::move(teeth),
                     CombKind::process, {}};
}

//=========================================================================
// Stock superprocesses
//=========================================================================

namespace detail {

inline ChoiChannel identity_slot(const std::string& in, const std::string& out, Index d) {
  return ChoiChannel{LabeledOperator::max_entangled({in, d}, {out, d}), {in}, {out}};
}

}  // namespace detail

// Identity transformation with relabelled teeth (oldname -> old name +
// "'"): every wire passes through an identity channel slot.
inline Superprocess identity_superprocess(const ProcessComb& t) {
  std::vector<ChoiChannel> slots;
  Teeth out_teeth;
  for (const auto& tooth : t.teeth) {
    const std::string pin = detail::copy_label(tooth.in);
    const std::string pout = detail::copy_label(tooth.out);
    slots.push_back(detail::identity_slot(pin, tooth.in, t.choi.dim_of(tooth.in)));
    slots.push_back(detail::identity_slot(tooth.out, pout, t.choi.dim_of(tooth.out)));
    out_teeth.push_back({pin, pout});
  }
  return make_superprocess(std::move(slots), t.teeth, std::move(out_teeth), /*iqi=*/true);
}

// Independent per-tooth transformation: for each tooth, a pre-processing
// channel into the tooth input and a post-processing channel out of the
// tooth output, possibly sharing a within-tooth memory label. No memory
// crosses between teeth.
inline Superprocess iqi_superprocess(const ProcessComb& t,
                                     const std::vector<std::pair<ChoiChannel, ChoiChannel>>& tooth_ops) {
  if (tooth_ops.size() != t.teeth.size())
    throw ShapeMismatch("need exactly one (pre, post) pair per tooth");
  std::vector<ChoiChannel> slots;
  Teeth out_teeth;
  for (std::size_t k = 0; k < t.teeth.size(); ++k) {
    const auto& [pre, post] = tooth_ops[k];
    if (pre.out_labels.empty() || pre.out_labels.front() != t.teeth[k].in)
      throw ShapeMismatch("pre-processing of tooth " + std::to_string(k + 1) +
                          " must output the tooth input label first");
    if (post.in_labels.empty() || post.in_labels.front() != t.teeth[k].out)
      throw ShapeMismatch("post-processing of tooth " + std::to_string(k + 1) +
                          " must consume the tooth output label first");
    slots.push_back(pre);
    slots.push_back(post);
    out_teeth.push_back({pre.in_labels.front(), post.out_labels.front()});
  }
  return make_superprocess(std::move(slots), t.teeth, std::move(out_teeth), /*iqi=*/true);
}

// Slot form of coarse graining: identity channels on all surviving
// wires, plus an identity junction feeding tooth `at`'s output straight
// into tooth `at + 1`'s input. Same map as coarse_grain(), by a
// different code path, with relabelled surviving wires.
inline Superprocess coarse_graining_superprocess(const ProcessComb& t, std::size_t at) {
  if (at < 1 || at + 1 > t.teeth.size())
    throw BadStepIndex("cannot merge teeth " + std::to_string(at) + " and " + std::to_string(at + 1) +
                       " of a " + std::to_string(t.teeth.size()) + "-tooth comb");
  std::vector<ChoiChannel> slots;
  Teeth out_teeth;
  auto pass_in = [&](const std::string& name) {
    const std::string p = detail::copy_label(name);
    slots.push_back(detail::identity_slot(p, name, t.choi.dim_of(name)));
    return p;
  };
  auto pass_out = [&](const std::string& name) {
    const std::string p = detail::copy_label(name);
    slots.push_back(detail::identity_slot(name, p, t.choi.dim_of(name)));
    return p;
  };
  for (std::size_t k = 0; k < t.teeth.size(); ++k) {
    if (k == at - 1) {
      const std::string pin = pass_in(t.teeth[k].in);
      const std::string pout = pass_out(t.teeth[k + 1].out);
      const std::string& jout = t.teeth[k].out;
      const std::string& jin = t.teeth[k + 1].in;
      if (t.choi.dim_of(jout) != t.choi.dim_of(jin))
        throw DimensionMismatch("cannot identify wires of different dimensions");
      slots.push_back(ChoiChannel{
          LabeledOperator::max_entangled({jout, t.choi.dim_of(jout)}, {jin, t.choi.dim_of(jin)}),
          {jout},
          {jin}});
      out_teeth.push_back({pin, pout});
      ++k;  // tooth at+1 is absorbed
    } else {
      out_teeth.push_back({pass_in(t.teeth[k].in), pass_out(t.teeth[k].out)});
    }
  }
  return make_superprocess(std::move(slots), t.teeth, std::move(out_teeth), /*iqi=*/false,
                           /*coarse_graining=*/true);
}

// Random memory-carrying superprocess: a chain of random channels
// threaded through dedicated memory wires, one pre and one post slot per
// tooth. Exercises the fully general wiring.
inline Superprocess random_threaded_superprocess(Rng& rng, const ProcessComb& t, Index mem_dim = 2) {
  const std::size_t n = t.teeth.size();
  std::vector<ChoiChannel> slots;
  Teeth out_teeth;
  std::string prev_mem;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string pin = detail::copy_label(t.teeth[k].in);
    const std::string pout = detail::copy_label(t.teeth[k].out);
    const Index di = t.choi.dim_of(t.teeth[k].in);
    const Index dj = t.choi.dim_of(t.teeth[k].out);
    const std::string mem_out = "@g" + std::to_string(k + 1);

    // pre slot: (primed input [+ incoming memory]) -> (tooth input x memory)
    {
      Index d_in = di;
      std::vector<std::string> ins{pin};
      if (!prev_mem.empty()) {
        d_in *= mem_dim;
        ins.push_back(prev_mem);
      }
      const SubsystemLabel flat_in{"@li", d_in};
      const SubsystemLabel flat_out{"@lo", di * mem_dim};
      KrausChannel kc = random_channel(rng, flat_in, flat_out, /*env_dim=*/2);
      ChoiChannel cc = choi_from_kraus(kc);
      LabeledOperator op = cc.choi;
      Subsystems in_parts;
      in_parts.push_back({pin, di});
      if (!prev_mem.empty()) in_parts.push_back({prev_mem, mem_dim});
      op = split_label(op, flat_in.name, in_parts);
      op = split_label(op, flat_out.name, {{t.teeth[k].in, di}, {mem_out, mem_dim}});
      slots.push_back(ChoiChannel{std::move(op), ins, {t.teeth[k].in, mem_out}});
    }

    // post slot: (tooth output x memory) -> (primed output [+ outgoing memory])
    {
      const bool last = (k + 1 == n);
      const Index d_out = last ? dj : dj * mem_dim;
      const std::string next_mem = "@m" + std::to_string(k + 1);
      const SubsystemLabel flat_in{"@li", dj * mem_dim};
      const SubsystemLabel flat_out{"@lo", d_out};
      KrausChannel kc = random_channel(rng, flat_in, flat_out, /*env_dim=*/2);
      ChoiChannel cc = choi_from_kraus(kc);
      LabeledOperator op = cc.choi;
      op = split_label(op, flat_in.name, {{t.teeth[k].out, dj}, {mem_out, mem_dim}});
      Subsystems out_parts;
      out_parts.push_back({pout, dj});
      std::vector<std::string> outs{pout};
      if (!last) {
        out_parts.push_back({next_mem, mem_dim});
        outs.push_back(next_mem);
      }
      op = split_label(op, flat_out.name, out_parts);
      slots.push_back(ChoiChannel{std::move(op), {t.teeth[k].out, mem_out}, outs});
      prev_mem = last ? "" : next_mem;
    }
    out_teeth.push_back({pin, pout});
  }
  return make_superprocess(std::move(slots), t.teeth, std::move(out_teeth));
}

}  // namespace combdiv
