#include "soctat/merge.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace soctat {

namespace {

// Universe index of a fault (s-a-0; s-a-1 is +1) keyed by line, built the
// same way enumerate_faults lays the universe out. Observation branches
// are keyed by their view-output index.
struct LineIndex {
  std::unordered_map<NetId, std::uint32_t> stem;
  std::unordered_map<std::uint64_t, std::uint32_t> branch;
  std::unordered_map<std::int32_t, std::uint32_t> tap;

  static std::uint64_t key(std::int32_t gate, std::int32_t pin) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(gate)) << 32) |
           static_cast<std::uint32_t>(pin);
  }

  explicit LineIndex(const std::vector<Fault>& universe) {
    for (std::uint32_t i = 0; i < universe.size(); i += 2) {
      const FaultSite& s = universe[i].site;
      if (s.is_stem())
        stem.emplace(s.net, i);
      else if (s.is_branch())
        branch.emplace(key(s.load_gate, s.pin), i);
      else
        tap.emplace(s.pin, i);
    }
  }
};

}  // namespace

MergedCircuit merge_cluster(const std::vector<const ScanView*>& members,
                            const std::vector<std::string>& ids,
                            std::string name) {
  if (members.empty())
    throw std::invalid_argument("merge_cluster needs at least one member");
  if (ids.size() != members.size())
    throw std::invalid_argument("one id per member is required");

  MergedCircuit mc;
  mc.name = std::move(name);
  mc.member_ids = ids;
  for (const ScanView* m : members)
    mc.ci = std::max(mc.ci, m->inputs.size());

  auto circuit = std::make_unique<Circuit>();
  Circuit& c = *circuit;
  c.name = mc.name;
  for (std::size_t j = 0; j < mc.ci; ++j) {
    c.net_names.push_back("si" + std::to_string(j));
    c.driver.push_back(-1);
    c.inputs.push_back(static_cast<NetId>(j));
  }

  std::vector<std::vector<NetId>> net_map(members.size());
  // Gate index ranges per member, for mapping merged branch faults back.
  std::vector<std::size_t> gate_base(members.size() + 1, 0);

  for (std::size_t k = 0; k < members.size(); ++k) {
    const ScanView& mv = *members[k];
    const Circuit& mcirc = *mv.circuit;
    std::vector<NetId>& map = net_map[k];
    map.assign(mcirc.net_count(), static_cast<NetId>(-1));
    for (std::size_t i = 0; i < mv.inputs.size(); ++i)
      map[mv.inputs[i]] = static_cast<NetId>(i);
    std::string prefix = "m" + std::to_string(k) + "_";
    for (GateId gi = 0; gi < mcirc.gates.size(); ++gi) {
      const Gate& g = mcirc.gates[gi];
      if (g.kind == GateKind::Dff) continue;
      if (map[g.out] == static_cast<NetId>(-1)) {
        map[g.out] = static_cast<NetId>(c.net_names.size());
        c.net_names.push_back(prefix + mcirc.net_name(g.out));
        c.driver.push_back(-1);
      }
    }
    gate_base[k] = c.gates.size();
    for (GateId gi = 0; gi < mcirc.gates.size(); ++gi) {
      const Gate& g = mcirc.gates[gi];
      if (g.kind == GateKind::Dff) continue;
      Gate ng;
      ng.kind = g.kind;
      ng.out = map[g.out];
      for (NetId in : g.in) ng.in.push_back(map[in]);
      c.driver[ng.out] = static_cast<std::int32_t>(c.gates.size());
      c.gates.push_back(std::move(ng));
    }
    gate_base[k + 1] = c.gates.size();

    mc.input_map.push_back(std::vector<NetId>(mv.inputs.size()));
    for (std::size_t i = 0; i < mv.inputs.size(); ++i)
      mc.input_map[k][i] = static_cast<NetId>(i);

    std::size_t lo = mc.view.outputs.size();
    for (NetId o : mv.outputs) mc.view.outputs.push_back(map[o]);
    mc.output_range.push_back({lo, mc.view.outputs.size()});
  }

  // The owned circuit keeps a duplicate-free output list so it can be
  // serialized and re-parsed; the view keeps full multiplicity.
  {
    std::vector<bool> seen(c.net_names.size(), false);
    for (NetId o : mc.view.outputs)
      if (!seen[o]) {
        seen[o] = true;
        c.outputs.push_back(o);
      }
  }

  ScanView base = scan_view(c);
  mc.view.circuit = base.circuit;
  mc.view.inputs = std::move(base.inputs);
  mc.view.n_pis = mc.view.inputs.size();
  mc.view.n_pos = mc.view.outputs.size();
  mc.view.schedule = std::move(base.schedule);
  mc.view.level = std::move(base.level);

  mc.circuit_ = std::move(circuit);
  mc.view.circuit = mc.circuit_.get();

  // Fault lists and the merged -> member fault correspondence.
  std::vector<Fault> merged_universe = enumerate_faults(mc.view);
  mc.faults = collapse(mc.view, merged_universe);
  mc.fault_origin.assign(mc.faults.size(), {});

  std::vector<std::vector<Fault>> member_universe(members.size());
  std::vector<std::vector<int>> member_fo(members.size());
  std::vector<LineIndex> member_lines;
  member_lines.reserve(members.size());
  std::vector<std::vector<GateId>> member_comb(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    member_universe[k] = enumerate_faults(*members[k]);
    mc.member_faults.push_back(collapse(*members[k], member_universe[k]));
    member_fo[k] = line_loads(*members[k]);
    member_lines.emplace_back(member_universe[k]);
    const Circuit& mcirc = *members[k]->circuit;
    for (GateId gi = 0; gi < mcirc.gates.size(); ++gi)
      if (mcirc.gates[gi].kind != GateKind::Dff) member_comb[k].push_back(gi);
  }

  // Which member does a merged net/gate belong to?
  auto member_of_gate = [&](std::int32_t gate) {
    std::size_t k = 0;
    while (gate_base[k + 1] <= static_cast<std::size_t>(gate)) ++k;
    return k;
  };

  // Reverse net map: merged internal net -> (member, member net).
  std::vector<std::pair<std::uint32_t, NetId>> net_owner(
      c.net_count(), {static_cast<std::uint32_t>(-1), 0});
  for (std::size_t k = 0; k < members.size(); ++k)
    for (NetId mn = 0; mn < net_map[k].size(); ++mn) {
      NetId merged = net_map[k][mn];
      if (merged == static_cast<NetId>(-1) || merged < mc.ci) continue;
      net_owner[merged] = {static_cast<std::uint32_t>(k), mn};
    }

  auto add_origin = [&](FaultId merged_rep, std::size_t k,
                        std::uint32_t member_universe_idx) {
    FaultId r = mc.member_faults[k].rep_of[member_universe_idx];
    mc.fault_origin[merged_rep].push_back(
        {static_cast<std::uint32_t>(k), r});
  };

  for (std::uint32_t u = 0; u < merged_universe.size(); ++u) {
    const Fault& f = merged_universe[u];
    FaultId rep = mc.faults.rep_of[u];
    if (f.site.is_stem()) {
      if (f.site.net < mc.ci) {
        // Shared input stem: one origin per member wide enough to use it.
        for (std::size_t k = 0; k < members.size(); ++k) {
          if (f.site.net >= members[k]->inputs.size()) continue;
          NetId mn = members[k]->inputs[f.site.net];
          add_origin(rep, k, member_lines[k].stem.at(mn) + f.stuck);
        }
      } else {
        auto [k, mn] = net_owner[f.site.net];
        add_origin(rep, k, member_lines[k].stem.at(mn) + f.stuck);
      }
    } else if (f.site.is_tap()) {
      // Merged view outputs are the members' outputs back to back, so the
      // tap index itself says which member observes this line.
      std::size_t k = 0;
      while (mc.output_range[k].second <= static_cast<std::size_t>(f.site.pin))
        ++k;
      std::int32_t j =
          static_cast<std::int32_t>(f.site.pin - mc.output_range[k].first);
      NetId mn = members[k]->outputs[j];
      std::uint32_t member_idx;
      if (member_fo[k][mn] >= 2)
        member_idx = member_lines[k].tap.at(j);
      else
        member_idx = member_lines[k].stem.at(mn);
      add_origin(rep, k, member_idx + f.stuck);
    } else {
      std::size_t k = member_of_gate(f.site.load_gate);
      // Gate copies skip DFFs, so map back through the member's comb list.
      GateId orig = member_comb[k][f.site.load_gate - gate_base[k]];
      const Circuit& mcirc = *members[k]->circuit;
      NetId mn = mcirc.gates[orig].in[f.site.pin];
      std::uint32_t member_idx;
      if (member_fo[k][mn] >= 2)
        member_idx = member_lines[k].branch.at(
            LineIndex::key(static_cast<std::int32_t>(orig), f.site.pin));
      else
        member_idx = member_lines[k].stem.at(mn);
      add_origin(rep, k, member_idx + f.stuck);
    }
  }

  for (auto& origin : mc.fault_origin) {
    std::sort(origin.begin(), origin.end());
    origin.erase(std::unique(origin.begin(), origin.end()), origin.end());
  }
  return mc;
}

SharedTestResult shared_test_set(MergedCircuit& mc, const AtpgConfig& cfg) {
  SharedTestResult res;
  res.tests = generate_test_set(mc.view, mc.faults, cfg);
  for (std::size_t k = 0; k < mc.member_faults.size(); ++k)
    for (FaultStatus& s : mc.member_faults[k].status)
      if (s == FaultStatus::Detected) s = FaultStatus::Undetected;
  for (FaultId rep = 0; rep < mc.faults.size(); ++rep) {
    if (mc.faults.status[rep] != FaultStatus::Detected) continue;
    for (auto [k, r] : mc.fault_origin[rep])
      mc.member_faults[k].status[r] = FaultStatus::Detected;
  }
  for (const FaultList& fl : mc.member_faults) {
    res.member_detected.push_back(fl.count(FaultStatus::Detected));
    res.member_fc.push_back(fl.coverage());
  }
  return res;
}

}  // namespace soctat
