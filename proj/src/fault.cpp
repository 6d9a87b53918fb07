#include "soctat/fault.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace soctat {

const char* to_string(FaultStatus s) {
  switch (s) {
    case FaultStatus::Undetected: return "UNDETECTED";
    case FaultStatus::Detected: return "DETECTED";
    case FaultStatus::Untestable: return "UNTESTABLE";
    case FaultStatus::Aborted: return "ABORTED";
  }
  return "?";
}

std::size_t FaultList::count(FaultStatus s) const {
  return static_cast<std::size_t>(
      std::count(status.begin(), status.end(), s));
}

double FaultList::coverage() const {
  if (reps.empty()) return 100.0;
  return 100.0 * static_cast<double>(count(FaultStatus::Detected)) /
         static_cast<double>(reps.size());
}

std::vector<int> line_loads(const ScanView& v) {
  const Circuit& c = *v.circuit;
  std::vector<int> fo(c.net_count(), 0);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Dff) continue;
    for (NetId in : g.in) ++fo[in];
  }
  for (NetId n : v.outputs) ++fo[n];
  return fo;
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller index wins so representatives are stable.
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

}  // namespace

std::vector<Fault> enumerate_faults(const ScanView& v) {
  const Circuit& c = *v.circuit;
  std::vector<int> fo = line_loads(v);
  std::vector<Fault> u;

  auto add_line = [&u](FaultSite s) {
    u.push_back({s, 0});
    u.push_back({s, 1});
  };

  for (NetId n : v.inputs) add_line({n, FaultSite::kStemGate, 0});
  for (GateId gi = 0; gi < c.gates.size(); ++gi)
    if (c.gates[gi].kind != GateKind::Dff)
      add_line({c.gates[gi].out, FaultSite::kStemGate, 0});
  for (GateId gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    if (g.kind == GateKind::Dff) continue;
    for (std::size_t p = 0; p < g.in.size(); ++p)
      if (fo[g.in[p]] >= 2)
        add_line({g.in[p], static_cast<std::int32_t>(gi),
                  static_cast<std::int32_t>(p)});
  }
  for (std::size_t j = 0; j < v.outputs.size(); ++j)
    if (fo[v.outputs[j]] >= 2)
      add_line({v.outputs[j], FaultSite::kTapGate,
                static_cast<std::int32_t>(j)});
  return u;
}

FaultList collapse(const ScanView& v, const std::vector<Fault>& universe) {
  const Circuit& c = *v.circuit;
  std::vector<int> fo = line_loads(v);

  // Universe index of each line's s-a-0 fault; s-a-1 follows it.
  // Observation branches never join an equivalence rule, so only stems and
  // gate branches need lookup.
  std::unordered_map<NetId, std::uint32_t> stem_at;
  std::unordered_map<std::uint64_t, std::uint32_t> branch_at;
  auto branch_key = [](std::int32_t gate, std::int32_t pin) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(gate)) << 32) |
           static_cast<std::uint32_t>(pin);
  };
  for (std::uint32_t i = 0; i < universe.size(); i += 2) {
    const FaultSite& s = universe[i].site;
    if (s.is_stem())
      stem_at.emplace(s.net, i);
    else if (s.is_branch())
      branch_at.emplace(branch_key(s.load_gate, s.pin), i);
  }

  // The line a gate's input pin lives on: its branch when one exists,
  // the stem otherwise.
  auto pin_line = [&](GateId gi, std::size_t p) -> std::uint32_t {
    NetId n = c.gates[gi].in[p];
    if (fo[n] >= 2)
      return branch_at.at(
          branch_key(static_cast<std::int32_t>(gi), static_cast<std::int32_t>(p)));
    return stem_at.at(n);
  };

  UnionFind uf(universe.size());
  for (GateId gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    if (g.kind == GateKind::Dff) continue;
    std::uint32_t out0 = stem_at.at(g.out);  // s-a-0; s-a-1 is out0 + 1
    switch (g.kind) {
      case GateKind::And:
        for (std::size_t p = 0; p < g.in.size(); ++p)
          uf.unite(out0, pin_line(gi, p));
        break;
      case GateKind::Nand:
        for (std::size_t p = 0; p < g.in.size(); ++p)
          uf.unite(out0 + 1, pin_line(gi, p));
        break;
      case GateKind::Or:
        for (std::size_t p = 0; p < g.in.size(); ++p)
          uf.unite(out0 + 1, pin_line(gi, p) + 1);
        break;
      case GateKind::Nor:
        for (std::size_t p = 0; p < g.in.size(); ++p)
          uf.unite(out0, pin_line(gi, p) + 1);
        break;
      case GateKind::Not:
        uf.unite(out0, pin_line(gi, 0) + 1);
        uf.unite(out0 + 1, pin_line(gi, 0));
        break;
      case GateKind::Buff:
        uf.unite(out0, pin_line(gi, 0));
        uf.unite(out0 + 1, pin_line(gi, 0) + 1);
        break;
      case GateKind::Xor:
      case GateKind::Xnor:
      case GateKind::Dff:
        break;
    }
  }

  FaultList fl;
  fl.universe_size = universe.size();
  fl.rep_of.resize(universe.size());
  std::unordered_map<std::uint32_t, std::uint32_t> rep_index;
  for (std::uint32_t i = 0; i < universe.size(); ++i) {
    std::uint32_t root = uf.find(i);
    auto it = rep_index.find(root);
    if (it == rep_index.end()) {
      fl.rep_of[i] = static_cast<FaultId>(fl.reps.size());
      rep_index.emplace(root, static_cast<std::uint32_t>(fl.reps.size()));
      fl.reps.push_back(universe[i]);
      fl.members.push_back({universe[i]});
    } else {
      fl.rep_of[i] = it->second;
      fl.members[it->second].push_back(universe[i]);
    }
  }
  fl.status.assign(fl.reps.size(), FaultStatus::Undetected);
  return fl;
}

FaultList build_fault_list(const ScanView& v) {
  return collapse(v, enumerate_faults(v));
}

std::string fault_name(const ScanView& v, const Fault& f) {
  const Circuit& c = *v.circuit;
  std::string s = c.net_name(f.site.net);
  if (f.site.is_branch()) {
    s += '/';
    s += c.net_name(c.gates[f.site.load_gate].out);
    s += '.';
    s += std::to_string(f.site.pin);
  } else if (f.site.is_tap()) {
    s += "/OUT.";
    s += std::to_string(f.site.pin);
  }
  s += f.stuck ? " SA1" : " SA0";
  return s;
}

std::string export_faults(const ScanView& v, const FaultList& fl) {
  std::ostringstream out;
  for (std::size_t i = 0; i < fl.reps.size(); ++i)
    out << fault_name(v, fl.reps[i]) << ' ' << to_string(fl.status[i]) << '\n';
  return out.str();
}

}  // namespace soctat
