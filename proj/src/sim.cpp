#include "soctat/sim.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <queue>
#include <thread>

namespace soctat {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SOCTAT_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end && *end == '\0' && n >= 1) return static_cast<int>(std::min(n, 256l));
    return 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

PatternBlock pack_block(const std::vector<Pattern>& patterns,
                        std::size_t first, std::size_t count) {
  PatternBlock b;
  b.lane_count = static_cast<int>(count);
  if (count == 0) return b;
  std::size_t width = patterns[first].bits.size();
  b.in_words.assign(width, 0);
  for (std::size_t lane = 0; lane < count; ++lane) {
    const Pattern& p = patterns[first + lane];
    for (std::size_t i = 0; i < width; ++i)
      b.in_words[i] |= static_cast<std::uint64_t>(p.bits[i] & 1) << lane;
  }
  return b;
}

namespace {

std::uint64_t eval_gate(const Circuit& c, const Gate& g,
                        const std::uint64_t* val) {
  std::uint64_t w;
  switch (g.kind) {
    case GateKind::And:
    case GateKind::Nand:
      w = ~0ull;
      for (NetId in : g.in) w &= val[in];
      return g.kind == GateKind::Nand ? ~w : w;
    case GateKind::Or:
    case GateKind::Nor:
      w = 0;
      for (NetId in : g.in) w |= val[in];
      return g.kind == GateKind::Nor ? ~w : w;
    case GateKind::Xor:
    case GateKind::Xnor:
      w = 0;
      for (NetId in : g.in) w ^= val[in];
      return g.kind == GateKind::Xnor ? ~w : w;
    case GateKind::Not:
      return ~val[g.in[0]];
    case GateKind::Buff:
      return val[g.in[0]];
    case GateKind::Dff:
      break;
  }
  (void)c;
  return 0;
}

}  // namespace

void good_sim_nets(const ScanView& v, const PatternBlock& b,
                   std::vector<std::uint64_t>& net_words) {
  const Circuit& c = *v.circuit;
  if (b.in_words.size() != v.inputs.size())
    throw NetlistError("pattern width " + std::to_string(b.in_words.size()) +
                       " does not match view input count " +
                       std::to_string(v.inputs.size()));
  net_words.assign(c.net_count(), 0);
  for (std::size_t i = 0; i < v.inputs.size(); ++i)
    net_words[v.inputs[i]] = b.in_words[i];
  for (GateId gi : v.schedule) {
    const Gate& g = c.gates[gi];
    net_words[g.out] = eval_gate(c, g, net_words.data());
  }
}

std::vector<std::uint64_t> good_sim(const ScanView& v, const PatternBlock& b) {
  std::vector<std::uint64_t> nets;
  good_sim_nets(v, b, nets);
  std::uint64_t mask = b.lane_mask();
  std::vector<std::uint64_t> out;
  out.reserve(v.outputs.size());
  for (NetId n : v.outputs) out.push_back(nets[n] & mask);
  return out;
}

namespace {

// Static structure shared by all workers of one fault_sim call.
struct SimStructure {
  std::vector<std::vector<std::pair<GateId, int>>> loads;  // net -> (gate, pin)
  std::vector<std::uint8_t> observed;                      // net -> is PO/PPO
  std::vector<int> level;                                  // net -> level

  explicit SimStructure(const ScanView& v) {
    const Circuit& c = *v.circuit;
    loads.resize(c.net_count());
    observed.assign(c.net_count(), 0);
    level = v.level;
    for (GateId gi = 0; gi < c.gates.size(); ++gi) {
      const Gate& g = c.gates[gi];
      if (g.kind == GateKind::Dff) continue;
      for (std::size_t p = 0; p < g.in.size(); ++p)
        loads[g.in[p]].push_back({gi, static_cast<int>(p)});
    }
    for (NetId n : v.outputs) observed[n] = 1;
  }
};

// Per-worker scratch with epoch-tagged faulty values, so resetting between
// faults is O(1).
struct ConeSim {
  const Circuit& c;
  const SimStructure& st;
  const std::vector<std::uint64_t>& good;
  std::vector<std::uint64_t> fval;
  std::vector<std::uint32_t> touched;
  std::vector<std::uint8_t> queued;
  std::uint32_t epoch = 0;
  using QEntry = std::pair<int, GateId>;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;

  ConeSim(const Circuit& c_, const SimStructure& st_,
          const std::vector<std::uint64_t>& good_)
      : c(c_), st(st_), good(good_) {
    fval.assign(c.net_count(), 0);
    touched.assign(c.net_count(), 0);
    queued.assign(c.gates.size(), 0);
  }

  std::uint64_t eff(NetId n) const {
    return touched[n] == epoch ? fval[n] : good[n];
  }

  std::uint64_t eval_faulty(GateId gi, const Fault& f) {
    const Gate& g = c.gates[gi];
    bool faulted = f.site.is_branch() &&
                   f.site.load_gate == static_cast<std::int32_t>(gi);
    std::uint64_t stuck = f.stuck ? ~0ull : 0ull;
    auto operand = [&](std::size_t p) {
      if (faulted && static_cast<int>(p) == f.site.pin) return stuck;
      return eff(g.in[p]);
    };
    std::uint64_t w;
    switch (g.kind) {
      case GateKind::And:
      case GateKind::Nand:
        w = ~0ull;
        for (std::size_t p = 0; p < g.in.size(); ++p) w &= operand(p);
        return g.kind == GateKind::Nand ? ~w : w;
      case GateKind::Or:
      case GateKind::Nor:
        w = 0;
        for (std::size_t p = 0; p < g.in.size(); ++p) w |= operand(p);
        return g.kind == GateKind::Nor ? ~w : w;
      case GateKind::Xor:
      case GateKind::Xnor:
        w = 0;
        for (std::size_t p = 0; p < g.in.size(); ++p) w ^= operand(p);
        return g.kind == GateKind::Xnor ? ~w : w;
      case GateKind::Not:
        return ~operand(0);
      case GateKind::Buff:
        return operand(0);
      case GateKind::Dff:
        break;
    }
    return 0;
  }

  void push_loads(NetId n) {
    for (auto [gi, pin] : st.loads[n]) {
      if (queued[gi]) continue;
      queued[gi] = 1;
      queue.push({st.level[c.gates[gi].out], gi});
    }
  }

  void set_value(NetId n, std::uint64_t w) {
    touched[n] = epoch;
    fval[n] = w;
  }

  // Lanes (within mask) where some observed net differs under the fault.
  std::uint64_t detect_lanes(const Fault& f, std::uint64_t mask) {
    ++epoch;
    std::uint64_t det = 0;
    std::uint64_t stuck = f.stuck ? ~0ull : 0ull;

    // An observation branch touches nothing downstream: it is seen exactly
    // where the good value of its net differs from the stuck value.
    if (f.site.is_tap()) return (stuck ^ good[f.site.net]) & mask;

    if (f.site.is_stem()) {
      NetId n = f.site.net;
      if (((good[n] ^ stuck) & mask) == 0) return 0;  // never excited
      set_value(n, stuck);
      if (st.observed[n]) det |= (stuck ^ good[n]) & mask;
      push_loads(n);
    } else {
      GateId gi = static_cast<GateId>(f.site.load_gate);
      queued[gi] = 1;
      queue.push({st.level[c.gates[gi].out], gi});
    }

    while (!queue.empty()) {
      GateId gi = queue.top().second;
      queue.pop();
      queued[gi] = 0;
      const Gate& g = c.gates[gi];
      std::uint64_t w = eval_faulty(gi, f);
      if (w == eff(g.out)) continue;
      set_value(g.out, w);
      if (st.observed[g.out]) det |= (w ^ good[g.out]) & mask;
      push_loads(g.out);
    }
    return det;
  }
};

}  // namespace

DetectionTable fault_sim(const ScanView& v, FaultList& fl,
                         const std::vector<Pattern>& patterns,
                         const FaultSimOptions& opt) {
  const Circuit& c = *v.circuit;
  DetectionTable table;
  table.first_pattern.assign(fl.size(), -1);
  std::size_t n_words = (patterns.size() + kLanes - 1) / kLanes;
  if (opt.want_rows)
    table.rows.assign(fl.size(), std::vector<std::uint64_t>(n_words, 0));

  std::vector<FaultId> work;
  for (FaultId i = 0; i < fl.size(); ++i) {
    if (opt.only_undetected && (fl.status[i] == FaultStatus::Detected ||
                                fl.status[i] == FaultStatus::Untestable))
      continue;
    work.push_back(i);
  }
  if (work.empty() || patterns.empty()) return table;

  SimStructure st(v);
  int n_threads = std::min<int>(resolve_threads(opt.max_threads),
                                static_cast<int>(work.size()));

  for (const Pattern& p : patterns)
    if (p.bits.size() != v.inputs.size())
      throw NetlistError("pattern width " + std::to_string(p.bits.size()) +
                         " does not match view input count " +
                         std::to_string(v.inputs.size()));

  // Block-major so each block's good values are computed once.
  std::vector<std::uint64_t> good;
  for (std::size_t base = 0; base < patterns.size(); base += kLanes) {
    std::size_t count = std::min<std::size_t>(kLanes, patterns.size() - base);
    PatternBlock b = pack_block(patterns, base, count);
    good_sim_nets(v, b, good);
    std::uint64_t mask = b.lane_mask();

    auto run_range = [&](ConeSim& cone, std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) {
        FaultId fi = work[k];
        if (opt.drop && !opt.want_rows && table.first_pattern[fi] >= 0)
          continue;
        std::uint64_t det = cone.detect_lanes(fl.reps[fi], mask);
        if (!det) continue;
        if (table.first_pattern[fi] < 0)
          table.first_pattern[fi] =
              static_cast<std::int32_t>(base + std::countr_zero(det));
        if (opt.want_rows) table.rows[fi][base / kLanes] = det;
      }
    };

    if (n_threads <= 1) {
      ConeSim cone(c, st, good);
      run_range(cone, 0, work.size());
    } else {
      std::vector<std::thread> pool;
      std::size_t chunk = (work.size() + n_threads - 1) / n_threads;
      for (int t = 0; t < n_threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(work.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
          ConeSim cone(c, st, good);
          run_range(cone, lo, hi);
        });
      }
      for (auto& th : pool) th.join();
    }
  }

  for (FaultId fi : work) {
    if (table.first_pattern[fi] < 0) continue;
    table.detected.push_back(fi);
    if (opt.update_status) fl.status[fi] = FaultStatus::Detected;
  }
  return table;
}

}  // namespace soctat
