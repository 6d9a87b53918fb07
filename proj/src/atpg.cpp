#include "soctat/atpg.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <sstream>

namespace soctat {

namespace {

constexpr std::uint8_t V0 = 0, V1 = 1, VX = kX;

std::uint8_t eval3(GateKind kind, const std::uint8_t* ins, std::size_t n) {
  std::uint8_t acc;
  bool invert = false;
  switch (kind) {
    case GateKind::Nand:
      invert = true;
      [[fallthrough]];
    case GateKind::And:
      acc = V1;
      for (std::size_t i = 0; i < n; ++i) {
        if (ins[i] == V0) { acc = V0; break; }
        if (ins[i] == VX) acc = VX;
      }
      break;
    case GateKind::Nor:
      invert = true;
      [[fallthrough]];
    case GateKind::Or:
      acc = V0;
      for (std::size_t i = 0; i < n; ++i) {
        if (ins[i] == V1) { acc = V1; break; }
        if (ins[i] == VX) acc = VX;
      }
      break;
    case GateKind::Xnor:
      invert = true;
      [[fallthrough]];
    case GateKind::Xor:
      acc = V0;
      for (std::size_t i = 0; i < n; ++i) {
        if (ins[i] == VX) { acc = VX; break; }
        acc ^= ins[i];
      }
      break;
    case GateKind::Not:
      invert = true;
      acc = ins[0];
      break;
    case GateKind::Buff:
      acc = ins[0];
      break;
    case GateKind::Dff:
    default:
      acc = VX;
      break;
  }
  if (invert && acc != VX) acc ^= 1;
  return acc;
}

// PODEM state: the good and faulty machines are evaluated as separate
// three-valued planes; D is a net whose planes are binary and different,
// and a net is "unspecified" while either plane is still X.
class Podem {
public:
  Podem(const ScanView& v, const Fault& f, int limit)
      : v_(v), c_(*v.circuit), f_(f), limit_(limit) {
    std::size_t nets = c_.net_count();
    vg_.assign(nets, VX);
    vf_.assign(nets, VX);
    input_of_.assign(nets, -1);
    for (std::size_t i = 0; i < v_.inputs.size(); ++i)
      input_of_[v_.inputs[i]] = static_cast<std::int32_t>(i);
    assign_.assign(v_.inputs.size(), VX);
    observed_.assign(nets, 0);
    for (NetId n : v_.outputs) observed_[n] = 1;
    xreach_.assign(nets, 0);
  }

  PodemResult run() {
    PodemResult res;
    struct Frame {
      std::uint32_t input;
      bool flipped;
    };
    std::vector<Frame> stack;

    for (;;) {
      imply();
      Step step = evaluate();
      if (step.kind == Step::Success) {
        res.outcome = PodemOutcome::Success;
        res.cube.bits = assign_;
        res.backtracks = backtracks_;
        return res;
      }
      if (step.kind == Step::Fail) {
        bool moved = false;
        while (!stack.empty()) {
          Frame& top = stack.back();
          if (!top.flipped) {
            if (++backtracks_ > limit_) {
              res.outcome = PodemOutcome::Aborted;
              res.backtracks = backtracks_;
              return res;
            }
            top.flipped = true;
            assign_[top.input] ^= 1;
            moved = true;
            break;
          }
          assign_[top.input] = VX;
          stack.pop_back();
        }
        if (!moved && stack.empty()) {
          res.outcome = PodemOutcome::Untestable;
          res.backtracks = backtracks_;
          return res;
        }
        continue;
      }
      auto [input, val] = backtrace(step.net, step.val);
      stack.push_back({input, false});
      assign_[input] = val;
    }
  }

private:
  struct Step {
    enum Kind { Success, Fail, Objective } kind;
    NetId net = 0;
    std::uint8_t val = 0;
  };

  bool unspecified(NetId n) const { return vg_[n] == VX || vf_[n] == VX; }
  bool has_d(NetId n) const {
    return vg_[n] != VX && vf_[n] != VX && vg_[n] != vf_[n];
  }

  void pin_values(GateId gi, std::uint8_t* g_ins, std::uint8_t* f_ins) const {
    const Gate& g = c_.gates[gi];
    bool faulted = f_.site.is_branch() &&
                   f_.site.load_gate == static_cast<std::int32_t>(gi);
    for (std::size_t p = 0; p < g.in.size(); ++p) {
      g_ins[p] = vg_[g.in[p]];
      f_ins[p] = (faulted && static_cast<int>(p) == f_.site.pin) ? f_.stuck
                                                                 : vf_[g.in[p]];
    }
  }

  void imply() {
    for (std::size_t i = 0; i < v_.inputs.size(); ++i) {
      NetId n = v_.inputs[i];
      vg_[n] = assign_[i];
      vf_[n] = assign_[i];
    }
    if (f_.site.is_stem() && input_of_[f_.site.net] >= 0)
      vf_[f_.site.net] = f_.stuck;
    std::uint8_t g_ins[64], f_ins[64];
    for (GateId gi : v_.schedule) {
      const Gate& g = c_.gates[gi];
      pin_values(gi, g_ins, f_ins);
      vg_[g.out] = eval3(g.kind, g_ins, g.in.size());
      vf_[g.out] = eval3(g.kind, f_ins, g.in.size());
      if (f_.site.is_stem() && f_.site.net == g.out) vf_[g.out] = f_.stuck;
    }
  }

  bool detected() const {
    // An observation branch leaves the functional nets untouched; it is
    // seen as soon as its net settles to the opposite of the stuck value.
    if (f_.site.is_tap()) {
      std::uint8_t g = vg_[f_.site.net];
      return g != VX && g != f_.stuck;
    }
    for (NetId n : v_.outputs)
      if (has_d(n)) return true;
    return false;
  }

  // Nets that can still pass a discrepancy on to an output.
  void compute_xreach() {
    std::fill(xreach_.begin(), xreach_.end(), 0);
    for (NetId n = 0; n < c_.net_count(); ++n)
      if (observed_[n] && unspecified(n)) xreach_[n] = 1;
    for (auto it = v_.schedule.rbegin(); it != v_.schedule.rend(); ++it) {
      const Gate& g = c_.gates[*it];
      if (!xreach_[g.out]) continue;
      for (NetId in : g.in)
        if (unspecified(in)) xreach_[in] = 1;
    }
  }

  Step evaluate() {
    if (detected()) return {Step::Success};
    std::uint8_t site_good = vg_[f_.site.net];
    std::uint8_t want = f_.stuck ^ 1;
    if (site_good == f_.stuck) return {Step::Fail};
    if (site_good == VX) return {Step::Objective, f_.site.net, want};

    // Fault is excited; advance the D-frontier.
    compute_xreach();
    std::uint8_t g_ins[64], f_ins[64];
    GateId best = 0;
    int best_level = -1;
    std::size_t best_pin = 0;
    for (GateId gi : v_.schedule) {
      const Gate& g = c_.gates[gi];
      if (!unspecified(g.out) || !xreach_[g.out]) continue;
      pin_values(gi, g_ins, f_ins);
      bool d_in = false;
      for (std::size_t p = 0; p < g.in.size() && !d_in; ++p)
        d_in = g_ins[p] != VX && f_ins[p] != VX && g_ins[p] != f_ins[p];
      if (!d_in) continue;
      int lv = v_.level[g.out];
      if (lv <= best_level) continue;
      std::size_t pin = g.in.size();
      for (std::size_t p = 0; p < g.in.size(); ++p)
        if (g_ins[p] == VX || f_ins[p] == VX) { pin = p; break; }
      if (pin == g.in.size()) continue;  // cannot happen: X output needs an X pin
      best = gi;
      best_level = lv;
      best_pin = pin;
    }
    if (best_level < 0) return {Step::Fail};
    const Gate& g = c_.gates[best];
    std::uint8_t noncontrolling;
    switch (g.kind) {
      case GateKind::And:
      case GateKind::Nand: noncontrolling = V1; break;
      case GateKind::Or:
      case GateKind::Nor: noncontrolling = V0; break;
      default: noncontrolling = V0; break;  // XOR/XNOR: any binary value
    }
    return {Step::Objective, g.in[best_pin], noncontrolling};
  }

  static bool inverts(GateKind k) {
    return k == GateKind::Nand || k == GateKind::Nor || k == GateKind::Not;
  }
  static int controlling(GateKind k) {
    switch (k) {
      case GateKind::And:
      case GateKind::Nand: return V0;
      case GateKind::Or:
      case GateKind::Nor: return V1;
      default: return -1;
    }
  }

  // Walks the objective back to an unassigned view input. Level depth
  // stands in for SCOAP controllability; ties go to the lowest pin index.
  std::pair<std::uint32_t, std::uint8_t> backtrace(NetId net,
                                                   std::uint8_t val) const {
    for (;;) {
      if (input_of_[net] >= 0)
        return {static_cast<std::uint32_t>(input_of_[net]), val};
      const Gate& g = c_.gates[c_.driver[net]];
      std::uint8_t z = inverts(g.kind) ? (val ^ 1) : val;
      int ctrl = controlling(g.kind);
      bool want_easy = ctrl < 0 || z == ctrl;
      std::size_t pick = g.in.size();
      int pick_level = 0;
      for (std::size_t p = 0; p < g.in.size(); ++p) {
        NetId in = g.in[p];
        if (!unspecified(in)) continue;
        int lv = v_.level[in];
        if (pick == g.in.size() || (want_easy ? lv < pick_level : lv > pick_level)) {
          pick = p;
          pick_level = lv;
        }
      }
      assert(pick != g.in.size());
      net = g.in[pick];
      val = z;
    }
  }

  const ScanView& v_;
  const Circuit& c_;
  Fault f_;
  int limit_;
  int backtracks_ = 0;
  std::vector<std::uint8_t> vg_, vf_;
  std::vector<std::uint8_t> assign_;       // per view input
  std::vector<std::int32_t> input_of_;     // net -> input index or -1
  std::vector<std::uint8_t> observed_;
  std::vector<std::uint8_t> xreach_;
};

}  // namespace

PodemResult podem(const ScanView& v, const Fault& f, int backtrack_limit) {
  for (const Gate& g : v.circuit->gates)
    if (g.kind != GateKind::Dff && g.in.size() > 64)
      throw NetlistError("gate fan-in above 64 is not supported");
  Podem engine(v, f, backtrack_limit);
  return engine.run();
}

namespace {

Pattern fill_cube(const Pattern& cube, AtpgConfig::Fill mode,
                  std::mt19937_64& rng) {
  Pattern p;
  p.bits.resize(cube.bits.size());
  for (std::size_t i = 0; i < cube.bits.size(); ++i) {
    std::uint8_t b = cube.bits[i];
    if (b == kX) {
      switch (mode) {
        case AtpgConfig::Fill::Random:
          b = static_cast<std::uint8_t>(rng() & 1);
          break;
        case AtpgConfig::Fill::Zeros: b = 0; break;
        case AtpgConfig::Fill::Ones: b = 1; break;
      }
    }
    p.bits[i] = b;
  }
  return p;
}

}  // namespace

TestSet generate_test_set(const ScanView& v, FaultList& fl,
                          const AtpgConfig& cfg) {
  TestSet ts;
  ts.circuit_name = v.circuit->name;
  for (std::size_t i = 0; i < v.inputs.size(); ++i)
    ts.input_names.push_back(v.input_name(i));
  ts.seed = cfg.seed;
  ts.n_faults = fl.size();

  std::mt19937_64 rng(cfg.seed);
  FaultSimOptions sim_opt;
  sim_opt.max_threads = cfg.max_threads;

  for (FaultId fi = 0; fi < fl.size(); ++fi) {
    if (fl.status[fi] != FaultStatus::Undetected) continue;
    PodemResult r = podem(v, fl.reps[fi], cfg.backtrack_limit);
    if (r.outcome == PodemOutcome::Untestable) {
      fl.status[fi] = FaultStatus::Untestable;
      continue;
    }
    if (r.outcome == PodemOutcome::Aborted) {
      fl.status[fi] = FaultStatus::Aborted;
      continue;
    }
    Pattern p = fill_cube(r.cube, cfg.fill, rng);
    std::vector<Pattern> one{p};
    DetectionTable tbl = fault_sim(v, fl, one, sim_opt);
    assert(!tbl.detected.empty());
    ts.patterns.push_back(std::move(p));
    ts.detected.push_back(std::move(tbl.detected));
  }

  // Reverse-order compaction: drop patterns whose detections are covered
  // by the patterns kept after them, then rebuild the per-pattern records
  // in forward order, discarding anything that ends up with no credit.
  auto reset_detected = [&fl] {
    FaultList probe = fl;
    for (auto& s : probe.status)
      if (s == FaultStatus::Detected) s = FaultStatus::Undetected;
      else if (s != FaultStatus::Undetected) s = FaultStatus::Untestable;
    return probe;
  };

  if (cfg.compaction && !ts.patterns.empty()) {
    FaultList probe = reset_detected();
    std::vector<bool> keep(ts.patterns.size(), false);
    for (std::size_t k = ts.patterns.size(); k-- > 0;) {
      std::vector<Pattern> one{ts.patterns[k]};
      DetectionTable tbl = fault_sim(v, probe, one, sim_opt);
      keep[k] = !tbl.detected.empty();
    }
    std::vector<Pattern> kept;
    for (std::size_t k = 0; k < ts.patterns.size(); ++k)
      if (keep[k]) kept.push_back(std::move(ts.patterns[k]));
    ts.patterns = std::move(kept);

    FaultList rebuild = reset_detected();
    std::vector<Pattern> final_patterns;
    std::vector<std::vector<FaultId>> final_detected;
    for (const Pattern& p : ts.patterns) {
      std::vector<Pattern> one{p};
      DetectionTable tbl = fault_sim(v, rebuild, one, sim_opt);
      if (tbl.detected.empty()) continue;
      final_patterns.push_back(p);
      final_detected.push_back(std::move(tbl.detected));
    }
    ts.patterns = std::move(final_patterns);
    ts.detected = std::move(final_detected);
  }

  ts.n_detected = fl.count(FaultStatus::Detected);
  ts.n_untestable = fl.count(FaultStatus::Untestable);
  ts.n_aborted = fl.count(FaultStatus::Aborted);
  return ts;
}

std::string to_text(const TestSet& ts) {
  std::ostringstream out;
  out << "# circuit " << ts.circuit_name << "\n# inputs";
  for (const std::string& n : ts.input_names) out << ' ' << n;
  out << "\n# seed " << ts.seed << "\n";
  for (const Pattern& p : ts.patterns) {
    for (std::uint8_t b : p.bits) out << char('0' + (b & 1));
    out << '\n';
  }
  return out.str();
}

TestSet parse_test_set(std::string_view text) {
  TestSet ts;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string key;
      hs >> key;
      if (key == "circuit") {
        hs >> ts.circuit_name;
      } else if (key == "inputs") {
        std::string n;
        while (hs >> n) ts.input_names.push_back(n);
      } else if (key == "seed") {
        hs >> ts.seed;
      }
      continue;
    }
    Pattern p;
    for (std::size_t i = first; i < line.size(); ++i) {
      char ch = line[i];
      if (ch == '0' || ch == '1') {
        p.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
      } else if (ch == ' ' || ch == '\t') {
        continue;
      } else {
        throw ParseError("pattern lines may only contain 0 and 1", lineno,
                         static_cast<int>(i) + 1);
      }
    }
    if (!ts.input_names.empty() && p.bits.size() != ts.input_names.size())
      throw ParseError("pattern width does not match the inputs header",
                       lineno, 1);
    ts.patterns.push_back(std::move(p));
  }
  return ts;
}

}  // namespace soctat
