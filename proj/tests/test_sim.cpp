#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "doctest.h"
#include "soctat/fault.hpp"
#include "soctat/netlist.hpp"
#include "soctat/sim.hpp"
#include "support/oracles.hpp"
#include "support/toys.hpp"

using namespace soctat;
using namespace soctat::test;

namespace {

// Scoped environment override that restores the previous value.
class EnvGuard {
public:
  EnvGuard(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) prev_ = old;
    set(value);
  }
  ~EnvGuard() {
    if (prev_) ::setenv(name_, prev_->c_str(), 1);
    else ::unsetenv(name_);
  }

private:
  void set(const char* value) {
    if (value) ::setenv(name_, value, 1);
    else ::unsetenv(name_);
  }
  const char* name_;
  std::optional<std::string> prev_;
};

std::vector<Pattern> all_patterns(std::size_t width) {
  std::vector<Pattern> out;
  for (std::size_t v = 0; v < (std::size_t{1} << width); ++v) {
    Pattern p;
    p.bits.resize(width);
    for (std::size_t i = 0; i < width; ++i) p.bits[i] = (v >> i) & 1;
    out.push_back(std::move(p));
  }
  return out;
}

// Cross-checks good_sim against the recursive interpreter, pattern by
// pattern and output by output.
void check_good_sim(const ScanView& v, const std::vector<Pattern>& pats) {
  for (std::size_t first = 0; first < pats.size(); first += kLanes) {
    std::size_t n = std::min<std::size_t>(kLanes, pats.size() - first);
    PatternBlock b = pack_block(pats, first, n);
    std::vector<std::uint64_t> words = good_sim(v, b);
    REQUIRE(words.size() == v.outputs.size());
    for (std::size_t lane = 0; lane < n; ++lane) {
      std::vector<std::uint8_t> want = naive_outputs(v, pats[first + lane]);
      for (std::size_t j = 0; j < words.size(); ++j)
        CHECK(((words[j] >> lane) & 1) == want[j]);
    }
  }
}

}  // namespace

TEST_CASE("pack_block puts pattern i in lane i") {
  std::vector<Pattern> pats;
  pats.push_back({{1, 0, 1}});
  pats.push_back({{0, 1, 1}});
  pats.push_back({{1, 1, 0}});
  PatternBlock b = pack_block(pats, 0, 3);
  CHECK(b.lane_count == 3);
  REQUIRE(b.in_words.size() == 3);
  CHECK(b.in_words[0] == 0b101);  // input 0 across lanes
  CHECK(b.in_words[1] == 0b110);
  CHECK(b.in_words[2] == 0b011);
  CHECK(b.lane_mask() == 0b111);

  PatternBlock tail = pack_block(pats, 2, 1);
  CHECK(tail.lane_count == 1);
  CHECK(tail.in_words[0] == 1);
  CHECK(tail.lane_mask() == 1);

  std::vector<Pattern> many(70, Pattern{{1}});
  PatternBlock full = pack_block(many, 0, kLanes);
  CHECK(full.lane_mask() == ~0ull);
}

TEST_CASE("good simulation matches the interpreter on toys") {
  for (const char* text : {kWire, kAnd2, kXorChain, kBuffChain, kRedundant,
                           kDiamond, kSeqToy, kC17, kFfChain}) {
    Circuit c = parse_bench(text, "t");
    ScanView v = scan_view(c);
    check_good_sim(v, all_patterns(v.inputs.size()));
  }
}

TEST_CASE("good simulation matches the interpreter on benchmarks") {
  for (const char* name :
       {"s27", "s344", "s349", "s382", "s400", "s444", "s713", "s820", "s838",
        "s953", "s1196", "s1238", "s1423", "s1488", "s1494", "s5378",
        "s9234"}) {
    Circuit c = load_core(name);
    ScanView v = scan_view(c);
    check_good_sim(v, random_patterns(v.inputs.size(), 200, 0xC0FFEE));
  }
}

TEST_CASE("lanes beyond the pattern count stay masked") {
  Circuit c = parse_bench(kRedundant, "t");
  ScanView v = scan_view(c);
  std::vector<Pattern> pats = random_patterns(v.inputs.size(), 5, 7);
  PatternBlock b = pack_block(pats, 0, 5);
  for (std::uint64_t w : good_sim(v, b)) CHECK((w & ~b.lane_mask()) == 0);
}

TEST_CASE("pattern width must match the view") {
  Circuit c = parse_bench(kAnd2, "and2");
  ScanView v = scan_view(c);
  std::vector<Pattern> bad{Pattern{{1, 0, 1}}};
  CHECK_THROWS_AS(good_sim(v, pack_block(bad, 0, 1)), NetlistError);
  FaultList fl = build_fault_list(v);
  CHECK_THROWS_AS(fault_sim(v, fl, bad), NetlistError);
}

TEST_CASE("fault simulation agrees with the interpreter exhaustively") {
  FaultSimOptions full;
  full.drop = false;
  full.want_rows = true;
  full.only_undetected = false;
  full.update_status = false;
  for (const char* text : {kWire, kAnd2, kXorChain, kBuffChain, kRedundant,
                           kDiamond, kSeqToy, kC17, kFfChain}) {
    Circuit c = parse_bench(text, "t");
    ScanView v = scan_view(c);
    FaultList fl = build_fault_list(v);
    std::vector<Pattern> pats = all_patterns(v.inputs.size());
    DetectionTable t = fault_sim(v, fl, pats, full);
    REQUIRE(t.rows.size() == fl.size());
    for (std::size_t r = 0; r < fl.size(); ++r) {
      std::int32_t first = -1;
      for (std::size_t p = 0; p < pats.size(); ++p) {
        bool want = naive_detects(v, fl.reps[r], pats[p]);
        bool got = (t.rows[r][p / kLanes] >> (p % kLanes)) & 1;
        INFO("fault " << fault_name(v, fl.reps[r]) << " pattern " << p);
        CHECK(got == want);
        if (want && first < 0) first = static_cast<std::int32_t>(p);
      }
      CHECK(t.first_pattern[r] == first);
      CHECK(fl.status[r] == FaultStatus::Undetected);  // update_status off
    }
  }
}

TEST_CASE("fault simulation agrees with the interpreter on a benchmark") {
  Circuit c = load_core("s27");
  ScanView v = scan_view(c);
  FaultList fl = build_fault_list(v);
  std::vector<Pattern> pats = all_patterns(v.inputs.size());
  FaultSimOptions full;
  full.drop = false;
  full.want_rows = true;
  full.update_status = false;
  DetectionTable t = fault_sim(v, fl, pats, full);
  for (std::size_t r = 0; r < fl.size(); ++r)
    for (std::size_t p = 0; p < pats.size(); ++p) {
      bool got = (t.rows[r][p / kLanes] >> (p % kLanes)) & 1;
      CHECK(got == naive_detects(v, fl.reps[r], pats[p]));
    }
}

TEST_CASE("dropping changes neither first detections nor the detected set") {
  Circuit c = load_core("s344");
  ScanView v = scan_view(c);
  std::vector<Pattern> pats = random_patterns(v.inputs.size(), 300, 99);

  FaultList a = build_fault_list(v);
  FaultSimOptions drop;  // defaults: drop on
  DetectionTable ta = fault_sim(v, a, pats, drop);

  FaultList b = build_fault_list(v);
  FaultSimOptions nodrop;
  nodrop.drop = false;
  DetectionTable tb = fault_sim(v, b, pats, nodrop);

  CHECK(ta.first_pattern == tb.first_pattern);
  CHECK(ta.detected == tb.detected);
  for (std::size_t r = 0; r < a.size(); ++r) CHECK(a.status[r] == b.status[r]);
  CHECK(a.count(FaultStatus::Detected) == ta.detected.size());
}

TEST_CASE("results are identical across thread counts") {
  Circuit c = load_core("s1238");
  ScanView v = scan_view(c);
  std::vector<Pattern> pats = random_patterns(v.inputs.size(), 256, 5);

  FaultSimOptions one;
  one.max_threads = 1;
  one.want_rows = true;
  one.drop = false;
  FaultSimOptions eight = one;
  eight.max_threads = 8;

  FaultList fa = build_fault_list(v);
  FaultList fb = build_fault_list(v);
  DetectionTable ta = fault_sim(v, fa, pats, one);
  DetectionTable tb = fault_sim(v, fb, pats, eight);
  CHECK(ta.first_pattern == tb.first_pattern);
  CHECK(ta.detected == tb.detected);
  CHECK(ta.rows == tb.rows);
}

TEST_CASE("status filters control which faults are simulated") {
  Circuit c = parse_bench(kC17, "c17");
  ScanView v = scan_view(c);
  std::vector<Pattern> pats = all_patterns(v.inputs.size());

  FaultList fl = build_fault_list(v);
  fl.status[0] = FaultStatus::Detected;
  fl.status[1] = FaultStatus::Untestable;
  fl.status[2] = FaultStatus::Aborted;  // still a candidate

  DetectionTable t = fault_sim(v, fl, pats);  // defaults: only_undetected
  CHECK(t.first_pattern[0] == -1);
  CHECK(t.first_pattern[1] == -1);
  CHECK(t.first_pattern[2] >= 0);  // aborted faults are retried
  CHECK(fl.status[2] == FaultStatus::Detected);
  // Every remaining fault of this circuit is detectable exhaustively.
  for (std::size_t r = 3; r < fl.size(); ++r)
    CHECK(fl.status[r] == FaultStatus::Detected);
  CHECK(fl.status[1] == FaultStatus::Untestable);  // untouched

  // With update_status off the list is read-only.
  FaultList fro = build_fault_list(v);
  FaultSimOptions ro;
  ro.update_status = false;
  DetectionTable t2 = fault_sim(v, fro, pats, ro);
  CHECK(t2.detected.size() == fro.size());
  for (FaultStatus s : fro.status) CHECK(s == FaultStatus::Undetected);
}

TEST_CASE("worker count resolution") {
  CHECK(resolve_threads(3) == 3);
  {
    EnvGuard env("SOCTAT_THREADS", "5");
    CHECK(resolve_threads(0) == 5);
    CHECK(resolve_threads(2) == 2);  // explicit request wins
  }
  {
    EnvGuard env("SOCTAT_THREADS", "garbage");
    CHECK(resolve_threads(0) == 1);
  }
  {
    EnvGuard env("SOCTAT_THREADS", "9999");
    CHECK(resolve_threads(0) == 256);
  }
  {
    EnvGuard env("SOCTAT_THREADS", nullptr);
    CHECK(resolve_threads(0) >= 1);
  }
  CHECK(resolve_threads(-4) >= 1);
}
