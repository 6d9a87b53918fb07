// sim: word-parallel good-machine and single-stuck-at fault simulation.
// Patterns ride in the 64 bit-lanes of a machine word.
#pragma once

#include <cstdint>
#include <vector>

#include "soctat/fault.hpp"
#include "soctat/netlist.hpp"

namespace soctat {

inline constexpr int kLanes = 64;

// A fully specified input vector for a scan view, one bit per view input.
struct Pattern {
  std::vector<std::uint8_t> bits;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

// Up to kLanes patterns packed bit-per-lane, one word per view input.
struct PatternBlock {
  int lane_count = 0;
  std::vector<std::uint64_t> in_words;

  std::uint64_t lane_mask() const {
    return lane_count >= kLanes ? ~0ull : ((1ull << lane_count) - 1);
  }
};

PatternBlock pack_block(const std::vector<Pattern>& patterns,
                        std::size_t first, std::size_t count);

// Evaluates every net of the view; net_words is indexed by NetId.
void good_sim_nets(const ScanView& v, const PatternBlock& b,
                   std::vector<std::uint64_t>& net_words);

// Output words in view-output order (duplicated nets appear per entry).
std::vector<std::uint64_t> good_sim(const ScanView& v, const PatternBlock& b);

struct FaultSimOptions {
  bool drop = true;             // stop simulating a fault once detected
  bool want_rows = false;       // keep per-pattern detection rows (forces full sim)
  bool only_undetected = true;  // skip reps already Detected/Untestable
  bool update_status = true;    // mark newly detected reps in the FaultList
  int max_threads = 0;          // 0: SOCTAT_THREADS, else hardware
};

struct DetectionTable {
  // Per representative: first detecting pattern index, -1 if none.
  std::vector<std::int32_t> first_pattern;
  // Per representative bitmask over patterns (kLanes per word), only
  // populated when want_rows was set.
  std::vector<std::vector<std::uint64_t>> rows;
  // Representatives detected by this run, ascending id.
  std::vector<FaultId> detected;
};

// Simulates each candidate representative against the pattern list by
// propagating the faulty value through the fanout cone of the fault site
// and comparing observed nets. Deterministic for any thread count.
DetectionTable fault_sim(const ScanView& v, FaultList& fl,
                         const std::vector<Pattern>& patterns,
                         const FaultSimOptions& opt = {});

// Worker-count resolution: explicit request, else SOCTAT_THREADS, else
// std::thread::hardware_concurrency(); always at least 1.
int resolve_threads(int requested);

}  // namespace soctat
