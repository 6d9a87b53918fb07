// atpg: PODEM test generation over a full-scan view, with X-fill and
// reverse-order compaction.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "soctat/fault.hpp"
#include "soctat/netlist.hpp"
#include "soctat/sim.hpp"

namespace soctat {

inline constexpr std::uint8_t kX = 2;  // don't-care in cubes

struct AtpgConfig {
  enum class Fill { Random, Zeros, Ones };

  std::uint64_t seed = 1;
  int backtrack_limit = 10000;
  bool compaction = true;
  Fill fill = Fill::Random;
  int max_threads = 0;
};

enum class PodemOutcome { Success, Untestable, Aborted };

struct PodemResult {
  PodemOutcome outcome = PodemOutcome::Untestable;
  Pattern cube;  // bits in {0,1,kX}; meaningful on Success
  int backtracks = 0;
};

// Generates a test cube for one fault, or proves it untestable, or gives
// up after backtrack_limit backtracks.
PodemResult podem(const ScanView& v, const Fault& f, int backtrack_limit);

struct TestSet {
  std::string circuit_name;
  std::vector<std::string> input_names;
  std::uint64_t seed = 0;
  std::vector<Pattern> patterns;
  // Faults first detected by each pattern (fault-dropping order).
  std::vector<std::vector<FaultId>> detected;
  std::size_t n_faults = 0;
  std::size_t n_detected = 0;
  std::size_t n_untestable = 0;
  std::size_t n_aborted = 0;

  double coverage() const {
    return n_faults == 0
               ? 100.0
               : 100.0 * static_cast<double>(n_detected) /
                     static_cast<double>(n_faults);
  }
};

// Targets undetected representatives in list order: PODEM, X-fill, then
// fault simulation with dropping so one pattern retires many faults.
// With cfg.compaction a reverse-order pass discards patterns that cover
// nothing new. Updates the statuses in fl. Deterministic for a fixed seed
// and config, independent of worker count.
TestSet generate_test_set(const ScanView& v, FaultList& fl,
                          const AtpgConfig& cfg = {});

// Text form: "# circuit", "# inputs", "# seed" headers then one 0/1 line
// per pattern.
std::string to_text(const TestSet& ts);
TestSet parse_test_set(std::string_view text);

}  // namespace soctat
