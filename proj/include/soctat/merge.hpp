// merge: builds one virtual combinational circuit per cluster so a single
// broadcast test set can drive every member at once.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "soctat/atpg.hpp"
#include "soctat/fault.hpp"
#include "soctat/netlist.hpp"

namespace soctat {

// The merged circuit has CI = max member input count shared inputs
// ("si<j>"); member input i is wired to shared input i, member nets are
// prefixed "m<k>_". Member gates are copied verbatim, so the merged gate
// count is the sum of the members'.
class MergedCircuit {
public:
  std::string name;
  std::vector<std::string> member_ids;
  std::size_t ci = 0;

  // View over the merged netlist. view.outputs concatenates the member
  // output lists (duplicates preserved); the owned Circuit's output list is
  // deduplicated so it stays serializable.
  ScanView view;

  // input_map[k][i]: merged net carrying member k's input i.
  std::vector<std::vector<NetId>> input_map;
  // Member k's slice of view.outputs.
  std::vector<std::pair<std::size_t, std::size_t>> output_range;

  FaultList faults;                      // collapsed merged fault list
  std::vector<FaultList> member_faults;  // collapsed per-member lists
  // Per merged representative: the (member, member representative) faults
  // it stands for. Covers every member representative at least once.
  std::vector<std::vector<std::pair<std::uint32_t, FaultId>>> fault_origin;

  const Circuit& circuit() const { return *circuit_; }

  MergedCircuit() = default;
  MergedCircuit(MergedCircuit&&) = default;
  MergedCircuit& operator=(MergedCircuit&&) = default;

private:
  std::unique_ptr<Circuit> circuit_;
  friend MergedCircuit merge_cluster(
      const std::vector<const ScanView*>& members,
      const std::vector<std::string>& ids, std::string name);
};

// members must be non-empty; ids runs parallel to it.
MergedCircuit merge_cluster(const std::vector<const ScanView*>& members,
                            const std::vector<std::string>& ids,
                            std::string name);

struct SharedTestResult {
  TestSet tests;  // patterns over the ci shared inputs
  // Detection credit pushed through fault_origin onto each member's list.
  std::vector<std::size_t> member_detected;
  std::vector<double> member_fc;  // percent
};

// ATPG over the merged fault list; every pattern is broadcast to all
// members, and per-member coverage is accounted via fault_origin.
SharedTestResult shared_test_set(MergedCircuit& mc, const AtpgConfig& cfg = {});

}  // namespace soctat
