// fault: single stuck-at fault enumeration and structural equivalence
// collapsing over a full-scan view.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soctat/netlist.hpp"

namespace soctat {

using FaultId = std::uint32_t;

enum class FaultStatus : std::uint8_t {
  Undetected,
  Detected,
  Untestable,
  Aborted,
};

const char* to_string(FaultStatus s);

// A fault site is a line. Three kinds exist:
//   - stem: the net itself (load_gate == kStemGate),
//   - gate branch: one input pin of a combinational gate (load_gate is the
//     gate index, pin the input position),
//   - observation branch: one PO/PPO tap of the view (load_gate == kTapGate,
//     pin is the index into ScanView::outputs).
// Every load of a net counts toward its fanout — gate pins and observation
// taps alike — and branch sites exist only on nets with two or more loads.
// This is the convention that reproduces the canonical ISCAS'89 collapsed
// fault counts.
struct FaultSite {
  static constexpr std::int32_t kStemGate = -1;
  static constexpr std::int32_t kTapGate = -2;

  NetId net = 0;
  std::int32_t load_gate = kStemGate;
  std::int32_t pin = 0;

  bool is_stem() const { return load_gate == kStemGate; }
  bool is_tap() const { return load_gate == kTapGate; }
  bool is_branch() const { return load_gate >= 0; }
  friend bool operator==(const FaultSite&, const FaultSite&) = default;
};

struct Fault {
  FaultSite site;
  std::uint8_t stuck = 0;  // 0 or 1

  friend bool operator==(const Fault&, const Fault&) = default;
};

struct FaultList {
  // Collapsed representatives in enumeration order of their smallest
  // class member. status runs parallel to reps.
  std::vector<Fault> reps;
  std::vector<FaultStatus> status;
  // Full equivalence class per representative, enumeration order.
  std::vector<std::vector<Fault>> members;
  // Universe index -> representative index.
  std::vector<FaultId> rep_of;
  std::size_t universe_size = 0;

  std::size_t size() const { return reps.size(); }
  std::size_t count(FaultStatus s) const;
  // Percent of representatives detected; 100.0 for an empty list.
  double coverage() const;
};

// Loads per net: combinational gate pins plus observation taps, the fanout
// count that decides where branch sites exist.
std::vector<int> line_loads(const ScanView& v);

// All single stuck-at faults of the view, two per line, in a fixed order:
// stems of the view inputs, stems of combinational gate outputs
// (declaration order), then gate branches gate by gate and pin by pin, then
// observation branches in view-output order; each line contributes s-a-0
// before s-a-1.
std::vector<Fault> enumerate_faults(const ScanView& v);

// Equivalence collapsing with the local gate rules (AND/NAND/OR/NOR tie
// their controlled output fault to every input-pin fault; NOT/BUFF tie both
// polarities; XOR/XNOR contribute nothing). No dominance collapsing.
FaultList collapse(const ScanView& v, const std::vector<Fault>& universe);

FaultList build_fault_list(const ScanView& v);

// "NET SA0" for stems, "NET/GATE.PIN SA1" for gate branches (GATE is the
// name of the load gate's output net), "NET/OUT.J SA0" for observation
// branches (J is the view-output index).
std::string fault_name(const ScanView& v, const Fault& f);

// One representative per line: "<fault_name> <STATUS>".
std::string export_faults(const ScanView& v, const FaultList& fl);

}  // namespace soctat
