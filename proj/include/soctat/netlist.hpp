// netlist: ISCAS'89 .bench parsing, levelization, and the full-scan
// combinational view used by everything downstream.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace soctat {

using NetId = std::uint32_t;
using GateId = std::uint32_t;

enum class GateKind : std::uint8_t {
  And,
  Nand,
  Or,
  Nor,
  Xor,
  Xnor,
  Not,
  Buff,
  Dff,
};

const char* to_string(GateKind k);

// AND/NAND/OR/NOR/XOR/XNOR. NOT/BUFF/DFF are excluded from the default
// gate count, matching the usual benchmark bookkeeping.
bool is_logic_gate(GateKind k);

struct Gate {
  GateKind kind;
  NetId out;
  std::vector<NetId> in;
};

// Parse failure with 1-based source position.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int col);
  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

// Structural violations that are not tied to one source location
// (undriven nets, combinational cycles, ...).
class NetlistError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Circuit {
  std::string name;
  std::vector<std::string> net_names;  // NetId -> name
  std::vector<Gate> gates;             // declaration order
  std::vector<std::int32_t> driver;    // NetId -> gate index, -1 for primary inputs
  std::vector<NetId> inputs;           // primary inputs, declaration order
  std::vector<NetId> outputs;          // primary outputs, declaration order
  std::vector<GateId> dffs;            // DFF gate indices, declaration order

  std::size_t net_count() const { return net_names.size(); }
  const std::string& net_name(NetId n) const { return net_names[n]; }
};

// Parses .bench text. Accepts INPUT/OUTPUT declarations and
// `net = KIND(a,b,...)` with KIND in {AND,NAND,OR,NOR,XOR,XNOR,NOT,BUFF,DFF}
// plus the INV/BUF aliases; keywords are case-insensitive and whitespace is
// free-form. Throws ParseError (with line/col) on malformed lines, unknown
// kinds, bad arity, duplicate declarations, or multiply driven nets, and
// NetlistError on undriven nets or combinational cycles.
Circuit parse_bench(std::string_view text, std::string name = "");

// parse_bench over a file; the circuit name defaults to the basename
// without its extension.
Circuit load_bench(const std::string& path);

// Canonical serialization: INPUT lines, OUTPUT lines, then gates in
// declaration order. parse_bench(to_bench(c)) is structurally identical to c
// and to_bench is a fixed point on its own output.
std::string to_bench(const Circuit& c);

// Logic-gate count (AND/NAND/OR/NOR/XOR/XNOR). With all_cells, counts every
// cell including NOT/BUFF/DFF.
int count_gates(const Circuit& c, bool all_cells = false);

// Full-scan combinational view: DFF outputs become pseudo-primary inputs,
// DFF inputs become pseudo-primary outputs, DFF cells disappear.
struct ScanView {
  const Circuit* circuit = nullptr;
  std::vector<NetId> inputs;    // PIs then PPIs (DFF declaration order)
  std::vector<NetId> outputs;   // POs then PPOs; entries may repeat
  std::size_t n_pis = 0;
  std::size_t n_pos = 0;
  std::vector<GateId> schedule; // levelized combinational gates
  std::vector<int> level;       // per net; view inputs are level 0

  std::size_t n_ffs() const { return inputs.size() - n_pis; }
  const std::string& input_name(std::size_t i) const {
    return circuit->net_name(inputs[i]);
  }
};

// Topological order over the non-DFF gates, ties broken by declaration
// order. Throws NetlistError on a combinational cycle.
std::vector<GateId> levelize(const Circuit& c);

ScanView scan_view(const Circuit& c);

}  // namespace soctat
