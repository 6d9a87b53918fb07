#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "soctat/netlist.hpp"
#include "support/oracles.hpp"
#include "support/toys.hpp"

using namespace soctat;
using namespace soctat::test;

namespace {

// Name-based structural fingerprint, independent of net numbering.
struct Shape {
  std::vector<std::string> inputs, outputs;
  std::vector<std::string> gates;  // "kind out <- a,b,..."
};

Shape shape_of(const Circuit& c) {
  Shape s;
  for (NetId n : c.inputs) s.inputs.push_back(c.net_name(n));
  for (NetId n : c.outputs) s.outputs.push_back(c.net_name(n));
  for (const Gate& g : c.gates) {
    std::string line = std::string(to_string(g.kind)) + " " + c.net_name(g.out) + " <-";
    for (NetId in : g.in) line += " " + c.net_name(in);
    s.gates.push_back(line);
  }
  return s;
}

bool same_shape(const Circuit& a, const Circuit& b) {
  Shape sa = shape_of(a), sb = shape_of(b);
  return sa.inputs == sb.inputs && sa.outputs == sb.outputs && sa.gates == sb.gates;
}

}  // namespace

TEST_CASE("parses the classic five-input example") {
  Circuit c = parse_bench(kC17, "c17");
  CHECK(c.name == "c17");
  REQUIRE(c.inputs.size() == 5);
  CHECK(c.net_name(c.inputs[0]) == "G1");
  CHECK(c.net_name(c.inputs[4]) == "G7");
  REQUIRE(c.outputs.size() == 2);
  CHECK(c.net_name(c.outputs[0]) == "G22");
  CHECK(c.net_name(c.outputs[1]) == "G23");
  REQUIRE(c.gates.size() == 6);
  for (const Gate& g : c.gates) CHECK(g.kind == GateKind::Nand);
  CHECK(c.net_count() == 11);
  CHECK(c.dffs.empty());

  // Drivers point back at the declaring gate.
  for (GateId gi = 0; gi < c.gates.size(); ++gi)
    CHECK(c.driver[c.gates[gi].out] == static_cast<std::int32_t>(gi));
  for (NetId n : c.inputs) CHECK(c.driver[n] == -1);
}

TEST_CASE("accepts aliases, mixed case, and loose whitespace") {
  Circuit c = parse_bench(
      "  input ( a )\n"
      "INPUT(b)\r\n"
      "output(y)\n"
      "n1 = inv( a )\n"
      "n2\t=\tBUF(n1)\n"
      "y = aNd(n2 , b)\n");
  REQUIRE(c.gates.size() == 3);
  CHECK(c.gates[0].kind == GateKind::Not);
  CHECK(c.gates[1].kind == GateKind::Buff);
  CHECK(c.gates[2].kind == GateKind::And);
  CHECK(c.inputs.size() == 2);
  CHECK(c.net_name(c.outputs[0]) == "y");
}

TEST_CASE("comments and blank lines are ignored") {
  Circuit c = parse_bench(
      "# header\n"
      "\n"
      "INPUT(a)  # trailing words\n"
      "OUTPUT(y)\n"
      "y = NOT(a)\n"
      "\n");
  CHECK(c.inputs.size() == 1);
  CHECK(c.gates.size() == 1);
}

TEST_CASE("malformed netlists raise positioned parse errors") {
  SUBCASE("unknown gate kind") {
    try {
      parse_bench("INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.col() >= 1);
    }
  }
  SUBCASE("flip-flop arity") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(q)\nq = DFF(a,b)\n"),
                    ParseError);
  }
  SUBCASE("inverter arity") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NOT(a,b)\n"),
                    ParseError);
  }
  SUBCASE("logic gates need two operands") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a)\n"), ParseError);
  }
  SUBCASE("duplicate input declaration") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nINPUT(a)\nOUTPUT(a)\n"), ParseError);
  }
  SUBCASE("multiply driven net") {
    CHECK_THROWS_AS(
        parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NOT(a)\ny = NOT(b)\n"),
        ParseError);
  }
  SUBCASE("gate may not drive an input") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(b)\nb = NOT(a)\n"),
                    ParseError);
  }
  SUBCASE("missing assignment") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny AND(a,a)\n"), ParseError);
  }
  SUBCASE("undriven net") {
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a,ghost)\n"),
                    NetlistError);
  }
  SUBCASE("combinational cycle") {
    CHECK_THROWS_AS(parse_bench("INPUT(x)\nOUTPUT(y)\n"
                                "a = AND(b,x)\nb = AND(a,x)\ny = BUFF(a)\n"),
                    NetlistError);
  }
  SUBCASE("cycles through flip-flops are legal") {
    CHECK_NOTHROW(parse_bench(kSeqToy));
    CHECK_NOTHROW(parse_bench("INPUT(a)\nOUTPUT(q)\nq = DFF(q)\n"));
  }
}

TEST_CASE("serialization round-trips and is a fixed point") {
  for (const char* text : {kWire, kAnd2, kXorChain, kBuffChain, kRedundant,
                           kDiamond, kSeqToy, kC17, kFfChain}) {
    Circuit c = parse_bench(text, "t");
    std::string one = to_bench(c);
    Circuit c2 = parse_bench(one, "t");
    CHECK(same_shape(c, c2));
    CHECK(to_bench(c2) == one);
  }
  Circuit s344 = load_core("s344");
  Circuit back = parse_bench(to_bench(s344), "s344");
  CHECK(same_shape(s344, back));
}

TEST_CASE("counts logic gates per the benchmark convention") {
  CHECK(count_gates(parse_bench(kC17)) == 6);
  Circuit seq = parse_bench(kSeqToy);
  CHECK(count_gates(seq) == 2);       // AND + OR; the DFF is not a logic gate
  CHECK(count_gates(seq, true) == 3);
  Circuit buf = parse_bench(kBuffChain);
  CHECK(count_gates(buf) == 0);
  CHECK(count_gates(buf, true) == 2);

  // Independent recount straight off the gate list.
  for (const char* name : {"s27", "s344", "s1196", "s5378"}) {
    Circuit c = load_core(name);
    int logic = 0, cells = 0;
    for (const Gate& g : c.gates) {
      ++cells;
      if (is_logic_gate(g.kind)) ++logic;
    }
    CHECK(count_gates(c) == logic);
    CHECK(count_gates(c, true) == cells);
  }
  CHECK(count_gates(load_core("s344")) == 101);
  CHECK(count_gates(load_core("s1196")) == 388);
  CHECK(count_gates(load_core("s9234")) == 2027);
}

TEST_CASE("levelize orders gates topologically") {
  for (const char* name : {"s27", "s344", "s1423"}) {
    Circuit c = load_core(name);
    std::vector<GateId> order = levelize(c);
    CHECK(is_topological(c, order));
    CHECK(levelize(c) == order);  // deterministic
  }
  Circuit c17 = parse_bench(kC17);
  CHECK(is_topological(c17, levelize(c17)));
}

TEST_CASE("scan view exposes flip-flops as pseudo ports") {
  SUBCASE("flip-flop output observed directly") {
    Circuit c = parse_bench(kSeqToy);
    ScanView v = scan_view(c);
    REQUIRE(v.inputs.size() == 3);
    CHECK(v.input_name(0) == "a");
    CHECK(v.input_name(1) == "b");
    CHECK(v.input_name(2) == "q");
    CHECK(v.n_pis == 2);
    CHECK(v.n_ffs() == 1);
    REQUIRE(v.outputs.size() == 3);
    CHECK(c.net_name(v.outputs[0]) == "q");
    CHECK(c.net_name(v.outputs[1]) == "y");
    CHECK(c.net_name(v.outputs[2]) == "d");
    CHECK(v.n_pos == 2);
    CHECK(v.schedule.size() == 2);
    CHECK(is_topological(c, v.schedule));
  }
  SUBCASE("pseudo outputs can land on inputs") {
    Circuit c = parse_bench(kFfChain);
    ScanView v = scan_view(c);
    REQUIRE(v.inputs.size() == 3);
    CHECK(v.input_name(0) == "a");
    CHECK(v.input_name(1) == "q1");
    CHECK(v.input_name(2) == "q2");
    REQUIRE(v.outputs.size() == 3);
    CHECK(c.net_name(v.outputs[0]) == "y");
    CHECK(c.net_name(v.outputs[1]) == "a");   // feeds the first flip-flop
    CHECK(c.net_name(v.outputs[2]) == "q1");  // feeds the second
  }
  SUBCASE("wire view has an empty schedule") {
    Circuit c = parse_bench(kWire);
    ScanView v = scan_view(c);
    CHECK(v.inputs.size() == 1);
    CHECK(v.outputs.size() == 1);
    CHECK(v.schedule.empty());
    CHECK(v.level[c.inputs[0]] == 0);
  }
  SUBCASE("benchmark dimensions") {
    Circuit c = load_core("s344");
    ScanView v = scan_view(c);
    CHECK(v.inputs.size() == 24);
    CHECK(v.n_pis == 9);
    CHECK(v.n_ffs() == 15);
    CHECK(v.outputs.size() == 26);
    CHECK(v.n_pos == 11);
  }
  SUBCASE("levels count from the view inputs") {
    Circuit c = parse_bench(kXorChain);
    ScanView v = scan_view(c);
    std::map<std::string, int> lv;
    for (NetId n = 0; n < c.net_count(); ++n) lv[c.net_name(n)] = v.level[n];
    CHECK(lv["a"] == 0);
    CHECK(lv["b"] == 0);
    CHECK(lv["c"] == 0);
    CHECK(lv["x"] == 1);
    CHECK(lv["y"] == 2);
  }
}

TEST_CASE("load_bench names the circuit after the file") {
  Circuit c = load_core("s27");
  CHECK(c.name == "s27");
  CHECK(c.inputs.size() == 4);
  CHECK(c.outputs.size() == 1);
  CHECK(c.dffs.size() == 3);
  CHECK(count_gates(c) == 8);
  CHECK_THROWS_AS(load_bench(bench_path("no_such_core")), NetlistError);
}
