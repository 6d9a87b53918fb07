#include "soctat/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace soctat {

const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buff: return "BUFF";
    case GateKind::Dff: return "DFF";
  }
  return "?";
}

bool is_logic_gate(GateKind k) {
  switch (k) {
    case GateKind::And:
    case GateKind::Nand:
    case GateKind::Or:
    case GateKind::Nor:
    case GateKind::Xor:
    case GateKind::Xnor:
      return true;
    default:
      return false;
  }
}

ParseError::ParseError(const std::string& msg, int line, int col)
    : std::runtime_error("line " + std::to_string(line) + ", col " +
                         std::to_string(col) + ": " + msg),
      line_(line),
      col_(col) {}

namespace {

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws_and_comments() {
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  static bool is_name_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' &&
           c != ')' && c != ',' && c != '=' && c != '#';
  }

  // Identifier or keyword token; empty if next char is punctuation.
  std::string take_name() {
    std::string s;
    while (!eof() && is_name_char(peek())) {
      s += peek();
      advance();
    }
    return s;
  }
};

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool kind_from_string(const std::string& up, GateKind& out) {
  if (up == "AND") out = GateKind::And;
  else if (up == "NAND") out = GateKind::Nand;
  else if (up == "OR") out = GateKind::Or;
  else if (up == "NOR") out = GateKind::Nor;
  else if (up == "XOR") out = GateKind::Xor;
  else if (up == "XNOR") out = GateKind::Xnor;
  else if (up == "NOT" || up == "INV") out = GateKind::Not;
  else if (up == "BUFF" || up == "BUF") out = GateKind::Buff;
  else if (up == "DFF") out = GateKind::Dff;
  else return false;
  return true;
}

void check_comb_acyclic_and_driven(const Circuit& c);

}  // namespace

Circuit parse_bench(std::string_view text, std::string name) {
  Circuit c;
  c.name = std::move(name);
  std::unordered_map<std::string, NetId> ids;
  auto net_id = [&](const std::string& n) {
    auto it = ids.find(n);
    if (it != ids.end()) return it->second;
    NetId id = static_cast<NetId>(c.net_names.size());
    c.net_names.push_back(n);
    c.driver.push_back(-1);
    ids.emplace(n, id);
    return id;
  };

  // Tracks which nets actually have a source: INPUT declaration or gate
  // output. driver[] alone cannot tell a PI from a merely referenced net.
  std::vector<bool> declared_input;
  std::vector<bool> declared_output;
  auto mark = [](std::vector<bool>& v, NetId n) {
    if (v.size() <= n) v.resize(n + 1, false);
    bool old = v[n];
    v[n] = true;
    return old;
  };

  Lexer lx{text};
  for (;;) {
    lx.skip_ws_and_comments();
    if (lx.eof()) break;
    int at_line = lx.line, at_col = lx.col;
    std::string first = lx.take_name();
    if (first.empty())
      throw ParseError("expected a declaration", at_line, at_col);

    auto expect = [&](char ch, const char* what) {
      lx.skip_ws_and_comments();
      if (lx.eof() || lx.peek() != ch)
        throw ParseError(std::string("expected '") + ch + "' " + what, lx.line,
                         lx.col);
      lx.advance();
    };
    auto take_operand = [&]() {
      lx.skip_ws_and_comments();
      int l = lx.line, cl = lx.col;
      std::string n = lx.take_name();
      if (n.empty()) throw ParseError("expected a net name", l, cl);
      return n;
    };

    std::string up = upper(first);
    if (up == "INPUT" || up == "OUTPUT") {
      expect('(', (up == "INPUT") ? "after INPUT" : "after OUTPUT");
      std::string n = take_operand();
      expect(')', "to close the declaration");
      NetId id = net_id(n);
      if (up == "INPUT") {
        if (mark(declared_input, id))
          throw ParseError("duplicate INPUT declaration of '" + n + "'",
                           at_line, at_col);
        c.inputs.push_back(id);
      } else {
        if (mark(declared_output, id))
          throw ParseError("duplicate OUTPUT declaration of '" + n + "'",
                           at_line, at_col);
        c.outputs.push_back(id);
      }
      continue;
    }

    // net = KIND(a,b,...)
    lx.skip_ws_and_comments();
    if (lx.eof() || lx.peek() != '=')
      throw ParseError("expected '=' after net name '" + first + "'", lx.line,
                       lx.col);
    lx.advance();
    lx.skip_ws_and_comments();
    int kind_line = lx.line, kind_col = lx.col;
    std::string kind_name = lx.take_name();
    if (kind_name.empty())
      throw ParseError("expected a gate kind", kind_line, kind_col);
    GateKind kind = GateKind::And;
    if (!kind_from_string(upper(kind_name), kind))
      throw ParseError("unknown gate kind '" + kind_name + "'", kind_line,
                       kind_col);
    expect('(', "after the gate kind");
    Gate g;
    g.kind = kind;
    for (;;) {
      g.in.push_back(net_id(take_operand()));
      lx.skip_ws_and_comments();
      if (!lx.eof() && lx.peek() == ',') {
        lx.advance();
        continue;
      }
      break;
    }
    expect(')', "to close the operand list");

    if (kind == GateKind::Dff && g.in.size() != 1)
      throw ParseError("DFF takes exactly one input, got " +
                           std::to_string(g.in.size()),
                       at_line, at_col);
    if ((kind == GateKind::Not || kind == GateKind::Buff) && g.in.size() != 1)
      throw ParseError(std::string(to_string(kind)) +
                           " takes exactly one input, got " +
                           std::to_string(g.in.size()),
                       at_line, at_col);
    if (is_logic_gate(kind) && g.in.size() < 2)
      throw ParseError(std::string(to_string(kind)) +
                           " needs at least two inputs",
                       at_line, at_col);

    NetId out = net_id(first);
    if (c.driver[out] >= 0 || (declared_input.size() > out && declared_input[out]))
      throw ParseError("net '" + first + "' is multiply driven", at_line,
                       at_col);
    g.out = out;
    c.driver[out] = static_cast<std::int32_t>(c.gates.size());
    if (kind == GateKind::Dff) c.dffs.push_back(static_cast<GateId>(c.gates.size()));
    c.gates.push_back(std::move(g));
  }

  // A gate output declared before INPUT(n) slips past the driver check above;
  // catch the reverse order too.
  for (NetId pi : c.inputs)
    if (c.driver[pi] >= 0)
      throw NetlistError("net '" + c.net_name(pi) + "' is multiply driven");

  check_comb_acyclic_and_driven(c);
  return c;
}

namespace {

void check_comb_acyclic_and_driven(const Circuit& c) {
  std::vector<bool> sourced(c.net_count(), false);
  for (NetId n : c.inputs) sourced[n] = true;
  for (const Gate& g : c.gates) sourced[g.out] = true;
  for (NetId n = 0; n < c.net_count(); ++n)
    if (!sourced[n])
      throw NetlistError("net '" + c.net_name(n) + "' is never driven");

  // DFF outputs break the cycle check; a purely combinational loop is fatal.
  (void)levelize(c);
}

}  // namespace

Circuit load_bench(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NetlistError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string base = path;
  if (auto slash = base.find_last_of("/\\"); slash != std::string::npos)
    base = base.substr(slash + 1);
  if (auto dot = base.find_last_of('.'); dot != std::string::npos && dot > 0)
    base = base.substr(0, dot);
  return parse_bench(ss.str(), base);
}

std::string to_bench(const Circuit& c) {
  std::ostringstream out;
  out << "# " << c.name << "\n";
  for (NetId n : c.inputs) out << "INPUT(" << c.net_name(n) << ")\n";
  for (NetId n : c.outputs) out << "OUTPUT(" << c.net_name(n) << ")\n";
  for (const Gate& g : c.gates) {
    out << c.net_name(g.out) << " = " << to_string(g.kind) << "(";
    for (std::size_t i = 0; i < g.in.size(); ++i) {
      if (i) out << ",";
      out << c.net_name(g.in[i]);
    }
    out << ")\n";
  }
  return out.str();
}

int count_gates(const Circuit& c, bool all_cells) {
  int n = 0;
  for (const Gate& g : c.gates)
    if (all_cells || is_logic_gate(g.kind)) ++n;
  return n;
}

std::vector<GateId> levelize(const Circuit& c) {
  // Kahn's algorithm, choosing the lowest-numbered ready gate first so the
  // order is deterministic. Inputs and DFF outputs are the sources.
  std::vector<int> pending(c.gates.size(), 0);
  std::vector<bool> ready(c.net_count(), false);
  for (NetId n : c.inputs) ready[n] = true;
  for (GateId d : c.dffs) ready[c.gates[d].out] = true;

  std::vector<std::vector<GateId>> loads(c.net_count());
  std::size_t comb_total = 0;
  for (GateId gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    if (g.kind == GateKind::Dff) continue;
    ++comb_total;
    for (NetId in : g.in) {
      if (ready[in]) continue;
      ++pending[gi];
      loads[in].push_back(gi);
    }
  }

  std::priority_queue<GateId, std::vector<GateId>, std::greater<>> q;
  for (GateId gi = 0; gi < c.gates.size(); ++gi)
    if (c.gates[gi].kind != GateKind::Dff && pending[gi] == 0) q.push(gi);

  std::vector<GateId> order;
  order.reserve(comb_total);
  while (!q.empty()) {
    GateId gi = q.top();
    q.pop();
    order.push_back(gi);
    NetId out = c.gates[gi].out;
    if (ready[out]) continue;
    ready[out] = true;
    for (GateId load : loads[out])
      if (--pending[load] == 0) q.push(load);
  }

  if (order.size() != comb_total) {
    for (GateId gi = 0; gi < c.gates.size(); ++gi) {
      const Gate& g = c.gates[gi];
      if (g.kind != GateKind::Dff && pending[gi] > 0)
        throw NetlistError("combinational cycle through net '" +
                           c.net_name(g.out) + "'");
    }
  }
  return order;
}

ScanView scan_view(const Circuit& c) {
  ScanView v;
  v.circuit = &c;
  v.inputs = c.inputs;
  v.n_pis = c.inputs.size();
  for (GateId d : c.dffs) v.inputs.push_back(c.gates[d].out);
  v.outputs = c.outputs;
  v.n_pos = c.outputs.size();
  for (GateId d : c.dffs) v.outputs.push_back(c.gates[d].in[0]);

  v.schedule = levelize(c);
  v.level.assign(c.net_count(), 0);
  for (GateId gi : v.schedule) {
    const Gate& g = c.gates[gi];
    int lv = 0;
    for (NetId in : g.in) lv = std::max(lv, v.level[in]);
    v.level[g.out] = lv + 1;
  }
  return v;
}

}  // namespace soctat
