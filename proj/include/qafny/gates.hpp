#pragma once

// Flat gate programs over concrete qubits: the compilation target shared by
// the oracle lowering and the statement compiler, plus OpenQASM 2.0 text I/O.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qafny/diag.hpp"
#include "qafny/locus.hpp"

namespace qafny {

struct GateProgram;

// RZ here is the phase gate diag(1, e^{2*pi*i*num/2^den}); angles are exact
// dyadic turns so repeated halving in controlled decompositions stays exact.
struct Gate {
  enum class Kind { H, X, RZ, CX, CCX, Measure, Ctrl };
  Kind kind = Kind::H;
  int a = 0, b = 0, c = 0;  // qubit operands; Measure uses a=qubit, b=cbit
  std::int64_t num = 0;     // RZ turns numerator
  int den = 0;              // RZ turns denominator exponent
  std::shared_ptr<GateProgram> body;  // Ctrl: a = control wire
};

struct GateProgram {
  int d = 0;  // qubit count (wires [0, d))
  std::vector<Gate> gates;
};

inline Gate g_h(int q) { return {Gate::Kind::H, q, 0, 0, 0, 0, nullptr}; }
inline Gate g_x(int q) { return {Gate::Kind::X, q, 0, 0, 0, 0, nullptr}; }
inline Gate g_cx(int a, int b) { return {Gate::Kind::CX, a, b, 0, 0, 0, nullptr}; }
inline Gate g_ccx(int a, int b, int c) {
  return {Gate::Kind::CCX, a, b, c, 0, 0, nullptr};
}
inline Gate g_measure(int q, int cbit) {
  return {Gate::Kind::Measure, q, cbit, 0, 0, 0, nullptr};
}
inline Gate g_ctrl(int control, GateProgram body) {
  Gate g{Gate::Kind::Ctrl, control, 0, 0, 0, 0,
         std::make_shared<GateProgram>(std::move(body))};
  return g;
}

// Reduce num/2^den turns to odd numerator in (-2^(den-1), 2^(den-1)] with
// den >= 1, or to 0/1 for whole turns.
inline void normalize_turns(std::int64_t& num, int& den) {
  while (den > 0 && num % 2 == 0) {
    num /= 2;
    --den;
  }
  if (den == 0) {  // whole turns are the identity
    num = 0;
    den = 1;
    return;
  }
  const std::int64_t full = std::int64_t(1) << den;
  num = ((num % full) + full) % full;
  if (num > full / 2) num -= full;
  if (num == 0) den = 1;
}

inline Gate g_rz(std::int64_t num, int den, int q) {
  normalize_turns(num, den);
  return {Gate::Kind::RZ, q, 0, 0, num, den, nullptr};
}

// Append an RZ, dropping whole-turn identities.
inline void add_rz(GateProgram& p, std::int64_t num, int den, int q) {
  Gate g = g_rz(num, den, q);
  if (g.num != 0) p.gates.push_back(g);
}

inline std::vector<int> gate_operands(const Gate& g) {
  switch (g.kind) {
    case Gate::Kind::H:
    case Gate::Kind::X:
    case Gate::Kind::RZ: return {g.a};
    case Gate::Kind::CX: return {g.a, g.b};
    case Gate::Kind::CCX: return {g.a, g.b, g.c};
    case Gate::Kind::Measure: return {g.a};
    case Gate::Kind::Ctrl: {
      std::vector<int> ws{g.a};
      for (const auto& inner : g.body->gates)
        for (int w : gate_operands(inner)) ws.push_back(w);
      return ws;
    }
  }
  return {};
}

// ---- layout: program positions to concrete wires ----

struct Layout {
  std::map<Pos, int> wire_of;
  std::vector<Pos> pos_of;  // inverse map for declared qubits
  int declared = 0;         // wires owned by declarations
  int total = 0;            // declared + ancillas handed out

  int wire(const Pos& p) const {
    auto it = wire_of.find(p);
    if (it == wire_of.end())
      throw Error(ErrCat::Type, "UnboundVariable: no wire for " + p.var + "[" +
                                    std::to_string(p.idx) + "]");
    return it->second;
  }
};

inline Layout make_layout(const std::vector<std::pair<std::string, int>>& decls) {
  Layout lay;
  for (const auto& [name, n] : decls)
    for (int i = 0; i < n; ++i) {
      lay.wire_of[{name, i}] = lay.total;
      lay.pos_of.push_back({name, i});
      ++lay.total;
    }
  lay.declared = lay.total;
  return lay;
}

// Scratch wires for multi-control ladders; released wires are reused, and the
// ladder constructions always return them to |0>.
struct AncillaPool {
  int base = 0;
  int used = 0;
  std::vector<int> free_list;

  int acquire() {
    if (!free_list.empty()) {
      int w = free_list.back();
      free_list.pop_back();
      return w;
    }
    return base + used++;
  }
  void release(int w) { free_list.push_back(w); }
  int total() const { return base + used; }
};

// ---- controlled expansion ----

namespace detail {

inline void ctrl_gate(int control, const Gate& g, GateProgram& out,
                      AncillaPool& pool) {
  for (int w : gate_operands(g))
    if (w == control)
      throw Error(ErrCat::Type,
                  "ControlTargetOverlap: control wire " +
                      std::to_string(control) + " appears in controlled body");
  switch (g.kind) {
    case Gate::Kind::X:
      out.gates.push_back(g_cx(control, g.a));
      return;
    case Gate::Kind::CX:
      out.gates.push_back(g_ccx(control, g.a, g.b));
      return;
    case Gate::Kind::H: {
      // S t; H t; T t; CX c,t; Tdg t; H t; Sdg t  == controlled-H exactly
      const int t = g.a;
      add_rz(out, 1, 2, t);
      out.gates.push_back(g_h(t));
      add_rz(out, 1, 3, t);
      out.gates.push_back(g_cx(control, t));
      add_rz(out, -1, 3, t);
      out.gates.push_back(g_h(t));
      add_rz(out, -1, 2, t);
      return;
    }
    case Gate::Kind::RZ: {
      // controlled-phase: P c (r/2); CX; P t (-r/2); CX; P t (r/2)
      const int t = g.a;
      add_rz(out, g.num, g.den + 1, control);
      out.gates.push_back(g_cx(control, t));
      add_rz(out, -g.num, g.den + 1, t);
      out.gates.push_back(g_cx(control, t));
      add_rz(out, g.num, g.den + 1, t);
      return;
    }
    case Gate::Kind::CCX: {
      // The pool may offer a wire that this very gate touches (a nested ladder
      // just released it); keep drawing until the scratch wire is distinct.
      std::vector<int> busy;
      int anc = pool.acquire();
      while (anc == control || anc == g.a || anc == g.b || anc == g.c) {
        busy.push_back(anc);
        anc = pool.acquire();
      }
      for (int w : busy) pool.release(w);
      out.gates.push_back(g_ccx(control, g.a, anc));
      out.gates.push_back(g_ccx(anc, g.b, g.c));
      out.gates.push_back(g_ccx(control, g.a, anc));
      pool.release(anc);
      return;
    }
    case Gate::Kind::Ctrl: {
      GateProgram inner;
      inner.d = out.d;
      for (const auto& ig : g.body->gates) ctrl_gate(g.a, ig, inner, pool);
      for (const auto& ig : inner.gates) ctrl_gate(control, ig, out, pool);
      return;
    }
    case Gate::Kind::Measure:
      throw Error(ErrCat::Type, "ControlTargetOverlap: cannot control a measurement");
  }
}

}  // namespace detail

inline GateProgram ctrl_wrap(int control, const GateProgram& body,
                             AncillaPool& pool) {
  GateProgram out;
  out.d = body.d;
  for (const auto& g : body.gates) detail::ctrl_gate(control, g, out, pool);
  return out;
}

// Resolve every Ctrl node into primitive gates.
inline GateProgram flatten(const GateProgram& p, AncillaPool& pool) {
  GateProgram out;
  out.d = p.d;
  for (const auto& g : p.gates) {
    if (g.kind == Gate::Kind::Ctrl) {
      GateProgram sub = ctrl_wrap(g.a, flatten(*g.body, pool), pool);
      for (auto& ig : sub.gates) out.gates.push_back(std::move(ig));
    } else {
      out.gates.push_back(g);
    }
  }
  if (pool.total() > out.d) out.d = pool.total();
  return out;
}

// ---- OpenQASM 2.0 emission ----

namespace detail {

inline std::string rz_angle(std::int64_t num, int den) {
  // num/2^den turns -> num*pi/2^(den-1) radians, num odd, den >= 1
  const int k = den - 1;
  std::string head;
  if (num == 1)
    head = "pi";
  else if (num == -1)
    head = "-pi";
  else
    head = std::to_string(num) + "*pi";
  if (k == 0) return head;
  if (k == 1) return head + "/2";
  return head + "/2^" + std::to_string(k);
}

}  // namespace detail

inline std::string emit_qasm(const GateProgram& p) {
  std::ostringstream os;
  os << "OPENQASM 2.0;\n";
  os << "include \"qelib1.inc\";\n";
  os << "qreg q[" << p.d << "];\n";
  os << "creg c[" << p.d << "];\n";
  for (const auto& g : p.gates) {
    switch (g.kind) {
      case Gate::Kind::H: os << "h q[" << g.a << "];\n"; break;
      case Gate::Kind::X: os << "x q[" << g.a << "];\n"; break;
      case Gate::Kind::RZ:
        os << "rz(" << detail::rz_angle(g.num, g.den) << ") q[" << g.a << "];\n";
        break;
      case Gate::Kind::CX:
        os << "cx q[" << g.a << "],q[" << g.b << "];\n";
        break;
      case Gate::Kind::CCX:
        os << "ccx q[" << g.a << "],q[" << g.b << "],q[" << g.c << "];\n";
        break;
      case Gate::Kind::Measure:
        os << "measure q[" << g.a << "] -> c[" << g.b << "];\n";
        break;
      case Gate::Kind::Ctrl:
        throw Error(ErrCat::Type, "IllFormedState: unflattened control block at emission");
    }
  }
  return os.str();
}

// ---- minimal OpenQASM 2.0 reader (round-trips emit_qasm output) ----

namespace detail {

struct QasmCursor {
  const std::string& s;
  std::size_t i = 0;
  int line = 1;

  void skip_ws() {
    while (i < s.size()) {
      if (s[i] == '\n') { ++line; ++i; }
      else if (std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      else if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '/') {
        while (i < s.size() && s[i] != '\n') ++i;
      } else break;
    }
  }
  bool eat(const std::string& word) {
    skip_ws();
    if (s.compare(i, word.size(), word) == 0) {
      i += word.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& word) {
    if (!eat(word))
      throw Error(ErrCat::Parse, "SyntaxError: expected '" + word + "'", line, 0);
  }
  std::int64_t integer() {
    skip_ws();
    bool neg = false;
    if (i < s.size() && s[i] == '-') { neg = true; ++i; }
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
      throw Error(ErrCat::Parse, "SyntaxError: expected integer", line, 0);
    std::int64_t v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
      v = v * 10 + (s[i++] - '0');
    return neg ? -v : v;
  }
  int wire(char reg) {
    skip_ws();
    if (i >= s.size() || s[i] != reg)
      throw Error(ErrCat::Parse, std::string("SyntaxError: expected register '") + reg + "'", line, 0);
    ++i;
    expect("[");
    int w = static_cast<int>(integer());
    expect("]");
    return w;
  }
};

// Parse the angle grammar emitted above: [-][N*]pi[/2[^k]]  (also accepts a
// plain power of two denominator like pi/8).
inline std::pair<std::int64_t, int> qasm_angle(QasmCursor& c) {
  c.skip_ws();
  std::int64_t num = 1;
  bool neg = false;
  if (c.i < c.s.size() && c.s[c.i] == '-') { neg = true; ++c.i; }
  c.skip_ws();
  if (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) {
    num = c.integer();
    c.expect("*");
  }
  c.expect("pi");
  if (neg) num = -num;
  int den = 1;  // pi = half turn
  if (c.eat("/")) {
    std::int64_t d = c.integer();
    int k = 0;
    if (c.eat("^")) {
      if (d != 2)
        throw Error(ErrCat::Parse, "SyntaxError: only powers of two in angles", c.line, 0);
      k = static_cast<int>(c.integer());
    } else {
      while (d > 1 && d % 2 == 0) { d /= 2; ++k; }
      if (d != 1)
        throw Error(ErrCat::Parse, "SyntaxError: only powers of two in angles", c.line, 0);
    }
    den += k;
  }
  return {num, den};
}

}  // namespace detail

inline GateProgram read_qasm(const std::string& text) {
  detail::QasmCursor c{text};
  GateProgram p;
  c.expect("OPENQASM");
  c.expect("2.0");
  c.expect(";");
  c.expect("include");
  c.expect("\"qelib1.inc\"");
  c.expect(";");
  c.expect("qreg");
  p.d = c.wire('q');
  c.expect(";");
  if (c.eat("creg")) {
    c.wire('c');
    c.expect(";");
  }
  while (true) {
    c.skip_ws();
    if (c.i >= text.size()) break;
    if (c.eat("h")) {
      p.gates.push_back(g_h(c.wire('q')));
    } else if (c.eat("x")) {
      p.gates.push_back(g_x(c.wire('q')));
    } else if (c.eat("rz")) {
      c.expect("(");
      auto [num, den] = detail::qasm_angle(c);
      c.expect(")");
      add_rz(p, num, den, c.wire('q'));
    } else if (c.eat("ccx")) {
      int a = c.wire('q');
      c.expect(",");
      int b = c.wire('q');
      c.expect(",");
      p.gates.push_back(g_ccx(a, b, c.wire('q')));
    } else if (c.eat("cx")) {
      int a = c.wire('q');
      c.expect(",");
      p.gates.push_back(g_cx(a, c.wire('q')));
    } else if (c.eat("measure")) {
      int q = c.wire('q');
      c.expect("->");
      p.gates.push_back(g_measure(q, c.wire('c')));
    } else {
      throw Error(ErrCat::Parse, "SyntaxError: unknown gate", c.line, 0);
    }
    c.expect(";");
  }
  for (const auto& g : p.gates)
    for (int w : gate_operands(g))
      if (w >= p.d)
        throw Error(ErrCat::Parse, "RangeOutOfBounds: wire exceeds qreg size", 0, 0);
  return p;
}

}  // namespace qafny
