#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qafny/ast.hpp"
#include "qafny/lexer.hpp"

namespace qafny {

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  Program parse_program() {
    Program p;
    while (at_kw("qubit")) p.decls.push_back(parse_decl());
    while (at_kw("def")) p.procs.push_back(parse_proc());
    while (!at(Tok::End)) p.body.push_back(parse_stmt());
    std::set<std::string> names;
    for (const auto& d : p.decls)
      if (!names.insert(d.name).second)
        throw Error(ErrCat::Parse, "SyntaxError: duplicate declaration of " + d.name,
                    d.line, d.col);
    return p;
  }

  PredPtr parse_predicate() {
    PredPtr p = parse_pred();
    expect(Tok::End, "end of predicate");
    return p;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k = 1) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(const char* w) const {
    return cur().kind == Tok::Ident && cur().text == w;
  }
  Token eat() { return toks_[pos_++]; }
  Token expect(Tok k, const char* what) {
    if (!at(k))
      throw Error(ErrCat::Parse,
                  std::string("SyntaxError: expected ") + what + ", found '" +
                      cur().text + "'",
                  cur().line, cur().col);
    return eat();
  }
  Token expect_kw(const char* w) {
    if (!at_kw(w))
      throw Error(ErrCat::Parse,
                  std::string("SyntaxError: expected '") + w + "', found '" +
                      cur().text + "'",
                  cur().line, cur().col);
    return eat();
  }

  QubitDecl parse_decl() {
    Token kw = expect_kw("qubit");
    Token name = expect(Tok::Ident, "variable name");
    expect(Tok::LBracket, "'['");
    Token n = expect(Tok::Num, "qubit count");
    expect(Tok::RBracket, "']'");
    expect(Tok::Semi, "';'");
    return QubitDecl{name.text, n.num, kw.line, kw.col};
  }

  ProcDef parse_proc() {
    expect_kw("def");
    ProcDef d;
    d.name = expect(Tok::Ident, "procedure name").text;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      d.params.push_back(expect(Tok::Ident, "parameter").text);
      while (at(Tok::Comma)) {
        eat();
        d.params.push_back(expect(Tok::Ident, "parameter").text);
      }
    }
    expect(Tok::RParen, "')'");
    d.body = parse_block();
    return d;
  }

  Block parse_block() {
    expect(Tok::LBrace, "'{'");
    Block b;
    while (!at(Tok::RBrace)) b.push_back(parse_stmt());
    eat();
    return b;
  }

  // ---- expressions ----

  AExpPtr parse_aexp() { return parse_additive(); }

  AExpPtr parse_additive() {
    AExpPtr l = parse_multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      char op = eat().text[0];
      l = mk_bin(op, l, parse_multiplicative());
    }
    return l;
  }

  AExpPtr parse_multiplicative() {
    AExpPtr l = parse_power();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      char op = eat().text[0];
      l = mk_bin(op, l, parse_power());
    }
    return l;
  }

  AExpPtr parse_power() {
    AExpPtr base = parse_atom();
    if (at(Tok::Caret)) {
      eat();
      return mk_bin('^', base, parse_power());  // right-associative
    }
    return base;
  }

  AExpPtr parse_atom() {
    const Token& t = cur();
    if (at(Tok::Num)) {
      eat();
      auto e = mk_num(t.num);
      e->line = t.line; e->col = t.col;
      return e;
    }
    if (at(Tok::LParen)) {
      eat();
      AExpPtr e = parse_aexp();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::Ident)) {
      eat();
      if (at(Tok::LBracket)) {
        ARange r = finish_range(t.text);
        auto e = std::make_shared<AExp>(AExp{r, t.line, t.col});
        return e;
      }
      auto e = mk_var(t.text);
      e->line = t.line; e->col = t.col;
      return e;
    }
    throw Error(ErrCat::Parse,
                "SyntaxError: expected expression, found '" + t.text + "'", t.line,
                t.col);
  }

  // After `ident [` has been committed: x[i] or x[a,b).
  ARange finish_range(const std::string& var) {
    expect(Tok::LBracket, "'['");
    ARange r;
    r.var = var;
    r.lo = parse_aexp();
    if (at(Tok::Comma)) {
      eat();
      r.hi = parse_aexp();
      expect(Tok::RParen, "')' closing half-open range");
    } else {
      expect(Tok::RBracket, "']'");
    }
    return r;
  }

  LocusExpr parse_locus() {
    LocusExpr l;
    std::string var = expect(Tok::Ident, "range variable").text;
    l.ranges.push_back(finish_range(var));
    while (at(Tok::PlusPlus)) {
      eat();
      var = expect(Tok::Ident, "range variable").text;
      l.ranges.push_back(finish_range(var));
    }
    return l;
  }

  BExp parse_bexp() {
    const int line = cur().line, col = cur().col;
    AExpPtr l = parse_aexp();
    if (at(Tok::Lt) || at(Tok::Le) || at(Tok::EqEq) || at(Tok::Ne) || at(Tok::Ge) ||
        at(Tok::Gt)) {
      BCmp c;
      c.op = eat().text;
      c.l = l;
      c.r = parse_aexp();
      if (at(Tok::At)) {
        eat();
        std::string var = expect(Tok::Ident, "result qubit variable").text;
        c.result = finish_range(var);
      }
      return BExp{c, line, col};
    }
    if (auto* r = std::get_if<ARange>(&l->node)) return BExp{BBare{*r}, line, col};
    throw Error(ErrCat::Parse, "SyntaxError: expected comparison or qubit guard",
                line, col);
  }

  // ---- statements ----

  Stmt parse_stmt() {
    const int line = cur().line, col = cur().col;
    if (at_kw("skip")) {
      eat();
      expect(Tok::Semi, "';'");
      return Stmt{SSkip{}, line, col};
    }
    if (at_kw("let")) return parse_let(line, col);
    if (at_kw("if")) return parse_if(line, col);
    if (at_kw("for")) return parse_for(line, col);
    if (at_kw("assert")) {
      eat();
      expect(Tok::LBrace, "'{'");
      PredPtr p = parse_pred();
      expect(Tok::RBrace, "'}'");
      expect(Tok::Semi, "';'");
      return Stmt{SAssert{p}, line, col};
    }
    if (at(Tok::Ident) && peek().kind == Tok::LParen) {
      SCall c;
      c.name = eat().text;
      eat();
      if (!at(Tok::RParen)) {
        c.args.push_back(expect(Tok::Ident, "argument").text);
        while (at(Tok::Comma)) {
          eat();
          c.args.push_back(expect(Tok::Ident, "argument").text);
        }
      }
      expect(Tok::RParen, "')'");
      expect(Tok::Semi, "';'");
      return Stmt{c, line, col};
    }
    return parse_apply(line, col);
  }

  Stmt parse_let(int line, int col) {
    expect_kw("let");
    std::string x = expect(Tok::Ident, "binder").text;
    expect(Tok::Eq, "'='");
    if (at_kw("measure")) {
      eat();
      expect(Tok::LParen, "'('");
      std::string y = expect(Tok::Ident, "measured variable").text;
      expect(Tok::RParen, "')'");
      expect_kw("in");
      return Stmt{SLetM{x, y, parse_block()}, line, col};
    }
    AExpPtr rhs = parse_aexp();
    expect_kw("in");
    return Stmt{SLetC{x, rhs, parse_block()}, line, col};
  }

  Stmt parse_if(int line, int col) {
    expect_kw("if");
    expect(Tok::LParen, "'('");
    BExp g = parse_bexp();
    expect(Tok::RParen, "')'");
    Block body = parse_block();
    if (is_quantum_guard(g)) {
      if (at_kw("else"))
        throw Error(ErrCat::Parse,
                    "SyntaxError: quantum conditional cannot take 'else'",
                    cur().line, cur().col);
      return Stmt{SQIf{g, std::move(body)}, line, col};
    }
    SCIf c;
    c.cond = g;
    c.thn = std::move(body);
    if (at_kw("else")) {
      eat();
      c.els = parse_block();
    }
    return Stmt{std::move(c), line, col};
  }

  Stmt parse_for(int line, int col) {
    expect_kw("for");
    SFor f;
    f.x = expect(Tok::Ident, "loop variable").text;
    expect_kw("in");
    expect(Tok::LBracket, "'['");
    f.lo = parse_aexp();
    expect(Tok::Comma, "','");
    f.hi = parse_aexp();
    expect(Tok::RParen, "')'");
    if (at(Tok::AndAnd)) {
      eat();
      f.guard = parse_bexp();
    }
    f.body = parse_block();
    return Stmt{std::move(f), line, col};
  }

  Stmt parse_apply(int line, int col) {
    SApply s;
    s.target = parse_locus();
    if (at(Tok::PlusEq)) {
      eat();
      s.u.kind = Unitary::Kind::Oracle;
      s.u.oracle.kind = Oracle::Kind::AddConst;
      s.u.oracle.a = parse_aexp();
    } else if (at(Tok::ColonEq)) {
      eat();
      s.u = parse_modmul_unitary();
    } else {
      expect(Tok::StarEq, "'*='");
      s.u = parse_unitary();
    }
    expect(Tok::Semi, "';'");
    return Stmt{std::move(s), line, col};
  }

  Unitary parse_modmul_unitary() {
    Unitary u;
    u.kind = Unitary::Kind::Oracle;
    if (at_kw("mulmod"))
      u.oracle.kind = Oracle::Kind::MulMod;
    else if (at_kw("powmod"))
      u.oracle.kind = Oracle::Kind::PowMod;
    else
      throw Error(ErrCat::Parse, "SyntaxError: ':=' takes mulmod or powmod",
                  cur().line, cur().col);
    eat();
    expect(Tok::LParen, "'('");
    u.oracle.a = parse_aexp();
    expect(Tok::Comma, "','");
    u.oracle.modn = parse_aexp();
    expect(Tok::RParen, "')'");
    return u;
  }

  Unitary parse_unitary() {
    Unitary u;
    if (at_kw("H")) { eat(); u.kind = Unitary::Kind::H; return u; }
    if (at_kw("QFT")) { eat(); u.kind = Unitary::Kind::QFT; return u; }
    if (at_kw("RQFT")) { eat(); u.kind = Unitary::Kind::RQFT; return u; }
    if (at_kw("dis")) { eat(); u.kind = Unitary::Kind::Dis; return u; }
    if (at_kw("reduce")) {
      eat();
      u.kind = Unitary::Kind::Reduce;
      expect(Tok::LParen, "'('");
      u.reduce_bits = expect(Tok::Num, "bitstring").text;
      expect(Tok::Comma, "','");
      u.reduce_n = expect(Tok::Num, "precision").num;
      expect(Tok::RParen, "')'");
      return u;
    }
    if (at_kw("mulmod") || at_kw("powmod")) return parse_modmul_unitary();
    if (at(Tok::Plus)) {
      eat();
      u.kind = Unitary::Kind::Oracle;
      u.oracle.kind = Oracle::Kind::AddConst;
      u.oracle.a = parse_aexp();
      return u;
    }
    if (at_kw("oqasm")) {
      eat();
      u.kind = Unitary::Kind::Oracle;
      u.oracle.kind = Oracle::Kind::Raw;
      expect(Tok::LBrace, "'{'");
      while (!at(Tok::RBrace)) u.oracle.body.push_back(parse_oq_inst());
      eat();
      return u;
    }
    throw Error(ErrCat::Parse, "SyntaxError: unknown unitary '" + cur().text + "'",
                cur().line, cur().col);
  }

  OqInst parse_oq_inst() {
    const Token t = expect(Tok::Ident, "OQASM instruction");
    OqInst i;
    i.line = t.line;
    i.col = t.col;
    auto num = [&]() { return static_cast<int>(expect(Tok::Num, "number").num); };
    if (t.text == "ID") { i.op = OqInst::Op::Id; i.q = num(); }
    else if (t.text == "X") { i.op = OqInst::Op::X; i.q = num(); }
    else if (t.text == "RZ") { i.op = OqInst::Op::Rz; i.m = num(); i.q = num(); }
    else if (t.text == "RZinv") { i.op = OqInst::Op::Rzinv; i.m = num(); i.q = num(); }
    else if (t.text == "SR") { i.op = OqInst::Op::Sr; i.m = num(); }
    else if (t.text == "SRinv") { i.op = OqInst::Op::Srinv; i.m = num(); }
    else if (t.text == "QFT") { i.op = OqInst::Op::Qft; i.m = num(); }
    else if (t.text == "RQFT") { i.op = OqInst::Op::Rqft; i.m = num(); }
    else if (t.text == "Lshift") { i.op = OqInst::Op::Lshift; }
    else if (t.text == "Rshift") { i.op = OqInst::Op::Rshift; }
    else if (t.text == "Rev") { i.op = OqInst::Op::Rev; }
    else if (t.text == "CU") {
      i.op = OqInst::Op::Cu;
      i.q = num();
      expect(Tok::LBrace, "'{'");
      while (!at(Tok::RBrace)) i.body.push_back(parse_oq_inst());
      eat();
    } else {
      throw Error(ErrCat::Parse, "SyntaxError: unknown OQASM instruction '" + t.text + "'",
                  t.line, t.col);
    }
    if (at(Tok::Semi)) eat();
    return i;
  }

  // ---- predicates ----

  bool is_quantum_guard(const BExp& b) const {
    if (std::holds_alternative<BBare>(b.node)) return true;
    const auto& c = std::get<BCmp>(b.node);
    if (c.result) return true;
    std::function<bool(const AExpPtr&)> has_range = [&](const AExpPtr& e) -> bool {
      if (!e) return false;
      if (std::holds_alternative<ARange>(e->node)) return true;
      if (auto* bin = std::get_if<ABin>(&e->node))
        return has_range(bin->l) || has_range(bin->r);
      return false;
    };
    return has_range(c.l) || has_range(c.r);
  }

  PredPtr parse_pred() {
    PredPtr l = parse_pred_conjunct();
    while (at(Tok::Star) || at(Tok::AndAnd)) {
      bool sep = at(Tok::Star);
      eat();
      PredPtr r = parse_pred_conjunct();
      auto n = std::make_shared<Pred>();
      if (sep)
        n->node = PSep{l, r};
      else
        n->node = PAnd{l, r};
      l = n;
    }
    return l;
  }

  PredPtr parse_pred_conjunct() {
    const int line = cur().line, col = cur().col;
    auto p = std::make_shared<Pred>();
    p->line = line;
    p->col = col;
    if (at_kw("F") || at_kw("U") || at_kw("M")) {
      p->node = PMaps{parse_pred_locus(), KetExpr{}};
      auto& m = std::get<PMaps>(p->node);
      expect(Tok::MapsTo, "'|->'");
      m.ket = parse_ketexpr();
      return p;
    }
    // Try a maps-to conjunct; rewind to a comparison on failure.
    const std::size_t save = pos_;
    try {
      PredLocus where;
      where.form = PredLocus::Form::Plain;
      where.locus = parse_locus();
      expect(Tok::MapsTo, "'|->'");
      p->node = PMaps{std::move(where), parse_ketexpr()};
      return p;
    } catch (const Error&) {
      pos_ = save;
    }
    PCmp c;
    c.l = parse_aexp();
    if (!(at(Tok::Lt) || at(Tok::Le) || at(Tok::EqEq) || at(Tok::Ne) || at(Tok::Ge) ||
          at(Tok::Gt)))
      throw Error(ErrCat::Parse, "SyntaxError: expected comparison in predicate",
                  cur().line, cur().col);
    c.op = eat().text;
    c.r = parse_aexp();
    p->node = std::move(c);
    return p;
  }

  PredLocus parse_pred_locus() {
    PredLocus pl;
    if (at_kw("F") || at_kw("U")) {
      pl.form = cur().text == "F" ? PredLocus::Form::F : PredLocus::Form::U;
      eat();
      expect(Tok::LParen, "'('");
      pl.guard = parse_bexp();
      expect(Tok::Semi, "';'");
      pl.locus = parse_locus();
      expect(Tok::Semi, "';'");
      pl.locus2 = parse_locus();
      expect(Tok::RParen, "')'");
      return pl;
    }
    expect_kw("M");
    pl.form = PredLocus::Form::M;
    expect(Tok::LParen, "'('");
    pl.mvar = expect(Tok::Ident, "measurement variable").text;
    expect(Tok::Comma, "','");
    pl.marg = parse_aexp();
    expect(Tok::Semi, "';'");
    pl.locus = parse_locus();
    expect(Tok::RParen, "')'");
    return pl;
  }

  KetExpr parse_ketexpr() {
    KetExpr k;
    if (at_kw("sum")) {
      eat();
      k.sum_idx = expect(Tok::Ident, "summation index").text;
      expect_kw("in");
      expect(Tok::LBracket, "'['");
      k.sum_lo = parse_aexp();
      expect(Tok::Comma, "','");
      k.sum_hi = parse_aexp();
      expect(Tok::RParen, "')'");
      expect(Tok::Colon, "':'");
    }
    k.terms.push_back(parse_ketterm());
    while (at(Tok::Plus)) {
      eat();
      k.terms.push_back(parse_ketterm());
    }
    return k;
  }

  KetTerm parse_ketterm() {
    KetTerm t;
    bool neg = false;
    if (at(Tok::Minus)) { eat(); neg = true; }
    while (!at(Tok::Pipe)) {
      AmpFactor f;
      if (!t.amp.empty()) {
        if (at(Tok::Star)) eat();
        else if (at(Tok::Slash)) { eat(); f.inverted = true; }
        else break;
      }
      if (at_kw("sqrt")) {
        eat();
        f.kind = AmpFactor::Kind::Sqrt;
        expect(Tok::LParen, "'('");
        f.num = parse_aexp();
        expect(Tok::RParen, "')'");
      } else if (at_kw("alpha")) {
        eat();
        f.kind = AmpFactor::Kind::Alpha;
        expect(Tok::LParen, "'('");
        AExpPtr arg = parse_aexp();
        if (auto* b = std::get_if<ABin>(&arg->node); b && b->op == '/') {
          f.num = b->l;
          f.den = b->r;
        } else {
          f.num = arg;
        }
        expect(Tok::RParen, "')'");
      } else if (at(Tok::Num)) {
        f.kind = AmpFactor::Kind::Ratio;
        f.num = mk_num(eat().num);
      } else if (at(Tok::LParen)) {
        eat();
        f.kind = AmpFactor::Kind::Ratio;
        f.num = parse_aexp();
        expect(Tok::RParen, "')'");
      } else {
        throw Error(ErrCat::Parse,
                    "SyntaxError: expected amplitude factor or ket, found '" +
                        cur().text + "'",
                    cur().line, cur().col);
      }
      t.amp.push_back(std::move(f));
    }
    if (neg) {
      if (t.amp.empty()) {
        AmpFactor one;
        one.kind = AmpFactor::Kind::Ratio;
        one.num = mk_num(1);
        t.amp.push_back(std::move(one));
      }
      t.amp.front().negate = true;
    }
    do {
      expect(Tok::Pipe, "'|'");
      t.atoms.push_back(parse_ketatom());
      expect(Tok::Gt, "'>'");
    } while (at(Tok::Pipe));
    return t;
  }

  KetAtom parse_ketatom() {
    KetAtom a;
    if (at_kw("rep")) {
      eat();
      a.kind = KetAtom::Kind::Rep;
      expect(Tok::LParen, "'('");
      a.a = parse_aexp();
      expect(Tok::Comma, "','");
      a.n = parse_aexp();
      expect(Tok::RParen, "')'");
      return a;
    }
    if (at_kw("bits")) {
      eat();
      a.kind = KetAtom::Kind::Value;
      expect(Tok::LParen, "'('");
      a.a = parse_aexp();
      expect(Tok::Comma, "','");
      a.n = parse_aexp();
      expect(Tok::RParen, "')'");
      return a;
    }
    if (at(Tok::Num)) {
      a.kind = KetAtom::Kind::BitLiteral;
      a.bits = eat().text;
      for (char c : a.bits)
        if (c != '0' && c != '1')
          throw Error(ErrCat::Parse, "SyntaxError: ket literal must be bits",
                      cur().line, cur().col);
      return a;
    }
    throw Error(ErrCat::Parse, "SyntaxError: expected ket basis", cur().line,
                cur().col);
  }
};

inline Program parse_program(const std::string& src) {
  return Parser(src).parse_program();
}

inline PredPtr parse_predicate(const std::string& src) {
  return Parser(src).parse_predicate();
}

// Inline procedure calls by renaming qubit parameters to the call arguments.
// Procedures may call only procedures defined before them, so expansion
// terminates.
namespace detail {

inline void rename_aexp(AExpPtr& e, const std::map<std::string, std::string>& m);

inline void rename_arange(ARange& r, const std::map<std::string, std::string>& m) {
  if (auto it = m.find(r.var); it != m.end()) r.var = it->second;
  rename_aexp(r.lo, m);
  if (r.hi) rename_aexp(r.hi, m);
}

inline void rename_aexp(AExpPtr& e, const std::map<std::string, std::string>& m) {
  if (!e) return;
  auto copy = std::make_shared<AExp>(*e);
  if (auto* v = std::get_if<AVar>(&copy->node)) {
    if (auto it = m.find(v->name); it != m.end()) v->name = it->second;
  } else if (auto* r = std::get_if<ARange>(&copy->node)) {
    rename_arange(*r, m);
  } else if (auto* b = std::get_if<ABin>(&copy->node)) {
    rename_aexp(b->l, m);
    rename_aexp(b->r, m);
  }
  e = copy;
}

inline void rename_bexp(BExp& b, const std::map<std::string, std::string>& m) {
  if (auto* g = std::get_if<BBare>(&b.node)) {
    rename_arange(g->qubit, m);
    return;
  }
  auto& c = std::get<BCmp>(b.node);
  rename_aexp(c.l, m);
  rename_aexp(c.r, m);
  if (c.result) rename_arange(*c.result, m);
}

inline void rename_block(Block& b, const std::map<std::string, std::string>& m);

inline void rename_stmt(Stmt& s, const std::map<std::string, std::string>& m) {
  std::visit(overloaded{
                 [](SSkip&) {},
                 [&](SLetC& l) {
                   rename_aexp(l.rhs, m);
                   rename_block(l.body, m);
                 },
                 [&](SLetM& l) {
                   if (auto it = m.find(l.measured); it != m.end())
                     l.measured = it->second;
                   rename_block(l.body, m);
                 },
                 [&](SApply& a) {
                   for (auto& r : a.target.ranges) rename_arange(r, m);
                   if (a.u.kind == Unitary::Kind::Oracle) {
                     rename_aexp(a.u.oracle.a, m);
                     rename_aexp(a.u.oracle.modn, m);
                   }
                 },
                 [&](SQIf& q) {
                   rename_bexp(q.guard, m);
                   rename_block(q.body, m);
                 },
                 [&](SCIf& c) {
                   rename_bexp(c.cond, m);
                   rename_block(c.thn, m);
                   rename_block(c.els, m);
                 },
                 [&](SFor& f) {
                   rename_aexp(f.lo, m);
                   rename_aexp(f.hi, m);
                   if (f.guard) rename_bexp(*f.guard, m);
                   rename_block(f.body, m);
                 },
                 [&](SAssert&) {
                   // Assertions inside procedures would need predicate renaming;
                   // rejected at expansion below.
                 },
                 [&](SCall& c) {
                   for (auto& a : c.args)
                     if (auto it = m.find(a); it != m.end()) a = it->second;
                 }},
             s.node);
}

inline void rename_block(Block& b, const std::map<std::string, std::string>& m) {
  for (auto& s : b) rename_stmt(s, m);
}

inline void expand_block(Block& b, const std::vector<ProcDef>& procs);

inline void expand_stmt_calls(Stmt& s, Block& out,
                              const std::vector<ProcDef>& procs) {
  if (auto* c = std::get_if<SCall>(&s.node)) {
    const ProcDef* def = nullptr;
    for (const auto& p : procs)
      if (p.name == c->name) def = &p;
    if (!def)
      throw Error(ErrCat::Parse, "SyntaxError: call to undefined procedure " + c->name,
                  s.line, s.col);
    if (def->params.size() != c->args.size())
      throw Error(ErrCat::Parse, "SyntaxError: " + c->name + " expects " +
                                     std::to_string(def->params.size()) + " arguments",
                  s.line, s.col);
    for (const auto& st : def->body)
      if (std::holds_alternative<SAssert>(st.node))
        throw Error(ErrCat::Parse,
                    "SyntaxError: assert inside procedure body is not supported",
                    st.line, st.col);
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < def->params.size(); ++i)
      m[def->params[i]] = c->args[i];
    Block copy = def->body;
    rename_block(copy, m);
    expand_block(copy, procs);
    for (auto& st : copy) out.push_back(std::move(st));
    return;
  }
  std::visit(overloaded{[&](SLetC& l) { expand_block(l.body, procs); },
                        [&](SLetM& l) { expand_block(l.body, procs); },
                        [&](SQIf& q) { expand_block(q.body, procs); },
                        [&](SCIf& cf) {
                          expand_block(cf.thn, procs);
                          expand_block(cf.els, procs);
                        },
                        [&](SFor& f) { expand_block(f.body, procs); },
                        [](auto&) {}},
             s.node);
  out.push_back(std::move(s));
}

inline void expand_block(Block& b, const std::vector<ProcDef>& procs) {
  Block out;
  for (auto& s : b) expand_stmt_calls(s, out, procs);
  b = std::move(out);
}

}  // namespace detail

inline Program expand_calls(Program p) {
  for (std::size_t i = 0; i < p.procs.size(); ++i) {
    std::vector<ProcDef> earlier(p.procs.begin(),
                                 p.procs.begin() + static_cast<long>(i));
    detail::expand_block(p.procs[i].body, earlier);
  }
  detail::expand_block(p.body, p.procs);
  p.procs.clear();
  return p;
}

}  // namespace qafny
