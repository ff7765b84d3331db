#include "rsill/parser.hpp"

#include <cctype>
#include <limits>
#include <set>

namespace rsill {

namespace {

enum class Tok {
  Ident, Nat,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Colon, Semi, Eq, Caret, Pipe, Dot,
  Plus, Minus, Star, Amp,
  Arrow,    // ->
  Bind,     // <-
  FatArrow, // =>
  Ge,       // >=
  Lolli,    // -o (always followed by ^)
  End,
};

struct Token {
  Tok kind;
  std::string text;
  Nat value = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    tok_ = Token{Tok::End, "", 0, line_, col_};
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '\''))
        bump();
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Nat v = 0;
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        Nat digit = static_cast<Nat>(src_[pos_] - '0');
        if (v > (std::numeric_limits<Nat>::max() - digit) / 10)
          throw ParseError(tok_.line, tok_.col, "numeric literal does not fit in 64 bits");
        v = v * 10 + digit;
        bump();
      }
      tok_.kind = Tok::Nat;
      tok_.value = v;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (two('-', 'o') && pos_ + 2 < src_.size() && src_[pos_ + 2] == '^') {
      bump(); bump();
      tok_.kind = Tok::Lolli;
      return;
    }
    if (two('-', '>')) { bump(); bump(); tok_.kind = Tok::Arrow; return; }
    if (two('<', '-')) { bump(); bump(); tok_.kind = Tok::Bind; return; }
    if (two('=', '>')) { bump(); bump(); tok_.kind = Tok::FatArrow; return; }
    if (two('>', '=')) { bump(); bump(); tok_.kind = Tok::Ge; return; }
    bump();
    switch (c) {
      case '(': tok_.kind = Tok::LParen; return;
      case ')': tok_.kind = Tok::RParen; return;
      case '{': tok_.kind = Tok::LBrace; return;
      case '}': tok_.kind = Tok::RBrace; return;
      case '[': tok_.kind = Tok::LBracket; return;
      case ']': tok_.kind = Tok::RBracket; return;
      case ',': tok_.kind = Tok::Comma; return;
      case ':': tok_.kind = Tok::Colon; return;
      case ';': tok_.kind = Tok::Semi; return;
      case '=': tok_.kind = Tok::Eq; return;
      case '^': tok_.kind = Tok::Caret; return;
      case '|': tok_.kind = Tok::Pipe; return;
      case '.': tok_.kind = Tok::Dot; return;
      case '+': tok_.kind = Tok::Plus; return;
      case '-': tok_.kind = Tok::Minus; return;
      case '*': tok_.kind = Tok::Star; return;
      case '&': tok_.kind = Tok::Amp; return;
      default:
        throw ParseError(tok_.line, tok_.col, std::string("unexpected character '") + c + "'");
    }
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

const std::set<std::string> kKeywords = {"type", "proc",  "costfree", "spawn", "recv",
                                         "fwd",  "case",  "send",     "close", "wait",
                                         "providing", "clog"};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Signature program() {
    Signature sig;
    while (lex_.peek().kind != Tok::End) {
      Token t = lex_.peek();
      if (t.kind == Tok::Ident && t.text == "type") {
        sig.type_defs.push_back(type_def());
      } else if (t.kind == Tok::Ident && (t.text == "proc" || t.text == "costfree")) {
        sig.proc_defs.push_back(proc_def());
      } else {
        fail(t, "expected 'type', 'proc' or 'costfree'");
      }
    }
    validate(sig);
    return sig;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg + (t.kind == Tok::End ? " (at end of input)"
                                                              : ", found '" + show(t) + "'"));
  }

  static std::string show(const Token& t) {
    if (!t.text.empty()) return t.text;
    switch (t.kind) {
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::LBrace: return "{";
      case Tok::RBrace: return "}";
      case Tok::LBracket: return "[";
      case Tok::RBracket: return "]";
      case Tok::Comma: return ",";
      case Tok::Colon: return ":";
      case Tok::Semi: return ";";
      case Tok::Eq: return "=";
      case Tok::Caret: return "^";
      case Tok::Pipe: return "|";
      case Tok::Dot: return ".";
      case Tok::Plus: return "+";
      case Tok::Minus: return "-";
      case Tok::Star: return "*";
      case Tok::Amp: return "&";
      case Tok::Arrow: return "->";
      case Tok::Bind: return "<-";
      case Tok::FatArrow: return "=>";
      case Tok::Ge: return ">=";
      case Tok::Lolli: return "-o";
      case Tok::End: return "<eof>";
      default: return "?";
    }
  }

  Token expect(Tok k, const std::string& what) {
    if (lex_.peek().kind != k) fail(lex_.peek(), "expected " + what);
    return lex_.take();
  }

  std::string ident(const std::string& what) {
    Token t = expect(Tok::Ident, what);
    if (kKeywords.count(t.text)) throw ParseError(t.line, t.col, "'" + t.text + "' is a keyword");
    return t.text;
  }

  bool accept(Tok k) {
    if (lex_.peek().kind == k) {
      lex_.take();
      return true;
    }
    return false;
  }

  // --- index parameters / constraints -----------------------------------

  void index_params(std::vector<std::string>& params, std::vector<Constraint>& domain) {
    if (!accept(Tok::LBracket)) return;
    if (lex_.peek().kind == Tok::Ident) {
      params.push_back(ident("index parameter"));
      while (accept(Tok::Comma)) params.push_back(ident("index parameter"));
    }
    if (accept(Tok::Pipe)) {
      do {
        Constraint c;
        c.var = ident("constraint variable");
        expect(Tok::Ge, "'>='");
        c.bound = expect(Tok::Nat, "natural bound").value;
        domain.push_back(c);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RBracket, "']'");
  }

  // --- potential expressions ---------------------------------------------

  PotPtr pot_expr() {
    PotPtr e = pot_term();
    for (;;) {
      if (accept(Tok::Plus))
        e = pot::add(e, pot_term());
      else if (accept(Tok::Minus))
        e = pot::monus(e, pot_term());
      else
        return e;
    }
  }

  PotPtr pot_term() {
    PotPtr e = pot_factor();
    while (accept(Tok::Star)) e = pot::mul(e, pot_factor());
    return e;
  }

  PotPtr pot_factor() {
    Token t = lex_.peek();
    if (t.kind == Tok::Nat) {
      lex_.take();
      return pot::constant(t.value);
    }
    if (t.kind == Tok::Ident && t.text == "clog") {
      lex_.take();
      expect(Tok::LParen, "'('");
      PotPtr e = pot_expr();
      expect(Tok::RParen, "')'");
      return pot::clog(e);
    }
    if (t.kind == Tok::Ident) {
      return pot::ivar(ident("index variable"));
    }
    if (accept(Tok::LParen)) {
      PotPtr e = pot_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    fail(t, "expected potential expression");
  }

  // Superscript annotation after '^': a literal, a variable, clog(...), or a
  // braced/parenthesised expression.
  PotPtr pot_super() {
    expect(Tok::Caret, "'^'");
    Token t = lex_.peek();
    if (t.kind == Tok::Nat) {
      lex_.take();
      return pot::constant(t.value);
    }
    if (t.kind == Tok::LBrace) {
      lex_.take();
      PotPtr e = pot_expr();
      expect(Tok::RBrace, "'}'");
      return e;
    }
    if (t.kind == Tok::LParen) {
      lex_.take();
      PotPtr e = pot_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::Ident && t.text == "clog") return pot_factor();
    if (t.kind == Tok::Ident) return pot::ivar(ident("index variable"));
    fail(t, "expected potential annotation");
  }

  // --- session types ------------------------------------------------------

  TypePtr stype() {
    TypePtr head = stype_atom();
    Token t = lex_.peek();
    if (t.kind == Tok::Star) {
      lex_.take();
      PotPtr q = pot_super();
      return ty::tensor(q, head, stype());
    }
    if (t.kind == Tok::Lolli) {
      lex_.take();
      PotPtr q = pot_super();
      return ty::lolli(q, head, stype());
    }
    return head;
  }

  TypePtr stype_atom() {
    Token t = lex_.peek();
    if (t.kind == Tok::Plus || t.kind == Tok::Amp) {
      lex_.take();
      bool internal = t.kind == Tok::Plus;
      expect(Tok::LBrace, "'{'");
      std::vector<Branch> bs;
      do {
        Branch b;
        b.label = ident("branch label");
        b.pot = pot_super();
        expect(Tok::Colon, "':'");
        b.cont = stype();
        for (const auto& prev : bs)
          if (prev.label == b.label)
            throw ParseError(t.line, t.col, "duplicate branch label '" + b.label + "'");
        bs.push_back(std::move(b));
      } while (accept(Tok::Comma));
      expect(Tok::RBrace, "'}'");
      return internal ? ty::ichoice(std::move(bs)) : ty::echoice(std::move(bs));
    }
    if (t.kind == Tok::Nat && t.value == 1) {
      lex_.take();
      return ty::one(pot_super());
    }
    if (t.kind == Tok::Ident) {
      std::string name = ident("type name");
      std::vector<PotPtr> args;
      if (accept(Tok::LBracket)) {
        do args.push_back(pot_expr());
        while (accept(Tok::Comma));
        expect(Tok::RBracket, "']'");
      }
      return ty::tvar(std::move(name), std::move(args));
    }
    if (accept(Tok::LParen)) {
      TypePtr inner = stype();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail(t, "expected session type");
  }

  // --- definitions ---------------------------------------------------------

  TypeDef type_def() {
    lex_.take(); // 'type'
    TypeDef def;
    def.name = ident("type name");
    index_params(def.index_params, def.domain);
    expect(Tok::Eq, "'='");
    def.body = stype();
    Token t = lex_.peek();
    if (def.body->kind == SType::Kind::TVar)
      throw ParseError(t.line, t.col, "definition of '" + def.name + "' is not contractive");
    return def;
  }

  ProcDef proc_def() {
    ProcDef def;
    Token t = lex_.take();
    if (t.text == "costfree") {
      def.cost_mode = CostMode::CostFree;
      t = lex_.take();
      if (t.kind != Tok::Ident || t.text != "proc") fail(t, "expected 'proc' after 'costfree'");
    }
    def.name = ident("process name");
    index_params(def.index_params, def.domain);
    expect(Tok::Pipe, "'|' opening the potential");
    def.potential = pot_expr();
    expect(Tok::Pipe, "'|' closing the potential");
    expect(Tok::LParen, "'('");
    if (lex_.peek().kind != Tok::RParen) {
      do {
        std::string chan = ident("channel name");
        expect(Tok::Colon, "':'");
        def.uses.emplace_back(chan, stype());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    expect(Tok::LParen, "'('");
    def.provides.first = ident("provided channel");
    expect(Tok::Colon, "':'");
    def.provides.second = stype();
    expect(Tok::RParen, "')'");
    expect(Tok::Eq, "'='");
    tail_counter_ = 0;
    def.body = proc();
    return def;
  }

  // --- process expressions --------------------------------------------------

  ProcPtr proc() {
    Token t = lex_.peek();
    if (t.kind != Tok::Ident) fail(t, "expected process expression");

    if (t.text == "fwd") {
      lex_.take();
      std::string provided = ident("channel");
      std::string used = ident("channel");
      return pe::fwd(provided, used);
    }
    if (t.text == "close") {
      lex_.take();
      return pe::close(ident("channel"));
    }
    if (t.text == "wait") {
      lex_.take();
      std::string c = ident("channel");
      expect(Tok::Semi, "';'");
      return pe::wait(c, proc());
    }
    if (t.text == "send") {
      lex_.take();
      std::string c = ident("channel");
      std::string w = ident("payload channel");
      expect(Tok::Semi, "';'");
      return pe::send_chan(c, w, proc());
    }
    if (t.text == "case") {
      lex_.take();
      std::string c = ident("channel");
      expect(Tok::LBrace, "'{'");
      std::vector<std::pair<std::string, ProcPtr>> branches;
      do {
        std::string lbl = ident("branch label");
        expect(Tok::FatArrow, "'=>'");
        branches.emplace_back(lbl, proc());
      } while (accept(Tok::Pipe));
      expect(Tok::RBrace, "'}'");
      return pe::case_recv(c, std::move(branches));
    }

    // Remaining forms start with an identifier.
    std::string first = ident("channel or process name");
    Token next = lex_.peek();
    if (next.kind == Tok::Bind) {
      lex_.take();
      Token what = lex_.peek();
      if (what.kind == Tok::Ident && what.text == "spawn") {
        lex_.take();
        auto [def, idx, chans] = call_args();
        expect(Tok::Semi, "';'");
        return pe::spawn(first, def, std::move(idx), std::move(chans), proc());
      }
      if (what.kind == Tok::Ident && what.text == "recv") {
        lex_.take();
        std::string c = ident("channel");
        expect(Tok::Semi, "';'");
        return pe::recv_chan(c, first, proc());
      }
      fail(what, "expected 'spawn' or 'recv'");
    }
    if (next.kind == Tok::Dot) {
      lex_.take();
      std::string lbl = ident("label");
      expect(Tok::Semi, "';'");
      return pe::send_label(first, lbl, proc());
    }
    if (next.kind == Tok::LBracket || next.kind == Tok::LParen) {
      // Tail call: X[e..](c..) providing s  ==  %t <- spawn X[e..](c..); fwd s %t
      auto [idx, chans] = call_suffix();
      Token p = lex_.peek();
      if (p.kind != Tok::Ident || p.text != "providing") fail(p, "expected 'providing'");
      lex_.take();
      std::string provided = ident("channel");
      std::string fresh = "%t" + std::to_string(tail_counter_++);
      return pe::spawn(fresh, first, std::move(idx), std::move(chans),
                       pe::fwd(provided, fresh));
    }
    fail(next, "expected '<-', '.', '[' or '(' after identifier");
  }

  std::tuple<std::string, std::vector<PotPtr>, std::vector<std::string>> call_args() {
    std::string def = ident("process name");
    auto [idx, chans] = call_suffix();
    return {def, std::move(idx), std::move(chans)};
  }

  std::pair<std::vector<PotPtr>, std::vector<std::string>> call_suffix() {
    std::vector<PotPtr> idx;
    if (accept(Tok::LBracket)) {
      if (lex_.peek().kind != Tok::RBracket) {
        do idx.push_back(pot_expr());
        while (accept(Tok::Comma));
      }
      expect(Tok::RBracket, "']'");
    }
    expect(Tok::LParen, "'('");
    std::vector<std::string> chans;
    if (lex_.peek().kind != Tok::RParen) {
      do chans.push_back(ident("channel argument"));
      while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return {std::move(idx), std::move(chans)};
  }

  // --- post-parse validation -------------------------------------------------

  void check_type_refs(const TypePtr& t, const Signature& sig, const std::string& where) {
    switch (t->kind) {
      case SType::Kind::TVar: {
        const TypeDef* d = sig.find_type(t->name);
        if (!d) throw ArityError("in " + where + ": unknown type '" + t->name + "'");
        if (d->index_params.size() != t->args.size())
          throw ArityError("in " + where + ": type '" + t->name + "' expects " +
                           std::to_string(d->index_params.size()) + " index argument(s), got " +
                           std::to_string(t->args.size()));
        break;
      }
      case SType::Kind::IChoice:
      case SType::Kind::EChoice:
        for (const auto& b : t->branches) check_type_refs(b.cont, sig, where);
        break;
      case SType::Kind::Tensor:
      case SType::Kind::Lolli:
        check_type_refs(t->payload, sig, where);
        check_type_refs(t->cont, sig, where);
        break;
      case SType::Kind::One:
        break;
    }
  }

  void check_proc_refs(const ProcPtr& p, const Signature& sig, const std::string& where) {
    if (!p) return;
    if (p->kind == ProcExpr::Kind::Spawn) {
      const ProcDef* d = sig.find_proc(p->def_name);
      if (!d) throw ArityError("in " + where + ": unknown process '" + p->def_name + "'");
      if (d->index_params.size() != p->index_args.size())
        throw ArityError("in " + where + ": process '" + p->def_name + "' expects " +
                         std::to_string(d->index_params.size()) + " index argument(s), got " +
                         std::to_string(p->index_args.size()));
      if (d->uses.size() != p->chan_args.size())
        throw ArityError("in " + where + ": process '" + p->def_name + "' expects " +
                         std::to_string(d->uses.size()) + " channel argument(s), got " +
                         std::to_string(p->chan_args.size()));
    }
    if (p->kind == ProcExpr::Kind::CaseRecv) {
      for (const auto& [lbl, body] : p->case_branches) check_proc_refs(body, sig, where);
    } else {
      check_proc_refs(p->cont, sig, where);
    }
  }

  void validate(const Signature& sig) {
    std::set<std::string> names;
    for (const auto& d : sig.type_defs)
      if (!names.insert("t:" + d.name).second)
        throw ArityError("duplicate type definition '" + d.name + "'");
    for (const auto& d : sig.proc_defs)
      if (!names.insert("p:" + d.name).second)
        throw ArityError("duplicate process definition '" + d.name + "'");
    for (const auto& d : sig.type_defs)
      check_type_refs(d.body, sig, "type " + d.name);
    for (const auto& d : sig.proc_defs) {
      for (const auto& [c, t] : d.uses) check_type_refs(t, sig, "proc " + d.name);
      check_type_refs(d.provides.second, sig, "proc " + d.name);
      check_proc_refs(d.body, sig, "proc " + d.name);
    }
  }

  Lexer lex_;
  int tail_counter_ = 0;
};

} // namespace

Signature parse_program(const std::string& text) { return Parser(text).program(); }

} // namespace rsill
