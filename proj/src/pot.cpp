#include "rsill/pot.hpp"

namespace rsill {

namespace pot {

PotPtr constant(Nat v) {
  auto n = std::make_shared<PotExpr>(PotExpr(PotExpr::Kind::Const));
  n->value = v;
  return n;
}

PotPtr ivar(std::string name) {
  auto n = std::make_shared<PotExpr>(PotExpr(PotExpr::Kind::IVar));
  n->name = std::move(name);
  return n;
}

static PotPtr binary(PotExpr::Kind k, PotPtr a, PotPtr b) {
  auto n = std::make_shared<PotExpr>(PotExpr(k));
  n->left = std::move(a);
  n->right = std::move(b);
  return n;
}

PotPtr add(PotPtr a, PotPtr b) { return binary(PotExpr::Kind::Add, std::move(a), std::move(b)); }
PotPtr mul(PotPtr a, PotPtr b) { return binary(PotExpr::Kind::Mul, std::move(a), std::move(b)); }
PotPtr monus(PotPtr a, PotPtr b) { return binary(PotExpr::Kind::Monus, std::move(a), std::move(b)); }

PotPtr clog(PotPtr a) {
  auto n = std::make_shared<PotExpr>(PotExpr(PotExpr::Kind::CLog));
  n->left = std::move(a);
  return n;
}

} // namespace pot

Nat eval_pot(const PotPtr& e, const IndexEnv& env) {
  switch (e->kind) {
    case PotExpr::Kind::Const:
      return e->value;
    case PotExpr::Kind::IVar: {
      auto it = env.find(e->name);
      if (it == env.end()) throw EvalError("unbound index variable '" + e->name + "'");
      return it->second;
    }
    case PotExpr::Kind::Add:
      return eval_pot(e->left, env) + eval_pot(e->right, env);
    case PotExpr::Kind::Mul:
      return eval_pot(e->left, env) * eval_pot(e->right, env);
    case PotExpr::Kind::Monus: {
      Nat a = eval_pot(e->left, env), b = eval_pot(e->right, env);
      return a > b ? a - b : 0;
    }
    case PotExpr::Kind::CLog:
      return clog_nat(eval_pot(e->left, env));
  }
  throw EvalError("corrupt potential expression");
}

PotPtr subst_pot(const PotPtr& e, const IndexEnv& env) {
  switch (e->kind) {
    case PotExpr::Kind::Const:
      return e;
    case PotExpr::Kind::IVar: {
      auto it = env.find(e->name);
      return it == env.end() ? e : pot::constant(it->second);
    }
    case PotExpr::Kind::Add:
    case PotExpr::Kind::Mul:
    case PotExpr::Kind::Monus: {
      PotPtr l = subst_pot(e->left, env), r = subst_pot(e->right, env);
      if (l->kind == PotExpr::Kind::Const && r->kind == PotExpr::Kind::Const)
        return pot::constant(eval_pot(e, env));
      auto n = std::make_shared<PotExpr>(PotExpr(e->kind));
      n->left = l;
      n->right = r;
      return n;
    }
    case PotExpr::Kind::CLog: {
      PotPtr l = subst_pot(e->left, env);
      if (l->kind == PotExpr::Kind::Const) return pot::constant(clog_nat(l->value));
      return pot::clog(l);
    }
  }
  throw EvalError("corrupt potential expression");
}

bool pot_equal(const PotPtr& a, const PotPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case PotExpr::Kind::Const: return a->value == b->value;
    case PotExpr::Kind::IVar: return a->name == b->name;
    case PotExpr::Kind::CLog: return pot_equal(a->left, b->left);
    default: return pot_equal(a->left, b->left) && pot_equal(a->right, b->right);
  }
}

namespace {

// Precedence: monus/add lowest, mul above, atoms highest.
void render(const PotPtr& e, std::string& out, int parent_prec) {
  auto paren = [&](int prec, auto&& body) {
    if (prec < parent_prec) out += '(';
    body();
    if (prec < parent_prec) out += ')';
  };
  switch (e->kind) {
    case PotExpr::Kind::Const:
      out += std::to_string(e->value);
      break;
    case PotExpr::Kind::IVar:
      out += e->name;
      break;
    case PotExpr::Kind::Add:
      paren(1, [&] { render(e->left, out, 1); out += " + "; render(e->right, out, 1); });
      break;
    case PotExpr::Kind::Monus:
      // Right operand rendered at higher precedence: monus is left-associative.
      paren(1, [&] { render(e->left, out, 1); out += " - "; render(e->right, out, 2); });
      break;
    case PotExpr::Kind::Mul:
      paren(2, [&] { render(e->left, out, 2); out += "*"; render(e->right, out, 2); });
      break;
    case PotExpr::Kind::CLog:
      out += "clog(";
      render(e->left, out, 0);
      out += ')';
      break;
  }
}

} // namespace

std::string pot_to_string(const PotPtr& e) {
  std::string out;
  render(e, out, 0);
  return out;
}

} // namespace rsill
