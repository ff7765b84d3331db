#include "rsill/types.hpp"

#include <set>

namespace rsill {

TypePtr subst_type(const TypePtr& t, const IndexEnv& env) {
  if (env.empty()) return t;
  switch (t->kind) {
    case SType::Kind::TVar: {
      std::vector<PotPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(subst_pot(a, env));
      return ty::tvar(t->name, std::move(args));
    }
    case SType::Kind::IChoice:
    case SType::Kind::EChoice: {
      std::vector<Branch> bs;
      bs.reserve(t->branches.size());
      for (const auto& b : t->branches)
        bs.push_back({b.label, subst_pot(b.pot, env), subst_type(b.cont, env)});
      return t->kind == SType::Kind::IChoice ? ty::ichoice(std::move(bs))
                                             : ty::echoice(std::move(bs));
    }
    case SType::Kind::Tensor:
      return ty::tensor(subst_pot(t->pot, env), subst_type(t->payload, env),
                        subst_type(t->cont, env));
    case SType::Kind::Lolli:
      return ty::lolli(subst_pot(t->pot, env), subst_type(t->payload, env),
                       subst_type(t->cont, env));
    case SType::Kind::One:
      return ty::one(subst_pot(t->pot, env));
  }
  throw TypeOpError(TypeOpError::Kind::UnknownType, "corrupt type");
}

TypePtr unfold(const TypePtr& t, const Signature& sig, const IndexEnv& env) {
  if (t->kind != SType::Kind::TVar) return t;
  const TypeDef* def = sig.find_type(t->name);
  if (!def)
    throw TypeOpError(TypeOpError::Kind::UnknownType, "unknown type '" + t->name + "'");
  if (def->index_params.size() != t->args.size())
    throw TypeOpError(TypeOpError::Kind::Arity,
                      "type '" + t->name + "' expects " +
                          std::to_string(def->index_params.size()) + " index argument(s), got " +
                          std::to_string(t->args.size()));
  IndexEnv inst;
  for (size_t i = 0; i < t->args.size(); ++i)
    inst[def->index_params[i]] = eval_pot(t->args[i], env);
  if (!domain_satisfied(def->domain, inst))
    throw TypeOpError(TypeOpError::Kind::DomainViolation,
                      "index arguments of '" + type_to_string(subst_type(t, env)) +
                          "' violate the domain of '" + t->name + "'");
  return subst_type(def->body, inst);
}

TypePtr unfold_head(const TypePtr& t, const Signature& sig, const IndexEnv& env) {
  TypePtr cur = t;
  // Contractiveness bounds variable chains by the number of definitions.
  size_t guard = sig.type_defs.size() + 1;
  while (cur->kind == SType::Kind::TVar) {
    if (guard-- == 0)
      throw TypeOpError(TypeOpError::Kind::UnknownType,
                        "non-contractive definition chain at '" + cur->name + "'");
    cur = unfold(cur, sig, env);
  }
  return cur;
}

namespace {

// Key for the memo set: type variables by (name, evaluated indices),
// everything else by identity is not stable, so only TVar pairs are memoized;
// structural recursion always reaches TVars on cycles because definitions are
// contractive.
std::string tvar_key(const TypePtr& t) {
  std::string k = t->name;
  for (const auto& a : t->args) {
    k += '[';
    k += std::to_string(eval_pot(a, {}));
    k += ']';
  }
  return k;
}

// Comparison order matters for termination on unbounded index families:
// all labels and evaluated potentials at the current level are compared
// before any continuation is entered, so instances whose annotations drift
// apart are separated without descending an infinite equal-looking spine.
// A pair budget turns genuinely non-converging comparisons into an error
// instead of a hang.
constexpr size_t kEqualityBudget = 100000;

bool equal_rec(const TypePtr& a, const TypePtr& b, const Signature& sig,
               std::set<std::pair<std::string, std::string>>& seen) {
  if (a.get() == b.get()) return true;
  if (a->kind == SType::Kind::TVar && b->kind == SType::Kind::TVar) {
    auto key = std::make_pair(tvar_key(a), tvar_key(b));
    if (key.first == key.second) return true;
    if (!seen.insert(key).second) return true; // coinductive hypothesis
    if (seen.size() > kEqualityBudget)
      throw TypeOpError(TypeOpError::Kind::UnknownType,
                        "type equality did not converge comparing " + key.first + " and " +
                            key.second);
    return equal_rec(unfold(a, sig), unfold(b, sig), sig, seen);
  }
  if (a->kind == SType::Kind::TVar) return equal_rec(unfold(a, sig), b, sig, seen);
  if (b->kind == SType::Kind::TVar) return equal_rec(a, unfold(b, sig), sig, seen);

  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SType::Kind::One:
      return eval_pot(a->pot, {}) == eval_pot(b->pot, {});
    case SType::Kind::IChoice:
    case SType::Kind::EChoice: {
      if (a->branches.size() != b->branches.size()) return false;
      for (const auto& ba : a->branches) {
        const Branch* bb = b->find_branch(ba.label);
        if (!bb) return false;
        if (eval_pot(ba.pot, {}) != eval_pot(bb->pot, {})) return false;
      }
      for (const auto& ba : a->branches) {
        if (!equal_rec(ba.cont, b->find_branch(ba.label)->cont, sig, seen)) return false;
      }
      return true;
    }
    case SType::Kind::Tensor:
    case SType::Kind::Lolli:
      return eval_pot(a->pot, {}) == eval_pot(b->pot, {}) &&
             equal_rec(a->payload, b->payload, sig, seen) &&
             equal_rec(a->cont, b->cont, sig, seen);
    case SType::Kind::TVar:
      break;
  }
  return false;
}

void render_pot_super(const PotPtr& p, std::string& out) {
  out += '^';
  if (p->kind == PotExpr::Kind::Const) {
    out += std::to_string(p->value);
  } else {
    out += '{';
    out += pot_to_string(p);
    out += '}';
  }
}

void render(const TypePtr& t, std::string& out, bool atom) {
  switch (t->kind) {
    case SType::Kind::TVar: {
      out += t->name;
      if (!t->args.empty()) {
        out += '[';
        for (size_t i = 0; i < t->args.size(); ++i) {
          if (i) out += ", ";
          out += pot_to_string(t->args[i]);
        }
        out += ']';
      }
      break;
    }
    case SType::Kind::IChoice:
    case SType::Kind::EChoice: {
      out += t->kind == SType::Kind::IChoice ? "+{" : "&{";
      for (size_t i = 0; i < t->branches.size(); ++i) {
        if (i) out += ", ";
        out += t->branches[i].label;
        render_pot_super(t->branches[i].pot, out);
        out += " : ";
        render(t->branches[i].cont, out, false);
      }
      out += '}';
      break;
    }
    case SType::Kind::Tensor:
    case SType::Kind::Lolli: {
      if (atom) out += '(';
      render(t->payload, out, true);
      out += t->kind == SType::Kind::Tensor ? " *" : " -o";
      render_pot_super(t->pot, out);
      out += ' ';
      render(t->cont, out, false);
      if (atom) out += ')';
      break;
    }
    case SType::Kind::One:
      out += '1';
      render_pot_super(t->pot, out);
      break;
  }
}

} // namespace

bool type_equal(const TypePtr& a, const TypePtr& b, const Signature& sig) {
  std::set<std::pair<std::string, std::string>> seen;
  return equal_rec(a, b, sig, seen);
}

std::string type_to_string(const TypePtr& t) {
  std::string out;
  render(t, out, false);
  return out;
}

} // namespace rsill
