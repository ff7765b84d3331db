#include "rsill/typecheck.hpp"

#include <algorithm>

#include "rsill/runtime.hpp"

namespace rsill {

const char* TypeError::kind_name(Kind k) {
  switch (k) {
    case Kind::InsufficientPotential: return "InsufficientPotential";
    case Kind::ContextMismatch: return "ContextMismatch";
    case Kind::LabelNotInType: return "LabelNotInType";
    case Kind::LinearityViolation: return "LinearityViolation";
    case Kind::WrongProvidedType: return "WrongProvidedType";
    case Kind::DomainViolation: return "DomainViolation";
    case Kind::UnknownType: return "UnknownType";
  }
  return "TypeError";
}

namespace {

using Kind = TypeError::Kind;

struct Ctx {
  std::vector<std::pair<std::string, TypePtr>> entries;

  TypePtr* find(const std::string& name) {
    for (auto& [n, t] : entries)
      if (n == name) return &t;
    return nullptr;
  }
  void remove(const std::string& name) {
    entries.erase(std::remove_if(entries.begin(), entries.end(),
                                 [&](const auto& e) { return e.first == name; }),
                  entries.end());
  }
  std::string show() const {
    std::string s;
    for (const auto& [n, t] : entries) {
      if (!s.empty()) s += ", ";
      s += n + " : " + type_to_string(t);
    }
    return s.empty() ? "." : s;
  }
};

Nat monus(Nat a, Nat b) { return a > b ? a - b : 0; }

class Checker {
 public:
  Checker(const Signature& sig, Metric metric, Derivation* deriv)
      : sig_(sig), metric_(metric), deriv_(deriv) {}

  // Returns the minimal potential the expression needs. When `have` is
  // present, threads the exact residual and throws InsufficientPotential at
  // the first violated inequality.
  Nat walk(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
           std::optional<Nat> have, const std::string& point) {
    switch (p->kind) {
      case ProcExpr::Kind::SendLabel: return send_label(p, std::move(ctx), prov, prov_type, have, point);
      case ProcExpr::Kind::CaseRecv: return case_recv(p, std::move(ctx), prov, prov_type, have, point);
      case ProcExpr::Kind::SendChan: return send_chan(p, std::move(ctx), prov, prov_type, have, point);
      case ProcExpr::Kind::RecvChan: return recv_chan(p, std::move(ctx), prov, prov_type, have, point);
      case ProcExpr::Kind::Close: return close(p, std::move(ctx), prov, prov_type, have, point);
      case ProcExpr::Kind::Wait: return wait(p, std::move(ctx), prov, prov_type, have, point);
      case ProcExpr::Kind::Fwd: return fwd(p, std::move(ctx), prov, prov_type, have, point);
      case ProcExpr::Kind::Spawn: return spawn(p, std::move(ctx), prov, prov_type, have, point);
    }
    throw TypeError(Kind::ContextMismatch, point, "corrupt process expression");
  }

 private:
  TypePtr head(const TypePtr& t, const std::string& point) {
    try {
      return unfold_head(t, sig_);
    } catch (const TypeOpError& e) {
      throw TypeError(e.kind == TypeOpError::Kind::DomainViolation ? Kind::DomainViolation
                                                                   : Kind::UnknownType,
                      point, e.what());
    }
  }

  Nat pot_of(const PotPtr& e, const std::string& point) {
    try {
      return eval_pot(e, {});
    } catch (const EvalError& err) {
      throw TypeError(Kind::UnknownType, point, err.what());
    }
  }

  void record(const std::string& point, const Ctx& ctx, std::optional<Nat> before,
              std::optional<Nat> after, const std::string& rule, const std::string& ineq) {
    if (!deriv_) return;
    deriv_->steps.push_back({point, ctx.show(), before.value_or(0), after.value_or(0), rule, ineq});
  }

  // Debits r + cost in check mode; throws with both sides on underflow.
  void debit(std::optional<Nat>& have, Nat r, Nat cost, const std::string& point,
             const std::string& what) {
    if (!have) return;
    if (*have < r + cost)
      throw TypeError(Kind::InsufficientPotential, point,
                      "insufficient potential to " + what + ": " + std::to_string(*have) +
                          " >= " + std::to_string(r + cost) + " fails (annotation " +
                          std::to_string(r) + " + cost " + std::to_string(cost) + ")",
                      *have, r + cost);
    *have -= r + cost;
  }

  Nat send_label(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
                 std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/" + p->chan + "." + p->label;
    bool on_provided = p->chan == prov;
    TypePtr cur;
    if (on_provided) {
      cur = head(prov_type, here);
      if (cur->kind != SType::Kind::IChoice)
        throw TypeError(Kind::WrongProvidedType, here,
                        "provider may only select on an internal choice; " + prov + " : " +
                            type_to_string(cur));
    } else {
      TypePtr* slot = ctx.find(p->chan);
      if (!slot)
        throw TypeError(Kind::ContextMismatch, here,
                        "channel '" + p->chan + "' is not in the context");
      cur = head(*slot, here);
      if (cur->kind != SType::Kind::EChoice)
        throw TypeError(Kind::ContextMismatch, here,
                        "client may only select on an external choice; " + p->chan + " : " +
                            type_to_string(cur));
    }
    const Branch* b = cur->find_branch(p->label);
    if (!b)
      throw TypeError(Kind::LabelNotInType, here,
                      "label '" + p->label + "' not in " + type_to_string(cur));
    Nat r = pot_of(b->pot, here);
    std::optional<Nat> before = have;
    debit(have, r, metric_.label_cost, here, "send label '" + p->label + "' on " + p->chan);
    record(here, ctx, before, have, on_provided ? "plusR" : "withL",
           "q >= " + std::to_string(r) + " + " + std::to_string(metric_.label_cost) + " + p");
    if (on_provided)
      prov_type = b->cont;
    else
      *ctx.find(p->chan) = b->cont;
    Nat need = walk(p->cont, std::move(ctx), prov, prov_type, have, here);
    return need + r + metric_.label_cost;
  }

  Nat case_recv(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
                std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/case " + p->chan;
    bool on_provided = p->chan == prov;
    TypePtr cur;
    if (on_provided) {
      cur = head(prov_type, here);
      if (cur->kind != SType::Kind::EChoice)
        throw TypeError(Kind::WrongProvidedType, here,
                        "provider may only branch on an external choice; " + prov + " : " +
                            type_to_string(cur));
    } else {
      TypePtr* slot = ctx.find(p->chan);
      if (!slot)
        throw TypeError(Kind::ContextMismatch, here,
                        "channel '" + p->chan + "' is not in the context");
      cur = head(*slot, here);
      if (cur->kind != SType::Kind::IChoice)
        throw TypeError(Kind::ContextMismatch, here,
                        "client may only branch on an internal choice; " + p->chan + " : " +
                            type_to_string(cur));
    }
    if (p->case_branches.size() != cur->branches.size())
      throw TypeError(Kind::LabelNotInType, here,
                      "case must cover exactly the labels of " + type_to_string(cur));
    Nat need = 0;
    for (const auto& tb : cur->branches) {
      const ProcPtr* body = nullptr;
      for (const auto& [lbl, b] : p->case_branches)
        if (lbl == tb.label) body = &b;
      if (!body)
        throw TypeError(Kind::LabelNotInType, here,
                        "missing case branch for label '" + tb.label + "'");
      Nat r = pot_of(tb.pot, here);
      std::optional<Nat> branch_have = have ? std::optional<Nat>(*have + r) : std::nullopt;
      std::string branch_pt = here + "/" + tb.label;
      record(branch_pt, ctx, have, branch_have, on_provided ? "withR" : "plusL",
             "q + " + std::to_string(r) + " >= q_" + tb.label);
      Ctx branch_ctx = ctx;
      TypePtr branch_prov = prov_type;
      if (on_provided)
        branch_prov = tb.cont;
      else
        *branch_ctx.find(p->chan) = tb.cont;
      Nat branch_need = walk(*body, std::move(branch_ctx), prov, branch_prov, branch_have,
                             branch_pt);
      need = std::max(need, monus(branch_need, r));
    }
    return need;
  }

  Nat send_chan(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
                std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/send " + p->chan + " " + p->aux;
    bool on_provided = p->chan == prov;
    TypePtr cur;
    if (on_provided) {
      cur = head(prov_type, here);
      if (cur->kind != SType::Kind::Tensor)
        throw TypeError(Kind::WrongProvidedType, here,
                        "provider sends a channel only at a tensor; " + prov + " : " +
                            type_to_string(cur));
    } else {
      TypePtr* slot = ctx.find(p->chan);
      if (!slot)
        throw TypeError(Kind::ContextMismatch, here,
                        "channel '" + p->chan + "' is not in the context");
      cur = head(*slot, here);
      if (cur->kind != SType::Kind::Lolli)
        throw TypeError(Kind::ContextMismatch, here,
                        "client sends a channel only at a lolli; " + p->chan + " : " +
                            type_to_string(cur));
    }
    TypePtr* payload = ctx.find(p->aux);
    if (!payload)
      throw TypeError(Kind::ContextMismatch, here,
                      "payload channel '" + p->aux + "' is not in the context");
    if (!type_equal(*payload, cur->payload, sig_))
      throw TypeError(Kind::ContextMismatch, here,
                      "payload '" + p->aux + "' has type " + type_to_string(*payload) +
                          ", expected " + type_to_string(cur->payload));
    Nat r = pot_of(cur->pot, here);
    std::optional<Nat> before = have;
    debit(have, r, metric_.channel_cost, here, "send channel '" + p->aux + "' on " + p->chan);
    record(here, ctx, before, have, on_provided ? "tensorR" : "lolliL",
           "q >= " + std::to_string(r) + " + " + std::to_string(metric_.channel_cost) + " + p");
    ctx.remove(p->aux);
    if (on_provided)
      prov_type = cur->cont;
    else
      *ctx.find(p->chan) = cur->cont;
    Nat need = walk(p->cont, std::move(ctx), prov, prov_type, have, here);
    return need + r + metric_.channel_cost;
  }

  Nat recv_chan(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
                std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/" + p->aux + " <- recv " + p->chan;
    if (p->aux == prov || ctx.find(p->aux))
      throw TypeError(Kind::LinearityViolation, here,
                      "channel name '" + p->aux + "' is already in scope");
    bool on_provided = p->chan == prov;
    TypePtr cur;
    if (on_provided) {
      cur = head(prov_type, here);
      if (cur->kind != SType::Kind::Lolli)
        throw TypeError(Kind::WrongProvidedType, here,
                        "provider receives a channel only at a lolli; " + prov + " : " +
                            type_to_string(cur));
    } else {
      TypePtr* slot = ctx.find(p->chan);
      if (!slot)
        throw TypeError(Kind::ContextMismatch, here,
                        "channel '" + p->chan + "' is not in the context");
      cur = head(*slot, here);
      if (cur->kind != SType::Kind::Tensor)
        throw TypeError(Kind::ContextMismatch, here,
                        "client receives a channel only at a tensor; " + p->chan + " : " +
                            type_to_string(cur));
    }
    Nat r = pot_of(cur->pot, here);
    std::optional<Nat> after = have ? std::optional<Nat>(*have + r) : std::nullopt;
    record(here, ctx, have, after, on_provided ? "lolliR" : "tensorL",
           "q + " + std::to_string(r) + " >= p");
    ctx.entries.emplace_back(p->aux, cur->payload);
    if (on_provided)
      prov_type = cur->cont;
    else
      *ctx.find(p->chan) = cur->cont;
    Nat need = walk(p->cont, std::move(ctx), prov, prov_type, after, here);
    return monus(need, r);
  }

  Nat close(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
            std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/close " + p->chan;
    if (p->chan != prov)
      throw TypeError(Kind::ContextMismatch, here,
                      "close must target the provided channel '" + prov + "'");
    TypePtr cur = head(prov_type, here);
    if (cur->kind != SType::Kind::One)
      throw TypeError(Kind::WrongProvidedType, here,
                      "close requires provided type 1; " + prov + " : " + type_to_string(cur));
    if (!ctx.entries.empty())
      throw TypeError(Kind::LinearityViolation, here,
                      "context must be consumed before close: " + ctx.show());
    Nat r = pot_of(cur->pot, here);
    std::optional<Nat> before = have;
    debit(have, r, metric_.close_cost, here, "close " + p->chan);
    record(here, ctx, before, have, "oneR",
           "q >= " + std::to_string(r) + " + " + std::to_string(metric_.close_cost));
    return r + metric_.close_cost;
  }

  Nat wait(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
           std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/wait " + p->chan;
    TypePtr* slot = ctx.find(p->chan);
    if (!slot)
      throw TypeError(Kind::ContextMismatch, here,
                      "channel '" + p->chan + "' is not in the context");
    TypePtr cur = head(*slot, here);
    if (cur->kind != SType::Kind::One)
      throw TypeError(Kind::ContextMismatch, here,
                      "wait requires type 1; " + p->chan + " : " + type_to_string(cur));
    Nat r = pot_of(cur->pot, here);
    std::optional<Nat> after = have ? std::optional<Nat>(*have + r) : std::nullopt;
    record(here, ctx, have, after, "oneL", "q + " + std::to_string(r) + " >= p");
    ctx.remove(p->chan);
    Nat need = walk(p->cont, std::move(ctx), prov, prov_type, after, here);
    return monus(need, r);
  }

  Nat fwd(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
          std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/fwd " + p->chan + " " + p->aux;
    if (p->chan != prov)
      throw TypeError(Kind::ContextMismatch, here,
                      "forward must provide the provided channel '" + prov + "'");
    TypePtr* used = ctx.find(p->aux);
    if (!used)
      throw TypeError(Kind::ContextMismatch, here,
                      "channel '" + p->aux + "' is not in the context");
    if (ctx.entries.size() != 1)
      throw TypeError(Kind::LinearityViolation, here,
                      "forward leaves channels unconsumed: " + ctx.show());
    if (!type_equal(*used, prov_type, sig_))
      throw TypeError(Kind::WrongProvidedType, here,
                      "forward between unequal types: " + type_to_string(*used) + " vs " +
                          type_to_string(prov_type));
    record(here, ctx, have, have, "id", "q >= 0");
    return 0;
  }

  Nat spawn(const ProcPtr& p, Ctx ctx, const std::string& prov, TypePtr prov_type,
            std::optional<Nat> have, const std::string& point) {
    std::string here = point + "/spawn " + p->def_name;
    const ProcDef* callee = sig_.find_proc(p->def_name);
    if (!callee)
      throw TypeError(Kind::UnknownType, here, "unknown process '" + p->def_name + "'");
    if (callee->index_params.size() != p->index_args.size())
      throw TypeError(Kind::ContextMismatch, here,
                      "process '" + p->def_name + "' expects " +
                          std::to_string(callee->index_params.size()) + " index argument(s)");
    if (callee->uses.size() != p->chan_args.size())
      throw TypeError(Kind::ContextMismatch, here,
                      "process '" + p->def_name + "' expects " +
                          std::to_string(callee->uses.size()) + " channel argument(s)");
    IndexEnv callee_env;
    for (size_t i = 0; i < p->index_args.size(); ++i)
      callee_env[callee->index_params[i]] = pot_of(p->index_args[i], here);
    if (!domain_satisfied(callee->domain, callee_env))
      throw TypeError(Kind::DomainViolation, here,
                      "index arguments violate the domain of '" + p->def_name + "'");
    for (size_t i = 0; i < p->chan_args.size(); ++i) {
      const std::string& arg = p->chan_args[i];
      TypePtr* slot = ctx.find(arg);
      if (!slot)
        throw TypeError(Kind::ContextMismatch, here,
                        "channel argument '" + arg + "' is not in the context");
      TypePtr want = subst_type(callee->uses[i].second, callee_env);
      if (!type_equal(*slot, want, sig_))
        throw TypeError(Kind::ContextMismatch, here,
                        "argument '" + arg + "' has type " + type_to_string(*slot) +
                            ", expected " + type_to_string(want));
      ctx.remove(arg);
    }
    if (p->aux == prov || ctx.find(p->aux))
      throw TypeError(Kind::LinearityViolation, here,
                      "channel name '" + p->aux + "' is already in scope");
    Nat callee_pot = pot_of(subst_pot(callee->potential, callee_env), here);
    std::optional<Nat> before = have;
    debit(have, callee_pot, 0, here, "spawn '" + p->def_name + "' storing " +
                                         std::to_string(callee_pot));
    record(here, ctx, before, have, "spawn", "r >= " + std::to_string(callee_pot) + " + q");
    ctx.entries.emplace_back(p->aux, subst_type(callee->provides.second, callee_env));
    Nat need = walk(p->cont, std::move(ctx), prov, prov_type, have, here);
    return need + callee_pot;
  }

  const Signature& sig_;
  Metric metric_;
  Derivation* deriv_;
};

// Shared setup: substituted context/provided type and the effective metric.
struct DefInstance {
  Ctx ctx;
  TypePtr provided;
  std::string prov_name;
  ProcPtr body;
  Metric metric;
  Nat declared = 0;
};

DefInstance instantiate(const ProcDef& def, const Metric& metric,
                        const IndexEnv& env) {
  if (!domain_satisfied(def.domain, env))
    throw TypeError(Kind::DomainViolation, def.name,
                    "index environment violates the domain of '" + def.name + "'");
  DefInstance inst;
  inst.metric = def.cost_mode == CostMode::CostFree ? Metric::cost_free() : metric;
  try {
    for (const auto& [chan, t] : def.uses) {
      if (chan == def.provides.first || inst.ctx.find(chan))
        throw TypeError(Kind::LinearityViolation, def.name,
                        "duplicate channel name '" + chan + "' in the interface");
      inst.ctx.entries.emplace_back(chan, subst_type(t, env));
    }
    inst.provided = subst_type(def.provides.second, env);
    inst.prov_name = def.provides.first;
    inst.body = subst_indices(def.body, env);
    inst.declared = eval_pot(def.potential, env);
  } catch (const EvalError& e) {
    throw TypeError(Kind::UnknownType, def.name, e.what());
  }
  return inst;
}

std::string env_to_string(const IndexEnv& env) {
  std::string s;
  for (const auto& [k, v] : env) {
    if (!s.empty()) s += ", ";
    s += k + "=" + std::to_string(v);
  }
  return s;
}

} // namespace

Derivation check_def(const Signature& sig, const ProcDef& def, const Metric& metric,
                     const IndexEnv& index_env) {
  DefInstance inst = instantiate(def, metric, index_env);
  Derivation deriv;
  Checker ck(sig, inst.metric, &deriv);
  ck.walk(inst.body, inst.ctx, inst.prov_name, inst.provided, inst.declared, def.name);
  deriv.conclusion = def.name + (index_env.empty() ? "" : "[" + env_to_string(index_env) + "]") +
                     " checks with potential " + std::to_string(inst.declared);
  return deriv;
}

Nat min_potential(const Signature& sig, const std::string& def_name, const IndexEnv& index_env,
                  const Metric& metric) {
  const ProcDef* def = sig.find_proc(def_name);
  if (!def) throw UntypeableError("unknown process '" + def_name + "'");
  try {
    DefInstance inst = instantiate(*def, metric, index_env);
    Checker ck(sig, inst.metric, nullptr);
    return ck.walk(inst.body, inst.ctx, inst.prov_name, inst.provided, std::nullopt, def->name);
  } catch (const TypeError& e) {
    throw UntypeableError(std::string("untypeable: ") + e.what());
  }
}

Report check_signature(const Signature& sig, const Metric& metric, Nat sample_max) {
  Report report;
  for (const auto& def : sig.proc_defs) {
    // Enumerate the sampled index grid within the declared domain.
    std::vector<IndexEnv> grid;
    grid.emplace_back();
    for (const auto& param : def.index_params) {
      Nat lo = 0;
      for (const auto& c : def.domain)
        if (c.var == param) lo = std::max(lo, c.bound);
      std::vector<IndexEnv> next;
      for (const auto& env : grid)
        for (Nat v = lo; v <= sample_max; ++v) {
          IndexEnv e = env;
          e[param] = v;
          next.push_back(std::move(e));
        }
      grid = std::move(next);
    }
    for (const auto& env : grid) {
      ReportEntry entry;
      entry.def = def.name;
      entry.indices = env;
      try {
        check_def(sig, def, metric, env);
      } catch (const TypeError& e) {
        entry.ok = false;
        entry.error_kind = TypeError::kind_name(e.kind);
        entry.error = e.what();
        entry.lhs = e.lhs;
        entry.rhs = e.rhs;
      } catch (const std::exception& e) {
        entry.ok = false;
        entry.error_kind = "UnknownType";
        entry.error = e.what();
      }
      if (!entry.ok) {
        ++report.failures;
        if (!report.first_failure) report.first_failure = entry;
      }
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

void check_expr_judgment(const Signature& sig, const ProcPtr& expr, const ExprJudgment& j,
                         Nat have, const Metric& metric) {
  Ctx ctx;
  for (const auto& [n, t] : j.context) ctx.entries.emplace_back(n, t);
  Checker ck(sig, metric, nullptr);
  ck.walk(expr, std::move(ctx), j.provided_name, j.provided_type, have, j.provided_name);
}

namespace {

TypePtr config_view(const Config& cfg, const std::string& chan, const std::string& pred) {
  auto it = cfg.channels.find(chan);
  if (it == cfg.channels.end())
    throw PreservationError(pred, "no protocol state for channel " + chan);
  return it->second;
}

// Channels a message predicate uses (everything but its carrier).
std::vector<std::string> msg_uses(const MsgPred& m) {
  std::vector<std::string> out;
  switch (m.kind) {
    case MsgPred::Kind::Fwd:
      out.push_back(m.payload);
      break;
    case MsgPred::Kind::Close:
      break;
    case MsgPred::Kind::Label:
      out.push_back(m.polarity == Polarity::ProviderToClient ? m.cont : m.subject);
      break;
    case MsgPred::Kind::Chan:
      out.push_back(m.polarity == Polarity::ProviderToClient ? m.cont : m.subject);
      out.push_back(m.payload);
      break;
  }
  return out;
}

void check_forest(const Config& cfg) {
  std::map<std::string, int> providers, clients;
  for (const auto& [chan, view] : cfg.channels) providers[chan] = 0;
  auto use = [&](const std::string& chan, const std::string& pred) {
    if (!cfg.channels.count(chan))
      throw PreservationError(pred, "uses unknown channel " + chan);
    if (++clients[chan] > 1)
      throw PreservationError(pred, "channel " + chan + " has more than one client");
  };
  auto provide = [&](const std::string& chan, const std::string& pred) {
    if (!cfg.channels.count(chan))
      throw PreservationError(pred, "provides unknown channel " + chan);
    if (++providers[chan] > 1)
      throw PreservationError(pred, "channel " + chan + " has more than one provider");
  };
  for (const auto& p : cfg.procs) {
    std::string pred = "proc(" + p.provides + ")";
    provide(p.provides, pred);
    std::set<std::string> free;
    free_channels(p.expr, free);
    free.erase(p.provides);
    for (const auto& c : free) use(c, pred);
  }
  for (const auto& m : cfg.msgs) {
    std::string pred = "msg(" + m.carrier + ")";
    provide(m.carrier, pred);
    for (const auto& c : msg_uses(m)) use(c, pred);
  }
  for (const auto& [chan, n] : providers)
    if (n == 0) throw PreservationError("config", "channel " + chan + " has no provider");
}

void check_msg(const Signature& sig, const Config& cfg, const MsgPred& m) {
  std::string pred = "msg(" + m.carrier + ")";
  auto expect_pot = [&](Nat r) {
    if (m.potential < r)
      throw PreservationError(pred, "message potential " + std::to_string(m.potential) +
                                        " below annotation " + std::to_string(r));
  };
  switch (m.kind) {
    case MsgPred::Kind::Fwd: {
      if (!type_equal(config_view(cfg, m.carrier, pred), config_view(cfg, m.payload, pred), sig))
        throw PreservationError(pred, "forward between unequal protocol states");
      return;
    }
    case MsgPred::Kind::Close: {
      TypePtr head = unfold_head(config_view(cfg, m.carrier, pred), sig);
      if (head->kind != SType::Kind::One)
        throw PreservationError(pred, "close message at " + type_to_string(head));
      expect_pot(eval_pot(head->pot, {}));
      return;
    }
    case MsgPred::Kind::Label: {
      TypePtr head = unfold_head(config_view(cfg, m.subject, pred), sig);
      SType::Kind want = m.polarity == Polarity::ProviderToClient ? SType::Kind::IChoice
                                                                  : SType::Kind::EChoice;
      if (head->kind != want)
        throw PreservationError(pred, "label message at " + type_to_string(head));
      const Branch* b = head->find_branch(m.label);
      if (!b) throw PreservationError(pred, "label '" + m.label + "' not in protocol");
      expect_pot(eval_pot(b->pot, {}));
      if (!type_equal(config_view(cfg, m.cont, pred), b->cont, sig))
        throw PreservationError(pred, "continuation channel at wrong protocol state");
      return;
    }
    case MsgPred::Kind::Chan: {
      TypePtr head = unfold_head(config_view(cfg, m.subject, pred), sig);
      SType::Kind want = m.polarity == Polarity::ProviderToClient ? SType::Kind::Tensor
                                                                  : SType::Kind::Lolli;
      if (head->kind != want)
        throw PreservationError(pred, "channel message at " + type_to_string(head));
      expect_pot(eval_pot(head->pot, {}));
      if (!type_equal(config_view(cfg, m.payload, pred), head->payload, sig))
        throw PreservationError(pred, "payload channel at wrong protocol state");
      if (!type_equal(config_view(cfg, m.cont, pred), head->cont, sig))
        throw PreservationError(pred, "continuation channel at wrong protocol state");
      return;
    }
  }
}

} // namespace

Nat typecheck_config(const Signature& sig, const Config& cfg, const Metric& metric) {
  check_forest(cfg);
  for (const auto& p : cfg.procs) {
    std::string pred = "proc(" + p.provides + ")";
    ExprJudgment j;
    j.provided_name = p.provides;
    j.provided_type = config_view(cfg, p.provides, pred);
    std::set<std::string> free;
    free_channels(p.expr, free);
    free.erase(p.provides);
    for (const auto& c : free) j.context.emplace_back(c, config_view(cfg, c, pred));
    Metric m = p.cost_mode == CostMode::CostFree ? Metric::cost_free() : metric;
    try {
      check_expr_judgment(sig, p.expr, j, p.potential, m);
    } catch (const TypeError& e) {
      throw PreservationError(pred, e.what());
    }
  }
  for (const auto& m : cfg.msgs) check_msg(sig, cfg, m);
  Totals t = totals(cfg);
  return t.work + t.potential;
}

} // namespace rsill
