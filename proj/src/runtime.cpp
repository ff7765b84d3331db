#include "rsill/runtime.hpp"

#include <algorithm>
#include <tuple>

namespace rsill {

namespace {

using RK = RuntimeError::Kind;

Nat proc_cost(const ProcPred& p, Nat metric_cost) {
  return p.cost_mode == CostMode::CostFree ? 0 : metric_cost;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Nat config_weight(const Config& c) {
  Nat w = 0;
  for (const auto& p : c.procs) w += p.work + p.potential;
  for (const auto& m : c.msgs) w += m.work + m.potential;
  return w;
}

} // namespace

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::spawn_c: return "spawn_c";
    case Rule::fwd_s: return "fwd_s";
    case Rule::fwd_plus_r: return "fwd_plus_r";
    case Rule::fwd_minus_r: return "fwd_minus_r";
    case Rule::plusC_s: return "plusC_s";
    case Rule::plusC_r: return "plusC_r";
    case Rule::withC_s: return "withC_s";
    case Rule::withC_r: return "withC_r";
    case Rule::tensorC_s: return "tensorC_s";
    case Rule::tensorC_r: return "tensorC_r";
    case Rule::lolliC_s: return "lolliC_s";
    case Rule::lolliC_r: return "lolliC_r";
    case Rule::oneC_s: return "oneC_s";
    case Rule::oneC_r: return "oneC_r";
  }
  return "?";
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Done: return "done";
    case RunStatus::Stuck: return "stuck";
    case RunStatus::Budget: return "budget";
  }
  return "?";
}

const ProcPred* Config::proc_by_id(int id) const {
  for (const auto& p : procs)
    if (p.id == id) return &p;
  return nullptr;
}

const MsgPred* Config::msg_by_id(int id) const {
  for (const auto& m : msgs)
    if (m.id == id) return &m;
  return nullptr;
}

Config init_config(const Signature& sig, const std::string& main_name) {
  const ProcDef* def = sig.find_proc(main_name);
  if (!def) throw RuntimeError(RK::NoSuchMain, "no process definition '" + main_name + "'");
  if (!def->uses.empty())
    throw RuntimeError(RK::MainNotClosed, "'" + main_name + "' uses channels; a main must be closed");
  if (!def->index_params.empty())
    throw RuntimeError(RK::MainNotClosed, "'" + main_name + "' has index parameters");
  TypePtr prov = unfold_head(def->provides.second, sig);
  if (prov->kind != SType::Kind::One)
    throw RuntimeError(RK::MainNotClosed, "'" + main_name + "' must provide a channel of type 1");

  Config cfg;
  cfg.root = cfg.fresh_chan();
  cfg.channels[cfg.root] = def->provides.second;
  ProcPred p;
  p.id = cfg.next_pred_id++;
  p.provides = cfg.root;
  p.work = 0;
  p.potential = eval_pot(def->potential, {});
  p.expr = subst_chan(def->body, def->provides.first, cfg.root);
  p.cost_mode = def->cost_mode;
  cfg.procs.push_back(std::move(p));
  return cfg;
}

namespace {

// Looks up the concrete protocol state of a channel and unfolds to the head
// constructor. Runtime types are closed, so no environment is needed.
TypePtr view_head(const Config& cfg, const Signature& sig, const std::string& chan) {
  auto it = cfg.channels.find(chan);
  if (it == cfg.channels.end())
    throw RuntimeError(RK::ProtocolViolation, "no protocol state for channel " + chan);
  return unfold_head(it->second, sig);
}

const MsgPred* find_msg_on(const Config& cfg, const std::string& carrier) {
  for (const auto& m : cfg.msgs)
    if (m.carrier == carrier) return &m;
  return nullptr;
}

const MsgPred* find_msg_with_subject(const Config& cfg, const std::string& subject,
                                     Polarity pol) {
  for (const auto& m : cfg.msgs)
    if (m.kind != MsgPred::Kind::Fwd && m.subject == subject && m.polarity == pol) return &m;
  return nullptr;
}

} // namespace

std::vector<RuleInstance> enabled(const Config& cfg) {
  std::vector<RuleInstance> out;
  for (const auto& p : cfg.procs) {
    const ProcExpr& e = *p.expr;
    switch (e.kind) {
      case ProcExpr::Kind::Spawn:
        out.push_back({Rule::spawn_c, p.id, -1, -1});
        break;
      case ProcExpr::Kind::Fwd:
        out.push_back({Rule::fwd_s, p.id, -1, -1});
        break;
      case ProcExpr::Kind::SendLabel:
        out.push_back({e.chan == p.provides ? Rule::plusC_s : Rule::withC_s, p.id, -1, -1});
        break;
      case ProcExpr::Kind::SendChan:
        out.push_back({e.chan == p.provides ? Rule::tensorC_s : Rule::lolliC_s, p.id, -1, -1});
        break;
      case ProcExpr::Kind::Close:
        out.push_back({Rule::oneC_s, p.id, -1, -1});
        break;
      case ProcExpr::Kind::CaseRecv: {
        if (e.chan == p.provides) {
          if (const MsgPred* m = find_msg_with_subject(cfg, e.chan, Polarity::ClientToProvider);
              m && m->kind == MsgPred::Kind::Label)
            out.push_back({Rule::withC_r, p.id, m->id, -1});
        } else {
          if (const MsgPred* m = find_msg_on(cfg, e.chan);
              m && m->kind == MsgPred::Kind::Label && m->polarity == Polarity::ProviderToClient)
            out.push_back({Rule::plusC_r, p.id, m->id, -1});
        }
        break;
      }
      case ProcExpr::Kind::RecvChan: {
        if (e.chan == p.provides) {
          if (const MsgPred* m = find_msg_with_subject(cfg, e.chan, Polarity::ClientToProvider);
              m && m->kind == MsgPred::Kind::Chan)
            out.push_back({Rule::lolliC_r, p.id, m->id, -1});
        } else {
          if (const MsgPred* m = find_msg_on(cfg, e.chan);
              m && m->kind == MsgPred::Kind::Chan && m->polarity == Polarity::ProviderToClient)
            out.push_back({Rule::tensorC_r, p.id, m->id, -1});
        }
        break;
      }
      case ProcExpr::Kind::Wait: {
        if (const MsgPred* m = find_msg_on(cfg, e.chan); m && m->kind == MsgPred::Kind::Close)
          out.push_back({Rule::oneC_r, p.id, m->id, -1});
        break;
      }
    }
  }
  // Forward messages are absorbed eagerly: into the provider of the forwarded
  // channel (a process, or another message for chains), or into the client.
  for (const auto& m : cfg.msgs) {
    if (m.kind != MsgPred::Kind::Fwd) continue;
    for (const auto& p : cfg.procs)
      if (p.provides == m.payload) out.push_back({Rule::fwd_plus_r, p.id, m.id, -1});
    for (const auto& m2 : cfg.msgs)
      if (m2.carrier == m.payload) out.push_back({Rule::fwd_plus_r, -1, m.id, m2.id});
    for (const auto& p : cfg.procs) {
      if (p.provides == m.carrier) continue;
      std::set<std::string> free;
      free_channels(p.expr, free);
      if (free.count(m.carrier)) out.push_back({Rule::fwd_minus_r, p.id, m.id, -1});
    }
  }
  return out;
}

namespace {

struct Stepper {
  Config& cfg;
  const Signature& sig;
  const Metric& metric;
  TraceEvent ev;

  ProcPred& actor(const RuleInstance& inst) {
    for (auto& p : cfg.procs)
      if (p.id == inst.actor) return p;
    throw RuntimeError(RK::NotEnabled, "acting process vanished");
  }

  MsgPred& message(int id) {
    for (auto& m : cfg.msgs)
      if (m.id == id) return m;
    throw RuntimeError(RK::NotEnabled, "message premise vanished");
  }

  void remove_proc(int id) {
    cfg.procs.erase(std::remove_if(cfg.procs.begin(), cfg.procs.end(),
                                   [&](const ProcPred& p) { return p.id == id; }),
                    cfg.procs.end());
  }

  void remove_msg(int id) {
    cfg.msgs.erase(std::remove_if(cfg.msgs.begin(), cfg.msgs.end(),
                                  [&](const MsgPred& m) { return m.id == id; }),
                   cfg.msgs.end());
  }

  void debit(ProcPred& p, Nat amount, const std::string& what) {
    if (p.potential < amount)
      throw RuntimeError(RK::NegativePotential,
                         "ledger underflow at " + what + ": potential " +
                             std::to_string(p.potential) + " < " + std::to_string(amount));
    p.potential -= amount;
  }

  const Branch& branch_of(const TypePtr& head, SType::Kind want, const std::string& label,
                          const std::string& chan) {
    if (head->kind != want)
      throw RuntimeError(RK::ProtocolViolation,
                         "channel " + chan + " is at " + type_to_string(head));
    const Branch* b = head->find_branch(label);
    if (!b)
      throw RuntimeError(RK::ProtocolViolation,
                         "label '" + label + "' not offered at " + type_to_string(head));
    return *b;
  }

  // --- sends ---------------------------------------------------------------

  void send_label(ProcPred& p, bool provider) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    TypePtr head = view_head(cfg, sig, e.chan);
    const Branch& b = branch_of(
        head, provider ? SType::Kind::IChoice : SType::Kind::EChoice, e.label, e.chan);
    Nat r = eval_pot(b.pot, {});
    Nat cost = proc_cost(p, metric.label_cost);
    debit(p, r + cost, p.provides + " sending label '" + e.label + "'");
    std::string fresh = cfg.fresh_chan();
    cfg.channels[fresh] = b.cont;

    MsgPred m;
    m.id = cfg.next_pred_id++;
    m.kind = MsgPred::Kind::Label;
    m.carrier = provider ? e.chan : fresh;
    m.subject = e.chan;
    m.label = e.label;
    m.cont = fresh;
    m.polarity = provider ? Polarity::ProviderToClient : Polarity::ClientToProvider;
    m.work = 0;
    m.potential = r;

    p.work += cost;
    if (provider) p.provides = fresh;
    p.expr = subst_chan(e.cont, e.chan, fresh);

    ev.work_delta = static_cast<long long>(cost);
    ev.pot_delta = -static_cast<long long>(cost);
    ev.channels = {e.chan, fresh};
    ev.label = e.label;
    ev.sender_cost_free = p.cost_mode == CostMode::CostFree;
    cfg.msgs.push_back(std::move(m));
  }

  void send_chan(ProcPred& p, bool provider) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    TypePtr head = view_head(cfg, sig, e.chan);
    if (head->kind != (provider ? SType::Kind::Tensor : SType::Kind::Lolli))
      throw RuntimeError(RK::ProtocolViolation,
                         "channel " + e.chan + " is at " + type_to_string(head));
    Nat r = eval_pot(head->pot, {});
    Nat cost = proc_cost(p, metric.channel_cost);
    debit(p, r + cost, p.provides + " sending channel " + e.aux);
    std::string fresh = cfg.fresh_chan();
    cfg.channels[fresh] = head->cont;

    MsgPred m;
    m.id = cfg.next_pred_id++;
    m.kind = MsgPred::Kind::Chan;
    m.carrier = provider ? e.chan : fresh;
    m.subject = e.chan;
    m.payload = e.aux;
    m.cont = fresh;
    m.polarity = provider ? Polarity::ProviderToClient : Polarity::ClientToProvider;
    m.work = 0;
    m.potential = r;

    p.work += cost;
    if (provider) p.provides = fresh;
    p.expr = subst_chan(e.cont, e.chan, fresh);

    ev.work_delta = static_cast<long long>(cost);
    ev.pot_delta = -static_cast<long long>(cost);
    ev.channels = {e.chan, fresh, e.aux};
    ev.sender_cost_free = p.cost_mode == CostMode::CostFree;
    cfg.msgs.push_back(std::move(m));
  }

  void close_chan(ProcPred& p) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    TypePtr head = view_head(cfg, sig, e.chan);
    if (head->kind != SType::Kind::One)
      throw RuntimeError(RK::ProtocolViolation,
                         "channel " + e.chan + " is at " + type_to_string(head));
    Nat r = eval_pot(head->pot, {});
    Nat cost = proc_cost(p, metric.close_cost);
    if (p.potential < r + cost)
      throw RuntimeError(RK::NegativePotential,
                         "ledger underflow closing " + e.chan + ": potential " +
                             std::to_string(p.potential) + " < " + std::to_string(r + cost));
    // The residual (minus the send cost) rides on the close message, so the
    // weight is conserved exactly here; only fwd_s discards potential.
    MsgPred m;
    m.id = cfg.next_pred_id++;
    m.kind = MsgPred::Kind::Close;
    m.carrier = e.chan;
    m.subject = e.chan;
    m.work = p.work + cost;
    m.potential = p.potential - cost;

    ev.work_delta = static_cast<long long>(cost);
    ev.pot_delta = -static_cast<long long>(cost);
    ev.channels = {e.chan};
    ev.sender_cost_free = p.cost_mode == CostMode::CostFree;
    remove_proc(p.id);
    cfg.msgs.push_back(std::move(m));
  }

  void spawn(ProcPred& p) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    const ProcDef* callee = sig.find_proc(e.def_name);
    if (!callee)
      throw RuntimeError(RK::ProtocolViolation, "unknown process '" + e.def_name + "'");
    IndexEnv env;
    for (size_t i = 0; i < e.index_args.size(); ++i)
      env[callee->index_params[i]] = eval_pot(e.index_args[i], {});
    Nat pot = eval_pot(callee->potential, env);
    debit(p, pot, "spawn of '" + e.def_name + "'");

    std::string fresh = cfg.fresh_chan();
    cfg.channels[fresh] = subst_type(callee->provides.second, env);

    ProcPtr body = subst_indices(callee->body, env);
    body = subst_chan(body, callee->provides.first, fresh);
    for (size_t i = 0; i < e.chan_args.size(); ++i)
      body = subst_chan(body, callee->uses[i].first, e.chan_args[i]);

    ProcPred child;
    child.id = cfg.next_pred_id++;
    child.provides = fresh;
    child.work = 0;
    child.potential = pot;
    child.expr = body;
    child.cost_mode = callee->cost_mode;

    p.expr = subst_chan(e.cont, e.aux, fresh);

    ev.channels = {fresh};
    ev.label = e.def_name;
    cfg.procs.push_back(std::move(child));
  }

  void fwd_send(ProcPred& p) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    // Residual potential is discarded; the work is preserved on the message.
    MsgPred m;
    m.id = cfg.next_pred_id++;
    m.kind = MsgPred::Kind::Fwd;
    m.carrier = e.chan;
    m.subject = e.chan;
    m.payload = e.aux;
    m.work = p.work;
    m.potential = 0;

    ev.pot_delta = -static_cast<long long>(p.potential);
    ev.channels = {e.chan, e.aux};
    remove_proc(p.id);
    cfg.msgs.push_back(std::move(m));
  }

  // --- receives --------------------------------------------------------------

  void recv_label(ProcPred& p, MsgPred& m, bool provider) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    const ProcPtr* body = nullptr;
    for (const auto& [lbl, b] : e.case_branches)
      if (lbl == m.label) body = &b;
    if (!body)
      throw RuntimeError(RK::ProtocolViolation,
                         "received label '" + m.label + "' has no branch in " + p.provides);
    p.potential += m.potential;
    p.work += m.work;
    if (provider) p.provides = m.carrier; // continuation channel of a client send
    p.expr = subst_chan(*body, e.chan, m.cont);
    ev.channels = {e.chan, m.cont};
    ev.label = m.label;
    cfg.channels.erase(m.subject);
    remove_msg(m.id);
  }

  void recv_chan(ProcPred& p, MsgPred& m, bool provider) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    p.potential += m.potential;
    p.work += m.work;
    if (provider) p.provides = m.carrier;
    ProcPtr body = subst_chan(e.cont, e.aux, m.payload);
    p.expr = subst_chan(body, e.chan, m.cont);
    ev.channels = {e.chan, m.cont, m.payload};
    cfg.channels.erase(m.subject);
    remove_msg(m.id);
  }

  void recv_close(ProcPred& p, MsgPred& m) {
    ProcPtr held = p.expr;
    const ProcExpr& e = *held;
    p.potential += m.potential;
    p.work += m.work;
    p.expr = e.cont;
    ev.channels = {e.chan};
    cfg.channels.erase(m.carrier);
    remove_msg(m.id);
  }

  void fwd_absorb_provider(ProcPred& p, MsgPred& m) {
    // proc(d){w, P} + msg(c){w', fwd c d}  ->  proc(c){w + w', [c/d]P}
    p.work += m.work;
    p.expr = subst_chan(p.expr, m.payload, m.carrier);
    p.provides = m.carrier;
    ev.channels = {m.carrier, m.payload};
    cfg.channels.erase(m.payload);
    remove_msg(m.id);
  }

  void fwd_absorb_msg(MsgPred& fwd, MsgPred& provider_msg) {
    // Chain absorption: the message providing d re-carries on c, summing work.
    provider_msg.work += fwd.work;
    provider_msg.potential += fwd.potential;
    std::string from = fwd.payload, to = fwd.carrier;
    if (provider_msg.carrier == from) provider_msg.carrier = to;
    if (provider_msg.subject == from) provider_msg.subject = to;
    if (provider_msg.cont == from) provider_msg.cont = to;
    ev.channels = {to, from};
    cfg.channels.erase(from);
    remove_msg(fwd.id);
  }

  void fwd_absorb_client(ProcPred& p, MsgPred& m) {
    // proc(e){w, P_c} + msg(c){w', fwd c d}  ->  proc(e){w + w', [d/c]P}
    p.work += m.work;
    p.expr = subst_chan(p.expr, m.carrier, m.payload);
    ev.channels = {m.carrier, m.payload};
    cfg.channels.erase(m.carrier);
    remove_msg(m.id);
  }
};

} // namespace

TraceEvent step(Config& cfg, const RuleInstance& inst, const Signature& sig,
                const Metric& metric) {
  Stepper st{cfg, sig, metric, {}};
  st.ev.rule = rule_name(inst.rule);
  switch (inst.rule) {
    case Rule::spawn_c: st.spawn(st.actor(inst)); break;
    case Rule::fwd_s: st.fwd_send(st.actor(inst)); break;
    case Rule::plusC_s: st.send_label(st.actor(inst), true); break;
    case Rule::withC_s: st.send_label(st.actor(inst), false); break;
    case Rule::tensorC_s: st.send_chan(st.actor(inst), true); break;
    case Rule::lolliC_s: st.send_chan(st.actor(inst), false); break;
    case Rule::oneC_s: st.close_chan(st.actor(inst)); break;
    case Rule::plusC_r: st.recv_label(st.actor(inst), st.message(inst.msg), false); break;
    case Rule::withC_r: st.recv_label(st.actor(inst), st.message(inst.msg), true); break;
    case Rule::tensorC_r: st.recv_chan(st.actor(inst), st.message(inst.msg), false); break;
    case Rule::lolliC_r: st.recv_chan(st.actor(inst), st.message(inst.msg), true); break;
    case Rule::oneC_r: st.recv_close(st.actor(inst), st.message(inst.msg)); break;
    case Rule::fwd_plus_r:
      if (inst.actor >= 0)
        st.fwd_absorb_provider(st.actor(inst), st.message(inst.msg));
      else
        st.fwd_absorb_msg(st.message(inst.msg), st.message(inst.aux_msg));
      break;
    case Rule::fwd_minus_r: st.fwd_absorb_client(st.actor(inst), st.message(inst.msg)); break;
  }
  st.ev.weight_after = config_weight(cfg);
  return st.ev;
}

Totals totals(const Config& cfg) {
  Totals t;
  for (const auto& p : cfg.procs) {
    t.work += p.work;
    t.potential += p.potential;
  }
  for (const auto& m : cfg.msgs) {
    t.work += m.work;
    t.potential += m.potential;
  }
  return t;
}

namespace {

bool run_done(const Config& cfg) {
  return cfg.procs.empty() && cfg.msgs.size() == 1 &&
         cfg.msgs.front().kind == MsgPred::Kind::Close && cfg.msgs.front().carrier == cfg.root;
}

// Round-robin key: acting process id, or message id offset past all procs.
long long instance_key(const RuleInstance& inst) {
  return inst.actor >= 0 ? inst.actor : (1LL << 32) + inst.msg;
}

// Total order so the schedule is independent of sort internals.
std::tuple<long long, int, int, int> instance_order(const RuleInstance& inst) {
  return {instance_key(inst), static_cast<int>(inst.rule), inst.msg, inst.aux_msg};
}

} // namespace

Trace run(const Signature& sig, const std::string& main_name, const SchedulerSpec& sched,
          const Metric& metric, Nat max_steps, bool keep_configs) {
  Config cfg = init_config(sig, main_name);
  Trace tr;
  tr.initial_weight = config_weight(cfg);
  if (keep_configs) tr.snapshots.push_back(cfg);

  std::uint64_t rng_state = sched.seed;
  long long last_key = -1;
  tr.status = RunStatus::Budget;
  for (Nat n = 0; n < max_steps; ++n) {
    if (run_done(cfg)) {
      tr.status = RunStatus::Done;
      break;
    }
    std::vector<RuleInstance> insts = enabled(cfg);
    if (insts.empty()) {
      tr.status = RunStatus::Stuck;
      break;
    }
    size_t pick = 0;
    if (sched.kind == SchedulerSpec::Kind::Random) {
      pick = static_cast<size_t>(splitmix64(rng_state) % insts.size());
    } else {
      std::sort(insts.begin(), insts.end(), [](const RuleInstance& a, const RuleInstance& b) {
        return instance_order(a) < instance_order(b);
      });
      while (pick < insts.size() && instance_key(insts[pick]) <= last_key) ++pick;
      if (pick == insts.size()) pick = 0;
      last_key = instance_key(insts[pick]);
    }
    TraceEvent ev = step(cfg, insts[pick], sig, metric);
    ev.step = tr.events.size();
    tr.events.push_back(std::move(ev));
    if (keep_configs) tr.snapshots.push_back(cfg);
  }
  if (run_done(cfg)) tr.status = RunStatus::Done;
  tr.final_config = std::move(cfg);
  return tr;
}

} // namespace rsill
