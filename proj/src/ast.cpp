#include "rsill/ast.hpp"

namespace rsill {

namespace ty {

static std::shared_ptr<SType> node(SType::Kind k) { return std::make_shared<SType>(SType(k)); }

TypePtr tvar(std::string name, std::vector<PotPtr> args) {
  auto n = node(SType::Kind::TVar);
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

TypePtr ichoice(std::vector<Branch> branches) {
  auto n = node(SType::Kind::IChoice);
  n->branches = std::move(branches);
  return n;
}

TypePtr echoice(std::vector<Branch> branches) {
  auto n = node(SType::Kind::EChoice);
  n->branches = std::move(branches);
  return n;
}

TypePtr tensor(PotPtr pot, TypePtr payload, TypePtr cont) {
  auto n = node(SType::Kind::Tensor);
  n->pot = std::move(pot);
  n->payload = std::move(payload);
  n->cont = std::move(cont);
  return n;
}

TypePtr lolli(PotPtr pot, TypePtr payload, TypePtr cont) {
  auto n = node(SType::Kind::Lolli);
  n->pot = std::move(pot);
  n->payload = std::move(payload);
  n->cont = std::move(cont);
  return n;
}

TypePtr one(PotPtr pot) {
  auto n = node(SType::Kind::One);
  n->pot = std::move(pot);
  return n;
}

} // namespace ty

namespace pe {

static std::shared_ptr<ProcExpr> node(ProcExpr::Kind k) {
  return std::make_shared<ProcExpr>(ProcExpr(k));
}

ProcPtr spawn(std::string bind, std::string def, std::vector<PotPtr> index_args,
              std::vector<std::string> chan_args, ProcPtr cont) {
  auto n = node(ProcExpr::Kind::Spawn);
  n->aux = std::move(bind);
  n->def_name = std::move(def);
  n->index_args = std::move(index_args);
  n->chan_args = std::move(chan_args);
  n->cont = std::move(cont);
  return n;
}

ProcPtr fwd(std::string provided, std::string used) {
  auto n = node(ProcExpr::Kind::Fwd);
  n->chan = std::move(provided);
  n->aux = std::move(used);
  return n;
}

ProcPtr send_label(std::string chan, std::string label, ProcPtr cont) {
  auto n = node(ProcExpr::Kind::SendLabel);
  n->chan = std::move(chan);
  n->label = std::move(label);
  n->cont = std::move(cont);
  return n;
}

ProcPtr case_recv(std::string chan, std::vector<std::pair<std::string, ProcPtr>> branches) {
  auto n = node(ProcExpr::Kind::CaseRecv);
  n->chan = std::move(chan);
  n->case_branches = std::move(branches);
  return n;
}

ProcPtr send_chan(std::string chan, std::string payload, ProcPtr cont) {
  auto n = node(ProcExpr::Kind::SendChan);
  n->chan = std::move(chan);
  n->aux = std::move(payload);
  n->cont = std::move(cont);
  return n;
}

ProcPtr recv_chan(std::string chan, std::string bind, ProcPtr cont) {
  auto n = node(ProcExpr::Kind::RecvChan);
  n->chan = std::move(chan);
  n->aux = std::move(bind);
  n->cont = std::move(cont);
  return n;
}

ProcPtr close(std::string chan) {
  auto n = node(ProcExpr::Kind::Close);
  n->chan = std::move(chan);
  return n;
}

ProcPtr wait(std::string chan, ProcPtr cont) {
  auto n = node(ProcExpr::Kind::Wait);
  n->chan = std::move(chan);
  n->cont = std::move(cont);
  return n;
}

} // namespace pe

ProcPtr subst_chan(const ProcPtr& p, const std::string& from, const std::string& to) {
  if (!p || from == to) return p;
  auto ren = [&](const std::string& s) { return s == from ? to : s; };
  auto n = std::make_shared<ProcExpr>(*p);
  switch (p->kind) {
    case ProcExpr::Kind::Spawn:
      // The bound name shadows; spawn arguments are free occurrences.
      for (auto& c : n->chan_args) c = ren(c);
      if (p->aux != from) n->cont = subst_chan(p->cont, from, to);
      break;
    case ProcExpr::Kind::Fwd:
      n->chan = ren(p->chan);
      n->aux = ren(p->aux);
      break;
    case ProcExpr::Kind::SendLabel:
    case ProcExpr::Kind::Wait:
      n->chan = ren(p->chan);
      n->cont = subst_chan(p->cont, from, to);
      break;
    case ProcExpr::Kind::CaseRecv: {
      n->chan = ren(p->chan);
      n->case_branches.clear();
      for (const auto& [lbl, body] : p->case_branches)
        n->case_branches.emplace_back(lbl, subst_chan(body, from, to));
      break;
    }
    case ProcExpr::Kind::SendChan:
      n->chan = ren(p->chan);
      n->aux = ren(p->aux);
      n->cont = subst_chan(p->cont, from, to);
      break;
    case ProcExpr::Kind::RecvChan:
      n->chan = ren(p->chan);
      if (p->aux != from) n->cont = subst_chan(p->cont, from, to);
      break;
    case ProcExpr::Kind::Close:
      n->chan = ren(p->chan);
      break;
  }
  return n;
}

ProcPtr subst_indices(const ProcPtr& p, const IndexEnv& env) {
  if (!p || env.empty()) return p;
  auto n = std::make_shared<ProcExpr>(*p);
  if (p->kind == ProcExpr::Kind::Spawn) {
    n->index_args.clear();
    for (const auto& a : p->index_args) n->index_args.push_back(subst_pot(a, env));
  }
  if (p->kind == ProcExpr::Kind::CaseRecv) {
    n->case_branches.clear();
    for (const auto& [lbl, body] : p->case_branches)
      n->case_branches.emplace_back(lbl, subst_indices(body, env));
  } else if (p->cont) {
    n->cont = subst_indices(p->cont, env);
  }
  return n;
}

void free_channels(const ProcPtr& p, std::set<std::string>& out) {
  if (!p) return;
  switch (p->kind) {
    case ProcExpr::Kind::Spawn: {
      for (const auto& c : p->chan_args) out.insert(c);
      std::set<std::string> inner;
      free_channels(p->cont, inner);
      inner.erase(p->aux);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case ProcExpr::Kind::Fwd:
      out.insert(p->chan);
      out.insert(p->aux);
      return;
    case ProcExpr::Kind::SendLabel:
    case ProcExpr::Kind::Wait:
      out.insert(p->chan);
      free_channels(p->cont, out);
      return;
    case ProcExpr::Kind::CaseRecv:
      out.insert(p->chan);
      for (const auto& [lbl, body] : p->case_branches) free_channels(body, out);
      return;
    case ProcExpr::Kind::SendChan:
      out.insert(p->chan);
      out.insert(p->aux);
      free_channels(p->cont, out);
      return;
    case ProcExpr::Kind::RecvChan: {
      out.insert(p->chan);
      std::set<std::string> inner;
      free_channels(p->cont, inner);
      inner.erase(p->aux);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case ProcExpr::Kind::Close:
      out.insert(p->chan);
      return;
  }
}

bool domain_satisfied(const std::vector<Constraint>& domain, const IndexEnv& env) {
  for (const auto& c : domain) {
    auto it = env.find(c.var);
    if (it == env.end() || it->second < c.bound) return false;
  }
  return true;
}

} // namespace rsill
