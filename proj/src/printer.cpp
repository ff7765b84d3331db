#include "rsill/printer.hpp"

#include "rsill/types.hpp"

namespace rsill {

namespace {

void indent_to(std::string& out, int n) { out.append(static_cast<size_t>(n), ' '); }

bool is_tail_call(const ProcExpr& p) {
  return p.kind == ProcExpr::Kind::Spawn && p.aux.rfind("%t", 0) == 0 && p.cont &&
         p.cont->kind == ProcExpr::Kind::Fwd && p.cont->aux == p.aux;
}

void render_call_suffix(const ProcExpr& p, std::string& out) {
  if (!p.index_args.empty()) {
    out += '[';
    for (size_t i = 0; i < p.index_args.size(); ++i) {
      if (i) out += ", ";
      out += pot_to_string(p.index_args[i]);
    }
    out += ']';
  }
  out += '(';
  for (size_t i = 0; i < p.chan_args.size(); ++i) {
    if (i) out += ", ";
    out += p.chan_args[i];
  }
  out += ')';
}

void render_proc(const ProcPtr& p, std::string& out, int ind) {
  indent_to(out, ind);
  switch (p->kind) {
    case ProcExpr::Kind::Spawn:
      if (is_tail_call(*p)) {
        out += p->def_name;
        render_call_suffix(*p, out);
        out += " providing " + p->cont->chan + "\n";
        return;
      }
      out += p->aux + " <- spawn " + p->def_name;
      render_call_suffix(*p, out);
      out += ";\n";
      render_proc(p->cont, out, ind);
      return;
    case ProcExpr::Kind::Fwd:
      out += "fwd " + p->chan + " " + p->aux + "\n";
      return;
    case ProcExpr::Kind::SendLabel:
      out += p->chan + "." + p->label + ";\n";
      render_proc(p->cont, out, ind);
      return;
    case ProcExpr::Kind::CaseRecv: {
      out += "case " + p->chan + " {\n";
      for (size_t i = 0; i < p->case_branches.size(); ++i) {
        indent_to(out, ind + 2);
        out += p->case_branches[i].first + " =>\n";
        render_proc(p->case_branches[i].second, out, ind + 4);
        if (i + 1 < p->case_branches.size()) {
          indent_to(out, ind);
          out += "|\n";
        }
      }
      indent_to(out, ind);
      out += "}\n";
      return;
    }
    case ProcExpr::Kind::SendChan:
      out += "send " + p->chan + " " + p->aux + ";\n";
      render_proc(p->cont, out, ind);
      return;
    case ProcExpr::Kind::RecvChan:
      out += p->aux + " <- recv " + p->chan + ";\n";
      render_proc(p->cont, out, ind);
      return;
    case ProcExpr::Kind::Close:
      out += "close " + p->chan + "\n";
      return;
    case ProcExpr::Kind::Wait:
      out += "wait " + p->chan + ";\n";
      render_proc(p->cont, out, ind);
      return;
  }
}

void render_params(const std::vector<std::string>& params, const std::vector<Constraint>& dom,
                   std::string& out) {
  if (params.empty() && dom.empty()) return;
  out += '[';
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i];
  }
  if (!dom.empty()) {
    out += " | ";
    for (size_t i = 0; i < dom.size(); ++i) {
      if (i) out += ", ";
      out += dom[i].var + " >= " + std::to_string(dom[i].bound);
    }
  }
  out += ']';
}

} // namespace

std::string pretty_proc(const ProcPtr& p, int indent) {
  std::string out;
  render_proc(p, out, indent);
  return out;
}

std::string pretty_program(const Signature& sig) {
  std::string out;
  for (const auto& d : sig.type_defs) {
    out += "type " + d.name;
    render_params(d.index_params, d.domain, out);
    out += " = " + type_to_string(d.body) + "\n\n";
  }
  for (const auto& d : sig.proc_defs) {
    if (d.cost_mode == CostMode::CostFree) out += "costfree ";
    out += "proc " + d.name + " ";
    render_params(d.index_params, d.domain, out);
    out += " |" + pot_to_string(d.potential) + "| (";
    for (size_t i = 0; i < d.uses.size(); ++i) {
      if (i) out += ", ";
      out += d.uses[i].first + " : " + type_to_string(d.uses[i].second);
    }
    out += ") -> (" + d.provides.first + " : " + type_to_string(d.provides.second) + ") =\n";
    render_proc(d.body, out, 2);
    out += "\n";
  }
  return out;
}

bool structural_equal(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SType::Kind::TVar: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!pot_equal(a->args[i], b->args[i])) return false;
      return true;
    }
    case SType::Kind::IChoice:
    case SType::Kind::EChoice: {
      if (a->branches.size() != b->branches.size()) return false;
      for (size_t i = 0; i < a->branches.size(); ++i) {
        if (a->branches[i].label != b->branches[i].label) return false;
        if (!pot_equal(a->branches[i].pot, b->branches[i].pot)) return false;
        if (!structural_equal(a->branches[i].cont, b->branches[i].cont)) return false;
      }
      return true;
    }
    case SType::Kind::Tensor:
    case SType::Kind::Lolli:
      return pot_equal(a->pot, b->pot) && structural_equal(a->payload, b->payload) &&
             structural_equal(a->cont, b->cont);
    case SType::Kind::One:
      return pot_equal(a->pot, b->pot);
  }
  return false;
}

bool structural_equal(const ProcPtr& a, const ProcPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->chan != b->chan || a->aux != b->aux || a->label != b->label ||
      a->def_name != b->def_name)
    return false;
  if (a->index_args.size() != b->index_args.size() || a->chan_args != b->chan_args)
    return false;
  for (size_t i = 0; i < a->index_args.size(); ++i)
    if (!pot_equal(a->index_args[i], b->index_args[i])) return false;
  if (a->case_branches.size() != b->case_branches.size()) return false;
  for (size_t i = 0; i < a->case_branches.size(); ++i) {
    if (a->case_branches[i].first != b->case_branches[i].first) return false;
    if (!structural_equal(a->case_branches[i].second, b->case_branches[i].second)) return false;
  }
  if (!!a->cont != !!b->cont) return false;
  return !a->cont || structural_equal(a->cont, b->cont);
}

bool structural_equal(const Signature& a, const Signature& b) {
  if (a.type_defs.size() != b.type_defs.size() || a.proc_defs.size() != b.proc_defs.size())
    return false;
  for (size_t i = 0; i < a.type_defs.size(); ++i) {
    const auto& x = a.type_defs[i];
    const auto& y = b.type_defs[i];
    if (x.name != y.name || x.index_params != y.index_params) return false;
    if (x.domain.size() != y.domain.size()) return false;
    for (size_t j = 0; j < x.domain.size(); ++j)
      if (x.domain[j].var != y.domain[j].var || x.domain[j].bound != y.domain[j].bound)
        return false;
    if (!structural_equal(x.body, y.body)) return false;
  }
  for (size_t i = 0; i < a.proc_defs.size(); ++i) {
    const auto& x = a.proc_defs[i];
    const auto& y = b.proc_defs[i];
    if (x.name != y.name || x.index_params != y.index_params || x.cost_mode != y.cost_mode)
      return false;
    if (x.domain.size() != y.domain.size()) return false;
    for (size_t j = 0; j < x.domain.size(); ++j)
      if (x.domain[j].var != y.domain[j].var || x.domain[j].bound != y.domain[j].bound)
        return false;
    if (!pot_equal(x.potential, y.potential)) return false;
    if (x.uses.size() != y.uses.size()) return false;
    for (size_t j = 0; j < x.uses.size(); ++j) {
      if (x.uses[j].first != y.uses[j].first) return false;
      if (!structural_equal(x.uses[j].second, y.uses[j].second)) return false;
    }
    if (x.provides.first != y.provides.first) return false;
    if (!structural_equal(x.provides.second, y.provides.second)) return false;
    if (!structural_equal(x.body, y.body)) return false;
  }
  return true;
}

} // namespace rsill
