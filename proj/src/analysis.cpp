#include "rsill/analysis.hpp"

namespace rsill {

StoreAnnotations StoreAnnotations::stack_preset() {
  StoreAnnotations ann;
  ann.ins = [](Nat) { return Nat{0}; };
  ann.d = 2;
  return ann;
}

StoreAnnotations StoreAnnotations::queue_preset() {
  StoreAnnotations ann;
  ann.ins = [](Nat n) { return 2 * n; };
  ann.d = 2;
  return ann;
}

StoreAnnotations StoreAnnotations::fqueue_preset() {
  StoreAnnotations ann;
  ann.ins = [](Nat) { return Nat{6}; };
  ann.d = 2;
  return ann;
}

ClientScript ClientScript::ins_then_del(Nat m, Nat start) {
  ClientScript s;
  s.start_size = start;
  for (Nat i = 0; i < m; ++i) s.ops.push_back(StoreOp::Ins);
  for (Nat i = 0; i < m; ++i) s.ops.push_back(StoreOp::Del);
  return s;
}

ClientScript ClientScript::alternating(Nat m, Nat start) {
  ClientScript s;
  s.start_size = start;
  for (Nat i = 0; i < m; ++i) {
    s.ops.push_back(StoreOp::Ins);
    s.ops.push_back(StoreOp::Del);
  }
  return s;
}

Nat client_potential(const StoreAnnotations& ann, const ClientScript& script) {
  Nat total = 0;
  Nat size = script.start_size;
  for (StoreOp op : script.ops) {
    if (op == StoreOp::Ins) {
      total += ann.ins(size) + ann.a;
      ++size;
    } else if (size > 0) {
      Nat step = ann.d;
      Nat back = ann.s + ann.t;
      total += step > back ? step - back : 0;
      --size;
    } else {
      Nat refund = ann.p + ann.e;
      total += ann.d > refund ? ann.d - refund : 0;
      break; // the store closed; remaining operations are ignored
    }
  }
  return total;
}

ClientComparison compare_clients(const StoreAnnotations& ann, const ClientScript& a,
                                 const ClientScript& b) {
  ClientComparison cmp;
  cmp.potential_a = client_potential(ann, a);
  cmp.potential_b = client_potential(ann, b);
  cmp.order = cmp.potential_a < cmp.potential_b   ? Ordering::Less
              : cmp.potential_a > cmp.potential_b ? Ordering::Greater
                                                  : Ordering::Equal;
  return cmp;
}

} // namespace rsill
