#pragma once

#include <functional>

#include "rsill/pot.hpp"

namespace rsill {

/// Annotations of the generic store type
///   store[n] = &{ ins^i : A -o^a store[n+1],
///                 del^d : +{ none^p : 1^e, some^s : A *^t store[n-1] } }
/// where i may depend on the size index n.
struct StoreAnnotations {
  std::function<Nat(Nat)> ins; // i(n)
  Nat a = 0, d = 0, p = 0, e = 0, s = 0, t = 0;

  static StoreAnnotations stack_preset();
  static StoreAnnotations queue_preset();
  static StoreAnnotations fqueue_preset();
};

enum class StoreOp { Ins, Del };

struct ClientScript {
  std::vector<StoreOp> ops;
  Nat start_size = 0;

  static ClientScript ins_then_del(Nat m, Nat start = 0);  // m ins followed by m del
  static ClientScript alternating(Nat m, Nat start = 0);   // m rounds of ins, del
};

/// Potential recurrence for a generic client, evaluated left to right:
///   Phi([], n)      = 0
///   Phi(ins::l, n)  = Phi(l, n+1) + i(n) + a
///   Phi(del::l, n)  = Phi(l, n-1) + d - s - t       if n > 0
///                   = max(0, d - p - e)             otherwise (run ends)
Nat client_potential(const StoreAnnotations& ann, const ClientScript& script);

enum class Ordering { Less, Equal, Greater };

struct ClientComparison {
  Nat potential_a = 0;
  Nat potential_b = 0;
  Ordering order = Ordering::Equal;
};

ClientComparison compare_clients(const StoreAnnotations& ann, const ClientScript& a,
                                 const ClientScript& b);

} // namespace rsill
