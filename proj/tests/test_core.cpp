#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rsill/pot.hpp"
#include "rsill/types.hpp"

using namespace rsill;

namespace {

// Independent oracle: smallest k with 2^k >= n + 1.
Nat clog_oracle(Nat n) {
  Nat k = 0;
  Nat pow = 1;
  while (pow < n + 1) {
    ++k;
    pow *= 2;
  }
  return k;
}

// Counter signature built by hand:
//   bits   = +{ zero^0 : bits, one^0 : bits, dollar^0 : 1^0 }
//   ctr[n] = &{ inc^1 : ctr[n+1], val^{2*clog(n)+2} : bits }
Signature counter_sig() {
  Signature sig;
  TypeDef bits;
  bits.name = "bits";
  bits.body = ty::ichoice({{"zero", pot::constant(0), ty::tvar("bits")},
                           {"one", pot::constant(0), ty::tvar("bits")},
                           {"dollar", pot::constant(0), ty::one(pot::constant(0))}});
  sig.type_defs.push_back(bits);

  TypeDef ctr;
  ctr.name = "ctr";
  ctr.index_params = {"n"};
  PotPtr n = pot::ivar("n");
  ctr.body = ty::echoice(
      {{"inc", pot::constant(1), ty::tvar("ctr", {pot::add(n, pot::constant(1))})},
       {"val", pot::add(pot::mul(pot::constant(2), pot::clog(n)), pot::constant(2)),
        ty::tvar("bits")}});
  sig.type_defs.push_back(ctr);
  return sig;
}

// Stack and queue interface types from the store case study.
Signature store_sig() {
  Signature sig;
  TypePtr unitT = ty::one(pot::constant(0));
  PotPtr zero = pot::constant(0);
  PotPtr n = pot::ivar("n");

  TypeDef stack;
  stack.name = "stack";
  stack.body = ty::echoice(
      {{"ins", zero, ty::lolli(zero, unitT, ty::tvar("stack"))},
       {"del", pot::constant(2),
        ty::ichoice({{"none", zero, ty::one(zero)},
                     {"some", zero, ty::tensor(zero, unitT, ty::tvar("stack"))}})}});
  sig.type_defs.push_back(stack);

  TypeDef queue;
  queue.name = "queue";
  queue.index_params = {"n"};
  queue.body = ty::echoice(
      {{"ins", pot::mul(pot::constant(2), n),
        ty::lolli(zero, unitT, ty::tvar("queue", {pot::add(n, pot::constant(1))}))},
       {"del", pot::constant(2),
        ty::ichoice(
            {{"none", zero, ty::one(zero)},
             {"some", zero,
              ty::tensor(zero, unitT,
                         ty::tvar("queue", {pot::monus(n, pot::constant(1))}))}})}});
  sig.type_defs.push_back(queue);
  return sig;
}

} // namespace

TEST_CASE("clog agrees with the brute-force oracle on 0..10^6") {
  size_t mismatches = 0;
  for (Nat v = 0; v <= 1000000; ++v)
    if (clog_nat(v) != clog_oracle(v)) ++mismatches;
  CHECK(mismatches == 0);
}

TEST_CASE("eval_pot on the counter annotations") {
  CHECK(eval_pot(pot::clog(pot::constant(0)), {}) == 0);
  // 2*clog(n) + 2 at n = 5 is 8 since clog(5) = ceil(log2 6) = 3.
  PotPtr ann = pot::add(pot::mul(pot::constant(2), pot::clog(pot::ivar("n"))), pot::constant(2));
  CHECK(eval_pot(ann, {{"n", 5}}) == 8);
  CHECK(eval_pot(pot::clog(pot::constant(8)), {}) == 4);
}

TEST_CASE("eval_pot rejects unbound index variables") {
  CHECK_THROWS_AS(eval_pot(pot::ivar("k"), {}), EvalError);
  CHECK_THROWS_AS(eval_pot(pot::add(pot::constant(1), pot::ivar("k")), {{"n", 3}}), EvalError);
}

TEST_CASE("clog identities behind the counter derivation") {
  for (Nat n = 1; n <= 4096; ++n) CHECK(clog_nat(2 * n) == clog_nat(n) + 1);
  for (Nat n = 0; n <= 4096; ++n) CHECK(clog_nat(2 * n + 1) == clog_nat(n) + 1);
}

TEST_CASE("clog is monotone") {
  for (Nat n = 0; n < 2048; ++n) CHECK(clog_nat(n) <= clog_nat(n + 1));
}

TEST_CASE("monus truncates at zero") {
  CHECK(eval_pot(pot::monus(pot::constant(3), pot::constant(5)), {}) == 0);
  CHECK(eval_pot(pot::monus(pot::constant(5), pot::constant(3)), {}) == 2);
  CHECK(eval_pot(pot::monus(pot::ivar("n"), pot::constant(1)), {{"n", 0}}) == 0);
}

TEST_CASE("subst_pot reduces closed subexpressions") {
  PotPtr e = pot::add(pot::mul(pot::constant(2), pot::clog(pot::ivar("n"))), pot::constant(2));
  PotPtr r = subst_pot(e, {{"n", 5}});
  REQUIRE(r->kind == PotExpr::Kind::Const);
  CHECK(r->value == 8);
  PotPtr open = subst_pot(e, {});
  CHECK(open->kind != PotExpr::Kind::Const);
  CHECK(pot_equal(open, e));
}

TEST_CASE("unfold instantiates a type family member") {
  Signature sig = counter_sig();
  TypePtr ctr0 = ty::tvar("ctr", {pot::constant(0)});
  TypePtr u = unfold(ctr0, sig);
  REQUIRE(u->kind == SType::Kind::EChoice);
  REQUIRE(u->branches.size() == 2);
  const Branch* inc = u->find_branch("inc");
  REQUIRE(inc != nullptr);
  CHECK(eval_pot(inc->pot, {}) == 1);
  REQUIRE(inc->cont->kind == SType::Kind::TVar);
  CHECK(eval_pot(inc->cont->args.at(0), {}) == 1);
  const Branch* val = u->find_branch("val");
  REQUIRE(val != nullptr);
  CHECK(eval_pot(val->pot, {}) == 2); // 2*clog(0) + 2

  TypePtr bits = unfold(ty::tvar("bits"), sig);
  REQUIRE(bits->kind == SType::Kind::IChoice);
  CHECK(bits->branches.size() == 3);
  for (const auto& b : bits->branches) CHECK(eval_pot(b.pot, {}) == 0);

  TypePtr one = ty::one(pot::constant(0));
  CHECK(unfold(one, sig).get() == one.get());
}

TEST_CASE("unfold reports unknown types and domain violations") {
  Signature sig = counter_sig();
  CHECK_THROWS_AS(unfold(ty::tvar("nosuch"), sig), TypeOpError);
  CHECK_THROWS_AS(unfold(ty::tvar("ctr"), sig), TypeOpError); // missing index argument
  sig.type_defs[1].domain.push_back({"n", 1});
  CHECK_THROWS_AS(unfold(ty::tvar("ctr", {pot::constant(0)}), sig), TypeOpError);
  CHECK_NOTHROW(unfold(ty::tvar("ctr", {pot::constant(1)}), sig));
}

TEST_CASE("type_equal is equirecursive") {
  Signature sig = counter_sig();
  TypePtr ctr1 = ty::tvar("ctr", {pot::constant(1)});
  CHECK(type_equal(ctr1, unfold(ctr1, sig), sig));
  CHECK(type_equal(ty::tvar("bits"), unfold(ty::tvar("bits"), sig), sig));
  CHECK_FALSE(type_equal(ty::tvar("bits"), ty::tvar("ctr", {pot::constant(0)}), sig));
  CHECK_FALSE(type_equal(ctr1, ty::tvar("ctr", {pot::constant(2)}), sig));
}

TEST_CASE("stack and queue[0] share a skeleton but differ after one unfolding") {
  Signature sig = store_sig();
  TypePtr stack = ty::tvar("stack");
  TypePtr queue0 = ty::tvar("queue", {pot::constant(0)});
  // The ins annotations agree at the head (0 and 2*0); the continuation index
  // does not: queue[1] asks 2 for the next ins while stack stays at 0.
  CHECK_FALSE(type_equal(stack, queue0, sig));
  CHECK(type_equal(queue0, queue0, sig));
}

TEST_CASE("unfold terminates and stays equal across family instances") {
  Signature sig = store_sig();
  for (Nat v = 0; v <= 64; ++v) {
    TypePtr t = ty::tvar("queue", {pot::constant(v)});
    TypePtr u = unfold(t, sig);
    CHECK(type_equal(t, u, sig));
    CHECK(type_equal(u, unfold(u, sig), sig)); // non-variable fixed point
  }
}
