#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "rsill/parser.hpp"
#include "rsill/runtime.hpp"

using namespace rsill;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(RSILL_CORPUS_DIR) + "/" + name);
  REQUIRE_MESSAGE(in.good(), "cannot open corpus file ", name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Signature load(const std::string& name) { return parse_program(slurp(name)); }

const Metric kStd = Metric::standard();

Trace run_rr(const Signature& sig, const std::string& main, bool keep = false) {
  Trace tr = run(sig, main, SchedulerSpec::round_robin(), kStd, 100000, keep);
  REQUIRE(tr.status == RunStatus::Done);
  return tr;
}

struct CorpusMain {
  const char* file;
  const char* main;
  Nat work;
};

// Frozen internal-work totals, each hand-derived from the message cascades.
const CorpusMain kMains[] = {
    {"counter.rsill", "main_val5", 8},   // 3 bit labels + 3 val relays + dollar + end
    {"counter.rsill", "main_inc8", 17},  // 7 carries + the value-8 read of cost 10
    {"stack.rsill", "main_3i3d", 8},     // 3 dels at 2 each + disposal none/close
    {"queue.rsill", "main_l1", 14},      // ins 0+2+4, dels 6, disposal 2
    {"queue.rsill", "main_l2", 8},       // alternating: dels 6, disposal 2
    {"clients.rsill", "stack_l1", 8},
    {"clients.rsill", "stack_l2", 8},
    {"clients.rsill", "queue_l1", 14},
    {"clients.rsill", "queue_l2", 8},
    {"fqueue.rsill", "main_4i4d", 30},   // streams 4+8+2, reversal 10, dels 6
    {"list.rsill", "main_nil", 2},
    {"list.rsill", "main_append", 14},
    {"map.rsill", "main_map", 20},
    {"fold.rsill", "main_fold", 16},
};

} // namespace

TEST_CASE("init_config carries the declared potential and zero work") {
  Signature sig = load("counter.rsill");
  Config cfg = init_config(sig, "main_val5");
  REQUIRE(cfg.procs.size() == 1);
  CHECK(cfg.procs[0].work == 0);
  CHECK(cfg.procs[0].potential == 10);
  CHECK(cfg.procs[0].provides == cfg.root);
  Totals t = totals(cfg);
  CHECK(t.work == 0);
  CHECK(t.potential == 10);

  CHECK_THROWS_AS(init_config(sig, "nosuch"), RuntimeError);
  CHECK_THROWS_AS(init_config(sig, "b1"), RuntimeError);        // uses channels
  CHECK_THROWS_AS(init_config(sig, "drain_bits"), RuntimeError);
  CHECK_THROWS_AS(init_config(sig, "e"), RuntimeError);         // provides ctr, not 1
}

TEST_CASE("potential expressions in the main are evaluated at startup") {
  Signature sig = parse_program(
      "costfree proc main [] |clog(4)+1| () -> (d : 1^0) = close d");
  Config cfg = init_config(sig, "main");
  CHECK(cfg.procs[0].potential == 4); // clog(4) = 3
}

TEST_CASE("the initial configuration enables exactly the first spawn") {
  Signature sig = load("counter.rsill");
  Config cfg = init_config(sig, "main_val5");
  auto insts = enabled(cfg);
  REQUIRE(insts.size() == 1);
  CHECK(insts[0].rule == Rule::spawn_c);
}

TEST_CASE("a single close is one step of work") {
  Signature sig = parse_program("proc main [] |1| () -> (c : 1^0) = close c");
  Trace tr = run_rr(sig, "main");
  CHECK(tr.events.size() == 1);
  CHECK(tr.events[0].rule == "oneC_s");
  CHECK(totals(tr.final_config).work == 1);
}

TEST_CASE("corpus totals match the hand-derived message counts") {
  for (const auto& m : kMains) {
    CAPTURE(m.file);
    CAPTURE(m.main);
    Signature sig = load(m.file);
    Trace tr = run_rr(sig, m.main);
    CHECK(totals(tr.final_config).work == m.work);
    // A run that starts at work 0 accumulates exactly the per-event deltas.
    long long sum = 0;
    for (const auto& ev : tr.events) sum += ev.work_delta;
    CHECK(sum == static_cast<long long>(m.work));
  }
}

TEST_CASE("weight is conserved at every step except forward sends") {
  for (const auto& m : kMains) {
    CAPTURE(m.file);
    CAPTURE(m.main);
    Trace tr = run_rr(load(m.file), m.main);
    Nat prev = tr.initial_weight;
    for (const auto& ev : tr.events) {
      CAPTURE(ev.step);
      CAPTURE(ev.rule);
      if (ev.rule == "fwd_s")
        CHECK(ev.weight_after <= prev);
      else
        CHECK(ev.weight_after == prev);
      prev = ev.weight_after;
    }
  }
}

TEST_CASE("at most one message sits on any channel") {
  Signature sig = load("counter.rsill");
  Trace tr = run(sig, "main_inc8", SchedulerSpec::round_robin(), kStd, 100000, true);
  REQUIRE(tr.status == RunStatus::Done);
  for (const auto& cfg : tr.snapshots) {
    std::set<std::string> carriers;
    for (const auto& msg : cfg.msgs) CHECK(carriers.insert(msg.carrier).second);
  }
}

TEST_CASE("round-robin traces are reproducible") {
  Signature sig = load("fqueue.rsill");
  Trace a = run_rr(sig, "main_4i4d");
  Trace b = run_rr(sig, "main_4i4d");
  REQUIRE(a.events.size() == b.events.size());
  for (size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].rule == b.events[i].rule);
    CHECK(a.events[i].channels == b.events[i].channels);
    CHECK(a.events[i].weight_after == b.events[i].weight_after);
  }
}

TEST_CASE("seeded random schedules are reproducible") {
  Signature sig = load("stack.rsill");
  Trace a = run(sig, "main_3i3d", SchedulerSpec::random(7), kStd, 100000, false);
  Trace b = run(sig, "main_3i3d", SchedulerSpec::random(7), kStd, 100000, false);
  REQUIRE(a.status == RunStatus::Done);
  REQUIRE(a.events.size() == b.events.size());
  for (size_t i = 0; i < a.events.size(); ++i)
    CHECK(a.events[i].channels == b.events[i].channels);
}

TEST_CASE("total work agrees between round-robin and five random seeds") {
  for (const auto& m : kMains) {
    CAPTURE(m.file);
    CAPTURE(m.main);
    Signature sig = load(m.file);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Trace tr = run(sig, m.main, SchedulerSpec::random(seed), kStd, 100000, false);
      REQUIRE(tr.status == RunStatus::Done);
      CHECK(totals(tr.final_config).work == m.work);
    }
  }
}

TEST_CASE("ledger underflow on an ill-typed program raises NegativePotential") {
  Signature sig = parse_program("proc main [] |0| () -> (c : 1^0) = close c");
  try {
    run(sig, "main", SchedulerSpec::round_robin(), kStd, 10, false);
    FAIL("expected NegativePotential");
  } catch (const RuntimeError& e) {
    CHECK(e.kind == RuntimeError::Kind::NegativePotential);
  }
}

TEST_CASE("a starved run hits the step budget") {
  Signature sig = parse_program(
      "type t = &{ go^0 : 1^0 }\n"
      "proc srv [] |1| () -> (s : t) = case s { go => close s }\n"
      "proc main [] |3| () -> (c : 1^0) = x <- spawn srv(); x.go; wait x; close c");
  Trace tr = run(sig, "main", SchedulerSpec::round_robin(), kStd, 2, false);
  CHECK(tr.status == RunStatus::Budget);
  Trace full = run(sig, "main", SchedulerSpec::round_robin(), kStd, 100, false);
  CHECK(full.status == RunStatus::Done);
}

TEST_CASE("forward sends preserve work and drop residual potential") {
  // wrap forwards to a unit provider while holding 2 units of slack.
  Signature sig = parse_program(
      "proc unit [] |1| () -> (u : 1^0) = close u\n"
      "proc wrap [] |3| (x : 1^0) -> (y : 1^0) = fwd y x\n"
      "proc main [] |5| () -> (c : 1^0) = u <- spawn unit(); w <- spawn wrap(u); wait w; close c");
  Trace tr = run_rr(sig, "main");
  bool saw_fwd = false;
  Nat prev = tr.initial_weight;
  for (const auto& ev : tr.events) {
    if (ev.rule == "fwd_s") {
      saw_fwd = true;
      CHECK(prev - ev.weight_after == 3); // wrap's unused slack vanishes
    }
    prev = ev.weight_after;
  }
  CHECK(saw_fwd);
  CHECK(totals(tr.final_config).work == 2);
}

TEST_CASE("stores deliver elements in their characteristic order") {
  // Element channels keep their identity end to end, so the payload order of
  // the store's tensor sends against the client's lolli sends distinguishes
  // LIFO from FIFO behavior.
  auto delivery = [](const char* file, const char* main, std::vector<std::string>& sent,
                     std::vector<std::string>& got) {
    Signature sig = parse_program(slurp(file));
    Trace tr = run(sig, main, SchedulerSpec::round_robin(), Metric::standard(), 100000, false);
    REQUIRE(tr.status == RunStatus::Done);
    // An element can ride internal stream sends before it reaches the client
    // (the functional queue re-sends it per list hop); the hand-off to the
    // client is its last tensor send.
    std::map<std::string, size_t> last;
    for (const auto& ev : tr.events) {
      if (ev.rule == "lolliC_s" && ev.sender_cost_free) sent.push_back(ev.channels.at(2));
      if (ev.rule == "tensorC_s") last[ev.channels.at(2)] = ev.step;
    }
    std::vector<std::pair<size_t, std::string>> ordered;
    for (const auto& [chan, step] : last) ordered.emplace_back(step, chan);
    std::sort(ordered.begin(), ordered.end());
    for (const auto& [step, chan] : ordered) got.push_back(chan);
  };
  {
    std::vector<std::string> sent, got;
    delivery("stack.rsill", "main_3i3d", sent, got);
    REQUIRE(sent.size() == 3);
    REQUIRE(got.size() == 3);
    std::vector<std::string> reversed(sent.rbegin(), sent.rend());
    CHECK(got == reversed);
  }
  {
    std::vector<std::string> sent, got;
    delivery("queue.rsill", "main_l1", sent, got);
    REQUIRE(sent.size() == 3);
    CHECK(got == sent);
  }
  {
    std::vector<std::string> sent, got;
    delivery("fqueue.rsill", "main_4i4d", sent, got);
    REQUIRE(sent.size() == 4);
    CHECK(got == sent);
  }
}

TEST_CASE("a blocked case head enables nothing") {
  Config cfg;
  cfg.root = cfg.fresh_chan();
  Signature sig = parse_program("type t = &{ go^0 : 1^0 }");
  cfg.channels[cfg.root] = ty::tvar("t");
  ProcPred p;
  p.id = cfg.next_pred_id++;
  p.provides = cfg.root;
  p.expr = pe::case_recv(cfg.root, {{"go", pe::close(cfg.root)}});
  cfg.procs.push_back(p);
  CHECK(enabled(cfg).empty());
}

TEST_CASE("a mutual wait is reported as stuck") {
  // Ill-typed on purpose: main waits for a close that srv never sends.
  Signature sig = parse_program(
      "type t = &{ go^0 : 1^0 }\n"
      "proc srv [] |1| () -> (s : t) = case s { go => close s }\n"
      "proc main [] |1| () -> (c : 1^0) = x <- spawn srv(); wait x; close c");
  Trace tr = run(sig, "main", SchedulerSpec::round_robin(), Metric::standard(), 100, false);
  CHECK(tr.status == RunStatus::Stuck);
  CHECK(tr.final_config.procs.size() == 2);
}

TEST_CASE("cost-free senders transfer annotations without work") {
  Signature sig = load("stack.rsill");
  Trace tr = run_rr(sig, "main_3i3d");
  for (const auto& ev : tr.events) {
    if (ev.sender_cost_free) CHECK(ev.work_delta == 0);
  }
}
