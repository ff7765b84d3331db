#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "rsill/monitor.hpp"
#include "rsill/parser.hpp"

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

const std::pair<const char*, const char*> kMains[] = {
    {"counter.rsill", "main_val5"}, {"counter.rsill", "main_inc8"},
    {"stack.rsill", "main_3i3d"},   {"queue.rsill", "main_l1"},
    {"queue.rsill", "main_l2"},     {"fqueue.rsill", "main_4i4d"},
    {"list.rsill", "main_nil"},     {"list.rsill", "main_append"},
    {"map.rsill", "main_map"},      {"fold.rsill", "main_fold"},
};

} // namespace

TEST_CASE("weight of the initial configuration is the declared potential") {
  Signature sig = load("counter.rsill");
  Config cfg = init_config(sig, "main_val5");
  CHECK(weight(cfg) == 10);
  Config empty;
  CHECK(weight(empty) == 0);
}

TEST_CASE("weight agrees with configuration typing on every snapshot") {
  Signature sig = load("stack.rsill");
  Trace tr = run(sig, "main_3i3d", SchedulerSpec::round_robin(), kStd, 100000, true);
  REQUIRE(tr.status == RunStatus::Done);
  for (const auto& cfg : tr.snapshots) CHECK(typecheck_config(sig, cfg, kStd) == weight(cfg));
}

TEST_CASE("corpus traces are monotone under round-robin and five seeds") {
  for (const auto& [file, main] : kMains) {
    CAPTURE(file);
    CAPTURE(main);
    Signature sig = load(file);
    Trace rr = run(sig, main, SchedulerSpec::round_robin(), kStd, 100000, false);
    REQUIRE(rr.status == RunStatus::Done);
    CHECK(check_monotone(rr).ok);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Trace tr = run(sig, main, SchedulerSpec::random(seed), kStd, 100000, false);
      REQUIRE(tr.status == RunStatus::Done);
      CHECK(check_monotone(tr).ok);
      CHECK(bound_report(tr).bound_holds);
    }
  }
}

TEST_CASE("an injected potential bump is flagged at its step") {
  Signature sig = load("queue.rsill");
  Trace tr = run(sig, "main_l2", SchedulerSpec::round_robin(), kStd, 100000, false);
  REQUIRE(tr.status == RunStatus::Done);
  REQUIRE(tr.events.size() > 4);
  Trace faulty = tr;
  faulty.events[3].weight_after += 1; // potential conjured from nowhere
  MonotoneResult r = check_monotone(faulty);
  if (r.ok) {
    // The bump may still be below the previous weight; force a real rise.
    faulty.events[3].weight_after = faulty.events[2].weight_after + 1;
    r = check_monotone(faulty);
  }
  CHECK_FALSE(r.ok);
  CHECK(r.step == 4); // series index: initial weight is index 0
  CHECK(r.after > r.before);

  MonotoneResult s = check_monotone(std::vector<Nat>{5, 5, 4, 6});
  CHECK_FALSE(s.ok);
  CHECK(s.step == 3);
  CHECK(s.before == 4);
  CHECK(s.after == 6);
}

TEST_CASE("an empty trace is monotone") {
  Trace tr;
  tr.initial_weight = 3;
  CHECK(check_monotone(tr).ok);
  CHECK(check_monotone(std::vector<Nat>{}).ok);
}

TEST_CASE("bound reports for the counter demos") {
  Signature sig = load("counter.rsill");
  Trace val5 = run(sig, "main_val5", SchedulerSpec::round_robin(), kStd, 100000, false);
  BoundReport r = bound_report(val5);
  CHECK(r.initial_potential == 10);
  CHECK(r.final_work == 8);
  CHECK(r.slack == 2); // the two stored bits of 101 are dropped at forwards
  CHECK(r.bound_holds);

  Trace inc8 = run(sig, "main_inc8", SchedulerSpec::round_robin(), kStd, 100000, false);
  BoundReport r8 = bound_report(inc8);
  CHECK(r8.initial_potential == 18);
  CHECK(r8.final_work == 17);
  CHECK(r8.slack == 1); // value 8 stores one unit in its single b1
}

TEST_CASE("bound report for the list demo is tight") {
  Signature sig = load("list.rsill");
  Trace tr = run(sig, "main_nil", SchedulerSpec::round_robin(), kStd, 100000, false);
  BoundReport r = bound_report(tr);
  CHECK(r.initial_potential == 2);
  CHECK(r.final_work == 2);
  CHECK(r.slack == 0);
}

TEST_CASE("deep check passes on every corpus run") {
  for (const auto& [file, main] : kMains) {
    CAPTURE(file);
    CAPTURE(main);
    Signature sig = load(file);
    Trace tr = run(sig, main, SchedulerSpec::round_robin(), kStd, 100000, true);
    REQUIRE(tr.status == RunStatus::Done);
    DeepCheckResult res = deep_check(sig, tr, kStd);
    CAPTURE(res.step);
    CAPTURE(res.message);
    CHECK(res.ok);
  }
}

TEST_CASE("deep check needs snapshots") {
  Signature sig = load("list.rsill");
  Trace tr = run(sig, "main_nil", SchedulerSpec::round_robin(), kStd, 100000, false);
  CHECK_FALSE(deep_check(sig, tr, kStd).ok);
}

TEST_CASE("a zero-step trace deep-checks against its initial snapshot") {
  Signature sig = load("list.rsill");
  Trace tr;
  tr.snapshots.push_back(init_config(sig, "main_nil"));
  tr.initial_weight = weight(tr.snapshots[0]);
  tr.final_config = tr.snapshots[0];
  CHECK(deep_check(sig, tr, kStd).ok);
}

TEST_CASE("a corrupted message payload is a preservation violation") {
  Signature sig = load("counter.rsill");
  Trace tr = run(sig, "main_inc8", SchedulerSpec::round_robin(), kStd, 100000, true);
  REQUIRE(tr.status == RunStatus::Done);
  // Find a snapshot with a label message in flight and corrupt its label.
  bool corrupted = false;
  for (auto cfg : tr.snapshots) {
    for (auto& msg : cfg.msgs) {
      if (msg.kind == MsgPred::Kind::Label) {
        msg.label = "bogus";
        corrupted = true;
        break;
      }
    }
    if (corrupted) {
      CHECK_THROWS_AS(typecheck_config(sig, cfg, kStd), PreservationError);
      break;
    }
  }
  CHECK(corrupted);
}

TEST_CASE("a conjured mid-run potential fails deep checking") {
  Signature sig = load("stack.rsill");
  Trace tr = run(sig, "main_3i3d", SchedulerSpec::round_robin(), kStd, 100000, true);
  REQUIRE(tr.status == RunStatus::Done);
  REQUIRE(tr.snapshots.size() > 3);
  Trace faulty = tr;
  // weight() sees the bump, so the typed weight disagrees.
  Config& cfg = faulty.snapshots[3];
  REQUIRE(!cfg.procs.empty());
  cfg.procs[0].potential += 5;
  DeepCheckResult res = deep_check(sig, faulty, kStd);
  CHECK_FALSE(res.ok);
  CHECK(res.step == 3);
}
