#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rsill/analysis.hpp"
#include "rsill/json_io.hpp"
#include "rsill/parser.hpp"
#include "rsill/printer.hpp"

namespace {

using namespace rsill;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("file", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Metric parse_metric(const std::string& spec) {
  Metric m;
  if (spec.empty()) return m;
  unsigned long long l, c, e;
  char comma1, comma2;
  std::istringstream in(spec);
  if (!(in >> l >> comma1 >> c >> comma2 >> e) || comma1 != ',' || comma2 != ',')
    throw CLI::ValidationError("--metric", "expected L,C,E naturals");
  m.label_cost = l;
  m.channel_cost = c;
  m.close_cost = e;
  return m;
}

SchedulerSpec parse_scheduler(const std::string& name, std::uint64_t seed) {
  if (name == "rr") return SchedulerSpec::round_robin();
  if (name == "rand") return SchedulerSpec::random(seed);
  throw CLI::ValidationError("--scheduler", "expected 'rr' or 'rand'");
}

int cmd_check(const std::string& path, Nat indices, const Metric& metric, bool json) {
  Signature sig;
  try {
    sig = parse_program(read_file(path));
  } catch (const CLI::Error&) {
    throw;
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 1;
  }
  Report report = check_signature(sig, metric, indices);
  if (json) {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    for (const auto& e : report.entries) {
      if (e.ok) continue;
      std::string idx;
      for (const auto& [k, v] : e.indices) idx += (idx.empty() ? "" : ", ") + k + "=" + std::to_string(v);
      std::cout << "FAIL " << e.def << (idx.empty() ? "" : "[" + idx + "]") << " [" << e.error_kind
                << "] " << e.error;
      if (e.lhs != 0 || e.rhs != 0)
        std::cout << " -- failed inequality: " << e.lhs << " >= " << e.rhs;
      std::cout << "\n";
    }
    std::cout << report.entries.size() - report.failures << "/" << report.entries.size()
              << " instances ok";
    if (report.failures) std::cout << ", " << report.failures << " failed";
    std::cout << "\n";
  }
  return report.all_ok() ? 0 : 1;
}

struct RunOptions {
  std::string main_name = "main";
  std::string scheduler = "rr";
  std::uint64_t seed = 0;
  std::string metric_spec = "1,1,1";
  Nat max_steps = 100000;
  std::string trace_out;
  bool monitor = false;
  bool deep = false;
  bool json = false;
};

int cmd_run(const std::string& path, const RunOptions& opt) {
  Signature sig;
  Trace tr;
  Metric metric = parse_metric(opt.metric_spec);
  try {
    sig = parse_program(read_file(path));
    tr = run(sig, opt.main_name, parse_scheduler(opt.scheduler, opt.seed), metric, opt.max_steps,
             opt.deep);
  } catch (const CLI::Error&) {
    throw;
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 1;
  }

  if (!opt.trace_out.empty()) {
    std::ofstream out(opt.trace_out);
    for (const auto& ev : tr.events) out << to_json(ev).dump() << "\n";
    out << trace_summary(tr).dump() << "\n";
  }

  int rc = 0;
  nlohmann::json summary = trace_summary(tr);
  if (opt.json)
    std::cout << summary.dump(2) << "\n";
  else
    std::cout << "status=" << summary["status"].get<std::string>()
              << " totalWork=" << summary["totalWork"] << " steps=" << summary["steps"] << "\n";

  if (opt.monitor) {
    MonotoneResult mono = check_monotone(tr);
    BoundReport bound = bound_report(tr);
    if (opt.json)
      std::cout << to_json(bound).dump(2) << "\n";
    else
      std::cout << "bound: initialPotential=" << bound.initial_potential
                << " finalWork=" << bound.final_work << " slack=" << bound.slack
                << " status=" << (bound.bound_holds ? "ok" : "violation") << "\n";
    if (!mono.ok) {
      std::cout << "monotonicity violation at step " << mono.step << ": " << mono.before << " -> "
                << mono.after << "\n";
      rc = 1;
    }
    if (!bound.bound_holds) rc = 1;
  }
  if (opt.deep) {
    DeepCheckResult res = deep_check(sig, tr, metric);
    if (res.ok) {
      std::cout << "deep-check: ok (" << tr.snapshots.size() << " configurations)\n";
    } else {
      std::cout << "deep-check: violation at step " << res.step << ": " << res.message << "\n";
      rc = 1;
    }
  }
  return rc;
}

ClientScript parse_script(const std::string& spec, Nat start) {
  ClientScript s;
  s.start_size = start;
  for (char c : spec) {
    if (c == 'i')
      s.ops.push_back(StoreOp::Ins);
    else if (c == 'd')
      s.ops.push_back(StoreOp::Del);
    else
      throw CLI::ValidationError("--script", "script must be a string of 'i' and 'd'");
  }
  return s;
}

int cmd_analyze(const std::string& preset, const std::string& script_a,
                const std::string& script_b, Nat start, bool json) {
  StoreAnnotations ann;
  if (preset == "stack")
    ann = StoreAnnotations::stack_preset();
  else if (preset == "queue")
    ann = StoreAnnotations::queue_preset();
  else if (preset == "fqueue")
    ann = StoreAnnotations::fqueue_preset();
  else
    throw CLI::ValidationError("--preset", "expected stack, queue or fqueue");

  ClientScript a = parse_script(script_a, start);
  if (script_b.empty()) {
    Nat phi = client_potential(ann, a);
    if (json)
      std::cout << nlohmann::json{{"preset", preset}, {"script", script_a}, {"potential", phi}}
                       .dump(2)
                << "\n";
    else
      std::cout << "preset\tscript\tpotential\n" << preset << "\t" << script_a << "\t" << phi << "\n";
    return 0;
  }
  ClientScript b = parse_script(script_b, start);
  ClientComparison cmp = compare_clients(ann, a, b);
  const char* ord = cmp.order == Ordering::Less      ? "first-cheaper"
                    : cmp.order == Ordering::Greater ? "second-cheaper"
                                                     : "equal";
  if (json)
    std::cout << nlohmann::json{{"preset", preset},
                                {"scriptA", script_a},
                                {"potentialA", cmp.potential_a},
                                {"scriptB", script_b},
                                {"potentialB", cmp.potential_b},
                                {"order", ord}}
                     .dump(2)
              << "\n";
  else
    std::cout << "preset\tscript\tpotential\n"
              << preset << "\t" << script_a << "\t" << cmp.potential_a << "\n"
              << preset << "\t" << script_b << "\t" << cmp.potential_b << "\t(" << ord << ")\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource-aware session type toolkit"};
  app.require_subcommand(1);

  std::string file, metric_spec = "1,1,1";
  unsigned long long indices = 64;
  bool json = false;

  CLI::App* check = app.add_subcommand("check", "typecheck a program over sampled index domains");
  check->add_option("file", file)->required();
  check->add_option("--indices", indices, "largest index value sampled per parameter");
  check->add_option("--metric", metric_spec, "label,channel,close costs");
  check->add_flag("--json", json);

  RunOptions ropt;
  CLI::App* runc = app.add_subcommand("run", "execute a closed process under the cost semantics");
  runc->add_option("file", file)->required();
  runc->add_option("--main", ropt.main_name);
  runc->add_option("--scheduler", ropt.scheduler, "rr | rand");
  runc->add_option("--seed", ropt.seed);
  runc->add_option("--metric", ropt.metric_spec);
  runc->add_option("--max-steps", ropt.max_steps);
  runc->add_option("--trace", ropt.trace_out, "write a JSON-lines trace");
  runc->add_flag("--monitor", ropt.monitor, "check weight monotonicity and the work bound");
  runc->add_flag("--deep-check", ropt.deep, "re-type the configuration after every step");
  runc->add_flag("--json", ropt.json);

  RunOptions bopt;
  CLI::App* boundc = app.add_subcommand("bound", "run with monitoring forced on");
  boundc->add_option("file", file)->required();
  boundc->add_option("--main", bopt.main_name);
  boundc->add_option("--scheduler", bopt.scheduler);
  boundc->add_option("--seed", bopt.seed);
  boundc->add_option("--metric", bopt.metric_spec);
  boundc->add_option("--max-steps", bopt.max_steps);
  boundc->add_option("--trace", bopt.trace_out);
  boundc->add_flag("--deep-check", bopt.deep);
  boundc->add_flag("--json", bopt.json);

  std::string preset = "stack", script_a, script_b;
  unsigned long long start = 0;
  CLI::App* analyze = app.add_subcommand("analyze", "evaluate client potential recurrences");
  analyze->add_option("--preset", preset, "stack | queue | fqueue");
  analyze->add_option("--script", script_a, "client script, e.g. iiiddd")->required();
  analyze->add_option("--script-b", script_b, "second script to compare against");
  analyze->add_option("--start", start, "initial store size n0");
  analyze->add_flag("--json", json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(file, indices, parse_metric(metric_spec), json);
    if (runc->parsed()) return cmd_run(file, ropt);
    if (boundc->parsed()) {
      bopt.monitor = true;
      return cmd_run(file, bopt);
    }
    if (analyze->parsed()) return cmd_analyze(preset, script_a, script_b, start, json);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
