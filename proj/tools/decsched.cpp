// decsched: plan, verify and sweep delay-minimizing schedules for a workload
// split across nodes that share one wireless channel.
//
// Usage:
//   decsched gen --n 5 --seed 7 --profile DMDC --out inst.json
//   decsched solve --instance inst.json --select greedy --order greedy:2
//   decsched oracle --instance inst.json
//   decsched experiment --kind ALLOC_VS_W --profile DMDC --sweep 0:20:1 --out alloc.csv
//
// Exit codes: 0 ok, 1 input error, 2 enumeration guard, 3 internal invariant failure.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "decsched/allocation.hpp"
#include "decsched/error.hpp"
#include "decsched/experiment.hpp"
#include "decsched/guard.hpp"
#include "decsched/json_io.hpp"
#include "decsched/model.hpp"
#include "decsched/oracle.hpp"
#include "decsched/ordering.hpp"
#include "decsched/selection.hpp"
#include "decsched/timeline.hpp"

namespace {

using namespace decsched;

struct Globals {
  std::string instance_path;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string order;  // empty: exhaustive, or "auto" for experiments
  std::string select = "all";
  std::string suffix = "ascending";
  bool guard_override = false;
};

Guard make_guard(const Globals& g) {
  Guard guard = Guard::from_env();
  if (g.guard_override) guard.disabled = true;
  return guard;
}

OrderPolicy make_policy(const Globals& g) {
  OrderPolicy p = OrderPolicy::parse(g.order.empty() ? "exhaustive" : g.order);
  if (g.suffix == "heuristic") p.fill = SuffixFill::kDescendingDelay;
  else if (g.suffix != "ascending") throw InputError("--suffix must be 'ascending' or 'heuristic'");
  return p;
}

Instance load_instance(const Globals& g) {
  if (g.instance_path.empty()) throw InputError("--instance PATH is required");
  std::ifstream in(g.instance_path);
  if (!in) throw InputError("cannot open instance file '" + g.instance_path + "'");
  return parse_instance(in);
}

void emit(const Globals& g, const std::string& text) {
  if (g.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out_path);
  if (!out) throw InputError("cannot write '" + g.out_path + "'");
  out << text;
}

std::vector<double> parse_sweep(const std::string& s) {
  std::vector<double> values;
  auto num = [&](const std::string& x) {
    try {
      std::size_t used = 0;
      const double v = std::stod(x, &used);
      if (used != x.size()) throw std::invalid_argument(x);
      return v;
    } catch (const std::exception&) {
      throw InputError("bad number '" + x + "' in sweep '" + s + "'");
    }
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 3) throw InputError("sweep range must be FROM:TO[:STEP]");
    const double from = num(parts[0]), to = num(parts[1]), step = parts.size() == 3 ? num(parts[2]) : 1.0;
    if (!(step > 0.0)) throw InputError("sweep step must be > 0");
    for (std::size_t i = 0;; ++i) {
      const double v = from + static_cast<double>(i) * step;
      if (v > to + 1e-9 * std::max(1.0, std::abs(to))) break;
      values.push_back(v);
    }
    return values;
  }
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) values.push_back(num(p));
  return values;
}

std::vector<NodeId> run_selection(const Instance& inst, const Globals& g, std::optional<SelectionResult>& result) {
  const Guard guard = make_guard(g);
  const OrderPolicy policy = make_policy(g);
  if (g.select == "all") return inst.all_ids();
  if (g.select == "linear:comm") result = select_linear(inst, RankBy::kCommDelay);
  else if (g.select == "linear:rate") result = select_linear(inst, RankBy::kRate);
  else if (g.select == "greedy") result = select_greedy(inst, policy, guard);
  else if (g.select == "exhaustive") result = select_exhaustive(inst, policy, guard);
  else throw InputError("unknown --select '" + g.select + "'");
  return result->selected;
}

int cmd_solve(const Globals& g, std::optional<double> workload, bool gantt) {
  Instance inst = load_instance(g);
  if (workload) inst = inst.with_workload(*workload);
  std::optional<SelectionResult> sel;
  const std::vector<NodeId> selected = run_selection(inst, g, sel);
  const CommPlan plan = plan_with_policy(inst, selected, make_policy(g), make_guard(g));
  const Allocation alloc = allocate(inst, plan);
  const double delay = min_delay(inst, plan);
  const Timeline t = build_canonical(inst, plan, alloc);
  const auto violations = validate(t, inst, plan, alloc);
  if (!violations.empty()) throw InvariantError("canonical timeline failed validation: " + violations.front().message);
  if (!approx_eq(t.horizon, delay)) throw InvariantError("timeline horizon differs from closed-form delay");

  if (gantt) {
    emit(g, render_gantt(t));
    return 0;
  }
  nlohmann::json out{{"selected", ids_json(selected)},
                     {"plan", plan_json(plan)},
                     {"allocation", to_json(alloc, delay)},
                     {"delay", delay},
                     {"timeline", to_json(t)}};
  if (sel) out["selection"] = to_json(*sel);
  emit(g, out.dump(2) + "\n");
  return 0;
}

int cmd_allocate(const Globals& g, std::optional<double> workload) {
  Instance inst = load_instance(g);
  if (workload) inst = inst.with_workload(*workload);
  const CommPlan plan = plan_with_policy(inst, inst.all_ids(), make_policy(g), make_guard(g));
  nlohmann::json out = to_json(allocate(inst, plan), min_delay(inst, plan));
  out["plan"] = plan_json(plan);
  emit(g, out.dump(2) + "\n");
  return 0;
}

int cmd_order(const Globals& g, const std::string& direction) {
  const Instance inst = load_instance(g);
  const Guard guard = make_guard(g);
  const OrderPolicy policy = make_policy(g);
  const std::vector<NodeId> all = inst.all_ids();
  std::vector<Direction> dirs;
  if (direction == "forward" || direction == "both") dirs.push_back(Direction::kForward);
  if (direction == "backward" || direction == "both") dirs.push_back(Direction::kBackward);
  if (dirs.empty()) throw InputError("--direction must be forward, backward or both");

  nlohmann::json out = nlohmann::json::array();
  for (Direction dir : dirs) {
    const std::vector<NodeId> order = order_with_policy(inst, all, dir, policy, guard);
    const double v = objective_v(inst, all, order, dir).v;
    std::optional<double> v_star;
    if (guard.disabled || all.size() <= guard.order_limit) v_star = order_exhaustive(inst, all, dir, guard).v_star;
    out.push_back(order_json(dir, order, v, v_star));
  }
  emit(g, (dirs.size() == 1 ? out[0] : out).dump(2) + "\n");
  return 0;
}

int cmd_select(const Globals& g) {
  const Instance inst = load_instance(g);
  std::optional<SelectionResult> sel;
  if (g.select == "all") {
    const CommPlan plan = plan_with_policy(inst, inst.all_ids(), make_policy(g), make_guard(g));
    emit(g, nlohmann::json{{"selected", ids_json(plan.selected())}, {"plan", plan_json(plan)},
                           {"delay", min_delay(inst, plan)}}
                    .dump(2) +
                "\n");
    return 0;
  }
  run_selection(inst, g, sel);
  emit(g, to_json(*sel).dump(2) + "\n");
  return 0;
}

int cmd_oracle(const Globals& g, std::size_t alloc_samples, std::size_t timeline_samples) {
  const Instance inst = load_instance(g);
  OracleOptions opt;
  opt.seed = g.seed;
  opt.allocation_samples = alloc_samples;
  opt.timeline_samples = timeline_samples;
  opt.guard = make_guard(g);
  const OracleReport rep = run_oracle(inst, opt);
  std::ostringstream os;
  for (const OracleCheck& c : rep.checks) {
    os << (c.info ? "INFO" : c.pass ? "PASS" : "FAIL") << "  " << c.name << "  margin=" << format_double(c.margin);
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  os << (rep.all_pass() ? "ALL PASS" : "FAILURES") << "\n";
  emit(g, os.str());
  return rep.all_pass() ? 0 : 3;
}

struct ExperimentFlags {
  std::string spec_path;
  std::string kind = "ALLOC_VS_W";
  std::string profile = "UMUC";
  std::string sweep;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> policies;
  std::size_t n = 3;
  double workload = kDefaultWorkload;
  unsigned threads = 0;
  bool no_check = false;
};

int cmd_experiment(const Globals& g, const ExperimentFlags& f) {
  ExperimentSpec spec;
  if (!f.spec_path.empty()) {
    std::ifstream in(f.spec_path);
    if (!in) throw InputError("cannot open experiment spec '" + f.spec_path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("syntax error: ") + e.what());
    }
    spec = experiment_from_json(j);
  } else {
    spec.kind = parse_experiment_kind(f.kind);
    spec.profile = parse_profile(f.profile);
    if (f.sweep.empty()) throw InputError("--sweep is required without --spec");
    spec.sweep = parse_sweep(f.sweep);
    spec.seeds = f.seeds.empty() ? ExperimentSpec::default_seeds() : f.seeds;
    spec.policies = f.policies.empty() ? ExperimentSpec::default_policies(spec.kind) : f.policies;
    spec.n = f.n;
    spec.workload = f.workload;
    if (!g.order.empty()) spec.order = g.order;
    spec.validate();
  }
  const auto rows = run_experiment(spec, make_guard(g), f.threads);
  std::ostringstream os;
  write_csv(os, rows);
  emit(g, os.str());
  if (!f.no_check) {
    const auto problems = check_experiment(spec, rows);
    if (!problems.empty()) throw InvariantError("experiment invariant failed: " + problems.front());
  }
  return 0;
}

int cmd_gen(const Globals& g, std::size_t n, const std::string& profile, double workload,
            const std::string& counter, double scale) {
  const Instance inst = counter.empty()
                            ? generate_instance(n, g.seed, parse_profile(profile), workload)
                            : counterexample(parse_counterexample_kind(counter), n, scale, workload);
  emit(g, render_instance(inst));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-minimizing computation allocation and channel scheduling for edge nodes"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--instance", g.instance_path, "Instance JSON file");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out_path, "Write output here instead of stdout");
  app.add_option("--order", g.order, "Order policy: exhaustive|greedy:K|ldf|rate|aco|auto (default exhaustive; auto for experiment)");
  app.add_option("--select", g.select, "Node selection: all|linear:comm|linear:rate|greedy|exhaustive");
  app.add_option("--suffix", g.suffix, "Greedy-prefix suffix fill: ascending|heuristic");
  app.add_flag("--guard-override", g.guard_override, "Lift enumeration size guards");

  std::optional<double> workload;
  bool gantt = false;
  auto* solve = app.add_subcommand("solve", "Select nodes, order transmissions, allocate work, build the schedule");
  solve->add_option("--workload", workload, "Override the instance workload");
  solve->add_flag("--gantt", gantt, "Print a text Gantt chart instead of JSON");

  std::optional<double> alloc_workload;
  auto* alloc = app.add_subcommand("allocate", "Optimal allocation over all nodes for the chosen orders");
  alloc->add_option("--workload", alloc_workload, "Override the instance workload");

  std::string direction = "both";
  auto* order = app.add_subcommand("order", "Transmission orders and their objective values");
  order->add_option("--direction", direction, "forward|backward|both");

  auto* select = app.add_subcommand("select", "Node selection with its trace");

  std::size_t alloc_samples = 1000, timeline_samples = 200;
  auto* oracle = app.add_subcommand("oracle", "Brute-force verification report");
  oracle->add_option("--samples", alloc_samples, "Random allocations per plan");
  oracle->add_option("--timeline-samples", timeline_samples, "Adversarial schedules");

  ExperimentFlags ef;
  auto* exp = app.add_subcommand("experiment", "Parameter sweep to CSV");
  exp->add_option("--spec", ef.spec_path, "Experiment spec JSON");
  exp->add_option("--kind", ef.kind, "ALLOC_VS_W|ORDER_VS_W|DELAY_VS_N");
  exp->add_option("--profile", ef.profile, "UMUC|UMDC|DMUC|DMDC");
  exp->add_option("--sweep", ef.sweep, "FROM:TO[:STEP] or comma list");
  exp->add_option("--seeds", ef.seeds, "Seeds (default 1..20)")->delimiter(',');
  exp->add_option("--policies", ef.policies, "Policies (default depends on kind)")->delimiter(',');
  exp->add_option("--n", ef.n, "Node count for workload sweeps");
  exp->add_option("--workload", ef.workload, "Workload for DELAY_VS_N");
  exp->add_option("--threads", ef.threads, "Worker threads (0 = hardware)");
  exp->add_flag("--no-check", ef.no_check, "Skip the built-in row invariants");

  std::size_t gen_n = 3;
  std::string gen_profile = "UMUC", gen_counter;
  double gen_workload = kDefaultWorkload, gen_scale = 100.0;
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--n", gen_n, "Node count");
  gen->add_option("--profile", gen_profile, "UMUC|UMDC|DMUC|DMDC");
  gen->add_option("--workload", gen_workload, "Total workload");
  gen->add_option("--counterexample", gen_counter, "LDF|FCL");
  gen->add_option("--scale", gen_scale, "Counterexample scale (>= 1)");

  for (CLI::App* sub : {solve, alloc, order, select, oracle, exp, gen}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve) return cmd_solve(g, workload, gantt);
    if (*alloc) return cmd_allocate(g, alloc_workload);
    if (*order) return cmd_order(g, direction);
    if (*select) return cmd_select(g);
    if (*oracle) return cmd_oracle(g, alloc_samples, timeline_samples);
    if (*exp) return cmd_experiment(g, ef);
    if (*gen) return cmd_gen(g, gen_n, gen_profile, gen_workload, gen_counter, gen_scale);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const GuardError& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
