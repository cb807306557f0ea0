#include "symcomp/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "symcomp/barrier/barrier.hpp"
#include "symcomp/cli/scenario_io.hpp"
#include "symcomp/cli/verify.hpp"
#include "symcomp/core/parallel.hpp"
#include "symcomp/pipeline/pipeline.hpp"
#include "symcomp/sim/sim.hpp"

namespace symcomp {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string scenario;
  std::string out = ".";
  std::size_t threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--scenario", c.scenario, "scenario JSON file")->required();
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads (0: SYMCOMP_THREADS or hardware)");
}

fs::path prepare_out(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw UsageError("cannot create output directory '" + c.out + "': " + ec.message());
  return fs::path(c.out);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw UsageError("cannot write '" + p.string() + "'");
  return os;
}

std::vector<double> parse_list(const std::string& text, char sep, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

/* "x1,x2;x1,x2": one group per agent */
AgentVectors parse_x0(const std::string& text, const Scenario& s) {
  AgentVectors x;
  std::stringstream ss(text);
  std::string group;
  while (std::getline(ss, group, ';')) x.push_back(parse_list(group, ',', "--x0"));
  if (x.size() != s.agents.size())
    throw UsageError("--x0: expected " + std::to_string(s.agents.size()) + " agent states");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != s.agents[i].state_dim())
      throw UsageError("--x0: agent " + std::to_string(i) + " has the wrong dimension");
    if (!s.agents[i].bounds.contains(x[i]))
      throw UsageError("--x0: agent " + std::to_string(i) + " is outside its bounds");
  }
  return x;
}

void write_controller_file(const fs::path& p, const Controller& c) {
  auto os = open_out(p);
  write_controller(os, c);
}

void print_report(std::ostream& out, const PipelineReport& report) {
  for (const auto& st : report.stages) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-11s %-10s %9.3fs  states=%zu transitions=%zu domain=%zu %s\n",
                  st.method.c_str(), st.stage.c_str(), st.seconds, st.states, st.transitions,
                  st.domain, to_string(st.verdict));
    out << buf;
  }
}

const char* stage_name(PipelineError::Stage s) {
  switch (s) {
    case PipelineError::Stage::local: return "local";
    case PipelineError::Stage::safety: return "safety";
    case PipelineError::Stage::global: return "global";
  }
  return "?";
}

int pipeline_failure(const PipelineError& e, const fs::path& dir, std::ostream& out,
                     std::ostream& err) {
  auto os = open_out(dir / "report.csv");
  write_report_csv(os, e.report);
  print_report(out, e.report);
  err << "error: stage " << stage_name(e.stage) << ": " << e.what() << '\n';
  return exit_infeasible;
}

// ---------------------------------------------------------------------------

int cmd_synth(const Common& c, std::optional<double> gamma, std::ostream& out,
              std::ostream& err) {
  const auto scenario = parse_scenario(c.scenario);
  const auto dir = prepare_out(c);
  PipelineOptions opt{c.threads, gamma};
  if (gamma) SafetyFilterParams{*gamma, 1.0}.validate();
  try {
    const auto r = bottom_up(scenario, opt);
    for (std::size_t i = 0; i < r.local_controllers.size(); ++i)
      write_controller_file(dir / ("local_" + std::to_string(i) + ".ctrl"), r.local_controllers[i]);
    write_controller_file(dir / "safety.ctrl", r.safety);
    write_controller_file(dir / "global.ctrl", r.global);
    auto os = open_out(dir / "report.csv");
    write_report_csv(os, r.report);
    out << "synth " << scenario.name << ": feasible\n";
    print_report(out, r.report);
    return exit_ok;
  } catch (const PipelineError& e) {
    return pipeline_failure(e, dir, out, err);
  }
}

int cmd_monolithic(const Common& c, double budget_seconds, std::size_t cap_mb, std::ostream& out,
                   std::ostream& err) {
  const auto scenario = parse_scenario(c.scenario);
  const auto dir = prepare_out(c);
  Budget budget = budget_seconds > 0 ? Budget::with_seconds(budget_seconds) : Budget();
  if (cap_mb > 0) budget.limit_bytes(cap_mb << 20);
  const auto r = monolithic(scenario, {c.threads, std::nullopt}, &budget);
  auto os = open_out(dir / "monolithic_report.csv");
  write_report_csv(os, r.report);
  print_report(out, r.report);
  if (r.verdict != Verdict::feasible) {
    err << "error: stage monolithic: " << to_string(r.verdict) << ": " << r.message << '\n';
    return exit_infeasible;
  }
  write_controller_file(dir / "monolithic.ctrl", r.controller);
  out << "monolithic " << scenario.name << ": feasible\n";
  return exit_ok;
}

int cmd_bench(const Common& c, double budget_seconds, std::size_t cap_mb, std::ostream& out) {
  if (!(budget_seconds > 0)) throw UsageError("--budget-seconds must be positive");
  const auto scenario = parse_scenario(c.scenario);
  const auto dir = prepare_out(c);
  const auto rep = benchmark_compare(scenario, budget_seconds, {c.threads, std::nullopt},
                                     cap_mb << 20);
  auto os = open_out(dir / "benchmark.csv");
  write_benchmark_csv(os, rep);
  print_report(out, rep.bottom_up);
  print_report(out, rep.monolithic);
  out << "bottom_up " << to_string(rep.bottom_up_verdict) << ", monolithic "
      << to_string(rep.monolithic_verdict);
  if (rep.reduction_percent) {
    char buf[64];
    std::snprintf(buf, sizeof buf, ", reduction %.2f%%", *rep.reduction_percent);
    out << buf;
  }
  out << '\n';
  return exit_ok;
}

struct SimArgs {
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::string x0;
  std::size_t runs = 1;
  std::string tie_break;
  std::string method = "bottom-up";
};

int cmd_simulate(const Common& c, const SimArgs& a, std::ostream& out, std::ostream& err) {
  const auto scenario = parse_scenario(c.scenario);
  std::optional<AgentVectors> fixed;
  if (!a.x0.empty())
    fixed = parse_x0(a.x0, scenario);
  else if (!scenario.simulation.initial_states.empty())
    fixed = scenario.simulation.initial_states;
  if (a.runs == 0) throw UsageError("--runs must be positive");
  const auto dir = prepare_out(c);

  SimulateOptions opt;
  opt.steps = a.steps.value_or(scenario.simulation.steps);
  opt.seed = a.seed.value_or(scenario.simulation.seed);
  opt.tie_break = scenario.simulation.tie_break;
  if (a.tie_break == "lowest") opt.tie_break = SimulationSpec::TieBreak::lowest;
  if (a.tie_break == "random") opt.tie_break = SimulationSpec::TieBreak::random;

  std::optional<BottomUpResult> bu;
  std::optional<MonolithicResult> mono;
  const ComposedLayout* layout = nullptr;
  const Controller* controller = nullptr;
  if (a.method == "monolithic") {
    mono = monolithic(scenario, {c.threads, std::nullopt});
    if (mono->verdict != Verdict::feasible) {
      err << "error: stage monolithic: " << mono->message << '\n';
      return exit_infeasible;
    }
    layout = &mono->layout;
    controller = &mono->controller;
  } else {
    try {
      bu = bottom_up(scenario, {c.threads, std::nullopt});
    } catch (const PipelineError& e) {
      err << "error: stage " << stage_name(e.stage) << ": " << e.what() << '\n';
      return exit_infeasible;
    }
    layout = &bu->layout;
    controller = &bu->global;
  }
  const Feedback feedback = refine(*layout, *controller);

  bool all_passed = true;
  for (std::size_t run = 0; run < a.runs; ++run) {
    SimulateOptions o = opt;
    o.seed = opt.seed + run;
    std::mt19937_64 rng(o.seed);
    const AgentVectors x0 = fixed ? *fixed : random_initial_state(feedback, rng);
    const auto trace = simulate(scenario, feedback, x0, o);
    const auto verdict = check_trace(trace, scenario);
    const auto name = a.runs == 1 ? std::string("trace.csv") : "trace_" + std::to_string(run) + ".csv";
    auto os = open_out(dir / name);
    write_trace_csv(os, trace);
    out << (verdict.passed() ? "PASS " : "FAIL ") << name << ": " << trace.steps.size() - 1
        << " steps, seed " << o.seed << (verdict.message.empty() ? "" : ", " + verdict.message)
        << '\n';
    all_passed &= verdict.passed();
  }
  if (!all_passed) {
    err << "error: check trace: at least one trace failed\n";
    return exit_verification;
  }
  return exit_ok;
}

int cmd_sweep(const Common& c, const std::string& gammas_text, std::ostream& out,
              std::ostream& err) {
  const auto gammas = parse_list(gammas_text, ',', "--gammas");
  for (double g : gammas)
    if (!(g > 0 && g < 1)) throw UsageError("--gammas: every gamma must lie in (0,1)");
  if (!std::is_sorted(gammas.begin(), gammas.end()))
    throw UsageError("--gammas: values must be ascending");
  const auto scenario = parse_scenario(c.scenario);
  const auto dir = prepare_out(c);
  BottomUpResult r;
  try {
    r = controlled_composition(scenario, {c.threads, std::nullopt});
  } catch (const PipelineError& e) {
    return pipeline_failure(e, dir, out, err);
  }
  const auto report = gamma_sweep(r.composed, make_barriers(scenario), gammas,
                                  composed_eta_max(scenario), c.threads);
  auto os = open_out(dir / "sweep.csv");
  write_sweep_csv(os, report);
  write_sweep_csv(out, report);
  if (!report.containment_holds() || !report.counts_monotone()) {
    err << "error: check containment: " << report.violations.size()
        << " containment violations, counts " << (report.counts_monotone() ? "monotone" : "not monotone")
        << '\n';
    return exit_verification;
  }
  return exit_ok;
}

int cmd_verify(const Common& c, const VerifyOptions& vopt, std::ostream& out, std::ostream& err) {
  const auto scenario = parse_scenario(c.scenario);
  const auto dir = prepare_out(c);
  BottomUpResult r;
  try {
    r = bottom_up(scenario, {c.threads, std::nullopt});
  } catch (const PipelineError& e) {
    return pipeline_failure(e, dir, out, err);
  }
  VerifyOptions o = vopt;
  o.threads = c.threads;
  const auto report = verify_scenario(scenario, r, o);
  auto os = open_out(dir / "verify.txt");
  write_verify_report(os, report);
  write_verify_report(out, report);
  if (!report.passed()) {
    for (const auto& chk : report.checks)
      if (!chk.passed) err << "error: check " << chk.name << " failed\n";
    return exit_verification;
  }
  return exit_ok;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Symbolic multi-agent controller synthesis", "symcomp");
  app.require_subcommand(1);

  Common common;
  auto* synth = app.add_subcommand("synth", "bottom-up synthesis; writes controllers and report");
  add_common(synth, common);
  std::optional<double> gamma;
  synth->add_option("--gamma", gamma, "override the scenario's gamma");

  auto* mono = app.add_subcommand("monolithic", "one-shot synthesis on the full product");
  add_common(mono, common);
  double budget_seconds = 0;
  std::size_t cap_mb = 0;
  mono->add_option("--budget-seconds", budget_seconds, "wall-clock limit (0: none)");
  mono->add_option("--memory-cap-mb", cap_mb, "relation size limit in MiB (0: none)");

  auto* bench = app.add_subcommand("bench", "compare bottom-up against monolithic");
  add_common(bench, common);
  double bench_budget = 60;
  std::size_t bench_cap_mb = default_memory_cap >> 20;
  bench->add_option("--budget-seconds", bench_budget, "monolithic time limit")->capture_default_str();
  bench->add_option("--memory-cap-mb", bench_cap_mb, "monolithic relation limit in MiB")
      ->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "closed-loop simulation and trace check");
  add_common(sim, common);
  SimArgs sim_args;
  sim->add_option("--steps", sim_args.steps, "maximum number of steps");
  sim->add_option("--seed", sim_args.seed, "seed for initial state and tie-breaking");
  sim->add_option("--x0", sim_args.x0, "initial state, agents separated by ';'");
  sim->add_option("--runs", sim_args.runs, "number of traces (seeds seed, seed+1, ...)");
  sim->add_option("--tie-break", sim_args.tie_break, "lowest or random")
      ->check(CLI::IsMember({"lowest", "random"}));
  sim->add_option("--method", sim_args.method, "bottom-up or monolithic")
      ->check(CLI::IsMember({"bottom-up", "monolithic"}))
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep-gamma", "safety filter sweep over gamma");
  add_common(sweep, common);
  std::string gammas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  sweep->add_option("--gammas", gammas, "ascending comma-separated list")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "sampling and exhaustive soundness checks");
  add_common(verify, common);
  VerifyOptions vopt;
  verify->add_option("--frr-samples", vopt.frr_samples)->capture_default_str();
  verify->add_option("--samples", vopt.concretization_samples, "concretization samples")
      ->capture_default_str();
  verify->add_option("--seed", vopt.seed)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (synth->parsed()) return cmd_synth(common, gamma, out, err);
    if (mono->parsed()) return cmd_monolithic(common, budget_seconds, cap_mb, out, err);
    if (bench->parsed()) return cmd_bench(common, bench_budget, bench_cap_mb, out);
    if (sim->parsed()) return cmd_simulate(common, sim_args, out, err);
    if (sweep->parsed()) return cmd_sweep(common, gammas, out, err);
    if (verify->parsed()) return cmd_verify(common, vopt, out, err);
  } catch (const ScenarioFileError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const SchemaError& e) {
    err << "error: schema: " << e.what() << '\n';
    return exit_schema;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace symcomp
