#include "symcomp/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <new>
#include <ostream>
#include <sstream>

#include "symcomp/abstraction/abstraction.hpp"
#include "symcomp/barrier/barrier.hpp"
#include "symcomp/core/parallel.hpp"
#include "symcomp/synthesis/synthesis.hpp"

namespace symcomp {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<state_id> set_difference(const std::vector<state_id>& a,
                                     const std::vector<state_id>& b) {
  std::vector<state_id> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint8_t> cell_flags(std::size_t cells, const std::vector<state_id>& marked) {
  std::vector<std::uint8_t> out(cells, 0);
  for (state_id c : marked) out[c] = 1;
  return out;
}

/* grids, dynamics and target labels, shared by both methods */
ComposedLayout base_layout(const Scenario& scenario) {
  ComposedLayout layout;
  for (const auto& agent : scenario.agents) {
    layout.grids.push_back(make_grid(agent));
    layout.dynamics.push_back(make_dynamics(agent));
    const Grid& g = layout.grids.back();
    layout.target.push_back(cell_flags(g.cell_count(), target_cells(g, agent)));
  }
  return layout;
}

/* target mask of every composed (pre-restriction) index that is retained */
std::vector<std::uint32_t> masks_for(const ComposedLayout& layout, std::size_t state_count) {
  std::vector<std::uint32_t> mask(state_count);
  for (state_id s = 0; s < state_count; ++s) mask[s] = layout.target_mask(layout.cells_of(s));
  return mask;
}

std::string join_agents(const std::vector<std::size_t>& agents) {
  std::string out;
  for (std::size_t k = 0; k < agents.size(); ++k)
    out += (k ? ", " : "") + std::to_string(agents[k]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TransitionSystem augment_with_flags(const TransitionSystem& system,
                                    const std::vector<std::uint32_t>& mask, std::size_t agents,
                                    std::size_t threads, const Budget* budget) {
  if (mask.size() != system.state_count())
    throw std::invalid_argument("augment_with_flags: one mask per state required");
  if (agents >= 32) throw std::invalid_argument("augment_with_flags: too many agents");
  const std::uint64_t total = static_cast<std::uint64_t>(system.state_count()) << agents;
  if (total >= npos) throw std::length_error("augment_with_flags: augmented index space overflows");
  const std::uint32_t low = (1u << agents) - 1u;

  std::vector<state_id> initial;
  for (state_id s0 : system.initial_states()) initial.push_back(augmented_state(s0, mask[s0], agents));
  std::sort(initial.begin(), initial.end());

  std::vector<double> centers;
  const std::size_t dim = system.center_dim();
  if (dim > 0) {
    centers.reserve(static_cast<std::size_t>(total) * dim);
    for (state_id s = 0; s < system.state_count(); ++s)
      for (std::uint32_t f = 0; f <= low; ++f) {
        const auto c = system.center(s);
        centers.insert(centers.end(), c.begin(), c.end());
      }
  }

  auto emit = [&](state_id k, TransitionSystem::Builder& b) {
    const state_id s = k >> agents;
    const std::uint32_t f = k & low;
    std::vector<state_id> succ;
    for (pair_id p = system.pair_begin(s); p < system.pair_end(s); ++p) {
      succ.clear();
      for (state_id y : system.successors(p)) succ.push_back(augmented_state(y, f | mask[y], agents));
      b.add_pair(system.pair_input(p), succ);
    }
  };
  return build_by_state(static_cast<std::size_t>(total), system.input_count(), threads, emit,
                        std::move(initial), dim, std::move(centers), budget);
}

std::vector<state_id> all_flags_set(std::size_t base_states, std::size_t agents) {
  std::vector<state_id> out;
  out.reserve(base_states);
  const std::uint32_t full = (1u << agents) - 1u;
  for (state_id s = 0; s < base_states; ++s) out.push_back(augmented_state(s, full, agents));
  return out;
}

// ---------------------------------------------------------------------------

state_id ComposedLayout::system_state(std::span<const state_id> cells) const {
  std::vector<std::uint32_t> parts(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const state_id k = component_of.empty() ? cells[i] : component_of[i][cells[i]];
    if (k == npos) return npos;
    parts[i] = k;
  }
  const auto composed = static_cast<state_id>(states.encode(parts));
  if (retained.empty()) return composed;
  const auto it = std::lower_bound(retained.begin(), retained.end(), composed);
  if (it == retained.end() || *it != composed) return npos;
  return static_cast<state_id>(it - retained.begin());
}

std::uint32_t ComposedLayout::target_mask(std::span<const state_id> cells) const {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (target[i][cells[i]]) m |= 1u << i;
  return m;
}

std::vector<state_id> ComposedLayout::cells_of(state_id system_state) const {
  const state_id composed = retained.empty() ? system_state : retained[system_state];
  auto parts = states.decode(composed);
  if (!cell_of.empty())
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i] = cell_of[i][parts[i]];
  return {parts.begin(), parts.end()};
}

// ---------------------------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::feasible: return "feasible";
    case Verdict::infeasible: return "infeasible";
    case Verdict::timeout: return "timeout";
    case Verdict::resource_limit: return "resource-limit";
  }
  return "unknown";
}

double PipelineReport::total_seconds() const {
  if (const auto* t = find("total")) return t->seconds;
  double s = 0;
  for (const auto& st : stages) s += st.seconds;
  return s;
}

const StageReport* PipelineReport::find(const std::string& stage) const {
  for (const auto& st : stages)
    if (st.stage == stage) return &st;
  return nullptr;
}

namespace {

void write_row(std::ostream& os, const StageReport& st) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", st.seconds);
  os << st.method << ',' << st.stage << ',' << buf << ',' << st.states << ',' << st.transitions
     << ',' << st.domain << ',' << to_string(st.verdict) << '\n';
}

}  // namespace

void write_report_csv(std::ostream& os, const PipelineReport& report) {
  os << "method,stage,seconds,states,transitions,domain,verdict\n";
  for (const auto& st : report.stages) write_row(os, st);
}

// ---------------------------------------------------------------------------

BottomUpResult controlled_composition(const Scenario& scenario, const PipelineOptions& options) {
  scenario.validate();
  const auto t_total = clock_type::now();
  const std::size_t threads = resolve_threads(options.threads);
  const std::size_t n_agents = scenario.agents.size();

  BottomUpResult r;
  r.layout = base_layout(scenario);
  r.local_systems.resize(n_agents);
  r.local_controllers.resize(n_agents);
  std::vector<StageReport> local_reports(n_agents);
  std::vector<std::uint8_t> local_ok(n_agents, 0);

  /* step 1: agents are independent */
  const std::size_t outer = std::min(threads, n_agents);
  const std::size_t inner = std::max<std::size_t>(1, threads / std::max<std::size_t>(outer, 1));
  for_each_chunk(n_agents, outer, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto t0 = clock_type::now();
      const auto& agent = scenario.agents[i];
      const Grid& grid = r.layout.grids[i];
      const auto init = initial_cells(grid, agent);
      r.local_systems[i] = abstract(r.layout.dynamics[i], grid, init, inner);
      const auto avoid = obstacle_cells(grid, agent);
      const ReachAvoidSpec spec(set_difference(target_cells(grid, agent), avoid), avoid);
      r.local_controllers[i] = synthesize_reach_avoid(r.local_systems[i], spec);
      const auto& c = r.local_controllers[i];
      local_ok[i] = std::all_of(init.begin(), init.end(), [&](state_id x) { return c.in_domain(x); });
      local_reports[i] = {"bottom_up", "local[" + std::to_string(i) + "]", seconds_since(t0),
                          r.local_systems[i].state_count(), r.local_systems[i].transition_count(),
                          c.domain().size(), local_ok[i] ? Verdict::feasible : Verdict::infeasible};
    }
  });
  for (auto& st : local_reports) r.report.stages.push_back(std::move(st));
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < n_agents; ++i)
    if (!local_ok[i]) failed.push_back(i);
  if (!failed.empty())
    throw PipelineError(PipelineError::Stage::local, failed.front(),
                        "local stage infeasible for agent(s) " + join_agents(failed) +
                            ": initial region not inside the local controller domain",
                        r.report);

  /* step 2: compose the controlled agents */
  auto t0 = clock_type::now();
  for (std::size_t i = 0; i < n_agents; ++i)
    r.local_restricted.push_back(restrict(r.local_systems[i], r.local_controllers[i], threads));
  std::vector<const TransitionSystem*> parts;
  for (const auto& lr : r.local_restricted) parts.push_back(&lr.system);
  r.composed = compose(std::span<const TransitionSystem* const>(parts), threads);
  r.layout.states = composed_states(parts);
  r.layout.inputs = composed_inputs(parts);
  for (std::size_t i = 0; i < n_agents; ++i) {
    const auto& lr = r.local_restricted[i];
    std::vector<state_id> map(r.layout.grids[i].cell_count(), npos);
    for (state_id k = 0; k < lr.original_of.size(); ++k) map[lr.original_of[k]] = k;
    r.layout.component_of.push_back(std::move(map));
    r.layout.cell_of.push_back(lr.original_of);
  }
  r.report.stages.push_back({"bottom_up", "compose", seconds_since(t0), r.composed.state_count(),
                             r.composed.transition_count(), r.composed.state_count(),
                             Verdict::feasible});
  r.elapsed = seconds_since(t_total);
  return r;
}

BottomUpResult bottom_up(const Scenario& scenario, const PipelineOptions& options) {
  const auto t_total = clock_type::now();
  BottomUpResult r = controlled_composition(scenario, options);
  const std::size_t threads = resolve_threads(options.threads);
  const std::size_t n_agents = scenario.agents.size();
  const double gamma = options.gamma.value_or(scenario.gamma);

  auto t0 = clock_type::now();
  const auto barriers = make_barriers(scenario);
  r.safety = safety_controller(r.composed, barriers, {gamma, composed_eta_max(scenario)}, threads);
  const auto init = r.composed.initial_states();
  const auto bad = std::find_if(init.begin(), init.end(),
                                [&](state_id x) { return !r.safety.in_domain(x); });
  if (bad != init.end()) {
    r.report.stages.push_back({"bottom_up", "filter", seconds_since(t0), r.composed.state_count(),
                               r.composed.transition_count(), r.safety.domain().size(),
                               Verdict::infeasible});
    throw PipelineError(PipelineError::Stage::safety, std::nullopt,
                        "safety filter: composed initial state " + std::to_string(*bad) +
                            " is outside the safety controller domain (" +
                            std::to_string(r.safety.domain().size()) + " states in domain)",
                        r.report);
  }
  r.filtered = restrict(r.composed, r.safety, threads);
  r.layout.retained = r.filtered.original_of;
  r.report.stages.push_back({"bottom_up", "filter", seconds_since(t0),
                             r.filtered.system.state_count(), r.filtered.system.transition_count(),
                             r.safety.domain().size(), Verdict::feasible});

  /* step 3: global reach on the flag-augmented system */
  t0 = clock_type::now();
  r.target_mask = masks_for(r.layout, r.filtered.system.state_count());
  r.augmented = augment_with_flags(r.filtered.system, r.target_mask, n_agents, threads);
  r.global = synthesize_reach_avoid(
      r.augmented, ReachAvoidSpec(all_flags_set(r.filtered.system.state_count(), n_agents), {}));
  const auto ainit = r.augmented.initial_states();
  const auto abad = std::find_if(ainit.begin(), ainit.end(),
                                 [&](state_id x) { return !r.global.in_domain(x); });
  const bool global_ok = abad == ainit.end();
  r.report.stages.push_back({"bottom_up", "global", seconds_since(t0), r.augmented.state_count(),
                             r.augmented.transition_count(), r.global.domain().size(),
                             global_ok ? Verdict::feasible : Verdict::infeasible});
  if (!global_ok)
    throw PipelineError(PipelineError::Stage::global, std::nullopt,
                        "global stage infeasible: augmented initial state " +
                            std::to_string(*abad) + " is outside the global controller domain",
                        r.report);

  r.report.stages.push_back({"bottom_up", "total", seconds_since(t_total),
                             r.augmented.state_count(), r.augmented.transition_count(),
                             r.global.domain().size(), Verdict::feasible});
  r.elapsed = seconds_since(t_total);
  return r;
}

// ---------------------------------------------------------------------------

MonolithicResult monolithic(const Scenario& scenario, const PipelineOptions& options,
                            const Budget* budget) {
  scenario.validate();
  const auto t_total = clock_type::now();
  const std::size_t threads = resolve_threads(options.threads);
  const std::size_t n_agents = scenario.agents.size();

  MonolithicResult r;
  r.layout = base_layout(scenario);
  auto stage = [&](const char* name, clock_type::time_point t0, std::size_t states,
                   std::size_t transitions, std::size_t domain, Verdict v) {
    r.report.stages.push_back({"monolithic", name, seconds_since(t0), states, transitions, domain, v});
  };

  const char* current = "abstraction";
  auto t0 = clock_type::now();
  try {
    std::vector<TransitionSystem> locals;
    std::vector<std::vector<std::uint8_t>> obstacle;
    std::size_t local_states = 0, local_transitions = 0;
    for (std::size_t i = 0; i < n_agents; ++i) {
      const Grid& grid = r.layout.grids[i];
      check_budget(budget);
      locals.push_back(abstract(r.layout.dynamics[i], grid,
                                initial_cells(grid, scenario.agents[i]), threads));
      obstacle.push_back(cell_flags(grid.cell_count(), obstacle_cells(grid, scenario.agents[i])));
      local_states += locals.back().state_count();
      local_transitions += locals.back().transition_count();
    }
    stage(current, t0, local_states, local_transitions, local_states, Verdict::feasible);

    current = "compose";
    t0 = clock_type::now();
    std::vector<const TransitionSystem*> parts;
    for (const auto& s : locals) parts.push_back(&s);
    r.composed = compose(std::span<const TransitionSystem* const>(parts), threads, budget);
    r.layout.states = composed_states(parts);
    r.layout.inputs = composed_inputs(parts);

    /* avoid: some agent in an obstacle cell, or some barrier margin < 0 */
    const auto cls = classify_safe_set(r.composed, make_barriers(scenario),
                                       composed_eta_max(scenario));
    std::vector<std::uint8_t> avoid(r.composed.state_count(), 0);
    std::vector<std::uint32_t> mask(r.composed.state_count());
    std::vector<std::uint32_t> tuple(n_agents);
    for (state_id s = 0; s < r.composed.state_count(); ++s) {
      r.layout.states.decode(s, tuple);
      bool hit = cls[s] == SafeSetClass::outside;
      for (std::size_t i = 0; i < n_agents && !hit; ++i) hit = obstacle[i][tuple[i]];
      avoid[s] = hit;
      mask[s] = r.layout.target_mask(std::span<const state_id>(tuple.data(), n_agents));
    }
    stage(current, t0, r.composed.state_count(), r.composed.transition_count(),
          r.composed.state_count(), Verdict::feasible);

    current = "augment";
    t0 = clock_type::now();
    r.augmented = augment_with_flags(r.composed, mask, n_agents, threads, budget);
    stage(current, t0, r.augmented.state_count(), r.augmented.transition_count(),
          r.augmented.state_count(), Verdict::feasible);

    current = "synthesis";
    t0 = clock_type::now();
    const std::uint32_t full = r.layout.all_flags();
    std::vector<state_id> target, avoid_aug;
    for (state_id s = 0; s < r.composed.state_count(); ++s) {
      if (avoid[s]) {
        for (std::uint32_t f = 0; f <= full; ++f) avoid_aug.push_back(augmented_state(s, f, n_agents));
      } else {
        target.push_back(augmented_state(s, full, n_agents));
      }
    }
    r.controller = synthesize_reach_avoid(r.augmented, ReachAvoidSpec(std::move(target),
                                                                      std::move(avoid_aug)),
                                          budget);
    const auto init = r.augmented.initial_states();
    const auto bad = std::find_if(init.begin(), init.end(),
                                  [&](state_id x) { return !r.controller.in_domain(x); });
    r.verdict = bad == init.end() ? Verdict::feasible : Verdict::infeasible;
    if (r.verdict == Verdict::infeasible)
      r.message = "monolithic synthesis infeasible: augmented initial state " +
                  std::to_string(*bad) + " is outside the controller domain";
    stage(current, t0, r.augmented.state_count(), r.augmented.transition_count(),
          r.controller.domain().size(), r.verdict);
  } catch (const BudgetExceeded& e) {
    r.verdict = e.kind() == BudgetExceeded::Kind::time ? Verdict::timeout : Verdict::resource_limit;
    r.message = std::string("monolithic ") + current + ": " + e.what();
    stage(current, t0, 0, 0, 0, r.verdict);
    r.composed = {};
    r.augmented = {};
    r.controller = {};
  } catch (const std::bad_alloc&) {
    r.verdict = Verdict::resource_limit;
    r.message = std::string("monolithic ") + current + ": out of memory";
    stage(current, t0, 0, 0, 0, r.verdict);
    r.composed = {};
    r.augmented = {};
    r.controller = {};
  }
  r.report.stages.push_back({"monolithic", "total", seconds_since(t_total),
                             r.augmented.state_count(), r.augmented.transition_count(),
                             r.controller.domain().size(), r.verdict});
  return r;
}

// ---------------------------------------------------------------------------

BenchmarkReport benchmark_compare(const Scenario& scenario, double budget_seconds,
                                  const PipelineOptions& options, std::size_t memory_cap) {
  if (!(budget_seconds > 0)) throw std::invalid_argument("benchmark: budget must be positive");
  BenchmarkReport out;
  try {
    auto r = bottom_up(scenario, options);
    out.bottom_up = std::move(r.report);
  } catch (const PipelineError& e) {
    out.bottom_up = e.report;
    out.bottom_up_verdict = Verdict::infeasible;
    out.bottom_up.stages.push_back({"bottom_up", "total", out.bottom_up.total_seconds(), 0, 0, 0,
                                    Verdict::infeasible});
  }
  auto budget = Budget::with_seconds(budget_seconds);
  if (memory_cap > 0) budget.limit_bytes(memory_cap);
  auto mono = monolithic(scenario, options, &budget);
  out.monolithic_verdict = mono.verdict;
  out.monolithic = std::move(mono.report);

  const bool finished = out.monolithic_verdict == Verdict::feasible ||
                        out.monolithic_verdict == Verdict::infeasible;
  const double mono_total = out.monolithic.total_seconds();
  if (finished && mono_total > 0)
    out.reduction_percent = 100.0 * (1.0 - out.bottom_up.total_seconds() / mono_total);
  return out;
}

void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report) {
  os << "method,stage,seconds,states,transitions,domain,verdict\n";
  for (const auto& st : report.bottom_up.stages) write_row(os, st);
  for (const auto& st : report.monolithic.stages) write_row(os, st);
  /* the percentage rides in the seconds column; empty when monolithic did not finish */
  os << "reduction,percent,";
  if (report.reduction_percent) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", *report.reduction_percent);
    os << buf;
  }
  os << ",,,," << to_string(report.monolithic_verdict) << '\n';
}

}  // namespace symcomp
