#ifndef SYMCOMP_PIPELINE_PIPELINE_HPP
#define SYMCOMP_PIPELINE_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcomp/abstraction/dynamics.hpp"
#include "symcomp/abstraction/grid.hpp"
#include "symcomp/core/budget.hpp"
#include "symcomp/core/composition.hpp"
#include "symcomp/core/controller.hpp"
#include "symcomp/core/transition_system.hpp"
#include "symcomp/pipeline/scenario.hpp"

namespace symcomp {

/*
 * Latched target flags: augmented state s * 2^N + f, where bit i of f is
 * set once agent i has visited one of its target cells. A transition to s'
 * moves flags f to f | mask(s'). Initial states are (s0, mask(s0)).
 */
TransitionSystem augment_with_flags(const TransitionSystem& system,
                                    const std::vector<std::uint32_t>& mask, std::size_t agents,
                                    std::size_t threads = 1, const Budget* budget = nullptr);

inline state_id augmented_state(state_id s, std::uint32_t flags, std::size_t agents) {
  return static_cast<state_id>((static_cast<std::uint64_t>(s) << agents) | flags);
}

/* augmented states whose flags are all set */
std::vector<state_id> all_flags_set(std::size_t base_states, std::size_t agents);

/*
 * class: ComposedLayout
 *
 * How concrete agent states map to a composed system's state index:
 * per-agent cell -> component index -> ComposedIndex -> (optionally) the
 * dense index after a restriction. Shared by both synthesis methods so the
 * simulator can refine either controller.
 */
struct ComposedLayout {
  std::vector<Grid> grids;
  std::vector<Dynamics> dynamics;
  /* per agent: cell -> component index, npos if dropped; empty means identity */
  std::vector<std::vector<state_id>> component_of;
  /* per agent: component index -> cell (inverse of component_of) */
  std::vector<std::vector<state_id>> cell_of;
  ComposedIndex states;
  ComposedIndex inputs;
  /* retained composed indices (ascending); empty means identity */
  std::vector<state_id> retained;
  /* per agent: cell -> in target */
  std::vector<std::vector<std::uint8_t>> target;

  std::size_t agents() const noexcept { return grids.size(); }
  std::uint32_t all_flags() const noexcept { return (1u << agents()) - 1u; }

  /* system index of a tuple of agent cells, npos if it has none */
  state_id system_state(std::span<const state_id> cells) const;
  std::uint32_t target_mask(std::span<const state_id> cells) const;
  /* agent cells of a system index */
  std::vector<state_id> cells_of(state_id system_state) const;
};

enum class Verdict { feasible, infeasible, timeout, resource_limit };
const char* to_string(Verdict v);

struct StageReport {
  std::string method;
  std::string stage;
  double seconds = 0;
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t domain = 0;
  Verdict verdict = Verdict::feasible;
};

struct PipelineReport {
  std::vector<StageReport> stages;

  double total_seconds() const;
  const StageReport* find(const std::string& stage) const;
};

/* method,stage,seconds,states,transitions,domain,verdict */
void write_report_csv(std::ostream& os, const PipelineReport& report);

/* a stage failure; carries the report of the stages run so far */
class PipelineError : public std::runtime_error {
public:
  enum class Stage { local, safety, global };
  PipelineError(Stage stage, std::optional<std::size_t> agent, const std::string& what,
                PipelineReport report)
      : std::runtime_error(what), stage(stage), agent(agent), report(std::move(report)) {}

  Stage stage;
  std::optional<std::size_t> agent;
  PipelineReport report;
};

struct PipelineOptions {
  /* 0: default_threads() */
  std::size_t threads = 0;
  /* overrides the scenario's gamma when set */
  std::optional<double> gamma;
};

struct BottomUpResult {
  std::vector<TransitionSystem> local_systems;
  std::vector<Controller> local_controllers;
  std::vector<RestrictedSystem> local_restricted;
  /* product of the locally controlled systems */
  TransitionSystem composed;
  Controller safety;
  /* composed system under the safety controller */
  RestrictedSystem filtered;
  std::vector<std::uint32_t> target_mask;
  TransitionSystem augmented;
  Controller global;
  ComposedLayout layout;
  PipelineReport report;
  double elapsed = 0;
};

/* local reach-avoid per agent, CBF filter on the composition, global reach */
BottomUpResult bottom_up(const Scenario& scenario, const PipelineOptions& options = {});

/* the first two steps up to the unfiltered composition; later fields stay empty */
BottomUpResult controlled_composition(const Scenario& scenario,
                                      const PipelineOptions& options = {});

struct MonolithicResult {
  Verdict verdict = Verdict::feasible;
  std::string message;
  /* empty unless the run finished */
  TransitionSystem composed;
  TransitionSystem augmented;
  Controller controller;
  ComposedLayout layout;
  PipelineReport report;
};

/*
 * One-shot synthesis on the product of the unrestricted abstractions with
 * obstacles and barrier margins encoded as avoid. Never throws on budget
 * exhaustion or infeasibility; the verdict says what happened.
 */
MonolithicResult monolithic(const Scenario& scenario, const PipelineOptions& options = {},
                            const Budget* budget = nullptr);

struct BenchmarkReport {
  PipelineReport bottom_up;
  PipelineReport monolithic;
  Verdict bottom_up_verdict = Verdict::feasible;
  Verdict monolithic_verdict = Verdict::feasible;
  /* 100 * (1 - bottom_up / monolithic); nullopt unless both finished */
  std::optional<double> reduction_percent;
};

/* default cap on the monolithic relation when benchmarking; 0 disables the cap */
inline constexpr std::size_t default_memory_cap = std::size_t{3} << 30;

BenchmarkReport benchmark_compare(const Scenario& scenario, double budget_seconds,
                                  const PipelineOptions& options = {},
                                  std::size_t memory_cap = default_memory_cap);

/* both reports, then a `reduction,percent,...` row */
void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report);

}  // namespace symcomp

#endif
