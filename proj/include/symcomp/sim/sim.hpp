#ifndef SYMCOMP_SIM_SIM_HPP
#define SYMCOMP_SIM_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcomp/core/controller.hpp"
#include "symcomp/pipeline/pipeline.hpp"
#include "symcomp/pipeline/scenario.hpp"

namespace symcomp {

/* per agent state (or input) vectors */
using AgentVectors = std::vector<std::vector<double>>;

class OutsideDomain : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/*
 * class: Feedback
 *
 * Concrete feedback C = Ĉ∘Q over the flag-augmented composed index space:
 * quantize every agent, compose the cell indices, append the flags and look
 * the result up in the controller. Holds references; the layout and the
 * controller must outlive it.
 */
class Feedback {
public:
  Feedback(const ComposedLayout& layout, const Controller& controller);

  struct Lookup {
    state_id symbolic;  // augmented index
    std::span<const input_id> allowed;
    std::span<const std::uint8_t> progress;
  };

  /* throws OutsideDomain */
  Lookup operator()(const AgentVectors& x, std::uint32_t flags) const;

  /* agent cells, or nullopt if some agent is outside its grid */
  std::optional<std::vector<state_id>> quantize(const AgentVectors& x) const;
  std::uint32_t target_mask(const AgentVectors& x) const;
  AgentVectors input_vectors(input_id composed) const;
  AgentVectors step(const AgentVectors& x, const AgentVectors& u) const;

  const ComposedLayout& layout() const noexcept { return *layout_; }
  const Controller& controller() const noexcept { return *controller_; }

private:
  const ComposedLayout* layout_;
  const Controller* controller_;
};

Feedback refine(const ComposedLayout& layout, const Controller& controller);

struct TraceStep {
  std::size_t k = 0;
  AgentVectors x;
  /* empty on the terminal row */
  AgentVectors u;
  std::uint32_t flags = 0;
};

struct Trace {
  std::vector<TraceStep> steps;
  std::uint64_t seed = 0;
  std::string scenario;
  /* set when the trace was cut short by a domain error */
  std::optional<std::string> failure;
};

struct SimulateOptions {
  std::size_t steps = 200;
  std::uint64_t seed = 1;
  SimulationSpec::TieBreak tie_break = SimulationSpec::TieBreak::lowest;
};

/*
 * Closed loop from x0. Outside the all-flags state the input is chosen among
 * the rank-decreasing (progress) inputs, lowest composed index first or
 * seeded-uniform. Stops after `steps` inputs or once every flag is set.
 */
Trace simulate(const Scenario& scenario, const Feedback& feedback, const AgentVectors& x0,
               const SimulateOptions& options);

/* uniform point in the cells of a random domain state with consistent flags */
AgentVectors random_initial_state(const Feedback& feedback, std::mt19937_64& rng);

struct TraceVerdict {
  bool obstacles_ok = true;
  bool distances_ok = true;
  bool targets_ok = true;
  bool complete = true;
  /* first failing step for the per-step clauses */
  std::optional<std::size_t> first_violation;
  std::string message;

  bool passed() const noexcept { return obstacles_ok && distances_ok && targets_ok && complete; }
};

/*
 * Per step: no agent inside an obstacle (closed boxes), every barrier pair at
 * infinity-norm distance >= d. Eventually: every agent inside a target.
 */
TraceVerdict check_trace(const Trace& trace, const Scenario& scenario);

/* k,agent,x1,x2,u1,u2,flags with 6-decimal values */
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace symcomp

#endif
