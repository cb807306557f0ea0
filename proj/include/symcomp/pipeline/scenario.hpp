#ifndef SYMCOMP_PIPELINE_SCENARIO_HPP
#define SYMCOMP_PIPELINE_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "symcomp/abstraction/dynamics.hpp"
#include "symcomp/abstraction/grid.hpp"
#include "symcomp/barrier/barrier.hpp"

namespace symcomp {

/* dynamics as they appear in scenario files (decoupled per agent) */
struct DynamicsSpec {
  enum class Kind { translation, affine };
  Kind kind = Kind::translation;
  std::vector<std::vector<double>> A;  // affine only
  std::vector<std::vector<double>> B;
  std::vector<double> c;

  bool operator==(const DynamicsSpec&) const = default;
};

struct AgentSpec {
  std::string name;
  DynamicsSpec dynamics;
  Box bounds;
  std::vector<double> eta;
  std::vector<std::vector<double>> inputs;
  Box initial;
  std::vector<Box> targets;
  std::vector<Box> obstacles;

  std::size_t state_dim() const noexcept { return eta.size(); }
  bool operator==(const AgentSpec&) const = default;
};

/* agents are 0-based */
struct BarrierSpec {
  std::size_t first = 0;
  std::size_t second = 1;
  double distance = 0;
  double lipschitz = 0;

  bool operator==(const BarrierSpec&) const = default;
};

struct SimulationSpec {
  enum class TieBreak { lowest, random };
  std::size_t steps = 200;
  std::uint64_t seed = 1;
  /* optional fixed start, one state vector per agent */
  std::vector<std::vector<double>> initial_states;
  TieBreak tie_break = TieBreak::lowest;

  bool operator==(const SimulationSpec&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<AgentSpec> agents;
  std::vector<BarrierSpec> barriers;
  double gamma = 0.9;
  SimulationSpec simulation;

  /* throws std::invalid_argument with a field path on semantic errors */
  void validate() const;

  std::size_t composed_dim() const;
  /* offset of agent i inside the composed state vector */
  std::size_t offset_of(std::size_t agent) const;

  bool operator==(const Scenario&) const = default;
};

Grid make_grid(const AgentSpec& agent);
Dynamics make_dynamics(const AgentSpec& agent);
std::vector<BarrierFunction> make_barriers(const Scenario& scenario);

/* labels on an agent's grid */
std::vector<state_id> initial_cells(const Grid& grid, const AgentSpec& agent);
std::vector<state_id> target_cells(const Grid& grid, const AgentSpec& agent);
std::vector<state_id> obstacle_cells(const Grid& grid, const AgentSpec& agent);

/* largest eta component over all agents (eta_max of the composed grid) */
double composed_eta_max(const Scenario& scenario);

}  // namespace symcomp

#endif
