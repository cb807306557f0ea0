#include "symcomp/pipeline/scenario.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace symcomp {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

void check_box(const Box& box, const Box& bounds, std::size_t dim, const std::string& path) {
  if (box.lower.size() != dim || box.upper.size() != dim)
    fail(path, "dimension must be " + std::to_string(dim));
  for (std::size_t q = 0; q < dim; ++q) {
    if (!(box.lower[q] <= box.upper[q])) fail(path, "lower exceeds upper in dimension " + std::to_string(q));
    if (box.lower[q] < bounds.lower[q] || box.upper[q] > bounds.upper[q])
      fail(path, "region leaves the state bounds");
  }
}

void merge_sorted(std::vector<state_id>& into, const std::vector<state_id>& more) {
  std::vector<state_id> out;
  std::set_union(into.begin(), into.end(), more.begin(), more.end(), std::back_inserter(out));
  into.swap(out);
}

}  // namespace

void Scenario::validate() const {
  if (agents.empty()) fail("agents", "at least one agent is required");
  if (!(gamma > 0 && gamma < 1)) fail("gamma", "must lie in (0,1)");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    const std::string path = "agents[" + std::to_string(i) + "]";
    const std::size_t dim = a.eta.size();
    if (dim == 0) fail(path + ".eta", "must be nonempty");
    for (double e : a.eta)
      if (!(e > 0)) fail(path + ".eta", "entries must be positive");
    if (a.bounds.lower.size() != dim || a.bounds.upper.size() != dim)
      fail(path + ".bounds", "dimension must match eta");
    for (std::size_t q = 0; q < dim; ++q)
      if (!(a.bounds.lower[q] <= a.bounds.upper[q])) fail(path + ".bounds", "lower exceeds upper");
    if (a.inputs.empty()) fail(path + ".inputs", "must be nonempty");
    const std::size_t input_dim =
        a.dynamics.kind == DynamicsSpec::Kind::translation
            ? dim
            : (a.dynamics.B.empty() ? 0 : a.dynamics.B.front().size());
    for (std::size_t k = 0; k < a.inputs.size(); ++k)
      if (a.inputs[k].size() != input_dim)
        fail(path + ".inputs[" + std::to_string(k) + "]", "dimension must be " + std::to_string(input_dim));
    if (a.dynamics.kind == DynamicsSpec::Kind::affine) {
      if (a.dynamics.A.size() != dim) fail(path + ".dynamics.A", "must have " + std::to_string(dim) + " rows");
      for (const auto& row : a.dynamics.A)
        if (row.size() != dim) fail(path + ".dynamics.A", "must be square");
      if (a.dynamics.B.size() != dim) fail(path + ".dynamics.B", "must have " + std::to_string(dim) + " rows");
      for (const auto& row : a.dynamics.B)
        if (row.size() != input_dim) fail(path + ".dynamics.B", "rows must have equal length");
      if (!a.dynamics.c.empty() && a.dynamics.c.size() != dim)
        fail(path + ".dynamics.c", "dimension must be " + std::to_string(dim));
    }
    check_box(a.initial, a.bounds, dim, path + ".initial");
    if (a.targets.empty()) fail(path + ".targets", "at least one target region is required");
    for (std::size_t k = 0; k < a.targets.size(); ++k)
      check_box(a.targets[k], a.bounds, dim, path + ".targets[" + std::to_string(k) + "]");
    for (std::size_t k = 0; k < a.obstacles.size(); ++k)
      check_box(a.obstacles[k], a.bounds, dim, path + ".obstacles[" + std::to_string(k) + "]");
  }
  for (std::size_t k = 0; k < barriers.size(); ++k) {
    const auto& b = barriers[k];
    const std::string path = "barriers[" + std::to_string(k) + "]";
    if (b.first >= agents.size() || b.second >= agents.size())
      fail(path + ".pair", "references a nonexistent agent");
    if (b.first == b.second) fail(path + ".pair", "distinct agents required");
    if (agents[b.first].state_dim() != agents[b.second].state_dim())
      fail(path + ".pair", "agents must have equal state dimension");
    if (!(b.lipschitz > 0)) fail(path + ".lipschitz", "must be positive");
    if (!(b.distance >= 0)) fail(path + ".distance", "must be nonnegative");
  }
  const auto& init = simulation.initial_states;
  if (!init.empty()) {
    if (init.size() != agents.size())
      fail("simulation.initial_states", "need one state per agent");
    for (std::size_t i = 0; i < init.size(); ++i) {
      const std::string path = "simulation.initial_states[" + std::to_string(i) + "]";
      if (init[i].size() != agents[i].state_dim()) fail(path, "dimension mismatch");
      if (!agents[i].bounds.contains(init[i])) fail(path, "outside the agent's state bounds");
    }
  }
}

std::size_t Scenario::composed_dim() const {
  std::size_t n = 0;
  for (const auto& a : agents) n += a.state_dim();
  return n;
}

std::size_t Scenario::offset_of(std::size_t agent) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < agent; ++i) off += agents[i].state_dim();
  return off;
}

Grid make_grid(const AgentSpec& agent) {
  return Grid(agent.bounds.lower, agent.bounds.upper, agent.eta);
}

Dynamics make_dynamics(const AgentSpec& agent) {
  const std::size_t dim = agent.state_dim();
  if (agent.dynamics.kind == DynamicsSpec::Kind::translation)
    return Dynamics::translation(dim, agent.inputs);
  std::vector<double> A, B;
  for (const auto& row : agent.dynamics.A) A.insert(A.end(), row.begin(), row.end());
  for (const auto& row : agent.dynamics.B) B.insert(B.end(), row.begin(), row.end());
  const std::size_t input_dim = agent.dynamics.B.empty() ? 0 : agent.dynamics.B.front().size();
  return Dynamics::affine(dim, input_dim, std::move(A), std::move(B), agent.dynamics.c,
                          agent.inputs);
}

std::vector<BarrierFunction> make_barriers(const Scenario& scenario) {
  std::vector<BarrierFunction> out;
  for (const auto& b : scenario.barriers)
    out.push_back(BarrierFunction::pairwise(b.first, scenario.offset_of(b.first), b.second,
                                            scenario.offset_of(b.second),
                                            scenario.agents[b.first].state_dim(), b.distance,
                                            b.lipschitz));
  return out;
}

std::vector<state_id> initial_cells(const Grid& grid, const AgentSpec& agent) {
  return grid.cells_intersecting(agent.initial);
}

std::vector<state_id> target_cells(const Grid& grid, const AgentSpec& agent) {
  std::vector<state_id> out;
  for (const auto& t : agent.targets) merge_sorted(out, grid.cells_inside(t));
  return out;
}

std::vector<state_id> obstacle_cells(const Grid& grid, const AgentSpec& agent) {
  std::vector<state_id> out;
  for (const auto& o : agent.obstacles) merge_sorted(out, grid.cells_intersecting(o));
  return out;
}

double composed_eta_max(const Scenario& scenario) {
  double m = 0;
  for (const auto& a : scenario.agents)
    for (double e : a.eta) m = std::max(m, e);
  return m;
}

}  // namespace symcomp
