#include "symcomp/sim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace symcomp {

Feedback::Feedback(const ComposedLayout& layout, const Controller& controller)
    : layout_(&layout), controller_(&controller) {}

Feedback refine(const ComposedLayout& layout, const Controller& controller) {
  return Feedback(layout, controller);
}

std::optional<std::vector<state_id>> Feedback::quantize(const AgentVectors& x) const {
  if (x.size() != layout_->agents()) throw std::invalid_argument("feedback: one state per agent");
  std::vector<state_id> cells(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = layout_->grids[i].quantize(x[i]);
    if (!c) return std::nullopt;
    cells[i] = *c;
  }
  return cells;
}

std::uint32_t Feedback::target_mask(const AgentVectors& x) const {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = layout_->grids[i].quantize(x[i]);
    if (c && layout_->target[i][*c]) m |= 1u << i;
  }
  return m;
}

Feedback::Lookup Feedback::operator()(const AgentVectors& x, std::uint32_t flags) const {
  const auto cells = quantize(x);
  if (!cells) throw OutsideDomain("outside controller domain: some agent left its grid");
  const state_id s = layout_->system_state(*cells);
  if (s == npos) throw OutsideDomain("outside controller domain: composed cell not in the system");
  const state_id a = augmented_state(s, flags, layout_->agents());
  if (a >= controller_->state_count() || !controller_->in_domain(a))
    throw OutsideDomain("outside controller domain: augmented state " + std::to_string(a));
  return {a, controller_->allowed(a), controller_->progress(a)};
}

AgentVectors Feedback::input_vectors(input_id composed) const {
  const auto parts = layout_->inputs.decode(composed);
  AgentVectors u(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) u[i] = layout_->dynamics[i].inputs()[parts[i]];
  return u;
}

AgentVectors Feedback::step(const AgentVectors& x, const AgentVectors& u) const {
  AgentVectors next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) next[i] = layout_->dynamics[i].step(x[i], u[i]);
  return next;
}

// ---------------------------------------------------------------------------

Trace simulate(const Scenario& scenario, const Feedback& feedback, const AgentVectors& x0,
               const SimulateOptions& options) {
  const auto& layout = feedback.layout();
  if (x0.size() != layout.agents()) throw std::invalid_argument("simulate: one state per agent");
  for (std::size_t i = 0; i < x0.size(); ++i)
    if (!scenario.agents[i].bounds.contains(x0[i]))
      throw std::invalid_argument("simulate: initial state of agent " + std::to_string(i) +
                                  " outside its bounds");

  Trace trace;
  trace.seed = options.seed;
  trace.scenario = scenario.name;
  std::mt19937_64 rng(options.seed);
  const std::uint32_t full = layout.all_flags();

  AgentVectors x = x0;
  std::uint32_t flags = feedback.target_mask(x);
  std::vector<input_id> candidates;
  for (std::size_t k = 0;; ++k) {
    if (flags == full || k == options.steps) {
      trace.steps.push_back({k, x, {}, flags});
      break;
    }
    Feedback::Lookup look;
    try {
      look = feedback(x, flags);
    } catch (const OutsideDomain& e) {
      trace.steps.push_back({k, x, {}, flags});
      trace.failure = "step " + std::to_string(k) + ": " + e.what();
      break;
    }
    candidates.clear();
    for (std::size_t q = 0; q < look.allowed.size(); ++q)
      if (look.progress.empty() || look.progress[q]) candidates.push_back(look.allowed[q]);
    if (candidates.empty()) candidates.assign(look.allowed.begin(), look.allowed.end());

    input_id pick = candidates.front();
    if (options.tie_break == SimulationSpec::TieBreak::random) {
      std::uniform_int_distribution<std::size_t> d(0, candidates.size() - 1);
      pick = candidates[d(rng)];
    }
    auto u = feedback.input_vectors(pick);
    auto next = feedback.step(x, u);
    trace.steps.push_back({k, std::move(x), std::move(u), flags});
    x = std::move(next);
    flags |= feedback.target_mask(x);
  }
  return trace;
}

AgentVectors random_initial_state(const Feedback& feedback, std::mt19937_64& rng) {
  const auto& layout = feedback.layout();
  const auto& ctrl = feedback.controller();
  const std::size_t n = layout.agents();
  std::vector<state_id> consistent;
  for (state_id a : ctrl.domain()) {
    const state_id s = a >> n;
    const std::uint32_t f = a & layout.all_flags();
    if (layout.target_mask(layout.cells_of(s)) == f) consistent.push_back(a);
  }
  if (consistent.empty()) throw OutsideDomain("controller domain has no flag-consistent state");
  std::uniform_int_distribution<std::size_t> pick(0, consistent.size() - 1);
  const auto cells = layout.cells_of(consistent[pick(rng)] >> n);

  AgentVectors x(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& grid = layout.grids[i];
    const auto box = grid.cell_box(cells[i]);
    x[i].resize(box.lower.size());
    for (std::size_t q = 0; q < box.lower.size(); ++q) {
      /* boundary cells stick out of the closed state bounds; clip to them */
      const double lo = std::max(box.lower[q], grid.lower()[q]);
      const double hi = std::min(box.upper[q], grid.upper()[q]);
      double v = lo + unit(rng) * (hi - lo);
      if (v >= box.upper[q]) v = std::nextafter(box.upper[q], lo);
      x[i][q] = v;
    }
  }
  return x;
}

// ---------------------------------------------------------------------------

namespace {

double inf_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t q = 0; q < a.size(); ++q) d = std::max(d, std::abs(a[q] - b[q]));
  return d;
}

void note(TraceVerdict& v, std::size_t k, const std::string& what) {
  if (!v.first_violation || k < *v.first_violation) v.first_violation = k;
  if (v.message.empty()) v.message = what;
}

}  // namespace

TraceVerdict check_trace(const Trace& trace, const Scenario& scenario) {
  TraceVerdict v;
  const std::size_t n = scenario.agents.size();
  std::vector<std::uint8_t> reached(n, 0);
  for (const auto& st : trace.steps) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& agent = scenario.agents[i];
      for (std::size_t o = 0; o < agent.obstacles.size(); ++o)
        if (agent.obstacles[o].contains(st.x[i])) {
          v.obstacles_ok = false;
          note(v, st.k, "step " + std::to_string(st.k) + ": agent " + std::to_string(i) +
                            " inside obstacle " + std::to_string(o));
        }
      for (const auto& t : agent.targets)
        if (t.contains(st.x[i])) reached[i] = 1;
    }
    for (const auto& b : scenario.barriers) {
      const double d = inf_distance(st.x[b.first], st.x[b.second]);
      if (d < b.distance) {
        v.distances_ok = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "step %zu: agents %zu and %zu at distance %.6f < %.6f",
                      st.k, b.first, b.second, d, b.distance);
        note(v, st.k, buf);
      }
    }
  }
  if (!trace.steps.empty())
    for (std::size_t i = 0; i < n; ++i)
      if (!reached[i]) {
        v.targets_ok = false;
        if (v.message.empty()) v.message = "agent " + std::to_string(i) + " never reached a target";
      }
  if (trace.failure) {
    v.complete = false;
    if (v.message.empty()) v.message = "trace cut short: " + *trace.failure;
  }
  return v;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  std::size_t xdim = 0, udim = 0;
  for (const auto& st : trace.steps) {
    for (const auto& x : st.x) xdim = std::max(xdim, x.size());
    for (const auto& u : st.u) udim = std::max(udim, u.size());
  }
  if (udim == 0) udim = xdim;
  os << "k,agent";
  for (std::size_t q = 0; q < xdim; ++q) os << ",x" << q + 1;
  for (std::size_t q = 0; q < udim; ++q) os << ",u" << q + 1;
  os << ",flags\n";
  char buf[64];
  for (const auto& st : trace.steps)
    for (std::size_t i = 0; i < st.x.size(); ++i) {
      os << st.k << ',' << i;
      for (std::size_t q = 0; q < xdim; ++q) {
        os << ',';
        if (q < st.x[i].size()) {
          std::snprintf(buf, sizeof buf, "%.6f", st.x[i][q]);
          os << buf;
        }
      }
      for (std::size_t q = 0; q < udim; ++q) {
        os << ',';
        if (i < st.u.size() && q < st.u[i].size()) {
          std::snprintf(buf, sizeof buf, "%.6f", st.u[i][q]);
          os << buf;
        }
      }
      os << ',' << st.flags << '\n';
    }
}

}  // namespace symcomp
