#include "symcomp/core/composition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace symcomp {

ComposedIndex::ComposedIndex(std::vector<std::uint64_t> sizes)
    : sizes_(std::move(sizes)), stride_(sizes_.size(), 1) {
  if (sizes_.empty()) throw std::invalid_argument("composed index needs at least one component");
  total_ = 1;
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    if (sizes_[i] == 0) throw std::invalid_argument("composed index component of size 0");
    stride_[i] = total_;
    if (total_ > std::numeric_limits<std::uint64_t>::max() / sizes_[i])
      throw std::overflow_error("composed index overflows 64 bits");
    total_ *= sizes_[i];
  }
}

std::uint64_t ComposedIndex::encode(std::span<const std::uint32_t> parts) const {
  if (parts.size() != sizes_.size()) throw std::invalid_argument("arity mismatch in encode");
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] >= sizes_[i]) throw std::out_of_range("component index out of range");
    k = k * sizes_[i] + parts[i];
  }
  return k;
}

void ComposedIndex::decode(std::uint64_t k, std::span<std::uint32_t> out) const {
  if (k >= total_) throw std::out_of_range("composed index out of range");
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    out[i] = static_cast<std::uint32_t>(k % sizes_[i]);
    k /= sizes_[i];
  }
}

std::vector<std::uint32_t> ComposedIndex::decode(std::uint64_t k) const {
  std::vector<std::uint32_t> out(sizes_.size());
  decode(k, out);
  return out;
}

// ---------------------------------------------------------------------------

ComposedIndex composed_states(std::span<const TransitionSystem* const> systems) {
  std::vector<std::uint64_t> sizes;
  for (const auto* s : systems) sizes.push_back(s->state_count());
  return ComposedIndex(std::move(sizes));
}

ComposedIndex composed_inputs(std::span<const TransitionSystem* const> systems) {
  std::vector<std::uint64_t> sizes;
  for (const auto* s : systems) sizes.push_back(s->input_count());
  return ComposedIndex(std::move(sizes));
}

TransitionSystem compose(std::span<const TransitionSystem* const> systems, std::size_t threads,
                         const Budget* budget) {
  if (systems.empty()) throw std::invalid_argument("compose: empty list of systems");
  const ComposedIndex states = composed_states(systems);
  const ComposedIndex inputs = composed_inputs(systems);
  if (states.total() >= npos || inputs.total() >= npos)
    throw std::length_error("compose: product exceeds 32-bit index range (" +
                            std::to_string(states.total()) + " states)");
  check_budget(budget);
  const std::size_t n = systems.size();

  /* initial states: product of component initial sets */
  std::vector<state_id> initial;
  {
    bool any_empty = false;
    for (const auto* s : systems) any_empty |= s->initial_states().empty();
    if (!any_empty) {
      std::vector<std::size_t> pos(n, 0);
      std::vector<std::uint32_t> tuple(n);
      while (true) {
        for (std::size_t i = 0; i < n; ++i) tuple[i] = systems[i]->initial_states()[pos[i]];
        initial.push_back(static_cast<state_id>(states.encode(tuple)));
        std::size_t i = n;
        while (i-- > 0) {
          if (++pos[i] < systems[i]->initial_states().size()) break;
          pos[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
    }
  }

  bool with_centers = true;
  std::size_t center_dim = 0;
  for (const auto* s : systems) {
    with_centers &= s->has_centers();
    center_dim += s->center_dim();
  }
  std::vector<double> centers;
  if (with_centers) {
    if (budget) budget->charge(states.total() * center_dim * sizeof(double));
    centers.resize(states.total() * center_dim);
    std::vector<std::uint32_t> parts(n);
    for (std::uint64_t x = 0; x < states.total(); ++x) {
      states.decode(x, parts);
      double* out = centers.data() + x * center_dim;
      for (std::size_t i = 0; i < n; ++i) {
        const auto c = systems[i]->center(parts[i]);
        out = std::copy(c.begin(), c.end(), out);
      }
    }
  } else {
    center_dim = 0;
  }

  auto emit = [&](state_id x, TransitionSystem::Builder& b) {
    std::vector<std::uint32_t> parts(n);
    states.decode(x, parts);
    std::vector<pair_id> pb(n), pe(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      pb[i] = systems[i]->pair_begin(parts[i]);
      pe[i] = systems[i]->pair_end(parts[i]);
      if (pb[i] == pe[i]) return;
      p[i] = pb[i];
    }
    std::vector<std::uint32_t> in(n), sp(n);
    std::vector<std::span<const state_id>> succ(n);
    std::vector<state_id> out;
    /* odometer over component pairs; agent 1 outermost keeps inputs ascending */
    while (true) {
      for (std::size_t i = 0; i < n; ++i) {
        in[i] = systems[i]->pair_input(p[i]);
        succ[i] = systems[i]->successors(p[i]);
        sp[i] = 0;
      }
      out.clear();
      while (true) {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < n; ++i) k = k * states.size(i) + succ[i][sp[i]];
        out.push_back(static_cast<state_id>(k));
        std::size_t i = n;
        while (i-- > 0) {
          if (++sp[i] < succ[i].size()) break;
          sp[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
      b.add_pair(static_cast<input_id>(inputs.encode(in)), out);
      std::size_t i = n;
      while (i-- > 0) {
        if (++p[i] < pe[i]) break;
        p[i] = pb[i];
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  };

  return build_by_state(states.total(), inputs.total(), threads, emit, std::move(initial),
                        center_dim, std::move(centers), budget);
}

TransitionSystem compose(const std::vector<TransitionSystem>& systems, std::size_t threads,
                         const Budget* budget) {
  std::vector<const TransitionSystem*> ptrs;
  for (const auto& s : systems) ptrs.push_back(&s);
  return compose(std::span<const TransitionSystem* const>(ptrs), threads, budget);
}

// ---------------------------------------------------------------------------

state_id RestrictedSystem::index_of(state_id original) const {
  const auto it = std::lower_bound(original_of.begin(), original_of.end(), original);
  if (it == original_of.end() || *it != original) return npos;
  return static_cast<state_id>(it - original_of.begin());
}

RestrictedSystem restrict(const TransitionSystem& system, const Controller& controller,
                          std::size_t threads, const Budget* budget) {
  if (controller.state_count() != system.state_count() ||
      controller.input_count() != system.input_count())
    throw std::invalid_argument("restrict: controller index spaces (" +
                                std::to_string(controller.state_count()) + " states, " +
                                std::to_string(controller.input_count()) +
                                " inputs) do not match system (" +
                                std::to_string(system.state_count()) + " states, " +
                                std::to_string(system.input_count()) + " inputs)");
  const auto& retained = controller.domain();
  if (retained.empty())
    throw EmptyRestriction("empty restriction: controller domain is empty (system has " +
                           std::to_string(system.state_count()) + " states, " +
                           std::to_string(system.pair_count()) + " admissible pairs)");

  std::vector<state_id> new_index(system.state_count(), npos);
  for (std::size_t k = 0; k < retained.size(); ++k) new_index[retained[k]] = static_cast<state_id>(k);

  std::vector<state_id> initial;
  for (state_id x0 : system.initial_states())
    if (new_index[x0] != npos) initial.push_back(new_index[x0]);

  std::vector<double> centers;
  const std::size_t dim = system.center_dim();
  if (dim > 0) {
    centers.reserve(retained.size() * dim);
    for (state_id x : retained) {
      const auto c = system.center(x);
      centers.insert(centers.end(), c.begin(), c.end());
    }
  }

  auto emit = [&](state_id nx, TransitionSystem::Builder& b) {
    const state_id x = retained[nx];
    std::vector<state_id> out;
    for (input_id u : controller.allowed(x)) {
      const auto p = system.find_pair(x, u);
      if (!p) continue;
      out.clear();
      bool inside = true;
      for (state_id y : system.successors(*p)) {
        if (new_index[y] == npos) {
          inside = false;
          break;
        }
        out.push_back(new_index[y]);
      }
      if (inside) b.add_pair(u, out);
    }
  };

  RestrictedSystem r;
  r.system = build_by_state(retained.size(), system.input_count(), threads, emit,
                            std::move(initial), dim, std::move(centers), budget);
  r.original_of = retained;
  return r;
}

}  // namespace symcomp
