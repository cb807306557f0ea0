#include "symcomp/barrier/barrier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "symcomp/core/parallel.hpp"

namespace symcomp {

BarrierFunction BarrierFunction::pairwise(std::size_t agent_i, std::size_t offset_i,
                                          std::size_t agent_j, std::size_t offset_j,
                                          std::size_t dim, double distance, double lipschitz) {
  if (agent_i == agent_j) throw std::invalid_argument("pairwise barrier: distinct agents required");
  if (dim == 0) throw std::invalid_argument("pairwise barrier: zero dimension");
  if (!(lipschitz > 0)) throw std::invalid_argument("barrier: Lipschitz constant must be positive");
  BarrierFunction b;
  b.pairwise_ = true;
  b.agent_i_ = agent_i;
  b.agent_j_ = agent_j;
  b.offset_i_ = offset_i;
  b.offset_j_ = offset_j;
  b.dim_ = dim;
  b.distance_ = distance;
  b.lipschitz_ = lipschitz;
  b.name_ = "pair(" + std::to_string(agent_i) + "," + std::to_string(agent_j) + ")";
  return b;
}

BarrierFunction BarrierFunction::field(Field f, double lipschitz, std::string name) {
  if (!f) throw std::invalid_argument("barrier: empty field");
  if (!(lipschitz >= 0)) throw std::invalid_argument("barrier: Lipschitz constant must be >= 0");
  BarrierFunction b;
  b.field_ = std::move(f);
  b.lipschitz_ = lipschitz;
  b.name_ = std::move(name);
  return b;
}

double BarrierFunction::operator()(std::span<const double> x) const {
  if (!pairwise_) return field_(x);
  double d = 0;
  for (std::size_t q = 0; q < dim_; ++q)
    d = std::max(d, std::abs(x[offset_i_ + q] - x[offset_j_ + q]));
  return d - distance_;
}

void SafetyFilterParams::validate() const {
  if (!(gamma > 0 && gamma < 1))
    throw std::invalid_argument("safety filter: gamma must lie in (0,1), got " +
                                std::to_string(gamma));
  if (!(eta_max > 0)) throw std::invalid_argument("safety filter: eta_max must be positive");
}

// ---------------------------------------------------------------------------

double estimate_lipschitz(const BarrierFunction& barrier, const HyperInterval& domain,
                          std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("estimate_lipschitz: need at least 2 samples");
  const std::size_t n = domain.lower.size();
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axis;
  double scale = 0;
  for (std::size_t q = 0; q < n; ++q) {
    axis.emplace_back(domain.lower[q], domain.upper[q]);
    scale = std::max(scale, domain.upper[q] - domain.lower[q]);
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::vector<double> x(n), y(n);
  double best = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t q = 0; q < n; ++q) x[q] = axis[q](rng);
    if (s % 2 == 0) {
      for (std::size_t q = 0; q < n; ++q) y[q] = axis[q](rng);
    } else {
      for (std::size_t q = 0; q < n; ++q) y[q] = x[q] + 1e-3 * scale * unit(rng);
    }
    double dist = 0;
    for (std::size_t q = 0; q < n; ++q) dist = std::max(dist, std::abs(x[q] - y[q]));
    if (dist == 0) continue;
    const double quotient = std::abs(barrier(x) - barrier(y)) / dist;
    if (quotient > best) {
      best = quotient;
      /* relative slack only absorbs rounding in the quotient itself */
      if (quotient > barrier.lipschitz() * (1 + 1e-9)) {
        std::ostringstream msg;
        msg << "barrier " << barrier.name() << ": sampled Lipschitz quotient " << quotient
            << " exceeds declared " << barrier.lipschitz() << " at witness pair x=(";
        for (std::size_t q = 0; q < n; ++q) msg << (q ? "," : "") << x[q];
        msg << "), y=(";
        for (std::size_t q = 0; q < n; ++q) msg << (q ? "," : "") << y[q];
        msg << ")";
        throw LipschitzViolation(msg.str(), x, y, quotient);
      }
    }
  }
  return best;
}

double safe_set_margin(const BarrierFunction& barrier, std::span<const double> center,
                       double eta_max) {
  return barrier(center) - barrier.lipschitz() * eta_max / 2;
}

namespace {

void require_centers(const TransitionSystem& system) {
  if (!system.has_centers())
    throw std::invalid_argument("barrier: system states carry no center coordinates");
}

/* values[b][x] = B_b(c_x) */
std::vector<std::vector<double>> center_values(const TransitionSystem& system,
                                               const std::vector<BarrierFunction>& barriers) {
  std::vector<std::vector<double>> values(barriers.size(),
                                          std::vector<double>(system.state_count()));
  for (std::size_t b = 0; b < barriers.size(); ++b)
    for (state_id x = 0; x < system.state_count(); ++x)
      values[b][x] = barriers[b](system.center(x));
  return values;
}

}  // namespace

std::vector<SafeSetClass> classify_safe_set(const TransitionSystem& system,
                                            const std::vector<BarrierFunction>& barriers,
                                            double eta_max) {
  require_centers(system);
  std::vector<SafeSetClass> out(system.state_count(), SafeSetClass::interior);
  for (const auto& barrier : barriers) {
    const double margin = barrier.lipschitz() * eta_max / 2;
    for (state_id x = 0; x < system.state_count(); ++x) {
      const double v = barrier(system.center(x)) - margin;
      if (v < 0)
        out[x] = SafeSetClass::outside;
      else if (v == 0 && out[x] == SafeSetClass::interior)
        out[x] = SafeSetClass::boundary;
    }
  }
  return out;
}

std::vector<state_id> symbolic_safe_set(const TransitionSystem& system,
                                        const std::vector<BarrierFunction>& barriers,
                                        double eta_max) {
  const auto cls = classify_safe_set(system, barriers, eta_max);
  std::vector<state_id> safe;
  for (state_id x = 0; x < cls.size(); ++x)
    if (cls[x] != SafeSetClass::outside) safe.push_back(x);
  return safe;
}

Controller safety_controller(const TransitionSystem& system,
                             const std::vector<BarrierFunction>& barriers,
                             const SafetyFilterParams& params, std::size_t threads) {
  params.validate();
  require_centers(system);
  const std::size_t n = system.state_count();
  const auto values = center_values(system, barriers);
  std::vector<double> margin(barriers.size());
  for (std::size_t b = 0; b < barriers.size(); ++b)
    margin[b] = barriers[b].lipschitz() * params.eta_max / 2;

  /*
   * Written as B(c') - B(c) >= -(gamma * r) with r = B(c) - margin >= 0:
   * the right side is monotone in gamma under rounding, so the containment
   * between gammas holds exactly in floating point too.
   */
  auto allowed_at = [&](state_id x, std::vector<input_id>& out) {
    out.clear();
    std::vector<double> floor(barriers.size());
    for (std::size_t b = 0; b < barriers.size(); ++b) {
      const double r = values[b][x] - margin[b];
      if (r < 0) return;
      floor[b] = -(params.gamma * r);
    }
    for (pair_id p = system.pair_begin(x); p < system.pair_end(x); ++p) {
      bool ok = true;
      for (std::size_t b = 0; b < barriers.size() && ok; ++b)
        for (state_id y : system.successors(p))
          if (!(values[b][y] - values[b][x] >= floor[b])) {
            ok = false;
            break;
          }
      if (ok) out.push_back(system.pair_input(p));
    }
  };

  threads = resolve_threads(threads);
  const std::size_t chunks = n < 4096 ? 1 : threads;
  struct Part {
    std::vector<std::uint32_t> offsets{0};
    std::vector<input_id> inputs;
  };
  std::vector<Part> parts(std::max<std::size_t>(chunks, 1));
  for_each_chunk(n, chunks, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<input_id> buf;
    for (std::size_t x = begin; x < end; ++x) {
      allowed_at(static_cast<state_id>(x), buf);
      parts[c].inputs.insert(parts[c].inputs.end(), buf.begin(), buf.end());
      parts[c].offsets.push_back(static_cast<std::uint32_t>(parts[c].inputs.size()));
    }
  });

  Controller::Builder builder(n, system.input_count());
  state_id x = 0;
  for (const auto& part : parts)
    for (std::size_t k = 0; k + 1 < part.offsets.size(); ++k, ++x)
      builder.set(x, std::span<const input_id>(part.inputs.data() + part.offsets[k],
                                               part.offsets[k + 1] - part.offsets[k]));
  return std::move(builder).build();
}

std::size_t allowed_transitions(const TransitionSystem& system, const Controller& controller) {
  std::size_t total = 0;
  for (state_id x : controller.domain())
    for (input_id u : controller.allowed(x)) total += system.successors(x, u).size();
  return total;
}

// ---------------------------------------------------------------------------

bool SweepReport::counts_monotone() const {
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].allowed_transitions < rows[k - 1].allowed_transitions ||
        rows[k].domain_size < rows[k - 1].domain_size)
      return false;
  return true;
}

SweepReport gamma_sweep(const TransitionSystem& system,
                        const std::vector<BarrierFunction>& barriers,
                        const std::vector<double>& gammas, double eta_max, std::size_t threads) {
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    SafetyFilterParams{gammas[k], eta_max}.validate();
    if (k > 0 && gammas[k] < gammas[k - 1])
      throw std::invalid_argument("gamma sweep: gammas must be sorted ascending");
  }
  SweepReport report;
  Controller previous;
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Controller current = safety_controller(system, barriers, {gammas[k], eta_max}, threads);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back({gammas[k], current.domain().size(),
                           allowed_transitions(system, current), seconds});
    if (k > 0) {
      for (state_id x : previous.domain()) {
        const auto hi = current.allowed(x);
        for (input_id u : previous.allowed(x))
          if (!std::binary_search(hi.begin(), hi.end(), u))
            report.violations.push_back({gammas[k - 1], gammas[k], x, u});
      }
    }
    previous = std::move(current);
  }
  return report;
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "gamma,domain_size,allowed_transitions,synthesis_seconds\n";
  char buf[128];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%zu,%zu,%.3f\n", row.gamma, row.domain_size,
                  row.allowed_transitions, row.seconds);
    os << buf;
  }
}

}  // namespace symcomp
