#ifndef SYMCOMP_BARRIER_BARRIER_HPP
#define SYMCOMP_BARRIER_BARRIER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcomp/abstraction/grid.hpp"
#include "symcomp/core/controller.hpp"
#include "symcomp/core/transition_system.hpp"

namespace symcomp {

/*
 * class: BarrierFunction
 *
 * Scalar field B over the composed state with a declared global Lipschitz
 * constant L (infinity norm). The safe set is { x | B(x) >= 0 }.
 *
 * The pairwise form is B(x) = ||x_i - x_j||_inf - d_ij, where x_i is the
 * slice [offset_i, offset_i + dim) of the composed state vector.
 */
class BarrierFunction {
public:
  using Field = std::function<double(std::span<const double>)>;

  static BarrierFunction pairwise(std::size_t agent_i, std::size_t offset_i, std::size_t agent_j,
                                  std::size_t offset_j, std::size_t dim, double distance,
                                  double lipschitz);
  static BarrierFunction field(Field f, double lipschitz, std::string name = "field");

  double operator()(std::span<const double> x) const;
  double lipschitz() const noexcept { return lipschitz_; }
  const std::string& name() const noexcept { return name_; }

  bool is_pairwise() const noexcept { return pairwise_; }
  std::size_t agent_i() const noexcept { return agent_i_; }
  std::size_t agent_j() const noexcept { return agent_j_; }
  double distance() const noexcept { return distance_; }

private:
  BarrierFunction() = default;

  bool pairwise_ = false;
  std::size_t agent_i_ = 0, agent_j_ = 0, offset_i_ = 0, offset_j_ = 0, dim_ = 0;
  double distance_ = 0;
  Field field_;
  double lipschitz_ = 0;
  std::string name_;
};

/* linear class-K∞ map alpha(r) = gamma * r, 0 < gamma < 1 */
struct SafetyFilterParams {
  double gamma = 0.9;
  double eta_max = 1.0;

  void validate() const;
};

class LipschitzViolation : public std::runtime_error {
public:
  LipschitzViolation(const std::string& what, std::vector<double> x, std::vector<double> y,
                     double quotient)
      : std::runtime_error(what), x(std::move(x)), y(std::move(y)), quotient(quotient) {}

  std::vector<double> x, y;
  double quotient;
};

/*
 * Largest sampled |B(x)-B(y)| / ||x-y||_inf over `samples` random pairs in
 * the box (half drawn independently, half as small perturbations). Throws
 * LipschitzViolation naming the witness pair if it exceeds the declared L.
 */
double estimate_lipschitz(const BarrierFunction& barrier, const HyperInterval& domain,
                          std::size_t samples, std::uint64_t seed);

/* B(c) - L * eta_max / 2 for one barrier at one center */
double safe_set_margin(const BarrierFunction& barrier, std::span<const double> center,
                       double eta_max);

/* Ŝ: states whose center clears every barrier's margin (sorted) */
std::vector<state_id> symbolic_safe_set(const TransitionSystem& system,
                                        const std::vector<BarrierFunction>& barriers,
                                        double eta_max);

enum class SafeSetClass : std::uint8_t { outside, boundary, interior };

/* interior: every margin > 0; boundary: in Ŝ with some margin == 0 */
std::vector<SafeSetClass> classify_safe_set(const TransitionSystem& system,
                                            const std::vector<BarrierFunction>& barriers,
                                            double eta_max);

/*
 * CBF safety filter. For x in Ŝ, u is allowed iff for every barrier and
 * every successor x': B(c_x') - B(c_x) >= -gamma (B(c_x) - L eta_max / 2).
 */
Controller safety_controller(const TransitionSystem& system,
                             const std::vector<BarrierFunction>& barriers,
                             const SafetyFilterParams& params, std::size_t threads = 1);

/* Σ_x Σ_{u ∈ C(x)} |F(x,u)| */
std::size_t allowed_transitions(const TransitionSystem& system, const Controller& controller);

struct SweepRow {
  double gamma;
  std::size_t domain_size;
  std::size_t allowed_transitions;
  double seconds;
};

struct ContainmentViolation {
  double gamma_low, gamma_high;
  state_id state;
  input_id input;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<ContainmentViolation> violations;

  bool containment_holds() const noexcept { return violations.empty(); }
  bool counts_monotone() const;
};

/*
 * Run safety_controller for each gamma (ascending) and check the exact
 * containment allowed_{gamma_k}(x) ⊆ allowed_{gamma_k+1}(x) at every state.
 */
SweepReport gamma_sweep(const TransitionSystem& system,
                        const std::vector<BarrierFunction>& barriers,
                        const std::vector<double>& gammas, double eta_max,
                        std::size_t threads = 1);

/* gamma,domain_size,allowed_transitions,synthesis_seconds */
void write_sweep_csv(std::ostream& os, const SweepReport& report);

}  // namespace symcomp

#endif
