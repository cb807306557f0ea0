#ifndef SYMCOMP_ABSTRACTION_DYNAMICS_HPP
#define SYMCOMP_ABSTRACTION_DYNAMICS_HPP

#include <functional>
#include <span>
#include <vector>

namespace symcomp {

/*
 * class: Dynamics
 *
 * Discrete-time agent x(k+1) = f(x(k), u(k)) with a finite input set.
 *
 * - translation:  f(x,u) = x + u                       (exact reach sets)
 * - affine:       f(x,u) = A x + B u + c               (exact interval hull)
 * - growth_bound: user map f plus a componentwise bound beta with
 *                 |f(x,u) - f(c,u)| <= beta(r, u) whenever |x - c| <= r
 */
class Dynamics {
public:
  enum class Kind { translation, affine, growth_bound };

  using StepFn = std::function<void(std::span<const double> x, std::span<const double> u,
                                    std::span<double> out)>;
  using BoundFn = std::function<void(std::span<const double> radius, std::span<const double> u,
                                     std::span<double> out)>;

  static Dynamics translation(std::size_t dim, std::vector<std::vector<double>> inputs);
  /* A is dim x dim, B is dim x input_dim, both row-major */
  static Dynamics affine(std::size_t dim, std::size_t input_dim, std::vector<double> A,
                         std::vector<double> B, std::vector<double> c,
                         std::vector<std::vector<double>> inputs);
  static Dynamics growth_bound(std::size_t dim, std::size_t input_dim, StepFn step, BoundFn bound,
                               std::vector<std::vector<double>> inputs);

  Kind kind() const noexcept { return kind_; }
  std::size_t state_dim() const noexcept { return dim_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::vector<std::vector<double>>& inputs() const noexcept { return inputs_; }
  std::size_t input_count() const noexcept { return inputs_.size(); }

  const std::vector<double>& A() const noexcept { return A_; }
  const std::vector<double>& B() const noexcept { return B_; }
  const std::vector<double>& offset() const noexcept { return c_; }

  /* one step of the true dynamics */
  void step(std::span<const double> x, std::span<const double> u, std::span<double> out) const;
  std::vector<double> step(std::span<const double> x, std::span<const double> u) const;

  /* componentwise growth bound of a radius; only for growth_bound */
  void bound(std::span<const double> radius, std::span<const double> u,
             std::span<double> out) const;

private:
  Dynamics() = default;

  Kind kind_ = Kind::translation;
  std::size_t dim_ = 0;
  std::size_t input_dim_ = 0;
  std::vector<double> A_, B_, c_;
  StepFn step_;
  BoundFn bound_;
  std::vector<std::vector<double>> inputs_;
};

}  // namespace symcomp

#endif
