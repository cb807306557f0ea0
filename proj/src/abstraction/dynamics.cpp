#include "symcomp/abstraction/dynamics.hpp"

#include <stdexcept>
#include <string>

namespace symcomp {

namespace {

void check_inputs(const std::vector<std::vector<double>>& inputs, std::size_t input_dim) {
  if (inputs.empty()) throw std::invalid_argument("dynamics: input set is empty");
  for (std::size_t k = 0; k < inputs.size(); ++k)
    if (inputs[k].size() != input_dim)
      throw std::invalid_argument("dynamics: input " + std::to_string(k) + " has dimension " +
                                  std::to_string(inputs[k].size()) + ", expected " +
                                  std::to_string(input_dim));
}

}  // namespace

Dynamics Dynamics::translation(std::size_t dim, std::vector<std::vector<double>> inputs) {
  if (dim == 0) throw std::invalid_argument("dynamics: zero state dimension");
  check_inputs(inputs, dim);
  Dynamics d;
  d.kind_ = Kind::translation;
  d.dim_ = dim;
  d.input_dim_ = dim;
  d.inputs_ = std::move(inputs);
  return d;
}

Dynamics Dynamics::affine(std::size_t dim, std::size_t input_dim, std::vector<double> A,
                          std::vector<double> B, std::vector<double> c,
                          std::vector<std::vector<double>> inputs) {
  if (dim == 0) throw std::invalid_argument("dynamics: zero state dimension");
  if (A.size() != dim * dim) throw std::invalid_argument("dynamics: A must be dim x dim");
  if (B.size() != dim * input_dim) throw std::invalid_argument("dynamics: B must be dim x input_dim");
  if (c.empty()) c.assign(dim, 0.0);
  if (c.size() != dim) throw std::invalid_argument("dynamics: offset must have dimension dim");
  check_inputs(inputs, input_dim);
  Dynamics d;
  d.kind_ = Kind::affine;
  d.dim_ = dim;
  d.input_dim_ = input_dim;
  d.A_ = std::move(A);
  d.B_ = std::move(B);
  d.c_ = std::move(c);
  d.inputs_ = std::move(inputs);
  return d;
}

Dynamics Dynamics::growth_bound(std::size_t dim, std::size_t input_dim, StepFn step,
                                BoundFn bound, std::vector<std::vector<double>> inputs) {
  if (dim == 0) throw std::invalid_argument("dynamics: zero state dimension");
  if (!step || !bound) throw std::invalid_argument("dynamics: step and bound maps are required");
  check_inputs(inputs, input_dim);
  Dynamics d;
  d.kind_ = Kind::growth_bound;
  d.dim_ = dim;
  d.input_dim_ = input_dim;
  d.step_ = std::move(step);
  d.bound_ = std::move(bound);
  d.inputs_ = std::move(inputs);
  return d;
}

void Dynamics::step(std::span<const double> x, std::span<const double> u,
                    std::span<double> out) const {
  switch (kind_) {
    case Kind::translation:
      for (std::size_t q = 0; q < dim_; ++q) out[q] = x[q] + u[q];
      return;
    case Kind::affine:
      for (std::size_t q = 0; q < dim_; ++q) {
        double v = c_[q];
        for (std::size_t j = 0; j < dim_; ++j) v += A_[q * dim_ + j] * x[j];
        for (std::size_t j = 0; j < input_dim_; ++j) v += B_[q * input_dim_ + j] * u[j];
        out[q] = v;
      }
      return;
    case Kind::growth_bound:
      step_(x, u, out);
      return;
  }
}

std::vector<double> Dynamics::step(std::span<const double> x, std::span<const double> u) const {
  std::vector<double> out(dim_);
  step(x, u, out);
  return out;
}

void Dynamics::bound(std::span<const double> radius, std::span<const double> u,
                     std::span<double> out) const {
  if (kind_ != Kind::growth_bound) throw std::logic_error("dynamics: no growth bound for this kind");
  bound_(radius, u, out);
}

}  // namespace symcomp
