#ifndef SYMCOMP_CORE_BUDGET_HPP
#define SYMCOMP_CORE_BUDGET_HPP

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace symcomp {

/// Raised by long-running constructions once a Budget is exhausted.
class BudgetExceeded : public std::runtime_error {
public:
  enum class Kind { time, memory };

  BudgetExceeded(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/*
 * Wall-clock deadline plus a cap on the bytes held by transition relations
 * under construction. Both limits are optional. Checks are cooperative: the
 * builders call check_time() periodically and charge() as they grow.
 */
class Budget {
public:
  using clock = std::chrono::steady_clock;

  Budget() = default;

  static Budget with_seconds(double seconds) {
    Budget b;
    b.deadline_ = clock::now() + std::chrono::duration_cast<clock::duration>(
                                     std::chrono::duration<double>(seconds));
    return b;
  }

  Budget& limit_bytes(std::size_t bytes) {
    max_bytes_ = bytes;
    return *this;
  }

  bool has_deadline() const noexcept { return deadline_.has_value(); }

  void check_time() const {
    if (deadline_ && clock::now() >= *deadline_)
      throw BudgetExceeded(BudgetExceeded::Kind::time, "time budget exhausted");
  }

  /* account for bytes that a builder has just allocated */
  void charge(std::size_t bytes) const {
    if (!max_bytes_) return;
    const auto total = used_.fetch_add(bytes, std::memory_order_relaxed) + bytes;
    if (total > *max_bytes_)
      throw BudgetExceeded(BudgetExceeded::Kind::memory,
                           "memory budget exhausted (" + std::to_string(total) +
                               " bytes requested, limit " +
                               std::to_string(*max_bytes_) + ")");
  }

  /* release bytes of an intermediate that has been discarded */
  void refund(std::size_t bytes) const {
    if (max_bytes_) used_.fetch_sub(bytes, std::memory_order_relaxed);
  }

  Budget(const Budget& other)
      : deadline_(other.deadline_), max_bytes_(other.max_bytes_),
        used_(other.used_.load()) {}
  Budget& operator=(const Budget& other) {
    deadline_ = other.deadline_;
    max_bytes_ = other.max_bytes_;
    used_ = other.used_.load();
    return *this;
  }

private:
  std::optional<clock::time_point> deadline_;
  std::optional<std::size_t> max_bytes_;
  mutable std::atomic<std::size_t> used_{0};
};

inline void check_budget(const Budget* budget) {
  if (budget) budget->check_time();
}

}  // namespace symcomp

#endif
