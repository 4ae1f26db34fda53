#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace npf {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a simulated trajectory leaves the numerically sane region.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Raised when every weight of a particle system is zero.
class DegenerateWeightsError : public std::runtime_error {
 public:
  DegenerateWeightsError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A fixed-length real vector tagged with the space it lives in, so that a
/// parameter can not be passed where a state is expected.
template <class Tag>
class Coords {
 public:
  Coords() = default;
  explicit Coords(std::size_t dim, double fill = 0.0) : v_(dim, fill) {}
  explicit Coords(std::vector<double> v) : v_(std::move(v)) {}
  Coords(std::initializer_list<double> v) : v_(v) {}

  std::size_t size() const noexcept { return v_.size(); }
  double& operator[](std::size_t k) { return v_[k]; }
  double operator[](std::size_t k) const { return v_[k]; }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  std::span<double> span() noexcept { return v_; }
  std::span<const double> span() const noexcept { return v_; }
  const std::vector<double>& values() const noexcept { return v_; }

  bool all_finite() const noexcept {
    for (double x : v_) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }

  friend bool operator==(const Coords&, const Coords&) = default;

 private:
  std::vector<double> v_;
};

struct ParamTag {};
struct StateTag {};
struct ObsTag {};

using ParamVector = Coords<ParamTag>;
using StateVector = Coords<StateTag>;
using ObsVector = Coords<ObsTag>;

/// Axis-aligned compact box holding the parameter support.
class SupportBox {
 public:
  SupportBox(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  double lower(std::size_t k) const { return lower_[k]; }
  double upper(std::size_t k) const { return upper_[k]; }
  double width(std::size_t k) const { return upper_[k] - lower_[k]; }
  ParamVector midpoint() const;
  /// Euclidean diameter of the box.
  double diameter() const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Closed-box membership. Throws ContractViolation on dimension mismatch.
bool contains(const SupportBox& box, const ParamVector& theta);

}  // namespace npf
