#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

#include "robust_t/errors.hpp"

namespace robust_t {

// A non-empty sequence of finite observations. Validation happens once, at
// construction; estimators can then trust the contents.
class Sample {
 public:
  explicit Sample(std::vector<double> values) : values_(std::move(values)) { validate(); }
  Sample(std::initializer_list<double> values) : values_(values) { validate(); }
  explicit Sample(std::span<const double> values) : values_(values.begin(), values.end()) {
    validate();
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

 private:
  void validate() const {
    if (values_.empty()) throw Error(ErrorCode::EmptySample, "sample has no observations");
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "sample contains NaN or infinity");
    }
  }

  std::vector<double> values_;
};

}  // namespace robust_t
