#pragma once

#include <cmath>

namespace l2disc {

/// Neumaier's variant of Kahan summation.
template <class T>
class BasicCompensatedSum {
 public:
  void add(T v) noexcept {
    const T t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  BasicCompensatedSum& operator+=(T v) noexcept {
    add(v);
    return *this;
  }

  T value() const noexcept { return sum_ + carry_; }

 private:
  T sum_ = 0;
  T carry_ = 0;
};

using CompensatedSum = BasicCompensatedSum<double>;

}  // namespace l2disc
