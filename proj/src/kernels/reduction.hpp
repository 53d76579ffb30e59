#pragma once

// Shared pieces of the kernel variants: compensated block combination and the
// trigonometric recurrence state of the Fourier sweep.

#include <cmath>
#include <cstddef>
#include <vector>

namespace exactsel::kernels {

class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Restart the three-term recurrence from directly evaluated values every
// kReseedPeriod frequencies; the recurrence error grows with the step count.
inline constexpr int kReseedPeriod = 32;

struct FourierState {
  explicit FourierState(std::size_t n)
      : two_cos(n), c_prev(n), c_cur(n), s_prev(n), s_cur(n) {}

  static bool needs_reseed(int l) { return (l - 1) % kReseedPeriod == 0; }

  void reseed(const double* theta, int l) {
    for (std::size_t i = 0; i < c_cur.size(); ++i) {
      if (l == 1) two_cos[i] = 2.0 * std::cos(theta[i]);
      c_cur[i] = std::cos(l * theta[i]);
      s_cur[i] = std::sin(l * theta[i]);
      c_prev[i] = std::cos((l - 1) * theta[i]);
      s_prev[i] = std::sin((l - 1) * theta[i]);
    }
  }

  std::vector<double> two_cos, c_prev, c_cur, s_prev, s_cur;
};

}  // namespace exactsel::kernels
