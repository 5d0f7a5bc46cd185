#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace zpcc::nn {

template <class R>
class Adam {
 public:
  explicit Adam(std::size_t size)
      : m_(size, R(0)), v_(size, R(0)) {}

  void step(std::span<R> theta, std::span<const R> grad, double lr) {
    ++t_;
    const double b1c = 1.0 - std::pow(kBeta1, t_);
    const double b2c = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = grad[i];
      m_[i] = static_cast<R>(kBeta1 * m_[i] + (1.0 - kBeta1) * g);
      v_[i] = static_cast<R>(kBeta2 * v_[i] + (1.0 - kBeta2) * g * g);
      const double mh = m_[i] / b1c;
      const double vh = v_[i] / b2c;
      theta[i] -= static_cast<R>(lr * mh / (std::sqrt(vh) + kEps));
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<R> m_, v_;
  int64_t t_ = 0;
};

}  // namespace zpcc::nn
