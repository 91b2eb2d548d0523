#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace fansmb {

// Deep sigmoidal flow transformer u = logit(sum_k w_k sigmoid(a_k x + b_k))
// with w = softmax(w_raw), a = softplus(a_raw).

inline constexpr double kDsfClamp = 1e-7;
inline constexpr std::size_t kMaxDsfDim = 32;

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
inline double softplus_inverse(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }
inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}
inline double log_sigmoid(double x) { return -softplus(-x); }

struct DsfResult {
  double u = 0.0;
  double logderiv = 0.0;  // log du/dx
  bool clamped = false;   // inner sum hit the (eps, 1 - eps) guard
};

DsfResult dsf_transform(double x, std::span<const double> w_raw, std::span<const double> a_raw,
                        std::span<const double> b);

// Back-propagates upstream gradients on (u, logderiv). Parameter gradients are
// accumulated (+=) into the output spans; the gradient w.r.t. x is returned.
double dsf_backward(double x, std::span<const double> w_raw, std::span<const double> a_raw,
                    std::span<const double> b, double grad_u, double grad_logderiv,
                    std::span<double> grad_w_raw, std::span<double> grad_a_raw,
                    std::span<double> grad_b);

}  // namespace fansmb
