#include "fansmb/dsf.hpp"

#include <algorithm>
#include <limits>
#include <array>

#include "fansmb/error.hpp"

namespace fansmb {

namespace {

double log_sum_exp(const double* v, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

// Shared forward state for one scalar transform, all in log space.
struct DsfState {
  std::size_t k = 0;
  std::array<double, kMaxDsfDim> log_w, a, z, log_sig, log_sig_neg, tmp;
  double log_y = 0.0, log_1my = 0.0, log_d = 0.0;
  bool clamped = false;

  DsfState(double x, std::span<const double> w_raw, std::span<const double> a_raw,
           std::span<const double> b)
      : k(w_raw.size()) {
    if (a_raw.size() != k || b.size() != k || k == 0 || k > kMaxDsfDim)
      throw UsageError("DSF parameter vectors must share a length in [1, 32]");
    const double lse_w = log_sum_exp(w_raw.data(), k);
    for (std::size_t i = 0; i < k; ++i) {
      log_w[i] = w_raw[i] - lse_w;
      a[i] = softplus(a_raw[i]);
      z[i] = a[i] * x + b[i];
      log_sig[i] = log_sigmoid(z[i]);
      log_sig_neg[i] = log_sigmoid(-z[i]);
    }
    for (std::size_t i = 0; i < k; ++i) tmp[i] = log_w[i] + log_sig[i];
    log_y = log_sum_exp(tmp.data(), k);
    for (std::size_t i = 0; i < k; ++i) tmp[i] = log_w[i] + log_sig_neg[i];
    log_1my = log_sum_exp(tmp.data(), k);
    for (std::size_t i = 0; i < k; ++i) tmp[i] = log_w[i] + std::log(a[i]) + log_sig[i] + log_sig_neg[i];
    log_d = log_sum_exp(tmp.data(), k);

    static const double kLogLo = std::log(kDsfClamp);
    static const double kLogHi = std::log1p(-kDsfClamp);
    if (log_y < kLogLo) {
      log_y = kLogLo;
      log_1my = kLogHi;
      clamped = true;
    } else if (log_1my < kLogLo) {
      log_y = kLogHi;
      log_1my = kLogLo;
      clamped = true;
    }
  }
};

}  // namespace

DsfResult dsf_transform(double x, std::span<const double> w_raw, std::span<const double> a_raw,
                        std::span<const double> b) {
  DsfState s(x, w_raw, a_raw, b);
  return {s.log_y - s.log_1my, s.log_d - s.log_y - s.log_1my, s.clamped};
}

double dsf_backward(double x, std::span<const double> w_raw, std::span<const double> a_raw,
                    std::span<const double> b, double grad_u, double grad_logderiv,
                    std::span<double> grad_w_raw, std::span<double> grad_a_raw,
                    std::span<double> grad_b) {
  DsfState s(x, w_raw, a_raw, b);
  const std::size_t k = s.k;
  // u = log y - log(1-y);  logderiv = log D - log y - log(1-y)
  double g_log_y = grad_u - grad_logderiv;
  double g_log_1my = -grad_u - grad_logderiv;
  const double g_log_d = grad_logderiv;
  if (s.clamped) {
    g_log_y = 0.0;
    g_log_1my = 0.0;
  }

  double sum_g_lw = 0.0;
  double grad_x = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double p = std::exp(s.log_w[i] + s.log_sig[i] - s.log_y);
    const double q = std::exp(s.log_w[i] + s.log_sig_neg[i] - s.log_1my);
    const double r = std::exp(s.log_w[i] + std::log(s.a[i]) + s.log_sig[i] + s.log_sig_neg[i] - s.log_d);
    const double sig = std::exp(s.log_sig[i]);

    const double g_lw = g_log_y * p + g_log_1my * q + g_log_d * r;
    s.tmp[i] = g_lw;
    sum_g_lw += g_lw;

    const double g_z = g_log_y * p * (1.0 - sig) - g_log_1my * q * sig + g_log_d * r * (1.0 - 2.0 * sig);
    grad_b[i] += g_z;
    const double g_a = g_z * x + g_log_d * r / s.a[i];
    grad_a_raw[i] += g_a * sigmoid(a_raw[i]);
    grad_x += g_z * s.a[i];
  }
  for (std::size_t i = 0; i < k; ++i) grad_w_raw[i] += s.tmp[i] - std::exp(s.log_w[i]) * sum_g_lw;
  return grad_x;
}

}  // namespace fansmb
