// SPDX-License-Identifier: Apache-2.0
//
// Turbo-decoding complexity model: bit-iterations per channel use as a
// function of SINR and allocated rate, plus its local quadratic surrogate.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cran {

/// Smallest admissible capacity-minus-rate gap. Closer to capacity the
/// iteration term diverges, so operations refuse rather than return inf.
inline constexpr double kMinGap = 1e-9;

/// Converts a power ratio in dB to linear scale.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Constants of the complexity model and the link-level operating point.
struct ModelParams {
  double k_prime = 0.2;       // fitted model constant
  double zeta = 6.0;          // decoder graph connectivity, > 2
  double nu = db_to_linear(0.2);  // capacity-gap factor, linear
  double eps_channel = 0.1;   // channel outage target, (0,1)
  int l_max = 8;              // maximum decoder iterations

  void validate() const {
    if (!(zeta > 2.0)) throw std::invalid_argument("zeta must be > 2");
    if (!(k_prime > 0.0)) throw std::invalid_argument("k_prime must be > 0");
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
    if (!(eps_channel > 0.0 && eps_channel < 1.0))
      throw std::invalid_argument("eps_channel must be in (0,1)");
    if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// K(eps) = -K' / log10(eps).
inline double k_of_epsilon(const ModelParams& p) {
  if (!(p.eps_channel > 0.0 && p.eps_channel < 1.0))
    throw std::domain_error("k_of_epsilon: eps_channel must be in (0,1), got " +
                            std::to_string(p.eps_channel));
  return -p.k_prime / std::log10(p.eps_channel);
}

/// Capacity minus rate, log2(1+sinr) - rate. May be non-positive.
inline double gap(double sinr, double rate) { return std::log2(1.0 + sinr) - rate; }

namespace detail {

inline double log2_zeta_minus_1(const ModelParams& p) { return std::log2(p.zeta - 1.0); }

// log2((zeta-2) / (K zeta)), the rate-independent part of the bracket.
inline double bracket_offset(const ModelParams& p) {
  return std::log2((p.zeta - 2.0) / (k_of_epsilon(p) * p.zeta));
}

inline double checked_gap(double sinr, double rate, const char* who) {
  if (!(sinr > 0.0))
    throw std::domain_error(std::string(who) + ": sinr must be > 0");
  const double g = gap(sinr, rate);
  if (!(g >= kMinGap))
    throw std::domain_error(std::string(who) + ": rate " + std::to_string(rate) +
                            " is not below capacity " +
                            std::to_string(std::log2(1.0 + sinr)));
  return g;
}

}  // namespace detail

/// Unclamped model value r/log2(zeta-1) * [log2((zeta-2)/(K zeta)) - 2 log2(gap)].
/// Negative far below capacity, where the model is not calibrated.
inline double raw_complexity(const ModelParams& p, double sinr, double rate) {
  if (rate == 0.0) return 0.0;
  if (rate < 0.0) throw std::domain_error("raw_complexity: negative rate");
  const double g = detail::checked_gap(sinr, rate, "raw_complexity");
  return rate / detail::log2_zeta_minus_1(p) *
         (detail::bracket_offset(p) - 2.0 * std::log2(g));
}

/// Bit-iterations per channel use needed to decode `rate` at `sinr`,
/// floored at zero.
inline double decode_complexity(const ModelParams& p, double sinr, double rate) {
  return std::max(0.0, raw_complexity(p, sinr, rate));
}

/// Decoder iterations per information bit (raw, before the zero floor).
inline double iteration_count(const ModelParams& p, double sinr, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("iteration_count: rate must be > 0");
  return raw_complexity(p, sinr, rate) / rate;
}

/// First-order expansion of the iteration term around `expansion_rate` and
/// the resulting quadratic surrogate quad_alpha r^2 + quad_beta r.
struct LinearizationCoeffs {
  double a = 0.0;          // slope of log2(gap) in r, always < 0
  double b = 0.0;          // intercept
  double quad_alpha = 0.0; // > 0
  double quad_beta = 0.0;
  double expansion_rate = 0.0;
  double sinr = 0.0;
};

inline LinearizationCoeffs linearize(const ModelParams& p, double sinr, double expansion_rate) {
  if (!(expansion_rate > 0.0))
    throw std::domain_error("linearize: expansion_rate must be > 0");
  const double g = detail::checked_gap(sinr, expansion_rate, "linearize");
  const double l2z = detail::log2_zeta_minus_1(p);
  LinearizationCoeffs c;
  c.a = -1.0 / (std::log(2.0) * g);
  c.b = std::log2(g) - c.a * expansion_rate;
  c.quad_alpha = -2.0 * c.a / l2z;
  c.quad_beta = (detail::bracket_offset(p) - 2.0 * c.b) / l2z;
  c.expansion_rate = expansion_rate;
  c.sinr = sinr;
  return c;
}

/// Quadratic surrogate. Not clamped; may go negative when quad_beta < 0.
inline double quadratic_complexity(const LinearizationCoeffs& c, double rate) {
  return c.quad_alpha * rate * rate + c.quad_beta * rate;
}

}  // namespace cran
