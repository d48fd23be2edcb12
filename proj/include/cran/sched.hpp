// SPDX-License-Identifier: Apache-2.0
//
// Rate allocation under a sum-complexity budget:
//   continuous_waterfill  optimum of the quadratic surrogate (water-filling)
//   swf_discrete          greedy MCS reduction by required water level
//   scc                   greedy MCS reduction by complexity
//   mrs                   max feasible MCS, budget ignored

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cran/complexity.hpp"
#include "cran/mcs.hpp"

namespace cran {

struct UserChannel {
  std::uint32_t user_id = 0;
  double sinr = 0.0;  // linear
};

struct UserRate {
  std::uint32_t user_id = 0;
  McsIndex mcs;
  double rate = 0.0;
  double complexity = 0.0;
};

struct RateAllocation {
  std::vector<UserRate> users;
  double sum_rate = 0.0;
  double sum_complexity = 0.0;
  double budget = std::numeric_limits<double>::infinity();
};

/// Highest table entry the user may be assigned: threshold met and the rate
/// strictly inside capacity (only binds for tables built with nu < 1).
inline McsIndex feasible_index(const McsTable& table, double sinr) {
  McsIndex idx = table.max_feasible_index(sinr);
  while (idx && !(gap(sinr, table.rate(idx)) >= kMinGap)) idx = McsTable::next_lower(idx);
  return idx;
}

/// Assembles an allocation and its model complexities for the given MCS choice.
inline RateAllocation evaluate_allocation(std::span<const UserChannel> users, const McsTable& table,
                                          const ModelParams& params, std::span<const McsIndex> mcs,
                                          double budget) {
  RateAllocation out;
  out.budget = budget;
  out.users.reserve(users.size());
  for (std::size_t k = 0; k < users.size(); ++k) {
    UserRate u;
    u.user_id = users[k].user_id;
    u.mcs = mcs[k];
    u.rate = table.rate(mcs[k]);
    u.complexity = decode_complexity(params, users[k].sinr, u.rate);
    out.sum_rate += u.rate;
    out.sum_complexity += u.complexity;
    out.users.push_back(u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Continuous water-filling

struct ContinuousSolution {
  std::vector<double> rates;
  /// 1/eta. +inf when the budget is slack (eta = 0).
  std::optional<double> water_level;
  std::optional<double> eta;
  double sum_complexity = 0.0;  // under the quadratic surrogate
};

/// sqrt(4 quad_alpha C + quad_beta^2): the water level at which the
/// continuous rate consumes exactly C.
inline double required_water_level(const LinearizationCoeffs& c, double complexity) {
  const double radicand = 4.0 * c.quad_alpha * complexity + c.quad_beta * c.quad_beta;
  if (radicand < 0.0) throw std::domain_error("required_water_level: negative radicand");
  return std::sqrt(radicand);
}

/// Literal zero-rate condition sqrt(4 alpha C + beta^2) >= beta. Holds for
/// every C >= 0, so schedulers only apply it when asked.
inline bool drop_predicate(const LinearizationCoeffs& c, double complexity) {
  return required_water_level(c, complexity) >= c.quad_beta;
}

namespace detail {

inline double waterfill_rate(const LinearizationCoeffs& c, double level, double cap) {
  const double r = (level - c.quad_beta) / (2.0 * c.quad_alpha);
  return std::clamp(r, 0.0, cap);
}

inline double waterfill_sum(std::span<const LinearizationCoeffs> coeffs, std::span<const double> caps,
                            double level) {
  double s = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    s += quadratic_complexity(coeffs[k], waterfill_rate(coeffs[k], level, caps[k]));
  return s;
}

}  // namespace detail

/// Maximizes sum r_k subject to sum (alpha_k r_k^2 + beta_k r_k) <= budget and
/// 0 <= r_k <= cap_k. Bisection on the water level 1/eta.
inline ContinuousSolution continuous_waterfill(std::span<const UserChannel> users,
                                               std::span<const LinearizationCoeffs> coeffs,
                                               double budget, std::span<const double> rate_caps) {
  if (coeffs.size() != users.size() || rate_caps.size() != users.size())
    throw std::invalid_argument("continuous_waterfill: users, coeffs and caps differ in size");
  if (!(budget >= 0.0)) throw std::invalid_argument("continuous_waterfill: budget must be >= 0");
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!(coeffs[k].quad_alpha > 0.0))
      throw std::invalid_argument("continuous_waterfill: quad_alpha must be > 0");
    if (!(rate_caps[k] >= 0.0)) throw std::invalid_argument("continuous_waterfill: negative cap");
  }

  ContinuousSolution sol;
  sol.rates.assign(users.size(), 0.0);
  if (users.empty()) return sol;
  if (budget == 0.0) {
    sol.water_level = 0.0;
    sol.eta = std::numeric_limits<double>::infinity();
    return sol;
  }

  // Level at which every user sits at its cap.
  double top = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    top = std::max(top, 2.0 * coeffs[k].quad_alpha * rate_caps[k] + coeffs[k].quad_beta);

  auto fill = [&](double level) {
    sol.sum_complexity = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      sol.rates[k] = detail::waterfill_rate(coeffs[k], level, rate_caps[k]);
      sol.sum_complexity += quadratic_complexity(coeffs[k], sol.rates[k]);
    }
  };

  if (detail::waterfill_sum(coeffs, rate_caps, top) <= budget) {
    fill(top);
    sol.water_level = std::numeric_limits<double>::infinity();
    sol.eta = 0.0;
    return sol;
  }

  // Sum of the surrogate is non-decreasing in the level and <= 0 at level 0.
  double lo = 0.0, hi = top;
  double level = lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = detail::waterfill_sum(coeffs, rate_caps, mid);
    if (std::abs(s - budget) <= 1e-9 * budget) {
      level = mid;
      break;
    }
    if (s > budget)
      hi = mid;
    else
      lo = mid;
    level = lo;
  }
  fill(level);
  sol.water_level = level;
  sol.eta = 1.0 / level;
  return sol;
}

// ---------------------------------------------------------------------------
// Discrete schedulers

struct SwfOptions {
  /// Zero every user satisfying drop_predicate before the recursion.
  bool drop_prepass = false;
};

namespace detail {

struct DiscreteState {
  std::vector<McsIndex> mcs;
  std::vector<McsIndex> max_mcs;
  std::vector<double> complexity;

  double sum() const { return std::accumulate(complexity.begin(), complexity.end(), 0.0); }
};

inline DiscreteState init_max_rate(std::span<const UserChannel> users, const McsTable& table,
                                   const ModelParams& params) {
  DiscreteState st;
  st.mcs.reserve(users.size());
  st.complexity.reserve(users.size());
  for (const auto& u : users) {
    st.mcs.push_back(feasible_index(table, u.sinr));
    st.complexity.push_back(decode_complexity(params, u.sinr, table.rate(st.mcs.back())));
  }
  st.max_mcs = st.mcs;
  return st;
}

// Water level a user needs at its current rate, coefficients linearized there.
inline double current_water_level(const UserChannel& u, double rate, double complexity,
                                  const ModelParams& params) {
  return required_water_level(linearize(params, u.sinr, rate), complexity);
}

// argmax of score over users that still cost something; ties go to the
// lower user_id. Reducing a user whose clamped complexity is already zero
// frees nothing, so such users are never selected.
template <typename Score>
std::optional<std::size_t> argmax_costly(std::span<const UserChannel> users, const DiscreteState& st,
                                         Score&& score) {
  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < users.size(); ++k) {
    if (!st.mcs[k] || !(st.complexity[k] > 0.0)) continue;
    const double s = score(k);
    if (!best || s > best_score || (s == best_score && users[k].user_id < users[*best].user_id)) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

inline void step_down(DiscreteState& st, std::size_t k, std::span<const UserChannel> users,
                      const McsTable& table, const ModelParams& params) {
  st.mcs[k] = McsTable::next_lower(st.mcs[k]);
  st.complexity[k] = decode_complexity(params, users[k].sinr, table.rate(st.mcs[k]));
}

}  // namespace detail

inline RateAllocation swf_discrete(std::span<const UserChannel> users, const McsTable& table,
                                   const ModelParams& params, double budget, SwfOptions opts = {}) {
  if (!(budget >= 0.0)) throw std::invalid_argument("swf_discrete: budget must be >= 0");
  auto st = detail::init_max_rate(users, table, params);

  if (opts.drop_prepass) {
    for (std::size_t k = 0; k < users.size(); ++k) {
      if (!st.mcs[k]) continue;
      const auto c = linearize(params, users[k].sinr, table.rate(st.mcs[k]));
      if (drop_predicate(c, st.complexity[k])) {
        st.mcs[k].reset();
        st.complexity[k] = 0.0;
      }
    }
  }

  while (st.sum() > budget) {
    const auto k = detail::argmax_costly(users, st, [&](std::size_t i) {
      return detail::current_water_level(users[i], table.rate(st.mcs[i]), st.complexity[i], params);
    });
    if (!k) break;
    detail::step_down(st, *k, users, table, params);
  }

  // Re-admit dropped users into the remaining slack, most demanding first.
  struct Candidate {
    std::size_t k;
    double level;
  };
  std::vector<Candidate> candidates;
  for (std::size_t k = 0; k < users.size(); ++k) {
    if (st.mcs[k] || !st.max_mcs[k]) continue;
    const double r = table.rate(st.max_mcs[k]);
    const double c = decode_complexity(params, users[k].sinr, r);
    candidates.push_back({k, detail::current_water_level(users[k], r, c, params)});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
    if (x.level != y.level) return x.level > y.level;
    return users[x.k].user_id < users[y.k].user_id;
  });
  for (const auto& cand : candidates) {
    const std::size_t k = cand.k;
    st.mcs[k] = st.max_mcs[k];
    st.complexity[k] = decode_complexity(params, users[k].sinr, table.rate(st.mcs[k]));
    if (st.sum() > budget) {
      st.mcs[k].reset();
      st.complexity[k] = 0.0;
    }
  }

  return evaluate_allocation(users, table, params, st.mcs, budget);
}

inline RateAllocation scc(std::span<const UserChannel> users, const McsTable& table,
                          const ModelParams& params, double budget) {
  if (!(budget >= 0.0)) throw std::invalid_argument("scc: budget must be >= 0");
  auto st = detail::init_max_rate(users, table, params);
  while (st.sum() > budget) {
    const auto k = detail::argmax_costly(users, st, [&](std::size_t i) { return st.complexity[i]; });
    if (!k) break;
    detail::step_down(st, *k, users, table, params);
  }
  return evaluate_allocation(users, table, params, st.mcs, budget);
}

inline RateAllocation mrs(std::span<const UserChannel> users, const McsTable& table,
                          const ModelParams& params) {
  const auto st = detail::init_max_rate(users, table, params);
  return evaluate_allocation(users, table, params, st.mcs, std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------------------------

enum class Scheduler { Mrs, Swf, Scc, Unconstrained };

inline constexpr std::string_view scheduler_name(Scheduler s) {
  switch (s) {
    case Scheduler::Mrs: return "MRS";
    case Scheduler::Swf: return "SWF";
    case Scheduler::Scc: return "SCC";
    case Scheduler::Unconstrained: return "unconstrained";
  }
  return "?";
}

inline std::optional<Scheduler> parse_scheduler(std::string_view s) {
  for (auto v : {Scheduler::Mrs, Scheduler::Swf, Scheduler::Scc, Scheduler::Unconstrained}) {
    const auto name = scheduler_name(v);
    if (s.size() == name.size() &&
        std::equal(s.begin(), s.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        }))
      return v;
  }
  return std::nullopt;
}

}  // namespace cran
