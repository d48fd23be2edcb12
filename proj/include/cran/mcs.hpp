// SPDX-License-Identifier: Apache-2.0
//
// Discrete modulation-and-coding set. Each entry carries its rate and the
// minimum SINR at which it may be selected, related by r = log2(1 + g/nu).

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cran/complexity.hpp"
#include "cran/text.hpp"

namespace cran {

using McsIndex = std::optional<std::size_t>;

struct McsEntry {
  std::size_t index = 0;
  double rate = 0.0;       // bpcu
  double threshold = 0.0;  // linear SINR
};

class McsTable {
 public:
  McsTable() = default;

  /// Builds a table from strictly increasing positive rates; thresholds are
  /// nu * (2^r - 1).
  McsTable(std::span<const double> rates, double nu) : nu_(nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("McsTable: nu must be > 0");
    if (rates.empty()) throw std::invalid_argument("McsTable: at least one rate is required");
    entries_.reserve(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
      if (!(rates[i] > 0.0) || !std::isfinite(rates[i]))
        throw std::invalid_argument("McsTable: rate " + std::to_string(i) + " must be positive");
      if (i > 0 && !(rates[i] > rates[i - 1]))
        throw std::invalid_argument("McsTable: rates must be strictly increasing (entry " +
                                    std::to_string(i) + ")");
      entries_.push_back({i, rates[i], nu * (std::exp2(rates[i]) - 1.0)});
    }
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double nu() const { return nu_; }
  const std::vector<McsEntry>& entries() const { return entries_; }
  const McsEntry& operator[](std::size_t i) const { return entries_.at(i); }

  double rate(McsIndex i) const { return i ? entries_.at(*i).rate : 0.0; }

  std::vector<double> rates() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.rate);
    return out;
  }

  /// Highest entry whose threshold is <= sinr (inclusive), if any.
  McsIndex max_feasible_index(double sinr) const {
    // thresholds are sorted; binary search for the last one <= sinr
    std::size_t lo = 0, hi = entries_.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (entries_[mid].threshold <= sinr)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == 0) return std::nullopt;
    return lo - 1;
  }

  /// One MCS step down; the lowest entry steps down to "no rate".
  static McsIndex next_lower(McsIndex i) {
    if (!i || *i == 0) return std::nullopt;
    return *i - 1;
  }

 private:
  std::vector<McsEntry> entries_;
  double nu_ = 1.0;
};

inline McsTable build_table(std::span<const double> rates, double nu) { return McsTable(rates, nu); }

/// CQI spectral efficiencies (bits per resource element) of the LTE 4-bit
/// CQI table, indices 1..15.
inline constexpr std::array<double, 15> kLteCqiEfficiency = {
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141,
    2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};

inline constexpr std::size_t kDefaultMcsLevels = 27;

/// n rates spaced uniformly in CQI index from 1 to 15, linearly
/// interpolating the CQI efficiency ladder between its published points.
inline std::vector<double> default_rates(std::size_t n = kDefaultMcsLevels) {
  if (n < 2) throw std::invalid_argument("default_rates: need at least 2 levels");
  std::vector<double> out;
  out.reserve(n);
  const double last = static_cast<double>(kLteCqiEfficiency.size() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = last * static_cast<double>(i) / static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= kLteCqiEfficiency.size()) {
      out.push_back(kLteCqiEfficiency.back());
    } else {
      out.push_back(kLteCqiEfficiency[lo] + frac * (kLteCqiEfficiency[lo + 1] - kLteCqiEfficiency[lo]));
    }
  }
  return out;
}

inline McsTable default_table(const ModelParams& params) {
  const auto rates = default_rates();
  return McsTable(rates, params.nu);
}

/// Reads one rate (bpcu) per line; blank lines and `#` comments ignored.
inline McsTable load_table(const std::string& path, double nu) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MCS table file: " + path);
  std::vector<double> rates;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(text::strip_comment(line));
    if (body.empty()) continue;
    rates.push_back(text::parse_double(body, path + ":" + std::to_string(lineno)));
  }
  if (rates.empty()) throw std::runtime_error("MCS table file has no rates: " + path);
  return McsTable(rates, nu);
}

}  // namespace cran
