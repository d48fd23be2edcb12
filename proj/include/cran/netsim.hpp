// SPDX-License-Identifier: Apache-2.0
//
// System-level uplink channel generator: base-station layouts, Voronoi cell
// areas, one UE per occupied cell, fractional power control, Rayleigh
// fading and the resulting SINR at each centrally processed RAP.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cran/rng.hpp"
#include "cran/text.hpp"

namespace cran {

struct Point {
  double x = 0.0;  // km
  double y = 0.0;  // km

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Distances below this (10 m) are clamped.
inline constexpr double kMinDistanceKm = 0.01;

struct NetworkLayout {
  std::vector<std::int64_t> bs_ids;  // external ids, as in the layout file
  std::vector<Point> bs_positions;
  Rect arena;
  /// Indices into bs_positions of the centrally processed cells, most
  /// central first.
  std::vector<std::size_t> centralized;

  std::size_t size() const { return bs_positions.size(); }

  void validate() const {
    if (bs_positions.empty()) throw std::invalid_argument("layout has no base stations");
    if (bs_ids.size() != bs_positions.size()) throw std::invalid_argument("layout ids/positions mismatch");
    if (!(arena.area() > 0.0)) throw std::invalid_argument("layout arena has zero area");
    for (const auto& p : bs_positions)
      if (!arena.contains(p)) throw std::invalid_argument("base station outside arena");
    if (centralized.empty()) throw std::invalid_argument("layout has no centralized cells");
    std::set<std::size_t> seen;
    for (auto c : centralized) {
      if (c >= bs_positions.size()) throw std::invalid_argument("centralized index out of range");
      if (!seen.insert(c).second) throw std::invalid_argument("duplicate centralized cell");
    }
  }
};

/// Indices of all base stations sorted by distance to the arena centre
/// (ties by index).
inline std::vector<std::size_t> centrality_order(const NetworkLayout& layout) {
  std::vector<std::size_t> order(layout.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Point c = layout.arena.center();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return distance(layout.bs_positions[a], c) < distance(layout.bs_positions[b], c);
  });
  return order;
}

/// Keeps the n most central of the layout's centralized cells.
inline NetworkLayout with_centralized(NetworkLayout layout, std::size_t n) {
  if (n == 0 || n > layout.centralized.size())
    throw std::invalid_argument("N_c = " + std::to_string(n) + " exceeds the " +
                                std::to_string(layout.centralized.size()) + " centralized cells in the layout");
  const Point c = layout.arena.center();
  auto& ids = layout.centralized;
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return distance(layout.bs_positions[a], c) < distance(layout.bs_positions[b], c);
  });
  ids.resize(n);
  return layout;
}

/// Layout file grammar (one directive per line, `#` starts a comment):
///
///     centralized: <id>[,<id>...]
///     arena: <x0>,<y0>,<x1>,<y1>        (optional)
///     <id>,<x_km>,<y_km>
///
/// Ids are non-negative integers, unique. Without an `arena:` line the arena
/// is the bounding box of the stations padded by 10% of its larger side
/// (at least 1 km).
inline NetworkLayout parse_layout(std::string_view content, const std::string& source = "<layout>") {
  NetworkLayout layout;
  std::vector<std::int64_t> centralized_ids;
  bool have_centralized = false;
  std::optional<Rect> arena;

  std::size_t start = 0;
  int lineno = 0;
  while (start <= content.size()) {
    const auto end = content.find('\n', start);
    const auto raw = content.substr(start, end == std::string_view::npos ? content.npos : end - start);
    start = end == std::string_view::npos ? content.size() + 1 : end + 1;
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon != std::string_view::npos) {
      const auto key = text::trim(line.substr(0, colon));
      const auto value = text::trim(line.substr(colon + 1));
      if (key == "centralized") {
        if (have_centralized) throw std::invalid_argument(where + ": duplicate centralized line");
        have_centralized = true;
        if (!value.empty())
          for (auto tok : text::split(value, ',')) centralized_ids.push_back(text::parse_int(tok, where));
      } else if (key == "arena") {
        const auto f = text::split(value, ',');
        if (f.size() != 4) throw std::invalid_argument(where + ": arena needs x0,y0,x1,y1");
        arena = Rect{text::parse_double(f[0], where), text::parse_double(f[1], where),
                     text::parse_double(f[2], where), text::parse_double(f[3], where)};
      } else {
        throw std::invalid_argument(where + ": unknown directive '" + std::string(key) + "'");
      }
      continue;
    }

    const auto f = text::split(line, ',');
    if (f.size() != 3) throw std::invalid_argument(where + ": expected id,x_km,y_km");
    const auto id = text::parse_int(f[0], where);
    if (id < 0) throw std::invalid_argument(where + ": negative id");
    if (std::find(layout.bs_ids.begin(), layout.bs_ids.end(), id) != layout.bs_ids.end())
      throw std::invalid_argument(where + ": duplicate id " + std::to_string(id));
    layout.bs_ids.push_back(id);
    layout.bs_positions.push_back({text::parse_double(f[1], where), text::parse_double(f[2], where)});
  }

  if (layout.bs_positions.empty()) throw std::invalid_argument(source + ": layout has no base stations");
  if (!have_centralized || centralized_ids.empty())
    throw std::invalid_argument(source + ": missing 'centralized:' line");

  for (auto id : centralized_ids) {
    const auto it = std::find(layout.bs_ids.begin(), layout.bs_ids.end(), id);
    if (it == layout.bs_ids.end())
      throw std::invalid_argument(source + ": centralized id " + std::to_string(id) + " is not a base station");
    layout.centralized.push_back(static_cast<std::size_t>(it - layout.bs_ids.begin()));
  }

  if (arena) {
    layout.arena = *arena;
  } else {
    Rect box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : layout.bs_positions) {
      box.x0 = std::min(box.x0, p.x);
      box.y0 = std::min(box.y0, p.y);
      box.x1 = std::max(box.x1, p.x);
      box.y1 = std::max(box.y1, p.y);
    }
    const double pad = std::max(1.0, 0.1 * std::max(box.width(), box.height()));
    layout.arena = {box.x0 - pad, box.y0 - pad, box.x1 + pad, box.y1 + pad};
  }

  // most central first
  const auto n_central = layout.centralized.size();
  layout = with_centralized(std::move(layout), n_central);
  layout.validate();
  return layout;
}

inline NetworkLayout load_layout(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open layout file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_layout(content, path);
}

inline std::string format_layout(const NetworkLayout& layout) {
  std::string out = "# base stations: id,x_km,y_km\n";
  out += "arena: " + text::format_double(layout.arena.x0) + "," + text::format_double(layout.arena.y0) + "," +
         text::format_double(layout.arena.x1) + "," + text::format_double(layout.arena.y1) + "\n";
  out += "centralized: ";
  for (std::size_t i = 0; i < layout.centralized.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(layout.bs_ids[layout.centralized[i]]);
  }
  out += "\n";
  for (std::size_t i = 0; i < layout.size(); ++i)
    out += std::to_string(layout.bs_ids[i]) + "," + text::format_double(layout.bs_positions[i].x) + "," +
           text::format_double(layout.bs_positions[i].y) + "\n";
  return out;
}

enum class LayoutKind { HexGrid, UniformRandom };

/// Synthetic deployment. The centralized cells are the n_centralized
/// stations nearest the arena centre.
inline NetworkLayout generate_layout(LayoutKind kind, std::size_t n_bs, Rect arena, std::size_t n_centralized,
                                     std::uint64_t seed) {
  if (n_bs == 0) throw std::invalid_argument("generate_layout: n_bs must be >= 1");
  if (n_centralized == 0 || n_centralized > n_bs)
    throw std::invalid_argument("generate_layout: n_centralized must be in [1, n_bs]");
  if (!(arena.area() > 0.0)) throw std::invalid_argument("generate_layout: arena has zero area");

  NetworkLayout layout;
  layout.arena = arena;
  if (kind == LayoutKind::UniformRandom) {
    Rng rng(seed);
    for (std::size_t i = 0; i < n_bs; ++i)
      layout.bs_positions.push_back({rng.uniform(arena.x0, arena.x1), rng.uniform(arena.y0, arena.y1)});
  } else {
    // Offset rows: odd rows shifted right, even rows left, by a quarter pitch.
    const auto cols = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(n_bs) * arena.width() / arena.height())));
    const std::size_t rows = (n_bs + cols - 1) / cols;
    const double dx = arena.width() / static_cast<double>(cols);
    const double dy = arena.height() / static_cast<double>(rows);
    for (std::size_t i = 0; i < n_bs; ++i) {
      const std::size_t r = i / cols, c = i % cols;
      const double shift = (r % 2 == 1 ? 0.25 : -0.25) * dx;
      const double x = std::clamp(arena.x0 + (static_cast<double>(c) + 0.5) * dx + shift, arena.x0, arena.x1);
      layout.bs_positions.push_back({x, arena.y0 + (static_cast<double>(r) + 0.5) * dy});
    }
  }
  layout.bs_ids.resize(n_bs);
  std::iota(layout.bs_ids.begin(), layout.bs_ids.end(), std::int64_t{0});
  auto order = centrality_order(layout);
  order.resize(n_centralized);
  layout.centralized = std::move(order);
  layout.validate();
  return layout;
}

/// Voronoi cells estimated by uniform sampling. The samples double as the
/// pool UEs are drawn from, so every UE lies in its serving cell.
struct CellGeometry {
  std::vector<double> areas;                 // km^2, one per base station
  std::vector<std::vector<Point>> samples;   // per base station
};

inline std::size_t nearest_bs(const NetworkLayout& layout, Point p) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const double dx = layout.bs_positions[i].x - p.x, dy = layout.bs_positions[i].y - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

inline CellGeometry estimate_cell_areas(const NetworkLayout& layout, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 10000) throw std::invalid_argument("estimate_cell_areas: need at least 1e4 samples");
  CellGeometry g;
  g.samples.resize(layout.size());
  Rng rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Point p{rng.uniform(layout.arena.x0, layout.arena.x1), rng.uniform(layout.arena.y0, layout.arena.y1)};
    g.samples[nearest_bs(layout, p)].push_back(p);
  }
  g.areas.resize(layout.size());
  const double total = layout.arena.area();
  for (std::size_t i = 0; i < layout.size(); ++i)
    g.areas[i] = total * static_cast<double>(g.samples[i].size()) / static_cast<double>(n_samples);
  return g;
}

struct PhyParams {
  double pathloss_exponent = 3.7;
  double s = 0.1;           // fractional power-control compensation
  double p0 = 10.0;         // W, received power at unit distance
  double noise_w = 0.1;     // W
  double lambda_density = 1.0;  // UEs per km^2
  /// Also place UEs in non-centralized cells and let them interfere.
  bool background_interference = false;

  void validate() const {
    if (!(pathloss_exponent > 2.0)) throw std::invalid_argument("pathloss_exponent must be > 2");
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("s must be in [0,1]");
    if (!(p0 > 0.0)) throw std::invalid_argument("p0 must be > 0");
    if (!(noise_w > 0.0)) throw std::invalid_argument("noise_w must be > 0");
    if (!(lambda_density > 0.0)) throw std::invalid_argument("lambda must be > 0");
  }

  friend bool operator==(const PhyParams&, const PhyParams&) = default;
};

/// A transmitting UE: where it is, how far from its own BS, and its fading
/// power gain towards each centralized BS.
struct ActiveUe {
  Point position;
  double serving_distance = 0.0;  // km, clamped
  std::vector<double> gains;      // one per centralized cell

  friend bool operator==(const ActiveUe&, const ActiveUe&) = default;
};

struct TrialDraw {
  std::uint64_t seed = 0;
  std::vector<Point> bs;                 // centralized BS positions
  std::vector<std::optional<ActiveUe>> cells;  // per centralized cell
  std::vector<ActiveUe> background;      // UEs of other cells, if enabled

  std::size_t n_active() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); }));
  }

  friend bool operator==(const TrialDraw&, const TrialDraw&) = default;
};

namespace detail {

inline std::optional<ActiveUe> place_ue(Rng& rng, const CellGeometry& geometry, std::size_t bs, Point bs_pos,
                                        double lambda, std::size_t n_gains) {
  const double p_occupied = 1.0 - std::exp(-lambda * geometry.areas[bs]);
  const bool occupied = rng.uniform_open() < p_occupied && !geometry.samples[bs].empty();
  if (!occupied) return std::nullopt;
  ActiveUe ue;
  const auto& pool = geometry.samples[bs];
  ue.position = pool[rng.below(pool.size())];
  ue.serving_distance = std::max(kMinDistanceKm, distance(ue.position, bs_pos));
  ue.gains.resize(n_gains);
  for (auto& h : ue.gains) h = rng.exponential();
  return ue;
}

}  // namespace detail

inline TrialDraw draw_trial(const NetworkLayout& layout, const CellGeometry& geometry, const PhyParams& phy,
                            std::uint64_t seed) {
  if (geometry.areas.size() != layout.size()) throw std::invalid_argument("draw_trial: geometry/layout mismatch");
  Rng rng(seed);
  TrialDraw d;
  d.seed = seed;
  const std::size_t nc = layout.centralized.size();
  d.bs.reserve(nc);
  for (auto c : layout.centralized) d.bs.push_back(layout.bs_positions[c]);
  d.cells.reserve(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const auto bs = layout.centralized[k];
    d.cells.push_back(detail::place_ue(rng, geometry, bs, layout.bs_positions[bs], phy.lambda_density, nc));
  }
  if (phy.background_interference) {
    std::vector<bool> is_central(layout.size(), false);
    for (auto c : layout.centralized) is_central[c] = true;
    for (std::size_t bs = 0; bs < layout.size(); ++bs) {
      if (is_central[bs]) continue;
      if (auto ue = detail::place_ue(rng, geometry, bs, layout.bs_positions[bs], phy.lambda_density, nc))
        d.background.push_back(std::move(*ue));
    }
  }
  return d;
}

/// Linear SINR at centralized cell k. Interference comes from the UEs of the
/// other occupied centralized cells (plus background UEs when drawn).
inline double uplink_sinr(const TrialDraw& draw, const PhyParams& phy, std::size_t k) {
  if (k >= draw.cells.size() || !draw.cells[k]) throw std::invalid_argument("uplink_sinr: cell is not occupied");
  const double a = phy.pathloss_exponent;
  auto received = [&](const ActiveUe& ue) {
    const double tx = phy.p0 * std::pow(ue.serving_distance, phy.s * a);
    const double d = std::max(kMinDistanceKm, distance(ue.position, draw.bs[k]));
    return tx * ue.gains[k] * std::pow(d, -a);
  };
  const auto& own = *draw.cells[k];
  const double signal = phy.p0 * std::pow(own.serving_distance, phy.s * a) * own.gains[k] *
                        std::pow(own.serving_distance, -a);
  double interference = 0.0;
  for (std::size_t i = 0; i < draw.cells.size(); ++i)
    if (i != k && draw.cells[i]) interference += received(*draw.cells[i]);
  for (const auto& ue : draw.background) interference += received(ue);
  return signal / (phy.noise_w + interference);
}

}  // namespace cran
