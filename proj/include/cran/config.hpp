// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` run configuration. Unset keys take the reference
// system-level defaults; unknown keys are rejected.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cran/harness.hpp"
#include "cran/text.hpp"

namespace cran {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verbosity { Quiet, Info, Debug };

struct RunConfig {
  // experiment
  std::vector<Scheduler> schedulers{Scheduler::Mrs, Scheduler::Swf, Scheduler::Scc, Scheduler::Unconstrained};
  std::uint64_t n_trials = 100000;
  std::uint64_t calibration_trials = 100000;
  std::optional<double> epsilon;   // defaults to 0.1 unless c_server is set
  std::optional<double> c_server;
  std::uint64_t seed = 1;

  // complexity model / MCS
  double k_prime = 0.2;
  double zeta = 6.0;
  double nu_db = 0.2;
  double eps_channel = 0.1;
  std::int64_t l_max = 8;
  std::uint64_t n_r = kDefaultMcsLevels;
  std::string mcs_file;
  bool swf_drop_prepass = false;

  // radio
  double lambda = 1.0;
  double pathloss_exponent = 3.7;
  double s = 0.1;
  double p0_w = 10.0;
  double noise_w = 0.1;
  bool background_interference = false;

  // layout
  std::string layout_file;
  LayoutKind layout_kind = LayoutKind::UniformRandom;
  std::uint64_t n_bs = 129;
  double arena_km = 30.0;
  std::optional<std::uint64_t> n_c;  // 10 for generated layouts, all declared for files
  std::uint64_t layout_seed = 42;
  std::uint64_t area_samples = 200000;

  // sweeps
  std::vector<std::uint64_t> nc_values{2, 4, 6, 8, 10};
  std::vector<double> lambda_values{0.5, 1.0, 2.0, 4.0};
  double reference_lambda = 0.5;

  // runtime
  std::uint64_t workers = 1;
  Verbosity verbosity = Verbosity::Info;
  bool write_trials = true;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  double target_outage() const { return epsilon.value_or(0.1); }

  ModelParams model() const {
    ModelParams p;
    p.k_prime = k_prime;
    p.zeta = zeta;
    p.nu = db_to_linear(nu_db);
    p.eps_channel = eps_channel;
    p.l_max = static_cast<int>(l_max);
    return p;
  }

  PhyParams phy() const {
    PhyParams p;
    p.pathloss_exponent = pathloss_exponent;
    p.s = s;
    p.p0 = p0_w;
    p.noise_w = noise_w;
    p.lambda_density = lambda;
    p.background_interference = background_interference;
    return p;
  }

  CampaignConfig campaign() const {
    CampaignConfig c;
    c.schedulers = schedulers;
    c.n_trials = n_trials;
    c.calibration_trials = calibration_trials;
    if (c_server) {
      c.c_server = c_server;
      c.target_outage.reset();
    } else {
      c.target_outage = target_outage();
    }
    c.seed = seed;
    c.workers = static_cast<unsigned>(workers);
    return c;
  }
};

inline std::string_view layout_kind_name(LayoutKind k) {
  return k == LayoutKind::HexGrid ? "hex-grid" : "uniform-random";
}

inline std::string_view verbosity_name(Verbosity v) {
  switch (v) {
    case Verbosity::Quiet: return "quiet";
    case Verbosity::Info: return "info";
    case Verbosity::Debug: return "debug";
  }
  return "info";
}

namespace detail {

// One entry per key: how to read it, how to print it (nullopt = unset).
struct ConfigKey {
  std::string_view name;
  std::function<void(RunConfig&, std::string_view, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

inline bool parse_bool(std::string_view v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where + ": expected true or false, got '" + std::string(v) + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view v, const std::string& where, Parse&& parse) {
  std::vector<T> out;
  for (auto tok : text::split(v, ',')) out.push_back(parse(tok, where));
  return out;
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& xs, Fmt&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out;
}

inline std::string fmt_d(double v) { return text::format_double(v); }
inline std::string fmt_u(std::uint64_t v) { return std::to_string(v); }
inline std::string fmt_b(bool v) { return v ? "true" : "false"; }

#define CRAN_DOUBLE_KEY(key, member)                                                                 \
  ConfigKey {                                                                                         \
    key, [](RunConfig& c, std::string_view v, const std::string& w) { c.member = text::parse_double(v, w); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return fmt_d(c.member); }            \
  }
#define CRAN_UINT_KEY(key, member)                                                                   \
  ConfigKey {                                                                                         \
    key, [](RunConfig& c, std::string_view v, const std::string& w) { c.member = text::parse_uint(v, w); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return fmt_u(c.member); }            \
  }
#define CRAN_BOOL_KEY(key, member)                                                                   \
  ConfigKey {                                                                                         \
    key, [](RunConfig& c, std::string_view v, const std::string& w) { c.member = parse_bool(v, w); }, \
        [](const RunConfig& c) -> std::optional<std::string> { return fmt_b(c.member); }            \
  }
#define CRAN_STRING_KEY(key, member)                                                                 \
  ConfigKey {                                                                                         \
    key, [](RunConfig& c, std::string_view v, const std::string&) { c.member = std::string(v); },   \
        [](const RunConfig& c) -> std::optional<std::string> {                                      \
          if (c.member.empty()) return std::nullopt;                                                \
          return c.member;                                                                          \
        }                                                                                           \
  }

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"schedulers",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         c.schedulers = parse_list<Scheduler>(v, w, [](std::string_view t, const std::string& where) {
           auto s = parse_scheduler(t);
           if (!s)
             throw ConfigError(where + ": unknown scheduler '" + std::string(t) +
                               "' (expected MRS, SWF, SCC or unconstrained)");
           return *s;
         });
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         return join(c.schedulers, [](Scheduler s) { return std::string(scheduler_name(s)); });
       }},
      CRAN_UINT_KEY("n_trials", n_trials),
      CRAN_UINT_KEY("calibration_trials", calibration_trials),
      {"epsilon",
       [](RunConfig& c, std::string_view v, const std::string& w) { c.epsilon = text::parse_double(v, w); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.epsilon) return std::nullopt;
         return fmt_d(*c.epsilon);
       }},
      {"c_server",
       [](RunConfig& c, std::string_view v, const std::string& w) { c.c_server = text::parse_double(v, w); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.c_server) return std::nullopt;
         return fmt_d(*c.c_server);
       }},
      CRAN_UINT_KEY("seed", seed),
      CRAN_DOUBLE_KEY("k_prime", k_prime),
      CRAN_DOUBLE_KEY("zeta", zeta),
      CRAN_DOUBLE_KEY("nu_db", nu_db),
      CRAN_DOUBLE_KEY("eps_channel", eps_channel),
      {"l_max", [](RunConfig& c, std::string_view v, const std::string& w) { c.l_max = text::parse_int(v, w); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.l_max); }},
      CRAN_UINT_KEY("n_r", n_r),
      CRAN_STRING_KEY("mcs_file", mcs_file),
      CRAN_BOOL_KEY("swf_drop_prepass", swf_drop_prepass),
      CRAN_DOUBLE_KEY("lambda", lambda),
      CRAN_DOUBLE_KEY("pathloss_exponent", pathloss_exponent),
      CRAN_DOUBLE_KEY("s", s),
      CRAN_DOUBLE_KEY("p0_w", p0_w),
      CRAN_DOUBLE_KEY("noise_w", noise_w),
      CRAN_BOOL_KEY("background_interference", background_interference),
      CRAN_STRING_KEY("layout_file", layout_file),
      {"layout_kind",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         if (v == "uniform-random")
           c.layout_kind = LayoutKind::UniformRandom;
         else if (v == "hex-grid")
           c.layout_kind = LayoutKind::HexGrid;
         else
           throw ConfigError(w + ": layout_kind must be uniform-random or hex-grid");
       },
       [](const RunConfig& c) -> std::optional<std::string> { return std::string(layout_kind_name(c.layout_kind)); }},
      CRAN_UINT_KEY("n_bs", n_bs),
      CRAN_DOUBLE_KEY("arena_km", arena_km),
      {"n_c", [](RunConfig& c, std::string_view v, const std::string& w) { c.n_c = text::parse_uint(v, w); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.n_c) return std::nullopt;
         return fmt_u(*c.n_c);
       }},
      CRAN_UINT_KEY("layout_seed", layout_seed),
      CRAN_UINT_KEY("area_samples", area_samples),
      {"nc_values",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         c.nc_values = parse_list<std::uint64_t>(v, w, text::parse_uint);
       },
       [](const RunConfig& c) -> std::optional<std::string> { return join(c.nc_values, fmt_u); }},
      {"lambda_values",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         c.lambda_values = parse_list<double>(v, w, text::parse_double);
       },
       [](const RunConfig& c) -> std::optional<std::string> { return join(c.lambda_values, fmt_d); }},
      CRAN_DOUBLE_KEY("reference_lambda", reference_lambda),
      CRAN_UINT_KEY("workers", workers),
      {"verbosity",
       [](RunConfig& c, std::string_view v, const std::string& w) {
         if (v == "quiet")
           c.verbosity = Verbosity::Quiet;
         else if (v == "info")
           c.verbosity = Verbosity::Info;
         else if (v == "debug")
           c.verbosity = Verbosity::Debug;
         else
           throw ConfigError(w + ": verbosity must be quiet, info or debug");
       },
       [](const RunConfig& c) -> std::optional<std::string> { return std::string(verbosity_name(c.verbosity)); }},
      CRAN_BOOL_KEY("write_trials", write_trials),
  };
  return keys;
}

#undef CRAN_DOUBLE_KEY
#undef CRAN_UINT_KEY
#undef CRAN_BOOL_KEY
#undef CRAN_STRING_KEY

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace detail

/// Checks every value against its constraint; messages name the key.
inline void validate(const RunConfig& c) {
  using detail::require;
  require(c.n_trials >= 1, "n_trials must be >= 1");
  require(!(c.epsilon && c.c_server), "set either epsilon or c_server, not both");
  if (c.epsilon) require(*c.epsilon >= 0.0 && *c.epsilon < 1.0, "epsilon must be in [0,1)");
  if (c.c_server) require(*c.c_server >= 0.0, "c_server must be >= 0");
  require(c.calibration_trials >= 1000, "calibration_trials must be >= 1000");
  require(c.k_prime > 0.0, "k_prime must be > 0");
  require(c.zeta > 2.0, "zeta must be > 2");
  require(std::isfinite(c.nu_db), "nu_db must be finite");
  require(c.eps_channel > 0.0 && c.eps_channel < 1.0, "eps_channel must be in (0,1)");
  require(c.l_max >= 1, "l_max must be >= 1");
  require(c.n_r >= 2, "n_r must be >= 2");
  require(c.lambda > 0.0, "lambda must be > 0");
  require(c.pathloss_exponent > 2.0, "pathloss_exponent must be > 2");
  require(c.s >= 0.0 && c.s <= 1.0, "s must be in [0,1]");
  require(c.p0_w > 0.0, "p0_w must be > 0");
  require(c.noise_w > 0.0, "noise_w must be > 0");
  require(c.n_bs >= 1, "n_bs must be >= 1");
  require(c.arena_km > 0.0, "arena_km must be > 0");
  if (c.n_c) require(*c.n_c >= 1, "n_c must be >= 1");
  if (c.layout_file.empty() && c.n_c) require(*c.n_c <= c.n_bs, "n_c must be <= n_bs");
  require(c.area_samples >= 10000, "area_samples must be >= 10000");
  require(!c.nc_values.empty(), "nc_values must not be empty");
  for (auto v : c.nc_values) require(v >= 1, "nc_values entries must be >= 1");
  require(!c.lambda_values.empty(), "lambda_values must not be empty");
  for (auto v : c.lambda_values) require(v > 0.0, "lambda_values entries must be > 0");
  require(c.reference_lambda > 0.0, "reference_lambda must be > 0");
  require(c.workers >= 1, "workers must be >= 1");
  require(!c.schedulers.empty(), "schedulers must not be empty");
}

inline RunConfig parse_config_text(std::string_view content, const std::string& source = "<config>") {
  RunConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  std::size_t start = 0;
  int lineno = 0;
  while (start <= content.size()) {
    const auto end = content.find('\n', start);
    const auto raw = content.substr(start, end == std::string_view::npos ? content.npos : end - start);
    start = end == std::string_view::npos ? content.size() + 1 : end + 1;
    ++lineno;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    const auto& keys = detail::config_keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return k.name == key; });
    if (it == keys.end()) throw ConfigError(where + ": unknown config key '" + std::string(key) + "'");
    if (seen.count(key)) throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    seen.emplace(std::string(key), lineno);
    try {
      it->set(cfg, value, where + " (" + std::string(key) + ")");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  validate(cfg);
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

/// Canonical text form; parse_config_text(format_config(c)) == c.
inline std::string format_config(const RunConfig& c) {
  std::string out;
  for (const auto& k : detail::config_keys())
    if (auto v = k.get(c)) out += std::string(k.name) + " = " + *v + "\n";
  return out;
}

/// key -> value for every set key, in canonical order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : detail::config_keys())
    if (auto v = k.get(c)) out.emplace_back(std::string(k.name), *v);
  return out;
}

/// Materializes layout, cell geometry and MCS table for a configuration.
inline Scenario build_scenario(const RunConfig& c) {
  Scenario sc;
  sc.model = c.model();
  sc.model.validate();
  sc.phy = c.phy();
  sc.phy.validate();
  sc.swf.drop_prepass = c.swf_drop_prepass;
  sc.table = c.mcs_file.empty() ? McsTable(default_rates(c.n_r), sc.model.nu) : load_table(c.mcs_file, sc.model.nu);

  if (!c.layout_file.empty()) {
    if (!std::filesystem::exists(c.layout_file))
      throw ConfigError("layout file does not exist: " + c.layout_file);
    sc.layout = load_layout(c.layout_file);
    if (c.n_c) sc.layout = with_centralized(std::move(sc.layout), *c.n_c);
  } else {
    const auto nc = c.n_c.value_or(10);
    if (nc > c.n_bs) throw ConfigError("n_c must be <= n_bs");
    sc.layout = generate_layout(c.layout_kind, c.n_bs, Rect{0.0, 0.0, c.arena_km, c.arena_km}, nc, c.layout_seed);
  }
  sc.geometry = estimate_cell_areas(sc.layout, c.area_samples, derive_seed(c.layout_seed, Stream::Geometry, 0));
  return sc;
}

}  // namespace cran
