// SPDX-License-Identifier: Apache-2.0
//
// Result files: per-trial CSV, summary CSV, two-column CDF tables and the
// JSON run manifest. Every file is written to a temporary name and renamed
// into place, so readers never see a partial file.

#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cran/config.hpp"
#include "cran/harness.hpp"
#include "cran/text.hpp"
#include "cran/version.hpp"

namespace cran::io {

namespace fs = std::filesystem;

inline void write_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string trials_csv(const CampaignResult& r) {
  std::string out = "trial,scheduler,sum_rate,sum_complexity,outage,n_active\n";
  out.reserve(r.trials.size() * r.summaries.size() * 48);
  for (const auto& t : r.trials) {
    for (const auto& o : t.results) {
      out += std::to_string(t.trial);
      out += ',';
      out += scheduler_name(o.scheduler);
      out += ',';
      out += text::format_double(o.sum_rate);
      out += ',';
      out += text::format_double(o.sum_complexity);
      out += o.outage ? ",1," : ",0,";
      out += std::to_string(t.n_active);
      out += '\n';
    }
  }
  return out;
}

inline std::string summary_csv(const CampaignResult& r) {
  std::string out = "scheduler,mean_sum_rate,outage_rate,c_server\n";
  for (const auto& s : r.summaries)
    out += std::string(scheduler_name(s.scheduler)) + "," + text::format_double(s.mean_sum_rate) + "," +
           text::format_double(s.outage_rate) + "," + text::format_double(r.c_server) + "\n";
  return out;
}

inline std::string cdf_csv(const std::vector<CdfPoint>& cdf) {
  std::string out = "value,cdf\n";
  for (const auto& p : cdf) out += text::format_double(p.value) + "," + text::format_double(p.fraction) + "\n";
  return out;
}

/// Sweep table: one row per (point, scheduler).
inline std::string sweep_csv(std::string_view x_name, const std::vector<SweepPoint>& points) {
  std::string out = std::string(x_name) + ",scheduler,mean_sum_rate,outage_rate,c_server,relative_loss\n";
  for (const auto& p : points)
    for (const auto& s : p.result.summaries)
      out += text::format_double(p.x) + "," + std::string(scheduler_name(s.scheduler)) + "," +
             text::format_double(s.mean_sum_rate) + "," + text::format_double(s.outage_rate) + "," +
             text::format_double(p.result.c_server) + "," + text::format_double(s.relative_loss) + "\n";
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Writes summary, CDFs and (optionally) per-trial records into dir.
/// Returns the file names written, relative to dir.
inline std::vector<std::string> write_campaign(const fs::path& dir, const CampaignResult& r, bool with_trials) {
  fs::create_directories(dir);
  std::vector<std::string> files;
  if (with_trials) {
    write_atomic(dir / "trials.csv", trials_csv(r));
    files.push_back("trials.csv");
  }
  for (const auto& s : r.summaries) {
    const auto base = "cdf_" + lower(scheduler_name(s.scheduler));
    write_atomic(dir / (base + "_sum_rate.csv"), cdf_csv(s.cdf_sum_rate));
    write_atomic(dir / (base + "_sum_complexity.csv"), cdf_csv(s.cdf_sum_complexity));
    files.push_back(base + "_sum_rate.csv");
    files.push_back(base + "_sum_complexity.csv");
  }
  write_atomic(dir / "summary.csv", summary_csv(r));
  files.push_back("summary.csv");
  return files;
}

inline nlohmann::ordered_json manifest(std::string_view command, const RunConfig& cfg) {
  nlohmann::ordered_json m;
  m["tool"] = "cran-sched";
  m["version"] = CRAN_SCHED_VERSION;
  m["command"] = std::string(command);
  m["seed"] = cfg.seed;
  auto& c = m["config"];
  c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_entries(cfg)) c[k] = v;
  return m;
}

/// Rebuilds the run configuration recorded in a manifest.
inline RunConfig config_from_manifest(const nlohmann::ordered_json& m) {
  std::string text;
  for (const auto& [k, v] : m.at("config").items()) text += k + " = " + v.get<std::string>() + "\n";
  return parse_config_text(text, "<manifest>");
}

inline void write_manifest(const fs::path& dir, const nlohmann::ordered_json& m) {
  fs::create_directories(dir);
  write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace cran::io
