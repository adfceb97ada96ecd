// Copyright 2026 The polariq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polariq/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "polariq/config.hpp"

#ifndef POLARIQ_VERSION
#define POLARIQ_VERSION "0.0.0"
#endif

namespace polariq {
namespace {

using nlohmann::json;

std::string pair_label(const char* prefix, int l, int m) {
  return std::string(prefix) + std::to_string(l) + "_" + std::to_string(m);
}

std::string table_stem(const ScenarioConfig& config, const ResultTable& table) {
  const std::string base = to_string(config.kind);
  return table.name.empty() ? base : base + "_" + table.name;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// Small matplotlib script plotting the diagonal g2 of every table against
// the first sweep coordinate.
std::string plot_script(const ScenarioConfig& config, const ScenarioResult& result) {
  std::string files;
  for (const auto& t : result.tables) files += "    \"" + table_stem(config, t) + ".csv\",\n";
  const int modes = result.tables.empty() ? 0 : result.tables.front().num_modes;
  return "#!/usr/bin/env python3\n"
         "import csv\nimport math\nimport sys\n\nimport matplotlib.pyplot as plt\n\n"
         "FILES = [\n" + files + "]\nMODES = " + std::to_string(modes) + "\n\n"
         "def column(rows, name):\n"
         "    return [float(r[name]) if r[name] != \"nan\" else math.nan for r in rows]\n\n"
         "fig, ax = plt.subplots()\n"
         "for path in FILES:\n"
         "    with open(path, newline=\"\") as f:\n"
         "        reader = csv.DictReader(f)\n"
         "        rows = list(reader)\n"
         "    if not rows:\n"
         "        continue\n"
         "    x_name = reader.fieldnames[0]\n"
         "    x = column(rows, x_name)\n"
         "    for l in range(MODES):\n"
         "        ax.plot(x, column(rows, f\"g2_{l}_{l}\"), marker=\".\", label=f\"{path} g2_{l}{l}\")\n"
         "    ax.set_xlabel(x_name)\n"
         "ax.set_ylabel(\"g2\")\nax.legend(fontsize=\"small\")\n"
         "fig.savefig(sys.argv[1] if len(sys.argv) > 1 else \"" + to_string(config.kind) + ".png\", dpi=150)\n";
}

}  // namespace

std::string version_string() { return POLARIQ_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<std::string> csv_header(const ResultTable& t) {
  std::vector<std::string> cols(t.coord_names.begin(), t.coord_names.end());
  cols.insert(cols.end(), t.extra_names.begin(), t.extra_names.end());
  const int L = t.num_modes;
  for (int l = 0; l < L; ++l) cols.push_back("n_" + std::to_string(l));
  for (int l = 0; l < L; ++l) {
    for (int m = l; m < L; ++m) cols.push_back(pair_label("g2_", l, m));
  }
  for (int l = 0; l < L; ++l) cols.push_back("se_n_" + std::to_string(l));
  for (int l = 0; l < L; ++l) {
    for (int m = l; m < L; ++m) cols.push_back(pair_label("se_g2_", l, m));
  }
  for (const char* c : {"pruned_weight", "seed", "cutoff", "engine", "status"}) cols.emplace_back(c);
  return cols;
}

void write_csv(std::ostream& out, const ResultTable& t) {
  const auto header = csv_header(t);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  const int L = t.num_modes;
  for (const auto& row : t.rows) {
    std::vector<std::string> f;
    f.reserve(header.size());
    for (double x : row.coords) f.push_back(format_double(x));
    for (double x : row.extras) f.push_back(format_double(x));
    const auto& r = row.report;
    auto entry = [](const auto& m, int l, int k) {
      return m.size() > 0 ? format_double(m(l, k)) : std::string("nan");
    };
    for (int l = 0; l < L; ++l) f.push_back(r.intensities.size() > l ? format_double(r.intensities[l]) : "nan");
    for (int l = 0; l < L; ++l) {
      for (int m = l; m < L; ++m) f.push_back(entry(r.g2, l, m));
    }
    for (int l = 0; l < L; ++l) f.push_back(r.se_n.size() > l ? format_double(r.se_n[l]) : "nan");
    for (int l = 0; l < L; ++l) {
      for (int m = l; m < L; ++m) f.push_back(entry(r.se_g2, l, m));
    }
    f.push_back(format_double(r.pruned_weight));
    f.push_back(r.seed ? std::to_string(*r.seed) : std::string());
    f.push_back(std::to_string(r.cutoff));
    f.push_back(row.engine);
    f.push_back(row.status);
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << '\n';
  }
}

json result_sidecar(const ScenarioConfig& config, const ScenarioResult& result) {
  json out;
  out["version"] = version_string();
  out["scenario"] = to_string(result.kind);
  out["config"] = config_to_json(config);
  out["warnings"] = result.warnings;
  out["contract_violation"] = result.contract_violation;
  out["wall_seconds"] = result.wall_seconds;
  json tables = json::array();
  for (const auto& t : result.tables) {
    json jt;
    jt["name"] = t.name;
    jt["file"] = table_stem(config, t) + ".csv";
    jt["series"] = t.series;
    jt["layout"] = t.layout;
    json timings = json::array();
    json suppressed = json::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& row = t.rows[i];
      timings.push_back(row.wall_seconds);
      for (const auto& [l, m] : row.report.suppressed) {
        suppressed.push_back({{"row", i}, {"l", l}, {"m", m}});
      }
    }
    jt["row_wall_seconds"] = timings;
    jt["suppressed_g2"] = suppressed;
    if (!t.rows.empty()) jt["intensity_floor"] = finite_or_null(t.rows.front().report.intensity_floor);
    tables.push_back(jt);
  }
  out["tables"] = tables;
  return out;
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                                                 const ScenarioResult& result, bool plot) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    written.push_back(p);
    return f;
  };
  for (const auto& t : result.tables) {
    auto f = open(dir / (table_stem(config, t) + ".csv"));
    write_csv(f, t);
  }
  {
    auto f = open(dir / (to_string(config.kind) + ".json"));
    f << result_sidecar(config, result).dump(2) << '\n';
  }
  if (plot) {
    auto f = open(dir / ("plot_" + to_string(config.kind) + ".py"));
    f << plot_script(config, result);
  }
  return written;
}

}  // namespace polariq
