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

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polariq/scenario.hpp"

namespace polariq {

// Shortest representation that round-trips; "nan" for NaN.
std::string format_double(double x);

// Columns: sweep coordinates, extras, n_l, g2_lm (l <= m), se_n_l, se_g2_lm,
// pruned_weight, seed, cutoff, engine, status. Timings are left out so that
// reruns with the same seed produce identical files.
void write_csv(std::ostream& out, const ResultTable& table);
std::vector<std::string> csv_header(const ResultTable& table);

// Config echo, circuit layouts, per-row timings, warnings and suppressed
// g2 entries.
nlohmann::json result_sidecar(const ScenarioConfig& config, const ScenarioResult& result);

// Writes <scenario>_<table>.csv per table, <scenario>.json and, when asked
// for, plot_<scenario>.py into `dir`. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                                                 const ScenarioResult& result, bool plot_script);

std::string version_string();

}  // namespace polariq
