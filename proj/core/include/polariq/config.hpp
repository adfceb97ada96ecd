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

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "polariq/scenario.hpp"

namespace polariq {

// Parses the TOML subset used by scenario files: [section] headers,
// key = value pairs, strings, numbers, booleans, (nested, multi-line) arrays
// and # comments. Throws ConfigError with a line number on malformed input.
nlohmann::json parse_toml_subset(std::string_view text);

// JSON when the file ends in .json, the TOML subset otherwise.
nlohmann::json load_config_document(const std::string& path);

// Starts from default_config() of the named scenario and applies every key.
// Unknown sections or keys are errors. Numbers may be given as strings of
// the form "0.6pi".
ScenarioConfig config_from_json(const nlohmann::json& doc);

nlohmann::json config_to_json(const ScenarioConfig& config);

}  // namespace polariq
