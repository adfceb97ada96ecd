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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "polariq/output.hpp"

namespace polariq {
namespace {

TEST(FormatDouble, RoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    const auto s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

ResultTable two_mode_table() {
  auto c = default_config(ScenarioKind::MziFreeSpace);
  c.physics.u_dt = {0.06};
  c.sweep.values_override = {0.0, 1.0, 2.0};
  c.engine.cutoff = 5;
  return run_mzi_free_space(c).tables.at(0);
}

TEST(Csv, HeaderLayout) {
  const auto t = two_mode_table();
  const std::vector<std::string> expected{"phi_lo",   "n_0",      "n_1",       "g2_0_0",        "g2_0_1",
                                          "g2_1_1",   "se_n_0",   "se_n_1",    "se_g2_0_0",     "se_g2_0_1",
                                          "se_g2_1_1", "pruned_weight", "seed", "cutoff", "engine",
                                          "status"};
  EXPECT_EQ(csv_header(t), expected);
}

TEST(Csv, OneLinePerRowWithNaNForExactErrors) {
  const auto t = two_mode_table();
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_NE(line.find(",nan,"), std::string::npos);
    EXPECT_NE(line.find(",pure,ok"), std::string::npos);
  }
  EXPECT_EQ(lines, 3);
}

TEST(Outputs, WritesCsvSidecarAndPlot) {
  auto c = default_config(ScenarioKind::MziFreeSpace);
  c.physics.u_dt = {0.06};
  c.sweep.values_override = {0.0, 1.0};
  c.engine.cutoff = 4;
  const auto r = run_scenario(c);
  const auto dir = std::filesystem::temp_directory_path() / "polariq_output_test";
  std::filesystem::remove_all(dir);
  const auto files = write_outputs(dir, c, r, true);
  EXPECT_EQ(files.size(), 3u);
  EXPECT_TRUE(std::filesystem::exists(dir / "mzi_free_space_udt_0.06.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plot_mzi_free_space.py"));
  std::ifstream side(dir / "mzi_free_space.json");
  const auto j = nlohmann::json::parse(side);
  EXPECT_EQ(j["scenario"], "mzi_free_space");
  EXPECT_EQ(j["version"], version_string());
  EXPECT_EQ(j["tables"].size(), 1u);
  EXPECT_EQ(j["tables"][0]["row_wall_seconds"].size(), 2u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace polariq
