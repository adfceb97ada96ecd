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

#include "polariq/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace polariq {
namespace {

using nlohmann::json;

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    std::set<std::string> sections;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      const std::size_t start = pos_;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        const std::string name = bare_key();
        skip_spaces();
        expect(']');
        end_of_line();
        if (!sections.insert(name).second || root.contains(name)) {
          pos_ = start;
          fail("duplicate section [" + name + "]");
        }
        root[name] = json::object();
        table = &root[name];
        continue;
      }
      const std::string key = bare_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      json value = parse_value();
      end_of_line();
      if (table->contains(key)) {
        pos_ = start;
        fail("duplicate key '" + key + "'");
      }
      (*table)[key] = std::move(value);
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) line += text_[i] == '\n';
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  // Whitespace, newlines and comments, as allowed inside arrays.
  void skip_all() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++pos_;
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  json parse_string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case '"':
            out += '"';
            break;
          case '\\':
            out += '\\';
            break;
          case 'n':
            out += '\n';
            break;
          case 't':
            out += '\t';
            break;
          default:
            fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  json parse_array() {
    expect('[');
    json arr = json::array();
    skip_all();
    if (peek() == ']') {
      ++pos_;
      return arr;
    }
    while (true) {
      skip_all();
      arr.push_back(parse_value());
      skip_all();
      if (peek() == ',') {
        ++pos_;
        skip_all();
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        continue;
      }
      expect(']');
      return arr;
    }
  }

  json parse_number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                         peek() == '.')) {
      ++pos_;
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token.empty()) fail("expected a value");
    const bool integral = token.find_first_of(".eE") == std::string::npos && token != "nan" && token != "inf";
    if (integral) {
      const bool negative = token[0] == '-';
      const char* first = token.data() + (token[0] == '+' ? 1 : 0);
      if (negative) {
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(first, token.data() + token.size(), v);
        if (ec == std::errc() && p == token.data() + token.size()) return v;
      } else {
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(first, token.data() + token.size(), v);
        if (ec == std::errc() && p == token.data() + token.size()) return v;
      }
      fail("bad integer '" + token + "'");
    }
    double v = 0.0;
    const char* first = token.data() + (token[0] == '+' ? 1 : 0);
    const auto [p, ec] = std::from_chars(first, token.data() + token.size(), v);
    if (ec != std::errc() || p != token.data() + token.size() || !std::isfinite(v)) {
      fail("bad number '" + token + "'");
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Reads a number, accepting "<x>pi" strings for angles.
double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    double scale = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
      scale = kPi;
      s.resize(s.size() - 2);
      if (s.empty() || s == "+") s = "1";
      if (s == "-") s = "-1";
    }
    double x = 0.0;
    const char* first = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
    const auto [p, ec] = std::from_chars(first, s.data() + s.size(), x);
    if (ec == std::errc() && p == s.data() + s.size() && std::isfinite(x)) return x * scale;
  }
  throw ConfigError(where + ": expected a number");
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) return {number(v, where)};
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<long>();
}

bool boolean(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + ": expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

using Handler = std::function<void(const json&, const std::string&)>;

void apply_section(const json& section, const std::string& name, const std::map<std::string, Handler>& handlers) {
  if (!section.is_object()) throw ConfigError("section [" + name + "] must be a table");
  for (const auto& [key, value] : section.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
    it->second(value, name + "." + key);
  }
}

void apply_sweep(SweepAxis& axis, const json& section, const std::string& name) {
  apply_section(section, name,
                {{"variable", [&](const json& v, const std::string& w) { axis.variable = text(v, w); }},
                 {"min", [&](const json& v, const std::string& w) { axis.min = number(v, w); }},
                 {"max", [&](const json& v, const std::string& w) { axis.max = number(v, w); }},
                 {"points", [&](const json& v, const std::string& w) { axis.points = static_cast<int>(integer(v, w)); }},
                 {"values", [&](const json& v, const std::string& w) { axis.values_override = numbers(v, w); }}});
}

std::string pairing_name(Pairing p) {
  switch (p) {
    case Pairing::Brickwork:
      return "brickwork";
    case Pairing::EvenOnly:
      return "even-only";
    case Pairing::Custom:
      return "custom";
  }
  return "brickwork";
}

json sweep_json(const SweepAxis& a) {
  json out = {{"variable", a.variable}, {"min", a.min}, {"max", a.max}, {"points", a.points}};
  if (!a.values_override.empty()) out["values"] = a.values_override;
  return out;
}

}  // namespace

json parse_toml_subset(std::string_view text) { return TomlParser(text).parse(); }

json load_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string body = buf.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    try {
      return json::parse(body);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
  }
  return parse_toml_subset(body);
}

ScenarioConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a table");
  if (!doc.contains("scenario")) throw ConfigError("config needs a 'scenario' key");
  ScenarioConfig c = default_config(parse_scenario_kind(text(doc.at("scenario"), "scenario")));

  for (const auto& [key, value] : doc.items()) {
    if (key == "scenario") continue;
    if (key == "sweep") {
      apply_sweep(c.sweep, value, "sweep");
    } else if (key == "sweep2") {
      SweepAxis axis = c.sweep2.value_or(SweepAxis{});
      apply_sweep(axis, value, "sweep2");
      c.sweep2 = axis;
    } else if (key == "circuit") {
      auto& k = c.circuit;
      apply_section(
          value, key,
          {{"theta_in", [&](const json& v, const std::string& w) { k.theta_in = number(v, w); }},
           {"theta_out", [&](const json& v, const std::string& w) { k.theta_out = number(v, w); }},
           {"alpha_in", [&](const json& v, const std::string& w) { k.alpha_in = number(v, w); }},
           {"phi_lo", [&](const json& v, const std::string& w) { k.phi_lo = number(v, w); }},
           {"lo_offset", [&](const json& v, const std::string& w) { k.lo_offset = number(v, w); }},
           {"integrated_layers",
            [&](const json& v, const std::string& w) { k.integrated_layers = static_cast<int>(integer(v, w)); }},
           {"modes", [&](const json& v, const std::string& w) { k.modes = static_cast<int>(integer(v, w)); }},
           {"depth", [&](const json& v, const std::string& w) { k.depth = static_cast<int>(integer(v, w)); }},
           {"dx_um", [&](const json& v, const std::string& w) { k.dx_um = number(v, w); }},
           {"phi_rel", [&](const json& v, const std::string& w) { k.phi_rel = numbers(v, w); }},
           {"pairing",
            [&](const json& v, const std::string& w) {
              const auto s = text(v, w);
              if (s == "brickwork") {
                k.pairing = Pairing::Brickwork;
              } else if (s == "even-only") {
                k.pairing = Pairing::EvenOnly;
              } else if (s == "custom") {
                k.pairing = Pairing::Custom;
              } else {
                throw ConfigError(w + ": expected brickwork, even-only or custom");
              }
            }},
           {"custom_pairs",
            [&](const json& v, const std::string& w) {
              if (!v.is_array()) throw ConfigError(w + ": expected a list of layers");
              k.custom_pairs.clear();
              for (const auto& layer : v) {
                if (!layer.is_array()) throw ConfigError(w + ": each layer must be a list of [a, b] pairs");
                PairList pairs;
                for (const auto& p : layer) {
                  if (!p.is_array() || p.size() != 2) throw ConfigError(w + ": pairs must have two mode indices");
                  pairs.emplace_back(static_cast<int>(integer(p[0], w)), static_cast<int>(integer(p[1], w)));
                }
                k.custom_pairs.push_back(std::move(pairs));
              }
            }},
           {"coupling_design",
            [&](const json& v, const std::string& w) {
              const auto s = text(v, w);
              if (s == "photonic_calibrated") {
                k.coupling = CouplingDesign::PhotonicCalibrated;
              } else if (s == "fixed") {
                k.coupling = CouplingDesign::Fixed;
              } else {
                throw ConfigError(w + ": expected photonic_calibrated or fixed");
              }
            }},
           {"j_design", [&](const json& v, const std::string& w) { k.j_design = number(v, w); }},
           {"j_dt", [&](const json& v, const std::string& w) { k.j_dt = number(v, w); }}});
    } else if (key == "physics") {
      auto& p = c.physics;
      apply_section(
          value, key,
          {{"u_dt", [&](const json& v, const std::string& w) { p.u_dt = numbers(v, w); }},
           {"g_exc",
            [&](const json& v, const std::string& w) {
              p.g_exc = numbers(v, w);
              if (!doc.at("physics").contains("u_dt")) p.u_dt.clear();
            }},
           {"rabi_mev", [&](const json& v, const std::string& w) { p.anchors.rabi_mev = number(v, w); }},
           {"exciton_energy_mev",
            [&](const json& v, const std::string& w) { p.anchors.exciton_energy_mev = number(v, w); }},
           {"k_anchor", [&](const json& v, const std::string& w) { p.anchors.k_anchor = number(v, w); }},
           {"anchor_exciton_fraction",
            [&](const json& v, const std::string& w) { p.anchors.exciton_fraction = number(v, w); }},
           {"anchor_group_velocity",
            [&](const json& v, const std::string& w) { p.anchors.group_velocity = number(v, w); }},
           {"hbar_mev_ps", [&](const json& v, const std::string& w) { p.anchors.hbar_mev_ps = number(v, w); }},
           {"dispersion_csv", [&](const json& v, const std::string& w) { p.dispersion_csv = text(v, w); }},
           {"sigma_t_ps", [&](const json& v, const std::string& w) { p.sigma_t_ps = number(v, w); }},
           {"a_perp_um", [&](const json& v, const std::string& w) { p.a_perp_um = number(v, w); }},
           {"exciton_fraction", [&](const json& v, const std::string& w) { p.exciton_fraction = number(v, w); }},
           {"mzi_length_um", [&](const json& v, const std::string& w) { p.mzi_length_um = number(v, w); }},
           {"mzi_group_velocity",
            [&](const json& v, const std::string& w) { p.mzi_group_velocity = number(v, w); }}});
    } else if (key == "loss") {
      auto& l = c.loss;
      apply_section(value, key,
                    {{"db", [&](const json& v, const std::string& w) { l.db = numbers(v, w); }},
                     {"gamma", [&](const json& v, const std::string& w) { l.gamma = numbers(v, w); }},
                     {"l_max", [&](const json& v, const std::string& w) { l.l_max = static_cast<int>(integer(v, w)); }},
                     {"deficiency", [&](const json& v, const std::string& w) {
                        const auto s = text(v, w);
                        if (s == "fold") {
                          c.engine.deficiency = DeficiencyPolicy::FoldIntoNoLoss;
                        } else if (s == "discard") {
                          c.engine.deficiency = DeficiencyPolicy::Discard;
                        } else {
                          throw ConfigError(w + ": expected fold or discard");
                        }
                      }}});
    } else if (key == "engine") {
      auto& e = c.engine;
      apply_section(
          value, key,
          {{"cutoff", [&](const json& v, const std::string& w) { e.cutoff = static_cast<int>(integer(v, w)); }},
           {"mode",
            [&](const json& v, const std::string& w) {
              const auto s = text(v, w);
              bool found = false;
              for (auto m : {EngineChoice::Auto, EngineChoice::Pure, EngineChoice::Density, EngineChoice::BranchEnum,
                             EngineChoice::Sampling}) {
                if (to_string(m) == s) {
                  e.mode = m;
                  found = true;
                }
              }
              if (!found) throw ConfigError(w + ": expected auto, pure, density, branch_enum or sampling");
            }},
           {"trajectories",
            [&](const json& v, const std::string& w) {
              const long n = integer(v, w);
              if (n < 1) throw ConfigError(w + ": must be positive");
              e.trajectories = static_cast<std::size_t>(n);
            }},
           {"branch_threshold", [&](const json& v, const std::string& w) { e.branch_threshold = number(v, w); }},
           {"seed",
            [&](const json& v, const std::string& w) {
              if (!v.is_number_unsigned()) throw ConfigError(w + ": expected a non-negative integer");
              e.seed = v.get<std::uint64_t>();
            }},
           {"threads",
            [&](const json& v, const std::string& w) {
              const long n = integer(v, w);
              if (n < 0) throw ConfigError(w + ": must be non-negative");
              e.threads = static_cast<unsigned>(n);
            }},
           {"jackknife", [&](const json& v, const std::string& w) { e.jackknife = boolean(v, w); }},
           {"intensity_floor", [&](const json& v, const std::string& w) { e.intensity_floor = number(v, w); }}});
    } else if (key == "output") {
      apply_section(value, key,
                    {{"dir", [&](const json& v, const std::string& w) { c.output.dir = text(v, w); }},
                     {"emit_plot_script",
                      [&](const json& v, const std::string& w) { c.output.emit_plot_script = boolean(v, w); }}});
    } else if (key == "convergence") {
      apply_section(value, key,
                    {{"enabled", [&](const json& v, const std::string& w) { c.convergence.enabled = boolean(v, w); }},
                     {"tolerance",
                      [&](const json& v, const std::string& w) { c.convergence.tolerance = number(v, w); }}});
    } else {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
  validate(c);
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json out;
  out["scenario"] = to_string(c.kind);
  out["sweep"] = sweep_json(c.sweep);
  if (c.sweep2) out["sweep2"] = sweep_json(*c.sweep2);
  const auto& k = c.circuit;
  out["circuit"] = {{"theta_in", k.theta_in},
                    {"theta_out", k.theta_out},
                    {"alpha_in", k.alpha_in},
                    {"phi_lo", k.phi_lo},
                    {"lo_offset", k.lo_offset},
                    {"integrated_layers", k.integrated_layers},
                    {"modes", k.modes},
                    {"depth", k.depth},
                    {"dx_um", k.dx_um},
                    {"phi_rel", k.phi_rel},
                    {"pairing", pairing_name(k.pairing)},
                    {"coupling_design", k.coupling == CouplingDesign::Fixed ? "fixed" : "photonic_calibrated"},
                    {"j_design", k.j_design}};
  if (k.j_dt) out["circuit"]["j_dt"] = *k.j_dt;
  if (!k.custom_pairs.empty()) {
    json layers = json::array();
    for (const auto& layer : k.custom_pairs) {
      json pairs = json::array();
      for (const auto& [a, b] : layer) pairs.push_back({a, b});
      layers.push_back(pairs);
    }
    out["circuit"]["custom_pairs"] = layers;
  }
  const auto& p = c.physics;
  out["physics"] = {{"u_dt", p.u_dt},
                    {"g_exc", p.g_exc},
                    {"rabi_mev", p.anchors.rabi_mev},
                    {"exciton_energy_mev", p.anchors.exciton_energy_mev},
                    {"k_anchor", p.anchors.k_anchor},
                    {"anchor_exciton_fraction", p.anchors.exciton_fraction},
                    {"anchor_group_velocity", p.anchors.group_velocity},
                    {"hbar_mev_ps", p.anchors.hbar_mev_ps},
                    {"dispersion_csv", p.dispersion_csv},
                    {"sigma_t_ps", p.sigma_t_ps},
                    {"a_perp_um", p.a_perp_um},
                    {"exciton_fraction", p.exciton_fraction},
                    {"mzi_length_um", p.mzi_length_um},
                    {"mzi_group_velocity", p.mzi_group_velocity}};
  out["loss"] = {{"db", c.loss.db},
                 {"gamma", c.loss.gamma},
                 {"l_max", c.loss.l_max},
                 {"deficiency", c.engine.deficiency == DeficiencyPolicy::Discard ? "discard" : "fold"}};
  out["engine"] = {{"cutoff", c.engine.cutoff},
                   {"mode", to_string(c.engine.mode)},
                   {"trajectories", c.engine.trajectories},
                   {"branch_threshold", c.engine.branch_threshold},
                   {"seed", c.engine.seed},
                   {"threads", c.engine.threads},
                   {"jackknife", c.engine.jackknife},
                   {"intensity_floor", c.engine.intensity_floor}};
  out["output"] = {{"dir", c.output.dir}, {"emit_plot_script", c.output.emit_plot_script}};
  out["convergence"] = {{"enabled", c.convergence.enabled}, {"tolerance", c.convergence.tolerance}};
  return out;
}

}  // namespace polariq
