#include "rclass/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include "rclass/errors.hpp"

namespace rclass::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

using Setter = std::function<void(HyperParams&, const std::string&, const std::string&)>;

template <typename M>
Setter real(M HyperParams::*field) {
  return [field](HyperParams& p, const std::string& k, const std::string& v) {
    p.*field = to_double(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"budget", real(&HyperParams::budget)},
      {"threshold_step", real(&HyperParams::threshold_step)},
      {"window", real(&HyperParams::window)},
      {"imbalance_gate", real(&HyperParams::imbalance_gate)},
      {"minority_share", real(&HyperParams::minority_share)},
      {"imbalance_override",
       [](HyperParams& p, const std::string& k, const std::string& v) {
         p.imbalance_override = to_bool(k, v);
       }},
      {"split_tolerance", real(&HyperParams::split_tolerance)},
      {"split_offset", real(&HyperParams::split_offset)},
      {"chi2_alpha", real(&HyperParams::chi2_alpha)},
      {"initial_radius", real(&HyperParams::initial_radius)},
      {"nonoverlap_factor", real(&HyperParams::nonoverlap_factor)},
      {"min_radius", real(&HyperParams::min_radius)},
      {"max_radius", real(&HyperParams::max_radius)},
      {"overlap_shift", real(&HyperParams::overlap_shift)},
      {"prune_grace",
       [](HyperParams& p, const std::string& k, const std::string& v) {
         p.prune_grace = to_uint(k, v);
       }},
      {"init_cov_big", real(&HyperParams::init_cov_big)},
      {"decay_weight", real(&HyperParams::decay_weight)},
      {"min_update_firing", real(&HyperParams::min_update_firing)},
      {"gamma_init", real(&HyperParams::gamma_init)},
      {"gamma_floor", real(&HyperParams::gamma_floor)},
      {"eta_init", real(&HyperParams::eta_init)},
      {"parzen_h", real(&HyperParams::parzen_h)},
      {"lr_up", real(&HyperParams::lr_up)},
      {"lr_down", real(&HyperParams::lr_down)},
      {"fda_rate", real(&HyperParams::fda_rate)},
      {"within_scatter",
       [](HyperParams& p, const std::string& k, const std::string& v) {
         if (v == "class_mean") {
           p.within_scatter = WithinScatter::ClassMean;
         } else if (v == "global_mean") {
           p.within_scatter = WithinScatter::GlobalMean;
         } else {
           throw ConfigError("bad value for " + k + ": expected class_mean or global_mean");
         }
       }},
      {"seed",
       [](HyperParams& p, const std::string& k, const std::string& v) { p.seed = to_uint(k, v); }},
      {"reserve_capacity",
       [](HyperParams& p, const std::string& k, const std::string& v) {
         p.reserve_capacity = static_cast<std::size_t>(to_uint(k, v));
       }},
  };
  return table;
}

}  // namespace

void apply_setting(HyperParams& params, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown configuration key: " + key);
  it->second(params, key, value);
}

HyperParams parse_config(std::istream& in, HyperParams base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    apply_setting(base, key, value);
  }
  base.validate();
  return base;
}

HyperParams load_config(const std::string& path, HyperParams base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, base);
}

}  // namespace rclass::harness
