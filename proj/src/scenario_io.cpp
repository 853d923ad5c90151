#include "tao/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tao/errors.hpp"

namespace tao {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

// Kernel CSV paths are relative to the file that names them.
void absolutize_paths(json& doc, const std::filesystem::path& dir) {
  if (!doc.is_object() || !doc.contains("devices") || !doc["devices"].is_array()) return;
  for (auto& d : doc["devices"]) {
    if (!d.is_object() || !d.contains("thermal") || !d["thermal"].is_object()) continue;
    auto& t = d["thermal"];
    if (t.contains("csv") && t["csv"].is_string()) {
      std::filesystem::path p = t["csv"].get<std::string>();
      if (p.is_relative()) t["csv"] = (dir / p).lexically_normal().string();
    }
  }
}

json load_document_impl(const std::filesystem::path& path, int depth) {
  if (depth > 8) throw ConfigError(path.string() + ": include nesting too deep (cycle?)");
  const std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ":" + line_col(text, e.byte) + ": parse error: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(path.string() + ": top level must be an object");
  const auto dir = path.parent_path();
  absolutize_paths(doc, dir);
  if (!doc.contains("include")) return doc;

  std::vector<std::string> includes;
  const auto& inc = doc["include"];
  if (inc.is_string()) {
    includes.push_back(inc.get<std::string>());
  } else if (inc.is_array()) {
    for (const auto& i : inc) {
      if (!i.is_string()) throw ConfigError(path.string() + ": include entries must be strings");
      includes.push_back(i.get<std::string>());
    }
  } else {
    throw ConfigError(path.string() + ": include must be a path or a list of paths");
  }
  json merged = json::object();
  for (const auto& i : includes) {
    std::filesystem::path p = i;
    if (p.is_relative()) p = dir / p;
    merged.merge_patch(load_document_impl(p, depth + 1));
  }
  doc.erase("include");
  merged.merge_patch(doc);
  return merged;
}

bool is_note(const std::string& key) { return key == "notes" || (!key.empty() && key.front() == '_'); }

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k) && !is_note(k)) throw ConfigError(where + ": unknown field '" + k + "'");
}

const json& require_object(const json& parent, const std::string& key, const std::string& where) {
  if (!parent.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  const auto& v = parent[key];
  if (!v.is_object()) throw ConfigError(where + "." + key + ": expected an object");
  return v;
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  const auto& v = obj[key];
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::string string_field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  const auto& v = obj[key];
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::uint64_t unsigned_field(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj[key];
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

ImpulseResponse parse_thermal(const json& t, const std::string& where) {
  if (!t.is_object()) throw ConfigError(where + ": expected an object");
  const std::string kind = string_field(t, "kind", where);
  if (kind == "parametric") {
    allow_keys(t, where, {"kind", "stages", "truncation_s"});
    if (!t.contains("stages") || !t["stages"].is_array() || t["stages"].empty())
      throw ConfigError(where + ".stages: expected a non-empty list");
    std::vector<ThermalStage> stages;
    double max_theta = 0.0;
    for (std::size_t i = 0; i < t["stages"].size(); ++i) {
      const auto& s = t["stages"][i];
      const std::string sw = where + ".stages[" + std::to_string(i) + "]";
      if (!s.is_object()) throw ConfigError(sw + ": expected an object");
      allow_keys(s, sw, {"r_th_c_per_w", "theta_s"});
      stages.push_back({number(s, "r_th_c_per_w", sw), number(s, "theta_s", sw)});
      max_theta = std::max(max_theta, stages.back().theta_s);
    }
    const double truncation = number_or(t, "truncation_s", where, 5.0 * max_theta);
    try {
      return ImpulseResponse::parametric(std::move(stages), truncation);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (kind == "tabulated") {
    allow_keys(t, where, {"kind", "csv"});
    return load_impulse_csv(string_field(t, "csv", where));
  }
  throw ConfigError(where + ".kind: expected 'parametric' or 'tabulated'");
}

DeviceSpec parse_device(const json& d, const std::string& where) {
  if (!d.is_object()) throw ConfigError(where + ": expected an object");
  allow_keys(d, where, {"id", "tdp_w", "battery_j", "request_power_w", "request_duration_s", "ambient_c",
                        "idle_power_w", "thermal"});
  DeviceSpec spec;
  spec.id = string_field(d, "id", where);
  spec.tdp_watts = number(d, "tdp_w", where);
  spec.battery_joules = number(d, "battery_j", where);
  spec.request_power_watts = number_or(d, "request_power_w", where, spec.tdp_watts);
  spec.request_duration_s = number(d, "request_duration_s", where);
  spec.ambient_temp_c = number_or(d, "ambient_c", where, 25.0);
  spec.idle_power_watts = number_or(d, "idle_power_w", where, 0.0);
  if (!d.contains("thermal")) throw ConfigError(where + ": missing field 'thermal'");
  spec.thermal = parse_thermal(d["thermal"], where + ".thermal");
  return spec;
}

std::vector<Request> parse_requests(const json& list, const std::vector<DeviceSpec>& devices) {
  if (!list.is_array()) throw ConfigError("requests: expected a list");
  auto device_of = [&](const std::string& id, const std::string& where) -> const DeviceSpec& {
    for (const auto& d : devices)
      if (d.id == id) return d;
    throw ConfigError(where + ".device: unknown device '" + id + "'");
  };
  std::vector<Request> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& r = list[i];
    const std::string where = "requests[" + std::to_string(i) + "]";
    if (!r.is_object()) throw ConfigError(where + ": expected an object");
    const std::string dev_id = string_field(r, "device", where);
    const auto& dev = device_of(dev_id, where);
    if (r.contains("arrivals_s")) {
      // compact form: one entry per arrival time, ids <device>-<k>
      allow_keys(r, where, {"device", "arrivals_s", "duration_s", "power_w"});
      const auto& times = r["arrivals_s"];
      if (!times.is_array()) throw ConfigError(where + ".arrivals_s: expected a list of numbers");
      const double dur = number_or(r, "duration_s", where, dev.request_duration_s);
      const double pw = number_or(r, "power_w", where, dev.request_power_watts);
      for (std::size_t k = 0; k < times.size(); ++k) {
        if (!times[k].is_number()) throw ConfigError(where + ".arrivals_s[" + std::to_string(k) + "]: expected a number");
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "-%02zu", k);
        out.push_back({dev_id + suffix, dev_id, times[k].get<double>(), dur, pw});
      }
      continue;
    }
    allow_keys(r, where, {"id", "device", "arrival_s", "duration_s", "power_w"});
    out.push_back({string_field(r, "id", where), dev_id, number(r, "arrival_s", where),
                   number_or(r, "duration_s", where, dev.request_duration_s),
                   number_or(r, "power_w", where, dev.request_power_watts)});
  }
  sort_by_arrival(out);
  return out;
}

}  // namespace

json load_document(const std::filesystem::path& path) { return load_document_impl(path, 0); }

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  json local = doc;
  absolutize_paths(local, base_dir);
  allow_keys(local, "scenario",
             {"horizon", "dt", "limits", "cost", "devices", "requests", "poisson", "experiment", "include"});
  Scenario s;
  s.horizon_s = number(local, "horizon", "scenario");
  s.dt_s = number_or(local, "dt", "scenario", 0.1);
  if (local.contains("limits")) {
    const auto& limits = require_object(local, "limits", "scenario");
    allow_keys(limits, "limits", {"temp_c"});
    s.temp_limit_c = number_or(limits, "temp_c", "limits", 43.0);
  }
  if (local.contains("cost")) {
    const auto& cost = require_object(local, "cost", "scenario");
    allow_keys(cost, "cost", {"offload_unit"});
    s.offload_unit_cost = number_or(cost, "offload_unit", "cost", 1.0);
  }
  if (!local.contains("devices") || !local["devices"].is_array())
    throw ConfigError("scenario: 'devices' must be a list");
  for (std::size_t i = 0; i < local["devices"].size(); ++i)
    s.devices.push_back(parse_device(local["devices"][i], "devices[" + std::to_string(i) + "]"));

  const bool has_list = local.contains("requests");
  const bool has_poisson = local.contains("poisson");
  if (has_list == has_poisson) throw ConfigError("scenario: give exactly one of 'requests' or 'poisson'");
  if (has_list) {
    s.requests = parse_requests(local["requests"], s.devices);
  } else {
    const auto& p = require_object(local, "poisson", "scenario");
    allow_keys(p, "poisson", {"rate"});
    if (!p.contains("rate")) throw ConfigError("poisson: missing field 'rate'");
    PoissonSource src;
    const auto& rate = p["rate"];
    if (rate.is_number()) {
      for (const auto& d : s.devices) src.rate_per_s[d.id] = rate.get<double>();
    } else if (rate.is_object()) {
      for (const auto& [k, v] : rate.items()) {
        if (!v.is_number()) throw ConfigError("poisson.rate." + k + ": expected a number");
        src.rate_per_s[k] = v.get<double>();
      }
    } else {
      throw ConfigError("poisson.rate: expected a number or an object of per-device rates");
    }
    s.requests = std::move(src);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const auto doc = load_document(path);
  try {
    return scenario_from_json(doc, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  ExperimentConfig cfg;
  cfg.source = path;
  const auto doc = load_document(path);
  try {
    cfg.scenario = scenario_from_json(doc, path.parent_path());
    if (!doc.contains("experiment")) return cfg;
    const auto& e = require_object(doc, "experiment", "scenario");
    const std::string w = "experiment";
    allow_keys(e, w, {"strategies", "omega", "mode", "mc_runs", "mc_seed", "runs", "seed", "out", "plots", "dt_out",
                      "histogram_bins", "tao"});
    if (e.contains("strategies")) {
      if (!e["strategies"].is_array()) throw ConfigError(w + ".strategies: expected a list");
      cfg.strategies.clear();
      for (const auto& s : e["strategies"]) {
        if (!s.is_string()) throw ConfigError(w + ".strategies: expected strategy names");
        cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
      }
    }
    cfg.policy.omega = number_or(e, "omega", w, cfg.policy.omega);
    if (e.contains("mode")) cfg.policy.mode = parse_load_model(string_field(e, "mode", w));
    if (e.contains("mc_runs")) cfg.policy.mc_runs = unsigned_field(e, "mc_runs", w);
    if (e.contains("mc_seed")) cfg.policy.mc_seed = unsigned_field(e, "mc_seed", w);
    if (e.contains("runs")) cfg.runs = unsigned_field(e, "runs", w);
    if (e.contains("seed")) cfg.seed = unsigned_field(e, "seed", w);
    if (e.contains("out")) cfg.out_dir = string_field(e, "out", w);
    if (e.contains("plots")) {
      if (!e["plots"].is_boolean()) throw ConfigError(w + ".plots: expected true or false");
      cfg.plots = e["plots"].get<bool>();
    }
    cfg.dt_out_s = number_or(e, "dt_out", w, cfg.dt_out_s);
    if (e.contains("histogram_bins")) cfg.histogram_bins = unsigned_field(e, "histogram_bins", w);
    if (e.contains("tao")) {
      const auto& t = require_object(e, "tao", w);
      allow_keys(t, w + ".tao", {"guard", "alpha"});
      if (t.contains("guard")) {
        if (!t["guard"].is_boolean()) throw ConfigError(w + ".tao.guard: expected true or false");
        cfg.tao_guard = t["guard"].get<bool>();
      }
      if (t.contains("alpha")) {
        const auto& a = require_object(t, "alpha", w + ".tao");
        for (const auto& [k, v] : a.items()) {
          if (!v.is_number()) throw ConfigError(w + ".tao.alpha." + k + ": expected a number");
          cfg.tao_alpha[k] = v.get<double>();
        }
      }
    }
    if (!(cfg.policy.omega > 0.0 && cfg.policy.omega < 1.0)) throw ConfigError(w + ".omega must lie in (0, 1)");
    if (cfg.policy.mc_runs == 0) throw ConfigError(w + ".mc_runs must be positive");
    if (cfg.runs == 0) throw ConfigError(w + ".runs must be positive");
    if (!(cfg.dt_out_s > 0.0)) throw ConfigError(w + ".dt_out must be > 0");
    if (cfg.histogram_bins == 0) throw ConfigError(w + ".histogram_bins must be positive");
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return cfg;
}

}  // namespace tao
