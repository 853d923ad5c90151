#include "tao/scenario.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "tao/errors.hpp"

namespace tao {

void DeviceSpec::validate() const {
  const std::string where = "device '" + id + "': ";
  if (id.empty()) throw ConfigError("device with empty id");
  if (!(tdp_watts > 0.0)) throw ConfigError(where + "tdp_w must be > 0");
  if (!(battery_joules > 0.0)) throw ConfigError(where + "battery_j must be > 0");
  if (!(request_power_watts > 0.0)) throw ConfigError(where + "request_power_w must be > 0");
  if (!(request_duration_s > 0.0)) throw ConfigError(where + "request_duration_s must be > 0");
  if (!(idle_power_watts >= 0.0)) throw ConfigError(where + "idle_power_w must be >= 0");
  if (request_power_watts > tdp_watts)
    throw ConfigError(where + "request_power_w exceeds tdp_w; no request could ever be served locally");
}

DecisionVector DecisionVector::uniform(std::span<const Request> requests, bool local) {
  DecisionVector v;
  for (const auto& r : requests) v.set(r.id, local);
  return v;
}

std::size_t DecisionVector::count_local() const {
  return static_cast<std::size_t>(
      std::count_if(flags_.begin(), flags_.end(), [](const auto& kv) { return kv.second; }));
}

void DecisionVector::require_covers(std::span<const Request> requests) const {
  for (const auto& r : requests)
    if (!contains(r.id)) throw std::invalid_argument("decision vector has no entry for request '" + r.id + "'");
  if (flags_.size() != requests.size())
    throw std::invalid_argument("decision vector has entries for unknown requests");
}

const std::vector<Request>& Scenario::request_list() const {
  if (!has_explicit_requests()) throw std::logic_error("scenario uses a Poisson source; realize it first");
  return std::get<std::vector<Request>>(requests);
}

const DeviceSpec& Scenario::device(const std::string& id) const { return devices[device_index(id)]; }

std::size_t Scenario::device_index(const std::string& id) const {
  for (std::size_t i = 0; i < devices.size(); ++i)
    if (devices[i].id == id) return i;
  throw std::invalid_argument("unknown device id '" + id + "'");
}

void sort_by_arrival(std::vector<Request>& requests) {
  std::stable_sort(requests.begin(), requests.end(), [](const Request& a, const Request& b) {
    if (a.arrival_s != b.arrival_s) return a.arrival_s < b.arrival_s;
    return a.id < b.id;
  });
}

std::vector<Request> Scenario::requests_for(const std::string& device_id) const {
  device_index(device_id);
  std::vector<Request> out;
  for (const auto& r : request_list())
    if (r.device == device_id) out.push_back(r);
  sort_by_arrival(out);
  return out;
}

double Scenario::rate_for(const std::string& device_id) const {
  device_index(device_id);
  if (has_explicit_requests()) {
    const auto& list = request_list();
    const auto n = std::count_if(list.begin(), list.end(), [&](const Request& r) { return r.device == device_id; });
    return static_cast<double>(n) / horizon_s;
  }
  const auto& rates = std::get<PoissonSource>(requests).rate_per_s;
  const auto it = rates.find(device_id);
  return it == rates.end() ? 0.0 : it->second;
}

void Scenario::validate() const {
  if (!(horizon_s > 0.0)) throw ConfigError("horizon must be > 0");
  if (!(dt_s > 0.0)) throw ConfigError("dt must be > 0");
  if (!(offload_unit_cost > 0.0)) throw ConfigError("cost.offload_unit must be > 0");
  if (devices.empty()) throw ConfigError("scenario has no devices");
  std::set<std::string> ids;
  double min_duration = devices.front().request_duration_s;
  for (const auto& d : devices) {
    d.validate();
    if (!ids.insert(d.id).second) throw ConfigError("duplicate device id '" + d.id + "'");
    if (!(temp_limit_c > d.ambient_temp_c))
      throw ConfigError("limits.temp_c must exceed the ambient temperature of device '" + d.id + "'");
    min_duration = std::min(min_duration, d.request_duration_s);
  }
  if (has_explicit_requests()) {
    std::set<std::string> request_ids;
    for (const auto& r : request_list()) {
      const std::string where = "request '" + r.id + "': ";
      if (r.id.empty()) throw ConfigError("request with empty id");
      if (!request_ids.insert(r.id).second) throw ConfigError("duplicate request id '" + r.id + "'");
      if (!ids.count(r.device)) throw ConfigError(where + "unknown device '" + r.device + "'");
      if (!(r.arrival_s >= 0.0) || r.arrival_s > horizon_s) throw ConfigError(where + "arrival_s outside [0, horizon]");
      if (!(r.duration_s > 0.0)) throw ConfigError(where + "duration_s must be > 0");
      if (!(r.power_watts > 0.0)) throw ConfigError(where + "power_w must be > 0");
      min_duration = std::min(min_duration, r.duration_s);
    }
  } else {
    for (const auto& [id, rate] : std::get<PoissonSource>(requests).rate_per_s) {
      if (!ids.count(id)) throw ConfigError("poisson.rate names unknown device '" + id + "'");
      if (!(rate >= 0.0)) throw ConfigError("poisson.rate for '" + id + "' must be >= 0");
    }
  }
  if (dt_s > min_duration / 10.0 * (1.0 + 1e-12))
    throw ConfigError("dt must be at most a tenth of the shortest request duration");
}

}  // namespace tao
