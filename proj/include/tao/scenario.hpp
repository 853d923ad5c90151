#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tao/thermal.hpp"

namespace tao {

struct DeviceSpec {
  std::string id;
  double tdp_watts = 0.0;            // P^max
  double battery_joules = 0.0;       // initial battery level
  double request_power_watts = 0.0;  // per-request power increment
  double request_duration_s = 0.0;   // default per-request processing time
  ImpulseResponse thermal = ImpulseResponse::parametric({{1.0, 1.0}}, 5.0);
  double ambient_temp_c = 25.0;
  double idle_power_watts = 0.0;

  /// Throws ConfigError on non-positive parameters or request power above TDP.
  void validate() const;
};

struct Request {
  std::string id;
  std::string device;
  double arrival_s = 0.0;
  double duration_s = 0.0;
  double power_watts = 0.0;
};

/// Local/offload flag per request id (true = served locally).
class DecisionVector {
 public:
  DecisionVector() = default;

  static DecisionVector uniform(std::span<const Request> requests, bool local);

  void set(const std::string& request_id, bool local) { flags_[request_id] = local; }
  /// Throws std::out_of_range for an id that was never set.
  bool local(const std::string& request_id) const { return flags_.at(request_id); }
  bool contains(const std::string& request_id) const { return flags_.count(request_id) != 0; }
  std::size_t size() const { return flags_.size(); }
  std::size_t count_local() const;
  const std::map<std::string, bool>& entries() const { return flags_; }

  /// Throws std::invalid_argument unless the vector covers exactly these requests.
  void require_covers(std::span<const Request> requests) const;

  bool operator==(const DecisionVector&) const = default;

 private:
  std::map<std::string, bool> flags_;
};

/// Poisson arrivals, rate per device id (per second).
struct PoissonSource {
  std::map<std::string, double> rate_per_s;
};

struct Scenario {
  double horizon_s = 3600.0;
  std::vector<DeviceSpec> devices;
  std::variant<std::vector<Request>, PoissonSource> requests = std::vector<Request>{};
  double temp_limit_c = 43.0;
  double offload_unit_cost = 1.0;
  double dt_s = 0.1;

  bool has_explicit_requests() const {
    return std::holds_alternative<std::vector<Request>>(requests);
  }
  /// Throws std::logic_error for a Poisson-source scenario.
  const std::vector<Request>& request_list() const;

  /// Throws std::invalid_argument for an unknown id.
  const DeviceSpec& device(const std::string& id) const;
  std::size_t device_index(const std::string& id) const;

  /// Requests of one device in arrival order (ties by id).
  std::vector<Request> requests_for(const std::string& device_id) const;

  /// Poisson rate of a device; for explicit lists, the empirical rate count / horizon.
  double rate_for(const std::string& device_id) const;

  std::size_t grid_points() const { return grid_size(horizon_s, dt_s); }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Orders a request list by arrival time, then id.
void sort_by_arrival(std::vector<Request>& requests);

}  // namespace tao
