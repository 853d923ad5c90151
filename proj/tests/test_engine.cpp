#include <doctest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "tao/engine.hpp"
#include "tao/errors.hpp"

using namespace tao;

namespace {

DeviceSpec hololens_like() {
  DeviceSpec d;
  d.id = "hololens";
  d.tdp_watts = 2.0;
  d.request_power_watts = 2.0;
  d.request_duration_s = 35.0;
  d.battery_joules = 10000.0;
  d.thermal = ImpulseResponse::parametric({{2.0, 15.0}, {26.0, 400.0}}, 2000.0);
  return d;
}

DeviceSpec glass_like() {
  DeviceSpec d;
  d.id = "glass";
  d.tdp_watts = 0.6;
  d.request_power_watts = 0.6;
  d.request_duration_s = 65.0;
  d.battery_joules = 1000.0;
  d.thermal = ImpulseResponse::parametric({{4.0, 15.0}, {60.0, 500.0}}, 2500.0);
  return d;
}

Scenario single_device(const DeviceSpec& d, std::vector<Request> reqs, double horizon, double dt) {
  Scenario s;
  s.horizon_s = horizon;
  s.dt_s = dt;
  s.devices = {d};
  s.requests = std::move(reqs);
  s.validate();
  return s;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("grid arithmetic") {
    CHECK(grid_size(3600.0, 0.1) == 36001);
    CHECK(grid_size(3600.0, 1.0) == 3601);
    CHECK(grid_size(1.0, 0.3) == 4);
    CHECK(nearest_index(9.04, 0.1, 100) == 90);
    CHECK(nearest_index(0.26, 0.1, 100) == 3);
    CHECK(nearest_index(-5.0, 0.1, 100) == 0);
    CHECK(nearest_index(1e6, 0.1, 100) == 99);
  }

  TEST_CASE("all offloaded gives zero power") {
    auto d = hololens_like();
    auto s = single_device(d, {{"r0", "hololens", 10, 35, 2}, {"r1", "hololens", 20, 35, 2}}, 100, 1);
    const auto p = build_power_trace(s, "hololens", DecisionVector::uniform(s.request_list(), false));
    CHECK(p.size() == 101);
    for (double v : p.samples) CHECK(v == 0.0);
  }

  TEST_CASE("one local pulse covers its closed interval") {
    auto s = single_device(hololens_like(), {{"r0", "hololens", 10, 35, 2}}, 100, 1);
    const auto p = build_power_trace(s, "hololens", DecisionVector::uniform(s.request_list(), true));
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double t = p.time(k);
      CHECK(p.samples[k] == ((t >= 10 && t <= 45) ? 2.0 : 0.0));
    }
  }

  TEST_CASE("overlapping pulses superpose") {
    auto d = glass_like();
    d.tdp_watts = 1.2;
    auto s = single_device(d, {{"r0", "glass", 0, 65, 0.6}, {"r1", "glass", 30, 65, 0.6}}, 200, 1);
    const auto p = build_power_trace(s, "glass", DecisionVector::uniform(s.request_list(), true));
    for (int t = 30; t <= 65; ++t) CHECK(p.samples[t] == doctest::Approx(1.2));
    CHECK(p.samples[29] == doctest::Approx(0.6));
    CHECK(p.samples[66] == doctest::Approx(0.6));
    CHECK(p.samples[96] == 0.0);
  }

  TEST_CASE("idle power and superposition of disjoint sets") {
    auto d = glass_like();
    d.idle_power_watts = 0.05;
    d.tdp_watts = 2.0;
    std::vector<Request> reqs{{"a", "glass", 5, 65, 0.6}, {"b", "glass", 40, 65, 0.6}, {"c", "glass", 150, 65, 0.6}};
    auto s = single_device(d, reqs, 300, 1);
    DecisionVector va = DecisionVector::uniform(reqs, false), vb = va, vab = va;
    va.set("a", true);
    vb.set("b", true);
    vb.set("c", true);
    vab.set("a", true);
    vab.set("b", true);
    vab.set("c", true);
    const auto pa = build_power_trace(s, "glass", va);
    const auto pb = build_power_trace(s, "glass", vb);
    const auto pab = build_power_trace(s, "glass", vab);
    for (std::size_t k = 0; k < pab.size(); ++k)
      CHECK(pab.samples[k] == doctest::Approx(pa.samples[k] + pb.samples[k] - 0.05));
  }

  TEST_CASE("power trace errors") {
    auto s = single_device(hololens_like(), {{"r0", "hololens", 10, 35, 2}}, 100, 1);
    CHECK_THROWS_AS(build_power_trace(s, "nope", DecisionVector::uniform(s.request_list(), true)),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_power_trace(s, "hololens", DecisionVector{}), std::invalid_argument);
  }

  TEST_CASE("battery integration") {
    TimeSeries zero{0.0, 1.0, std::vector<double>(100, 0.0)};
    for (double b : integrate_battery(zero, 500.0).samples) CHECK(b == 500.0);

    TimeSeries constant{0.0, 0.1, std::vector<double>(36001, 2.0)};
    const auto b = integrate_battery(constant, 10000.0);
    CHECK(b.front() == 10000.0);
    CHECK(b.back() == doctest::Approx(2800.0).epsilon(1e-9));

    // 35 s pulse at 2 W on a 1 s grid: samples 1..35, ramps at both ends
    TimeSeries pulse{0.0, 1.0, std::vector<double>(100, 0.0)};
    for (int k = 1; k <= 35; ++k) pulse.samples[k] = 2.0;
    CHECK(integrate_battery(pulse, 100.0).back() == doctest::Approx(30.0).epsilon(1e-12));
  }

  TEST_CASE("single 35 s request drains its energy up to one grid step") {
    auto d = hololens_like();
    d.battery_joules = 100.0;
    auto s = single_device(d, {{"r0", "hololens", 10, 35, 2}}, 100, 0.1);
    const auto t = device_traces(s, "hololens", DecisionVector::uniform(s.request_list(), true));
    CHECK(t.battery.back() == doctest::Approx(30.0 - 0.2).epsilon(1e-9));
    CHECK(std::abs(t.battery.back() - 30.0) <= 2.0 * s.dt_s + 1e-9);
    CHECK(request_energy(s.request_list()[0], 0.1, s.grid_points()) == doctest::Approx(70.2));
  }

  TEST_CASE("monotone in decisions") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      auto s = oracle::random_scenario(rng, 8);
      const auto& reqs = s.request_list();
      DecisionVector v = DecisionVector::uniform(reqs, false);
      for (const auto& r : reqs)
        if (rng() % 2) v.set(r.id, true);
      for (const auto& r : reqs) {
        if (v.local(r.id)) continue;
        DecisionVector w = v;
        w.set(r.id, true);
        const auto a = device_traces(s, r.device, v);
        const auto b = device_traces(s, r.device, w);
        for (std::size_t k = 0; k < a.power.size(); ++k) {
          CHECK(b.power.samples[k] >= a.power.samples[k]);
          CHECK(b.battery.samples[k] <= a.battery.samples[k]);
          CHECK(b.temperature.samples[k] >= a.temperature.samples[k] - 1e-12);
        }
      }
    }
  }

  TEST_CASE("traces match the independent construction") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
      auto s = oracle::random_scenario(rng, 10);
      DecisionVector v = DecisionVector::uniform(s.request_list(), false);
      for (const auto& r : s.request_list())
        if (rng() % 3) v.set(r.id, true);
      for (const auto& d : s.devices) {
        std::vector<Request> reqs;
        std::vector<bool> local;
        for (const auto& r : s.request_list())
          if (r.device == d.id) {
            reqs.push_back(r);
            local.push_back(v.local(r.id));
          }
        const auto want = oracle::device_traces(d, reqs, local, s.horizon_s, s.dt_s);
        const auto got = device_traces(s, d.id, v);
        for (std::size_t k = 0; k < want.power.size(); ++k) {
          CHECK(got.power.samples[k] == doctest::Approx(want.power[k]).epsilon(1e-12));
          CHECK(got.battery.samples[k] == doctest::Approx(want.battery[k]).epsilon(1e-12));
          CHECK(got.temperature.samples[k] == doctest::Approx(want.temp[k]).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("all offload is feasible with positive battery") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      auto s = oracle::random_scenario(rng, 10);
      const auto rep = check_feasibility(s, DecisionVector::uniform(s.request_list(), false));
      CHECK(rep.feasible());
      for (const auto& d : rep.devices) CHECK(d.battery.worst == s.device(d.device).battery_joules);
    }
  }

  TEST_CASE("request above TDP violates power at its arrival") {
    auto d = hololens_like();
    auto s = single_device(d, {{"r0", "hololens", 12.5, 35, 3.0}}, 100, 0.5);
    const auto rep = check_feasibility(s, DecisionVector::uniform(s.request_list(), true));
    CHECK_FALSE(rep.feasible());
    const auto& f = rep.devices.at(0);
    CHECK(f.power.violated);
    REQUIRE(f.power.first_violation_s.has_value());
    CHECK(*f.power.first_violation_s == doctest::Approx(12.5));
    CHECK(f.power.worst == doctest::Approx(3.0));
    CHECK(f.power.limit == 2.0);
  }

  TEST_CASE("three stacked requests overheat") {
    auto d = glass_like();
    d.tdp_watts = 1.8;
    const double dt = 0.1;
    auto one = single_device(d, {{"r0", "glass", 0, 65, 0.6}}, 600, dt);
    CHECK(check_feasibility(one, DecisionVector::uniform(one.request_list(), true)).feasible());

    std::vector<Request> reqs{{"r0", "glass", 0, 65, 0.6}, {"r1", "glass", 0, 65, 0.6}, {"r2", "glass", 0, 65, 0.6}};
    auto s = single_device(d, reqs, 600, dt);
    const auto rep = check_feasibility(s, DecisionVector::uniform(reqs, true));
    CHECK_FALSE(rep.feasible());
    const auto& f = rep.devices.at(0);
    CHECK(f.temperature.violated);
    CHECK_FALSE(f.power.violated);
    CHECK_FALSE(f.battery.violated);

    const auto want = oracle::device_traces(d, reqs, {true, true, true}, s.horizon_s, dt);
    double peak = 0.0;
    for (double v : want.temp) peak = std::max(peak, v);
    CHECK(peak > 43.0);
    CHECK(f.temperature.worst == doctest::Approx(peak).epsilon(1e-10));
    std::size_t first = 0;
    while (want.temp[first] <= 43.0 + 1e-9) ++first;
    REQUIRE(f.temperature.first_violation_s.has_value());
    CHECK(*f.temperature.first_violation_s == doctest::Approx(first * dt));
  }

  TEST_CASE("battery depletion is reported") {
    auto d = hololens_like();
    d.battery_joules = 100.0;
    auto s = single_device(d, {{"r0", "hololens", 0, 35, 2}, {"r1", "hololens", 50, 35, 2}}, 200, 1);
    const auto rep = check_feasibility(s, DecisionVector::uniform(s.request_list(), true));
    CHECK(rep.devices.at(0).battery.violated);
    CHECK(rep.devices.at(0).battery.worst < 0.0);
  }

  TEST_CASE("oracle trivial instances") {
    auto d = hololens_like();
    auto s = single_device(d, {{"r0", "hololens", 10, 35, 2}}, 300, 1);
    auto res = oracle_optimize(s);
    CHECK(res.objective == 1);
    CHECK(res.decisions.local("r0"));

    d.thermal = ImpulseResponse::parametric({{20.0, 10.0}}, 50.0);
    auto hot = single_device(d, {{"r0", "hololens", 10, 35, 2}}, 300, 1);
    res = oracle_optimize(hot);
    CHECK(res.objective == 0);
    CHECK_FALSE(res.decisions.local("r0"));
  }

  TEST_CASE("oracle ties break toward earlier offloads") {
    auto d = glass_like();
    d.battery_joules = 45.0;  // room for exactly one request
    auto s = single_device(d, {{"r0", "glass", 10, 65, 0.6}, {"r1", "glass", 200, 65, 0.6}}, 400, 1);
    const auto res = oracle_optimize(s);
    CHECK(res.objective == 1);
    CHECK_FALSE(res.decisions.local("r0"));
    CHECK(res.decisions.local("r1"));
  }

  TEST_CASE("oracle matches exhaustive enumeration") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
      auto s = oracle::random_scenario(rng, 10);
      const auto res = oracle_optimize(s, trial % 2 ? Exec::serial : Exec::parallel);
      CHECK(res.objective == oracle::best_local_count(s));
      CHECK(static_cast<int>(res.decisions.count_local()) == res.objective);
      CHECK(oracle::feasible(s, res.decisions));
      CHECK(check_feasibility(s, res.decisions).feasible());
    }
  }

  TEST_CASE("oracle rejects oversized instances") {
    auto d = hololens_like();
    std::vector<Request> reqs;
    for (int i = 0; i < 21; ++i) reqs.push_back({"r" + std::to_string(i), "hololens", 100.0 * i, 35, 2});
    auto s = single_device(d, reqs, 3600, 1);
    CHECK_THROWS_AS(oracle_optimize(s), ConfigError);
  }

  TEST_CASE("oracle with infeasible floor") {
    auto d = hololens_like();
    d.idle_power_watts = 1.0;
    d.battery_joules = 10.0;
    auto s = single_device(d, {{"r0", "hololens", 10, 35, 1}}, 100, 1);
    CHECK_THROWS_AS(oracle_optimize(s), NumericError);
  }

  TEST_CASE("scenario validation") {
    auto d = hololens_like();
    Scenario s;
    s.devices = {d};
    s.requests = std::vector<Request>{{"r0", "hololens", 10, 35, 2}};
    s.dt_s = 0.1;
    CHECK_NOTHROW(s.validate());
    s.dt_s = 4.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.dt_s = 0.1;
    s.temp_limit_c = 20.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.temp_limit_c = 43.0;
    s.requests = std::vector<Request>{{"r0", "hololens", 4000, 35, 2}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.requests = std::vector<Request>{{"r0", "ghost", 10, 35, 2}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.requests = std::vector<Request>{{"r0", "hololens", 10, 35, 2}, {"r0", "hololens", 20, 35, 2}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.requests = std::vector<Request>{};
    s.devices.push_back(d);
    CHECK_THROWS_AS(s.validate(), ConfigError);

    DeviceSpec bad = d;
    bad.request_power_watts = 3.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = d;
    bad.battery_joules = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}
