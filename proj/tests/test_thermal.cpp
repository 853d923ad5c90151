#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "tao/errors.hpp"
#include "tao/thermal.hpp"

using namespace tao;

namespace {

TimeSeries pulse_trace(double amp, double start, double len, double horizon, double dt) {
  TimeSeries p{0.0, dt, std::vector<double>(grid_size(horizon, dt), 0.0)};
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double t = p.time(k);
    if (t >= start - 1e-9 && t < start + len - 1e-9) p.samples[k] = amp;
  }
  return p;
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tao_thermal_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST_SUITE("thermal") {
  TEST_CASE("tabulate single stage") {
    const auto h = tabulate(ImpulseResponse::parametric({{10.0, 100.0}}, 500.0), 1.0);
    REQUIRE(!h.is_parametric());
    CHECK(h.table()[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(h.table()[100] == doctest::Approx(0.1 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(h.table()[100] == doctest::Approx(0.03679).epsilon(1e-4));
    CHECK(h.table().size() == 501);
  }

  TEST_CASE("two equal stages add at the origin") {
    const auto two = tabulate(ImpulseResponse::parametric({{5.0, 100.0}, {5.0, 100.0}}, 500.0), 1.0);
    const auto one = tabulate(ImpulseResponse::parametric({{10.0, 100.0}}, 500.0), 1.0);
    CHECK(two.table()[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(two.table()[0] == doctest::Approx(one.table()[0]).epsilon(1e-14));
  }

  TEST_CASE("resampling a tabulated kernel to twice the step") {
    std::vector<double> s;
    for (int k = 0; k <= 200; ++k) s.push_back(0.1 * std::exp(-0.5 * k / 20.0));
    const auto fine = ImpulseResponse::tabulated(0.5, s);
    const auto coarse = tabulate(fine, 1.0);
    REQUIRE(coarse.table().size() == 101);
    for (std::size_t k = 0; k < coarse.table().size(); ++k) CHECK(coarse.table()[k] == s[2 * k]);
  }

  TEST_CASE("kernel validation") {
    CHECK_THROWS_AS(ImpulseResponse::parametric({}, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseResponse::parametric({{0.0, 10.0}}, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseResponse::parametric({{1.0, -1.0}}, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseResponse::parametric({{1.0, 100.0}}, 499.0), std::invalid_argument);
    CHECK_NOTHROW(ImpulseResponse::parametric({{1.0, 100.0}}, 500.0));
    CHECK_THROWS_AS(ImpulseResponse::tabulated(1.0, {0.1, 0.09}), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseResponse::tabulated(1.0, {0.1, -0.01, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseResponse::tabulated(0.0, {0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseResponse::tabulated(1.0, {}), std::invalid_argument);
  }

  TEST_CASE("parametric total resistance and impulse form") {
    const auto h = ImpulseResponse::parametric({{3.0, 40.0}, {5.0, 400.0}}, 2000.0);
    CHECK(h.total_resistance() == doctest::Approx(8.0));
    CHECK(h.evaluate(0.0) == doctest::Approx(3.0 / 40.0 + 5.0 / 400.0));
    CHECK(h.evaluate(100.0) == doctest::Approx(3.0 / 40.0 * std::exp(-2.5) + 5.0 / 400.0 * std::exp(-0.25)));
  }

  TEST_CASE("closed form pulse response") {
    const ThermalStage st{10.0, 100.0};
    CHECK(pulse_response_closed_form(2.0, 35.0, st, 0.0) == 0.0);
    CHECK(pulse_response_closed_form(2.0, 35.0, st, 35.0) == doctest::Approx(20.0 * (1.0 - std::exp(-0.35))));
    CHECK(pulse_response_closed_form(2.0, 35.0, st, 35.0) == doctest::Approx(5.906).epsilon(1e-3));
    CHECK(std::abs(pulse_response_closed_form(2.0, 35.0, st, 1e5)) < 1e-12);
    for (double t : {10.0, 35.0, 50.0, 300.0})
      CHECK(pulse_response_closed_form(2.0, 35.0, st, t) ==
            doctest::Approx(oracle::pulse_rise({st}, 2.0, 0.0, 35.0, t)).epsilon(1e-12));
  }

  TEST_CASE("zero power gives ambient") {
    const auto h = ImpulseResponse::parametric({{10.0, 100.0}}, 500.0);
    TimeSeries p{0.0, 0.1, std::vector<double>(1001, 0.0)};
    const auto tau = convolve_temperature(p, h, 25.0);
    for (double v : tau.samples) CHECK(v == 25.0);
    const auto tab = tabulate(h, 0.1);
    const auto tau2 = convolve_temperature(p, tab, 25.0);
    for (double v : tau2.samples) CHECK(v == 25.0);
  }

  TEST_CASE("step input settles at ambient plus A R") {
    const auto h = ImpulseResponse::parametric({{10.0, 100.0}}, 500.0);
    const double dt = 0.1;
    TimeSeries p{0.0, dt, std::vector<double>(grid_size(700.0, dt), 2.0)};
    const auto tau = convolve_temperature(p, h, 25.0);
    CHECK(tau.back() == doctest::Approx(45.0).epsilon(0.005));
  }

  TEST_CASE("steady state for two stages after seven time constants") {
    const auto h = ImpulseResponse::parametric({{3.0, 40.0}, {5.0, 400.0}}, 2000.0);
    const double dt = 0.1;
    TimeSeries p{0.0, dt, std::vector<double>(grid_size(2800.0, dt), 1.5)};
    for (Exec e : {Exec::serial, Exec::parallel}) {
      CHECK(convolve_temperature(p, h, 25.0, e).back() == doctest::Approx(25.0 + 12.0).epsilon(0.005));
      CHECK(convolve_temperature(p, tabulate(h, dt), 25.0, e).back() ==
            doctest::Approx(25.0 + 12.0).epsilon(0.005));
    }
  }

  TEST_CASE("rectangular pulse against closed form") {
    const ThermalStage st{10.0, 100.0};
    const auto h = ImpulseResponse::parametric({st}, 500.0);
    for (double dt : {0.1, 1.0}) {
      const auto p = pulse_trace(2.0, 0.0, 35.0, 400.0, dt);
      const double peak = pulse_response_closed_form(2.0, 35.0, st, 35.0);
      for (const auto& resp : {h, tabulate(h, dt)}) {
        const auto tau = convolve_temperature(p, resp, 0.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < tau.size(); ++k)
          worst = std::max(worst, std::abs(tau.samples[k] - pulse_response_closed_form(2.0, 35.0, st, tau.time(k))));
        // the closed-interval pulse carries one extra sample of power, a first-order
        // error of A*R*dt/theta; it is under 1% of the peak once dt = theta/1000
        if (dt <= st.theta_s / 1000.0 + 1e-12) CHECK(worst < 0.01 * peak);
        CHECK(worst <= 1.05 * 2.0 * st.r_th_c_per_w * dt / st.theta_s);
      }
    }
  }

  TEST_CASE("linearity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const auto h = ImpulseResponse::parametric({{3.0, 40.0}, {5.0, 400.0}}, 2000.0);
    const double dt = 1.0;
    TimeSeries p1{0.0, dt, {}}, p2{0.0, dt, {}}, mix{0.0, dt, {}};
    for (int k = 0; k < 3000; ++k) {
      p1.samples.push_back(u(rng));
      p2.samples.push_back(u(rng));
      mix.samples.push_back(0.7 * p1.samples.back() + 1.9 * p2.samples.back());
    }
    for (const auto& resp : {h, tabulate(h, dt)}) {
      const auto a = convolve_temperature(p1, resp, 0.0);
      const auto b = convolve_temperature(p2, resp, 0.0);
      const auto c = convolve_temperature(mix, resp, 0.0);
      for (std::size_t k = 0; k < c.size(); ++k) {
        const double want = 0.7 * a.samples[k] + 1.9 * b.samples[k];
        CHECK(std::abs(c.samples[k] - want) <= 1e-9 * std::max(1.0, std::abs(want)));
      }
    }
  }

  TEST_CASE("time invariance") {
    const auto h = tabulate(ImpulseResponse::parametric({{3.0, 40.0}, {5.0, 400.0}}, 2000.0), 1.0);
    const auto base = pulse_trace(1.0, 100.0, 35.0, 3000.0, 1.0);
    const auto shifted = pulse_trace(1.0, 137.0, 35.0, 3000.0, 1.0);
    const auto a = convolve_temperature(base, h, 0.0);
    const auto b = convolve_temperature(shifted, h, 0.0);
    for (std::size_t k = 37; k < b.size(); ++k) CHECK(b.samples[k] == doctest::Approx(a.samples[k - 37]).epsilon(1e-12));
    for (std::size_t k = 0; k < 137; ++k) CHECK(b.samples[k] == 0.0);
  }

  TEST_CASE("kernel implementations agree with brute force") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<ThermalStage> stages{{2.0, 15.0}, {26.0, 400.0}};
    const double dt = 1.0;
    std::vector<double> p(2500, 0.0);
    for (int i = 0; i < 12; ++i) {
      const auto start = static_cast<std::size_t>(u(rng) * 2400.0);
      for (std::size_t k = start; k < std::min<std::size_t>(start + 35, p.size()); ++k) p[k] += 2.0;
    }
    const auto h = tabulate(ImpulseResponse::parametric(stages, 2000.0), dt);
    std::vector<double> hk(h.table().begin(), h.table().end());
    auto truncated = [&](double t) {
      const auto k = static_cast<std::size_t>(std::lround(t / dt));
      return k < hk.size() ? hk[k] : 0.0;
    };
    const auto want = oracle::convolve(p, truncated, dt);
    const auto serial = kernels::convolve_direct_serial(p, hk, dt);
    const auto omp = kernels::convolve_direct_omp(p, hk, dt);
    const auto steps = kernels::convolve_step_superposition(p, hk, dt);
    const auto untruncated = oracle::convolve(p, oracle::stage_kernel(stages), dt);
    const auto rec = kernels::convolve_recursive(p, stages, dt);
    for (std::size_t n = 0; n < p.size(); ++n) {
      CHECK(serial[n] == omp[n]);
      CHECK(serial[n] == doctest::Approx(want[n]).epsilon(1e-10));
      CHECK(steps[n] == doctest::Approx(want[n]).epsilon(1e-9));
      CHECK(rec[n] == doctest::Approx(untruncated[n]).epsilon(1e-9));
    }
    CHECK(kernels::count_level_changes(std::vector<double>{0, 0, 1, 1, 0, 2}) == 3);
  }

  TEST_CASE("tabulated kernel requires the trace step") {
    const auto h = tabulate(ImpulseResponse::parametric({{1.0, 10.0}}, 50.0), 1.0);
    TimeSeries p{0.0, 0.5, std::vector<double>(10, 1.0)};
    CHECK_THROWS_AS(convolve_temperature(p, h, 25.0), std::invalid_argument);
  }

  TEST_CASE("single pulse peak rise") {
    const auto h = ImpulseResponse::parametric({{20.0, 100.0}}, 500.0);
    CHECK(single_pulse_peak_rise(h, 0.6, 65.0, 0.1) == doctest::Approx(12.0 * (1.0 - std::exp(-0.65))));
    CHECK(single_pulse_peak_rise(h, 0.6, 65.0, 0.1) == doctest::Approx(5.74).epsilon(1e-3));
    const auto tab = tabulate(h, 0.1);
    CHECK(single_pulse_peak_rise(tab, 0.6, 65.0, 0.1) == doctest::Approx(5.74).epsilon(0.01));
  }

  TEST_CASE("impulse csv minimal file") {
    const auto path = temp_file("minimal.csv");
    write_text(path, "time_s,response_c_per_j\n0,0.1\n1,0.09\n2,0.0005\n");
    const auto h = load_impulse_csv(path);
    CHECK(h.table_dt_s() == doctest::Approx(1.0));
    REQUIRE(h.table().size() == 3);
    CHECK(h.table()[1] == 0.09);
    write_text(path, "time_s,response_c_per_j\r\n0,0.1\r\n0.5,0.09\r\n1.0,0.0005\r\n");
    CHECK(load_impulse_csv(path).table_dt_s() == doctest::Approx(0.5));
  }

  TEST_CASE("impulse csv rejects malformed input") {
    const auto path = temp_file("bad.csv");
    write_text(path, "time_s,response_c_per_j\n0,0.1\n1,0.05\n2.01,0.0005\n");
    CHECK_THROWS_AS(load_impulse_csv(path), ConfigError);
    write_text(path, "t,h\n0,0.1\n1,0.0\n");
    CHECK_THROWS_AS(load_impulse_csv(path), ConfigError);
    write_text(path, "time_s,response_c_per_j\n0,0.1\n1,-0.2\n2,0\n");
    CHECK_THROWS_AS(load_impulse_csv(path), ConfigError);
    write_text(path, "time_s,response_c_per_j\n0,0.1\n1,abc\n");
    CHECK_THROWS_AS(load_impulse_csv(path), ConfigError);
    write_text(path, "time_s,response_c_per_j\n0,0.1\n1,0.09\n");
    CHECK_THROWS_AS(load_impulse_csv(path), ConfigError);
    write_text(path, "");
    CHECK_THROWS_AS(load_impulse_csv(path), ConfigError);
    CHECK_THROWS_AS(load_impulse_csv(temp_file("missing-file.csv")), ConfigError);
    write_text(path, "time_s,response_c_per_j\n0,0.1\n1,0.05\n1,0.0005\n");
    CHECK_THROWS_AS(load_impulse_csv(path), ConfigError);
  }

  TEST_CASE("impulse csv round trip") {
    const auto h = tabulate(ImpulseResponse::parametric({{4.0, 15.0}, {60.0, 500.0}}, 2500.0), 0.1);
    const auto path = temp_file("roundtrip.csv");
    write_impulse_csv(path, h);
    const auto back = load_impulse_csv(path);
    REQUIRE(back.table().size() == h.table().size());
    for (std::size_t k = 0; k < h.table().size(); ++k) CHECK(back.table()[k] == h.table()[k]);
    CHECK(back.table_dt_s() == h.table_dt_s());
  }
}
