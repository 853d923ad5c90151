#include "tao/thermal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tao/csv.hpp"
#include "tao/errors.hpp"

namespace tao {

ImpulseResponse ImpulseResponse::parametric(std::vector<ThermalStage> stages, double truncation_horizon_s) {
  if (stages.empty()) throw std::invalid_argument("parametric kernel needs at least one stage");
  double max_theta = 0.0;
  for (const auto& s : stages) {
    if (!(s.r_th_c_per_w > 0.0) || !(s.theta_s > 0.0))
      throw std::invalid_argument("thermal stage needs r_th > 0 and theta > 0");
    max_theta = std::max(max_theta, s.theta_s);
  }
  if (!(truncation_horizon_s >= 5.0 * max_theta))
    throw std::invalid_argument("truncation horizon " + std::to_string(truncation_horizon_s) +
                                " s is shorter than 5 * max(theta) = " + std::to_string(5.0 * max_theta) + " s");
  ImpulseResponse r;
  r.parametric_ = true;
  r.stages_ = std::move(stages);
  r.truncation_s_ = truncation_horizon_s;
  return r;
}

ImpulseResponse ImpulseResponse::tabulated(double dt_s, std::vector<double> samples) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("tabulated kernel needs dt > 0");
  if (samples.empty()) throw std::invalid_argument("tabulated kernel has no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i] >= 0.0) || !std::isfinite(samples[i]))
      throw std::invalid_argument("kernel sample " + std::to_string(i) + " is negative or not finite");
  }
  const double peak = *std::max_element(samples.begin(), samples.end());
  if (!(peak > 0.0)) throw std::invalid_argument("tabulated kernel is identically zero");
  if (samples.back() > kKernelTailFraction * peak)
    throw std::invalid_argument("kernel tail has not decayed to 1% of its peak; truncation horizon too short");
  ImpulseResponse r;
  r.parametric_ = false;
  r.dt_s_ = dt_s;
  r.truncation_s_ = dt_s * static_cast<double>(samples.size() - 1);
  r.samples_ = std::move(samples);
  return r;
}

double ImpulseResponse::evaluate(double t_s) const {
  if (t_s < 0.0) return 0.0;
  if (parametric_) {
    double h = 0.0;
    for (const auto& s : stages_) h += s.r_th_c_per_w / s.theta_s * std::exp(-t_s / s.theta_s);
    return h;
  }
  const double pos = t_s / dt_s_;
  const double nearest = std::round(pos);
  const auto last = static_cast<double>(samples_.size() - 1);
  if (std::abs(pos - nearest) <= 1e-9 * std::max(1.0, pos)) {
    if (nearest > last) return 0.0;
    return samples_[static_cast<std::size_t>(nearest)];
  }
  if (pos > last) return 0.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  return samples_[lo] * (1.0 - frac) + samples_[lo + 1] * frac;
}

double ImpulseResponse::total_resistance() const {
  if (parametric_) {
    double r = 0.0;
    for (const auto& s : stages_) r += s.r_th_c_per_w;
    return r;
  }
  return dt_s_ * std::accumulate(samples_.begin(), samples_.end(), 0.0);
}

double ImpulseResponse::peak() const {
  // parametric h is a sum of decaying exponentials, maximal at t = 0
  if (parametric_) return evaluate(0.0);
  return *std::max_element(samples_.begin(), samples_.end());
}

ImpulseResponse tabulate(const ImpulseResponse& response, double dt_s) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("tabulate needs dt > 0");
  const std::size_t n = grid_size(response.truncation_horizon_s(), dt_s);
  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k) h[k] = response.evaluate(static_cast<double>(k) * dt_s);
  return ImpulseResponse::tabulated(dt_s, std::move(h));
}

double pulse_response_closed_form(double amplitude_w, double pulse_s, ThermalStage stage, double t_s) {
  if (t_s <= 0.0) return 0.0;
  const double b = amplitude_w * stage.r_th_c_per_w;
  const double rise = 1.0 - std::exp(-t_s / stage.theta_s);
  if (t_s <= pulse_s) return b * rise;
  return b * (rise - (1.0 - std::exp(-(t_s - pulse_s) / stage.theta_s)));
}

double single_pulse_peak_rise(const ImpulseResponse& response, double amplitude_w, double pulse_s,
                              double dt_s) {
  if (response.is_parametric()) {
    double rise = 0.0;
    for (const auto& s : response.stages()) rise += pulse_response_closed_form(amplitude_w, pulse_s, s, pulse_s);
    return rise;
  }
  const ImpulseResponse table =
      std::abs(response.table_dt_s() - dt_s) <= 1e-12 * dt_s ? response : tabulate(response, dt_s);
  const std::size_t pulse_last = static_cast<std::size_t>(std::llround(pulse_s / dt_s));
  const std::size_t n = pulse_last + table.table().size() + 1;
  std::vector<double> p(n, 0.0);
  std::fill(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(pulse_last + 1), amplitude_w);
  const auto rise = kernels::convolve_step_superposition(p, table.table(), dt_s);
  return *std::max_element(rise.begin(), rise.end());
}

TimeSeries convolve_temperature(const TimeSeries& power, const ImpulseResponse& response, double ambient_c,
                                Exec exec) {
  TimeSeries out{power.t0_s, power.dt_s, {}};
  if (response.is_parametric()) {
    out.samples = kernels::convolve_recursive(power.samples, response.stages(), power.dt_s);
  } else {
    if (std::abs(response.table_dt_s() - power.dt_s) > 1e-9 * power.dt_s)
      throw std::invalid_argument("power trace dt and kernel dt differ; tabulate the kernel first");
    const auto h = response.table();
    const std::size_t changes = kernels::count_level_changes(power.samples);
    if (changes + 1 < h.size()) {
      out.samples = kernels::convolve_step_superposition(power.samples, h, power.dt_s);
    } else if (exec == Exec::parallel) {
      out.samples = kernels::convolve_direct_omp(power.samples, h, power.dt_s);
    } else {
      out.samples = kernels::convolve_direct_serial(power.samples, h, power.dt_s);
    }
  }
  for (double& v : out.samples) v += ambient_c;
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

bool parse_number(std::string_view text, double& value) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end && std::isfinite(value);
}

}  // namespace

ImpulseResponse load_impulse_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open impulse response file");
  const std::string where = path.string() + ":";
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    view = trim(view);
    if (view.empty()) continue;
    if (!have_header) {
      if (view != "time_s,response_c_per_j")
        throw ConfigError(where + std::to_string(line_no) + ": expected header 'time_s,response_c_per_j'");
      have_header = true;
      continue;
    }
    const auto comma = view.find(',');
    double t = 0.0;
    double h = 0.0;
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos ||
        !parse_number(view.substr(0, comma), t) || !parse_number(view.substr(comma + 1), h))
      throw ConfigError(where + std::to_string(line_no) + ": expected two numeric fields");
    if (h < 0.0) throw ConfigError(where + std::to_string(line_no) + ": negative response sample");
    times.push_back(t);
    values.push_back(h);
  }
  if (!have_header) throw ConfigError(where + " missing header 'time_s,response_c_per_j'");
  if (times.size() < 2) throw ConfigError(where + " need at least two samples");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ConfigError(where + " time column must be strictly increasing");
  if (std::abs(times[0]) > 1e-3 * dt) throw ConfigError(where + " time column must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > 1e-3 * dt)
      throw ConfigError(where + " non-uniform time grid near row " + std::to_string(i + 1));
  }
  try {
    return ImpulseResponse::tabulated(dt, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + " " + e.what());
  }
}

void write_impulse_csv(const std::filesystem::path& path, const ImpulseResponse& tabulated) {
  if (tabulated.is_parametric()) throw std::invalid_argument("write_impulse_csv needs a tabulated kernel");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << "time_s,response_c_per_j\n";
  const auto h = tabulated.table();
  for (std::size_t k = 0; k < h.size(); ++k)
    out << format_double(static_cast<double>(k) * tabulated.table_dt_s()) << ',' << format_double(h[k]) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace tao
