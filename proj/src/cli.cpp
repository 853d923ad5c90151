#include "tao/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tao/chance.hpp"
#include "tao/csv.hpp"
#include "tao/errors.hpp"
#include "tao/plot.hpp"
#include "tao/scenario_io.hpp"
#include "tao/sim.hpp"

namespace tao::cli {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<double> omega;
  std::optional<std::string> mode;
  std::optional<std::string> strategies;
  std::optional<std::string> plots;
};

void add_common_flags(CLI::App& sub, Overrides& o) {
  sub.add_option("--config", o.config, "Scenario/experiment file")->required();
  sub.add_option("--out", o.out, "Output directory");
  sub.add_option("--seed", o.seed, "Base seed for runs");
  sub.add_option("--runs", o.runs, "Number of Monte Carlo runs");
  sub.add_option("--omega", o.omega, "Confidence level in (0, 1)");
  sub.add_option("--mode", o.mode, "Load model: paper or busy-server");
  sub.add_option("--strategy", o.strategies, "Strategy name or comma-separated list");
  sub.add_option("--plots", o.plots, "Write SVG plots: on or off");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

ExperimentConfig load(const Overrides& o) {
  ExperimentConfig cfg = load_experiment(o.config);
  if (o.out) cfg.out_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.runs) {
    if (*o.runs == 0) throw ConfigError("--runs must be positive");
    cfg.runs = *o.runs;
  }
  if (o.omega) {
    if (!(*o.omega > 0.0 && *o.omega < 1.0)) throw ConfigError("--omega must lie in (0, 1)");
    cfg.policy.omega = *o.omega;
  }
  if (o.mode) cfg.policy.mode = parse_load_model(*o.mode);
  if (o.strategies) {
    cfg.strategies.clear();
    for (const auto& s : split(*o.strategies, ',')) cfg.strategies.push_back(parse_strategy(s));
    if (cfg.strategies.empty()) throw ConfigError("--strategy names no strategy");
  }
  if (o.plots) {
    if (*o.plots == "on") cfg.plots = true;
    else if (*o.plots == "off") cfg.plots = false;
    else throw ConfigError("--plots expects on or off");
  }
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

std::size_t output_stride(const ExperimentConfig& cfg) {
  const double ratio = cfg.dt_out_s / cfg.scenario.dt_s;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * rounded)
    throw ConfigError("dt_out must be a whole multiple of the scenario dt");
  return static_cast<std::size_t>(rounded);
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
}

std::vector<AlphaSolution> tao_alphas(const ExperimentConfig& cfg) {
  std::vector<AlphaSolution> sols;
  for (const auto& d : cfg.scenario.devices) {
    const auto it = cfg.tao_alpha.find(d.id);
    if (it != cfg.tao_alpha.end()) {
      AlphaSolution fixed_alpha;
      fixed_alpha.device = d.id;
      fixed_alpha.alpha = it->second;
      sols.push_back(fixed_alpha);
      continue;
    }
    const ThermalSetting setting{cfg.scenario.horizon_s, cfg.scenario.dt_s, cfg.scenario.temp_limit_c};
    sols.push_back(solve_alpha(d, cfg.scenario.rate_for(d.id), cfg.policy, setting));
  }
  return sols;
}

Strategy make_strategy(StrategyKind kind, const ExperimentConfig& cfg, const std::vector<AlphaSolution>& alphas) {
  Strategy s;
  s.kind = kind;
  s.guard = cfg.tao_guard;
  for (const auto& a : alphas) s.alpha[a.device] = a.alpha;
  return s;
}

bool needs_alpha(const std::vector<StrategyKind>& kinds) {
  return std::find(kinds.begin(), kinds.end(), StrategyKind::tao) != kinds.end();
}

std::string alpha_table_csv(const std::vector<AlphaSolution>& sols, double omega, LoadModel mode) {
  std::string text = "device,omega,mode,alpha,binding,slack,power_margin,battery_margin,thermal_margin\n";
  for (const auto& s : sols) {
    text += s.device + ',' + format_double(omega) + ',' + std::string(to_string(mode)) + ',' +
            format_double(s.alpha) + ',' + std::string(to_string(s.binding)) + ',' + format_double(s.slack_at_alpha) +
            ',' + format_double(s.power.margin) + ',' + format_double(s.battery.margin) + ',' +
            format_double(s.thermal.margin) + '\n';
  }
  return text;
}

int cmd_solve_alpha(const Overrides& o, std::ostream& out) {
  const auto cfg = load(o);
  const auto sols = solve_alpha(cfg.scenario, cfg.policy);
  out << "omega=" << cfg.policy.omega << " mode=" << to_string(cfg.policy.mode) << "\n";
  out << std::left << std::setw(12) << "device" << std::setw(12) << "alpha" << std::setw(13) << "binding"
      << std::setw(14) << "power_margin" << std::setw(16) << "battery_margin" << "thermal_margin\n";
  for (const auto& s : sols) {
    out << std::left << std::setw(12) << s.device << std::setw(12) << fixed(s.alpha, 6) << std::setw(13)
        << to_string(s.binding) << std::setw(14) << fixed(s.power.margin, 6) << std::setw(16)
        << fixed(s.battery.margin, 6) << fixed(s.thermal.margin, 6) << "\n";
  }
  write_text(cfg.out_dir / "alpha.csv", alpha_table_csv(sols, cfg.policy.omega, cfg.policy.mode));
  return kExitOk;
}

void print_summary(std::ostream& out, const std::string& label, const RunResult& r) {
  for (const auto& d : r.devices) {
    const auto& m = d.metrics;
    out << label << " " << m.device << ": n_local=" << m.n_local << " n_offloaded=" << m.n_offloaded
        << " cost=" << format_double(m.total_cost) << " max_temp_c=" << fixed(m.max_temp_c, 3)
        << " temp_violation_fraction=" << fixed(m.temp_violation_fraction, 4)
        << " final_battery_j=" << fixed(m.final_battery_j, 3) << "\n";
  }
}

std::string summary_csv(const std::vector<std::pair<std::string, const RunResult*>>& runs) {
  std::string text =
      "strategy,device,n_local,n_offloaded,total_cost,max_temp_c,temp_violation_fraction,final_battery_j,max_power_w\n";
  for (const auto& [name, r] : runs) {
    for (const auto& d : r->devices) {
      const auto& m = d.metrics;
      text += name + ',' + m.device + ',' + std::to_string(m.n_local) + ',' + std::to_string(m.n_offloaded) + ',' +
              format_double(m.total_cost) + ',' + format_double(m.max_temp_c) + ',' +
              format_double(m.temp_violation_fraction) + ',' + format_double(m.final_battery_j) + ',' +
              format_double(m.max_power_w) + '\n';
    }
  }
  return text;
}

PlotSpec temperature_plot(const std::string& title, const std::vector<std::string>& strategies) {
  PlotSpec spec;
  spec.title = title;
  spec.x_column = "time_s";
  spec.x_label = "time [s]";
  spec.y_label = "temperature [degC]";
  const char* colors[] = {"#1f77b4", "#888888", "#2ca02c", "#d62728", "#9467bd"};
  for (std::size_t i = 0; i < strategies.size(); ++i)
    spec.series.push_back({strategies[i] + "_temp_c", strategies[i], colors[i % 5], false});
  spec.limit_column = "limit_c";
  spec.marker_column = "arrival";
  return spec;
}

int cmd_simulate(const Overrides& o, std::ostream& out) {
  const auto cfg = load(o);
  const auto kind = cfg.strategies.front();
  const std::size_t stride = output_stride(cfg);
  const auto alphas = kind == StrategyKind::tao ? tao_alphas(cfg) : std::vector<AlphaSolution>{};
  const auto result = run(cfg.scenario, make_strategy(kind, cfg, alphas), cfg.seed);
  const std::string name(to_string(kind));
  for (const auto& p : write_run_csvs(cfg.out_dir, result, stride, name + "_")) {
    if (!cfg.plots) continue;
    PlotSpec spec;
    spec.title = p.stem().string();
    spec.x_column = "time_s";
    spec.x_label = "time [s]";
    spec.y_label = "temperature [degC]";
    spec.series = {{"temp_c", name, "#1f77b4", false}};
    auto svg = p;
    svg.replace_extension(".svg");
    render_plot(p, svg, spec);
  }
  print_summary(out, name, result);
  out << name << " pooled temp_violation_fraction=" << fixed(result.temp_violation_fraction(), 4) << "\n";
  write_text(cfg.out_dir / "summary.csv", summary_csv({{name, &result}}));
  return kExitOk;
}

struct StrategyEnsemble {
  std::string name;
  EnsembleSummary summary;
};

std::vector<StrategyEnsemble> run_ensembles(const ExperimentConfig& cfg, const std::vector<StrategyKind>& kinds,
                                            const std::vector<AlphaSolution>& alphas) {
  std::vector<StrategyEnsemble> out;
  for (const auto kind : kinds)
    out.push_back({std::string(to_string(kind)),
                   monte_carlo(cfg.scenario, make_strategy(kind, cfg, alphas), cfg.runs, cfg.seed)});
  return out;
}

double cost_reduction_pct(double cost, double baseline) {
  if (baseline == 0.0) return cost == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return (baseline - cost) / baseline * 100.0;
}

std::string ensemble_table_csv(const std::vector<StrategyEnsemble>& ens) {
  std::string text =
      "strategy,runs,mean_total_cost,mean_n_local,mean_max_temp_c,max_max_temp_c,mean_temp_violation_fraction,"
      "temp_violation_run_fraction,any_violation_run_fraction,mean_final_battery_j,thermal_flag\n";
  for (const auto& e : ens) {
    const auto& s = e.summary;
    text += e.name + ',' + std::to_string(s.runs.size()) + ',' + format_double(s.mean_total_cost) + ',' +
            format_double(s.mean_n_local) + ',' + format_double(s.mean_max_temp_c) + ',' +
            format_double(s.max_max_temp_c) + ',' + format_double(s.mean_temp_violation_fraction) + ',' +
            format_double(s.temp_violation_run_fraction) + ',' + format_double(s.any_violation_run_fraction) + ',' +
            format_double(s.mean_final_battery_j) + ',' + (s.temp_violation_run_fraction > 0.0 ? "1" : "0") + '\n';
  }
  return text;
}

std::string deltas_csv(const std::vector<StrategyEnsemble>& ens) {
  std::string text = "strategy,baseline,cost_reduction_pct\n";
  for (std::size_t a = 0; a < ens.size(); ++a)
    for (std::size_t b = 0; b < ens.size(); ++b) {
      if (a == b) continue;
      text += ens[a].name + ',' + ens[b].name + ',' +
              format_double(cost_reduction_pct(ens[a].summary.mean_total_cost, ens[b].summary.mean_total_cost)) +
              '\n';
    }
  return text;
}

int cmd_compare(const Overrides& o, std::ostream& out) {
  const auto cfg = load(o);
  if (cfg.strategies.size() < 2) throw ConfigError("compare needs at least two strategies");
  const auto alphas = needs_alpha(cfg.strategies) ? tao_alphas(cfg) : std::vector<AlphaSolution>{};
  const auto ens = run_ensembles(cfg, cfg.strategies, alphas);
  out << "runs=" << cfg.runs << " base_seed=" << cfg.seed << "\n";
  out << std::left << std::setw(16) << "strategy" << std::setw(12) << "mean_cost" << std::setw(12) << "n_local"
      << std::setw(12) << "max_temp" << std::setw(14) << "viol_time" << std::setw(12) << "viol_runs" << "flag\n";
  for (const auto& e : ens) {
    const auto& s = e.summary;
    out << std::left << std::setw(16) << e.name << std::setw(12) << fixed(s.mean_total_cost, 3) << std::setw(12)
        << fixed(s.mean_n_local, 3) << std::setw(12) << fixed(s.max_max_temp_c, 3) << std::setw(14)
        << fixed(s.mean_temp_violation_fraction, 5) << std::setw(12) << fixed(s.temp_violation_run_fraction, 4)
        << (s.temp_violation_run_fraction > 0.0 ? "THERMAL-VIOLATION" : "") << "\n";
  }
  for (std::size_t a = 0; a < ens.size(); ++a)
    for (std::size_t b = 0; b < ens.size(); ++b)
      if (a != b)
        out << "cost reduction " << ens[a].name << " vs " << ens[b].name << ": "
            << fixed(cost_reduction_pct(ens[a].summary.mean_total_cost, ens[b].summary.mean_total_cost), 2) << "%\n";
  write_text(cfg.out_dir / "compare.csv", ensemble_table_csv(ens));
  write_text(cfg.out_dir / "compare_deltas.csv", deltas_csv(ens));
  for (const auto& e : ens) write_ensemble_csv(cfg.out_dir / ("ensemble_" + e.name + ".csv"), e.summary);
  return kExitOk;
}

std::vector<double> time_column(std::size_t rows, double dt) {
  std::vector<double> t(rows);
  for (std::size_t i = 0; i < rows; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

int cmd_replicate(const Overrides& o, std::ostream& out) {
  const auto cfg = load(o);
  const auto& sc = cfg.scenario;
  if (!sc.has_explicit_requests()) throw ConfigError("replicate needs a scenario with an explicit request list");
  const std::size_t stride = output_stride(cfg);
  const auto& dir = cfg.out_dir;

  const auto alphas = tao_alphas(cfg);
  write_text(dir / "alpha.csv", alpha_table_csv(alphas, cfg.policy.omega, cfg.policy.mode));
  const auto tao_run = run(sc, make_strategy(StrategyKind::tao, cfg, alphas), cfg.seed);
  const auto sota_run = run(sc, make_strategy(StrategyKind::sota, cfg, alphas), cfg.seed);
  const std::vector<std::string> names{"tao", "sota"};
  const std::vector<const RunResult*> runs{&tao_run, &sota_run};
  const std::size_t rows = tao_run.devices.front().traces.power.downsample(stride).size();
  const auto t_out = time_column(rows, sc.dt_s * static_cast<double>(stride));

  std::vector<std::pair<std::filesystem::path, PlotSpec>> plots;

  {  // impulse responses
    double horizon = 0.0;
    for (const auto& d : sc.devices) horizon = std::max(horizon, d.thermal.truncation_horizon_s());
    const std::size_t n = grid_size(horizon, cfg.dt_out_s);
    CsvTable t;
    t.header = {"time_s"};
    t.columns = {time_column(n, cfg.dt_out_s)};
    PlotSpec spec{"Impulse responses", "time_s", "time [s]", "h [degC/J]", {}, std::nullopt, std::nullopt, false};
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
    for (std::size_t di = 0; di < sc.devices.size(); ++di) {
      std::vector<double> h(n);
      for (std::size_t k = 0; k < n; ++k) h[k] = sc.devices[di].thermal.evaluate(t.columns[0][k]);
      t.header.push_back(sc.devices[di].id + "_h_c_per_j");
      t.columns.push_back(std::move(h));
      spec.series.push_back({t.header.back(), sc.devices[di].id, colors[di % 3], di % 2 == 1});
    }
    write_csv(dir / "impulse_responses.csv", t);
    plots.push_back({dir / "impulse_responses.csv", spec});
  }

  for (const auto& d : sc.devices) {  // temperature evolution per device
    CsvTable t;
    t.header = {"time_s"};
    t.columns = {t_out};
    for (std::size_t s = 0; s < runs.size(); ++s) {
      t.header.push_back(names[s] + "_temp_c");
      t.columns.push_back(runs[s]->device(d.id).traces.temperature.downsample(stride).samples);
    }
    t.header.push_back("limit_c");
    t.columns.push_back(std::vector<double>(rows, sc.temp_limit_c));
    std::vector<double> arrival(rows, 0.0);
    for (const auto& r : sc.requests_for(d.id))
      arrival[nearest_index(r.arrival_s, sc.dt_s * static_cast<double>(stride), rows)] = 1.0;
    t.header.push_back("arrival");
    t.columns.push_back(std::move(arrival));
    const auto path = dir / ("temperature_" + d.id + ".csv");
    write_csv(path, t);
    plots.push_back({path, temperature_plot("Temperature: " + d.id, names)});
  }

  auto per_device_series = [&](const std::string& file, const std::string& suffix, const std::string& title,
                               const std::string& y_label, auto pick) {
    CsvTable t;
    t.header = {"time_s"};
    t.columns = {t_out};
    PlotSpec spec{title, "time_s", "time [s]", y_label, {}, std::nullopt, std::nullopt, false};
    const char* colors[] = {"#1f77b4", "#888888"};
    for (std::size_t s = 0; s < runs.size(); ++s) {
      for (std::size_t di = 0; di < sc.devices.size(); ++di) {
        const auto& dr = runs[s]->device(sc.devices[di].id);
        t.header.push_back(names[s] + "_" + sc.devices[di].id + suffix);
        t.columns.push_back(pick(dr).downsample(stride).samples);
        spec.series.push_back({t.header.back(), names[s] + " " + sc.devices[di].id, colors[s], di % 2 == 1});
      }
    }
    write_csv(dir / file, t);
    plots.push_back({dir / file, spec});
  };
  per_device_series("battery.csv", "_battery_j", "Battery level", "battery [J]",
                    [](const DeviceRun& d) -> const TimeSeries& { return d.traces.battery; });
  per_device_series("cost.csv", "_cost", "Cumulative offloading cost", "cost",
                    [](const DeviceRun& d) -> const TimeSeries& { return d.cumulative_cost; });

  {  // temperature distribution on a shared binning
    double lo = sc.devices.front().ambient_temp_c;
    double hi = lo;
    for (const auto& d : sc.devices) lo = std::min(lo, d.ambient_temp_c);
    for (const auto* r : runs)
      for (const auto& d : r->devices) hi = std::max(hi, d.traces.temperature.max());
    hi = std::max(hi, sc.temp_limit_c + 1.0);
    const std::size_t bins = cfg.histogram_bins;
    const double width = (hi - lo) / static_cast<double>(bins);
    CsvTable t;
    t.header = {"temp_c"};
    std::vector<double> centers(bins);
    for (std::size_t b = 0; b < bins; ++b) centers[b] = lo + (static_cast<double>(b) + 0.5) * width;
    t.columns = {centers};
    PlotSpec spec{"Empirical temperature distribution", "temp_c", "temperature [degC]", "fraction of time",
                  {}, std::string("limit_c"), std::nullopt, true};
    const char* colors[] = {"#1f77b4", "#888888"};
    for (std::size_t s = 0; s < runs.size(); ++s) {
      std::vector<double> mass(bins, 0.0);
      double total = 0.0;
      for (const auto& d : runs[s]->devices) {
        for (double c : d.traces.temperature.samples) {
          const double pos = std::floor((c - lo) / width);
          const std::size_t b = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), bins - 1);
          mass[b] += 1.0;
        }
        total += static_cast<double>(d.traces.temperature.size());
      }
      for (double& m : mass) m /= total;
      t.header.push_back(names[s] + "_mass");
      t.columns.push_back(std::move(mass));
      spec.series.push_back({t.header.back(), names[s], colors[s], false});
    }
    t.header.push_back("limit_c");
    t.columns.push_back(std::vector<double>(bins, sc.temp_limit_c));
    write_csv(dir / "temperature_histogram.csv", t);
    plots.push_back({dir / "temperature_histogram.csv", spec});
  }

  const auto ens = run_ensembles(cfg, {StrategyKind::tao, StrategyKind::sota, StrategyKind::always_offload}, alphas);
  write_text(dir / "ensemble.csv", ensemble_table_csv(ens));
  write_text(dir / "summary.csv", summary_csv({{"tao", &tao_run}, {"sota", &sota_run}}));

  if (cfg.plots)
    for (const auto& [csv, spec] : plots) {
      auto svg = csv;
      svg.replace_extension(".svg");
      render_plot(csv, svg, spec);
    }

  for (const auto& a : alphas)
    out << "alpha[" << a.device << "]=" << fixed(a.alpha, 6) << " binding=" << to_string(a.binding) << "\n";
  print_summary(out, "tao", tao_run);
  print_summary(out, "sota", sota_run);
  out << "tao pooled temp_violation_fraction=" << fixed(tao_run.temp_violation_fraction(), 4) << "\n";
  out << "sota pooled temp_violation_fraction=" << fixed(sota_run.temp_violation_fraction(), 4) << "\n";
  const double tao_cost = ens[0].summary.mean_total_cost;
  const double offload_cost = ens[2].summary.mean_total_cost;
  out << "ensemble (" << cfg.runs << " runs): tao mean cost=" << fixed(tao_cost, 3)
      << " sota mean cost=" << fixed(ens[1].summary.mean_total_cost, 3)
      << " always_offload mean cost=" << fixed(offload_cost, 3)
      << " tao cost reduction vs always_offload=" << fixed(cost_reduction_pct(tao_cost, offload_cost), 2) << "%\n";
  return kExitOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temperature-aware offloading simulator and optimizer", "tao"};
  app.require_subcommand(1);
  Overrides o;
  auto* solve = app.add_subcommand("solve-alpha", "Maximal local-service probability per device");
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and export traces");
  auto* compare = app.add_subcommand("compare", "Ensemble comparison of strategies");
  auto* replicate = app.add_subcommand("replicate", "Regenerate the evaluation figure set");
  for (auto* sub : {solve, simulate, compare, replicate}) add_common_flags(*sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve_alpha(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    if (replicate->parsed()) return cmd_replicate(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace tao::cli
