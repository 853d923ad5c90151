#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "tao/csv.hpp"
#include "tao/errors.hpp"
#include "tao/plot.hpp"

using namespace tao;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tao_csv_plot_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("csv_plot") {
  TEST_CASE("number formatting round trips") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.5) == "1.5");
    CHECK(format_double(43.0) == "43");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
      const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
      CHECK(std::stod(format_double(v)) == v);
    }
  }

  TEST_CASE("write then read") {
    CsvTable t;
    t.header = {"time_s", "temp_c"};
    t.columns = {{0.0, 1.0, 2.0}, {25.0, 25.125, 30.0000001}};
    const auto p = scratch("table.csv");
    write_csv(p, t);
    CHECK(slurp(p) == "time_s,temp_c\n0,25\n1,25.125\n2,30.0000001\n");
    const auto back = read_csv(p);
    CHECK(back.header == t.header);
    CHECK(back.columns == t.columns);
    CHECK(back.has_column("temp_c"));
    CHECK_FALSE(back.has_column("power_w"));
    CHECK_THROWS_AS(back.column("power_w"), std::out_of_range);
  }

  TEST_CASE("malformed csv") {
    const auto p = scratch("bad.csv");
    std::ofstream(p, std::ios::binary) << "a,b\n1,2\n3\n";
    CHECK_THROWS_AS(read_csv(p), ConfigError);
    std::ofstream(p, std::ios::binary) << "a,b\n1,x\n";
    CHECK_THROWS_AS(read_csv(p), ConfigError);
    std::ofstream(p, std::ios::binary) << "a,b\r\n1,2\r\n";
    CHECK(read_csv(p).column("b").at(0) == 2.0);
    CsvTable ragged;
    ragged.header = {"a", "b"};
    ragged.columns = {{1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(write_csv(p, ragged), std::invalid_argument);
  }

  TEST_CASE("line plot from its csv") {
    CsvTable t;
    t.header = {"time_s", "temp_c", "limit_c", "arrival"};
    for (int k = 0; k <= 100; ++k) {
      if (t.columns.empty()) t.columns.resize(4);
      t.columns[0].push_back(k);
      t.columns[1].push_back(25.0 + 20.0 * std::sin(k / 20.0));
      t.columns[2].push_back(43.0);
      t.columns[3].push_back(k % 25 == 0 ? 1.0 : 0.0);
    }
    const auto csv = scratch("trace.csv");
    write_csv(csv, t);
    PlotSpec spec{"trace", "time_s", "time [s]", "degC", {{"temp_c", "tao", "#1f77b4", false}}, std::string("limit_c"),
                  std::string("arrival"), false};
    const auto svg = scratch("trace.svg");
    render_plot(csv, svg, spec);
    const auto text = slurp(svg);
    CHECK(text.rfind("<svg", 0) == 0);
    CHECK(text.find("<polyline") != std::string::npos);
    CHECK(text.find("stroke-dasharray") != std::string::npos);
    CHECK(text.find("<polygon") != std::string::npos);

    // the plot follows the CSV, not the data it was first written from
    t.columns[1].assign(101, 30.0);
    write_csv(csv, t);
    render_plot(csv, svg, spec);
    CHECK(slurp(svg) != text);

    spec.series[0].column = "missing";
    CHECK_THROWS(render_plot(csv, svg, spec));
  }

  TEST_CASE("bar plot") {
    CsvTable t;
    t.header = {"temp_c", "mass", "limit_c"};
    t.columns = {{25.5, 26.5, 27.5}, {0.5, 0.3, 0.2}, {43, 43, 43}};
    const auto csv = scratch("hist.csv");
    write_csv(csv, t);
    PlotSpec spec{"hist", "temp_c", "degC", "fraction", {{"mass", "tao", "#1f77b4", false}}, std::string("limit_c"),
                  std::nullopt, true};
    render_plot(csv, scratch("hist.svg"), spec);
    CHECK(slurp(scratch("hist.svg")).find("<rect") != std::string::npos);
  }
}
