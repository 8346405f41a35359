#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "metabo/io.hpp"

using namespace metabo;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("io_test_") + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("offline CSV round trip preserves values and mask") {
  OfflineMatrix data;
  data.values.resize(3, 4);
  data.values << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12.5;
  data.mask.setConstant(3, 4, true);
  data.mask(1, 2) = false;
  data.mask(2, 0) = false;

  const std::string path = temp_path("offline.csv");
  write_offline_csv(data, path);
  const OfflineMatrix back = read_offline_csv(path, 3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(back.mask(i, j) == data.mask(i, j));
      if (data.mask(i, j)) CHECK(back.values(i, j) == doctest::Approx(data.values(i, j)));
    }
  std::remove(path.c_str());
}

TEST_CASE("continuous CSV rejects tasks on different grids") {
  const std::string path = temp_path("cont.csv");
  {
    std::ofstream out(path);
    out << "task_id,x_1,y\n";
    out << "0,0.1,1.0\n0,0.2,2.0\n";
    out << "1,0.1,0.5\n1,0.3,0.7\n";  // second grid point differs
  }
  CHECK_THROWS_WITH_AS(read_continuous_csv(path), doctest::Contains("common input grid"),
                       std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("continuous CSV round trip") {
  Matrix inputs(3, 2);
  inputs << 0.1, 0.9, 0.4, 0.2, 0.8, 0.5;
  Matrix obs(2, 3);
  obs << 1, 2, 3, -1, -2, -3;
  const std::string path = temp_path("cont2.csv");
  write_continuous_csv(inputs, obs, path);
  const ContinuousDataset back = read_continuous_csv(path);
  CHECK((back.inputs - inputs).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.observations - obs).cwiseAbs().maxCoeff() <= 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("truth sidecar round trip") {
  ExperimentConfig cfg;
  cfg.m = 5;
  cfg.n = 4;
  cfg.d = 1;
  cfg.t_steps = 2;
  cfg.seed = 9;
  const OfflineDataset data = generate_offline_dataset(cfg);
  const std::string path = temp_path("truth.json");
  write_truth_sidecar(cfg, data, path);
  const OfflineDataset back = read_truth_sidecar(path);
  CHECK((back.inputs - data.inputs).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.truth.cov - data.truth.cov).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.truth.noise_sd == doctest::Approx(cfg.noise_sd));
  std::remove(path.c_str());
}

TEST_CASE("config files accept known keys and reject unknown ones") {
  const std::string path = temp_path("cfg.txt");
  {
    std::ofstream out(path);
    out << "# comment\n";
    out << "setting = continuous\n";
    out << "m=25\n";
    out << "methods=pembo-ucb+random\n";
  }
  ExperimentConfig cfg;
  for (const auto& [k, v] : read_config_file(path)) apply_config_entry(cfg, k, v);
  CHECK(cfg.setting == Setting::Continuous);
  CHECK(cfg.m == 25);
  REQUIRE(cfg.methods.size() == 2);
  CHECK(cfg.methods[0] == Method::PemboUcb);
  CHECK_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), std::invalid_argument);
  std::remove(path.c_str());

  // dump -> parse round trip
  ExperimentConfig cfg2;
  std::stringstream dump(dump_config(cfg));
  std::string line;
  while (std::getline(dump, line)) {
    const auto eq = line.find('=');
    REQUIRE(eq != std::string::npos);
    apply_config_entry(cfg2, line.substr(0, eq), line.substr(eq + 1));
  }
  CHECK(cfg2.m == cfg.m);
  CHECK(cfg2.setting == cfg.setting);
  CHECK(cfg2.methods == cfg.methods);
}

TEST_CASE("aggregate CSV and SVG plot") {
  ExperimentResult result;
  for (int t = 1; t <= 5; ++t) {
    result.aggregate.push_back({Method::Random, t, 1.0 / t, 0.1, 1.0 / t, 0.1, 0.5 * t, 0.2});
    result.aggregate.push_back({Method::OracleUcb, t, 0.5 / t, 0.05, 0.5 / t, 0.05, 0.7 * t, 0.1});
  }
  const std::string csv = temp_path("agg.csv");
  write_aggregate_csv(result, csv);
  const std::vector<AggregateRow> rows = read_aggregate_csv(csv);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].mean_r == doctest::Approx(1.0));

  const std::string svg = temp_path("plot.svg");
  write_svg_plot(rows, "r", svg);
  const std::string body = slurp(svg);
  CHECK(body.find("<svg") != std::string::npos);
  // one mean line and one band per method
  std::size_t lines = 0, pos = 0;
  while ((pos = body.find("<polyline", pos)) != std::string::npos) {
    ++lines;
    pos += 9;
  }
  CHECK(lines == 2);
  CHECK(body.find("random") != std::string::npos);
  CHECK(body.find("oracle-ucb") != std::string::npos);
  CHECK_THROWS_AS(write_svg_plot(rows, "bogus", svg), std::invalid_argument);
  std::remove(csv.c_str());
  std::remove(svg.c_str());
}

TEST_CASE("validation report CSV has the documented schema") {
  ValidationReport report;
  report.rows.push_back({"demo/check", 0.5, 1.0, true});
  const std::string path = temp_path("report.csv");
  write_report_csv(report, path);
  const std::string body = slurp(path);
  CHECK(body.rfind("check,statistic,threshold,pass\n", 0) == 0);
  CHECK(body.find("demo/check,0.5,1,1") != std::string::npos);
  std::remove(path.c_str());
}
