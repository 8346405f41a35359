#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "metabo/bench.hpp"
#include "metabo/io.hpp"

using namespace metabo;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.setting = Setting::Discrete;
  cfg.m = 40;
  cfg.n = 60;
  cfg.t_steps = 8;
  cfg.d = 1;
  cfg.trials = 4;
  cfg.delta = 0.1;
  cfg.seed = 11;
  cfg.methods = {Method::PemboUcb, Method::Random};
  return cfg;
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (Method m : {Method::PemboUcb, Method::PemboPi, Method::OracleUcb, Method::PlainMleUcb,
                   Method::Random})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("thompson"), std::invalid_argument);
}

TEST_CASE("mask_rate zero keeps a full mask") {
  ExperimentConfig cfg = small_config();
  cfg.mask_rate = 0.0;
  const OfflineDataset data = generate_offline_dataset(cfg);
  CHECK(data.observations.mask.all());
}

TEST_CASE("masked fraction concentrates near the requested rate") {
  ExperimentConfig cfg = small_config();
  cfg.n = 100;
  cfg.m = 100;
  cfg.mask_rate = 0.4;
  const OfflineDataset data = generate_offline_dataset(cfg);
  const double kept = static_cast<double>(data.observations.mask.count()) / (100.0 * 100.0);
  CHECK(std::abs(kept - 0.6) <= 0.01);
}

TEST_CASE("noiseless single task equals the sampled function") {
  ExperimentConfig cfg = small_config();
  cfg.n = 1;
  cfg.noise_sd = 0.0;
  const OfflineDataset data = generate_offline_dataset(cfg);
  CHECK((data.observations.values.row(0) - data.task_values.row(0)).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("per-column variance matches k(x,x) + sigma^2") {
  ExperimentConfig cfg = small_config();
  cfg.n = 5000;
  cfg.m = 6;
  const OfflineDataset data = generate_offline_dataset(cfg);
  for (int j = 0; j < cfg.m; ++j) {
    const double target = data.truth.cov(j, j) + cfg.noise_sd * cfg.noise_sd;
    const Vector col = data.observations.values.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / (cfg.n - 1);
    const double se = target * std::sqrt(2.0 / (cfg.n - 1.0));
    CHECK(std::abs(var - target) <= 5.0 * se);
  }
}

TEST_CASE("identical config and seed give identical result bytes") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  const auto dump = [](const ExperimentResult& r) {
    std::ostringstream os;
    for (const TrialRow& row : r.rows)
      os << method_name(row.method) << ',' << row.trial << ',' << row.t << ','
         << format_double(row.y_best) << ',' << format_double(row.r_t) << ','
         << format_double(row.big_r_t) << '\n';
    return os.str();
  };
  CHECK(dump(a) == dump(b));
}

TEST_CASE("parallel and serial execution agree") {
  ExperimentConfig cfg = small_config();
  cfg.jobs = 1;
  const ExperimentResult serial = run_experiment(cfg);
  cfg.jobs = 2;
  const ExperimentResult parallel = run_experiment(cfg);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].r_t == parallel.rows[i].r_t);
    CHECK(serial.rows[i].y_best == parallel.rows[i].y_best);
  }
}

TEST_CASE("noiseless random search exhausts the candidate set") {
  ExperimentConfig cfg = small_config();
  cfg.m = 8;
  cfg.t_steps = 8;
  cfg.noise_sd = 0.0;
  cfg.trials = 3;
  cfg.methods = {Method::Random};
  const ExperimentResult result = run_experiment(cfg);
  for (int tr = 0; tr < cfg.trials; ++tr) {
    double prev = 1e300;
    for (const TrialRow& row : result.rows)
      if (row.trial == tr) {
        CHECK(row.r_t <= prev + 1e-12);
        prev = row.r_t;
        if (row.t == cfg.t_steps) CHECK(row.r_t == doctest::Approx(0.0));
      }
  }
}

TEST_CASE("oracle is at least as good as random on the pinned config") {
  ExperimentConfig cfg = small_config();
  cfg.m = 60;
  cfg.n = 50;
  cfg.t_steps = 15;
  cfg.trials = 40;
  cfg.seed = 77;
  cfg.methods = {Method::OracleUcb, Method::Random};
  const ExperimentResult result = run_experiment(cfg);
  const std::vector<double> oracle = final_regrets(result, Method::OracleUcb);
  const std::vector<double> random = final_regrets(result, Method::Random);
  REQUIRE(oracle.size() == 40);
  REQUIRE(random.size() == 40);
  double mo = 0.0, mr = 0.0;
  for (double v : oracle) mo += v;
  for (double v : random) mr += v;
  CHECK(mo / 40.0 <= mr / 40.0);
}

TEST_CASE("pembo-pi runs with the default data-driven target") {
  ExperimentConfig cfg = small_config();
  cfg.methods = {Method::PemboPi};
  cfg.trials = 2;
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.skipped.empty());
  CHECK(final_regrets(result, Method::PemboPi).size() == 2);
}

TEST_CASE("plain MLE baseline runs end to end") {
  ExperimentConfig cfg = small_config();
  cfg.m = 30;
  cfg.t_steps = 4;
  cfg.trials = 1;
  cfg.methods = {Method::PlainMleUcb};
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.skipped.empty());
  REQUIRE(result.rows.size() == 4);
  for (const TrialRow& row : result.rows) CHECK(std::isfinite(row.r_t));
}

TEST_CASE("continuous setting runs the estimator path") {
  ExperimentConfig cfg;
  cfg.setting = Setting::Continuous;
  cfg.m = 60;
  cfg.n = 50;
  cfg.t_steps = 6;
  cfg.d = 2;
  cfg.k = 20;
  cfg.trials = 3;
  cfg.seed = 5;
  cfg.methods = {Method::PemboUcb, Method::OracleUcb};
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.skipped.empty());
  CHECK(final_regrets(result, Method::PemboUcb).size() == 3);
}

TEST_CASE("config invariants are enforced") {
  ExperimentConfig cfg = small_config();
  cfg.n = 12;  // < 4 log(6/0.1) + 8 + 2 = 26.4
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.setting = Setting::Continuous;
  cfg.k = 4;  // T=8 >= K
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("masked discrete experiment completes the table and runs") {
  ExperimentConfig cfg = small_config();
  cfg.mask_rate = 0.3;
  cfg.trials = 2;
  cfg.methods = {Method::PemboUcb};
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.skipped.empty());
  CHECK(final_regrets(result, Method::PemboUcb).size() == 2);
}
