#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "metabo/acquisition.hpp"
#include "metabo/rng.hpp"
#include "oracle/formula_oracle.hpp"

using namespace metabo;

TEST_CASE("zeta anchors") {
  const double delta = 6.0 / (std::exp(1.0) * std::exp(1.0));  // log(6/delta) = 2
  CHECK(ucb_zeta(100, 1, delta) == doctest::Approx(2.2433).epsilon(1e-4));
  CHECK(ucb_zeta(27, 4, delta) == doctest::Approx(3.593).epsilon(1e-3));
  CHECK(static_cast<long double>(ucb_zeta(100, 1, delta)) ==
        doctest::Approx(static_cast<double>(formula_oracle::ucb_zeta(100, 1, delta)))
            .epsilon(1e-13));
}

TEST_CASE("zeta precondition failures") {
  const double delta = 6.0 / (std::exp(1.0) * std::exp(1.0));
  CHECK_THROWS_WITH_AS(ucb_zeta(10, 8, delta), "N too small for (t, delta)", std::runtime_error);
  CHECK_THROWS_AS(ucb_zeta(100, 0, delta), std::invalid_argument);
}

TEST_CASE("zeta is increasing in t and decreasing in N over the valid region") {
  const double delta = 0.1;
  const double l6x4 = 4.0 * std::log(6.0 / delta);
  for (int n : {20, 40, 100, 1000, 10000}) {
    for (int t = 1; t + 1 < n - l6x4; t = t * 2 + 1) {
      CHECK(ucb_zeta(n, t + 1, delta) > ucb_zeta(n, t, delta));
    }
  }
  for (int t : {1, 3, 9}) {
    double prev = ucb_zeta(40, t, delta);
    for (int n : {100, 1000, 10000}) {
      const double cur = ucb_zeta(n, t, delta);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("score arithmetic") {
  CHECK(score(AcquisitionKind::Ucb, 1.0, 4.0, 2.0) == doctest::Approx(5.0));
  CHECK(score(AcquisitionKind::Ucb, 0.7, 4.0, 0.0) == doctest::Approx(0.7));
  CHECK(score(AcquisitionKind::Pi, 1.5, 2.0, 1.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(score(AcquisitionKind::Ucb, 0.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("PI at zero variance uses the floor instead of dividing by zero") {
  const double s = score(AcquisitionKind::Pi, 1.0, 0.0, 2.0);
  CHECK(std::isfinite(s));
  CHECK(s == doctest::Approx((1.0 - 2.0) / std::sqrt(1e-12)));
}

TEST_CASE("select_next basics") {
  CHECK(select_next(Vector{{1.0, 3.0, 2.0}}, {}) == 1);
  CHECK(select_next(Vector{{3.0, 3.0, 1.0}}, {}) == 0);
  CHECK(select_next(Vector{{5.0, 1.0}}, {0}) == 1);
  CHECK_THROWS_WITH_AS(select_next(Vector{{5.0, 1.0}}, {0, 1}), "candidate set exhausted",
                       std::runtime_error);
}

TEST_CASE("select_next is invariant under increasing transforms") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    Vector scores(8);
    for (int i = 0; i < 8; ++i) scores[i] = rng.normal();
    std::vector<int> queried;
    for (int i = 0; i < 8; ++i)
      if (rng.uniform() < 0.3 && queried.size() < 7) queried.push_back(i);
    const int base = select_next(scores, queried);
    CHECK(select_next(Vector(scores.array() + 17.5), queried) == base);
    CHECK(select_next(Vector(scores.array().atan()), queried) == base);
    CHECK(select_next(Vector((0.3 * scores).array().exp()), queried) == base);
  }
}

TEST_CASE("raising the PI target never raises any score") {
  Rng rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const double mean = rng.normal();
    const double var = rng.uniform() * 2.0;
    const double fstar = rng.normal();
    const double bump = rng.uniform() * 3.0;
    CHECK(score(AcquisitionKind::Pi, mean, var, fstar + bump) <=
          score(AcquisitionKind::Pi, mean, var, fstar));
  }
}

TEST_CASE("acquisition config validation") {
  AcquisitionConfig pi;
  pi.kind = AcquisitionKind::Pi;
  pi.delta = 0.1;
  CHECK_THROWS_AS(pi.validate(), std::invalid_argument);
  pi.f_star_hat = 1.0;
  CHECK_NOTHROW(pi.validate());
  pi.delta = 0.0;
  CHECK_THROWS_AS(pi.validate(), std::invalid_argument);
}
