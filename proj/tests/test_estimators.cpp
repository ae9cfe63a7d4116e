#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "dnorm/dependence_model.hpp"
#include "estimators/concurrence.hpp"
#include "estimators/mc.hpp"
#include "estimators/record_limits.hpp"
#include "estimators/record_times.hpp"
#include "samplers/copula.hpp"
#include "test_util.hpp"

using recmax::CopulaModel;
using recmax::DependenceModel;
using recmax::Estimate;
using recmax::LimitRoute;
using recmax::Rng;
using testutil::within;

namespace {

double harmonic(long long k, int power = 1) {
  double s = 0.0;
  for (long long i = 1; i <= k; ++i) s += 1.0 / std::pow(static_cast<double>(i), power);
  return s;
}

bool same_estimate(const Estimate& a, const Estimate& b) {
  return a.value == b.value && a.std_error == b.std_error && a.n_samples == b.n_samples &&
         a.seed == b.seed && a.method == b.method;
}

}  // namespace

TEST_CASE("chunked mean recovers known moments and is worker-invariant") {
  auto uniform_term = [](Rng& rng) { return rng.uniform_open(); };
  Estimate e1 = recmax::mc_mean(100000, 7, 1, "t", uniform_term);
  CHECK(within(e1.value, 0.5, e1.std_error, 5));
  CHECK(e1.std_error == doctest::Approx(std::sqrt(1.0 / 12.0 / 100000)).epsilon(0.05));
  CHECK(e1.n_samples == 100000);
  CHECK(e1.seed == 7);

  Estimate e3 = recmax::mc_mean(100000, 7, 3, "t", uniform_term);
  Estimate e8 = recmax::mc_mean(100000, 7, 8, "t", uniform_term);
  CHECK(same_estimate(e1, e3));
  CHECK(same_estimate(e1, e8));

  // SE shrinks like n^{-1/2}
  Estimate big = recmax::mc_mean(100000 * 64, 7, 0, "t", uniform_term);
  CHECK(e1.std_error / big.std_error > 8.0 / 1.5);
  CHECK(e1.std_error / big.std_error < 8.0 * 1.5);

  CHECK_THROWS_AS(recmax::mc_mean(0, 1, 1, "t", uniform_term), std::invalid_argument);
}

TEST_CASE("ratio estimator uses shared draws and a delta-method error") {
  auto term = [](Rng& rng, double& num, double& den) {
    const double u = rng.uniform_open();
    num = u * u;
    den = u;
  };
  Estimate e = recmax::mc_ratio(200000, 11, 0, "t", term);
  CHECK(within(e.value, 2.0 / 3.0, e.std_error, 5));
  CHECK(e.std_error > 0.0);
  CHECK(e.std_error < 0.01);

  // exact cancellation: num = den gives ratio 1 with zero variance
  Estimate unit = recmax::mc_ratio(1000, 3, 1, "t", [](Rng& rng, double& n, double& d) {
    n = d = rng.uniform_open();
  });
  CHECK(unit.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unit.std_error == doctest::Approx(0.0).epsilon(1e-9));

  // the shift is subtracted from the numerator mean before dividing
  Estimate shifted = recmax::mc_ratio(10000, 3, 1, "t",
                                      [](Rng&, double& n, double& d) {
                                        n = 3.0;
                                        d = 2.0;
                                      },
                                      1.0);
  CHECK(shifted.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("norm and dual Monte Carlo match closed forms") {
  auto m = DependenceModel::logistic(2.0, 2);
  const std::vector<double> x = {-3.0, -4.0};
  Estimate nrm = recmax::norm_mc(m, x, 200000, 5, 0);
  CHECK(within(nrm.value, 5.0, nrm.std_error, 5));
  Estimate dl = recmax::dual_mc(m, x, 200000, 5, 0);
  CHECK(within(dl.value, 7.0 - 5.0, dl.std_error, 5));

  // custom models exist for exactly this route
  auto cm = DependenceModel::custom(
      2, [](Rng& rng, std::span<double> z) { z[0] = 2.0 * rng.uniform_open(); z[1] = 2.0 - z[0]; },
      2.0);
  const std::vector<double> ones = {1.0, 1.0};
  Estimate cn = recmax::norm_mc(cm, ones, 100000, 5, 0);
  // max(U, 2-U) with U ~ U(0,2) has mean 3/2
  CHECK(within(cn.value, 1.5, cn.std_error, 5));
}

TEST_CASE("concurrence routes agree with closed forms") {
  struct Row {
    DependenceModel model;
    double target;
  };
  const Row rows[] = {
      {DependenceModel::logistic(2.0, 2), 0.5},
      {DependenceModel::marshall_olkin(0.5, 2), 1.0 / 3.0},
      {DependenceModel::bernoulli(0.5, 3), 1.0 / 7.0},
      {DependenceModel::comonotone(3), 1.0},
      {DependenceModel::independence(3), 0.0},
  };
  for (const auto& row : rows) {
    CAPTURE(row.model.descriptor());
    REQUIRE(row.model.concurrence_closed_form());
    CHECK(*row.model.concurrence_closed_form() == doctest::Approx(row.target).epsilon(1e-12));
    Estimate gen = recmax::concurrence_via_generator(row.model, 100000, 21, 0);
    CHECK(within(gen.value, row.target, gen.std_error, 5, 1e-12));
    Estimate eta = recmax::concurrence_via_eta(row.model, 100000, 22, 0);
    CHECK(within(eta.value, row.target, eta.std_error, 5, 1e-12));
  }

  // weibull has no closed form; the two sampling routes must agree with
  // each other instead
  auto wb = DependenceModel::weibull_model(1.5, 2);
  CHECK(!wb.concurrence_closed_form());
  Estimate gen = recmax::concurrence_via_generator(wb, 100000, 23, 0);
  Estimate eta = recmax::concurrence_via_eta(wb, 100000, 24, 0);
  CHECK(!gen.bias_note.has_value());  // inclusion-exclusion norm, no inner loop
  CHECK(eta.bias_note.has_value());   // truncated thinning
  const double joint = std::hypot(gen.std_error, eta.std_error);
  CHECK(within(gen.value, eta.value, joint, 5, 2e-4));
}

TEST_CASE("finite-sample champion frequency approaches the limit") {
  auto como = CopulaModel::comonotone(2);
  auto e = recmax::concurrence_empirical(como, 50, 2000, 31, 0);
  CHECK(e.p_n.value == 1.0);  // the running maximum is a champion, always
  CHECK(e.p_n.std_error == 0.0);
  CHECK(within(e.n_pi_bar.value, 1.0, e.n_pi_bar.std_error, 5));

  auto prod = CopulaModel::product(2);
  auto ind = recmax::concurrence_empirical(prod, 100, 4000, 32, 0);
  // P(champion among n) = 1/n under independence in the plane
  CHECK(within(ind.p_n.value, 0.01, ind.p_n.std_error, 5));

  CHECK_THROWS_AS(recmax::concurrence_empirical(prod, 1, 10, 1, 0), std::invalid_argument);
}

TEST_CASE("expected simple-record limit routes coincide") {
  auto lg = DependenceModel::logistic(2.0, 2);
  REQUIRE(lg.expected_norm_closed_form());
  CHECK(*lg.expected_norm_closed_form() == doctest::Approx(1.5).epsilon(1e-12));
  Estimate eta = recmax::simple_record_limit(lg, 100000, 41, 0, LimitRoute::kEta);
  Estimate gen = recmax::simple_record_limit(lg, 100000, 41, 0, LimitRoute::kGeneratorIdentity);
  Estimate aut = recmax::simple_record_limit(lg, 100000, 41, 0);
  CHECK(within(eta.value, 1.5, eta.std_error, 5));
  CHECK(within(gen.value, 1.5, gen.std_error, 5));
  CHECK(same_estimate(aut, eta));  // the default route is the eta mean

  auto wb = DependenceModel::weibull_model(1.5, 2);
  Estimate waut = recmax::simple_record_limit(wb, 100000, 42, 0);
  Estimate wgen = recmax::simple_record_limit(wb, 100000, 42, 0, LimitRoute::kGeneratorIdentity);
  CHECK(same_estimate(waut, wgen));  // weibull defaults to the identity route
  Estimate weta = recmax::simple_record_limit(wb, 100000, 42, 0, LimitRoute::kEta);
  CHECK(weta.bias_note.has_value());
  const double joint = std::hypot(wgen.std_error, weta.std_error);
  CHECK(within(wgen.value, weta.value, joint, 5, 2e-4));

  CHECK_THROWS_AS(
      recmax::simple_record_limit(DependenceModel::bernoulli(0.5, 2), 1000, 1, 0,
                                  LimitRoute::kGeneratorIdentity),
      std::domain_error);
}

TEST_CASE("record probabilities under a max-stable law") {
  // shared exponential: P(nth observation is a complete record) = 1/n
  auto como = DependenceModel::comonotone(3);
  Estimate one = recmax::record_prob_maxstable_exact(como, 1, 1000, 51, 0);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));
  Estimate ten = recmax::record_prob_maxstable_exact(como, 10, 200000, 51, 0);
  CHECK(within(ten.value, 0.1, ten.std_error, 5));
  Estimate cum = recmax::record_prob_cumsum(como, 10, 200000, 52, 0);
  CHECK(within(cum.value, harmonic(10), cum.std_error, 5));

  // independent coordinates: P = n^{-d}, cumulative sum_{i<=n} i^{-d}
  auto ind = DependenceModel::independence(2);
  Estimate p5 = recmax::record_prob_maxstable_exact(ind, 5, 200000, 53, 0);
  CHECK(within(p5.value, 1.0 / 25.0, p5.std_error, 5));
  Estimate c5 = recmax::record_prob_cumsum(ind, 5, 200000, 54, 0);
  CHECK(within(c5.value, harmonic(5, 2), c5.std_error, 5));
}

TEST_CASE("record counts grow like the exact harmonic sums") {
  const std::vector<long long> checkpoints = {1, 10, 100};
  auto como = CopulaModel::comonotone(3);
  auto rows = recmax::expected_records_growth(como, 100, 20000, 61, 0, checkpoints);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].k == 1);
  CHECK(rows[0].simple_mean == 1.0);
  CHECK(std::isnan(rows[0].simple_ratio));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double h = harmonic(rows[i].k);
    CHECK(within(rows[i].simple_mean, h, rows[i].simple_se, 5));
    CHECK(within(rows[i].complete_mean, h, rows[i].complete_se, 5));
    CHECK(rows[i].simple_ratio ==
          doctest::Approx(rows[i].simple_mean / std::log(static_cast<double>(rows[i].k))));
  }

  auto prod = CopulaModel::product(2);
  auto prows = recmax::expected_records_growth(prod, 100, 20000, 62, 0, checkpoints);
  for (std::size_t i = 1; i < prows.size(); ++i) {
    const long long k = prows[i].k;
    CHECK(within(prows[i].simple_mean, 2 * harmonic(k) - harmonic(k, 2), prows[i].simple_se, 5));
    CHECK(within(prows[i].complete_mean, harmonic(k, 2), prows[i].complete_se, 5));
  }

  // deterministic reduction regardless of the worker count
  auto again = recmax::expected_records_growth(prod, 100, 20000, 62, 3, checkpoints);
  REQUIRE(again.size() == prows.size());
  for (std::size_t i = 0; i < prows.size(); ++i) {
    CHECK(again[i].simple_mean == prows[i].simple_mean);
    CHECK(again[i].complete_se == prows[i].complete_se);
  }
}

TEST_CASE("waiting time for the second record") {
  auto prod = CopulaModel::product(2);
  auto r = recmax::expected_N2(prod, 200000, 71, 0, 10000);
  REQUIRE(r.integral_route.has_value());
  const double target = 1.0 + std::numbers::pi * std::numbers::pi / 6.0;
  CHECK(within(r.direct_route.value, target, r.direct_route.std_error, 5, 0.01));
  CHECK(within(r.integral_route->value, target, r.integral_route->std_error, 5, 0.01));
  CHECK(!r.divergence_flag);
  for (const auto& row : r.tail) {
    if (row.k > 20) break;
    const double p = 1.0 / (static_cast<double>(row.k) * row.k);
    CAPTURE(row.k);
    CHECK(within(row.survival, p, std::max(row.se, 1e-9), 5));
  }

  auto como = CopulaModel::comonotone(2);
  auto c = recmax::expected_N2(como, 100000, 72, 0, 10000);
  CHECK(c.divergence_flag);  // survival 1/k, infinite mean
  CHECK(c.tail_slope > -1.3);
  for (const auto& row : c.tail) {
    if (row.k > 20) break;
    CHECK(within(row.survival, 1.0 / static_cast<double>(row.k), std::max(row.se, 1e-9), 5));
  }
}

TEST_CASE("tail comparison measure at finite thresholds") {
  const std::vector<double> grid = {0.5, 0.9};
  auto prod = CopulaModel::product(2);
  auto rows = recmax::chi_bar(prod, grid, 200000, 81, 0);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(within(row.chi_bar, 0.0, row.se, 5));
    CHECK(!row.low_count);
    CHECK(row.exceedances > 0);
  }

  auto como = CopulaModel::comonotone(2);
  auto crows = recmax::chi_bar(como, grid, 200000, 82, 0);
  for (const auto& row : crows) {
    CHECK(within(row.chi_bar, 1.0, row.se, 5));
  }

  // the empirical path reproduces the simulated one on its own draws
  Rng rng(83);
  const long long n = 100000;
  std::vector<double> draws(2 * n);
  for (long long i = 0; i < n; ++i) {
    draws[2 * i] = draws[2 * i + 1] = rng.uniform_open();
  }
  auto erows = recmax::chi_bar_from_rows(draws, n, 2, grid);
  REQUIRE(erows.size() == 2);
  for (const auto& row : erows) {
    CHECK(within(row.chi_bar, 1.0, row.se, 5));
  }
}

TEST_CASE("second record value df by formula and by simulation") {
  auto como = CopulaModel::comonotone(2);
  const std::vector<double> x = {0.5, 0.8};
  auto r = recmax::second_record_df(como, x, 100000, 91, 0);
  REQUIRE(r.formula_route.has_value());
  // record value v given running max m is uniform on (m,1); integrating
  // over m < z with z = min x gives z + (1-z) log(1-z)
  const double z = 0.5;
  const double target = z + (1.0 - z) * std::log(1.0 - z);
  CHECK(within(r.formula_route->value, target, r.formula_route->std_error, 5, 1e-3));
  CHECK(within(r.direct_route.value, target, r.direct_route.std_error, 5, 1e-3));

  auto gh = CopulaModel::gumbel_hougaard(2.0, 2);
  const std::vector<double> y = {0.6, 0.7};
  auto g = recmax::second_record_df(gh, y, 100000, 92, 0);
  REQUIRE(g.formula_route.has_value());
  const double joint = std::hypot(g.formula_route->std_error, g.direct_route.std_error);
  CHECK(within(g.formula_route->value, g.direct_route.value, joint, 5, 1e-3));
}

TEST_CASE("champion value survival routes and closed forms") {
  auto mo = DependenceModel::marshall_olkin(0.4, 2);
  const std::vector<double> x = {-0.5, -1.0};
  auto closed = recmax::champion_survival_closed_form(mo, x);
  REQUIRE(closed.has_value());
  CHECK(*closed == doctest::Approx(1.0 - std::exp((0.4 + 2 * 0.6) * -0.5)).epsilon(1e-12));
  auto r = recmax::champion_survival(mo, x, 100000, 101, 0);
  CHECK(within(r.primary.value, *closed, r.primary.std_error, 5));
  REQUIRE(r.cross.has_value());
  // the marshall-olkin generator has an a.s. constant minimum, so the cross
  // route is exact with zero variance
  CHECK(within(r.cross->value, *closed, r.cross->std_error, 5, 1e-9));

  auto como = DependenceModel::comonotone(3);
  const std::vector<double> ones = {-1.0, -1.0, -1.0};
  auto cc = recmax::champion_survival_closed_form(como, ones);
  REQUIRE(cc.has_value());
  CHECK(*cc == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  auto cr = recmax::champion_survival(como, ones, 50000, 102, 0);
  CHECK(within(cr.primary.value, *cc, cr.primary.std_error, 5));

  const std::vector<double> mones = {-1.0, -1.0};
  CHECK(!recmax::champion_survival_closed_form(DependenceModel::logistic(2, 2), mones)
             .has_value());
  CHECK_THROWS_AS(recmax::champion_survival(DependenceModel::independence(2), x, 1000, 1, 0),
                  std::domain_error);
  const std::vector<double> pos = {0.5, -1.0};
  CHECK_THROWS_AS(recmax::champion_survival(mo, pos, 1000, 1, 0), std::invalid_argument);

  // weibull reverses the roles: the generator ratio leads
  auto wb = DependenceModel::weibull_model(1.5, 2);
  auto wr = recmax::champion_survival(wb, x, 50000, 103, 0);
  REQUIRE(wr.cross.has_value());
  CHECK(wr.cross->bias_note.has_value());
  const double joint = std::hypot(wr.primary.std_error, wr.cross->std_error);
  CHECK(within(wr.primary.value, wr.cross->value, joint, 5, 2e-3));
}

TEST_CASE("simple record value df routes and closed forms") {
  auto ind = DependenceModel::independence(2);
  const std::vector<double> x = {-1.0, -2.0};
  auto closed = recmax::simple_record_limit_df_closed_form(ind, x);
  REQUIRE(closed.has_value());
  CHECK(*closed == doctest::Approx(0.5 * (std::exp(-1.0) + std::exp(-2.0))).epsilon(1e-12));
  CHECK(*closed == doctest::Approx(0.2516074).epsilon(1e-6));
  auto e = recmax::simple_record_limit_df(ind, x, 100000, 111, 0);
  CHECK(within(e.value, *closed, e.std_error, 5));

  auto como = DependenceModel::comonotone(2);
  auto cc = recmax::simple_record_limit_df_closed_form(como, x);
  REQUIRE(cc.has_value());
  CHECK(*cc == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  auto ce = recmax::simple_record_limit_df(como, x, 100000, 112, 0);
  CHECK(within(ce.value, *cc, ce.std_error, 5));

  CHECK(!recmax::simple_record_limit_df_closed_form(DependenceModel::logistic(2, 2), x)
             .has_value());
}

TEST_CASE("windowed conditional estimates reach the limit laws") {
  auto prod = CopulaModel::product(2);
  const std::vector<std::vector<double>> grid = {{-1.0, -1.0}, {-0.5, -2.0}};
  auto ests = recmax::simple_record_limit_df_empirical(prod, grid, 400, 4000, 121, 0);
  REQUIRE(ests.size() == 2);
  auto ind = DependenceModel::independence(2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double target = *recmax::simple_record_limit_df_closed_form(ind, grid[i]);
    CAPTURE(i);
    CHECK(within(ests[i].value, target, ests[i].std_error, 5, 0.02));
    CHECK(ests[i].bias_note.has_value());  // reports the pooled record count
  }

  auto gh = CopulaModel::max_stable(DependenceModel::comonotone(2));
  const std::vector<double> point = {-1.0, -1.0};
  auto ch = recmax::champion_survival_empirical(gh, point, 400, 4000, 122, 0);
  const double target =
      *recmax::champion_survival_closed_form(DependenceModel::comonotone(2), point);
  CHECK(within(ch.value, target, ch.std_error, 5, 0.02));
}
