#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "core/kahan.hpp"
#include "core/rng.hpp"
#include "dnorm/dependence_model.hpp"

using recmax::DependenceModel;
using recmax::dual_via_inclusion_exclusion;
using recmax::Family;
using recmax::norm_via_inclusion_exclusion;

namespace {

std::vector<DependenceModel> closed_form_models(int d) {
  std::vector<DependenceModel> out;
  for (double lambda : {1.5, 2.0, 4.0}) out.push_back(DependenceModel::logistic(lambda, d));
  for (double alpha : {0.7, 1.0, 2.5}) out.push_back(DependenceModel::weibull_model(alpha, d));
  for (double beta : {0.3, 0.5, 1.0}) out.push_back(DependenceModel::bernoulli(beta, d));
  if (d >= 2) {
    for (double gamma : {0.3, 0.7}) out.push_back(DependenceModel::marshall_olkin(gamma, d));
  }
  out.push_back(DependenceModel::independence(d));
  out.push_back(DependenceModel::comonotone(d));
  return out;
}

std::vector<double> random_point(recmax::Rng& rng, int d) {
  std::vector<double> x(d);
  for (auto& v : x) v = -3.0 * rng.uniform_open();
  return x;
}

}  // namespace

TEST_CASE("logistic closed forms") {
  auto m = DependenceModel::logistic(2.0, 2);
  double x[] = {-3.0, -4.0};
  CHECK(m.norm(x) == doctest::Approx(5.0).epsilon(1e-12));
  double ones[] = {-1.0, -1.0};
  CHECK(m.dual(ones) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(m.descriptor() == "logistic:2:d=2");
}

TEST_CASE("comonotone and independence closed forms") {
  auto como = DependenceModel::comonotone(2);
  double x[] = {-2.0, -5.0};
  CHECK(como.norm(x) == 5.0);
  CHECK(como.dual(x) == 2.0);

  auto indep = DependenceModel::independence(3);
  double y[] = {-1.0, -1.0, -1.0};
  CHECK(indep.norm(y) == 3.0);
  CHECK(indep.dual(y) == 0.0);
}

TEST_CASE("bernoulli closed forms") {
  auto m = DependenceModel::bernoulli(0.5, 2);
  double ones[] = {1.0, 1.0};
  CHECK(m.norm(ones) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(m.dual(ones) == doctest::Approx(0.5).epsilon(1e-14));
  double x[] = {-1.0, -2.0};
  CHECK(m.norm(x) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(m.dual(x) == doctest::Approx(0.5).epsilon(1e-14));

  // beta = 1 degenerates to the comonotone family.
  auto b1 = DependenceModel::bernoulli(1.0, 3);
  auto como = DependenceModel::comonotone(3);
  recmax::Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    auto p = random_point(rng, 3);
    CHECK(b1.norm(p) == doctest::Approx(como.norm(p)).epsilon(1e-13));
    CHECK(b1.dual(p) == doctest::Approx(como.dual(p)).epsilon(1e-13));
  }
}

TEST_CASE("marshall-olkin closed forms") {
  auto m = DependenceModel::marshall_olkin(0.3, 2);
  double x[] = {-1.0, -2.0};
  CHECK(m.norm(x) == doctest::Approx(0.3 * 2.0 + 0.7 * 3.0).epsilon(1e-14));
  CHECK(m.dual(x) == doctest::Approx(0.3 * 1.0).epsilon(1e-14));
}

TEST_CASE("weibull closed forms") {
  auto m = DependenceModel::weibull_model(1.0, 2);
  double ones[] = {-1.0, -1.0};
  CHECK(m.dual(ones) == doctest::Approx(0.5).epsilon(1e-14));
  double withzero[] = {-1.0, 0.0};
  CHECK(m.dual(withzero) == 0.0);
  // norm = |x_1| + |x_2| - dual in dimension 2.
  CHECK(m.norm(ones) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("norm axioms hold for every closed-form family up to d = 8") {
  recmax::Rng rng(11);
  for (int d = 1; d <= 8; ++d) {
    for (const auto& m : closed_form_models(d)) {
      CAPTURE(m.descriptor());
      for (int rep = 0; rep < 40; ++rep) {
        auto x = random_point(rng, d);
        auto y = random_point(rng, d);
        double nx = m.norm(x);
        double ny = m.norm(y);

        double mx = 0.0, sx = 0.0, mn = 1e300;
        for (double v : x) {
          mx = std::max(mx, std::abs(v));
          sx += std::abs(v);
          mn = std::min(mn, std::abs(v));
        }
        CHECK(nx >= mx - 1e-12);
        CHECK(nx <= sx + 1e-12);

        double dx = m.dual(x);
        CHECK(dx >= -1e-15);
        CHECK(dx <= mn + 1e-12);

        // homogeneity and the triangle inequality
        std::vector<double> scaled(x), sum(x);
        for (int i = 0; i < d; ++i) {
          scaled[i] *= 2.5;
          sum[i] += y[i];
        }
        CHECK(m.norm(scaled) == doctest::Approx(2.5 * nx).epsilon(1e-10));
        CHECK(m.norm(sum) <= nx + ny + 1e-10);
      }
      // unit vectors evaluate to 1
      for (int i = 0; i < d; ++i) {
        std::vector<double> e(d, 0.0);
        e[i] = -1.0;
        CHECK(m.norm(e) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("inclusion-exclusion oracle matches both evaluations up to d = 8") {
  recmax::Rng rng(13);
  for (int d = 2; d <= 8; ++d) {
    for (const auto& m : closed_form_models(d)) {
      CAPTURE(m.descriptor());
      for (int rep = 0; rep < 20; ++rep) {
        auto x = random_point(rng, d);
        CHECK(m.dual(x) == doctest::Approx(dual_via_inclusion_exclusion(m, x)).epsilon(1e-9));
        CHECK(m.norm(x) == doctest::Approx(norm_via_inclusion_exclusion(m, x)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("margins stay in the family with the same parameter") {
  recmax::Rng rng(17);
  const int d = 6;
  for (const auto& m : closed_form_models(d)) {
    CAPTURE(m.descriptor());
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
      std::vector<int> coords;
      for (int i = 0; i < d; ++i) {
        if (mask & (1u << i)) coords.push_back(i);
      }
      if (m.family() == Family::kMarshallOlkin && coords.size() < 2) continue;
      auto sub = m.margin(coords);
      CHECK(sub.dim() == static_cast<int>(coords.size()));
      CHECK(sub.family() == m.family());
      CHECK(sub.parameter() == m.parameter());

      auto x = random_point(rng, static_cast<int>(coords.size()));
      std::vector<double> embedded(d, 0.0);
      for (std::size_t j = 0; j < coords.size(); ++j) embedded[coords[j]] = x[j];
      // zero coordinates never attain the max, so the embedded norm is the
      // margin norm
      CHECK(sub.norm(x) == doctest::Approx(m.norm(embedded)).epsilon(1e-10));
    }
  }
}

TEST_CASE("closed-form constants") {
  CHECK(*DependenceModel::logistic(2.0, 3).concurrence_closed_form() ==
        doctest::Approx((1 - 0.5) * (1 - 0.25)).epsilon(1e-14));
  CHECK(*DependenceModel::logistic(2.0, 3).expected_norm_closed_form() ==
        doctest::Approx(1.5 * 1.25).epsilon(1e-14));
  CHECK(*DependenceModel::comonotone(5).concurrence_closed_form() == 1.0);
  CHECK(*DependenceModel::comonotone(5).expected_norm_closed_form() == 1.0);
  CHECK(*DependenceModel::independence(4).concurrence_closed_form() == 0.0);
  CHECK(*DependenceModel::independence(4).expected_norm_closed_form() == 4.0);
  CHECK(*DependenceModel::marshall_olkin(0.5, 2).concurrence_closed_form() ==
        doctest::Approx(0.5 / (0.5 + 2 * 0.5)).epsilon(1e-14));
  CHECK(!DependenceModel::weibull_model(1.5, 3).concurrence_closed_form().has_value());
  CHECK(!DependenceModel::weibull_model(1.5, 3).expected_norm_closed_form().has_value());

  // The Bernoulli concurrence ties to the norm of the unit vector: only the
  // all-ones generator outcome leaves the min positive, so the probability
  // is beta^(d-1) * E min |eta_i| = beta^(d-1) / ||1||.
  for (double beta : {0.3, 0.5, 1.0}) {
    for (int d = 2; d <= 6; ++d) {
      auto m = DependenceModel::bernoulli(beta, d);
      std::vector<double> ones(d, 1.0);
      double via_norm = std::pow(beta, d - 1) / m.norm(ones);
      CHECK(*m.concurrence_closed_form() == doctest::Approx(via_norm).epsilon(1e-12));
      CHECK(*m.concurrence_closed_form() ==
            doctest::Approx(std::pow(beta, d) / (1.0 - std::pow(1.0 - beta, d)))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("dimension one is degenerate for every family") {
  for (const auto& m : closed_form_models(1)) {
    CAPTURE(m.descriptor());
    double x[] = {-2.5};
    CHECK(m.norm(x) == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(m.dual(x) == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(*m.concurrence_closed_form() == 1.0);
    CHECK(*m.expected_norm_closed_form() == 1.0);
  }
}

TEST_CASE("descriptor parsing round-trips and rejects bad input") {
  auto m = DependenceModel::parse("logistic:2.0", 3);
  CHECK(m.descriptor() == "logistic:2:d=3");
  auto again = DependenceModel::parse(m.descriptor());
  CHECK(again.descriptor() == m.descriptor());

  CHECK(DependenceModel::parse("bernoulli:0.5:d=2").dim() == 2);
  CHECK(DependenceModel::parse("indep:d=4").family() == Family::kIndependence);
  CHECK(DependenceModel::parse("mo:0.3:d=2").family() == Family::kMarshallOlkin);
  CHECK(DependenceModel::parse("weibull:1.5", 2).family() == Family::kWeibullModel);

  CHECK_THROWS_AS(DependenceModel::parse("logistic:1.0:d=2"), std::invalid_argument);
  CHECK_THROWS_AS(DependenceModel::parse("logistic:2"), std::invalid_argument);  // no dimension
  CHECK_THROWS_AS(DependenceModel::parse("bernoulli:0:d=2"), std::invalid_argument);
  CHECK_THROWS_AS(DependenceModel::parse("bernoulli:1.5:d=2"), std::invalid_argument);
  CHECK_THROWS_AS(DependenceModel::parse("mo:1:d=2"), std::invalid_argument);
  CHECK_THROWS_AS(DependenceModel::parse("nosuch:d=2"), std::invalid_argument);
  CHECK_THROWS_AS(DependenceModel::parse("logistic:2:d=0"), std::invalid_argument);

  // beyond d = 20 the subset expansion is refused, but closed forms still work
  auto wide = DependenceModel::parse("logistic:2:d=24");
  std::vector<double> x(24, -1.0);
  CHECK(wide.norm(x) == doctest::Approx(std::pow(24.0, 0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(wide.dual(x), std::domain_error);
  auto wide_w = DependenceModel::parse("weibull:1:d=24");
  CHECK(wide_w.dual(x) == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
  CHECK_THROWS_AS(wide_w.norm(x), std::domain_error);
}

TEST_CASE("custom models sample but do not evaluate") {
  auto fn = [](recmax::Rng& rng, std::span<double> out) {
    double u = rng.uniform_open();
    for (auto& v : out) v = 2.0 * u;  // unit mean, bound 2
  };
  auto m = DependenceModel::custom(3, fn, 2.0);
  CHECK(m.dim() == 3);
  CHECK(!m.has_closed_forms());
  CHECK(m.generator_bound() == 2.0);

  recmax::Rng rng(3);
  std::vector<double> z(3);
  m.sample_generator(rng, z);
  CHECK(z[0] == z[1]);
  CHECK(z[0] > 0.0);
  CHECK(z[0] < 2.0);

  double x[] = {-1.0, -1.0, -1.0};
  CHECK_THROWS_AS(m.norm(x), std::domain_error);
  CHECK_THROWS_AS(m.dual(x), std::domain_error);
  CHECK(!m.concurrence_closed_form().has_value());
}

TEST_CASE("compensated summation survives cancellation") {
  recmax::KahanSum s;
  s.add(1.0);
  for (int i = 0; i < 10; ++i) {
    s.add(1e16);
    s.add(-1e16);
  }
  CHECK(s.value() == 1.0);
}
