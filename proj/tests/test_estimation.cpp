#include <cmath>
#include <random>

#include "doctest.h"
#include "edgeimp/error.hpp"
#include "edgeimp/estimation.hpp"

using namespace edgeimp;

namespace {

BernoulliSample bernoulli_sample(std::size_t n, double alpha, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ll(-5.0, -1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BernoulliSample s;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = ll(rng);
    s.log_l.push_back(l);
    s.changed.push_back(u(rng) < std::min(1.0, alpha * std::exp(rho * l)) ? 1 : 0);
  }
  return s;
}

MagnitudeSample magnitude_sample(std::size_t n, double beta, double gamma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ll(-6.0, -1.0);
  std::normal_distribution<double> z;
  MagnitudeSample s;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = ll(rng);
    s.log_l.push_back(l);
    s.x.push_back(beta * std::exp(gamma * l) * z(rng));
  }
  return s;
}

}  // namespace

TEST_CASE("building fitting samples") {
  std::vector<ChangeRecord> recs(5);
  recs[0].l_e = 0.1;
  recs[1].l_e = 0.2;
  recs[1].changed = true;
  recs[1].rel_change = 0.05;
  recs[2].l_e = 0.3;
  recs[2].changed = true;
  recs[2].new_edge = true;
  recs[3].l_e = 0.4;
  recs[3].changed = true;
  recs[3].vanished_edge = true;
  recs[4].l_e = 0.5;
  recs[4].changed = true;  // flagged but below tolerance
  const auto fs = build_samples(recs, 1e-12);
  CHECK(fs.bernoulli.size() == 3);
  CHECK(fs.magnitude.size() == 1);
  CHECK(fs.magnitude.x[0] == 0.05);
  CHECK(fs.magnitude.log_l[0] == doctest::Approx(std::log(0.2)));
  CHECK(fs.excluded_new == 1);
  CHECK(fs.excluded_vanished == 1);
}

TEST_CASE("Bernoulli log-likelihood gradient matches central differences") {
  const auto s = bernoulli_sample(2000, 0.5, 0.4, 1);
  const double a = 0.4, r = 0.3, h = 1e-6;
  const auto g = loglik_alpha_rho_gradient(s, a, r);
  const double ga = (loglik_alpha_rho(s, a + h, r) - loglik_alpha_rho(s, a - h, r)) / (2 * h);
  const double gr = (loglik_alpha_rho(s, a, r + h) - loglik_alpha_rho(s, a, r - h)) / (2 * h);
  CHECK(g[0] == doctest::Approx(ga).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(gr).epsilon(1e-6));
  CHECK(loglik_alpha_rho(s, a, r, Exec::serial) == loglik_alpha_rho(s, a, r, Exec::parallel));
}

TEST_CASE("alpha-rho fit recovers simulated parameters") {
  for (auto [alpha, rho] : {std::pair{0.5, 0.4}, std::pair{0.05, -0.3}, std::pair{1.5, 1.0}}) {
    const auto s = bernoulli_sample(20000, alpha, rho, 3);
    const auto fit = fit_alpha_rho(s);
    CHECK(fit.converged);
    REQUIRE(fit.se_alpha.has_value());
    REQUIRE(fit.se_rho.has_value());
    CHECK(std::abs(fit.alpha - alpha) < 4.0 * *fit.se_alpha);
    CHECK(std::abs(fit.rho - rho) < 4.0 * *fit.se_rho);
    // No feasible grid point does better than the reported optimum.
    double grid_best = -INFINITY;
    for (int i = 0; i <= 60; ++i)
      for (int j = 0; j <= 60; ++j) {
        const double a = std::exp(std::log(fit.alpha) - 0.3 + 0.01 * i);
        const double r = fit.rho - 0.3 + 0.01 * j;
        if (a * std::exp(r * -1.0) > 1.0 || a * std::exp(r * -5.0) > 1.0) continue;
        grid_best = std::max(grid_best, loglik_alpha_rho(s, a, r));
      }
    CHECK(fit.log_likelihood >= grid_best - 1e-9);
  }
}

TEST_CASE("alpha-rho fit with an active constraint") {
  // Every record at the largest l_e changed: the optimum has theta = 1 there.
  BernoulliSample s;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 3000; ++i) {
    const double l = -3.0 + (i % 3);  // -3, -2, -1
    s.log_l.push_back(l);
    const double p = l == -1.0 ? 1.0 : (l == -2.0 ? 0.6 : 0.3);
    s.changed.push_back(u(rng) < p ? 1 : 0);
  }
  const auto fit = fit_alpha_rho(s);
  CHECK(fit.upper_active);
  CHECK_FALSE(fit.se_reliable);
  CHECK(fit.alpha * std::exp(fit.rho * -1.0) == doctest::Approx(1.0).epsilon(1e-9));
  for (double l : {-3.0, -2.0}) CHECK(fit.alpha * std::exp(fit.rho * l) <= 1.0);
  CHECK(std::isfinite(fit.log_likelihood));
}

TEST_CASE("alpha-rho fit on a single distinct l_e") {
  BernoulliSample s;
  for (int i = 0; i < 100; ++i) {
    s.log_l.push_back(-2.0);
    s.changed.push_back(i < 30);
  }
  const auto fit = fit_alpha_rho(s);
  CHECK(fit.rank_deficient);
  CHECK(fit.alpha * std::exp(fit.rho * -2.0) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("alpha-rho fit rejects degenerate outcomes") {
  BernoulliSample none{{-1.0, -2.0}, {0, 0}};
  BernoulliSample all{{-1.0, -2.0}, {1, 1}};
  CHECK_THROWS_AS(fit_alpha_rho(none), DataError);
  CHECK_THROWS_AS(fit_alpha_rho(all), DataError);
  CHECK_THROWS_AS(fit_alpha_rho(BernoulliSample{}), DataError);
}

TEST_CASE("profile beta and the magnitude gradient") {
  const auto s = magnitude_sample(5000, 0.01, 0.3, 4);
  double ss = 0.0;
  for (double x : s.x) ss += x * x;
  CHECK(profile_beta(s, 0.0) == doctest::Approx(std::sqrt(ss / s.size())).epsilon(1e-14));
  const double b = 0.02, g = 0.2, h = 1e-7;
  const auto grad = loglik_beta_gamma_gradient(s, b, g);
  CHECK(grad[0] == doctest::Approx((loglik_beta_gamma(s, b + h, g) - loglik_beta_gamma(s, b - h, g)) / (2 * h))
                       .epsilon(1e-5));
  CHECK(grad[1] == doctest::Approx((loglik_beta_gamma(s, b, g + h) - loglik_beta_gamma(s, b, g - h)) / (2 * h))
                       .epsilon(1e-5));
  // The profile maximises over beta at fixed gamma.
  const double pb = profile_beta(s, g);
  CHECK(loglik_beta_gamma(s, pb, g) >= loglik_beta_gamma(s, pb * 1.01, g));
  CHECK(loglik_beta_gamma(s, pb, g) >= loglik_beta_gamma(s, pb * 0.99, g));
}

TEST_CASE("beta-gamma fit recovers simulated parameters") {
  for (double gamma : {-0.5, 0.0, 0.5}) {
    const auto s = magnitude_sample(20000, 0.008, gamma, 10 + static_cast<int>(gamma * 10));
    const auto fit = fit_beta_gamma(s);
    CHECK(fit.converged);
    CHECK(fit.beta == doctest::Approx(0.008).epsilon(0.05));
    CHECK(std::abs(fit.gamma - gamma) < 4.0 * fit.se_gamma.value());
    CHECK(fit.beta == doctest::Approx(profile_beta(s, fit.gamma)).epsilon(1e-12));
    CHECK(fit.gradient_norm < 1e-3);
  }
}

TEST_CASE("beta-gamma degenerate inputs") {
  MagnitudeSample zeros{{-1.0, -2.0, -3.0}, {0.0, 0.0, 0.0}};
  const auto fit = fit_beta_gamma(zeros);
  CHECK(fit.boundary);
  CHECK(fit.beta == 0.0);
  CHECK_THROWS_AS(fit_beta_gamma(MagnitudeSample{{-1.0}, {0.1}}), DataError);
  CHECK_THROWS_AS(fit_beta_gamma(MagnitudeSample{{-1.0, -1.0}, {0.1, -0.2}}), DataError);
}
