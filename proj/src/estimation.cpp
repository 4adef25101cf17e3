#include "edgeimp/estimation.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "edgeimp/error.hpp"

namespace edgeimp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec2 {
  double a = 0.0, b = 0.0;
};

struct Sym2 {
  double aa = 0.0, ab = 0.0, bb = 0.0;
};

double dot(Vec2 x, Vec2 y) { return x.a * y.a + x.b * y.b; }

// Solves (H + tau I) d = -g, raising tau until the shifted matrix is positive definite.
Vec2 newton_direction(const Sym2& h, Vec2 g) {
  const double scale = std::max({std::abs(h.aa), std::abs(h.bb), 1e-300});
  double tau = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    const double aa = h.aa + tau, bb = h.bb + tau;
    const double det = aa * bb - h.ab * h.ab;
    if (aa > 0.0 && det > 1e-14 * aa * bb) return {-(bb * g.a - h.ab * g.b) / det, -(aa * g.b - h.ab * g.a) / det};
    tau = tau == 0.0 ? 1e-12 * scale : tau * 10.0;
  }
  return {-g.a / scale, -g.b / scale};
}

// Negative log-likelihood of the Bernoulli model in (a = ln α, ρ), z = a + ρ L.
class BernoulliObjective {
 public:
  explicit BernoulliObjective(const BernoulliSample& s) : s_(s) {
    l_min_ = *std::min_element(s.log_l.begin(), s.log_l.end());
    l_max_ = *std::max_element(s.log_l.begin(), s.log_l.end());
  }

  double l_min() const { return l_min_; }
  double l_max() const { return l_max_; }

  double value(Vec2 x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < s_.size(); ++i) {
      const double z = x.a + x.b * s_.log_l[i];
      if (s_.changed[i]) {
        acc -= z;
      } else {
        if (z >= 0.0) return kInf;
        acc -= std::log(-std::expm1(z));
      }
    }
    return acc;
  }

  void derivatives(Vec2 x, Vec2& g, Sym2& h) const {
    g = {};
    h = {};
    for (std::size_t i = 0; i < s_.size(); ++i) {
      const double l = s_.log_l[i];
      const double z = x.a + x.b * l;
      double dz = -1.0, d2z = 0.0;
      if (!s_.changed[i]) {
        const double theta = std::exp(z);
        const double q = -std::expm1(z);
        dz = theta / q;
        d2z = theta / (q * q);
      } else {
        dz = -1.0;
      }
      g.a += dz;
      g.b += dz * l;
      h.aa += d2z;
      h.ab += d2z * l;
      h.bb += d2z * l * l;
    }
  }

  // Weighted spread of L under the Fisher weights; zero when ρ is unidentifiable.
  double weighted_log_l_variance(Vec2 x) const {
    double w_sum = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < s_.size(); ++i) {
      const double z = x.a + x.b * s_.log_l[i];
      const double theta = std::min(std::exp(z), 1.0 - 1e-16);
      const double w = theta / (1.0 - theta);
      w_sum += w;
      m1 += w * s_.log_l[i];
    }
    m1 /= w_sum;
    for (std::size_t i = 0; i < s_.size(); ++i) {
      const double z = x.a + x.b * s_.log_l[i];
      const double theta = std::min(std::exp(z), 1.0 - 1e-16);
      const double d = s_.log_l[i] - m1;
      m2 += theta / (1.0 - theta) * d * d;
    }
    return m2 / w_sum;
  }

 private:
  const BernoulliSample& s_;
  double l_min_ = 0.0, l_max_ = 0.0;
};

// Slack of the two feasibility constraints a + ρ L <= 0 at L_max and L_min.
Vec2 slack(const BernoulliObjective& f, Vec2 x) { return {-(x.a + x.b * f.l_max()), -(x.a + x.b * f.l_min())}; }

struct BarrierResult {
  Vec2 x;
  int iterations = 0;
};

BarrierResult barrier_solve(const BernoulliObjective& f, Vec2 x, bool distinct) {
  int iterations = 0;
  auto barrier_value = [&](Vec2 p, double mu) {
    const Vec2 c = slack(f, p);
    if (!(c.a > 0.0) || !(c.b > 0.0)) return kInf;
    double v = f.value(p);
    v -= mu * std::log(c.a);
    if (distinct) v -= mu * std::log(c.b);
    return v;
  };
  for (double mu = 1.0; mu >= 1e-12; mu *= 0.1) {
    for (int it = 0; it < 100; ++it) {
      ++iterations;
      Vec2 g;
      Sym2 h;
      f.derivatives(x, g, h);
      const Vec2 c = slack(f, x);
      // -mu ln(c) with c = -(a + ρ L): gradient mu/c (1, L), Hessian mu/c² (1, L)(1, L)^T.
      auto add_barrier = [&](double ci, double l) {
        g.a += mu / ci;
        g.b += mu / ci * l;
        const double w = mu / (ci * ci);
        h.aa += w;
        h.ab += w * l;
        h.bb += w * l * l;
      };
      add_barrier(c.a, f.l_max());
      if (distinct) add_barrier(c.b, f.l_min());
      const Vec2 d = newton_direction(h, g);
      const double decrement = -dot(g, d);
      const double f0 = barrier_value(x, mu);
      if (decrement < 1e-13 * (1.0 + std::abs(f0))) break;
      double step = 1.0;
      Vec2 trial{};
      bool accepted = false;
      for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
        trial = {x.a + step * d.a, x.b + step * d.b};
        const double ft = barrier_value(trial, mu);
        if (ft <= f0 - 1e-4 * step * decrement) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      x = trial;
    }
  }
  return {x, iterations};
}

struct PolishResult {
  Vec2 x;
  int iterations = 0;
  double gradient_norm = 0.0;
  int active = -1;  // 0: L_max constraint, 1: L_min constraint
  bool converged = false;
};

// Active-set projected Newton on the unpenalized objective.
PolishResult polish(const BernoulliObjective& f, Vec2 x, bool distinct, std::size_t n) {
  PolishResult out;
  const double act_tol = 1e-8;
  const std::array<double, 2> normals_l{f.l_max(), f.l_min()};
  const int constraints = distinct ? 2 : 1;
  int active = -1;
  {
    const Vec2 c = slack(f, x);
    if (c.a <= act_tol) active = 0;
    else if (distinct && c.b <= act_tol) active = 1;
  }
  if (active >= 0) {
    // Land exactly on the boundary.
    x.a = -x.b * normals_l[active];
  }
  const double g_tol = 1e-9 * std::max<double>(1.0, static_cast<double>(n));
  for (int it = 0; it < 200; ++it) {
    ++out.iterations;
    Vec2 g;
    Sym2 h;
    f.derivatives(x, g, h);
    Vec2 d;
    double proj_norm = 0.0;
    if (active >= 0) {
      const Vec2 nrm{1.0, normals_l[active]};
      const double nu = -dot(g, nrm) / dot(nrm, nrm);
      if (nu < 0.0) {
        // The objective improves by moving into the interior.
        active = -1;
        --it;
        continue;
      }
      const Vec2 t{-normals_l[active], 1.0};
      const double gt = dot(g, t);
      const double ht = h.aa * t.a * t.a + 2.0 * h.ab * t.a * t.b + h.bb * t.b * t.b;
      const double tt = dot(t, t);
      proj_norm = std::abs(gt) / std::sqrt(tt);
      const double s = ht > 0.0 ? -gt / ht : -gt / tt;
      d = {s * t.a, s * t.b};
    } else {
      proj_norm = std::hypot(g.a, g.b);
      d = newton_direction(h, g);
    }
    out.gradient_norm = proj_norm;
    if (proj_norm <= g_tol) {
      out.converged = true;
      break;
    }
    // Largest step keeping a + ρ L <= 0 at both extremes.
    double s_max = kInf;
    int hit = -1;
    for (int j = 0; j < constraints; ++j) {
      if (j == active) continue;
      const Vec2 nrm{1.0, normals_l[j]};
      const double nd = dot(nrm, d);
      const double cj = -dot(nrm, x);
      if (nd > 0.0 && cj / nd < s_max) {
        s_max = std::max(0.0, cj / nd);
        hit = j;
      }
    }
    const double f0 = f.value(x);
    const double slope = dot(g, d);
    if (slope >= 0.0) {
      out.converged = proj_norm <= 1e3 * g_tol;
      break;
    }
    double step = std::min(1.0, s_max);
    bool accepted = false;
    Vec2 trial{};
    for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
      trial = {x.a + step * d.a, x.b + step * d.b};
      if (f.value(trial) <= f0 + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No further decrease is representable.
      out.converged = proj_norm <= 1e3 * g_tol;
      break;
    }
    if (hit >= 0 && step == s_max) {
      active = hit;
      trial.a = -trial.b * normals_l[hit];
    }
    const double moved = std::hypot(trial.a - x.a, trial.b - x.b);
    x = trial;
    if (moved <= 1e-15 * (1.0 + std::hypot(x.a, x.b))) {
      f.derivatives(x, g, h);
      out.gradient_norm = active >= 0 ? std::abs(dot(g, {-normals_l[active], 1.0})) /
                                            std::hypot(normals_l[active], 1.0)
                                      : std::hypot(g.a, g.b);
      out.converged = out.gradient_norm <= 1e3 * g_tol;
      break;
    }
  }
  out.x = x;
  out.active = active;
  return out;
}

// Central-difference Hessian of `f` at (p0, p1) with steps 1e-5 max(1, |p|).
template <class F>
std::optional<Sym2> numerical_hessian(F f, double p0, double p1) {
  const double h0 = 1e-5 * std::max(1.0, std::abs(p0));
  const double h1 = 1e-5 * std::max(1.0, std::abs(p1));
  const double f00 = f(p0, p1);
  const double fp0 = f(p0 + h0, p1), fm0 = f(p0 - h0, p1);
  const double fp1 = f(p0, p1 + h1), fm1 = f(p0, p1 - h1);
  const double fpp = f(p0 + h0, p1 + h1), fpm = f(p0 + h0, p1 - h1);
  const double fmp = f(p0 - h0, p1 + h1), fmm = f(p0 - h0, p1 - h1);
  for (double v : {f00, fp0, fm0, fp1, fm1, fpp, fpm, fmp, fmm})
    if (!std::isfinite(v)) return std::nullopt;
  Sym2 h;
  h.aa = (fp0 - 2.0 * f00 + fm0) / (h0 * h0);
  h.bb = (fp1 - 2.0 * f00 + fm1) / (h1 * h1);
  h.ab = (fpp - fpm - fmp + fmm) / (4.0 * h0 * h1);
  return h;
}

// sqrt(diag((-H)^-1)) for a log-likelihood Hessian H; empty unless -H is positive definite.
std::optional<std::array<double, 2>> standard_errors(const Sym2& h) {
  const double aa = -h.aa, ab = -h.ab, bb = -h.bb;
  const double det = aa * bb - ab * ab;
  if (!(aa > 0.0) || !(bb > 0.0) || !(det > 0.0)) return std::nullopt;
  return std::array<double, 2>{std::sqrt(bb / det), std::sqrt(aa / det)};
}

}  // namespace

FitSamples build_samples(std::span<const ChangeRecord> records, double tol) {
  FitSamples out;
  for (const auto& r : records) {
    if (r.new_edge) {
      ++out.excluded_new;
      continue;
    }
    if (r.vanished_edge) {
      ++out.excluded_vanished;
      continue;
    }
    if (!(r.l_e > 0.0)) throw DataError("change record with non-positive l_e");
    const double log_l = std::log(r.l_e);
    out.bernoulli.log_l.push_back(log_l);
    out.bernoulli.changed.push_back(r.changed ? 1 : 0);
    if (r.changed && std::abs(r.rel_change) > tol) {
      out.magnitude.log_l.push_back(log_l);
      out.magnitude.x.push_back(r.rel_change);
    }
  }
  return out;
}

double loglik_alpha_rho(const BernoulliSample& s, double alpha, double rho, Exec exec) {
  if (s.size() == 0) throw DataError("log-likelihood of an empty record set");
  return kernels::bernoulli_loglik(s.log_l, s.changed, alpha, rho, exec);
}

std::array<double, 2> loglik_alpha_rho_gradient(const BernoulliSample& s, double alpha, double rho) {
  if (s.size() == 0) throw DataError("gradient of an empty record set");
  if (!(alpha > 0.0)) throw DataError("gradient needs alpha > 0");
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double theta = alpha * std::exp(rho * s.log_l[i]);
    if (!(theta < 1.0)) throw DataError("gradient needs a strictly feasible point");
    const double k = s.changed[i] ? 1.0 : 0.0;
    const double common = (k - theta) / (1.0 - theta);
    g[0] += common / alpha;
    g[1] += common * s.log_l[i];
  }
  return g;
}

BernoulliFit fit_alpha_rho(const BernoulliSample& s, const FitOptions& opts) {
  if (s.size() == 0) throw DataError("fit_alpha_rho: no records");
  if (s.changed.size() != s.log_l.size()) throw DataError("fit_alpha_rho: sample size mismatch");
  std::size_t positives = 0;
  for (auto k : s.changed) positives += k ? 1 : 0;
  if (positives == 0) throw DataError("fit_alpha_rho: no record changed");
  if (positives == s.size()) throw DataError("fit_alpha_rho: every record changed");
  for (double l : s.log_l)
    if (!std::isfinite(l)) throw DataError("fit_alpha_rho: non-finite ln l_e");

  const BernoulliObjective f(s);
  const bool distinct = f.l_max() > f.l_min();
  const double frac = static_cast<double>(positives) / static_cast<double>(s.size());
  double mean_l = 0.0;
  for (double l : s.log_l) mean_l += l;
  mean_l /= static_cast<double>(s.size());

  std::vector<Vec2> starts{{std::log(frac), 0.0}};
  const std::array<double, 4> rho_offsets{0.5, -0.5, 1.0, -1.0};
  for (int r = 0; r < std::min<int>(opts.restarts, 4); ++r) {
    const double rho0 = rho_offsets[static_cast<std::size_t>(r)];
    double a0 = std::log(frac) - rho0 * mean_l;
    a0 = std::min({a0, -rho0 * f.l_max() - 0.1, -rho0 * f.l_min() - 0.1});
    starts.push_back({a0, rho0});
  }

  BernoulliFit best;
  double best_nll = kInf;
  int total_iterations = 0;
  for (const Vec2& x0 : starts) {
    auto barrier = barrier_solve(f, x0, distinct);
    auto pol = polish(f, barrier.x, distinct, s.size());
    total_iterations += barrier.iterations + pol.iterations;
    const double nll = f.value(pol.x);
    // Keep the first start on ties so the result does not depend on restarts.
    if (nll < best_nll - 1e-12 * (1.0 + std::abs(nll))) {
      best_nll = nll;
      best.alpha = std::exp(pol.x.a);
      best.rho = pol.x.b;
      best.gradient_norm = pol.gradient_norm;
      best.upper_active = pol.active == 0;
      best.lower_active = pol.active == 1;
      best.converged = pol.converged;
      best.rank_deficient = f.weighted_log_l_variance(pol.x) <= 1e-12 * (1.0 + mean_l * mean_l);
    }
  }
  best.iterations = total_iterations;
  best.log_likelihood = loglik_alpha_rho(s, best.alpha, best.rho, opts.exec);
  best.se_reliable = !(best.upper_active || best.lower_active || best.rank_deficient);
  if (!best.rank_deficient) {
    const auto h = numerical_hessian(
        [&](double a, double r) { return loglik_alpha_rho(s, a, r, opts.exec); }, best.alpha, best.rho);
    if (h) {
      if (auto se = standard_errors(*h)) {
        best.se_alpha = (*se)[0];
        best.se_rho = (*se)[1];
      } else {
        best.rank_deficient = true;
        best.se_reliable = false;
      }
    } else {
      best.se_reliable = false;
    }
  }
  return best;
}

double loglik_beta_gamma(const MagnitudeSample& s, double beta, double gamma, Exec exec) {
  if (s.size() == 0) throw DataError("log-likelihood of an empty record set");
  if (!(beta > 0.0)) throw DataError("loglik_beta_gamma needs beta > 0");
  return kernels::gaussian_loglik(s.log_l, s.x, beta, gamma, exec);
}

std::array<double, 2> loglik_beta_gamma_gradient(const MagnitudeSample& s, double beta, double gamma) {
  if (s.size() == 0) throw DataError("gradient of an empty record set");
  if (!(beta > 0.0)) throw DataError("gradient needs beta > 0");
  // With r_i = x_i² / (β² l_i^{2γ}): ∂/∂β = Σ (r_i - 1)/β, ∂/∂γ = Σ (r_i - 1) L_i.
  double gb = 0.0, gg = 0.0;
  const double log_beta = std::log(beta);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double z = s.x[i] * std::exp(-(log_beta + gamma * s.log_l[i]));
    const double r1 = z * z - 1.0;
    gb += r1;
    gg += r1 * s.log_l[i];
  }
  return {gb / beta, gg};
}

namespace {

// ln S(γ), S(γ) = (1/N) Σ x_i² e^{-2γ L_i}, via log-sum-exp; also the softmax
// weights' mean of L when requested.
struct ProfileTerms {
  double log_s = -kInf;
  double weighted_centered_l = 0.0;  ///< Σ w_i (L_i - L̄)
  double weighted_var_l = 0.0;
};

ProfileTerms profile_terms(const MagnitudeSample& s, double gamma, double mean_l) {
  double m = -kInf;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.x[i] == 0.0) continue;
    m = std::max(m, 2.0 * std::log(std::abs(s.x[i])) - 2.0 * gamma * s.log_l[i]);
  }
  ProfileTerms out;
  if (m == -kInf) return out;
  double total = 0.0, c1 = 0.0;
  std::vector<double> w(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.x[i] == 0.0) continue;
    w[i] = std::exp(2.0 * std::log(std::abs(s.x[i])) - 2.0 * gamma * s.log_l[i] - m);
    total += w[i];
  }
  for (std::size_t i = 0; i < s.size(); ++i) c1 += w[i] / total * (s.log_l[i] - mean_l);
  double c2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s.log_l[i] - mean_l - c1;
    c2 += w[i] / total * d * d;
  }
  out.log_s = m + std::log(total) - std::log(static_cast<double>(s.size()));
  out.weighted_centered_l = c1;
  out.weighted_var_l = c2;
  return out;
}

}  // namespace

double profile_beta(const MagnitudeSample& s, double gamma) {
  if (s.size() == 0) throw DataError("profile_beta of an empty record set");
  double mean_l = 0.0;
  for (double l : s.log_l) mean_l += l;
  mean_l /= static_cast<double>(s.size());
  const auto t = profile_terms(s, gamma, mean_l);
  return t.log_s == -kInf ? 0.0 : std::exp(0.5 * t.log_s);
}

MagnitudeFit fit_beta_gamma(const MagnitudeSample& s, Exec exec) {
  if (s.x.size() != s.log_l.size()) throw DataError("fit_beta_gamma: sample size mismatch");
  if (s.size() < 2) throw DataError("fit_beta_gamma needs at least 2 records");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!std::isfinite(s.log_l[i]) || !std::isfinite(s.x[i])) throw DataError("fit_beta_gamma: non-finite input");
  const auto [lo_it, hi_it] = std::minmax_element(s.log_l.begin(), s.log_l.end());
  if (*lo_it == *hi_it) throw DataError("fit_beta_gamma needs at least 2 distinct l_e values");

  const double n = static_cast<double>(s.size());
  double sum_l = 0.0;
  for (double l : s.log_l) sum_l += l;
  const double mean_l = sum_l / n;

  MagnitudeFit out;
  if (std::all_of(s.x.begin(), s.x.end(), [](double v) { return v == 0.0; })) {
    out.boundary = true;
    out.log_likelihood = kInf;
    return out;
  }

  // Profiled negative log-likelihood up to constants: (N/2) ln S(γ) + γ ΣL.
  // Centering L keeps both terms of comparable size.
  auto neg_profile = [&](double gamma) { return 0.5 * n * profile_terms(s, gamma, mean_l).log_s + gamma * sum_l; };

  double bound = 10.0;
  double gamma = 0.0;
  boost::uintmax_t brent_iters = 0;
  for (int expand = 0;; ++expand) {
    boost::uintmax_t max_iter = 500;
    const auto r = boost::math::tools::brent_find_minima(neg_profile, -bound, bound, 52, max_iter);
    brent_iters += max_iter;
    gamma = r.first;
    if (bound - std::abs(gamma) > 1e-6 * bound) break;
    if (expand == 5) throw NumericalError("gamma optimum not bracketed within [-" + std::to_string(bound) + ", " +
                                          std::to_string(bound) + "]");
    bound *= 2.0;
  }
  out.search_bound = bound;
  out.iterations = static_cast<int>(brent_iters);

  // Newton polish on d/dγ = N Σ w_i (L_i - L̄), d²/dγ² = -2N Var_w(L).
  for (int it = 0; it < 50; ++it) {
    const auto t = profile_terms(s, gamma, mean_l);
    const double d1 = n * t.weighted_centered_l;
    const double d2 = -2.0 * n * t.weighted_var_l;
    ++out.iterations;
    if (!(d2 < 0.0)) break;
    const double step = -d1 / d2;
    gamma += step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(gamma))) break;
  }

  out.gamma = gamma;
  out.beta = profile_beta(s, gamma);
  out.log_likelihood = loglik_beta_gamma(s, out.beta, out.gamma, exec);
  const auto g = loglik_beta_gamma_gradient(s, out.beta, out.gamma);
  out.gradient_norm = std::hypot(g[0], g[1]);
  // The β component scales with N/β; judge it relative to that scale.
  out.converged = std::abs(g[1]) < 1e-6 && std::abs(g[0]) * out.beta < 1e-6 * std::max(1.0, n);

  const auto h = numerical_hessian([&](double b, double gm) { return loglik_beta_gamma(s, b, gm, exec); }, out.beta,
                                   out.gamma);
  if (h) {
    if (auto se = standard_errors(*h)) {
      out.se_beta = (*se)[0];
      out.se_gamma = (*se)[1];
    } else {
      out.rank_deficient = true;
    }
  } else {
    out.rank_deficient = true;
  }
  return out;
}

}  // namespace edgeimp
