#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "edgeimp/evolution.hpp"
#include "edgeimp/kernels.hpp"

namespace edgeimp {

/// Binary outcomes k_e against ln l_e.
struct BernoulliSample {
  std::vector<double> log_l;
  std::vector<std::uint8_t> changed;

  std::size_t size() const { return log_l.size(); }
};

/// Relative changes x_e = ΔA against ln l_e (changed records only).
struct MagnitudeSample {
  std::vector<double> log_l;
  std::vector<double> x;

  std::size_t size() const { return log_l.size(); }
};

struct FitSamples {
  BernoulliSample bernoulli;
  MagnitudeSample magnitude;
  std::size_t excluded_new = 0;
  std::size_t excluded_vanished = 0;
};

/// Splits records into the two fitting samples. New and vanished edges are
/// excluded and counted; a record enters the magnitude sample when it is
/// flagged changed and |ΔA| > tol.
FitSamples build_samples(std::span<const ChangeRecord> records, double tol = 1e-12);

/// Σ k ln θ + (1-k) ln(1-θ), θ = clamp(α l^ρ, 0, 1). Returns -inf when an
/// observed outcome has probability zero. Throws DataError on an empty sample.
double loglik_alpha_rho(const BernoulliSample& s, double alpha, double rho, Exec exec = Exec::parallel);

/// Closed-form (∂/∂α, ∂/∂ρ) of loglik_alpha_rho at a strictly feasible point.
std::array<double, 2> loglik_alpha_rho_gradient(const BernoulliSample& s, double alpha, double rho);

struct FitOptions {
  Exec exec = Exec::parallel;
  int restarts = 4;  ///< perturbed starting points besides (change fraction, 0)
};

struct BernoulliFit {
  double alpha = 0.0;
  double rho = 0.0;
  std::optional<double> se_alpha, se_rho;  ///< sqrt(diag((-H)^-1)) in (α, ρ)
  double log_likelihood = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;  ///< projected gradient norm in (ln α, ρ)
  bool upper_active = false;   ///< θ = 1 at the largest observed l_e
  bool lower_active = false;   ///< θ = 1 at the smallest observed l_e
  bool rank_deficient = false;
  bool se_reliable = true;
  bool converged = false;
};

/// Constrained MLE of (α, ρ) subject to 0 <= α l_e^ρ <= 1 for every observed
/// l_e. Throws DataError when all or none of the records changed.
BernoulliFit fit_alpha_rho(const BernoulliSample& s, const FitOptions& opts = {});

/// Gaussian log-likelihood of x_e with σ = β l_e^γ.
double loglik_beta_gamma(const MagnitudeSample& s, double beta, double gamma, Exec exec = Exec::parallel);

/// Closed-form (∂/∂β, ∂/∂γ) of loglik_beta_gamma.
std::array<double, 2> loglik_beta_gamma_gradient(const MagnitudeSample& s, double beta, double gamma);

/// β(γ) = sqrt((1/N) Σ x_e² / l_e^{2γ}), the maximizer over β at fixed γ.
double profile_beta(const MagnitudeSample& s, double gamma);

struct MagnitudeFit {
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<double> se_beta, se_gamma;
  double log_likelihood = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;  ///< full (β, γ) gradient at the reported point
  double search_bound = 10.0;  ///< final half-width of the γ bracket
  bool boundary = false;       ///< every x_e was zero, β̂ = 0
  bool rank_deficient = false;
  bool converged = false;
};

/// Profile MLE of (β, γ). Throws DataError on fewer than 2 records or a
/// single distinct l_e, NumericalError when γ cannot be bracketed.
MagnitudeFit fit_beta_gamma(const MagnitudeSample& s, Exec exec = Exec::parallel);

}  // namespace edgeimp
