#pragma once

#include <armadillo>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wivar/common.hpp"
#include "wivar/rng.hpp"

namespace wivar {

struct VarSpec {
  std::vector<std::string> variables;  // column order of the data panel
  int lags = 4;
  bool include_constant = true;

  int n() const { return static_cast<int>(variables.size()); }
  int k() const { return n() * lags + (include_constant ? 1 : 0); }
  int variable_index(const std::string& name) const;  // ConfigError if absent
  void validate(const arma::mat& data) const;
};

// Lagged regression layout: row t of x is [y_{t-1}', ..., y_{t-p}', 1].
struct RegressionData {
  arma::mat y;  // (T - p) x n
  arma::mat x;  // (T - p) x k
};
RegressionData build_regression(const arma::mat& data, int lags,
                                bool include_constant);

struct OlsResult {
  arma::mat coefficients;  // k x n
  arma::mat residual_cov;  // n x n, unbiased divisor (T - k)
  arma::mat residuals;     // (T - p) x n
  arma::mat xtx;           // k x k
  arma::mat coef_cov;      // kn x kn, Sigma_hat (X'X)^{-1} Kronecker form
  long effective_obs = 0;
};

OlsResult ols(const VarSpec& spec, const arma::mat& data);

// Residual variances of per-variable AR(lags) regressions with constant;
// these scale the prior variance matrix.
arma::vec ar_residual_variances(const arma::mat& data, int lags);

// Natural-conjugate prior. Coefficient prior b ~ N(b0, Sigma kron Xi) with
// Xi diagonal: own and cross lag-l terms get (1/sigma_j^2)(lambda1/l^lambda3)^2
// and the constant gets (lambda1*lambda4)^2. Innovation prior
// Sigma ~ IW(S, alpha) with S = (alpha - n - 1) diag(sigma_j^2), alpha = n+2.
struct ConjugatePriorSpec {
  double lambda1 = 0.1;
  double lambda3 = 1.0;
  double lambda4 = 1e3;
  arma::vec own_lag_mean;  // per-variable prior mean of the own first lag;
                           // empty means 1.0 (random-walk prior) everywhere

  // Optional cross-variable tightness. When enabled the prior covariance is
  // a fixed diagonal (sigma_i^2/sigma_j^2 scaling with lambda2 on cross
  // terms) and the sampler runs the general, non-Kronecker update.
  bool use_lambda2 = false;
  double lambda2 = 0.5;
};

struct MaterializedConjugatePrior {
  arma::mat coef_mean;   // k x n
  arma::vec xi_diag;     // k
  arma::mat wishart_scale;  // n x n
  double wishart_dof = 0.0;
  arma::vec sigma_sq;    // per-variable AR residual variances
  arma::vec h_diag;      // kn; only filled when use_lambda2
};

MaterializedConjugatePrior materialize_conjugate_prior(
    const VarSpec& spec, const ConjugatePriorSpec& prior,
    const arma::mat& data);

// Shrinkage via artificial observations appended to the sample. Prior means
// are per-variable AR(1) coefficients estimated on a training sample (the
// full estimation sample when training_periods == 0).
struct DummyObsPriorSpec {
  double lambda = 0.0;  // overall tightness; 0 means 0.1 * (6 / n)
  bool sum_of_coefficients = false;
  double sum_of_coefficients_tightness = 10.0;  // tau = this * lambda
  int training_periods = 0;

  double effective_lambda(int n_vars) const {
    return lambda > 0.0 ? lambda : 0.1 * (6.0 / n_vars);
  }
};

struct DummyObservations {
  arma::mat y;
  arma::mat x;
};
DummyObservations build_dummy_observations(int n_vars, int lags,
                                           bool include_constant,
                                           double lambda,
                                           const arma::vec& ar1_means,
                                           const arma::vec& sigma,
                                           const arma::vec& variable_means,
                                           bool sum_of_coefficients,
                                           double sum_tightness);

using PriorSpec = std::variant<ConjugatePriorSpec, DummyObsPriorSpec>;

struct GibbsOptions {
  long iterations = 100000;
  long burn_in = 60000;
  long thin = 10;

  long retained() const { return (iterations - burn_in + thin - 1) / thin; }
  void validate() const;
};

struct PosteriorDrawSet {
  VarSpec spec;
  std::string prior_description;
  std::vector<arma::mat> coeff_draws;   // each k x n
  std::vector<arma::mat> sigma_draws;   // each n x n, symmetric PD
  std::vector<arma::mat> impact_draws;  // filled by identify(); empty slot =
                                        // draw skipped by identification
  std::vector<unsigned char> explosive;  // companion spectral radius >= 1
  long iterations = 0;
  long burn_in = 0;
  long thin = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t size() const { return coeff_draws.size(); }
  void save(const std::filesystem::path& path) const;
  static PosteriorDrawSet load(const std::filesystem::path& path);
};

PosteriorDrawSet gibbs_sample(const VarSpec& spec, const PriorSpec& prior,
                              const arma::mat& data, RngStream& rng,
                              const GibbsOptions& options);

// Gaussian log-likelihood of the VAR at the given parameters.
double var_loglik(const arma::mat& data, int lags, bool include_constant,
                  const arma::mat& coefficients, const arma::mat& sigma);

struct ConvergenceRow {
  std::string parameter;
  double rhat = 0.0;
  double ess = 0.0;
  bool flagged = false;  // rhat > 1.1
};

// Split-chain potential scale reduction and effective sample size for every
// coefficient and covariance entry. Requires >= 2 chains or >= 1000 draws.
std::vector<ConvergenceRow> convergence_report(
    std::span<const PosteriorDrawSet> chains);

void write_convergence_csv(const std::filesystem::path& path,
                           std::span<const ConvergenceRow> rows);

}  // namespace wivar
