#pragma once

#include <armadillo>
#include <atomic>
#include <vector>

#include "wivar/common.hpp"
#include "wivar/rng.hpp"

namespace wivar {

// --- Cholesky with escalating diagonal jitter ------------------------------

struct CholReport {
  int jitter_steps = 0;   // 0 means the clean factorization succeeded
  double jitter = 0.0;    // absolute value added to the diagonal
};

// Counters for jitter activity across the process; near-singular P(t|t)
// matrices show up routinely in the time-varying models and we want the
// fallbacks visible in run statistics.
struct CholStats {
  static std::atomic<long>& calls();
  static std::atomic<long>& jittered();
  static void reset();
};

// Lower-triangular L with L*L' = m. Jitter ladder 1e-12..1e-8 (relative to
// the mean diagonal magnitude) on failure; throws NumericalError beyond.
arma::mat chol_psd(const arma::mat& m);
arma::mat chol_psd(const arma::mat& m, CholReport& report);

// --- Random draws -----------------------------------------------------------

arma::vec draw_mvn(const arma::vec& mean, const arma::mat& cov, RngStream& rng);
// Variant taking a precomputed lower Cholesky factor of the covariance.
arma::vec draw_mvn_chol(const arma::vec& mean, const arma::mat& chol_lower,
                        RngStream& rng);
arma::mat draw_wishart(const arma::mat& scale, double dof, RngStream& rng);
// Inverse Wishart with mean scale / (dof - p - 1) for dof > p + 1.
arma::mat draw_inverse_wishart(const arma::mat& scale, double dof,
                               RngStream& rng);
double draw_inverse_gamma(double shape, double scale, RngStream& rng);

// --- Random-walk state space (shared by the time-varying samplers) ---------

// Observation:  y_t = Z_t b_t + e_t,   e_t ~ N(0, R_t)
// Transition:   b_t = b_{t-1} + w_t,   w_t ~ N(0, Q)
// loadings has one Z_t per period (k x m); obs_cov either one R per period
// or a single shared matrix.
struct StateSpaceModel {
  std::vector<arma::mat> loadings;
  std::vector<arma::mat> obs_cov;
  arma::mat state_cov;
  arma::vec init_mean;
  arma::mat init_cov;

  std::size_t periods() const { return loadings.size(); }
  const arma::mat& obs_cov_at(std::size_t t) const {
    return obs_cov.size() == 1 ? obs_cov.front() : obs_cov[t];
  }
  void validate(const arma::mat& obs) const;
};

struct KalmanResult {
  arma::mat filtered_mean;               // T x m
  std::vector<arma::mat> filtered_cov;   // T entries, m x m
  double log_likelihood = 0.0;
};

KalmanResult kalman_filter(const StateSpaceModel& model, const arma::mat& obs);

// Rauch-Tung-Striebel smoothed means, T x m.
arma::mat kalman_smoother_mean(const StateSpaceModel& model,
                               const arma::mat& obs);

// One joint draw of the state trajectory (forward filter, backward
// sampling). Returns T x m.
arma::mat carter_kohn(const StateSpaceModel& model, const arma::mat& obs,
                      RngStream& rng);

// --- Companion form ---------------------------------------------------------

// coeffs is the (n*p [+ 1]) x n stacked coefficient matrix of
// y_t' = x_t' B with x_t' = [y_{t-1}', ..., y_{t-p}', 1]; a trailing
// constant row is ignored. Returns the np x np companion matrix.
arma::mat companion(const arma::mat& coeffs, int n_vars, int lags);
double spectral_radius(const arma::mat& m);
bool is_stable(const arma::mat& companion_matrix);

}  // namespace wivar
