#include "wivar/probkernel.hpp"

#include <cmath>

namespace wivar {

std::atomic<long>& CholStats::calls() {
  static std::atomic<long> v{0};
  return v;
}
std::atomic<long>& CholStats::jittered() {
  static std::atomic<long> v{0};
  return v;
}
void CholStats::reset() {
  calls() = 0;
  jittered() = 0;
}

arma::mat chol_psd(const arma::mat& m) {
  CholReport report;
  return chol_psd(m, report);
}

arma::mat chol_psd(const arma::mat& m, CholReport& report) {
  CholStats::calls()++;
  if (m.n_rows != m.n_cols) {
    throw NumericalError("cholesky: matrix is not square");
  }
  arma::mat sym = 0.5 * (m + m.t());
  arma::mat lower;
  if (arma::chol(lower, sym, "lower")) {
    report = CholReport{};
    return lower;
  }
  CholStats::jittered()++;
  // Escalating diagonal jitter, relative to the diagonal magnitude.
  double unit = arma::mean(arma::abs(sym.diag()));
  if (!(unit > 0.0)) unit = 1.0;
  int step = 0;
  for (double eps = 1e-12; eps <= 1e-8 * 1.0001; eps *= 10.0) {
    ++step;
    arma::mat jittered = sym;
    jittered.diag() += eps * unit;
    if (arma::chol(lower, jittered, "lower")) {
      report.jitter_steps = step;
      report.jitter = eps * unit;
      return lower;
    }
  }
  throw NumericalError("cholesky: matrix not positive definite after jitter");
}

arma::vec draw_mvn_chol(const arma::vec& mean, const arma::mat& chol_lower,
                        RngStream& rng) {
  arma::vec z(mean.n_elem);
  for (auto& v : z) v = rng.normal();
  return mean + chol_lower * z;
}

arma::vec draw_mvn(const arma::vec& mean, const arma::mat& cov,
                   RngStream& rng) {
  if (cov.n_rows != mean.n_elem || cov.n_cols != mean.n_elem) {
    throw std::invalid_argument("mvn draw: dimension mismatch");
  }
  return draw_mvn_chol(mean, chol_psd(cov), rng);
}

arma::mat draw_wishart(const arma::mat& scale, double dof, RngStream& rng) {
  const arma::uword p = scale.n_rows;
  if (!(dof > static_cast<double>(p) - 1.0)) {
    throw std::invalid_argument("wishart draw: dof must exceed dim - 1");
  }
  // Bartlett decomposition.
  arma::mat a(p, p, arma::fill::zeros);
  for (arma::uword i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(rng.chi_square(dof - static_cast<double>(i)));
    for (arma::uword j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  arma::mat l = chol_psd(scale);
  arma::mat la = l * a;
  return la * la.t();
}

arma::mat draw_inverse_wishart(const arma::mat& scale, double dof,
                               RngStream& rng) {
  arma::mat w = draw_wishart(arma::inv_sympd(0.5 * (scale + scale.t())), dof,
                             rng);
  arma::mat x = arma::inv_sympd(0.5 * (w + w.t()));
  return 0.5 * (x + x.t());
}

double draw_inverse_gamma(double shape, double scale, RngStream& rng) {
  return rng.inverse_gamma(shape, scale);
}

// --- State space ------------------------------------------------------------

void StateSpaceModel::validate(const arma::mat& obs) const {
  if (loadings.empty()) throw std::invalid_argument("state space: no periods");
  if (obs.n_rows != loadings.size()) {
    throw std::invalid_argument("state space: observation rows != periods");
  }
  const arma::uword m = init_mean.n_elem;
  const arma::uword k = obs.n_cols;
  if (init_cov.n_rows != m || init_cov.n_cols != m ||
      state_cov.n_rows != m || state_cov.n_cols != m) {
    throw std::invalid_argument("state space: covariance dimension mismatch");
  }
  for (std::size_t t = 0; t < loadings.size(); ++t) {
    if (loadings[t].n_rows != k || loadings[t].n_cols != m) {
      throw std::invalid_argument("state space: loading dimension mismatch");
    }
    const arma::mat& r = obs_cov_at(t);
    if (r.n_rows != k || r.n_cols != k) {
      throw std::invalid_argument("state space: obs covariance mismatch");
    }
  }
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void symmetrize(arma::mat& m) { m = 0.5 * (m + m.t()); }

// Solve F * X = B for symmetric F, with a jitter retry; also returns
// log|F| and F^{-1} v for the likelihood.
struct ObsSolve {
  arma::mat f_chol;
  double log_det = 0.0;
};

ObsSolve factor_obs(const arma::mat& f, std::size_t period) {
  ObsSolve out;
  try {
    out.f_chol = chol_psd(f);
  } catch (const NumericalError&) {
    throw NumericalError("kalman filter: innovation covariance lost positive "
                         "definiteness at period " + std::to_string(period));
  }
  out.log_det = 2.0 * arma::sum(arma::log(out.f_chol.diag()));
  return out;
}

}  // namespace

KalmanResult kalman_filter(const StateSpaceModel& model, const arma::mat& obs) {
  model.validate(obs);
  const std::size_t periods = model.periods();
  const arma::uword m = model.init_mean.n_elem;

  KalmanResult result;
  result.filtered_mean.set_size(periods, m);
  result.filtered_cov.resize(periods);

  arma::vec b = model.init_mean;
  arma::mat p = model.init_cov;
  for (std::size_t t = 0; t < periods; ++t) {
    // Random-walk prediction.
    arma::mat p_pred = p + model.state_cov;
    symmetrize(p_pred);

    const arma::mat& z = model.loadings[t];
    arma::vec innov = obs.row(t).t() - z * b;
    arma::mat f = z * p_pred * z.t() + model.obs_cov_at(t);
    symmetrize(f);
    ObsSolve fs = factor_obs(f, t);
    // K = P Z' F^{-1} via triangular solves.
    arma::mat zt_p = z * p_pred;  // k x m
    arma::mat finv_zp =
        arma::solve(arma::trimatu(fs.f_chol.t()),
                    arma::solve(arma::trimatl(fs.f_chol), zt_p));
    arma::vec finv_innov =
        arma::solve(arma::trimatu(fs.f_chol.t()),
                    arma::solve(arma::trimatl(fs.f_chol), innov));

    b = b + finv_zp.t() * innov;
    p = p_pred - finv_zp.t() * zt_p;
    symmetrize(p);

    result.log_likelihood +=
        -0.5 * (static_cast<double>(obs.n_cols) * kLog2Pi + fs.log_det +
                arma::dot(innov, finv_innov));
    result.filtered_mean.row(t) = b.t();
    result.filtered_cov[t] = p;
  }
  return result;
}

arma::mat kalman_smoother_mean(const StateSpaceModel& model,
                               const arma::mat& obs) {
  KalmanResult fwd = kalman_filter(model, obs);
  const std::size_t periods = model.periods();
  const arma::uword m = model.init_mean.n_elem;
  arma::mat smoothed(periods, m);
  arma::vec b_next = fwd.filtered_mean.row(periods - 1).t();
  smoothed.row(periods - 1) = b_next.t();
  for (std::size_t t = periods - 1; t-- > 0;) {
    const arma::mat& p_filt = fwd.filtered_cov[t];
    arma::mat p_pred = p_filt + model.state_cov;
    symmetrize(p_pred);
    arma::vec b_filt = fwd.filtered_mean.row(t).t();
    if (arma::trace(p_pred) <= 0.0) {
      b_next = b_filt;
    } else {
      arma::mat gain = p_filt * arma::pinv(p_pred);
      b_next = b_filt + gain * (b_next - b_filt);
    }
    smoothed.row(t) = b_next.t();
  }
  return smoothed;
}

arma::mat carter_kohn(const StateSpaceModel& model, const arma::mat& obs,
                      RngStream& rng) {
  KalmanResult fwd = kalman_filter(model, obs);
  const std::size_t periods = model.periods();
  const arma::uword m = model.init_mean.n_elem;

  arma::mat states(periods, m);
  arma::vec b = draw_mvn(fwd.filtered_mean.row(periods - 1).t(),
                         fwd.filtered_cov[periods - 1], rng);
  states.row(periods - 1) = b.t();

  for (std::size_t t = periods - 1; t-- > 0;) {
    const arma::mat& p_filt = fwd.filtered_cov[t];
    arma::vec b_filt = fwd.filtered_mean.row(t).t();
    arma::mat p_pred = p_filt + model.state_cov;
    symmetrize(p_pred);
    // Degenerate one-step-ahead covariance: the conditional collapses onto
    // the next state (the zero-innovation limit).
    if (arma::trace(arma::abs(p_pred)) < 1e-300) {
      states.row(t) = b.t();
      continue;
    }
    arma::mat gain;  // P(t|t) * P(t+1|t)^{-1}
    try {
      arma::mat pc = chol_psd(p_pred);
      gain = arma::solve(arma::trimatu(pc.t()),
                         arma::solve(arma::trimatl(pc), p_filt)).t();
    } catch (const NumericalError&) {
      gain = p_filt * arma::pinv(p_pred);
    }
    arma::vec mean = b_filt + gain * (b - b_filt);
    arma::mat cov = p_filt - gain * p_filt;
    symmetrize(cov);
    // Rounding residue of an exactly-degenerate conditional must not inject
    // noise (the zero-innovation limit has to give flat trajectories).
    double scale = p_filt.n_elem > 0 ? arma::abs(p_filt).max() : 0.0;
    if (arma::abs(cov).max() <= 1e-12 * std::max(scale, 1e-300)) {
      b = mean;
    } else {
      b = draw_mvn(mean, cov, rng);
    }
    states.row(t) = b.t();
  }
  return states;
}

// --- Companion form ---------------------------------------------------------

arma::mat companion(const arma::mat& coeffs, int n_vars, int lags) {
  const arma::uword n = static_cast<arma::uword>(n_vars);
  const arma::uword p = static_cast<arma::uword>(lags);
  if (coeffs.n_cols != n ||
      (coeffs.n_rows != n * p && coeffs.n_rows != n * p + 1)) {
    throw std::invalid_argument("companion: coefficient dimensions do not "
                                "match n_vars and lags");
  }
  arma::mat f(n * p, n * p, arma::fill::zeros);
  for (arma::uword j = 0; j < p; ++j) {
    f.submat(0, j * n, n - 1, (j + 1) * n - 1) =
        coeffs.rows(j * n, (j + 1) * n - 1).t();
  }
  if (p > 1) {
    f.submat(n, 0, n * p - 1, n * (p - 1) - 1) =
        arma::eye(n * (p - 1), n * (p - 1));
  }
  return f;
}

double spectral_radius(const arma::mat& m) {
  arma::cx_vec eigenvalues = arma::eig_gen(m);
  return arma::abs(eigenvalues).max();
}

bool is_stable(const arma::mat& companion_matrix) {
  return spectral_radius(companion_matrix) < 1.0;
}

}  // namespace wivar
