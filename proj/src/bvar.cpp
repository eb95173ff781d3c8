#include "wivar/bvar.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "wivar/csv.hpp"
#include "wivar/probkernel.hpp"

namespace wivar {

int VarSpec::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == name) return static_cast<int>(i);
  }
  throw ConfigError("variable '" + name + "' is not part of the system");
}

void VarSpec::validate(const arma::mat& data) const {
  if (lags < 1) throw ConfigError("lag order must be >= 1");
  if (variables.empty()) throw ConfigError("variable list is empty");
  if (data.n_cols != variables.size()) {
    throw ConfigError("data panel has " + std::to_string(data.n_cols) +
                      " columns but the spec names " +
                      std::to_string(variables.size()) + " variables");
  }
  if (!data.is_finite()) throw DataError("data panel contains missing values");
  if (static_cast<int>(data.n_rows) <= n() * lags + 1) {
    throw NumericalError(
        "sample too short for " + std::to_string(lags) +
        " lags; shorten the lag order or extend the sample window");
  }
}

RegressionData build_regression(const arma::mat& data, int lags,
                                bool include_constant) {
  const arma::uword t_total = data.n_rows;
  const arma::uword n = data.n_cols;
  const arma::uword p = static_cast<arma::uword>(lags);
  if (t_total <= p) throw NumericalError("sample shorter than lag order");
  const arma::uword rows = t_total - p;
  RegressionData reg;
  reg.y = data.rows(p, t_total - 1);
  reg.x.set_size(rows, n * p + (include_constant ? 1 : 0));
  for (arma::uword j = 0; j < p; ++j) {
    reg.x.cols(j * n, (j + 1) * n - 1) =
        data.rows(p - 1 - j, t_total - 2 - j);
  }
  if (include_constant) reg.x.col(n * p).ones();
  return reg;
}

OlsResult ols(const VarSpec& spec, const arma::mat& data) {
  spec.validate(data);
  RegressionData reg = build_regression(data, spec.lags,
                                        spec.include_constant);
  const arma::uword k = reg.x.n_cols;
  const arma::uword rows = reg.x.n_rows;
  OlsResult result;
  result.xtx = reg.x.t() * reg.x;
  arma::mat xty = reg.x.t() * reg.y;
  arma::mat xtx_inv;
  if (!arma::inv_sympd(xtx_inv, 0.5 * (result.xtx + result.xtx.t()))) {
    throw NumericalError(
        "X'X is singular; reduce the lag order or extend the sample");
  }
  result.coefficients = xtx_inv * xty;
  result.residuals = reg.y - reg.x * result.coefficients;
  const double dof = std::max<double>(1.0, static_cast<double>(rows) -
                                               static_cast<double>(k));
  result.residual_cov = (result.residuals.t() * result.residuals) / dof;
  result.coef_cov = arma::kron(result.residual_cov, xtx_inv);
  result.effective_obs = static_cast<long>(rows);
  return result;
}

arma::vec ar_residual_variances(const arma::mat& data, int lags) {
  const arma::uword n = data.n_cols;
  arma::vec sigma_sq(n);
  for (arma::uword j = 0; j < n; ++j) {
    RegressionData reg = build_regression(data.col(j), lags, true);
    arma::vec beta = arma::solve(reg.x, reg.y);
    arma::vec resid = reg.y - reg.x * beta;
    const double dof = std::max<double>(
        1.0, static_cast<double>(reg.y.n_rows) - static_cast<double>(lags + 1));
    sigma_sq(j) = arma::dot(resid, resid) / dof;
    if (!(sigma_sq(j) > 0.0)) sigma_sq(j) = 1e-12;
  }
  return sigma_sq;
}

MaterializedConjugatePrior materialize_conjugate_prior(
    const VarSpec& spec, const ConjugatePriorSpec& prior,
    const arma::mat& data) {
  if (!(prior.lambda1 > 0.0) || !(prior.lambda4 > 0.0)) {
    throw ConfigError("prior tightness parameters must be positive");
  }
  const int n = spec.n();
  const int k = spec.k();
  MaterializedConjugatePrior out;
  out.sigma_sq = ar_residual_variances(data, spec.lags);

  out.coef_mean.zeros(k, n);
  for (int i = 0; i < n; ++i) {
    double mean = 1.0;
    if (prior.own_lag_mean.n_elem == static_cast<arma::uword>(n)) {
      mean = prior.own_lag_mean(i);
    } else if (prior.own_lag_mean.n_elem != 0) {
      throw ConfigError("own_lag_mean must have one entry per variable");
    }
    out.coef_mean(i, i) = mean;  // own first lag
  }

  out.xi_diag.set_size(k);
  for (int lag = 1; lag <= spec.lags; ++lag) {
    const double tight = prior.lambda1 / std::pow(lag, prior.lambda3);
    for (int j = 0; j < n; ++j) {
      out.xi_diag((lag - 1) * n + j) = (tight * tight) / out.sigma_sq(j);
    }
  }
  if (spec.include_constant) {
    const double loose = prior.lambda1 * prior.lambda4;
    out.xi_diag(k - 1) = loose * loose;
  }

  out.wishart_dof = n + 2;
  out.wishart_scale = (out.wishart_dof - n - 1) * arma::diagmat(out.sigma_sq);

  if (prior.use_lambda2) {
    out.h_diag.set_size(static_cast<arma::uword>(k) * n);
    for (int eq = 0; eq < n; ++eq) {
      for (int lag = 1; lag <= spec.lags; ++lag) {
        for (int j = 0; j < n; ++j) {
          const double cross = (j == eq) ? 1.0 : prior.lambda2;
          const double tight =
              prior.lambda1 * cross / std::pow(lag, prior.lambda3);
          out.h_diag(static_cast<arma::uword>(eq) * k + (lag - 1) * n + j) =
              out.sigma_sq(eq) * tight * tight / out.sigma_sq(j);
        }
      }
      if (spec.include_constant) {
        const double loose = prior.lambda1 * prior.lambda4;
        out.h_diag(static_cast<arma::uword>(eq) * k + k - 1) =
            out.sigma_sq(eq) * loose * loose;
      }
    }
  }
  return out;
}

DummyObservations build_dummy_observations(int n_vars, int lags,
                                           bool include_constant,
                                           double lambda,
                                           const arma::vec& ar1_means,
                                           const arma::vec& sigma,
                                           const arma::vec& variable_means,
                                           bool sum_of_coefficients,
                                           double sum_tightness) {
  if (!(lambda > 0.0)) throw ConfigError("dummy prior tightness must be > 0");
  const int n = n_vars;
  const int p = lags;
  const int k = n * p + (include_constant ? 1 : 0);
  const int rows = n * p + n + (include_constant ? 1 : 0) +
                   (sum_of_coefficients ? n : 0);
  DummyObservations dummies;
  dummies.y.zeros(rows, n);
  dummies.x.zeros(rows, k);

  // Lag shrinkage block: own first lag centered on the AR(1) mean, lag
  // decay l, all scaled by sigma_j / lambda.
  for (int lag = 1; lag <= p; ++lag) {
    for (int j = 0; j < n; ++j) {
      const int row = (lag - 1) * n + j;
      if (lag == 1) dummies.y(row, j) = ar1_means(j) * sigma(j) / lambda;
      dummies.x(row, (lag - 1) * n + j) = sigma(j) * lag / lambda;
    }
  }
  // Innovation-covariance block.
  for (int j = 0; j < n; ++j) {
    dummies.y(n * p + j, j) = sigma(j);
  }
  // Diffuse intercept row.
  if (include_constant) {
    dummies.x(n * p + n, k - 1) = 1e-3;
  }
  if (sum_of_coefficients) {
    const double tau = sum_tightness * lambda;
    const int base = n * p + n + (include_constant ? 1 : 0);
    for (int j = 0; j < n; ++j) {
      dummies.y(base + j, j) = variable_means(j) / tau;
      for (int lag = 1; lag <= p; ++lag) {
        dummies.x(base + j, (lag - 1) * n + j) = variable_means(j) / tau;
      }
    }
  }
  return dummies;
}

void GibbsOptions::validate() const {
  if (iterations <= 0 || burn_in < 0 || thin <= 0) {
    throw ConfigError("gibbs options must be positive");
  }
  if (burn_in >= iterations) {
    throw ConfigError("burn-in must be smaller than total iterations");
  }
}

namespace {

struct ConjugateSampler {
  arma::mat precision_chol;  // chol of (Xi^{-1} + X'X)
  arma::mat posterior_mean;  // k x n
  arma::mat prior_mean;
  arma::vec xi_inv;
  arma::mat wishart_prior_scale;
  double wishart_prior_dof = 0.0;
};

// General-H update used by the lambda2 extension: b | Sigma is drawn from
// the full kn-dimensional normal.
struct GeneralSampler {
  arma::vec h_inv;      // kn prior precision diagonal
  arma::vec prior_mean; // kn
  arma::mat xtx;
  arma::mat xty;
  arma::mat wishart_prior_scale;
  double wishart_prior_dof = 0.0;
};

std::string describe(const ConjugatePriorSpec& p) {
  std::string s = "conjugate(lambda1=" + format_double(p.lambda1) +
                  ",lambda3=" + format_double(p.lambda3) +
                  ",lambda4=" + format_double(p.lambda4);
  if (p.use_lambda2) s += ",lambda2=" + format_double(p.lambda2);
  return s + ")";
}

std::string describe(const DummyObsPriorSpec& p, int n) {
  return "dummy(lambda=" + format_double(p.effective_lambda(n)) +
         (p.sum_of_coefficients ? ",sum_of_coefficients" : "") + ")";
}

}  // namespace

PosteriorDrawSet gibbs_sample(const VarSpec& spec, const PriorSpec& prior,
                              const arma::mat& data, RngStream& rng,
                              const GibbsOptions& options) {
  spec.validate(data);
  options.validate();
  const int n = spec.n();
  const int k = spec.k();

  RegressionData reg = build_regression(data, spec.lags,
                                        spec.include_constant);
  const long t_eff = static_cast<long>(reg.y.n_rows);

  PosteriorDrawSet out;
  out.spec = spec;
  out.iterations = options.iterations;
  out.burn_in = options.burn_in;
  out.thin = options.thin;
  out.seed = rng.seed();
  out.stream = rng.stream_id();
  const long retained = options.retained();
  out.coeff_draws.reserve(retained);
  out.sigma_draws.reserve(retained);

  OlsResult ols_fit = ols(spec, data);
  arma::mat sigma = ols_fit.residual_cov;
  arma::mat coeff = ols_fit.coefficients;

  const bool conjugate = std::holds_alternative<ConjugatePriorSpec>(prior);
  ConjugateSampler cs;
  GeneralSampler gs;
  bool general_path = false;
  arma::mat y_star = reg.y;
  arma::mat x_star = reg.x;
  double dummy_dof = 0.0;

  if (conjugate) {
    const auto& cp = std::get<ConjugatePriorSpec>(prior);
    out.prior_description = describe(cp);
    MaterializedConjugatePrior mat =
        materialize_conjugate_prior(spec, cp, data);
    cs.prior_mean = mat.coef_mean;
    cs.xi_inv = 1.0 / mat.xi_diag;
    cs.wishart_prior_scale = mat.wishart_scale;
    cs.wishart_prior_dof = mat.wishart_dof;
    general_path = cp.use_lambda2;
    if (!general_path) {
      arma::mat precision = ols_fit.xtx;
      precision.diag() += cs.xi_inv;
      cs.precision_chol = chol_psd(precision);
      arma::mat rhs = reg.x.t() * reg.y;
      rhs += arma::diagmat(cs.xi_inv) * cs.prior_mean;
      // (Xi^{-1} + X'X)^{-1} rhs via the Cholesky factor.
      cs.posterior_mean = arma::solve(
          arma::trimatu(cs.precision_chol.t()),
          arma::solve(arma::trimatl(cs.precision_chol), rhs));
    } else {
      gs.h_inv = 1.0 / mat.h_diag;
      gs.prior_mean = arma::vectorise(mat.coef_mean);
      gs.xtx = ols_fit.xtx;
      gs.xty = reg.x.t() * reg.y;
      gs.wishart_prior_scale = mat.wishart_scale;
      gs.wishart_prior_dof = mat.wishart_dof;
    }
  } else {
    const auto& dp = std::get<DummyObsPriorSpec>(prior);
    out.prior_description = describe(dp, n);
    const double lambda = dp.effective_lambda(n);
    arma::mat training = data;
    if (dp.training_periods > 0) {
      if (dp.training_periods > static_cast<int>(data.n_rows)) {
        throw ConfigError("training sample longer than the data");
      }
      training = data.rows(0, dp.training_periods - 1);
    }
    arma::vec delta(n), sigma_ar(n);
    for (int j = 0; j < n; ++j) {
      RegressionData ar = build_regression(training.col(j), 1, true);
      arma::vec beta = arma::solve(ar.x, ar.y);
      arma::vec resid = ar.y - ar.x * beta;
      delta(j) = beta(0);
      const double dof =
          std::max<double>(1.0, static_cast<double>(ar.y.n_rows) - 2.0);
      sigma_ar(j) = std::sqrt(arma::dot(resid, resid) / dof);
      if (!(sigma_ar(j) > 0.0)) sigma_ar(j) = 1e-6;
    }
    arma::vec means = arma::mean(training, 0).t();
    DummyObservations dummies = build_dummy_observations(
        n, spec.lags, spec.include_constant, lambda, delta, sigma_ar, means,
        dp.sum_of_coefficients, dp.sum_of_coefficients_tightness);
    y_star = arma::join_cols(reg.y, dummies.y);
    x_star = arma::join_cols(reg.x, dummies.x);
    dummy_dof = static_cast<double>(y_star.n_rows);

    arma::mat precision = x_star.t() * x_star;
    cs.precision_chol = chol_psd(precision);
    cs.posterior_mean = arma::solve(
        arma::trimatu(cs.precision_chol.t()),
        arma::solve(arma::trimatl(cs.precision_chol), x_star.t() * y_star));
  }

  arma::mat eye_n = arma::eye(n, n);
  for (long iter = 0; iter < options.iterations; ++iter) {
    // Coefficient block.
    if (!general_path) {
      arma::mat shocks(k, n);
      for (auto& v : shocks) v = rng.normal();
      arma::mat sigma_chol = chol_psd(sigma);
      coeff = cs.posterior_mean +
              arma::solve(arma::trimatu(cs.precision_chol.t()), shocks) *
                  sigma_chol.t();
    } else {
      arma::mat sigma_inv = arma::inv_sympd(0.5 * (sigma + sigma.t()));
      arma::mat precision = arma::kron(sigma_inv, gs.xtx);
      precision.diag() += gs.h_inv;
      arma::vec rhs = gs.h_inv % gs.prior_mean +
                      arma::vectorise(gs.xty * sigma_inv);
      arma::mat pchol = chol_psd(precision);
      arma::vec mean = arma::solve(arma::trimatu(pchol.t()),
                                   arma::solve(arma::trimatl(pchol), rhs));
      arma::vec z(mean.n_elem);
      for (auto& v : z) v = rng.normal();
      arma::vec draw = mean + arma::solve(arma::trimatu(pchol.t()), z);
      coeff = arma::reshape(draw, k, n);
    }

    // Covariance block.
    if (conjugate) {
      arma::mat resid = reg.y - reg.x * coeff;
      arma::mat dev = coeff - cs.prior_mean;
      arma::mat scale = cs.wishart_prior_scale + resid.t() * resid +
                        dev.t() * (arma::diagmat(cs.xi_inv) * dev);
      sigma = draw_inverse_wishart(scale, cs.wishart_prior_dof + t_eff + k,
                                   rng);
    } else {
      arma::mat resid = y_star - x_star * coeff;
      sigma = draw_inverse_wishart(resid.t() * resid, dummy_dof, rng);
    }

    if (iter >= options.burn_in &&
        (iter - options.burn_in) % options.thin == 0) {
      out.coeff_draws.push_back(coeff);
      out.sigma_draws.push_back(sigma);
      out.explosive.push_back(
          is_stable(companion(coeff, n, spec.lags)) ? 0 : 1);
    }
  }
  (void)eye_n;
  return out;
}

double var_loglik(const arma::mat& data, int lags, bool include_constant,
                  const arma::mat& coefficients, const arma::mat& sigma) {
  RegressionData reg = build_regression(data, lags, include_constant);
  arma::mat resid = reg.y - reg.x * coefficients;
  const double t_eff = static_cast<double>(reg.y.n_rows);
  const double n = static_cast<double>(reg.y.n_cols);
  arma::mat sigma_chol = chol_psd(sigma);
  const double log_det = 2.0 * arma::sum(arma::log(sigma_chol.diag()));
  arma::mat solved = arma::solve(arma::trimatl(sigma_chol), resid.t());
  const double quad = arma::accu(solved % solved);
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  return -0.5 * (t_eff * n * kLog2Pi + t_eff * log_det + quad);
}

// --- Draw store -------------------------------------------------------------

namespace {
constexpr char kDrawMagic[8] = {'W', 'I', 'V', 'D', 'R', 'W', '0', '1'};

void write_mat(std::ofstream& out, const arma::mat& m) {
  std::uint64_t rows = m.n_rows, cols = m.n_cols;
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.memptr()),
            static_cast<std::streamsize>(sizeof(double) * m.n_elem));
}

arma::mat read_mat(std::ifstream& in) {
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  arma::mat m(rows, cols);
  in.read(reinterpret_cast<char*>(m.memptr()),
          static_cast<std::streamsize>(sizeof(double) * m.n_elem));
  if (!in) throw DataError("draw store truncated");
  return m;
}

void write_string(std::ofstream& out, const std::string& s) {
  std::uint64_t len = s.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(s.data(), static_cast<std::streamsize>(len));
}

std::string read_string(std::ifstream& in) {
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataError("draw store truncated");
  return s;
}
}  // namespace

void PosteriorDrawSet::save(const std::filesystem::path& path) const {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write draw store '" + path.string() + "'");
  out.write(kDrawMagic, sizeof(kDrawMagic));
  std::uint64_t header[7] = {
      static_cast<std::uint64_t>(spec.variables.size()),
      static_cast<std::uint64_t>(spec.lags),
      static_cast<std::uint64_t>(spec.include_constant ? 1 : 0),
      static_cast<std::uint64_t>(size()),
      static_cast<std::uint64_t>(iterations),
      static_cast<std::uint64_t>(burn_in),
      static_cast<std::uint64_t>(thin)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
  out.write(reinterpret_cast<const char*>(&stream), sizeof(stream));
  for (const auto& v : spec.variables) write_string(out, v);
  write_string(out, prior_description);
  const bool with_impact = !impact_draws.empty();
  std::uint8_t impact_flag = with_impact ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&impact_flag), sizeof(impact_flag));
  for (std::size_t i = 0; i < size(); ++i) {
    write_mat(out, coeff_draws[i]);
    write_mat(out, sigma_draws[i]);
    std::uint8_t flag = explosive.empty() ? 0 : explosive[i];
    out.write(reinterpret_cast<const char*>(&flag), sizeof(flag));
    if (with_impact) {
      std::uint8_t has = impact_draws[i].n_elem > 0 ? 1 : 0;
      out.write(reinterpret_cast<const char*>(&has), sizeof(has));
      if (has) write_mat(out, impact_draws[i]);
    }
  }
  out.close();
  if (out.fail()) throw DataError("write failed for '" + path.string() + "'");
}

PosteriorDrawSet PosteriorDrawSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("missing draw store '" + path.string() +
                    "'; run the estimate command first");
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDrawMagic, sizeof(magic)) != 0) {
    throw DataError("'" + path.string() + "' is not a draw store");
  }
  std::uint64_t header[7];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  PosteriorDrawSet set;
  set.spec.lags = static_cast<int>(header[1]);
  set.spec.include_constant = header[2] != 0;
  set.iterations = static_cast<long>(header[4]);
  set.burn_in = static_cast<long>(header[5]);
  set.thin = static_cast<long>(header[6]);
  in.read(reinterpret_cast<char*>(&set.seed), sizeof(set.seed));
  in.read(reinterpret_cast<char*>(&set.stream), sizeof(set.stream));
  for (std::uint64_t i = 0; i < header[0]; ++i) {
    set.spec.variables.push_back(read_string(in));
  }
  set.prior_description = read_string(in);
  std::uint8_t impact_flag = 0;
  in.read(reinterpret_cast<char*>(&impact_flag), sizeof(impact_flag));
  const std::uint64_t draws = header[3];
  for (std::uint64_t i = 0; i < draws; ++i) {
    set.coeff_draws.push_back(read_mat(in));
    set.sigma_draws.push_back(read_mat(in));
    std::uint8_t flag = 0;
    in.read(reinterpret_cast<char*>(&flag), sizeof(flag));
    set.explosive.push_back(flag);
    if (impact_flag) {
      std::uint8_t has = 0;
      in.read(reinterpret_cast<char*>(&has), sizeof(has));
      set.impact_draws.push_back(has ? read_mat(in) : arma::mat());
    }
  }
  if (!in) throw DataError("draw store truncated");
  return set;
}

// --- Convergence diagnostics ------------------------------------------------

namespace {

// Split-chain Rhat and ESS on a set of equal-length sequences.
std::pair<double, double> rhat_ess(const std::vector<arma::vec>& chains) {
  std::vector<arma::vec> split;
  for (const auto& c : chains) {
    const arma::uword half = c.n_elem / 2;
    split.push_back(c.head(half));
    split.push_back(c.tail(half));
  }
  const double m = static_cast<double>(split.size());
  const double len = static_cast<double>(split.front().n_elem);
  arma::vec means(split.size()), vars(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    means(i) = arma::mean(split[i]);
    vars(i) = arma::var(split[i]);
  }
  const double within = arma::mean(vars);
  const double between = len * arma::var(means);
  double rhat = 1.0;
  double var_plus = within;
  if (within > 0.0) {
    var_plus = (len - 1.0) / len * within + between / len;
    rhat = std::sqrt(var_plus / within);
  }

  // Combined autocorrelation (variogram estimator), truncated at the first
  // lag where the paired sum turns negative.
  double ess = m * len;
  if (var_plus > 0.0) {
    double rho_sum = 0.0;
    const arma::uword max_lag = split.front().n_elem - 1;
    double prev_pair = 0.0;
    bool have_prev = false;
    for (arma::uword lag = 1; lag + 1 < max_lag; lag += 2) {
      double rho_a = 0.0, rho_b = 0.0;
      for (arma::uword which = 0; which < 2; ++which) {
        const arma::uword l = lag + which;
        double acc = 0.0;
        for (const auto& c : split) {
          for (arma::uword t = l; t < c.n_elem; ++t) {
            const double d = c(t) - c(t - l);
            acc += d * d;
          }
        }
        const double variogram =
            acc / (m * (len - static_cast<double>(l)));
        const double rho = 1.0 - variogram / (2.0 * var_plus);
        (which == 0 ? rho_a : rho_b) = rho;
      }
      double pair = rho_a + rho_b;
      if (pair < 0.0) break;
      if (have_prev && pair > prev_pair) pair = prev_pair;  // monotone
      rho_sum += pair;
      prev_pair = pair;
      have_prev = true;
    }
    ess = m * len / (1.0 + 2.0 * rho_sum);
  }
  return {rhat, ess};
}

}  // namespace

std::vector<ConvergenceRow> convergence_report(
    std::span<const PosteriorDrawSet> chains) {
  if (chains.empty()) throw ConfigError("convergence report: no chains");
  const std::size_t draws = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != draws) {
      throw ConfigError("convergence report: chains differ in length");
    }
  }
  if (chains.size() < 2 && draws < 1000) {
    throw ConfigError(
        "convergence report needs >= 2 chains or >= 1000 retained draws");
  }
  const VarSpec& spec = chains.front().spec;
  const int n = spec.n();
  const int k = static_cast<int>(chains.front().coeff_draws.front().n_rows);

  std::vector<ConvergenceRow> rows;
  auto run = [&](const std::string& name, auto&& extract) {
    std::vector<arma::vec> series;
    for (const auto& chain : chains) {
      arma::vec v(draws);
      for (std::size_t d = 0; d < draws; ++d) v(d) = extract(chain, d);
      series.push_back(std::move(v));
    }
    auto [rhat, ess] = rhat_ess(series);
    rows.push_back({name, rhat, ess, rhat > 1.1});
  };

  for (int eq = 0; eq < n; ++eq) {
    for (int row = 0; row < k; ++row) {
      std::string name;
      if (row < n * spec.lags) {
        const int lag = row / n + 1;
        const int src = row % n;
        name = "B[" + spec.variables[eq] + "~" + spec.variables[src] + ".l" +
               std::to_string(lag) + "]";
      } else {
        name = "B[" + spec.variables[eq] + "~const]";
      }
      run(name, [eq, row](const PosteriorDrawSet& c, std::size_t d) {
        return c.coeff_draws[d](row, eq);
      });
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      run("Sigma[" + spec.variables[i] + "," + spec.variables[j] + "]",
          [i, j](const PosteriorDrawSet& c, std::size_t d) {
            return c.sigma_draws[d](i, j);
          });
    }
  }
  return rows;
}

void write_convergence_csv(const std::filesystem::path& path,
                           std::span<const ConvergenceRow> rows) {
  CsvWriter writer(path);
  writer.write_row({"parameter", "rhat", "ess", "flagged"});
  for (const auto& row : rows) {
    writer.write_row({row.parameter, format_double(row.rhat),
                      format_double(row.ess), row.flagged ? "1" : "0"});
  }
  writer.close();
}

}  // namespace wivar
