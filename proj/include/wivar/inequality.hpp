#pragma once

#include <armadillo>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wivar/common.hpp"
#include "wivar/microdata.hpp"

namespace wivar {

enum class MeasureKind { gini, quantile_share, ratio_20_20, coeff_variation };

struct InequalityMeasure {
  MeasureKind kind = MeasureKind::gini;
  double band_lo = 0.0;   // quantile_share only, [band_lo, band_hi)
  double band_hi = 1.0;
  double topcode_lo = 0.01;  // coeff_variation only
  double topcode_hi = 0.01;

  std::string label() const;
  static InequalityMeasure parse(const std::string& text);  // ConfigError
};

// Weighted Gini: the unit-weight Gini of the weight-replicated population
// (equivalently half the weighted mean absolute difference over the mean).
// With unit weights this reduces to sum_i (2i - n - 1) x_(i) / (n^2 mu).
// Negative values are allowed; the index is then no longer bounded by 1.
double gini(const arma::vec& values, const arma::vec& weights);

// Share (in percent) of total wealth held by households between the lo and
// hi quantiles of the wealth distribution. Households straddling a band
// boundary are split in proportion to the weight fraction on each side, so
// shares over a partition of [0,1) sum to exactly 100.
double quantile_share(const arma::vec& values, const arma::vec& weights,
                      double lo, double hi);

// Top-quintile share over bottom-quintile share.
double ratio_20_20(const arma::vec& values, const arma::vec& weights);

// Weighted population standard deviation over weighted mean, after
// winsorizing the given tail fractions.
double coeff_variation(const arma::vec& values, const arma::vec& weights,
                       double topcode_lo = 0.0, double topcode_hi = 0.0);

struct Smoothing {
  enum class Kind { none, moving_average } kind = Kind::none;
  int window = 6;

  static Smoothing none() { return {}; }
  static Smoothing moving_average(int window) {
    return {Kind::moving_average, window};
  }
};

struct InequalitySeries {
  std::string measure_label;
  std::string concept_name;
  std::vector<Month> months;   // strictly increasing, one value per month
  arma::vec values;
  std::vector<unsigned char> valid;  // 0 where the cohort or index failed

  void write_csv(const std::filesystem::path& path) const;
  // month,measure,concept,value,valid
};

// Computes the measure per monthly cohort. Months whose cohort is invalid,
// or where the index is undefined on the cohort sample, are masked out
// rather than failing the whole series. Smoothing (a trailing moving
// average) is display-only; estimation inputs use the raw values.
InequalitySeries build_series(std::span<const MonthlyCohort> cohorts,
                              std::span<const HouseholdRecord> records,
                              const WealthConcept& concept,
                              const InequalityMeasure& measure,
                              Smoothing smoothing = Smoothing::none());

}  // namespace wivar
