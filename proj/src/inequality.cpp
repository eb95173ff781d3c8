#include "wivar/inequality.hpp"

#include <algorithm>
#include <cmath>

#include "wivar/csv.hpp"

namespace wivar {

std::string InequalityMeasure::label() const {
  switch (kind) {
    case MeasureKind::gini:
      return "gini";
    case MeasureKind::quantile_share: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "share_%g_%g", band_lo * 100.0,
                    band_hi * 100.0);
      return buf;
    }
    case MeasureKind::ratio_20_20:
      return "ratio_20_20";
    case MeasureKind::coeff_variation:
      return "coeff_variation";
  }
  return "unknown";
}

InequalityMeasure InequalityMeasure::parse(const std::string& text) {
  InequalityMeasure m;
  if (text == "gini") {
    m.kind = MeasureKind::gini;
    return m;
  }
  if (text == "ratio_20_20") {
    m.kind = MeasureKind::ratio_20_20;
    return m;
  }
  if (text == "coeff_variation") {
    m.kind = MeasureKind::coeff_variation;
    return m;
  }
  double lo = 0.0, hi = 0.0;
  if (std::sscanf(text.c_str(), "share_%lf_%lf", &lo, &hi) == 2) {
    if (!(lo >= 0.0 && hi <= 100.0 && lo < hi)) {
      throw ConfigError("quantile band out of range in '" + text + "'");
    }
    m.kind = MeasureKind::quantile_share;
    m.band_lo = lo / 100.0;
    m.band_hi = hi / 100.0;
    return m;
  }
  throw ConfigError("unknown inequality measure '" + text + "'");
}

namespace {

struct CleanSample {
  arma::vec values;   // positive-weight observations, sorted ascending
  arma::vec weights;
  double total_weight = 0.0;
  double total_wealth = 0.0;
};

CleanSample prepare(const arma::vec& values, const arma::vec& weights) {
  if (values.n_elem != weights.n_elem) {
    throw std::invalid_argument("values and weights differ in length");
  }
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
  }
  arma::uvec keep = arma::find(weights > 0.0);
  if (keep.n_elem < 2) {
    throw InsufficientDataError(
        "fewer than 2 observations with positive weight");
  }
  CleanSample s;
  arma::vec v = values(keep);
  arma::vec w = weights(keep);
  arma::uvec order = arma::stable_sort_index(v);
  s.values = v(order);
  s.weights = w(order);
  s.total_weight = arma::sum(s.weights);
  s.total_wealth = arma::dot(s.values, s.weights);
  return s;
}

}  // namespace

double gini(const arma::vec& values, const arma::vec& weights) {
  CleanSample s = prepare(values, weights);
  const double mu = s.total_wealth / s.total_weight;
  if (mu == 0.0) {
    throw UndefinedIndexError("gini undefined: weighted mean is zero");
  }
  // sum_i w_i x_i (2 c_i - w_i - W) equals the pairwise weighted absolute
  // difference sum; stable under permutations of tied values.
  double cum = 0.0;
  double acc = 0.0;
  for (arma::uword i = 0; i < s.values.n_elem; ++i) {
    cum += s.weights(i);
    acc += s.weights(i) * s.values(i) *
           (2.0 * cum - s.weights(i) - s.total_weight);
  }
  return acc / (s.total_weight * s.total_weight * mu);
}

double quantile_share(const arma::vec& values, const arma::vec& weights,
                      double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 + 1e-12 && lo < hi)) {
    throw std::invalid_argument("quantile band must satisfy 0 <= lo < hi <= 1");
  }
  CleanSample s = prepare(values, weights);
  if (s.total_wealth == 0.0) {
    throw UndefinedIndexError("quantile share undefined: total wealth is zero");
  }
  double assigned = 0.0;
  double below = 0.0;
  for (arma::uword i = 0; i < s.values.n_elem; ++i) {
    const double f_lo = below / s.total_weight;
    below += s.weights(i);
    const double f_hi = below / s.total_weight;
    const double overlap =
        std::max(0.0, std::min(hi, f_hi) - std::max(lo, f_lo));
    if (overlap > 0.0) assigned += s.values(i) * overlap * s.total_weight;
  }
  return 100.0 * assigned / s.total_wealth;
}

double ratio_20_20(const arma::vec& values, const arma::vec& weights) {
  const double bottom = quantile_share(values, weights, 0.0, 0.2);
  const double top = quantile_share(values, weights, 0.8, 1.0);
  if (bottom == 0.0) {
    throw UndefinedIndexError(
        "20:20 ratio undefined: bottom-quintile share is zero (top share " +
        format_double(top) + "%, bottom share 0%)");
  }
  return top / bottom;
}

double coeff_variation(const arma::vec& values, const arma::vec& weights,
                       double topcode_lo, double topcode_hi) {
  arma::vec coded = (topcode_lo > 0.0 || topcode_hi > 0.0)
                        ? top_code(values, weights, topcode_lo, topcode_hi)
                        : values;
  CleanSample s = prepare(coded, weights);
  const double mean = s.total_wealth / s.total_weight;
  if (mean == 0.0) {
    throw UndefinedIndexError(
        "coefficient of variation undefined: mean is zero");
  }
  double ss = 0.0;
  for (arma::uword i = 0; i < s.values.n_elem; ++i) {
    const double d = s.values(i) - mean;
    ss += s.weights(i) * d * d;
  }
  return std::sqrt(ss / s.total_weight) / mean;
}

void InequalitySeries::write_csv(const std::filesystem::path& path) const {
  CsvWriter writer(path);
  writer.write_row({"month", "measure", "concept", "value", "valid"});
  for (std::size_t i = 0; i < months.size(); ++i) {
    writer.write_row({months[i].str(), measure_label, concept_name,
                      valid[i] ? format_double(values(i)) : "",
                      valid[i] ? "1" : "0"});
  }
  writer.close();
}

InequalitySeries build_series(std::span<const MonthlyCohort> cohorts,
                              std::span<const HouseholdRecord> records,
                              const WealthConcept& concept,
                              const InequalityMeasure& measure,
                              Smoothing smoothing) {
  for (std::size_t i = 1; i < cohorts.size(); ++i) {
    if (cohorts[i].month.index() != cohorts[i - 1].month.index() + 1) {
      throw ConfigError("cohorts must span a contiguous month window");
    }
  }
  InequalitySeries series;
  series.measure_label = measure.label();
  series.concept_name = concept.name;
  series.months.reserve(cohorts.size());
  series.values.set_size(cohorts.size());
  series.valid.assign(cohorts.size(), 0);

  for (std::size_t i = 0; i < cohorts.size(); ++i) {
    const MonthlyCohort& cohort = cohorts[i];
    series.months.push_back(cohort.month);
    series.values(i) = arma::datum::nan;
    if (!cohort.valid) continue;
    arma::vec values(cohort.size());
    arma::vec weights(cohort.size());
    for (std::size_t j = 0; j < cohort.members.size(); ++j) {
      const HouseholdRecord& record = records[cohort.members[j]];
      values(j) = net_wealth(record, concept);
      weights(j) = record.weight;
    }
    try {
      switch (measure.kind) {
        case MeasureKind::gini:
          series.values(i) = gini(values, weights);
          break;
        case MeasureKind::quantile_share:
          series.values(i) =
              quantile_share(values, weights, measure.band_lo, measure.band_hi);
          break;
        case MeasureKind::ratio_20_20:
          series.values(i) = ratio_20_20(values, weights);
          break;
        case MeasureKind::coeff_variation:
          series.values(i) = coeff_variation(values, weights,
                                             measure.topcode_lo,
                                             measure.topcode_hi);
          break;
      }
      series.valid[i] = 1;
    } catch (const DataError&) {
      // masked month
    }
  }

  if (smoothing.kind == Smoothing::Kind::moving_average) {
    if (smoothing.window < 1) throw ConfigError("moving average window < 1");
    arma::vec smoothed = series.values;
    for (std::size_t i = 0; i < cohorts.size(); ++i) {
      if (!series.valid[i]) continue;
      double sum = 0.0;
      int used = 0;
      for (int back = 0; back < smoothing.window; ++back) {
        const long j = static_cast<long>(i) - back;
        if (j < 0) break;
        if (!series.valid[j]) continue;
        sum += series.values(j);
        ++used;
      }
      smoothed(i) = sum / used;
    }
    series.values = smoothed;
  }
  return series;
}

}  // namespace wivar
