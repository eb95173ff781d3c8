#pragma once

#include <armadillo>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wivar/common.hpp"

namespace wivar {

// One surveyed household. Raw item amounts are nonnegative; net concepts
// built from them may be negative. Immutable after loading.
struct HouseholdRecord {
  std::string household_id;
  Month interview_date;
  double weight = 0.0;
  std::map<std::string, double> assets;       // category -> amount
  std::map<std::string, double> liabilities;  // category -> amount
};

// Named difference of asset and liability categories.
struct WealthConcept {
  std::string name;
  std::set<std::string> asset_categories;
  std::set<std::string> liability_categories;
};

// The category universe of the household CSV schema.
const std::vector<std::string>& asset_category_names();
const std::vector<std::string>& liability_category_names();

// Built-in concepts: net_total, net_financial, net_housing, augmented.
// net_total is the union of net_financial and net_housing; augmented adds
// informal assets/debts, durables, valuables and pension wealth.
const WealthConcept& wealth_concept(const std::string& name);  // ConfigError
const std::vector<std::string>& wealth_concept_names();

// Assets minus liabilities over the concept's categories; categories the
// record does not report contribute zero. Categories outside the schema
// universe are a configuration error.
double net_wealth(const HouseholdRecord& h, const WealthConcept& c);

struct MonthlyCohort {
  Month month;
  std::vector<std::size_t> members;  // indices into the loaded record vector
  bool valid = false;                // size >= min_cohort_size

  std::size_t size() const { return members.size(); }
};

// Maps CSV columns onto the record fields. standard() maps each schema
// category onto the column of the same name.
struct ColumnSchema {
  std::string id_column = "household_id";
  std::string year_column = "interview_year";
  std::string month_column = "interview_month";
  std::string weight_column = "weight";
  std::map<std::string, std::string> asset_columns;
  std::map<std::string, std::string> liability_columns;

  static ColumnSchema standard();
};

struct DropReport {
  std::map<std::string, long> counts;  // reason -> dropped rows

  long total() const;
  void add(const std::string& reason) { ++counts[reason]; }
  void write_csv(const std::filesystem::path& path) const;  // reason,count
};

struct LoadResult {
  std::vector<HouseholdRecord> records;
  DropReport drops;
};

// Reads the household CSV. Rows with a missing item value are dropped and
// counted; malformed dates, numbers, negative weights or negative raw item
// amounts are collected per reason and the run continues. An unreadable
// file throws DataError.
LoadResult load_households(const std::filesystem::path& path,
                           const ColumnSchema& schema);

// One cohort per month of [start, end], keyed by interview date. Records
// outside the window are ignored.
std::vector<MonthlyCohort> assign_cohorts(
    std::span<const HouseholdRecord> records, Month start, Month end,
    std::size_t min_cohort_size = 800);

// Left-continuous inverse of the weighted empirical CDF:
// Q(p) = min{ x_i : F(x_i) >= p }. Zero-weight observations are inert.
double weighted_quantile(const arma::vec& values, const arma::vec& weights,
                         double p);

// Winsorizes below the lower_fraction quantile and above the
// (1 - upper_fraction) quantile. Fractions must lie in [0, 0.5).
arma::vec top_code(const arma::vec& values, const arma::vec& weights,
                   double lower_fraction, double upper_fraction);

}  // namespace wivar
