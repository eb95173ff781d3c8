#include "wivar/microdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wivar/csv.hpp"

namespace wivar {

const std::vector<std::string>& asset_category_names() {
  static const std::vector<std::string> names = {
      "financial_formal", "financial_informal", "housing_main",
      "housing_other",    "durables",           "valuables",
      "pension"};
  return names;
}

const std::vector<std::string>& liability_category_names() {
  static const std::vector<std::string> names = {
      "financial_liabilities", "mortgage_debt", "informal_debt"};
  return names;
}

namespace {

std::vector<WealthConcept> make_builtin_concepts() {
  WealthConcept financial{"net_financial",
                          {"financial_formal"},
                          {"financial_liabilities"}};
  WealthConcept housing{"net_housing",
                        {"housing_main", "housing_other"},
                        {"mortgage_debt"}};
  WealthConcept total{"net_total", {}, {}};
  total.asset_categories = financial.asset_categories;
  total.asset_categories.insert(housing.asset_categories.begin(),
                                housing.asset_categories.end());
  total.liability_categories = financial.liability_categories;
  total.liability_categories.insert(housing.liability_categories.begin(),
                                    housing.liability_categories.end());
  WealthConcept augmented{"augmented", {}, {}};
  augmented.asset_categories.insert(asset_category_names().begin(),
                                    asset_category_names().end());
  augmented.liability_categories.insert(liability_category_names().begin(),
                                        liability_category_names().end());
  return {total, financial, housing, augmented};
}

const std::vector<WealthConcept>& builtin_concepts() {
  static const std::vector<WealthConcept> concepts = make_builtin_concepts();
  return concepts;
}

}  // namespace

const WealthConcept& wealth_concept(const std::string& name) {
  for (const auto& c : builtin_concepts()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown wealth concept '" + name + "'");
}

const std::vector<std::string>& wealth_concept_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& c : builtin_concepts()) out.push_back(c.name);
    return out;
  }();
  return names;
}

double net_wealth(const HouseholdRecord& h, const WealthConcept& c) {
  const auto& asset_universe = asset_category_names();
  const auto& liability_universe = liability_category_names();
  double total = 0.0;
  for (const auto& category : c.asset_categories) {
    if (std::find(asset_universe.begin(), asset_universe.end(), category) ==
        asset_universe.end()) {
      throw ConfigError("concept '" + c.name +
                        "' references unknown asset category '" + category +
                        "'");
    }
    auto it = h.assets.find(category);
    if (it != h.assets.end()) total += it->second;
  }
  for (const auto& category : c.liability_categories) {
    if (std::find(liability_universe.begin(), liability_universe.end(),
                  category) == liability_universe.end()) {
      throw ConfigError("concept '" + c.name +
                        "' references unknown liability category '" +
                        category + "'");
    }
    auto it = h.liabilities.find(category);
    if (it != h.liabilities.end()) total -= it->second;
  }
  return total;
}

ColumnSchema ColumnSchema::standard() {
  ColumnSchema schema;
  for (const auto& name : asset_category_names()) {
    schema.asset_columns[name] = name;
  }
  for (const auto& name : liability_category_names()) {
    schema.liability_columns[name] = name;
  }
  return schema;
}

long DropReport::total() const {
  long sum = 0;
  for (const auto& [reason, count] : counts) sum += count;
  return sum;
}

void DropReport::write_csv(const std::filesystem::path& path) const {
  CsvWriter writer(path);
  writer.write_row({"reason", "count"});
  for (const auto& [reason, count] : counts) {
    writer.write_row({reason, std::to_string(count)});
  }
  writer.close();
}

namespace {

// Returns false (and records the reason) instead of throwing: a bad row
// must not abort the load.
bool parse_row_double(const std::string& text, double& out) {
  try {
    out = parse_double(text, "household row");
  } catch (const DataError&) {
    return false;
  }
  return std::isfinite(out);
}

}  // namespace

LoadResult load_households(const std::filesystem::path& path,
                           const ColumnSchema& schema) {
  CsvTable table = read_csv(path);
  LoadResult result;

  const std::size_t id_col = table.require_column(schema.id_column);
  const std::size_t year_col = table.require_column(schema.year_column);
  const std::size_t month_col = table.require_column(schema.month_column);
  const std::size_t weight_col = table.require_column(schema.weight_column);
  std::vector<std::pair<std::string, std::size_t>> asset_cols;
  for (const auto& [category, column] : schema.asset_columns) {
    asset_cols.emplace_back(category, table.require_column(column));
  }
  std::vector<std::pair<std::string, std::size_t>> liability_cols;
  for (const auto& [category, column] : schema.liability_columns) {
    liability_cols.emplace_back(category, table.require_column(column));
  }

  result.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.size() < table.columns.size()) {
      result.drops.add("short_row");
      continue;
    }
    HouseholdRecord record;
    record.household_id = row[id_col];

    long year = 0, month = 0;
    try {
      year = parse_long(row[year_col], "interview_year");
      month = parse_long(row[month_col], "interview_month");
    } catch (const DataError&) {
      result.drops.add("malformed_date");
      continue;
    }
    if (month < 1 || month > 12) {
      result.drops.add("malformed_date");
      continue;
    }
    record.interview_date = Month{static_cast<int>(year),
                                  static_cast<int>(month)};

    double weight = 0.0;
    if (!parse_row_double(row[weight_col], weight)) {
      result.drops.add("malformed_weight");
      continue;
    }
    if (weight < 0.0) {
      result.drops.add("negative_weight");
      continue;
    }
    record.weight = weight;

    bool ok = true;
    for (const auto& [category, col] : asset_cols) {
      const std::string& cell = row[col];
      if (cell.empty()) {
        result.drops.add("missing_value");
        ok = false;
        break;
      }
      double amount = 0.0;
      if (!parse_row_double(cell, amount)) {
        result.drops.add("malformed_amount");
        ok = false;
        break;
      }
      if (amount < 0.0) {
        result.drops.add("negative_amount");
        ok = false;
        break;
      }
      record.assets[category] = amount;
    }
    if (ok) {
      for (const auto& [category, col] : liability_cols) {
        const std::string& cell = row[col];
        if (cell.empty()) {
          result.drops.add("missing_value");
          ok = false;
          break;
        }
        double amount = 0.0;
        if (!parse_row_double(cell, amount)) {
          result.drops.add("malformed_amount");
          ok = false;
          break;
        }
        if (amount < 0.0) {
          result.drops.add("negative_amount");
          ok = false;
          break;
        }
        record.liabilities[category] = amount;
      }
    }
    if (!ok) continue;
    result.records.push_back(std::move(record));
  }
  return result;
}

std::vector<MonthlyCohort> assign_cohorts(
    std::span<const HouseholdRecord> records, Month start, Month end,
    std::size_t min_cohort_size) {
  if (end < start) throw ConfigError("cohort window is empty");
  const int base = start.index();
  const int count = end.index() - base + 1;
  std::vector<MonthlyCohort> cohorts(count);
  for (int i = 0; i < count; ++i) {
    cohorts[i].month = Month::from_index(base + i);
  }
  for (std::size_t r = 0; r < records.size(); ++r) {
    const int idx = records[r].interview_date.index() - base;
    if (idx < 0 || idx >= count) continue;
    cohorts[idx].members.push_back(r);
  }
  for (auto& cohort : cohorts) {
    cohort.valid = cohort.size() >= min_cohort_size;
  }
  return cohorts;
}

double weighted_quantile(const arma::vec& values, const arma::vec& weights,
                         double p) {
  if (values.n_elem != weights.n_elem || values.n_elem == 0) {
    throw std::invalid_argument("weighted_quantile: bad sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("weighted_quantile: p outside [0,1]");
  }
  arma::uvec order = arma::stable_sort_index(values);
  double total = 0.0;
  for (arma::uword i = 0; i < order.n_elem; ++i) total += weights(order(i));
  if (!(total > 0.0)) {
    throw InsufficientDataError("weighted_quantile: zero total weight");
  }
  const double target = p * total;
  double cum = 0.0;
  for (arma::uword i = 0; i < order.n_elem; ++i) {
    cum += weights(order(i));
    if (cum >= target && weights(order(i)) > 0.0) return values(order(i));
  }
  // p == 1 with trailing zero weights.
  for (arma::uword i = order.n_elem; i-- > 0;) {
    if (weights(order(i)) > 0.0) return values(order(i));
  }
  return values(order(order.n_elem - 1));
}

arma::vec top_code(const arma::vec& values, const arma::vec& weights,
                   double lower_fraction, double upper_fraction) {
  if (!(lower_fraction >= 0.0 && lower_fraction < 0.5) ||
      !(upper_fraction >= 0.0 && upper_fraction < 0.5)) {
    throw std::invalid_argument("top_code: fractions must lie in [0, 0.5)");
  }
  arma::vec out = values;
  if (lower_fraction > 0.0) {
    const double lo = weighted_quantile(values, weights, lower_fraction);
    out.transform([lo](double v) { return v < lo ? lo : v; });
  }
  if (upper_fraction > 0.0) {
    const double hi = weighted_quantile(values, weights, 1.0 - upper_fraction);
    out.transform([hi](double v) { return v > hi ? hi : v; });
  }
  return out;
}

}  // namespace wivar
