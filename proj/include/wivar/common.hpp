#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wivar {

// Error taxonomy shared by library and CLI. The CLI maps these onto exit
// codes: ConfigError -> 2, DataError -> 3, NumericalError -> 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An inequality index is undefined on the given sample (zero mean, zero
// denominator share, ...).
class UndefinedIndexError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

// No candidate rotation satisfied the identifying restrictions.
class IdentificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Calendar month (year + month-of-year). Total order; index() is months
// since year zero, convenient for windows and lag arithmetic.
struct Month {
  int year = 0;
  int month = 1;  // 1..12

  constexpr int index() const { return year * 12 + (month - 1); }
  static constexpr Month from_index(int idx) {
    int y = idx / 12;
    int m = idx % 12;
    if (m < 0) {
      m += 12;
      --y;
    }
    return Month{y, m + 1};
  }
  Month next() const { return from_index(index() + 1); }

  std::string str() const;           // "YYYY-MM"
  static Month parse(const std::string& text);  // "YYYY-MM"; throws DataError

  friend constexpr auto operator<=>(const Month& a, const Month& b) {
    return a.index() <=> b.index();
  }
  friend constexpr bool operator==(const Month& a, const Month& b) {
    return a.index() == b.index();
  }
};

// Deterministic work splitter: calls fn(i) for i in [0, count). With
// threads > 1 the index range is chunked; each index owns its output slot,
// so results do not depend on scheduling.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

// splitmix64 finalizer; used to derive RNG substream ids.
std::uint64_t mix64(std::uint64_t x);

std::string format_double(double v);  // shortest round-trip-stable decimal

}  // namespace wivar
