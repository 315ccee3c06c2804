#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "delassus/metering.hpp"

namespace delassus {

/// Parameterized benchmark family. Parameter lists must be nonempty and
/// strictly increasing.
struct SuiteSpec {
  enum class Family { StemBranches, ChainMd, ChainAllConstrained };

  Family family = Family::ChainMd;
  int branches_per_side = 1;        // stem family only
  std::vector<int> params;          // stem lengths, k values, or n values
  std::vector<Algo> algorithms;
};

const char* family_name(SuiteSpec::Family f);

struct SuiteRow {
  std::string family;
  int param = 0;
  OpCountReport report;
};

/// One row per (parameter, algorithm), in spec order. Deterministic: the
/// metered counts are structural and the probe configuration is fixed.
std::vector<SuiteRow> run_suite(const SuiteSpec& spec);

/// CSV with the schema
/// family,param,algorithm,n_b,n,m,d,mul,add_sub,div,sqrt,total
void write_csv(const std::vector<SuiteRow>& rows, std::ostream& os);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

/// Ordinary least squares on (log x, log y) over the last `tail` points.
/// Throws InsufficientPoints (< 2 usable points) or NonPositiveValue.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points,
                   int tail = 4);

/// Log-log slope of total op count against the suite parameter for one
/// algorithm of a suite result.
SlopeFit suite_slope(const std::vector<SuiteRow>& rows, Algo algo,
                     int tail = 4);

}  // namespace delassus
