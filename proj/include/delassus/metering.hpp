#pragma once

#include <cstdint>
#include <string>

#include "delassus/algorithms.hpp"
#include "delassus/model.hpp"
#include "delassus/scalar.hpp"

namespace delassus {

/// Scalar-operation tally for one algorithm invocation. Counts cover
/// forward kinematics through Delassus assembly; model validation, index-set
/// precomputation and the final copy into global constraint order are not
/// arithmetic and contribute nothing. Counts depend only on the topology,
/// never on q.
struct OpCountReport {
  Algo algorithm = Algo::Naive;
  OpCounts ops;
  int n_b = 0;  // links
  int n = 0;    // DoF
  int m = 0;    // constraint rows
  int d = 0;    // tree depth

  std::uint64_t total() const { return ops.total(); }

  /// family,param,algorithm,n_b,n,m,d,mul,add_sub,div,sqrt,total
  std::string csv_row(const std::string& family,
                      const std::string& param) const;
  std::string table_row() const;
  bool operator==(const OpCountReport& o) const = default;
};

std::string op_report_table_header();

/// Runs `algo` on the model with the counting scalar and returns the tally.
OpCountReport count_ops(Algo algo, const KinematicTree& tree,
                        const ConstraintSet& cons, const Configuration& q);

}  // namespace delassus
