#include "delassus/bench.hpp"

#include <cmath>
#include <ostream>

#include "delassus/generators.hpp"

namespace delassus {

const char* family_name(SuiteSpec::Family f) {
  switch (f) {
    case SuiteSpec::Family::StemBranches:
      return "stem";
    case SuiteSpec::Family::ChainMd:
      return "chain-md";
    default:
      return "chain-all";
  }
}

namespace {

void check_spec(const SuiteSpec& spec) {
  if (spec.params.empty())
    throw Error(ErrorCode::InvalidArgument, "suite needs parameter values");
  for (std::size_t i = 1; i < spec.params.size(); ++i)
    if (spec.params[i] <= spec.params[i - 1])
      throw Error(ErrorCode::InvalidArgument,
                  "suite parameters must be strictly increasing");
  if (spec.algorithms.empty())
    throw Error(ErrorCode::InvalidArgument, "suite needs algorithms");
  if (spec.family == SuiteSpec::Family::StemBranches &&
      spec.branches_per_side < 1)
    throw Error(ErrorCode::InvalidGeometry,
                "stem family needs at least one branch per side");
}

std::pair<KinematicTree, ConstraintSet> build(const SuiteSpec& spec,
                                              int param) {
  switch (spec.family) {
    case SuiteSpec::Family::StemBranches:
      return gen_stem_branches(param, spec.branches_per_side);
    case SuiteSpec::Family::ChainMd:
      return gen_chain_md(param);
    default:
      return gen_chain_all_constrained(param);
  }
}

}  // namespace

std::vector<SuiteRow> run_suite(const SuiteSpec& spec) {
  check_spec(spec);
  std::vector<SuiteRow> rows;
  for (int param : spec.params) {
    const auto [tree, cons] = build(spec, param);
    // Counts are structural, so any valid configuration gives the same
    // report; a fixed seed keeps the suite reproducible byte for byte.
    const Configuration q = random_configuration(tree, 42);
    for (Algo a : spec.algorithms) {
      SuiteRow row;
      row.family = family_name(spec.family);
      row.param = param;
      row.report = count_ops(a, tree, cons, q);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_csv(const std::vector<SuiteRow>& rows, std::ostream& os) {
  os << "family,param,algorithm,n_b,n,m,d,mul,add_sub,div,sqrt,total\n";
  for (const auto& r : rows)
    os << r.report.csv_row(r.family, std::to_string(r.param)) << '\n';
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points,
                   int tail) {
  if (tail < 2) throw Error(ErrorCode::InvalidArgument, "tail must be >= 2");
  if (static_cast<int>(points.size()) < 2)
    throw Error(ErrorCode::InsufficientPoints,
                "slope fit needs at least two points");
  const int n = static_cast<int>(points.size());
  const int first = std::max(0, n - tail);
  const int used = n - first;
  if (used < 2)
    throw Error(ErrorCode::InsufficientPoints, "tail leaves fewer than two");

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = first; i < n; ++i) {
    const auto [x, y] = points[i];
    if (!(x > 0.0) || !(y > 0.0))
      throw Error(ErrorCode::NonPositiveValue,
                  "log-log fit needs positive coordinates");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double k = used;
  const double den = k * sxx - sx * sx;
  if (den == 0.0)
    throw Error(ErrorCode::InsufficientPoints, "degenerate abscissae");
  SlopeFit fit;
  fit.slope = (k * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / k;
  fit.points_used = used;
  const double sst = syy - sy * sy / k;
  if (sst <= 0.0) {
    fit.r2 = 1.0;
  } else {
    double sse = 0.0;
    for (int i = first; i < n; ++i) {
      const double lx = std::log(points[i].first);
      const double ly = std::log(points[i].second);
      const double e = ly - (fit.intercept + fit.slope * lx);
      sse += e * e;
    }
    fit.r2 = std::max(0.0, std::min(1.0, 1.0 - sse / sst));
  }
  return fit;
}

SlopeFit suite_slope(const std::vector<SuiteRow>& rows, Algo algo, int tail) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.report.algorithm == algo)
      pts.emplace_back(static_cast<double>(r.param),
                       static_cast<double>(r.report.total()));
  return fit_slope(pts, tail);
}

}  // namespace delassus
