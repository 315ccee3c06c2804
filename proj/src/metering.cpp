#include "delassus/metering.hpp"

#include <sstream>

#include "delassus/detail/sweeps.hpp"

namespace delassus {

std::string OpCountReport::csv_row(const std::string& family,
                                   const std::string& param) const {
  std::ostringstream os;
  os << family << ',' << param << ',' << algo_name(algorithm) << ',' << n_b
     << ',' << n << ',' << m << ',' << d << ',' << ops.mul << ','
     << ops.add_sub << ',' << ops.div << ',' << ops.sqrt_ops << ','
     << total();
  return os.str();
}

std::string OpCountReport::table_row() const {
  std::ostringstream os;
  os << algo_name(algorithm);
  for (std::size_t i = std::string(algo_name(algorithm)).size(); i < 10; ++i)
    os << ' ';
  os << ' ' << ops.mul << '\t' << ops.add_sub << '\t' << ops.div << '\t'
     << ops.sqrt_ops << '\t' << total();
  return os.str();
}

std::string op_report_table_header() {
  return "algorithm  mul\tadd_sub\tdiv\tsqrt\ttotal";
}

OpCountReport count_ops(Algo algo, const KinematicTree& tree,
                        const ConstraintSet& cons, const Configuration& q) {
  validate_or_throw(tree);
  check_configuration(tree, q);
  const IndexSets idx = compute_index_sets(tree, cons);
  const auto arrays = detail::build_model_arrays<Metered>(tree, cons, idx);

  OpCountReport rep;
  rep.algorithm = algo;
  rep.n_b = tree.n_links();
  rep.n = tree.n_dof();
  rep.m = cons.total_rows();
  rep.d = tree.max_depth();

  MeterScope scope(rep.ops);
  switch (algo) {
    case Algo::Naive:
      detail::naive_delassus_t(arrays, q.q.data());
      break;
    case Algo::Ltl:
      detail::ltl_delassus_t(arrays, q.q.data());
      break;
    case Algo::PvOsim:
      detail::pv_osim_t(arrays, q.q.data());
      break;
    case Algo::Efpa:
      detail::efpa_t(arrays, q.q.data());
      break;
    default:
      detail::pv_osimr_t(arrays, q.q.data());
      break;
  }
  return rep;
}

}  // namespace delassus
