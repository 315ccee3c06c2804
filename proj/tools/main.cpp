// Command-line front end: compute, verify, count, bench and info over model
// files and built-in generators.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delassus/algorithms.hpp"
#include "delassus/bench.hpp"
#include "delassus/generators.hpp"
#include "delassus/metering.hpp"
#include "delassus/model_io.hpp"
#include "delassus/urdf.hpp"

namespace {

using namespace delassus;

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitModelError = 2;
constexpr int kExitNumericalError = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("DELASSUS_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 7;
}

struct ModelOpts {
  std::string model_path;
  std::string gen_spec;
  std::string base = "floating";
  std::vector<std::string> constraints;
};

void add_model_opts(CLI::App* cmd, ModelOpts& mo) {
  auto* file = cmd->add_option("--model", mo.model_path,
                               "model file (.urdf/.xml or .json)");
  auto* gen = cmd->add_option(
      "--gen", mo.gen_spec,
      "generator spec: chain:N[:revolute|prismatic|spherical], stem:S:B, "
      "fig1, humanoid");
  gen->excludes(file);
  file->excludes(gen);
  cmd->add_option("--base", mo.base, "fixed or floating base (files/chain)")
      ->check(CLI::IsMember({"fixed", "floating"}));
  cmd->add_option(
      "--constrain", mo.constraints,
      "constraint spec, repeatable: LINK:weld, LINK:connect or tip:weld "
      "(LINK is an index, or a link name for URDF models)");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, sep)) out.push_back(tok);
  return out;
}

struct LoadedModel {
  KinematicTree tree;
  ConstraintSet cons;
  std::map<std::string, int> names;
};

LoadedModel load_model(const ModelOpts& mo) {
  LoadedModel lm;
  const BaseKind base =
      mo.base == "fixed" ? BaseKind::Fixed : BaseKind::Floating;
  if (!mo.gen_spec.empty()) {
    const auto parts = split(mo.gen_spec, ':');
    if (parts[0] == "chain") {
      if (parts.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "chain needs a length");
      const int n = std::stoi(parts[1]);
      JointModel j = JointModel::revolute({0, 0, 1});
      if (parts.size() > 2) {
        if (parts[2] == "prismatic")
          j = JointModel::prismatic({0, 0, 1});
        else if (parts[2] == "spherical")
          j = JointModel::spherical();
        else if (parts[2] != "revolute")
          throw Error(ErrorCode::InvalidArgument,
                      "unknown chain joint '" + parts[2] + "'");
      }
      lm.tree = gen_chain(n, j, base);
    } else if (parts[0] == "stem") {
      if (parts.size() < 3)
        throw Error(ErrorCode::InvalidArgument,
                    "stem spec is stem:STEM_LEN:BRANCHES_PER_SIDE");
      auto [t, c] = gen_stem_branches(std::stoi(parts[1]),
                                      std::stoi(parts[2]));
      lm.tree = std::move(t);
      lm.cons = std::move(c);
    } else if (parts[0] == "fig1") {
      auto [t, c] = gen_fig1();
      lm.tree = std::move(t);
      lm.cons = std::move(c);
    } else if (parts[0] == "humanoid") {
      auto [t, c] = gen_humanoid();
      lm.tree = std::move(t);
      lm.cons = std::move(c);
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown generator '" + parts[0] + "'");
    }
  } else if (!mo.model_path.empty()) {
    if (mo.model_path.size() > 5 &&
        mo.model_path.substr(mo.model_path.size() - 5) == ".json") {
      auto [t, c] = load_model_json_file(mo.model_path);
      lm.tree = std::move(t);
      lm.cons = std::move(c);
    } else {
      UrdfModel um = load_urdf_file(mo.model_path, base);
      lm.tree = std::move(um.tree);
      lm.names = std::move(um.link_index);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "need --model or --gen");
  }

  for (const auto& spec : mo.constraints) {
    const auto parts = split(spec, ':');
    if (parts.size() != 2)
      throw Error(ErrorCode::InvalidArgument,
                  "constraint spec must be LINK:KIND, got '" + spec + "'");
    int link;
    if (parts[0] == "tip") {
      link = lm.tree.n_links();
    } else if (lm.names.count(parts[0])) {
      link = lm.names.at(parts[0]);
    } else {
      try {
        link = std::stoi(parts[0]);
      } catch (...) {
        throw Error(ErrorCode::BadLinkIndex,
                    "unknown link '" + parts[0] + "'");
      }
    }
    ConstraintKind kind;
    if (parts[1] == "weld")
      kind = ConstraintKind::Weld;
    else if (parts[1] == "connect")
      kind = ConstraintKind::Connect;
    else
      throw Error(ErrorCode::InvalidArgument,
                  "constraint kind must be weld or connect");
    lm.cons = attach_constraint(std::move(lm.cons), lm.tree, link, kind);
  }
  return lm;
}

std::vector<Algo> parse_algos(const std::string& csv) {
  std::vector<Algo> out;
  for (const auto& name : split(csv, ','))
    if (!name.empty()) out.push_back(algo_from_name(name));
  if (out.empty())
    throw Error(ErrorCode::InvalidArgument, "no algorithms selected");
  return out;
}

void print_matrix(std::ostream& os, const Matrix& m) {
  char buf[64];
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      os << (c ? " " : "") << buf;
    }
    os << '\n';
  }
}

double max_abs(const Matrix& m) {
  double v = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) v = std::max(v, std::abs(m(r, c)));
  return v;
}

double rel_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      d = std::max(d, std::abs(a(r, c) - b(r, c)));
  const double scale = std::max({max_abs(a), max_abs(b), 1e-300});
  return d / scale;
}

std::vector<int> parse_range(const std::string& s) {
  // Either "lo..hi[:step]" or a comma list.
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(s.substr(0, dots));
    std::string rest = s.substr(dots + 2);
    int step = 1;
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      step = std::stoi(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const int hi = std::stoi(rest);
    if (step < 1 || hi < lo)
      throw Error(ErrorCode::InvalidArgument, "bad range '" + s + "'");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    for (const auto& tok : split(s, ','))
      if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  if (out.empty())
    throw Error(ErrorCode::InvalidArgument, "empty range '" + s + "'");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{
      "Delassus (inverse operational-space inertia) computations on "
      "kinematic trees, with five algorithms and deterministic "
      "operation-count benchmarking"};
  app.require_subcommand(1);

  // compute
  auto* compute = app.add_subcommand(
      "compute", "compute the Delassus matrix with one algorithm");
  ModelOpts cmo;
  add_model_opts(compute, cmo);
  std::string calgo = "pv-osimr";
  std::string cq = "random";
  std::uint64_t cseed = default_seed();
  std::string cout_path;
  compute->add_option("--algo", calgo,
                      "naive, ltl, pv-osim, efpa or pv-osimr");
  compute->add_option("--q", cq, "configuration: random or zero");
  compute->add_option("--seed", cseed, "seed for random configurations");
  compute->add_option("--out", cout_path, "write the matrix to a file");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run all five algorithms and compare them pairwise");
  ModelOpts vmo;
  add_model_opts(verify, vmo);
  int vruns = 10;
  double vtol = 1e-8;
  std::uint64_t vseed = default_seed();
  std::string vcorrupt;
  verify->add_option("--runs", vruns, "number of random configurations");
  verify->add_option("--tol", vtol, "max allowed pairwise relative error");
  verify->add_option("--seed", vseed, "seed");
  verify
      ->add_option("--corrupt", vcorrupt,
                   "perturb one algorithm's output (fault-injection hook "
                   "for testing the comparator)")
      ->group("");  // hidden

  // count
  auto* count = app.add_subcommand(
      "count", "deterministic scalar-operation counts per algorithm");
  ModelOpts nmo;
  add_model_opts(count, nmo);
  std::string nalgos = "naive,ltl,pv-osim,efpa,pv-osimr";
  std::string nformat = "table";
  std::uint64_t nseed = default_seed();
  count->add_option("--algos", nalgos, "comma-separated algorithm list");
  count->add_option("--format", nformat, "table or csv")
      ->check(CLI::IsMember({"table", "csv"}));
  count->add_option("--seed", nseed, "seed (counts do not depend on it)");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "scaling suites with CSV output and log-log slope fits");
  std::string bfamily = "chain-md";
  std::string bk, bn, bstem;
  int bbranches = 1;
  std::string balgos = "pv-osim,efpa,pv-osimr";
  std::string bout;
  int btail = 4;
  bench->add_option("--family", bfamily, "chain-md, chain-all or stem")
      ->check(CLI::IsMember({"chain-md", "chain-all", "stem"}));
  bench->add_option("--k", bk, "chain-md k values (range lo..hi[:step])");
  bench->add_option("--n", bn, "chain-all n values");
  bench->add_option("--stem", bstem, "stem lengths");
  bench->add_option("--branches", bbranches, "branches per side (stem)");
  bench->add_option("--algos", balgos, "comma-separated algorithm list");
  bench->add_option("--out", bout, "CSV output path (default stdout)");
  bench->add_option("--tail", btail, "points used for the slope fit");

  // info
  auto* info = app.add_subcommand("info", "model summary and index sets");
  ModelOpts imo;
  add_model_opts(info, imo);

  CLI11_PARSE(app, argc, argv);

  if (compute->parsed()) {
    const LoadedModel lm = load_model(cmo);
    const Configuration q = cq == "zero"
                                ? neutral_configuration(lm.tree)
                                : random_configuration(lm.tree, cseed);
    const Matrix lam =
        compute_delassus(lm.tree, lm.cons, q, algo_from_name(calgo));
    if (cout_path.empty()) {
      print_matrix(std::cout, lam);
    } else {
      std::ofstream out(cout_path);
      if (!out)
        throw Error(ErrorCode::InvalidArgument,
                    "cannot write '" + cout_path + "'");
      print_matrix(out, lam);
    }
    return kExitOk;
  }

  if (verify->parsed()) {
    const LoadedModel lm = load_model(vmo);
    const auto algos = all_algos();
    double worst = 0.0;
    std::string worst_pair;
    for (int run_i = 0; run_i < vruns; ++run_i) {
      const Configuration q =
          random_configuration(lm.tree, vseed + run_i);
      std::vector<Matrix> results;
      for (Algo a : algos) {
        Matrix lam = compute_delassus(lm.tree, lm.cons, q, a);
        if (!vcorrupt.empty() && a == algo_from_name(vcorrupt) &&
            lam.rows() > 0)
          lam(0, 0) += 1.0 + std::abs(lam(0, 0));
        results.push_back(std::move(lam));
      }
      for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b) {
          const double d = rel_diff(results[a], results[b]);
          if (d > worst) {
            worst = d;
            worst_pair = std::string(algo_name(algos[a])) + " vs " +
                         algo_name(algos[b]);
          }
        }
    }
    std::cout << "max pairwise relative deviation: " << worst;
    if (!worst_pair.empty()) std::cout << " (" << worst_pair << ")";
    std::cout << " over " << vruns << " configurations, tolerance " << vtol
              << "\n";
    if (worst > vtol) {
      std::cerr << "verification FAILED: " << worst_pair << " deviates by "
                << worst << "\n";
      return kExitTolerance;
    }
    std::cout << "verification OK\n";
    return kExitOk;
  }

  if (count->parsed()) {
    const LoadedModel lm = load_model(nmo);
    const Configuration q = random_configuration(lm.tree, nseed);
    const auto algos = parse_algos(nalgos);
    if (nformat == "csv") {
      std::cout << "family,param,algorithm,n_b,n,m,d,mul,add_sub,div,sqrt,"
                   "total\n";
      for (Algo a : algos)
        std::cout << count_ops(a, lm.tree, lm.cons, q).csv_row("model", "-")
                  << "\n";
    } else {
      std::cout << op_report_table_header() << "\n";
      for (Algo a : algos)
        std::cout << count_ops(a, lm.tree, lm.cons, q).table_row() << "\n";
    }
    return kExitOk;
  }

  if (bench->parsed()) {
    SuiteSpec spec;
    if (bfamily == "chain-md") {
      spec.family = SuiteSpec::Family::ChainMd;
      if (bk.empty())
        throw Error(ErrorCode::InvalidArgument, "chain-md needs --k");
      spec.params = parse_range(bk);
    } else if (bfamily == "chain-all") {
      spec.family = SuiteSpec::Family::ChainAllConstrained;
      if (bn.empty())
        throw Error(ErrorCode::InvalidArgument, "chain-all needs --n");
      spec.params = parse_range(bn);
    } else {
      spec.family = SuiteSpec::Family::StemBranches;
      if (bstem.empty())
        throw Error(ErrorCode::InvalidArgument, "stem needs --stem");
      spec.params = parse_range(bstem);
      spec.branches_per_side = bbranches;
    }
    spec.algorithms = parse_algos(balgos);
    const auto rows = run_suite(spec);
    if (bout.empty()) {
      write_csv(rows, std::cout);
    } else {
      std::ofstream out(bout);
      if (!out)
        throw Error(ErrorCode::InvalidArgument, "cannot write '" + bout + "'");
      write_csv(rows, out);
      std::cout << "wrote " << rows.size() << " rows to " << bout << "\n";
    }
    if (spec.params.size() >= 2) {
      std::cout << "log-log slope of total ops vs parameter (last "
                << std::min<std::size_t>(btail, spec.params.size())
                << " points):\n";
      for (Algo a : spec.algorithms) {
        const SlopeFit fit = suite_slope(rows, a, btail);
        std::printf("  %-9s %.3f  (r2 %.4f)\n", algo_name(a), fit.slope,
                    fit.r2);
      }
    }
    return kExitOk;
  }

  if (info->parsed()) {
    const LoadedModel lm = load_model(imo);
    validate_or_throw(lm.tree);
    const IndexSets idx = compute_index_sets(lm.tree, lm.cons);
    std::cout << "links: " << lm.tree.n_links()
              << "\ndof: " << lm.tree.n_dof()
              << "\nconstraint rows: " << lm.cons.total_rows()
              << "\ndepth: " << lm.tree.max_depth() << "\nbranching links:";
    for (int b : idx.branching) std::cout << " " << b;
    std::cout << "\n";
    for (int i = 1; i <= lm.tree.n_links(); ++i) {
      const auto& l = lm.tree.link(i);
      std::cout << i << ": " << l.name << " parent=" << l.parent
                << " joint=" << joint_kind_name(l.joint.kind)
                << " supports={";
      bool first = true;
      for (int e : idx.es[i]) {
        std::cout << (first ? "" : ",") << e;
        first = false;
      }
      std::cout << "}\n";
    }
    return kExitOk;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::SingularJsim:
      case ErrorCode::SingularD:
        return kExitNumericalError;
      default:
        return kExitModelError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelError;
  }
}
