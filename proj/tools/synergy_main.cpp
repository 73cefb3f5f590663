#include "synergy/bounds.hpp"
#include "synergy/coupling.hpp"
#include "synergy/csv.hpp"
#include "synergy/errors.hpp"
#include "synergy/ingest.hpp"
#include "synergy/performance.hpp"
#include "synergy/pid.hpp"
#include "synergy/serialize.hpp"
#include "synergy/synthetic.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

namespace {

using namespace synergy;

bool log_enabled() {
  const char* v = std::getenv("SYNERGY_LAB_LOG");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void logln(const std::string& msg) {
  if (log_enabled()) std::cerr << "[synergy] " << msg << "\n";
}

struct SolverFlags {
  double tol = SolverConfig{}.marginal_tolerance;
  int max_iters = SolverConfig{}.max_outer_iterations;
  unsigned long long seed = 0;

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.marginal_tolerance = tol;
    cfg.max_outer_iterations = max_iters;
    cfg.seed = seed;
    return cfg;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool with_seed = true) {
  cmd->add_option("--tol", f.tol, "solver marginal-residual tolerance");
  cmd->add_option("--max-iters", f.max_iters, "solver max outer iterations");
  if (with_seed) cmd->add_option("--seed", f.seed, "solver seed");
}

struct DisFlags {
  double c_d = 1.0;
  double c_val = 0.0;
  CLI::Option* c_opt = nullptr;

  void add(CLI::App* cmd) {
    cmd->add_option("--c-d", c_d, "relaxed triangle-inequality constant");
    c_opt = cmd->add_option("--c", c_val, "disagreement constant override");
  }
  DisagreementConfig config() const {
    DisagreementConfig dcfg;
    dcfg.c_d = c_d;
    if (c_opt != nullptr && c_opt->count() > 0) dcfg.c = c_val;
    return dcfg;
  }
};

// Sparse CSVs can drop trailing all-zero rows/columns; pad the three
// matrices to mutually consistent shapes before validation.
void pad_marginals(PairwiseMarginals& m) {
  auto grow = [](Eigen::MatrixXd& a, Eigen::Index rows, Eigen::Index cols) {
    if (a.rows() >= rows && a.cols() >= cols) return;
    Eigen::MatrixXd b =
        Eigen::MatrixXd::Zero(std::max(a.rows(), rows), std::max(a.cols(), cols));
    b.topLeftCorner(a.rows(), a.cols()) = a;
    a = std::move(b);
  };
  Eigen::Index n1 = std::max(m.m1.rows(), m.m12.rows());
  Eigen::Index n2 = std::max(m.m2.rows(), m.m12.cols());
  Eigen::Index ny = std::max(m.m1.cols(), m.m2.cols());
  grow(m.m1, n1, ny);
  grow(m.m2, n2, ny);
  grow(m.m12, n1, n2);
}

PairwiseMarginals load_marginals(const std::string& m1_path, const std::string& m2_path,
                                 const std::string& m12_path) {
  PairwiseMarginals m;
  m.m1 = read_marginal_csv(m1_path, "x1", "y");
  m.m2 = read_marginal_csv(m2_path, "x2", "y");
  if (!m12_path.empty()) {
    m.m12 = read_marginal_csv(m12_path, "x1", "x2");
  } else {
    m.m12 = Eigen::MatrixXd::Zero(m.m1.rows(), m.m2.rows());
  }
  pad_marginals(m);
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PidOpts {
  std::string joint, m1, m2;
  SolverFlags flags;

  int run() const {
    SolverConfig cfg = flags.config();
    PidResult res;
    if (!joint.empty()) {
      DiscreteJoint j = read_joint_csv(joint);
      logln("joint loaded: " + std::to_string(j.dims().n1) + "x" +
            std::to_string(j.dims().n2) + "x" + std::to_string(j.dims().ny));
      res = compute_pid_full(j, cfg);
    } else {
      res = compute_rui(load_marginals(m1, m2, ""), cfg);
    }
    logln("solver residual " + std::to_string(res.residual));
    std::cout << to_json(res) << "\n";
    return 0;
  }
};

struct BoundsOpts {
  std::string joint, m1, m2, m12;
  SolverFlags flags;
  DisFlags dis;

  int run() const {
    PairwiseMarginals m = joint.empty() ? load_marginals(m1, m2, m12)
                                        : pairwise_marginals(read_joint_csv(joint));
    std::cout << to_json(bounds_summary(m, flags.config(), dis.config())) << "\n";
    return 0;
  }
};

struct PerfOpts {
  std::string joint, m1, m2, m12, pid_json, bounds_json;
  SolverFlags flags;
  DisFlags dis;

  int run() const {
    if (!pid_json.empty()) {
      nlohmann::json pj = nlohmann::json::parse(read_file(pid_json));
      nlohmann::json bj = nlohmann::json::parse(read_file(bounds_json));
      double base = pj.at("r").get<double>() + pj.at("u1").get<double>() +
                    pj.at("u2").get<double>();
      double s_lower = bj.at("s_lower").get<double>();
      double s_upper = bj.at("s_upper").get<double>();
      double h_y = bj.at("diagnostics").at("h_y").get<double>();
      int card = bj.at("diagnostics").at("y_cardinality").get<int>();
      PerformanceBounds pb =
          estimate_pm(base + std::max(0.0, s_lower), base + s_upper, h_y, card);
      std::cout << to_json(pb) << "\n";
      return 0;
    }
    SolverConfig cfg = flags.config();
    PairwiseMarginals m = joint.empty() ? load_marginals(m1, m2, m12)
                                        : pairwise_marginals(read_joint_csv(joint));
    PidResult rui = compute_rui(m, cfg);
    SynergyBounds sb = bounds_summary(m, cfg, dis.config());
    auto [i_lo, i_hi] = total_information_window(rui, sb);
    std::cout << to_json(estimate_pm(i_lo, i_hi, Eigen::VectorXd(m.p_y()))) << "\n";
    return 0;
  }
};

struct CoupleOpts {
  std::string p_path, q_path, out_matrix;

  int run() const {
    MarginalDistribution p = read_distribution_csv(p_path);
    MarginalDistribution q = read_distribution_csv(q_path);
    CouplingResult res = greedy_coupling(p, q);
    if (!out_matrix.empty()) {
      write_coupling_csv(out_matrix, res.matrix);
      logln("coupling matrix written to " + out_matrix);
    }
    std::cout << to_json(res) << "\n";
    return 0;
  }
};

struct SweepOpts {
  int n = 1000;
  int jobs = 1;
  std::string dims = "2,2,2";
  std::string out_csv, out_json;
  unsigned long long seed = 1;
  SolverFlags flags;
  DisFlags dis;

  int run() const {
    int v1 = 0, v2 = 0, v3 = 0;
    char extra = 0;
    if (std::sscanf(dims.c_str(), "%d,%d,%d%c", &v1, &v2, &v3, &extra) != 3) {
      std::cerr << "sweep: --dims must look like 2,2,2\n";
      return 1;
    }
    logln("sweep: n=" + std::to_string(n) + " jobs=" + std::to_string(jobs));
    SweepReport report =
        run_sweep(n, Dims{v1, v2, v3}, flags.config(), dis.config(), seed, jobs);
    if (!out_csv.empty()) write_sweep_csv(out_csv, report);
    std::string payload = to_json(report);
    if (!out_json.empty()) {
      std::ofstream out(out_json, std::ios::binary);
      if (!out) throw CsvError(out_json + ": cannot write");
      out << payload << "\n";
    }
    std::cout << payload << "\n";
    return 0;
  }
};

struct CanonicalOpts {
  std::string name, out;

  int run() const {
    write_joint_csv(out, canonical(name));
    std::cout << "{\"schema\":1,\"name\":\"" << name << "\",\"out\":\"" << out
              << "\"}\n";
    return 0;
  }
};

struct DiscretizeOpts {
  std::string features1, labels1, features2, labels2, pairs;
  std::string out_m1 = "m1.csv", out_m2 = "m2.csv", out_m12 = "m12.csv";
  int k = 20;
  int pca_dim = 16;
  unsigned long long seed = 0;
  double smoothing = 0.0;
  double tolerance = 0.05;

  int run() const {
    FeatureTable f1 = read_features_csv(features1);
    FeatureTable f2 = read_features_csv(features2);
    LabelTable l1 = read_labels_csv(labels1);
    LabelTable l2 = read_labels_csv(labels2);
    auto pair_rows = read_pairs_csv(pairs);

    auto index_of = [](const FeatureTable& t) {
      std::map<std::string, size_t> idx;
      for (size_t i = 0; i < t.ids.size(); ++i) idx[t.ids[i]] = i;
      return idx;
    };
    auto idx1 = index_of(f1), idx2 = index_of(f2);
    auto lookup = [](const std::map<std::string, size_t>& idx, const std::string& id,
                     const char* which) {
      auto it = idx.find(id);
      if (it == idx.end()) {
        throw CsvError(std::string(which) + ": unknown id '" + id + "'");
      }
      return it->second;
    };

    std::vector<Eigen::VectorXd> x1, x2, xm1, xm2;
    std::vector<long long> y1, y2;
    for (size_t i = 0; i < l1.ids.size(); ++i) {
      x1.push_back(f1.rows[lookup(idx1, l1.ids[i], "labels1")]);
      y1.push_back(l1.labels[i]);
    }
    for (size_t i = 0; i < l2.ids.size(); ++i) {
      x2.push_back(f2.rows[lookup(idx2, l2.ids[i], "labels2")]);
      y2.push_back(l2.labels[i]);
    }
    for (const auto& [a, b] : pair_rows) {
      xm1.push_back(f1.rows[lookup(idx1, a, "pairs")]);
      xm2.push_back(f2.rows[lookup(idx2, b, "pairs")]);
    }

    logln("fitting discretizers: k=" + std::to_string(k) +
          " pca_dim=" + std::to_string(pca_dim));
    Discretizer d1 = fit_discretizer(f1.rows, k, pca_dim, seed);
    Discretizer d2 = fit_discretizer(f2.rows, k, pca_dim, seed + 1);
    EmpiricalMarginals em =
        build_marginals(x1, y1, x2, y2, xm1, xm2, d1, d2, smoothing);
    ConsistencyGaps gaps = consistency_gaps(em.marginals);
    PairwiseMarginals rec = reconcile(em, tolerance);

    write_marginal_csv(out_m1, rec.m1, "x1", "y");
    write_marginal_csv(out_m2, rec.m2, "x2", "y");
    write_marginal_csv(out_m12, rec.m12, "x1", "x2");

    std::cout << "{\"schema\":1,\"k\":" << k << ",\"pca_dim\":" << pca_dim
              << ",\"seed\":" << seed << ",\"smoothing\":" << json_number(smoothing)
              << ",\"gaps\":{\"p_y\":" << json_number(gaps.p_y)
              << ",\"p_x1\":" << json_number(gaps.p_x1)
              << ",\"p_x2\":" << json_number(gaps.p_x2) << "}"
              << ",\"n1\":" << em.n1 << ",\"n2\":" << em.n2 << ",\"nm\":" << em.nm
              << ",\"labels\":" << em.label_values.size() << "}\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal interaction estimates from pairwise marginals"};
  app.require_subcommand(1);

  std::function<int()> action;

  auto pid_opts = std::make_shared<PidOpts>();
  auto* pid_cmd = app.add_subcommand("pid", "Decompose I({X1,X2};Y) into R/U1/U2(/S)");
  pid_cmd->add_option("--from-joint", pid_opts->joint, "full joint CSV (computes S)");
  pid_cmd->add_option("--m1", pid_opts->m1, "marginal CSV over (x1,y)");
  pid_cmd->add_option("--m2", pid_opts->m2, "marginal CSV over (x2,y)");
  add_solver_flags(pid_cmd, pid_opts->flags);
  pid_cmd->callback([&action, pid_opts] {
    if (pid_opts->joint.empty() && (pid_opts->m1.empty() || pid_opts->m2.empty())) {
      throw CLI::ValidationError("pid", "need --from-joint or both --m1 and --m2");
    }
    action = [pid_opts] { return pid_opts->run(); };
  });

  auto bounds_opts = std::make_shared<BoundsOpts>();
  auto* bounds_cmd =
      app.add_subcommand("bounds", "Synergy lower/upper bounds from marginals");
  bounds_cmd->add_option("--from-joint", bounds_opts->joint,
                         "full joint CSV (marginalized first)");
  bounds_cmd->add_option("--m1", bounds_opts->m1, "marginal CSV over (x1,y)");
  bounds_cmd->add_option("--m2", bounds_opts->m2, "marginal CSV over (x2,y)");
  bounds_cmd->add_option("--m12", bounds_opts->m12, "marginal CSV over (x1,x2)");
  add_solver_flags(bounds_cmd, bounds_opts->flags);
  bounds_opts->dis.add(bounds_cmd);
  bounds_cmd->callback([&action, bounds_opts] {
    if (bounds_opts->joint.empty() &&
        (bounds_opts->m1.empty() || bounds_opts->m2.empty() || bounds_opts->m12.empty())) {
      throw CLI::ValidationError("bounds", "need --from-joint or all of --m1/--m2/--m12");
    }
    action = [bounds_opts] { return bounds_opts->run(); };
  });

  auto perf_opts = std::make_shared<PerfOpts>();
  auto* perf_cmd = app.add_subcommand("perf", "Multimodal accuracy bounds");
  perf_cmd->add_option("--from-joint", perf_opts->joint, "full joint CSV");
  perf_cmd->add_option("--m1", perf_opts->m1, "marginal CSV over (x1,y)");
  perf_cmd->add_option("--m2", perf_opts->m2, "marginal CSV over (x2,y)");
  perf_cmd->add_option("--m12", perf_opts->m12, "marginal CSV over (x1,x2)");
  perf_cmd->add_option("--pid-json", perf_opts->pid_json,
                       "JSON emitted by the pid subcommand");
  perf_cmd->add_option("--bounds-json", perf_opts->bounds_json,
                       "JSON emitted by the bounds subcommand");
  add_solver_flags(perf_cmd, perf_opts->flags);
  perf_opts->dis.add(perf_cmd);
  perf_cmd->callback([&action, perf_opts] {
    bool have_json = !perf_opts->pid_json.empty() || !perf_opts->bounds_json.empty();
    if (have_json && (perf_opts->pid_json.empty() || perf_opts->bounds_json.empty())) {
      throw CLI::ValidationError("perf",
                                 "--pid-json and --bounds-json must be given together");
    }
    if (!have_json && perf_opts->joint.empty() &&
        (perf_opts->m1.empty() || perf_opts->m2.empty() || perf_opts->m12.empty())) {
      throw CLI::ValidationError(
          "perf", "need --pid-json/--bounds-json, --from-joint, or --m1/--m2/--m12");
    }
    action = [perf_opts] { return perf_opts->run(); };
  });

  auto couple_opts = std::make_shared<CoupleOpts>();
  auto* couple_cmd =
      app.add_subcommand("couple", "Greedy low-entropy coupling of two distributions");
  couple_cmd->add_option("--p", couple_opts->p_path, "distribution CSV (header i,p)")
      ->required();
  couple_cmd->add_option("--q", couple_opts->q_path, "distribution CSV (header i,p)")
      ->required();
  couple_cmd->add_option("--out-matrix", couple_opts->out_matrix,
                         "write the coupling as CSV");
  couple_cmd->callback(
      [&action, couple_opts] { action = [couple_opts] { return couple_opts->run(); }; });

  auto sweep_opts = std::make_shared<SweepOpts>();
  auto* sweep_cmd = app.add_subcommand("sweep", "Random-simplex sandwich sweep");
  sweep_cmd->add_option("--n", sweep_opts->n, "number of sampled joints");
  sweep_cmd->add_option("--dims", sweep_opts->dims, "support sizes n1,n2,ny");
  sweep_cmd->add_option("--seed", sweep_opts->seed, "sampling seed");
  sweep_cmd->add_option("--jobs", sweep_opts->jobs, "worker threads");
  sweep_cmd->add_option("--out-csv", sweep_opts->out_csv, "per-sample records CSV");
  sweep_cmd->add_option("--out-json", sweep_opts->out_json, "report JSON file");
  add_solver_flags(sweep_cmd, sweep_opts->flags, /*with_seed=*/false);
  sweep_opts->dis.add(sweep_cmd);
  sweep_cmd->callback(
      [&action, sweep_opts] { action = [sweep_opts] { return sweep_opts->run(); }; });

  auto canon_opts = std::make_shared<CanonicalOpts>();
  auto* canon_cmd = app.add_subcommand("canonical", "Write a canonical example joint");
  canon_cmd->add_option("--name", canon_opts->name, "one of the canonical table names")
      ->required();
  canon_cmd->add_option("--out", canon_opts->out, "output joint CSV path")->required();
  canon_cmd->callback(
      [&action, canon_opts] { action = [canon_opts] { return canon_opts->run(); }; });

  auto disc_opts = std::make_shared<DiscretizeOpts>();
  auto* disc_cmd =
      app.add_subcommand("discretize", "Features + labels + pairs -> marginal CSVs");
  disc_cmd->add_option("--features1", disc_opts->features1)->required();
  disc_cmd->add_option("--labels1", disc_opts->labels1)->required();
  disc_cmd->add_option("--features2", disc_opts->features2)->required();
  disc_cmd->add_option("--labels2", disc_opts->labels2)->required();
  disc_cmd->add_option("--pairs", disc_opts->pairs)->required();
  disc_cmd->add_option("--k", disc_opts->k, "clusters per modality");
  disc_cmd->add_option("--pca-dim", disc_opts->pca_dim, "PCA dimension before clustering");
  disc_cmd->add_option("--seed", disc_opts->seed, "clustering seed");
  disc_cmd->add_option("--smoothing", disc_opts->smoothing, "additive count smoothing");
  disc_cmd->add_option("--tolerance", disc_opts->tolerance,
                       "max TV gap between shared marginals");
  disc_cmd->add_option("--out-m1", disc_opts->out_m1);
  disc_cmd->add_option("--out-m2", disc_opts->out_m2);
  disc_cmd->add_option("--out-m12", disc_opts->out_m12);
  disc_cmd->callback(
      [&action, disc_opts] { action = [disc_opts] { return disc_opts->run(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return action ? action() : 1;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InconsistentDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << " (residual " << e.best().residual << ")\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
