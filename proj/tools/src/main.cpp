// Command-line front end: ellipsoid solves, column selection, recovery
// sweeps, and document clustering, all emitting the JSON reports described
// in docs/.  Exit codes: 0 success, 2 bad input, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ernmf/docclust.hpp>
#include <ernmf/er.hpp>
#include <ernmf/evalbench.hpp>
#include <ernmf/matrix.hpp>
#include <ernmf/mvee.hpp>
#include <ernmf/serialize.hpp>
#include <ernmf/types.hpp>

namespace {

// Every stochastic path starts from this seed unless --seed overrides it.
constexpr std::uint64_t kDefaultSeed = 1;

// "start:step:end", end included when it lies within step/2 of a grid point.
std::vector<double> parse_grid(const std::string& text) {
  double start = 0.0, step = 0.0, end = 0.0;
  char trail = '\0';
  int fields = std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &step, &end,
                           &trail);
  if (fields != 3)
    throw ernmf::InputError("grid must be start:step:end, got \"" + text +
                            "\"");
  if (!(step > 0.0)) throw ernmf::InputError("grid step must be positive");
  if (end < start)
    throw ernmf::InputError("grid end must not precede its start");
  std::vector<double> values;
  for (int k = 0; k < 1000000; ++k) {
    const double v = start + k * step;
    if (v > end + 0.5 * step) break;
    values.push_back(v);
  }
  return values;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ernmf::InputError("cannot open for writing: " + out_path);
  out << content;
  if (!out) throw ernmf::InputError("write failed: " + out_path);
}

struct MveeArgs {
  std::string input, out, strategy = "auto";
  double tol = 1e-7;
  double active_tol = 1e-4;
};

int run_mvee(const MveeArgs& a) {
  const Eigen::MatrixXd P = ernmf::read_dense_csv(a.input).to_dense();
  ernmf::CuttingPlaneConfig cfg;
  cfg.tol = a.tol;
  cfg.active_tol = a.active_tol;
  bool cutting = a.strategy == "cutting";
  if (a.strategy == "auto")
    cutting = P.cols() > std::max<ernmf::Index>(8 * P.rows(), 96);
  const ernmf::MveeSolution sol =
      cutting ? ernmf::solve_q_cutting_plane(P, cfg)
              : ernmf::solve_q_full(P, cfg.tol, cfg.active_tol);
  emit(ernmf::mvee_report_json(sol), a.out);
  return 0;
}

struct ErArgs {
  std::string input, out, selector = "spa";
  ernmf::Index r = 0;
  ernmf::Index rho = 0;  // 0: start at r
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-7;
  double active_tol = 1e-4;
  bool sparse = false;
  bool exact = false;
};

int run_er(const ErArgs& a) {
  const ernmf::DataMatrix M = a.sparse ? ernmf::read_sparse_coord(a.input)
                                       : ernmf::read_dense_csv(a.input);
  ernmf::CuttingPlaneConfig cfg;
  cfg.tol = a.tol;
  cfg.active_tol = a.active_tol;
  ernmf::ErResult res;
  if (a.exact) {
    res = ernmf::er_exact(M, a.r, cfg);
  } else {
    ernmf::SelectorConfig sel;
    sel.algorithm = ernmf::parse_selector(a.selector);
    sel.seed = a.seed;
    res = ernmf::er_practical(M, a.r, a.rho > 0 ? a.rho : a.r, sel, cfg);
  }
  emit(ernmf::er_report_json(res), a.out);
  return 0;
}

struct BenchArgs {
  std::string grid = "0:0.05:0.5";
  std::vector<std::string> algorithms{"spa", "xray-greedy", "er-spa",
                                      "er-xray-greedy"};
  std::string out, csv;
  ernmf::Index d = 50, m = 1000, r = 10;
  int trials = 10;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  bool timing = false;
};

int run_bench(const BenchArgs& a) {
  ernmf::SweepConfig cfg;
  cfg.algorithms = a.algorithms;
  cfg.deltas = parse_grid(a.grid);
  cfg.trials = a.trials;
  cfg.d = a.d;
  cfg.m = a.m;
  cfg.r = a.r;
  cfg.master_seed = a.seed;
  cfg.threads = a.threads;
  const ernmf::SweepReport report = ernmf::run_sweep(cfg);
  emit(ernmf::sweep_report_json(report, a.timing), a.out);
  if (!a.csv.empty()) emit(ernmf::sweep_report_csv(report), a.csv);
  return 0;
}

struct ClusterArgs {
  std::string counts, vocab, labels, out;
  std::string algorithm = "er-spa";
  ernmf::Index r = 0;
  ernmf::Index top_k = 5;
  std::uint64_t seed = kDefaultSeed;
  bool low_rank = false;
  bool table = false;
};

int run_cluster(const ClusterArgs& a) {
  const ernmf::Corpus corpus =
      ernmf::read_corpus(a.counts, a.vocab, a.labels);
  const ernmf::TfidfResult tf = ernmf::tfidf(corpus);
  for (ernmf::Index row : tf.empty_docs)
    std::cerr << "warning: document " << row + 1 << " has no usable words\n";
  ernmf::ClusterOptions opts;
  opts.algorithm = a.algorithm;
  opts.use_low_rank = a.low_rank;
  opts.seed = a.seed;
  opts.top_k = a.top_k;
  if (!corpus.vocab.empty()) opts.vocab = &corpus.vocab;
  if (!corpus.labels.empty()) opts.labels = &corpus.labels;
  const ernmf::ClusterReport report = ernmf::cluster(tf.matrix, a.r, opts);
  if (a.table) {
    std::cout << ernmf::format_topic_table(report);
    if (!a.out.empty()) emit(ernmf::cluster_report_json(report), a.out);
  } else {
    emit(ernmf::cluster_report_json(report), a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ernmf: basis-column identification for near-separable nonnegative "
      "matrix factorization.\nDense input is CSV (one matrix row per line); "
      "sparse input is a \"rows cols nnz\" header followed by 1-based "
      "\"row col value\" triplets.\nAll reported indices are 1-based."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ernmf 1.0.0");

  MveeArgs mvee;
  CLI::App* c_mvee = app.add_subcommand(
      "mvee",
      "Minimum-volume origin-centered ellipsoid around +/- the columns of a "
      "dense CSV matrix");
  c_mvee->add_option("--input", mvee.input, "point matrix, CSV, points as columns")
      ->required();
  c_mvee->add_option("--strategy", mvee.strategy,
                     "solver choice; auto switches to the working-set solver "
                     "for wide inputs")
      ->check(CLI::IsMember({"auto", "full", "cutting"}))
      ->capture_default_str();
  c_mvee->add_option("--tol", mvee.tol, "optimality tolerance")
      ->capture_default_str();
  c_mvee->add_option("--active-tol", mvee.active_tol,
                     "boundary window for active points")
      ->capture_default_str();
  c_mvee->add_option("--out", mvee.out, "report path (default: stdout)");

  ErArgs er;
  CLI::App* c_er = app.add_subcommand(
      "er", "Pick the r columns nearest the latent basis via the ellipsoid "
            "pipeline");
  c_er->add_option("--input", er.input, "data matrix path")->required();
  c_er->add_flag("--sparse", er.sparse, "input is in sparse triplet format");
  c_er->add_option("--r", er.r, "number of basis columns")->required();
  c_er->add_option("--selector", er.selector,
                   "tie-break selection over the ellipsoid candidates: spa, "
                   "xray-rand, xray-max, xray-dist, xray-greedy")
      ->capture_default_str();
  c_er->add_option("--rho", er.rho,
                   "initial reduced dimension (0: start at r, then escalate)")
      ->capture_default_str();
  c_er->add_flag("--exact", er.exact,
                 "demand exactly r active points instead of escalating");
  c_er->add_option("--seed", er.seed, "seed for randomized selectors")
      ->capture_default_str();
  c_er->add_option("--tol", er.tol, "ellipsoid optimality tolerance")
      ->capture_default_str();
  c_er->add_option("--active-tol", er.active_tol,
                   "boundary window for active points")
      ->capture_default_str();
  c_er->add_option("--out", er.out, "report path (default: stdout)");

  BenchArgs bench;
  CLI::App* c_bench = app.add_subcommand(
      "bench", "Recovery-rate sweep over synthetic noisy separable instances");
  c_bench->add_option("--d", bench.d, "rows per instance")
      ->capture_default_str();
  c_bench->add_option("--m", bench.m, "columns per instance")
      ->capture_default_str();
  c_bench->add_option("--r", bench.r, "basis columns per instance")
      ->capture_default_str();
  c_bench->add_option("--grid", bench.grid,
                      "noise grid start:step:end, end included within step/2")
      ->capture_default_str();
  c_bench->add_option("--trials", bench.trials, "instances per noise level")
      ->capture_default_str();
  c_bench->add_option("--seed", bench.seed, "master seed; fixed default")
      ->capture_default_str();
  c_bench
      ->add_option("--algorithms", bench.algorithms,
                   "comma-separated pipeline tags (spa, xray-<policy>, "
                   "er-<selector>)")
      ->delimiter(',')
      ->capture_default_str();
  c_bench
      ->add_option("--threads", bench.threads,
                   "worker threads (0: all cores); reads ERNMF_THREADS when "
                   "the flag is absent")
      ->envname("ERNMF_THREADS")
      ->capture_default_str();
  c_bench->add_flag("--timing", bench.timing,
                    "include wall-clock means in the report (not "
                    "reproducible across machines)");
  c_bench->add_option("--out", bench.out, "JSON report path (default: stdout)");
  c_bench->add_option("--csv", bench.csv,
                      "also write the noise-threshold table as CSV");

  ClusterArgs cluster;
  CLI::App* c_cluster = app.add_subcommand(
      "cluster", "Anchor-word document clustering on a bag-of-words corpus");
  c_cluster
      ->add_option("--counts", cluster.counts,
                   "counts file: \"docs words nnz\" header, then 1-based "
                   "\"doc word count\" triplets")
      ->required();
  c_cluster->add_option("--vocab", cluster.vocab, "one word per line");
  c_cluster->add_option("--labels", cluster.labels,
                        "one integer class per document; enables ac and nmi");
  c_cluster->add_option("--r", cluster.r, "number of clusters")->required();
  c_cluster
      ->add_option("--algorithm", cluster.algorithm,
                   "column-selection pipeline tag")
      ->capture_default_str();
  c_cluster->add_flag("--low-rank", cluster.low_rank,
                      "read coefficients off the rank-r approximation");
  c_cluster->add_option("--top-k", cluster.top_k, "top words listed per topic")
      ->capture_default_str();
  c_cluster->add_option("--seed", cluster.seed, "seed for randomized selectors")
      ->capture_default_str();
  c_cluster->add_flag("--table", cluster.table,
                      "print a readable topic table instead of JSON on stdout");
  c_cluster->add_option("--out", cluster.out,
                        "JSON report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (c_mvee->parsed()) return run_mvee(mvee);
    if (c_er->parsed()) return run_er(er);
    if (c_bench->parsed()) return run_bench(bench);
    return run_cluster(cluster);
  } catch (const ernmf::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ernmf::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
