// Benchmark CLI for the offloading runtime.
//
//   bench run      -- one workload cell under a link scenario and policy
//   bench biv      -- smallest input for which offloading beats local
//   bench matrix   -- full workload x scenario x policy x fan-out sweep
//   bench fixtures -- generate the virus-scan corpus fixture

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "offload/bench.hpp"

using namespace offload;

namespace {

Bytes args_for_workload(const std::string& workload, std::uint32_t n,
                        const std::string& corpus, const std::string& db) {
  if (workload == "fibonacci" || workload == "mandelbrot" || workload == "spectralnorm")
    return task::encode_u32_args({n});
  if (workload == "nqueens") return workloads::nqueens_args(n);
  if (workload == "imagecombine") return workloads::imagecombine_args(n, n, n, n);
  if (workload == "virusscan") {
    if (corpus.empty() || db.empty())
      throw InputError("virusscan needs --corpus and --db (see `bench fixtures`)");
    return workloads::virusscan_args(corpus, db);
  }
  throw InputError("unknown workload: " + workload);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write output file: " + path);
  out << content;
}

std::string render(const std::vector<bench::BenchReport>& reports,
                   const std::string& format) {
  if (format == "csv") return bench::matrix_to_csv(reports);
  if (format == "jsonl") return bench::matrix_to_jsonl(reports);
  if (format == "plot") {
    std::string out;
    for (const auto& r : reports) out += bench::to_plot_row(r) + "\n";
    return out;
  }
  throw InputError("unknown format: " + format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offloading benchmark runner"};
  app.require_subcommand(1);

  std::string workload = "fibonacci";
  std::uint32_t n = 20;
  std::string scenario = "WifiLocal";
  std::string policy = "ExecutionTimeAndEnergy";
  int servers = 1;
  int runs = 20;
  double gap_s = 30.0;
  bool wall = false;
  std::string output;
  std::string format = "csv";
  std::string history_path;
  std::string corpus, db;
  std::string coeffs_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "link scenario")
        ->check(CLI::IsMember(netem::LinkScenario::all_names()));
    cmd->add_flag("--wall", wall, "use the wall clock instead of the virtual clock");
    cmd->add_option("--output,-o", output, "output file ('-' for stdout)");
    cmd->add_option("--format", format, "csv, jsonl or plot");
    cmd->add_option("--coeffs", coeffs_path, "power coefficient file (key=value)");
  };

  auto* run = app.add_subcommand("run", "run one benchmark cell");
  run->add_option("--workload,-w", workload, "workload name")->required();
  run->add_option("--n,-n", n, "workload input size");
  run->add_option("--policy", policy, "offload policy");
  run->add_option("--servers", servers, "clone fan-out (forces remote when > 1)");
  run->add_option("--runs", runs, "repetitions to average");
  run->add_option("--gap-s", gap_s, "simulated pause between runs, seconds");
  run->add_option("--history", history_path, "write the execution history here");
  run->add_option("--corpus", corpus, "virus-scan corpus directory");
  run->add_option("--db", db, "virus-scan signature database");
  add_common(run);

  std::uint32_t lo = 1, hi = 30;
  auto* biv = app.add_subcommand("biv", "find the offload break-even input");
  biv->add_option("--workload,-w", workload, "workload name")->required();
  biv->add_option("--lo", lo, "smallest input to probe");
  biv->add_option("--hi", hi, "largest input to probe");
  biv->add_option("--corpus", corpus, "virus-scan corpus directory");
  biv->add_option("--db", db, "virus-scan signature database");
  add_common(biv);

  std::vector<std::string> m_workloads = {"fibonacci", "nqueens"};
  std::vector<std::uint32_t> m_inputs = {20, 8};
  std::vector<std::string> m_scenarios = netem::LinkScenario::all_names();
  std::vector<std::string> m_policies = {"ExecutionTime", "Energy",
                                         "ExecutionTimeAndEnergy"};
  std::vector<int> m_servers = {1, 2, 4, 8};
  auto* matrix = app.add_subcommand("matrix", "run the full evaluation sweep");
  matrix->add_option("--workloads", m_workloads, "workload names");
  matrix->add_option("--inputs", m_inputs, "one input size per workload");
  matrix->add_option("--scenarios", m_scenarios, "link scenarios");
  matrix->add_option("--policies", m_policies, "offload policies");
  matrix->add_option("--servers", m_servers, "fan-out counts");
  matrix->add_option("--runs", runs, "repetitions per cell");
  matrix->add_option("--gap-s", gap_s, "simulated pause between runs, seconds");
  matrix->add_option("--corpus", corpus, "virus-scan corpus directory");
  matrix->add_option("--db", db, "virus-scan signature database");
  add_common(matrix);

  std::string fx_root = "fixtures";
  std::uint64_t fx_files = 1000, fx_bytes = 10'000'000, fx_planted = 50,
                fx_signatures = 1000;
  std::uint32_t fx_seed = 1;
  auto* fixtures = app.add_subcommand("fixtures", "generate the virus-scan fixture");
  fixtures->add_option("--root", fx_root, "fixture output directory");
  fixtures->add_option("--files", fx_files, "number of corpus files");
  fixtures->add_option("--bytes", fx_bytes, "total corpus size in bytes");
  fixtures->add_option("--planted", fx_planted, "files carrying a planted signature");
  fixtures->add_option("--signatures", fx_signatures, "signature database size");
  fixtures->add_option("--seed", fx_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    bench::SimOptions options;
    options.deterministic = !wall;
    if (!coeffs_path.empty())
      options.coeffs =
          energy::PowerCoefficients::from_config(Config::from_file(coeffs_path));

    if (*fixtures) {
      auto fx = workloads::make_virus_fixture(fx_root, fx_files, fx_bytes, fx_planted,
                                              fx_signatures, fx_seed);
      std::cout << "corpus_dir=" << fx.corpus_dir << "\n"
                << "db_path=" << fx.db_path << "\n"
                << "files=" << fx.n_files << "\n"
                << "planted=" << fx.planted << "\n";
      return 0;
    }

    if (*biv) {
      auto found = bench::find_biv(
          workload,
          [&](std::uint32_t v) { return args_for_workload(workload, v, corpus, db); },
          netem::LinkScenario::by_name(scenario), lo, hi, options);
      if (found)
        std::cout << workload << " " << scenario << " break-even n=" << *found << "\n";
      else
        std::cout << workload << " " << scenario << " no break-even in [" << lo << ", "
                  << hi << "]\n";
      return 0;
    }

    if (*run) {
      bench::CellSpec cell;
      cell.workload = workload;
      cell.args = args_for_workload(workload, n, corpus, db);
      cell.input_label = "n=" + std::to_string(n);
      cell.scenario = netem::LinkScenario::by_name(scenario);
      cell.policy = controller::policy_from_string(policy);
      cell.servers = servers;
      cell.runs = runs;
      cell.gap_s = gap_s;
      auto report = bench::run_cell(cell, options);
      write_output(output, render({report}, format));
      if (report.status != "ok") {
        std::cerr << "cell failed: " << report.status << "\n";
        return 1;
      }
      if (!history_path.empty()) {
        // Re-run one cell with a persistent store to capture its history.
        bench::SimEnv env(cell.scenario, options);
        using Force = controller::Controller::Force;
        env.client().execute(cell.workload, cell.args,
                             cell.scenario.has_transport() ? Force::Auto : Force::Local);
        env.history().save(history_path);
      }
      return 0;
    }

    // matrix
    if (m_workloads.size() != m_inputs.size())
      throw InputError("--workloads and --inputs must have the same length");
    bench::MatrixSpec spec;
    for (std::size_t i = 0; i < m_workloads.size(); ++i)
      spec.workloads.push_back({m_workloads[i],
                                args_for_workload(m_workloads[i], m_inputs[i], corpus, db),
                                "n=" + std::to_string(m_inputs[i])});
    spec.scenarios = m_scenarios;
    for (const auto& p : m_policies)
      spec.policies.push_back(controller::policy_from_string(p));
    spec.server_counts = m_servers;
    spec.runs = runs;
    spec.gap_s = gap_s;
    auto reports = bench::run_matrix(spec, options);
    write_output(output, render(reports, format));
    for (const auto& r : reports) {
      if (r.status != "ok") {
        std::cerr << "cell failed (" << r.workload << "/" << r.scenario << "): "
                  << r.status << "\n";
        return 1;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
