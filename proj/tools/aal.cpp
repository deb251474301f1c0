// aal: run cells and sweeps, summarize results, export synthetic streams and
// solve dumped query-probability problems.
//
// Exit status: 0 success, 1 bad flags or configuration, 2 failure while running.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aal/config.hpp"
#include "aal/harness.hpp"
#include "aal/opdump.hpp"
#include "aal/svmlight.hpp"
#include "aal/synth.hpp"

namespace {

using namespace aal;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<LoadedDataset> load_all(const SweepConfig& cfg) {
  std::vector<LoadedDataset> out;
  for (const auto& d : cfg.datasets) {
    if (d.kind == "file") {
      std::ifstream probe(d.path);
      if (!probe) throw ConfigError("cannot read dataset file '" + d.path + "' for dataset." + d.name);
    }
    out.push_back(load_dataset(d));
  }
  return out;
}

template <class F>
void with_output(const std::string& path, F&& f) {
  if (path.empty() || path == "-") {
    f(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  f(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void print_cells(std::ostream& out, const std::vector<SweepCell>& cells) {
  for (const auto& c : cells)
    out << c.cell.algorithm << ' ' << (c.params_id.empty() ? "-" : c.params_id) << ' ' << c.cell.dataset << ' '
        << c.cell.permutation << '\n';
}

int cmd_run(const std::string& config, const std::string& algorithm, const std::string& params,
            const std::string& dataset, std::size_t permutation, const std::string& output, bool dry_run) {
  const auto cfg = load_config(config);
  algorithm_keys(algorithm);
  const auto ps = parse_params_id(params);
  for (const auto& [k, v] : ps)
    if (k != "lr" && !algorithm_keys(algorithm).count(k))
      throw ConfigError("unknown parameter '" + k + "' for " + algorithm);
  const DatasetSpec* spec = nullptr;
  for (const auto& d : cfg.datasets)
    if (d.name == dataset) spec = &d;
  if (!spec) throw ConfigError("no dataset named '" + dataset + "'");
  if (permutation == 0) throw ConfigError("permutation indices start at 1");
  RunCell cell{algorithm, ps, dataset, permutation, cfg.seed};
  if (dry_run) {
    print_cells(std::cout, {{cell, params_id(ps), 0}});
    return 0;
  }
  SweepConfig one = cfg;
  one.datasets = {*spec};
  const auto data = load_all(one);
  ResultSet r;
  r[{algorithm, params_id(ps), dataset, permutation}] = run_cell(cell, data.front(), {cfg.budgets, cfg.test_fraction});
  with_output(output, [&](std::ostream& o) { write_csv(o, r); });
  return 0;
}

int cmd_sweep(const std::string& config, std::string output, std::string summary, std::size_t workers,
              bool dry_run) {
  const auto cfg = load_config(config);
  const auto cells = expand_grid(cfg);
  if (dry_run) {
    print_cells(std::cout, cells);
    std::cerr << cells.size() << " cells\n";
    return 0;
  }
  if (output.empty()) output = cfg.output;
  if (summary.empty()) summary = cfg.summary;
  const auto data = load_all(cfg);
  const auto r = run_sweep(cfg, data, worker_count(workers ? workers : cfg.workers));
  with_output(output, [&](std::ostream& o) { write_csv(o, r); });
  const Baseline base{cfg.baseline, params_id(parse_params_id(cfg.baseline_params))};
  if (summary != "none") with_output(summary, [&](std::ostream& o) { o << summary_json(r, base).dump(2) << '\n'; });
  return 0;
}

int cmd_report(const std::string& input, const std::string& baseline, const std::string& baseline_params,
               bool curves, const std::string& output) {
  std::ifstream in(input);
  if (!in) throw UsageError("cannot read '" + input + "'");
  const auto r = read_csv(in);
  const Baseline base{baseline, params_id(parse_params_id(baseline_params))};
  auto j = summary_json(r, base);
  if (curves) {
    for (auto& [name, entry] : j["algorithms"].items()) {
      for (auto [label, sel] : {std::pair{"global", ParamSelection::global}, {"per_dataset", ParamSelection::per_dataset}}) {
        try {
          nlohmann::json c = nlohmann::json::array();
          const auto lo = rel_error_curve(r, name, sel, base, 0.25);
          const auto mid = rel_error_curve(r, name, sel, base, 0.5);
          const auto hi = rel_error_curve(r, name, sel, base, 0.75);
          for (std::size_t q = 0; q < mid.size(); ++q)
            c.push_back({{"budget", mid[q].budget}, {"q25", lo[q].value}, {"median", mid[q].value}, {"q75", hi[q].value}});
          entry["rel_error_" + std::string(label)] = c;
        } catch (const std::domain_error& e) {
          entry["rel_error_" + std::string(label)] = e.what();
        } catch (const std::out_of_range& e) {  // curves shorter than the reference budget
          entry["rel_error_" + std::string(label)] = e.what();
        }
      }
    }
  }
  with_output(output, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return 0;
}

int cmd_synth(const std::string& kind, std::size_t n, std::size_t dim, double margin, double omega,
              std::uint64_t seed, const std::string& output) {
  if (n == 0) throw UsageError("--n must be positive");
  if (dim == 0) throw UsageError("--dim must be positive");
  LinearStream s;
  if (kind == "realizable") {
    if (!(margin >= 0.0 && margin < 1.0)) throw UsageError("--margin must lie in [0, 1)");
    s = gen_realizable(dim, n, margin, seed);
  } else if (kind == "tsybakov") {
    if (!(omega > 0.0 && omega <= 1.0)) throw UsageError("--omega must lie in (0, 1]");
    s = gen_tsybakov(dim, n, omega, seed);
  } else if (kind == "hard") {
    throw UsageError("the hard instance has no feature representation; it runs in memory only");
  } else {
    throw UsageError("unknown --kind '" + kind + "'");
  }
  with_output(output, [&](std::ostream& o) { write_svmlight(o, s.examples); });
  return 0;
}

int cmd_solve_op(const std::string& input, const std::string& output) {
  nlohmann::json j;
  try {
    if (input == "-") {
      j = nlohmann::json::parse(std::cin);
    } else {
      std::ifstream in(input);
      if (!in) throw UsageError("cannot read '" + input + "'");
      j = nlohmann::json::parse(in);
    }
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
  OpDump d;
  try {
    d = parse_op_dump(j);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto out = solve_op_json(d);
  with_output(output, [&](std::ostream& o) { o << out.dump(2) << '\n'; });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming agnostic active learning: learners, sweeps and reports"};
  app.require_subcommand(1);

  std::string config, output, summary, algorithm, params, dataset, input, kind = "realizable";
  std::string baseline = "passive", baseline_params = "lr=0.4";
  std::size_t permutation = 1, workers = 0, n = 2000, dim = 5;
  double margin = 0.1, omega = 0.5;
  std::uint64_t seed = 1;
  bool dry_run = false, curves = false;

  auto* run = app.add_subcommand("run", "Run one cell and write its budget curve as CSV");
  run->add_option("--config,-c", config, "Config file with the dataset definitions")->required();
  run->add_option("--algorithm,-a", algorithm, "passive, iwal0, iwal1, ora_iwal0, ora_iwal1, oac or ac")->required();
  run->add_option("--params,-p", params, "Parameters as k=v;k=v");
  run->add_option("--dataset,-d", dataset, "Dataset name from the config")->required();
  run->add_option("--permutation,-j", permutation, "Permutation index, from 1");
  run->add_option("--output,-o", output, "CSV path (default stdout)");
  run->add_flag("--dry-run", dry_run, "Print the resolved cell and exit");

  auto* sweep = app.add_subcommand("sweep", "Run every cell of a config grid");
  sweep->add_option("--config,-c", config, "Config file")->required();
  sweep->add_option("--output,-o", output, "CSV path (default from the config)");
  sweep->add_option("--summary,-s", summary, "Summary JSON path, or 'none'");
  sweep->add_option("--workers,-w", workers, "Worker threads (default AAL_WORKERS or all cores)");
  sweep->add_flag("--dry-run", dry_run, "List the cells without running them");

  auto* report = app.add_subcommand("report", "Compute AUC gains from a results CSV");
  report->add_option("--input,-i", input, "Results CSV")->required();
  report->add_option("--baseline", baseline, "Baseline algorithm");
  report->add_option("--baseline-params", baseline_params, "Baseline parameters");
  report->add_flag("--curves", curves, "Add relative test-error curves");
  report->add_option("--output,-o", output, "JSON path (default stdout)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic linear stream in svmlight format");
  synth->add_option("--kind,-k", kind, "realizable or tsybakov");
  synth->add_option("--n", n, "Number of examples");
  synth->add_option("--dim", dim, "Dimension");
  synth->add_option("--margin", margin, "Minimum |margin| (realizable)");
  synth->add_option("--omega", omega, "Noise exponent in (0, 1] (tsybakov)");
  synth->add_option("--seed", seed, "Seed");
  synth->add_option("--output,-o", output, "Output path (default stdout)");

  auto* solve_op = app.add_subcommand("solve-op", "Solve a dumped query-probability problem");
  solve_op->add_option("--input,-i", input, "Instance JSON, or - for stdin")->required();
  solve_op->add_option("--output,-o", output, "JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(config, algorithm, params, dataset, permutation, output, dry_run);
    if (*sweep) return cmd_sweep(config, output, summary, workers, dry_run);
    if (*report) return cmd_report(input, baseline, baseline_params, curves, output);
    if (*synth) return cmd_synth(kind, n, dim, margin, omega, seed, output);
    if (*solve_op) return cmd_solve_op(input, output);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
