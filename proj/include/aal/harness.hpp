#pragma once

// Experiment runner: permute, split 80/20, stream the training part through one
// learner, and record the held-out error each time the query count first
// reaches a budget.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aal/ac.hpp"
#include "aal/backends.hpp"
#include "aal/config.hpp"
#include "aal/enumerated.hpp"
#include "aal/iwal.hpp"
#include "aal/learner.hpp"
#include "aal/linear.hpp"
#include "aal/metrics.hpp"
#include "aal/oac.hpp"
#include "aal/passive.hpp"
#include "aal/random.hpp"
#include "aal/svmlight.hpp"
#include "aal/synth.hpp"

namespace aal {

struct LinearData {
  std::vector<StreamExample<SparseVector>> examples;
};

struct HardData {
  ClassHandle<HardPoint> cls;
  std::vector<StreamExample<HardPoint>> examples;
};

struct LoadedDataset {
  DatasetSpec spec;
  std::variant<LinearData, HardData> data;

  std::size_t size() const {
    return std::visit([](const auto& d) { return d.examples.size(); }, data);
  }
};

inline LoadedDataset load_dataset(const DatasetSpec& spec) {
  LoadedDataset out{spec, LinearData{}};
  if (spec.kind == "file") {
    out.data = LinearData{read_svmlight(spec.path).examples};
  } else if (spec.kind == "realizable") {
    out.data = LinearData{gen_realizable(spec.dim, spec.n, spec.margin, spec.seed).examples};
  } else if (spec.kind == "tsybakov") {
    out.data = LinearData{gen_tsybakov(spec.dim, spec.n, spec.omega, spec.seed).examples};
  } else if (spec.kind == "hard") {
    HardInstanceSpec h;
    h.epsilon = spec.epsilon;
    h.class_size = spec.classes;
    h.seed = spec.seed;
    h.h_star = spec.h_star >= 0 ? static_cast<std::size_t>(spec.h_star)
                                : static_cast<std::size_t>(splitmix64(spec.seed) % spec.classes);
    auto s = gen_hard(h, spec.n);
    out.data = HardData{s.hypothesis_class, std::move(s.examples)};
  } else {
    throw ConfigError("unknown dataset kind '" + spec.kind + "'");
  }
  return out;
}

struct RunCell {
  std::string algorithm;
  ParamSet params;
  std::string dataset;
  std::size_t permutation = 1;  ///< 1-based
  std::uint64_t seed = 1;
};

struct RunOptions {
  std::vector<std::size_t> budgets{10, 20, 40, 80, 160, 320, 640, 1280, 2560, 5120, 10240};
  double test_fraction = 0.2;
};

namespace detail {

inline double param(const ParamSet& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

inline void check_params(const std::string& algorithm, const ParamSet& p) {
  const auto& allowed = algorithm_keys(algorithm);
  for (const auto& [k, v] : p)
    if (k != "lr" && !allowed.count(k)) throw ConfigError("unknown parameter '" + k + "' for " + algorithm);
}

/// Parameters that change the run on this dataset (the learning rate is inert
/// for enumerated classes).
inline ParamSet effective_params(const ParamSet& p, bool enumerated) {
  ParamSet e = p;
  if (enumerated) e.erase("lr");
  return e;
}

template <class Oracle>
std::unique_ptr<StreamingLearner<typename Oracle::point_type>> make_online(const std::string& a, const ParamSet& p,
                                                                          Oracle oracle) {
  using X = typename Oracle::point_type;
  const double c0 = param(p, "c0", 0.1);
  if (a == "passive") return std::make_unique<Passive<Oracle>>(std::move(oracle));
  if (a == "iwal0") return std::make_unique<Iwal<Oracle>>(std::move(oracle), IwalVariant::zero, c0);
  if (a == "iwal1") return std::make_unique<Iwal<Oracle>>(std::move(oracle), IwalVariant::one, c0);
  if (a == "ora_iwal0") return std::make_unique<Iwal<Oracle>>(std::move(oracle), IwalVariant::zero, c0, true);
  if (a == "ora_iwal1") return std::make_unique<Iwal<Oracle>>(std::move(oracle), IwalVariant::one, c0, true);
  if (a == "oac") {
    OacParams op;
    op.c0 = c0;
    const double l = param(p, "l", 12);
    if (!(l >= 1.0) || l != std::floor(l)) throw ConfigError("parameter l must be a positive integer");
    op.cover_size = static_cast<std::size_t>(l);
    op.alpha = param(p, "alpha", 1.0);
    op.beta_scale = param(p, "beta_scale", std::sqrt(10.0));
    return std::unique_ptr<StreamingLearner<X>>(new OnlineActiveCover<Oracle>(oracle, op));
  }
  throw ConfigError("unknown algorithm '" + a + "'");
}

inline AcParams ac_params(const ParamSet& p, std::size_t horizon) {
  AcParams ap;
  ap.horizon = horizon;
  ap.delta = param(p, "delta", 0.05);
  ap.alpha = param(p, "alpha", 1.0);
  ap.eta = param(p, "eta", 864.0);
  const double norm = param(p, "pmin_normalizer", 0.0);
  if (norm > 0.0) ap.pmin_normalizer = norm;
  ap.max_unlabeled = static_cast<std::size_t>(param(p, "max_unlabeled", 4096));
  return ap;
}

/// Unlabeled points for the epoch solve: the next u training points (lookahead)
/// or u draws with replacement from the training part (side stream).
template <class X>
std::function<std::vector<X>(std::size_t, std::size_t)> unlabeled_source(
    std::shared_ptr<const std::vector<X>> train, bool lookahead, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [train, lookahead, rng](std::size_t next, std::size_t u) {
    std::vector<X> out;
    if (lookahead) {
      for (std::size_t i = next; i < train->size() && out.size() < u; ++i) out.push_back((*train)[i]);
    } else if (!train->empty()) {
      for (std::size_t i = 0; i < u; ++i) out.push_back((*train)[uniform_index(*rng, train->size())]);
    }
    return out;
  };
}

template <class X>
double test_error(const StreamingLearner<X>& l, std::span<const StreamExample<X>> test) {
  if (test.empty()) return 0.0;
  std::size_t wrong = 0;
  for (const auto& ex : test) wrong += l.predict(ex.features()) != LabelChannel::reveal(ex);
  return static_cast<double>(wrong) / static_cast<double>(test.size());
}

template <class X>
BudgetCurve stream_curve(StreamingLearner<X>& learner, std::span<const StreamExample<X>> train,
                         std::span<const StreamExample<X>> test, const std::vector<std::size_t>& budgets, Rng& rng) {
  BudgetCurve curve;
  std::size_t next = 0;
  for (const auto& ex : train) {
    if (next == budgets.size()) break;
    step(learner, ex, rng);
    if (learner.queries_made() >= budgets[next]) {
      const double e = test_error(learner, test);
      while (next < budgets.size() && learner.queries_made() >= budgets[next])
        curve.push_back({budgets[next++], learner.queries_made(), e});
    }
  }
  if (next < budgets.size()) {
    const double e = test_error(learner, test);
    while (next < budgets.size()) curve.push_back({budgets[next++], learner.queries_made(), e});
  }
  return curve;
}

}  // namespace detail

inline std::uint64_t cell_seed(const RunCell& c, const std::string& effective_id) {
  return hash_combine(c.seed, {hash_string(c.algorithm), hash_string(effective_id), hash_string(c.dataset),
                               static_cast<std::uint64_t>(c.permutation)});
}

inline std::vector<std::size_t> permutation_order(std::uint64_t seed, const std::string& dataset, std::size_t j,
                                                  std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(hash_combine(seed, {hash_string(dataset), static_cast<std::uint64_t>(j), 0x7065726dULL}));
  shuffle(idx, rng);
  return idx;
}

inline BudgetCurve run_cell(const RunCell& cell, const LoadedDataset& ds, const RunOptions& opt) {
  detail::check_params(cell.algorithm, cell.params);
  const std::size_t n = ds.size();
  if (n < 10) throw std::runtime_error("dataset " + ds.spec.name + " has fewer than 10 examples");
  if (opt.budgets.empty()) throw std::invalid_argument("no budgets");
  for (std::size_t i = 1; i < opt.budgets.size(); ++i)
    if (opt.budgets[i] <= opt.budgets[i - 1]) throw std::invalid_argument("budgets must be strictly increasing");
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * opt.test_fraction + 1e-9));
  const std::size_t n_train = n - n_test;
  if (n_test == 0 || n_train == 0) throw std::runtime_error("split leaves an empty side");

  const auto order = permutation_order(cell.seed, ds.spec.name, cell.permutation, n);
  const bool enumerated = ds.spec.enumerated();
  const auto eff = detail::effective_params(cell.params, enumerated);
  Rng rng(cell_seed(cell, params_id(eff)));

  return std::visit(
      [&](const auto& data) -> BudgetCurve {
        using D = std::decay_t<decltype(data)>;
        using X = std::decay_t<decltype(data.examples.front().features())>;
        std::vector<StreamExample<X>> train, test;
        train.reserve(n_train);
        test.reserve(n_test);
        for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).push_back(data.examples[order[i]]);

        std::unique_ptr<StreamingLearner<X>> learner;
        if (cell.algorithm == "ac") {
          auto feats = std::make_shared<std::vector<X>>();
          feats->reserve(train.size());
          for (const auto& ex : train) feats->push_back(ex.features());
          const bool lookahead = detail::param(cell.params, "lookahead", 1.0) != 0.0;
          auto src = detail::unlabeled_source<X>(feats, lookahead, hash_combine(rng(), 0x756eULL));
          auto ap = detail::ac_params(cell.params, n_train);
          if constexpr (std::is_same_v<D, HardData>) {
            learner = std::make_unique<ActiveCover<EnumeratedBatch<X>>>(EnumeratedBatch<X>(data.cls), ap, src);
          } else {
            const double lr = detail::param(cell.params, "lr", 0.4);
            const double log_h = detail::param(cell.params, "log_class_size", 10.0);
            learner = std::make_unique<ActiveCover<LinearBatch>>(LinearBatch(lr, log_h), ap, src);
          }
        } else if constexpr (std::is_same_v<D, HardData>) {
          learner = detail::make_online(cell.algorithm, cell.params, EnumeratedLearner<X>(data.cls));
        } else {
          learner = detail::make_online(cell.algorithm, cell.params, LinearLearner(detail::param(cell.params, "lr", 0.4)));
        }
        return detail::stream_curve<X>(*learner, train, test, opt.budgets, rng);
      },
      ds.data);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepCell {
  RunCell cell;
  std::string params_id;
  std::size_t dataset_index = 0;
};

/// Cartesian product of every algorithm grid with the learning-rate grid, the
/// datasets and the permutations, in a fixed order.
inline std::vector<SweepCell> expand_grid(const SweepConfig& cfg) {
  std::vector<SweepCell> cells;
  for (const auto& g : cfg.algorithms) {
    std::vector<std::pair<std::string, std::vector<double>>> axes(g.values.begin(), g.values.end());
    if (!g.values.count("lr")) axes.emplace_back("lr", cfg.learning_rates);
    std::sort(axes.begin(), axes.end());
    std::vector<ParamSet> settings{ParamSet{}};
    for (const auto& [k, vals] : axes) {
      std::vector<ParamSet> next;
      for (const auto& s : settings)
        for (double v : vals) {
          auto t = s;
          t[k] = v;
          next.push_back(std::move(t));
        }
      settings = std::move(next);
    }
    for (const auto& s : settings)
      for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
        for (std::size_t j = 1; j <= cfg.permutations; ++j)
          cells.push_back({{g.id, s, cfg.datasets[d].name, j, cfg.seed}, params_id(s), d});
  }
  return cells;
}

struct CurveRow {
  CellKey key;
  std::size_t q = 0;
  CurvePoint point;
};

inline std::size_t worker_count(std::size_t configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("AAL_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs every cell (identical runs once), returning all curves.
inline ResultSet run_sweep(const SweepConfig& cfg, const std::vector<LoadedDataset>& data, std::size_t workers) {
  const auto cells = expand_grid(cfg);
  RunOptions opt{cfg.budgets, cfg.test_fraction};

  std::map<std::tuple<std::string, std::string, std::size_t, std::size_t>, std::size_t> job_of;
  std::vector<const SweepCell*> jobs;
  std::vector<std::size_t> cell_job(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto eff = params_id(detail::effective_params(c.cell.params, data[c.dataset_index].spec.enumerated()));
    auto key = std::make_tuple(c.cell.algorithm, eff, c.dataset_index, c.cell.permutation);
    auto [it, fresh] = job_of.emplace(key, jobs.size());
    if (fresh) jobs.push_back(&c);
    cell_job[i] = it->second;
  }

  std::vector<BudgetCurve> curves(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      try {
        curves[j] = run_cell(jobs[j]->cell, data[jobs[j]->dataset_index], opt);
      } catch (const ConfigError&) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      } catch (const std::exception& e) {
        const auto& c = jobs[j]->cell;
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(std::runtime_error(c.algorithm + " " + jobs[j]->params_id + " on " +
                                                               c.dataset + " #" + std::to_string(c.permutation) +
                                                               ": " + e.what()));
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ResultSet out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    out[{c.cell.algorithm, c.params_id, c.cell.dataset, c.cell.permutation}] = curves[cell_job[i]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV and JSON

inline constexpr const char* csv_header = "algorithm,params_id,dataset,permutation,q,budget,queries,test_error";

/// One row per (cell, budget), in key order.
inline void write_csv(std::ostream& out, const ResultSet& r) {
  out << csv_header << '\n';
  for (const auto& [k, curve] : r)
    for (std::size_t q = 0; q < curve.size(); ++q)
      out << k.algorithm << ',' << k.params << ',' << k.dataset << ',' << k.permutation << ',' << (q + 1) << ','
          << curve[q].budget << ',' << curve[q].queries << ',' << format_double(curve[q].error) << '\n';
}

inline ResultSet read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header) throw std::runtime_error("unexpected results header: " + line);
  std::map<CellKey, std::map<std::size_t, CurvePoint>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 8) throw std::runtime_error("line " + std::to_string(line_no) + ": expected 8 fields");
    try {
      CellKey k{f[0], f[1], f[2], std::stoul(f[3])};
      const std::size_t q = std::stoul(f[4]);
      rows[k][q] = {std::stoul(f[5]), std::stoul(f[6]), std::stod(f[7])};
    } catch (const std::logic_error&) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": bad number");
    }
  }
  ResultSet r;
  for (auto& [k, m] : rows) {
    BudgetCurve c;
    std::size_t expect = 1;
    for (auto& [q, p] : m) {
      if (q != expect++) throw std::runtime_error("missing budget index for " + k.algorithm + " " + k.dataset);
      c.push_back(p);
    }
    r[k] = std::move(c);
  }
  return r;
}

inline nlohmann::json summary_json(const ResultSet& r, const Baseline& base) {
  nlohmann::json j;
  j["baseline"] = {{"algorithm", base.algorithm}, {"params", base.params}};
  std::set<std::string> algorithms;
  std::set<std::string> datasets;
  for (const auto& [k, c] : r) {
    algorithms.insert(k.algorithm);
    datasets.insert(k.dataset);
  }
  j["datasets"] = datasets;
  nlohmann::json algs = nlohmann::json::object();
  for (const auto& a : algorithms) {
    const auto best = best_params(r, a, base);
    algs[a] = {{"auc_gain", best.second}, {"auc_gain_star", auc_gain_star(r, a, base)}, {"best_params", best.first}};
  }
  j["algorithms"] = algs;
  return j;
}

}  // namespace aal
