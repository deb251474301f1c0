#pragma once

// Sweep configuration: a flat key = value file with [section] headers and
// comma-separated value lists, read through CLI11's TOML-style config reader.
//
//   seed, permutations, budgets, test_fraction, workers, output, summary,
//   algorithms, baseline, baseline_params        top level
//   [grid] lr                                     learning rates (linear datasets)
//   [oac] c0 l alpha beta_scale                   per-algorithm grids
//   [iwal0] [iwal1] [ora_iwal0] [ora_iwal1] c0
//   [passive]                                     (no own parameters)
//   [ac] delta alpha eta pmin_normalizer max_unlabeled lookahead log_class_size
//   [dataset.NAME] kind path n dim margin omega epsilon classes h_star seed

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace aal {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ParamSet = std::map<std::string, double>;

/// Canonical "k=v;k=v" form, keys sorted, shortest round-trip values.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string params_id(const ParamSet& p) {
  std::string s;
  for (const auto& [k, v] : p) {
    if (!s.empty()) s += ';';
    s += k + '=' + format_double(v);
  }
  return s;
}

inline ParamSet parse_params_id(const std::string& id) {
  ParamSet p;
  std::stringstream ss(id);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("bad parameter '" + item + "'");
    try {
      p[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad value in parameter '" + item + "'");
    }
  }
  return p;
}

inline const std::vector<std::string>& algorithm_ids() {
  static const std::vector<std::string> ids{"passive", "iwal0", "iwal1", "ora_iwal0", "ora_iwal1", "oac", "ac"};
  return ids;
}

/// Parameters each algorithm accepts besides the shared learning rate.
inline const std::set<std::string>& algorithm_keys(const std::string& a) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"passive", {}},
      {"iwal0", {"c0"}},
      {"iwal1", {"c0"}},
      {"ora_iwal0", {"c0"}},
      {"ora_iwal1", {"c0"}},
      {"oac", {"c0", "l", "alpha", "beta_scale"}},
      {"ac", {"delta", "alpha", "eta", "pmin_normalizer", "max_unlabeled", "lookahead", "log_class_size"}},
  };
  auto it = keys.find(a);
  if (it == keys.end()) throw ConfigError("unknown algorithm '" + a + "'");
  return it->second;
}

struct AlgorithmGrid {
  std::string id;
  std::map<std::string, std::vector<double>> values;  ///< includes "lr" when the grid has one
};

struct DatasetSpec {
  std::string name;
  std::string kind;  ///< file, hard, realizable, tsybakov
  std::string path;
  std::size_t n = 2000;
  std::size_t dim = 5;
  double margin = 0.1;
  double omega = 0.5;
  double epsilon = 0.2;
  std::size_t classes = 100;
  std::int64_t h_star = -1;  ///< -1: drawn from the seed
  std::uint64_t seed = 1;

  bool enumerated() const { return kind == "hard"; }
};

struct SweepConfig {
  std::uint64_t seed = 1;
  std::size_t permutations = 9;
  std::vector<std::size_t> budgets{10, 20, 40, 80, 160, 320, 640, 1280, 2560, 5120, 10240};
  double test_fraction = 0.2;
  std::size_t workers = 0;  ///< 0: AAL_WORKERS or hardware concurrency
  std::string output = "results.csv";
  std::string summary = "summary.json";
  std::string baseline = "passive";
  std::string baseline_params = "lr=0.4";
  std::vector<double> learning_rates{0.4};
  std::vector<AlgorithmGrid> algorithms;
  std::vector<DatasetSpec> datasets;
};

namespace detail {

template <class T>
T convert(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_same_v<T, double>) v = std::stod(s, &used);
    else if constexpr (std::is_same_v<T, std::uint64_t>) v = std::stoull(s, &used);
    else if constexpr (std::is_same_v<T, std::int64_t>) v = std::stoll(s, &used);
    else v = static_cast<T>(std::stoull(s, &used));
    if constexpr (!std::is_same_v<T, double> && !std::is_same_v<T, std::int64_t>) {
      if (!s.empty() && s.front() == '-') throw std::invalid_argument("negative");
    }
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid value '" + s + "' for key '" + key + "'");
  }
}

inline const std::string& single(const std::string& key, const std::vector<std::string>& in) {
  if (in.size() != 1) throw ConfigError("key '" + key + "' takes a single value");
  return in.front();
}

}  // namespace detail

inline SweepConfig parse_config(std::istream& in) {
  SweepConfig cfg;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  std::vector<std::string> order;
  std::map<std::string, AlgorithmGrid> grids;
  std::map<std::string, DatasetSpec> datasets;
  std::vector<std::string> dataset_order;
  bool have_algorithms = false;

  for (const auto& it : items) {
    const std::string key = it.fullname();
    if (it.name == "++" || it.name == "--") continue;
    const auto& v = it.inputs;
    using detail::convert;
    using detail::single;

    if (it.parents.empty()) {
      if (key == "seed") cfg.seed = convert<std::uint64_t>(key, single(key, v));
      else if (key == "permutations") cfg.permutations = convert<std::size_t>(key, single(key, v));
      else if (key == "test_fraction") cfg.test_fraction = convert<double>(key, single(key, v));
      else if (key == "workers") cfg.workers = convert<std::size_t>(key, single(key, v));
      else if (key == "output") cfg.output = single(key, v);
      else if (key == "summary") cfg.summary = single(key, v);
      else if (key == "baseline") cfg.baseline = single(key, v);
      else if (key == "baseline_params") cfg.baseline_params = single(key, v);
      else if (key == "budgets") {
        cfg.budgets.clear();
        for (const auto& s : v) cfg.budgets.push_back(convert<std::size_t>(key, s));
      } else if (key == "algorithms") {
        have_algorithms = true;
        order.clear();
        for (const auto& s : v) {
          algorithm_keys(s);
          order.push_back(s);
        }
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
      continue;
    }

    const std::string& section = it.parents.front();
    if (section == "grid" && it.parents.size() == 1) {
      if (it.name != "lr") throw ConfigError("unknown key '" + key + "'");
      cfg.learning_rates.clear();
      for (const auto& s : v) cfg.learning_rates.push_back(convert<double>(key, s));
      continue;
    }
    if (section == "dataset" && it.parents.size() == 2) {
      const std::string& name = it.parents[1];
      if (!datasets.count(name)) {
        dataset_order.push_back(name);
        datasets[name].name = name;
      }
      auto& d = datasets[name];
      const auto& s = single(key, v);
      if (it.name == "kind") d.kind = s;
      else if (it.name == "path") d.path = s;
      else if (it.name == "n") d.n = convert<std::size_t>(key, s);
      else if (it.name == "dim") d.dim = convert<std::size_t>(key, s);
      else if (it.name == "margin") d.margin = convert<double>(key, s);
      else if (it.name == "omega") d.omega = convert<double>(key, s);
      else if (it.name == "epsilon") d.epsilon = convert<double>(key, s);
      else if (it.name == "classes") d.classes = convert<std::size_t>(key, s);
      else if (it.name == "h_star") d.h_star = convert<std::int64_t>(key, s);
      else if (it.name == "seed") d.seed = convert<std::uint64_t>(key, s);
      else throw ConfigError("unknown key '" + key + "'");
      continue;
    }
    if (it.parents.size() == 1) {
      const std::set<std::string>* allowed = nullptr;
      try {
        allowed = &algorithm_keys(section);
      } catch (const ConfigError&) {
        throw ConfigError("unknown key '" + key + "'");
      }
      if (!allowed->count(it.name)) throw ConfigError("unknown key '" + key + "'");
      auto& g = grids[section];
      g.id = section;
      auto& vals = g.values[it.name];
      vals.clear();
      for (const auto& s : v) vals.push_back(convert<double>(key, s));
      if (vals.empty()) throw ConfigError("key '" + key + "' has no values");
      continue;
    }
    throw ConfigError("unknown key '" + key + "'");
  }

  if (!have_algorithms) throw ConfigError("missing key 'algorithms'");
  for (const auto& id : order) {
    AlgorithmGrid g = grids.count(id) ? grids[id] : AlgorithmGrid{id, {}};
    g.id = id;
    cfg.algorithms.push_back(std::move(g));
  }
  for (const auto& name : dataset_order) {
    auto& d = datasets[name];
    if (d.kind != "file" && d.kind != "hard" && d.kind != "realizable" && d.kind != "tsybakov")
      throw ConfigError("invalid value '" + d.kind + "' for key 'dataset." + name + ".kind'");
    if (d.kind == "file" && d.path.empty()) throw ConfigError("missing key 'dataset." + name + ".path'");
    cfg.datasets.push_back(d);
  }
  if (cfg.datasets.empty()) throw ConfigError("no [dataset.*] sections");
  if (cfg.permutations == 0) throw ConfigError("invalid value '0' for key 'permutations'");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw ConfigError("invalid value '" + format_double(cfg.test_fraction) + "' for key 'test_fraction'");
  if (cfg.budgets.empty()) throw ConfigError("key 'budgets' has no values");
  for (std::size_t i = 1; i < cfg.budgets.size(); ++i)
    if (cfg.budgets[i] <= cfg.budgets[i - 1]) throw ConfigError("key 'budgets' must be strictly increasing");
  for (double lr : cfg.learning_rates)
    if (!(lr > 0.0)) throw ConfigError("invalid value '" + format_double(lr) + "' for key 'grid.lr'");
  parse_params_id(cfg.baseline_params);
  return cfg;
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in);
}

}  // namespace aal
