#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "appc/engine.hpp"
#include "appc/instance_gen.hpp"
#include "appc/rng.hpp"
#include "appc/strategies.hpp"
#include "appc/visibility.hpp"

namespace appc {

struct BenchmarkMap {
  std::string name;
  GridMap map;
  SpawnSpec spawn;  // rectangles only; counts, ratio and seed are filled per episode
};

struct BenchmarkConfig {
  std::vector<BenchmarkMap> maps;
  std::vector<TeamRatio> ratios;
  std::vector<StrategyId> strategies;
  int seeds = 10;
  std::uint64_t seed = 0;
  int attackers = 50;
  int visibility_range = 4;
  int step_limit = 150;
  double communicator_ratio = 0.2;
  int sim_draws = 1;
  int vicinity_radius = 4;
  std::optional<int> objective_horizon;

  void validate() const {
    if (seeds < 1) throw ConfigError("config: seeds must be >= 1");
    if (maps.empty() || ratios.empty() || strategies.empty())
      throw ConfigError("config: maps, ratios and strategies must be non-empty");
    if (visibility_range < 1) throw ConfigError("config: r must be >= 1");
    if (step_limit < 0) throw ConfigError("config: step_limit must be >= 0");
    if (!(communicator_ratio >= 0.0 && communicator_ratio < 1.0)) throw ConfigError("config: communicator_ratio must lie in [0, 1)");
    if (sim_draws < 1) throw ConfigError("config: sim_draws must be >= 1");
    if (vicinity_radius < 1) throw ConfigError("config: vicinity_radius must be >= 1");
  }
};

inline BenchmarkMap family_benchmark_map(MapFamily f, std::uint64_t map_seed = 1) {
  return {std::string(family_name(f)), family_map(f, map_seed), default_spawn(f)};
}

/// Parses a JSON benchmark config. Map paths are resolved against `base_dir`.
inline BenchmarkConfig parse_benchmark_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
  using nlohmann::json;
  BenchmarkConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    auto rect = [](const json& v) {
      if (!v.is_array() || v.size() != 4) throw ConfigError("config: rectangles are [x, y, width, height]");
      return Rect{v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
    };
    for (const auto& m : j.at("maps")) {
      if (m.is_string()) {
        cfg.maps.push_back(family_benchmark_map(parse_family(m.get<std::string>())));
        continue;
      }
      BenchmarkMap bm;
      if (m.contains("family")) {
        bm = family_benchmark_map(parse_family(m.at("family").get<std::string>()), m.value("map_seed", std::uint64_t{1}));
      } else {
        std::filesystem::path p = m.at("path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        bm.map = read_map_file(p);
        bm.name = p.stem().string();
      }
      if (m.contains("name")) bm.name = m.at("name").get<std::string>();
      if (m.contains("attacker_rect")) bm.spawn.attacker_rect = rect(m.at("attacker_rect"));
      if (m.contains("defender_rect")) bm.spawn.defender_rect = rect(m.at("defender_rect"));
      if (m.contains("target_rect")) bm.spawn.target_rect = rect(m.at("target_rect"));
      cfg.maps.push_back(std::move(bm));
    }
    for (const auto& r : j.at("ratios")) cfg.ratios.push_back(parse_ratio(r.get<std::string>()));
    if (j.contains("strategies")) {
      for (const auto& s : j.at("strategies")) cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
    } else {
      cfg.strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
    }
    cfg.seeds = j.value("seeds", cfg.seeds);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.attackers = j.value("attackers", cfg.attackers);
    cfg.visibility_range = j.value("r", cfg.visibility_range);
    cfg.step_limit = j.value("step_limit", cfg.step_limit);
    cfg.communicator_ratio = j.value("communicator_ratio", cfg.communicator_ratio);
    cfg.sim_draws = j.value("sim_draws", cfg.sim_draws);
    cfg.vicinity_radius = j.value("vicinity_radius", cfg.vicinity_radius);
    if (j.contains("objective_horizon")) cfg.objective_horizon = j.at("objective_horizon").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline BenchmarkConfig read_benchmark_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_benchmark_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------------------------

struct EpisodeKey {
  std::string map;
  TeamRatio ratio;
  StrategyId strategy;
  int run = 0;

  std::string describe() const {
    return "(map=" + map + ", ratio=" + ratio.str() + ", strategy=" + std::string(strategy_name(strategy)) +
           ", run=" + std::to_string(run) + ")";
  }
};

/// Instance seed: shared by all strategies for one (map, ratio, run) so that strategies are
/// compared on identical instances.
inline std::uint64_t instance_seed(std::uint64_t base, const std::string& map, TeamRatio ratio, int run) {
  return splitmix64(base ^ stable_hash("instance|" + map + '|' + ratio.str() + '|' + std::to_string(run)));
}

inline std::uint64_t episode_seed(std::uint64_t base, const EpisodeKey& key) {
  return splitmix64(base ^ stable_hash("episode|" + key.map + '|' + key.ratio.str() + '|' +
                                       std::string(strategy_name(key.strategy)) + '|' + std::to_string(key.run)));
}

inline Instance benchmark_instance(const BenchmarkConfig& cfg, const BenchmarkMap& m, TeamRatio ratio, int run) {
  SpawnSpec spec = m.spawn;
  spec.attackers = cfg.attackers;
  spec.ratio = ratio;
  spec.seed = instance_seed(cfg.seed, m.name, ratio, run);
  spec.visibility_range = cfg.visibility_range;
  spec.step_limit = cfg.step_limit;
  spec.communicator_ratio = cfg.communicator_ratio;
  spec.sim_draws = cfg.sim_draws;
  return generate_instance(m.map, spec);
}

struct ResultCell {
  std::string map;
  TeamRatio ratio;
  StrategyId strategy;
  std::vector<int> captured;  // per run

  double mean() const {
    if (captured.empty()) return 0.0;
    double sum = 0.0;
    for (int c : captured) sum += c;
    return sum / static_cast<double>(captured.size());
  }
  /// Sample standard deviation (0 for a single run).
  double stddev() const {
    if (captured.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (int c : captured) ss += (c - m) * (c - m);
    return std::sqrt(ss / static_cast<double>(captured.size() - 1));
  }
};

/// Cells in config order: map, then ratio, then strategy.
struct ResultTable {
  std::vector<ResultCell> cells;
  std::vector<std::string> maps;
  std::vector<TeamRatio> ratios;
  std::vector<StrategyId> strategies;

  const ResultCell* find(const std::string& map, TeamRatio ratio, StrategyId s) const {
    for (const auto& c : cells)
      if (c.map == map && c.ratio == ratio && c.strategy == s) return &c;
    return nullptr;
  }
};

using EpisodeObserver = std::function<void(const EpisodeKey&, const Instance&, const EpisodeResult&)>;

/// Runs every (map, ratio, strategy, run) episode. Results do not depend on `workers`.
/// `observer` is called once per episode, possibly from several threads at once.
inline ResultTable run_benchmark(const BenchmarkConfig& cfg, int workers = 1, const EpisodeObserver& observer = {}) {
  cfg.validate();
  ResultTable table;
  for (const auto& m : cfg.maps) table.maps.push_back(m.name);
  table.ratios = cfg.ratios;
  table.strategies = cfg.strategies;

  struct Task {
    std::size_t map, ratio, run;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < cfg.maps.size(); ++m)
    for (std::size_t r = 0; r < cfg.ratios.size(); ++r)
      for (int i = 0; i < cfg.seeds; ++i) tasks.push_back({m, r, static_cast<std::size_t>(i)});

  std::vector<VisibilityGraph> graphs;
  for (const auto& m : cfg.maps) graphs.emplace_back(m.map, cfg.visibility_range);

  const std::size_t n_strat = cfg.strategies.size();
  std::vector<int> captured(tasks.size() * n_strat, 0);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::string error_where;

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      const BenchmarkMap& m = cfg.maps[task.map];
      EpisodeKey key{m.name, cfg.ratios[task.ratio], cfg.strategies.front(), static_cast<int>(task.run)};
      try {
        const Instance inst = benchmark_instance(cfg, m, key.ratio, key.run);
        for (std::size_t s = 0; s < n_strat; ++s) {
          key.strategy = cfg.strategies[s];
          EpisodeOptions opt;
          opt.simulation.vicinity_radius = cfg.vicinity_radius;
          opt.objective_horizon = cfg.objective_horizon;
          opt.visibility = &graphs[task.map];
          const EpisodeResult result = run_episode(inst, key.strategy, episode_seed(cfg.seed, key), opt);
          captured[t * n_strat + s] = result.captured_count();
          if (observer) observer(key, inst, result);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
          error_where = key.describe();
        }
        next = tasks.size();
      }
    }
  };
  const int n_threads = std::max(1, workers);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error("episode " + error_where + " failed: " + e.what());
    }
  }

  for (std::size_t m = 0; m < cfg.maps.size(); ++m)
    for (std::size_t r = 0; r < cfg.ratios.size(); ++r)
      for (std::size_t s = 0; s < n_strat; ++s) {
        ResultCell cell{cfg.maps[m].name, cfg.ratios[r], cfg.strategies[s], {}};
        for (std::size_t t = 0; t < tasks.size(); ++t)
          if (tasks[t].map == m && tasks[t].ratio == r) cell.captured.push_back(captured[t * n_strat + s]);
        table.cells.push_back(std::move(cell));
      }
  return table;
}

// ---------------------------------------------------------------------------------------------
// Output

enum class TableFormat : std::uint8_t { Csv, Markdown };

inline TableFormat parse_format(std::string_view text) {
  if (text == "csv") return TableFormat::Csv;
  if (text == "markdown" || text == "md") return TableFormat::Markdown;
  throw ConfigError("unknown output format '" + std::string(text) + "'");
}

/// CSV with header "ratio,strategy,mean,stddev,seeds"; a leading "map" column is added when the
/// table covers more than one map.
inline std::string format_csv(const ResultTable& table) {
  const bool multi = table.maps.size() > 1;
  std::string out = multi ? "map,ratio,strategy,mean,stddev,seeds\n" : "ratio,strategy,mean,stddev,seeds\n";
  for (const auto& c : table.cells) {
    if (multi) out += c.map + ',';
    out += c.ratio.str() + ',' + std::string(strategy_name(c.strategy)) + ',' + format_decimal(c.mean()) + ',' +
           format_decimal(c.stddev()) + ',' + std::to_string(c.captured.size()) + '\n';
  }
  return out;
}

/// One table per map: ratios as rows, strategies as columns, cell = mean captured attackers.
inline std::string format_markdown(const ResultTable& table) {
  std::string out;
  for (const auto& map : table.maps) {
    if (!out.empty()) out += '\n';
    out += "### " + map + "\n\n| D:A |";
    for (StrategyId s : table.strategies) {
      std::string name(strategy_name(s));
      for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      out += ' ' + name + " |";
    }
    out += "\n|:---:|";
    for (std::size_t k = 0; k < table.strategies.size(); ++k) out += "---:|";
    out += '\n';
    for (const auto& ratio : table.ratios) {
      out += "| " + ratio.str() + " |";
      for (StrategyId s : table.strategies) {
        const ResultCell* c = table.find(map, ratio, s);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", c ? c->mean() : 0.0);
        out += ' ' + std::string(buf) + " |";
      }
      out += '\n';
    }
  }
  return out;
}

inline std::string format_table(const ResultTable& table, TableFormat f) {
  return f == TableFormat::Csv ? format_csv(table) : format_markdown(table);
}

inline void emit(const ResultTable& table, TableFormat f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << format_table(table, f);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace appc
