#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "appc/appc.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;

appc::Rect parse_rect(const std::string& text) {
  appc::Rect r;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> r.x >> c1 >> r.y >> c2 >> r.width >> c3 >> r.height) || c1 != ',' || c2 != ',' || c3 != ',')
    throw appc::ConfigError("malformed rectangle '" + text + "' (expected x,y,width,height)");
  return r;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string trace_file_name(const appc::EpisodeKey& key) {
  std::string ratio = key.ratio.str();
  for (char& c : ratio)
    if (c == ':') c = '-';
  return key.map + '_' + ratio + '_' + std::string(appc::strategy_name(key.strategy)) + '_' + std::to_string(key.run) + ".txt";
}

int cmd_run(const std::string& config_path, const std::string& out_path, const std::string& format, int workers,
            const std::string& trace_dir) {
  const auto cfg = appc::read_benchmark_config(config_path);
  const auto fmt = appc::parse_format(format);
  appc::EpisodeObserver observer;
  std::mutex io;
  if (!trace_dir.empty()) {
    fs::create_directories(trace_dir);
    observer = [&](const appc::EpisodeKey& key, const appc::Instance&, const appc::EpisodeResult& result) {
      const std::string text = appc::format_trace(result.trace);
      std::lock_guard lock(io);
      write_file(fs::path(trace_dir) / trace_file_name(key), text);
    };
  }
  const auto table = appc::run_benchmark(cfg, workers, observer);
  if (out_path.empty()) std::cout << appc::format_table(table, fmt);
  else appc::emit(table, fmt, out_path);
  return 0;
}

int cmd_gen_map(const std::string& family, const std::string& out_path, std::uint64_t seed) {
  const auto map = appc::family_map(appc::parse_family(family), seed);
  write_file(out_path, appc::format_map(map));
  return 0;
}

struct GenInstanceArgs {
  std::string map_path, ratio = "1:1", out_path, family, attacker_rect, defender_rect, target_rect;
  std::uint64_t seed = 0;
  int attackers = 50, r = 4, step_limit = 150, sim_draws = 1;
  double communicator_ratio = 0.2;
};

int cmd_gen_instance(const GenInstanceArgs& a) {
  const auto map = appc::read_map_file(a.map_path);
  appc::SpawnSpec spec;
  if (!a.family.empty()) {
    spec = appc::default_spawn(appc::parse_family(a.family));
  } else {
    // Left band for attackers, right band for targets, defenders just in front of the targets.
    const int w = map.width(), h = map.height();
    const int band = std::max(1, w / 6);
    spec.attacker_rect = {0, 0, band, h};
    spec.target_rect = {w - band, 0, band, h};
    spec.defender_rect = {std::max(band, w - 3 * band), 0, band, h};
  }
  if (!a.attacker_rect.empty()) spec.attacker_rect = parse_rect(a.attacker_rect);
  if (!a.defender_rect.empty()) spec.defender_rect = parse_rect(a.defender_rect);
  if (!a.target_rect.empty()) spec.target_rect = parse_rect(a.target_rect);
  spec.attackers = a.attackers;
  spec.ratio = appc::parse_ratio(a.ratio);
  spec.seed = a.seed;
  spec.visibility_range = a.r;
  spec.step_limit = a.step_limit;
  spec.communicator_ratio = a.communicator_ratio;
  spec.sim_draws = a.sim_draws;
  const auto inst = appc::generate_instance(map, spec);

  const fs::path out(a.out_path);
  const fs::path base = out.has_parent_path() ? out.parent_path() : fs::path(".");
  const std::string map_ref = fs::proximate(fs::absolute(a.map_path), fs::absolute(base)).generic_string();
  write_file(out, appc::format_instance(inst, map_ref));
  return 0;
}

int cmd_play(const std::string& instance_path, const std::string& strategy, std::uint64_t seed, int radius,
             const std::string& trace_path) {
  const auto inst = appc::read_instance_file(instance_path);
  appc::EpisodeOptions opt;
  opt.simulation.vicinity_radius = radius;
  const auto result = appc::run_episode(inst, appc::parse_strategy(strategy), seed, opt);
  const auto& m = result.metrics;
  std::cout << "captured " << result.captured_count() << '/' << inst.attacker_count() << '\n'
            << "targets_saved " << m.targets_saved << '\n'
            << "targets_saved_within_limit " << m.targets_saved_within_limit << '\n'
            << "sum_attacker_target_distance " << m.sum_attacker_target_distance << '\n'
            << "time_at_captured_targets " << m.time_at_captured_targets << '\n'
            << "steps " << result.trace.size() - 1 << '\n';
  if (!trace_path.empty()) write_file(trace_path, appc::format_trace(result.trace));
  return 0;
}

int cmd_replay(const std::string& trace_path, bool check, const std::string& instance_path, bool connected) {
  std::ifstream in(trace_path);
  if (!in) throw appc::ConfigError("cannot open trace '" + trace_path + "'");
  const auto trace = appc::parse_trace(in);
  std::cout << "steps " << (trace.empty() ? 0 : trace.size() - 1) << '\n';
  if (!check) return 0;
  std::optional<appc::Instance> inst;
  std::optional<appc::VisibilityGraph> g;
  if (!instance_path.empty()) {
    inst = appc::read_instance_file(instance_path);
    if (connected) g.emplace(inst->map, inst->visibility_range);
  } else if (connected) {
    throw appc::ConfigError("--connected requires --instance");
  }
  const auto issues = appc::check_trace(trace, inst ? &inst->map : nullptr, g ? &*g : nullptr);
  for (const auto& issue : issues) std::cout << "t=" << issue.time << ": " << issue.what << '\n';
  if (!issues.empty()) {
    std::cout << issues.size() << " invariant violation(s)\n";
    return kExitInvariant;
  }
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Area protection with connectivity: simulator and benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv", trace_dir;
  int workers = 1;
  auto* run = app.add_subcommand("run", "run a benchmark config and emit the result table");
  run->add_option("--config", config_path, "benchmark config (JSON)")->required();
  run->add_option("--out", out_path, "output file (default: stdout)");
  run->add_option("--format", format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
  run->add_option("--workers", workers, "concurrent episode runners")->check(CLI::PositiveNumber);
  run->add_option("--trace-dir", trace_dir, "write one trace file per episode");

  std::string family, map_out;
  std::uint64_t map_seed = 1;
  auto* gen_map = app.add_subcommand("gen-map", "write one of the bundled map families");
  gen_map->add_option("--family", family, "orthogonal-rooms, ruins or waterfront")
      ->required()
      ->check(CLI::IsMember({"orthogonal-rooms", "ruins", "waterfront"}));
  gen_map->add_option("--out", map_out, "output map file")->required();
  gen_map->add_option("--seed", map_seed, "layout seed");

  GenInstanceArgs gi;
  auto* gen_inst = app.add_subcommand("gen-instance", "generate a seeded instance for a map");
  gen_inst->add_option("--map", gi.map_path, "ASCII map file")->required();
  gen_inst->add_option("--ratio", gi.ratio, "team ratio D:A")->required();
  gen_inst->add_option("--seed", gi.seed, "instance seed")->required();
  gen_inst->add_option("--out", gi.out_path, "output instance file")->required();
  gen_inst->add_option("--family", gi.family, "use this family's default spawn rectangles");
  gen_inst->add_option("--attackers", gi.attackers, "number of attackers");
  gen_inst->add_option("--attacker-rect", gi.attacker_rect, "x,y,width,height");
  gen_inst->add_option("--defender-rect", gi.defender_rect, "x,y,width,height");
  gen_inst->add_option("--target-rect", gi.target_rect, "x,y,width,height");
  gen_inst->add_option("--r", gi.r, "visibility range");
  gen_inst->add_option("--step-limit", gi.step_limit, "steps per team");
  gen_inst->add_option("--communicator-ratio", gi.communicator_ratio, "fraction of defenders kept as communicators");
  gen_inst->add_option("--sim-draws", gi.sim_draws, "target guesses per simulation round");

  std::string play_instance, strategy = "sim", play_trace;
  std::uint64_t play_seed = 0;
  int radius = 4;
  auto* play = app.add_subcommand("play", "run one episode of an instance file");
  play->add_option("--instance", play_instance, "instance file")->required();
  play->add_option("--strategy", strategy, "rnd, grd, sim, rnd-c, grd-c or sim-c");
  play->add_option("--seed", play_seed, "episode seed");
  play->add_option("--vicinity-radius", radius, "bottleneck search radius");
  play->add_option("--trace", play_trace, "write the trace here");

  std::string trace_path, replay_instance;
  bool check = false, connected = false;
  auto* replay = app.add_subcommand("replay", "read a trace and check the movement invariants");
  replay->add_option("--trace", trace_path, "trace file")->required();
  replay->add_flag("--check-invariants", check, "validate every transition");
  replay->add_option("--instance", replay_instance, "instance file, enables map-aware checks");
  replay->add_flag("--connected", connected, "also require connected defenders (needs --instance)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_path, format, workers, trace_dir);
    if (*gen_map) return cmd_gen_map(family, map_out, map_seed);
    if (*gen_inst) return cmd_gen_instance(gi);
    if (*play) return cmd_play(play_instance, strategy, play_seed, radius, play_trace);
    if (*replay) return cmd_replay(trace_path, check, replay_instance, connected);
  } catch (const appc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
