// engine — spatio-temporal decision support for remote facility monitoring.
//
// Subcommands:
//   check   evaluate the rule set against the model snapshot at one tick
//   replay  run event + weather files through the full pipeline
//   serve   listen for live event and weather lines
//   render  turn a command list file into visualization XML
//
// Exit codes: 0 = quiet, 1 = error, 2 = at least one rule triggered.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "engine/config.hpp"
#include "engine/ingestion.hpp"
#include "engine/runtime.hpp"
#include "engine/serve.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

struct overrides {
  std::optional<std::string> out_dir;
  std::optional<int> port;
  std::optional<std::int64_t> coalesce_window;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> queue_capacity;
};

engine::engine_config load_config(const std::string& path, const overrides& ov) {
  engine::engine_config cfg = engine::load_engine_config(path);
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.port) cfg.listen_port = *ov.port;
  if (ov.coalesce_window) cfg.coalesce_window_ticks = *ov.coalesce_window;
  if (ov.horizon) cfg.horizon_ticks = *ov.horizon;
  if (ov.queue_capacity) cfg.queue_capacity = static_cast<std::size_t>(*ov.queue_capacity);
  if (const char* env = std::getenv("ENGINE_OUT_DIR")) cfg.out_dir = env;
  return cfg;
}

void add_override_flags(CLI::App* cmd, overrides& ov) {
  cmd->add_option("--out-dir", ov.out_dir, "Override out_dir from the config");
  cmd->add_option("--coalesce-window", ov.coalesce_window, "Override coalesce_window");
  cmd->add_option("--horizon", ov.horizon, "Override horizon");
  cmd->add_option("--queue-capacity", ov.queue_capacity, "Override queue_capacity");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision support engine for remote industrial facilities"};
  app.require_subcommand(1);

  std::string config_path;
  overrides ov;

  // check
  auto* check = app.add_subcommand("check", "Evaluate rules against the model at one tick");
  std::int64_t at_tick = 0;
  std::string at_time;
  check->add_option("--config", config_path, "Engine config file")->required();
  auto* at_opt = check->add_option("--at", at_tick, "Tick to evaluate at");
  check->add_option("--at-time", at_time,
                    "ISO-8601 timestamp to evaluate at (mapped via epoch/tick_seconds)");
  add_override_flags(check, ov);

  // replay
  auto* replay = app.add_subcommand("replay", "Replay event and weather files");
  std::string events_path, weather_path;
  replay->add_option("--config", config_path, "Engine config file")->required();
  replay->add_option("--events", events_path, "Event file (wire protocol lines)")->required();
  replay->add_option("--weather", weather_path, "Weather feed file")->required();
  add_override_flags(replay, ov);

  // serve
  auto* serve = app.add_subcommand("serve", "Listen for live events and weather");
  serve->add_option("--config", config_path, "Engine config file")->required();
  serve->add_option("--port", ov.port, "Override listen_port");
  add_override_flags(serve, ov);

  // render
  auto* render = app.add_subcommand("render", "Render a command list file to XML");
  std::string in_path;
  render->add_option("--in", in_path, "Command list file ('-' for stdin)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      engine::engine_config cfg = load_config(config_path, ov);
      if (!at_time.empty()) {
        at_tick = engine::tick_from_wall_clock(at_time, cfg.epoch, cfg.tick_seconds);
      } else if (at_opt->count() == 0) {
        std::cerr << "check needs --at or --at-time\n";
        return 1;
      }
      engine::check_result result = engine::run_check(cfg, at_tick);
      std::cout << result.xml;
      return result.triggered ? 2 : 0;
    }
    if (replay->parsed()) {
      engine::engine_config cfg = load_config(config_path, ov);
      engine::replay_stats stats =
          engine::run_replay_files(cfg, events_path, weather_path, std::cerr);
      std::cout << stats.summary() << "\n";
      return stats.rules_fired > 0 ? 2 : 0;
    }
    if (serve->parsed()) {
      engine::engine_config cfg = load_config(config_path, ov);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      engine::serve_loop loop(std::move(cfg), std::cerr);
      return loop.run(g_stop);
    }
    if (render->parsed()) {
      std::vector<engine::device_binding> bindings;
      if (in_path == "-") {
        bindings = engine::parse_binding_file(std::cin, "<stdin>");
      } else {
        std::ifstream in(in_path);
        if (!in) throw engine::config_error("cannot open " + in_path);
        bindings = engine::parse_binding_file(in, in_path);
      }
      std::cout << engine::render_xml(bindings);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
