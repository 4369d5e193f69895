// safewalk command-line tool: generate traces, simulate, compute metrics,
// calibrate the walking threshold and host live sessions.

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safewalk/net/server.hpp"
#include "safewalk/safewalk.hpp"

namespace {

using namespace safewalk;

std::vector<Vec2> parse_points(const std::string& text) {
  // "x,z;x,z;..." or "x,z x,z ..."
  std::vector<Vec2> out;
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ';', ' ');
  std::stringstream ss(spaced);
  std::string item;
  while (ss >> item) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("point needs x,z: " + item);
    out.push_back({std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1))});
  }
  return out;
}

std::vector<ScriptSegment> parse_script(const std::string& text) {
  // "natural_walk:5,walk_in_place:10"
  std::vector<ScriptSegment> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("segment needs kind:seconds: " + item);
    out.push_back({gait_kind_from_string(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return out;
}

ServiceConfig config_or_default(const std::string& path) { return path.empty() ? ServiceConfig{} : load_config(path); }

net::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->io_context().stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locomotion classification and proximity-warning engine"};
  app.require_subcommand(1);

  // simulate
  std::string room_path;
  std::string trace_path;
  std::string config_path;
  std::string out_path;
  auto* simulate = app.add_subcommand("simulate", "Run a trace through the pipeline and write a frame log");
  simulate->add_option("--room", room_path, "Room JSON file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--trace", trace_path, "Skeleton trace (JSON lines)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--config", config_path, "Config JSON file")->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path, "Frame log output (JSON lines)")->required();

  // generate
  GaitParams gait;
  std::string kind = "stationary";
  std::string path_text;
  std::string start_text;
  std::string script_text;
  auto* generate = app.add_subcommand("generate", "Synthesize a skeleton trace");
  generate->add_option("--kind", kind, "stationary | natural_walk | walk_in_place | mixed_script")->required();
  generate->add_option("--seed", gait.seed, "Noise seed");
  generate->add_option("--duration", gait.duration, "Seconds (ignored for mixed_script)");
  generate->add_option("--speed", gait.ground_speed, "Walking speed, m/s");
  generate->add_option("--step-rate", gait.step_rate, "Steps per second over both knees");
  generate->add_option("--knee-lift", gait.knee_lift, "In-place knee lift, m");
  generate->add_option("--drift", gait.drift_speed, "In-place chest drift, m/s (< 0.1)");
  generate->add_option("--noise", gait.noise_sigma, "Gaussian noise per axis, m");
  generate->add_option("--rate", gait.frame_rate, "Frame rate, Hz");
  generate->add_option("--path", path_text, "Walking waypoints \"x,z;x,z;...\" (spaces also separate)");
  generate->add_flag("--loop", gait.loop_path, "Circle the path until the duration ends");
  generate->add_option("--start", start_text, "Start position \"x,z\" when there is no path");
  generate->add_option("--yaw", gait.yaw, "Initial heading, radians");
  generate->add_option("--script", script_text, "Segments \"kind:seconds,...\" for mixed_script");
  generate->add_option("--out", out_path, "Trace output (JSON lines)")->required();

  // calibrate
  std::string speeds_path;
  double rounding = 0.05;
  auto* calibrate = app.add_subcommand("calibrate", "Boxplot fences and walking threshold from speed samples");
  calibrate->add_option("--speeds", speeds_path, "CSV with one speed per line")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--step", rounding, "Threshold rounding step, m/s");

  // metrics
  std::string log_path;
  auto* metrics = app.add_subcommand("metrics", "Summarize a frame log");
  metrics->add_option("--log", log_path, "Frame log (JSON lines)")->required()->check(CLI::ExistingFile);

  // serve
  std::uint16_t port = 8765;
  std::string address = "127.0.0.1";
  std::string transport = "ws";
  std::size_t threads = 1;
  auto* serve = app.add_subcommand("serve", "Host live sessions");
  serve->add_option("--room", room_path, "Default room JSON file")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--address", address, "Listen address");
  serve->add_option("--config", config_path, "Config JSON file")->check(CLI::ExistingFile);
  serve->add_option("--transport", transport, "ws (WebSocket) or tcp (newline-delimited JSON)")
      ->check(CLI::IsMember({"ws", "tcp"}));
  serve->add_option("--threads", threads, "I/O threads");

  // config
  auto* config = app.add_subcommand("config", "Print the default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const auto cfg = config_or_default(config_path);
      const auto room = load_room(room_path);
      const auto trace = load_trace(trace_path);
      const auto result = run_trace(cfg.sim, room, trace);
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      for (const auto& line : result.log) out << line << '\n';
      std::cout << to_json(result.metrics).dump(2) << '\n';
    } else if (*generate) {
      gait.kind = gait_kind_from_string(kind);
      if (!path_text.empty()) gait.path = parse_points(path_text);
      if (!start_text.empty()) {
        const auto pts = parse_points(start_text);
        if (pts.size() != 1) throw std::invalid_argument("--start takes one x,z point");
        gait.start = pts.front();
      }
      if (!script_text.empty()) gait.script = parse_script(script_text);
      const auto frames = generate_gait(gait);
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      write_trace(out, frames);
      std::cerr << "wrote " << frames.size() << " frames to " << out_path << '\n';
    } else if (*calibrate) {
      std::ifstream in(speeds_path);
      const auto samples = parse_speed_csv(in);
      const auto fences = boxplot_fences(samples);
      auto j = to_json(fences);
      j["v_t"] = round_up_to_step(fences.upper_fence, rounding);
      j["samples"] = samples.size();
      std::cout << j.dump(2) << '\n';
    } else if (*metrics) {
      std::ifstream in(log_path);
      std::cout << to_json(metrics_from_log(in)).dump(2) << '\n';
    } else if (*serve) {
      net::ServerOptions opts;
      opts.address = address;
      opts.port = port;
      opts.transport = transport == "tcp" ? net::Transport::Tcp : net::Transport::WebSocket;
      net::Server server(config_or_default(config_path), load_room(room_path), opts);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << transport << " on " << address << ':' << server.port() << '\n';
      if (threads > 1) {
        server.start(threads);
        server.join();
      } else {
        server.run();
      }
      g_server = nullptr;
    } else if (*config) {
      std::cout << config_to_json(ServiceConfig{}).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
