#pragma once

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "evonet/evonet.hpp"
#include "evonet/http_server.hpp"

namespace evonet::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kTrialFailed = 2 };

inline std::atomic<bool> g_interrupted{false};

inline std::filesystem::path resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("EVONET_OUT"); env && *env) return env;
  return ".";
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"evonet: agent-based simulation on networks"};
  app.require_subcommand(1);

  std::string project_path;
  std::string out_dir;
  std::string web_dir;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  unsigned short port = 8080;
  std::string host = "127.0.0.1";

  auto* run_cmd = app.add_subcommand("run", "run every trial of a project and write outputs");
  run_cmd->add_option("project", project_path, "project CSV")->required();
  run_cmd->add_option("--threads", threads, "worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_dir, "output directory (default: $EVONET_OUT or .)");

  auto* validate_cmd = app.add_subcommand("validate", "parse and check a project without running it");
  validate_cmd->add_option("project", project_path, "project CSV")->required();

  auto* serve_cmd = app.add_subcommand("serve", "start the HTTP/WebSocket control plane");
  serve_cmd->add_option("project", project_path, "project CSV")->required();
  serve_cmd->add_option("--port", port, "listen port");
  serve_cmd->add_option("--host", host, "listen address");
  serve_cmd->add_option("--threads", threads, "worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--out", out_dir, "output directory (default: $EVONET_OUT or .)");
  serve_cmd->add_option("--web", web_dir, "directory of static web UI files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }

  const auto registry = builtin_models();
  Project project;
  try {
    project = load_project(project_path, registry);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }

  if (*validate_cmd) {
    std::size_t trials = 0;
    for (const auto& e : project.experiments) trials += e.trials;
    out << project_path << ": " << project.experiments.size() << " experiment(s), " << trials << " trial(s)\n";
    return kOk;
  }

  TrialOptions options;
  options.out_dir = resolve_out(out_dir);

  if (*run_cmd) {
    const auto results = schedule(project, registry, threads, options);
    int code = kOk;
    for (const auto& r : results) {
      out << r.experiment_id << " trial " << r.trial_index << ": " << to_string(r.status) << " after " << r.steps
          << " step(s)\n";
      if (r.status != TrialStatus::Finished) {
        err << "error: " << r.experiment_id << " trial " << r.trial_index << ": " << r.diagnostic << "\n";
        code = kTrialFailed;
      }
    }
    return code;
  }

  ControlPlane plane(std::move(project), registry, threads, options);
  HttpServer server(plane, {host, port, web_dir});
  try {
    server.start();
  } catch (const std::exception& e) {
    err << "error: cannot listen on " << host << ":" << port << ": " << e.what() << "\n";
    return kInvalid;
  }
  out << "serving on http://" << host << ":" << server.port() << "/api/experiments" << std::endl;
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kOk;
}

}  // namespace evonet::cli
