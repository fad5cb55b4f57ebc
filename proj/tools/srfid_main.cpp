#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "srfid/common/error.hpp"

using namespace srfid;

int main(int argc, char** argv) {
  CLI::App app{"srfid: super-resolution high-level fidelity workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  cli::Globals g;
  app.add_option("--data-dir", g.data_dir, "Base directory for relative paths");
  app.add_option("--seed", g.seed, "Seed for every randomized step");
  app.add_option("--threads", g.threads, "Worker threads for batch work (0 = all cores)");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  int exit_code = cli::kExitOk;
  cli::register_degrade(app, g, exit_code);
  cli::register_score(app, g, exit_code);
  cli::register_hlf(app, g, exit_code);
  cli::register_select(app, g, exit_code);
  cli::register_aggregate(app, g, exit_code);
  cli::register_split(app, g, exit_code);
  cli::register_correlate(app, g, exit_code);
  cli::register_report(app, g, exit_code);
  cli::register_serve(app, g, exit_code);

  // Logs go to stderr so stdout stays parseable.
  auto logger = spdlog::stderr_color_mt("srfid");
  spdlog::set_default_logger(logger);
  app.parse_complete_callback([&] { spdlog::set_level(spdlog::level::from_str(g.log_level)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitOk : cli::kExitUsage;
  } catch (const Error& e) {
    spdlog::error("{} error: {}", to_string(e.kind()), e.what());
    spdlog::shutdown();
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    spdlog::shutdown();
    return cli::kExitUsage;
  }
  spdlog::shutdown();
  return exit_code;
}
