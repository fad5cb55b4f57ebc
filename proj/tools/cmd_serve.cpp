// serve: runs the annotation service until SIGINT or SIGTERM.

#include <atomic>
#include <csignal>
#include <thread>

#include <pthread.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "srfid/service/server.hpp"

namespace srfid::cli {

void register_serve(CLI::App& app, const Globals& g, int&) {
  auto config_path = std::make_shared<std::string>();
  auto* cmd = app.add_subcommand("serve", "Run the HTTP annotation service");
  cmd->add_option("--config", *config_path, "Service config (JSON)")->required();
  cmd->callback([config_path, &g] {
    auto config = service::load_service_config(g.resolve(*config_path));

    // Block the signals before any server thread exists so only the
    // watcher below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::AnnotationServer server(std::move(config));
    server.bind();
    // Whoever flips `stopping` first owns the shutdown.
    std::atomic<bool> stopping{false};
    std::thread watcher([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      if (stopping.exchange(true)) return;
      spdlog::info("signal {} received, shutting down", sig);
      server.stop();
    });
    server.run();
    // run() also returns if the listener fails; wake the watcher then.
    if (!stopping.exchange(true)) pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    spdlog::info("service stopped");
    spdlog::default_logger()->flush();
  });
}

}  // namespace srfid::cli
