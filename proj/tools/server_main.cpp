// Cloud-side application server: listens on TCP, negotiates task bundles,
// executes requests on the simulated clone pool.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "offload/appserver.hpp"
#include "offload/transport.hpp"
#include "offload/workloads.hpp"

using namespace offload;

int main(int argc, char** argv) {
  CLI::App app{"offloading application server"};

  std::string listen = "0.0.0.0";
  int port = 7801;
  std::string registry_dir;
  bool restricted = false;
  std::string pool_config_path;
  std::string primary_config = "main";
  int warm = 8;
  bool verbose = false;

  app.add_option("--listen", listen, "listen address (informational; binds all)");
  app.add_option("--port,-p", port, "TCP port (0 picks a free one)");
  app.add_option("--registry-dir", registry_dir,
                 "directory where accepted bundle records are written");
  app.add_flag("--restricted", restricted, "refuse task bundle transfers");
  app.add_option("--pool-config", pool_config_path,
                 "clone pool policy file (key=value)");
  app.add_option("--primary-config", primary_config, "VM configuration for plain requests");
  app.add_option("--warm", warm, "paused clones pre-seeded per configuration");
  app.add_flag("--verbose,-v", verbose, "log per-request activity");

  CLI11_PARSE(app, argc, argv);

  try {
    WallClock clock;
    auto registry = workloads::make_workload_registry();

    vmpool::PoolPolicy policy;
    if (!pool_config_path.empty())
      policy = vmpool::PoolPolicy::from_config(Config::from_file(pool_config_path));
    vmpool::VmPool pool(clock, policy);
    for (const auto& cfg : vmpool::vm_config_table()) pool.seed_paused(cfg, warm);

    appserver::ServerOptions options;
    options.restricted = restricted;
    options.primary_config = primary_config;
    options.run_parts_concurrently = true;
    appserver::AppServer server(registry, pool, clock, options);
    if (verbose)
      server.set_logger([](const std::string& line) { std::cerr << line << "\n"; });

    if (!registry_dir.empty()) std::filesystem::create_directories(registry_dir);

    transport::TcpListener listener(port);
    std::cerr << "listening on " << listen << ":" << listener.port()
              << (restricted ? " (restricted)" : "") << "\n";

    std::vector<std::thread> workers;
    for (;;) {
      std::unique_ptr<transport::TcpTransport> conn;
      try {
        conn = listener.accept();
      } catch (const ConnectionLost&) {
        break;  // listener closed
      }
      workers.emplace_back([&server, &registry_dir,
                            conn = std::shared_ptr<transport::TcpTransport>(
                                std::move(conn))] {
        auto session = server.open_session();
        try {
          for (;;) {
            Bytes frame = conn->recv_frame();
            auto installed_before = session->installed.size();
            for (const auto& reply : server.handle_frame(*session, frame))
              conn->send_frame(reply);
            if (!registry_dir.empty() && session->installed.size() > installed_before) {
              // Persist a record per accepted bundle so restarts can audit
              // what clients installed.
              for (const auto& ref : session->installed) {
                std::ofstream out(registry_dir + "/" + ref.task_id + "-v" +
                                  std::to_string(ref.version) + ".bundle");
                out << ref.task_id << " " << ref.version << "\n";
              }
            }
          }
        } catch (const ConnectionLost&) {
          // client hung up
        }
      });
    }
    for (auto& w : workers) w.join();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
