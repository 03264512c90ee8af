// HTTP server for the tutoring service.

#include <CLI11.hpp>
#include <httplib.h>

#include <chrono>
#include <csignal>
#include <iostream>
#include <string>

#include "sostutor/api.hpp"
#include "sostutor/store.hpp"
#include "sostutor/tutoring_service.hpp"

namespace {
httplib::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peer tutoring matchmaking service"};
  std::string listen = "127.0.0.1:8080";
  std::string log_path = "sostutor-events.jsonl";
  std::string credentials_path;
  long long token_lifetime_s = 24 * 60 * 60;
  app.add_option("--listen", listen, "host:port to bind")->envname("SOSTUTOR_LISTEN");
  app.add_option("--log", log_path, "Event log file")->envname("SOSTUTOR_LOG");
  app.add_option("--credentials", credentials_path, "JSON file mapping userId to secret")
      ->envname("SOSTUTOR_CREDENTIALS")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--token-lifetime", token_lifetime_s, "Token lifetime in seconds")
      ->envname("SOSTUTOR_TOKEN_LIFETIME")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "--listen must be host:port\n";
    return 2;
  }
  const std::string host = listen.substr(0, colon);
  const int port = std::stoi(listen.substr(colon + 1));

  try {
    sostutor::tasks::SystemClock clock;
    sostutor::store::EventLog log(log_path);
    sostutor::TutoringService service(log, clock);
    sostutor::api::ApiService api(service, sostutor::api::Credentials::load(credentials_path),
                                  clock, std::chrono::seconds{token_lifetime_s});
    httplib::Server server;
    api.mount(server);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << host << ":" << port << " (log " << log_path << ", "
              << log.last_seq() << " records replayed)" << std::endl;
    if (!server.listen(host, port)) {
      std::cerr << "cannot bind " << listen << "\n";
      return 1;
    }
  } catch (const sostutor::Error& e) {
    std::cerr << "error (" << sostutor::to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  }
  return 0;
}
