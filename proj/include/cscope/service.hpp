#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "cscope/engine.hpp"

namespace httplib {
class Server;
}

namespace cscope {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  // Fixture directory backing POST /fetch; empty disables remote fetch.
  std::filesystem::path source_dir;
};

// JSON-over-HTTP adapter on top of an Engine. Every response body is one
// envelope:
//   {"status":"ok","payload":...}
//   {"status":"error","error_code":"<ErrorCode name>","message":"..."}
class Service {
 public:
  Service(Engine& engine, ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket and returns the actual port. Throws BindFailure.
  int bind();
  // Serves until stop(); call after bind().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  void routes();

  Engine& engine_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace cscope
