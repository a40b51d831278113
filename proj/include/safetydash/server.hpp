#pragma once

#include "safetydash/api.hpp"

#include <functional>
#include <memory>
#include <ostream>
#include <string>

namespace httplib {
class Server;
}

namespace safetydash {

// HTTP/1.1 front end for Api. One log line per request goes to `log`.
class ApiServer {
 public:
  ApiServer(Api& api, std::ostream* log = nullptr);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds host:port (port 0 picks an ephemeral port). Returns the bound port,
  /// or -1 when binding fails.
  int bind(const std::string& host, int port);

  /// Blocks serving requests until stop().
  bool listen();
  void stop();
  bool running() const;

 private:
  Api& api_;
  std::ostream* log_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace safetydash
