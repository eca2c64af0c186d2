#pragma once

#include <memory>
#include <string>

#include "srl/api_router.hpp"

namespace srl {

/// cpp-httplib front end for ApiRouter.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port`, or to a free port when `port` is 0; returns the port.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  void listen();
  /// bind() then serve on a background thread.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace srl
