#include <httplib.h>

#include "srl/error.hpp"
#include "srl/harness.hpp"

namespace srl {

ApiResponse InProcessDriver::call(const std::string& method, const std::string& path, const nlohmann::json& body) {
  return router_.handle(method, path, method == "GET" ? std::string() : body.dump());
}

HttpDriver::HttpDriver(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.find("://") == std::string::npos) raise(ErrorCode::ConfigError, "remote URL needs a scheme: " + base_url_);
}

ApiResponse HttpDriver::call(const std::string& method, const std::string& path, const nlohmann::json& body) {
  httplib::Client cli(base_url_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  const auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Result res = method == "GET" ? cli.Get(path) : cli.Post(path, body.dump(), "application/json");
  if (!res) raise(ErrorCode::IoError, method + " " + base_url_ + path + " failed: " + httplib::to_string(res.error()));
  ApiResponse out;
  out.status = res->status;
  out.body = res->body;
  out.content_type = res->get_header_value("Content-Type");
  return out;
}

}  // namespace srl
