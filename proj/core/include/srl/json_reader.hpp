#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "srl/error.hpp"

namespace srl {

/// Strict field-by-field reader over a JSON object. Missing, mistyped and
/// (after finish()) unconsumed keys raise `code` with the offending path.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path,
               ErrorCode code = ErrorCode::SchemaError);

  const nlohmann::json& required(std::string_view key);
  const nlohmann::json* optional(std::string_view key);

  std::string str(std::string_view key);
  std::string str_or(std::string_view key, std::string fallback);
  std::int64_t integer(std::string_view key);
  bool boolean(std::string_view key);
  std::vector<std::string> strings(std::string_view key);
  const nlohmann::json& array(std::string_view key);
  const nlohmann::json& object(std::string_view key);

  std::string child(std::string_view key) const { return path_ + "." + std::string(key); }
  const std::string& path() const noexcept { return path_; }

  /// Rejects keys that were never read.
  void finish() const;

  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

 private:
  const nlohmann::json& j_;
  std::string path_;
  ErrorCode code_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace srl
