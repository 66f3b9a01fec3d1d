#pragma once

#include <json.hpp>

#include <string>

namespace sandbox {

// ordered_json keeps insertion order, which is what makes every file and wire
// record canonical: the writer decides the order, not a hash map.
using Json = nlohmann::ordered_json;

// Compact single-line dump; non-ASCII stays UTF-8, invalid UTF-8 is replaced.
inline std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

inline std::string dump_pretty(const Json& j) {
  return j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

// Text between the first '{' and the last '}', which drops the prose and code
// fences chat models like to wrap around JSON. Returns the input if there is none.
inline std::string outermost_object(const std::string& reply) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return reply;
  return reply.substr(open, close - open + 1);
}

}  // namespace sandbox
