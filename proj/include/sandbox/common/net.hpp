#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sandbox::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

// "host:port"; throws Error(invalid_request) on anything else.
Endpoint parse_endpoint(std::string_view text);

inline constexpr std::size_t kMaxLineBytes = 8u << 20;

// Owning, move-only TCP stream carrying LF-terminated lines.
class LineStream {
 public:
  LineStream() = default;
  explicit LineStream(int fd) : fd_(fd) {}
  ~LineStream();
  LineStream(LineStream&& other) noexcept;
  LineStream& operator=(LineStream&& other) noexcept;
  LineStream(const LineStream&) = delete;
  LineStream& operator=(const LineStream&) = delete;

  static LineStream connect(const Endpoint& ep, int timeout_ms = 2000);

  bool is_open() const { return fd_ >= 0; }

  // Writes `line` plus '\n'. Returns false if the peer is gone.
  bool write_line(std::string_view line);

  // Next complete line without its terminator; nullopt on EOF or error. A
  // partial trailing line at EOF is returned through `partial` if given.
  std::optional<std::string> read_line(std::string* partial = nullptr);

  void shutdown();
  void close();

 private:
  int fd_ = -1;
  std::string buffer_;
  std::size_t head_ = 0;
};

class Listener {
 public:
  Listener() = default;
  ~Listener();
  Listener(Listener&& other) noexcept;
  Listener& operator=(Listener&& other) noexcept;
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  // Port 0 binds an ephemeral port; see port().
  static Listener bind(const Endpoint& ep);

  std::uint16_t port() const { return port_; }

  // Blocks up to timeout_ms; nullopt on timeout or after close().
  std::optional<LineStream> accept(int timeout_ms);

  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace sandbox::net
