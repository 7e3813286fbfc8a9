#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

namespace sshape {

// In-process TCP scorer on 127.0.0.1 speaking the scorer wire protocol.
// Serves one connection at a time on a background thread.
class StubScorerServer {
 public:
  // Maps a raw request line to the raw response line; nullopt sends nothing.
  using Handler = std::function<std::optional<std::string>(std::string_view request_line)>;

  // Well-behaved protocol handler answering with polarity(text). Lines
  // without a parseable id get {"id":0,"error":...}.
  static Handler protocol_handler(std::function<double(std::string_view)> polarity);

  explicit StubScorerServer(Handler handler);
  ~StubScorerServer();
  StubScorerServer(const StubScorerServer&) = delete;
  StubScorerServer& operator=(const StubScorerServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  std::string endpoint() const { return "127.0.0.1:" + std::to_string(port_); }
  std::uint64_t requests_served() const noexcept { return served_.load(); }

 private:
  void run();
  void serve_connection(int fd);

  Handler handler_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> served_{0};
  std::thread thread_;
};

}  // namespace sshape
