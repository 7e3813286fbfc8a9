#include "sentishape/stub_scorer.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "json.hpp"
#include "sentishape/error.hpp"
#include "sentishape/scorer_client.hpp"

namespace sshape {

StubScorerServer::Handler StubScorerServer::protocol_handler(
    std::function<double(std::string_view)> polarity) {
  return [polarity = std::move(polarity)](std::string_view line) -> std::optional<std::string> {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      return R"({"id":0,"error":"malformed request"})";
    }
    if (!req.is_object() || !req.contains("id") || !req["id"].is_number_unsigned()) {
      return R"({"id":0,"error":"request has no unsigned id"})";
    }
    nlohmann::json resp;
    resp["id"] = req["id"];
    if (!req.contains("text") || !req["text"].is_string()) {
      resp["error"] = "request has no text";
    } else {
      resp["polarity"] = polarity(req["text"].get<std::string>());
    }
    return resp.dump();
  };
}

StubScorerServer::StubScorerServer(Handler handler) : handler_(std::move(handler)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw IoError("stub scorer: socket failed");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 4) != 0) {
    ::close(listen_fd_);
    throw IoError(std::string("stub scorer: bind/listen failed: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  thread_ = std::thread([this] { run(); });
}

StubScorerServer::~StubScorerServer() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
  ::close(listen_fd_);
}

void StubScorerServer::run() {
  while (!stop_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 20) <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    serve_connection(fd);
    ::close(fd);
  }
}

void StubScorerServer::serve_connection(int fd) {
  std::string buffer;
  while (!stop_) {
    const auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::optional<std::string> reply =
          line.size() > kMaxProtocolLine
              ? std::optional<std::string>(R"({"id":0,"error":"request line too long"})")
              : handler_(line);
      ++served_;
      if (reply) {
        *reply += '\n';
        std::size_t off = 0;
        while (off < reply->size()) {
          const ssize_t n = ::send(fd, reply->data() + off, reply->size() - off, MSG_NOSIGNAL);
          if (n <= 0) return;
          off += static_cast<std::size_t>(n);
        }
      }
      continue;
    }
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, 20);
    if (rc <= 0) continue;
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace sshape
