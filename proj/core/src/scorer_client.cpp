#include "sentishape/scorer_client.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "sentishape/error.hpp"

namespace sshape {

namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() < 0 ? 0 : static_cast<int>(left.count());
}

// Buffered reader/writer over a pair of file descriptors.
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  void write_line(std::string_view line) override {
    if (line.size() > kMaxProtocolLine) {
      throw ProtocolError("request line exceeds 64 KiB");
    }
    std::string buf(line);
    buf += '\n';
    std::size_t off = 0;
    while (off < buf.size()) {
      const ssize_t n = send_or_write(write_fd_, buf.data() + off, buf.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ScorerUnavailable(std::string("scorer write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) override {
    const auto deadline = Clock::now() + timeout;
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() > kMaxProtocolLine) throw ProtocolError("response line exceeds 64 KiB");
        return line;
      }
      if (buffer_.size() > kMaxProtocolLine + 1) {
        throw ProtocolError("response line exceeds 64 KiB");
      }
      pollfd p{read_fd_, POLLIN, 0};
      const int rc = ::poll(&p, 1, remaining_ms(deadline));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ScorerUnavailable(std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) throw ScorerUnavailable("scorer did not answer within the timeout");
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw ScorerUnavailable(std::string("scorer read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw ScorerUnavailable("scorer closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 protected:
  static ssize_t send_or_write(int fd, const char* data, std::size_t len) {
    const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) return ::write(fd, data, len);
    return n;
  }

  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

class TcpChannel final : public FdChannel {
 public:
  explicit TcpChannel(int fd) : FdChannel(fd, fd) {}
  ~TcpChannel() override { ::close(read_fd_); }
};

class ProcessChannel final : public FdChannel {
 public:
  ProcessChannel(pid_t pid, int read_fd, int write_fd) : FdChannel(read_fd, write_fd), pid_(pid) {}
  ~ProcessChannel() override {
    ::close(write_fd_);
    ::close(read_fd_);
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == 0) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, &status, 0);
    }
  }

 private:
  pid_t pid_;
};

std::unique_ptr<LineChannel> connect_tcp(std::string_view endpoint,
                                         std::chrono::milliseconds timeout) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == endpoint.size()) {
    throw ConfigError("scorer endpoint must be host:port or stdio:<command>, got '" +
                      std::string(endpoint) + "'");
  }
  const std::string host(endpoint.substr(0, colon));
  const std::string port(endpoint.substr(colon + 1));

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw ScorerUnavailable("cannot resolve scorer endpoint '" + std::string(endpoint) +
                            "': " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);

  const auto deadline = Clock::now() + timeout;
  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      pollfd p{fd, POLLOUT, 0};
      rc = ::poll(&p, 1, remaining_ms(deadline));
      if (rc == 1) {
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        rc = err == 0 ? 0 : -1;
        errno = err;
      } else {
        rc = -1;
        errno = ETIMEDOUT;
      }
    }
    if (rc == 0) {
      ::fcntl(fd, F_SETFL, flags);
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<TcpChannel>(fd);
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  throw ScorerUnavailable("cannot connect to scorer at '" + std::string(endpoint) +
                          "': " + last_error);
}

std::unique_ptr<LineChannel> spawn_process(const std::string& command) {
  int to_child[2], from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw ScorerUnavailable("pipe failed");
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw ScorerUnavailable("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw ScorerUnavailable("fork failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<ProcessChannel>(pid, from_child[0], to_child[1]);
}

}  // namespace

std::unique_ptr<LineChannel> open_channel(std::string_view endpoint,
                                          std::chrono::milliseconds timeout) {
  if (endpoint.starts_with("stdio:")) return spawn_process(std::string(endpoint.substr(6)));
  return connect_tcp(endpoint, timeout);
}

ExternalScorer::ExternalScorer(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

ExternalScorer::ExternalScorer(std::unique_ptr<LineChannel> channel,
                               std::chrono::milliseconds timeout)
    : timeout_(timeout), channel_(std::move(channel)) {}

LineChannel& ExternalScorer::channel() {
  if (!channel_) {
    if (endpoint_.empty()) throw ScorerUnavailable("scorer connection was closed");
    channel_ = open_channel(endpoint_, timeout_);
  }
  return *channel_;
}

PolarityScore ExternalScorer::score(std::string_view text) {
  const std::uint64_t id = next_id_++;
  nlohmann::json req;
  req["id"] = id;
  req["text"] = std::string(text);
  const std::string line = req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

  std::string reply;
  try {
    LineChannel& ch = channel();
    ch.write_line(line);
    reply = ch.read_line(timeout_);
  } catch (const ScorerUnavailable&) {
    // a late answer would desynchronize ids; start over on the next call
    channel_.reset();
    throw;
  }

  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::parse_error&) {
    channel_.reset();
    throw ProtocolError("scorer response is not JSON");
  }
  if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_number_unsigned()) {
    channel_.reset();
    throw ProtocolError("scorer response has no unsigned id");
  }
  if (resp["id"].get<std::uint64_t>() != id) {
    channel_.reset();
    throw ProtocolError("scorer response id " + resp["id"].dump() + " does not match request " +
                        std::to_string(id));
  }
  if (auto it = resp.find("error"); it != resp.end()) {
    throw ProtocolError("scorer reported an error: " +
                        (it->is_string() ? it->get<std::string>() : it->dump()));
  }
  auto it = resp.find("polarity");
  if (it == resp.end() || !it->is_number()) throw ProtocolError("scorer response has no polarity");
  const double p = it->get<double>();
  if (!std::isfinite(p) || p < -1.0 || p > 1.0) {
    throw ProtocolError("scorer polarity " + it->dump() + " outside [-1, 1]");
  }
  return {p, PolaritySource::External};
}

std::vector<TranscriptEntry> load_transcript(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open transcript '" + path + "'");
  std::vector<TranscriptEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TranscriptEntry e;
      e.send = j.at("send").get<std::string>();
      e.expect_id = j.at("id").get<std::uint64_t>();
      e.expect_error = j.at("expect").get<std::string>() == "error";
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception&) {
      throw FormatError("malformed transcript entry", line_no);
    }
  }
  return out;
}

std::vector<ConformanceResult> check_conformance(LineChannel& channel,
                                                 const std::vector<TranscriptEntry>& transcript,
                                                 std::chrono::milliseconds timeout) {
  std::vector<ConformanceResult> results;
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    const auto& e = transcript[i];
    ConformanceResult r;
    r.index = i;
    try {
      channel.write_line(e.send);
      r.response = channel.read_line(timeout);
      const auto j = nlohmann::json::parse(r.response);
      if (!j.is_object()) {
        r.problem = "response is not an object";
      } else if (!j.contains("id") || !j["id"].is_number_unsigned() ||
                 j["id"].get<std::uint64_t>() != e.expect_id) {
        r.problem = "expected id " + std::to_string(e.expect_id);
      } else if (e.expect_error) {
        if (!j.contains("error") || !j["error"].is_string()) r.problem = "expected an error member";
      } else if (!j.contains("polarity") || !j["polarity"].is_number()) {
        r.problem = "expected a polarity member";
      } else {
        const double p = j["polarity"].get<double>();
        if (!(p >= -1.0 && p <= 1.0)) r.problem = "polarity outside [-1, 1]";
      }
    } catch (const nlohmann::json::exception&) {
      r.problem = "response is not JSON";
    } catch (const Error& err) {
      r.problem = err.what();
    }
    r.passed = r.problem.empty();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace sshape
