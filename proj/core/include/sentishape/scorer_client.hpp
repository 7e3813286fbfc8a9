#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sentishape/sentiment.hpp"

namespace sshape {

// Longest line, newline excluded, either side may put on the wire.
inline constexpr std::size_t kMaxProtocolLine = 64 * 1024;

// A bidirectional newline-delimited text stream.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void write_line(std::string_view line) = 0;
  // Throws ScorerUnavailable on timeout or EOF, ProtocolError on an
  // over-long line.
  virtual std::string read_line(std::chrono::milliseconds timeout) = 0;
};

// "host:port" connects over TCP; "stdio:<shell command>" spawns the command
// and talks to its stdin/stdout.
std::unique_ptr<LineChannel> open_channel(std::string_view endpoint,
                                          std::chrono::milliseconds timeout);

// Client side of the scorer wire protocol:
//   request  {"id": <unsigned>, "text": <string>}
//   response {"id": <same>, "polarity": <real in [-1,1]>} | {"id": <same>, "error": <string>}
// One outstanding request per connection; not safe for concurrent callers.
class ExternalScorer final : public Scorer {
 public:
  explicit ExternalScorer(std::string endpoint,
                          std::chrono::milliseconds timeout = std::chrono::seconds(5));
  // Takes an already-open channel (tests, in-process servers). Such a
  // scorer cannot reconnect after a failure.
  ExternalScorer(std::unique_ptr<LineChannel> channel, std::chrono::milliseconds timeout);

  // Throws ScorerUnavailable or ProtocolError.
  PolarityScore score(std::string_view text) override;

  std::uint64_t requests_sent() const noexcept { return next_id_ - 1; }

 private:
  LineChannel& channel();

  std::string endpoint_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<LineChannel> channel_;
  std::uint64_t next_id_ = 1;
};

// One entry of a golden protocol transcript: a raw request line and the
// response shape it must draw.
struct TranscriptEntry {
  std::string send;
  std::uint64_t expect_id = 0;
  bool expect_error = false;
};

struct ConformanceResult {
  std::size_t index = 0;
  bool passed = false;
  std::string response;
  std::string problem;
};

std::vector<TranscriptEntry> load_transcript(const std::string& path);
// Replays the transcript over `channel`, one request at a time.
std::vector<ConformanceResult> check_conformance(LineChannel& channel,
                                                 const std::vector<TranscriptEntry>& transcript,
                                                 std::chrono::milliseconds timeout);

}  // namespace sshape
