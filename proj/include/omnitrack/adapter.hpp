#pragma once

// Local tracker adapters.
//
// Wire protocol over the adapter's stdin/stdout. Control messages are
// single-line JSON objects; image payloads are raw PNG bytes that follow the
// line that announces them.
//
//   -> {"type":"hello","version":1}
//   <- {"type":"ready","name":"..."}
//   -> {"type":"init","width":W,"height":H,"bbox":[cx,cy,w,h,gamma_deg],"image_bytes":N} + N bytes
//   <- {"type":"ok"}
//   -> {"type":"track","width":W,"height":H,"image_bytes":N} + N bytes
//   <- {"type":"result","bbox":[cx,cy,w,h,gamma_deg],"score":s}
//   -> {"type":"bye"}

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "omnitrack/annotations.hpp"
#include "omnitrack/image.hpp"

namespace omni {

inline constexpr int kProtocolVersion = 1;

struct TrackResult {
  Bbox box;  // local pixels, gamma in radians
  double score = 0.0;
};

class TrackerAdapter {
 public:
  virtual ~TrackerAdapter() = default;
  /// Handshake; returns the adapter name.
  virtual std::string hello() = 0;
  virtual void init(const Image& local, const Bbox& box) = 0;
  virtual TrackResult track(const Image& local) = 0;
  virtual void close() {}
};

/// Adapter running as a child process via `/bin/sh -c command`.
/// Every exchange is bounded by `timeout`; a crash, timeout or malformed
/// reply raises AdapterError and leaves the adapter unusable.
class ProcessAdapter final : public TrackerAdapter {
 public:
  ProcessAdapter(std::string command, std::chrono::milliseconds timeout = std::chrono::seconds(30),
                 std::map<std::string, std::string> env = {});
  ~ProcessAdapter() override;
  ProcessAdapter(const ProcessAdapter&) = delete;
  ProcessAdapter& operator=(const ProcessAdapter&) = delete;

  std::string hello() override;
  void init(const Image& local, const Bbox& box) override;
  TrackResult track(const Image& local) override;
  void close() override;

  bool alive() const { return pid_ > 0 && !broken_; }

 private:
  void send(const nlohmann::json& msg, const std::vector<std::uint8_t>* payload = nullptr);
  nlohmann::json receive(const char* expected_type);
  [[noreturn]] void fail(const std::string& why);
  void kill_child();

  std::string command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int pgid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool broken_ = false;
  std::string buffer_;
};

// Helpers for adapter implementations (the child side).

/// Reads one control line; nullopt at end of input. Throws AdapterError on
/// malformed JSON.
std::optional<nlohmann::json> read_message(std::istream& in);
std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t n);
void write_message(std::ostream& out, const nlohmann::json& msg);

nlohmann::json bbox_to_json(const Bbox& b);
Bbox bbox_from_json(const nlohmann::json& j);

}  // namespace omni
