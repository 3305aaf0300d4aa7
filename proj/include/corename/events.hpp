#pragma once

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "corename/serialize.hpp"

namespace corename {

struct SessionEvent {
  int seq = 0;
  std::string type;
  json data;
};

void to_json(json& j, const SessionEvent& e);
void from_json(const json& j, SessionEvent& e);

/// Ordered, append-only session event stream. Events carry no wall-clock
/// data so that deterministic sessions produce byte-identical logs.
class EventLog {
 public:
  explicit EventLog(std::optional<std::string> path = std::nullopt);

  int emit(std::string type, json data = json::object());
  std::vector<SessionEvent> events() const;
  /// Events with seq > `after`; blocks up to `timeout` when none are available yet.
  std::vector<SessionEvent> wait_after(int after, std::chrono::milliseconds timeout) const;
  void close();
  bool closed() const;
  /// One JSON object per line, as written to disk.
  std::string serialize() const;

  static std::vector<SessionEvent> load(const std::string& path);

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<SessionEvent> events_;
  std::optional<std::ofstream> out_;
  bool closed_ = false;
};

struct LogViolation {
  int seq = 0;
  std::string message;
};

/// Checks that an event sequence follows the session algorithm: seed accept,
/// then scope revision 0, then per-file plans whose reviews precede applies,
/// refinement exactly when a rejection occurred, discovery after each file,
/// and enqueues only from discovery. Returns all violations found.
std::vector<LogViolation> validate_event_log(const std::vector<SessionEvent>& events);

}  // namespace corename
