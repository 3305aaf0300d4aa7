#pragma once

#include <fstream>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "corename/rename.hpp"
#include "corename/scope.hpp"
#include "corename/serialize.hpp"

namespace corename {

class SessionClosed : public std::runtime_error {
 public:
  SessionClosed() : std::runtime_error("episodic memory is closed") {}
};

class NoScope : public std::runtime_error {
 public:
  NoScope() : std::runtime_error("no scope recorded yet") {}
};

struct ReviewRecord {
  RenameRefactoring rename;
  bool accepted = false;
  std::string snippet;  // declaration line at review time
  DeclFacts facts;      // declaration attributes at review time
  std::optional<std::uint32_t> decl_id;
};

struct EpisodicRecord {
  enum class Tag { Scope, Review };
  int seq = 0;
  Tag tag = Tag::Review;
  int timestamp = 0;  // logical clock, equal to seq
  std::optional<DeclaredScope> scope;
  std::optional<ReviewRecord> review;
};

enum class ReviewFilter { Accepted, Rejected, All };

struct Shot {
  std::string snippet;
  bool accepted = false;
  RenameRefactoring rename;
};

void to_json(json& j, const ReviewRecord& r);
void from_json(const json& j, ReviewRecord& r);
void to_json(json& j, const EpisodicRecord& r);
void from_json(const json& j, EpisodicRecord& r);

/// Session-lifetime, append-only store of scope revisions and review decisions.
/// With a log path every record is written as one JSON line before append returns.
class EpisodicMemory {
 public:
  explicit EpisodicMemory(std::optional<std::string> log_path = std::nullopt);
  EpisodicMemory(const EpisodicMemory&) = delete;
  EpisodicMemory& operator=(const EpisodicMemory&) = delete;

  int append_scope(const DeclaredScope& scope);
  int append_review(ReviewRecord review);
  void close();
  bool closed() const;

  std::vector<EpisodicRecord> records() const;
  std::vector<ReviewRecord> reviews(ReviewFilter filter = ReviewFilter::All) const;
  /// Highest-revision scope. Throws NoScope.
  DeclaredScope current_scope() const;
  std::vector<DeclaredScope> scope_history() const;
  /// Most recent `per_side` accepted and rejected reviews, most recent first.
  std::vector<Shot> shots(std::size_t per_side = 4) const;
  /// Rejections appended after the latest scope record.
  std::vector<ReviewRecord> rejections_since_scope() const;
  std::size_t size() const;

  /// Reads records from a JSONL log (replay).
  static std::vector<EpisodicRecord> load(const std::string& path);

 private:
  int append(EpisodicRecord record);

  mutable std::shared_mutex mu_;
  std::vector<EpisodicRecord> records_;
  std::optional<std::ofstream> log_;
  bool closed_ = false;
};

}  // namespace corename
