#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corename/rename.hpp"
#include "corename/serialize.hpp"

namespace corename {

/// One validated rename presented for a decision.
struct ReviewItem {
  int id = 0;
  RenameRefactoring rename;
  std::uint32_t decl_id = 0;
  std::uint32_t canonical_id = 0;  // override-group representative
  int group_size = 1;
  bool pattern_mismatch = false;
  std::string snippet;               // declaration line
  int context_start = 1;             // line number of context[0]
  std::vector<std::string> context;  // up to 5 lines either side
  int highlight_begin = 0;           // column range of the name on the declaration line
  int highlight_end = 0;
};

struct ReviewBatch {
  std::string file;
  int iteration = 0;
  std::vector<ReviewItem> items;  // ordered by line
};

void to_json(json& j, const ReviewItem& item);
void to_json(json& j, const ReviewBatch& batch);

class FeedbackAborted : public std::runtime_error {
 public:
  FeedbackAborted() : std::runtime_error("review aborted") {}
};

/// h(r): one accept/reject bit per item, in batch order. May throw FeedbackAborted.
class FeedbackSource {
 public:
  virtual ~FeedbackSource() = default;
  virtual std::string name() const = 0;
  virtual std::vector<bool> review(const ReviewBatch& batch) = 0;
};

class AutoAcceptFeedback : public FeedbackSource {
 public:
  std::string name() const override { return "auto_accept"; }
  std::vector<bool> review(const ReviewBatch& batch) override { return std::vector<bool>(batch.items.size(), true); }
};

/// Decides each item with a callback; used by tests and scripted runs.
class ScriptedFeedback : public FeedbackSource {
 public:
  explicit ScriptedFeedback(std::function<bool(const ReviewItem&)> decide) : decide_(std::move(decide)) {}
  std::string name() const override { return "scripted"; }
  std::vector<bool> review(const ReviewBatch& batch) override {
    std::vector<bool> out;
    for (const ReviewItem& item : batch.items) out.push_back(decide_(item));
    return out;
  }

 private:
  std::function<bool(const ReviewItem&)> decide_;
};

}  // namespace corename
