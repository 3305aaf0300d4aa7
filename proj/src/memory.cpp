#include <algorithm>
#include <mutex>

#include "corename/memory.hpp"

namespace corename {

void to_json(json& j, const ReviewRecord& r) {
  j = json{{"rename", r.rename}, {"decision", r.accepted ? 1 : 0}, {"snippet", r.snippet}, {"facts", r.facts}};
  j["decl_id"] = r.decl_id ? json(*r.decl_id) : json(nullptr);
}

void from_json(const json& j, ReviewRecord& r) {
  j.at("rename").get_to(r.rename);
  r.accepted = j.at("decision").get<int>() == 1;
  j.at("snippet").get_to(r.snippet);
  j.at("facts").get_to(r.facts);
  if (j.contains("decl_id") && !j["decl_id"].is_null()) r.decl_id = j["decl_id"].get<std::uint32_t>();
}

void to_json(json& j, const EpisodicRecord& r) {
  j = json{{"seq", r.seq}, {"tag", r.tag == EpisodicRecord::Tag::Scope ? "scope" : "review"}, {"ts", r.timestamp}};
  if (r.scope) j["payload"] = *r.scope;
  if (r.review) j["payload"] = *r.review;
}

void from_json(const json& j, EpisodicRecord& r) {
  r = EpisodicRecord{};
  j.at("seq").get_to(r.seq);
  j.at("ts").get_to(r.timestamp);
  if (j.at("tag").get<std::string>() == "scope") {
    r.tag = EpisodicRecord::Tag::Scope;
    r.scope = j.at("payload").get<DeclaredScope>();
  } else {
    r.tag = EpisodicRecord::Tag::Review;
    r.review = j.at("payload").get<ReviewRecord>();
  }
}

EpisodicMemory::EpisodicMemory(std::optional<std::string> log_path) {
  if (log_path) {
    log_.emplace(*log_path, std::ios::binary | std::ios::trunc);
    if (!*log_) throw std::runtime_error("cannot open memory log " + *log_path);
  }
}

int EpisodicMemory::append(EpisodicRecord record) {
  std::unique_lock lock(mu_);
  if (closed_) throw SessionClosed();
  record.seq = static_cast<int>(records_.size()) + 1;
  record.timestamp = record.seq;
  if (log_) {
    *log_ << json(record).dump() << '\n';
    log_->flush();
  }
  records_.push_back(std::move(record));
  return records_.back().seq;
}

int EpisodicMemory::append_scope(const DeclaredScope& scope) {
  EpisodicRecord r;
  r.tag = EpisodicRecord::Tag::Scope;
  r.scope = scope;
  return append(std::move(r));
}

int EpisodicMemory::append_review(ReviewRecord review) {
  EpisodicRecord r;
  r.tag = EpisodicRecord::Tag::Review;
  r.review = std::move(review);
  return append(std::move(r));
}

void EpisodicMemory::close() {
  std::unique_lock lock(mu_);
  closed_ = true;
  if (log_) log_->close();
}

bool EpisodicMemory::closed() const {
  std::shared_lock lock(mu_);
  return closed_;
}

std::vector<EpisodicRecord> EpisodicMemory::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

std::size_t EpisodicMemory::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::vector<ReviewRecord> EpisodicMemory::reviews(ReviewFilter filter) const {
  std::shared_lock lock(mu_);
  std::vector<ReviewRecord> out;
  for (const EpisodicRecord& r : records_) {
    if (!r.review) continue;
    if (filter == ReviewFilter::Accepted && !r.review->accepted) continue;
    if (filter == ReviewFilter::Rejected && r.review->accepted) continue;
    out.push_back(*r.review);
  }
  return out;
}

DeclaredScope EpisodicMemory::current_scope() const {
  std::shared_lock lock(mu_);
  const DeclaredScope* best = nullptr;
  for (const EpisodicRecord& r : records_)
    if (r.scope && (!best || r.scope->revision >= best->revision)) best = &*r.scope;
  if (!best) throw NoScope();
  return *best;
}

std::vector<DeclaredScope> EpisodicMemory::scope_history() const {
  std::shared_lock lock(mu_);
  std::vector<DeclaredScope> out;
  for (const EpisodicRecord& r : records_)
    if (r.scope) out.push_back(*r.scope);
  return out;
}

std::vector<Shot> EpisodicMemory::shots(std::size_t per_side) const {
  std::shared_lock lock(mu_);
  std::vector<Shot> pos, neg;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (!it->review) continue;
    auto& side = it->review->accepted ? pos : neg;
    if (side.size() < per_side) side.push_back({it->review->snippet, it->review->accepted, it->review->rename});
  }
  pos.insert(pos.end(), neg.begin(), neg.end());
  return pos;
}

std::vector<ReviewRecord> EpisodicMemory::rejections_since_scope() const {
  std::shared_lock lock(mu_);
  std::vector<ReviewRecord> out;
  for (auto it = records_.rbegin(); it != records_.rend() && !it->scope; ++it)
    if (it->review && !it->review->accepted) out.push_back(*it->review);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<EpisodicRecord> EpisodicMemory::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read memory log " + path);
  std::vector<EpisodicRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line).get<EpisodicRecord>());
  return out;
}

}  // namespace corename
