#pragma once

// Misbehaving reasoners for termination tests. Each delegates the roles it
// does not override to the deterministic reasoner.

#include <map>
#include <string>
#include <vector>

#include "corename/reasoner.hpp"

namespace stubs {

/// Proposes the same suggestions on every call for a file.
class Repeating : public corename::DeterministicReasoner {
 public:
  std::vector<corename::Suggestion> find_candidates(const corename::CodeModel& model, const std::string& file,
                                                    const corename::DeclaredScope& scope,
                                                    const std::vector<corename::Shot>& shots) override {
    auto hit = cached_.find(file);
    if (hit != cached_.end()) {
      count_call();
      return hit->second;
    }
    return cached_[file] = DeterministicReasoner::find_candidates(model, file, scope, shots);
  }

 private:
  std::map<std::string, std::vector<corename::Suggestion>> cached_;
};

/// Returns a fresh, never-before-seen new name for every declaration of the file on every call.
class EverGrowing : public corename::DeterministicReasoner {
 public:
  std::vector<corename::Suggestion> find_candidates(const corename::CodeModel& model, const std::string& file,
                                                    const corename::DeclaredScope&,
                                                    const std::vector<corename::Shot>&) override {
    count_call();
    std::vector<corename::Suggestion> out;
    for (const corename::Declaration& d : model.declarations())
      if (d.file == file) out.push_back({d.name, d.kind, d.name + "V" + std::to_string(++counter_), d.line, {}});
    return out;
  }
  /// Every file looks relevant.
  bool filter_file(const corename::CodeModel&, const std::string&, const corename::DeclaredScope&) override {
    count_call();
    return true;
  }

 private:
  int counter_ = 0;
};

/// Suggestions that never resolve, so every one is a tool failure.
class AlwaysFailing : public corename::DeterministicReasoner {
 public:
  std::vector<corename::Suggestion> find_candidates(const corename::CodeModel&, const std::string&,
                                                    const corename::DeclaredScope&,
                                                    const std::vector<corename::Shot>&) override {
    count_call();
    std::vector<corename::Suggestion> out;
    for (int i = 0; i < 3; ++i)
      out.push_back({"noSuchName" + std::to_string(++counter_), corename::DeclKind::LocalVariable, "other", 1, {}});
    return out;
  }

 private:
  int counter_ = 0;
};

/// Never proposes anything.
class Empty : public corename::DeterministicReasoner {
 public:
  std::vector<corename::Suggestion> find_candidates(const corename::CodeModel&, const std::string&,
                                                    const corename::DeclaredScope&,
                                                    const std::vector<corename::Shot>&) override {
    count_call();
    return {};
  }
};

}  // namespace stubs
