#pragma once

// Post-session safety checks: the final sources parse from scratch, every
// declaration carries its expected name, and every reference still binds to
// the same declaration and spells its current name.

#include <map>
#include <string>
#include <vector>

#include "corename/refactor.hpp"

namespace safety {

std::vector<std::string> check_closure(const corename::CodeModel& initial,
                                       const std::map<std::string, std::string>& final_texts,
                                       const corename::ChangeSet& changes);

std::map<std::string, std::string> texts_of(const corename::CodeModel& model);

}  // namespace safety
