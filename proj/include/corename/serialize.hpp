#pragma once

#include <json.hpp>

#include "corename/refactor.hpp"
#include "corename/rename.hpp"
#include "corename/scope.hpp"

namespace corename {

using json = nlohmann::json;

void to_json(json& j, const RenameRefactoring& r);
void from_json(const json& j, RenameRefactoring& r);
void to_json(json& j, const DeclFacts& d);
void from_json(const json& j, DeclFacts& d);
void to_json(json& j, const NamePattern& p);
void from_json(const json& j, NamePattern& p);
void to_json(json& j, const GuardAtom& a);
void from_json(const json& j, GuardAtom& a);
void to_json(json& j, const Guard& g);
void from_json(const json& j, Guard& g);
void to_json(json& j, const DeclaredScope& s);
void from_json(const json& j, DeclaredScope& s);
void to_json(json& j, const CommentEdit& e);
void to_json(json& j, const ChangeSet& c);
void to_json(json& j, const Violation& v);

}  // namespace corename
