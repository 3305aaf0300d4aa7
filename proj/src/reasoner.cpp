#include <algorithm>
#include <cstdlib>
#include <regex>
#include <set>

#include <httplib.h>

#include "corename/reasoner.hpp"

namespace corename {

void to_json(json& j, const Suggestion& s) {
  j = json{{"identifier_name", s.identifier_name},
           {"identifier_type", to_string(s.identifier_type)},
           {"new_name", s.new_name},
           {"line_number", s.line_number}};
  if (s.confidence) j["confidence"] = *s.confidence;
}

void from_json(const json& j, Suggestion& s) {
  s = Suggestion{};
  j.at("identifier_name").get_to(s.identifier_name);
  auto kind = parse_decl_kind(j.at("identifier_type").get<std::string>());
  if (!kind) throw json::other_error::create(501, "unknown identifier_type", &j);
  s.identifier_type = *kind;
  j.at("new_name").get_to(s.new_name);
  j.at("line_number").get_to(s.line_number);
  if (j.contains("confidence") && !j["confidence"].is_null()) {
    double c = j["confidence"].get<double>();
    if (c < 0.0 || c > 1.0) throw json::other_error::create(501, "confidence out of range", &j);
    s.confidence = c;
  }
}

// ─── Deterministic reasoner ────────────────────────────────────

namespace {

std::string regex_escape(std::string_view text) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : text) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

bool excluded_by(const std::vector<GuardAtom>& atoms, const DeclFacts& d) {
  return std::all_of(atoms.begin(), atoms.end(), [&](const GuardAtom& a) { return a.holds(d); });
}

bool separates(const std::vector<GuardAtom>& atoms, const DeclFacts& rejected, const std::vector<DeclFacts>& accepted) {
  return excluded_by(atoms, rejected) &&
         std::none_of(accepted.begin(), accepted.end(), [&](const DeclFacts& a) { return excluded_by(atoms, a); });
}

}  // namespace

std::optional<std::vector<GuardAtom>> separating_guard(const DeclFacts& rejected,
                                                       const std::vector<DeclFacts>& accepted) {
  GuardAtom kind{GuardAtom::Kind::ExcludeKind, rejected.kind, Visibility::Public, ""};
  if (rejected.visibility) {
    std::vector<GuardAtom> atoms{{GuardAtom::Kind::ExcludeVisibility, rejected.kind, *rejected.visibility, ""}, kind};
    if (separates(atoms, rejected, accepted)) return atoms;
  }
  GuardAtom name{GuardAtom::Kind::ExcludeNameRegex, rejected.kind, Visibility::Public,
                 "^" + regex_escape(rejected.name) + "$"};
  std::vector<GuardAtom> exact{kind, name};
  if (separates(exact, rejected, accepted)) return exact;
  // Same kind and name accepted elsewhere: confine to the accepted items' directory.
  std::set<std::string> dirs;
  for (const DeclFacts& a : accepted)
    if (excluded_by(exact, a)) dirs.insert(ProjectLayout::dir_of(a.file));
  if (dirs.size() == 1) {
    std::vector<GuardAtom> scoped{kind, name, {GuardAtom::Kind::RestrictDir, rejected.kind, Visibility::Public, *dirs.begin()}};
    if (!dirs.begin()->empty() && separates(scoped, rejected, accepted)) return scoped;
  }
  return std::nullopt;
}

DeclaredScope DeterministicReasoner::infer_scope(const RenameRefactoring& seed, const std::string&) {
  count_call();
  DeclaredScope d;
  d.pattern = extract_pattern(seed.old_name, seed.new_name);
  d.rationale = "realign " + d.pattern.display();
  return d;
}

std::vector<Suggestion> DeterministicReasoner::find_candidates(const CodeModel& model, const std::string& file,
                                                               const DeclaredScope& scope,
                                                               const std::vector<Shot>&) {
  count_call();
  std::vector<Suggestion> out;
  for (DeclId id : model.declarations_in(file)) {
    const Declaration& d = model.decl(id);
    auto next = apply_pattern(scope.pattern, d.name);
    if (!next || !scope.admits(facts_of(d))) continue;
    out.push_back({d.name, d.kind, *next, d.line, std::nullopt});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Suggestion& a, const Suggestion& b) { return a.line_number < b.line_number; });
  return out;
}

RefineProposal DeterministicReasoner::refine_guards(const DeclaredScope& scope,
                                                    const std::vector<ReviewRecord>& reviews) {
  count_call();
  RefineProposal out{scope, {}};
  std::vector<DeclFacts> accepted;
  for (const ReviewRecord& r : reviews)
    if (r.accepted) accepted.push_back(r.facts);
  for (const ReviewRecord& r : reviews) {
    if (r.accepted || !out.scope.admits(r.facts)) continue;
    bool advised = std::any_of(out.scope.guards.begin(), out.scope.guards.end(), [&](const Guard& g) {
      return g.advisory() && g.description.find("'" + r.facts.name + "'") != std::string::npos;
    });
    if (auto atoms = separating_guard(r.facts, accepted)) {
      out.scope.guards.push_back({out.scope.next_guard_id(), describe_atoms(*atoms), *atoms});
    } else if (!advised) {
      out.scope.guards.push_back({out.scope.next_guard_id(),
                                  "avoid renames like '" + r.facts.name + "' (conflicting feedback)", std::nullopt});
      out.warnings.push_back("rejection of '" + r.facts.name +
                             "' cannot be separated from accepted renames; recorded as advisory guard");
    }
  }
  return out;
}

bool DeterministicReasoner::filter_file(const CodeModel& model, const std::string& file, const DeclaredScope& scope) {
  count_call();
  return !scope_domain_in(model, scope, file).empty();
}

// ─── External reasoner ─────────────────────────────────────────

ExternalConfig external_config_from_env() {
  ExternalConfig c;
  if (const char* url = std::getenv("CORENAME_REASONER_URL")) c.url = url;
  if (const char* token = std::getenv("CORENAME_REASONER_TOKEN")) c.token = token;
  return c;
}

ExternalReasoner::ExternalReasoner(ExternalConfig config) : config_(std::move(config)) {
  if (config_.transcript_path) transcript_.emplace(*config_.transcript_path, std::ios::binary | std::ios::app);
}

ExternalReasoner::~ExternalReasoner() = default;

namespace {

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

Endpoint split_url(const std::string& url) {
  auto scheme = url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

bool is_kind(const json& j) { return j.is_string() && parse_decl_kind(j.get<std::string>()).has_value(); }

bool valid_suggestions(const json& p) {
  if (!p.is_object() || !p.contains("suggestions") || !p["suggestions"].is_array()) return false;
  for (const json& s : p["suggestions"]) {
    if (!s.is_object() || !s.contains("identifier_name") || !s["identifier_name"].is_string() ||
        !s.contains("identifier_type") || !is_kind(s["identifier_type"]) || !s.contains("new_name") ||
        !s["new_name"].is_string() || !s.contains("line_number") || !s["line_number"].is_number_integer())
      return false;
    if (s.contains("confidence") && !s["confidence"].is_null()) {
      if (!s["confidence"].is_number()) return false;
      double c = s["confidence"].get<double>();
      if (c < 0.0 || c > 1.0) return false;
    }
  }
  return true;
}

bool valid_pattern(const json& p) {
  return p.is_object() && p.contains("old") && p["old"].is_string() && p.contains("new") && p["new"].is_string() &&
         !p["old"].get<std::string>().empty() && !p["new"].get<std::string>().empty();
}

bool valid_guards(const json& g) {
  if (!g.is_array()) return false;
  try {
    (void)g.get<std::vector<Guard>>();
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::optional<json> ExternalReasoner::exchange(const std::string& role, const json& payload,
                                               const std::function<bool(const json&)>& valid) {
  std::lock_guard lock(mu_);
  count_call();
  if (config_.url.empty()) throw ReasonerUnavailable("no reasoner endpoint configured");
  Endpoint ep = split_url(config_.url);
  httplib::Client client(ep.base);
  client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));
  httplib::Headers headers;
  if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
  std::string body = json{{"role", role}, {"payload", payload}}.dump() + "\n";

  for (int attempt = 0; attempt < 2; ++attempt) {
    auto res = client.Post(ep.path, headers, body, "application/x-ndjson");
    if (!res) throw ReasonerUnavailable("reasoner endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status >= 500 || res->status == 401 || res->status == 403)
      throw ReasonerUnavailable("reasoner endpoint returned HTTP " + std::to_string(res->status));
    if (transcript_) {
      *transcript_ << json{{"attempt", attempt}, {"request", json::parse(body)}, {"status", res->status},
                           {"response", res->body}}
                          .dump()
                   << '\n';
      transcript_->flush();
    }
    // The first non-empty line carries the response record.
    std::string line;
    std::istringstream in(res->body);
    while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
    }
    json parsed = json::parse(line, nullptr, false);
    if (res->status == 200 && !parsed.is_discarded() && parsed.is_object() && parsed.value("role", "") == role &&
        parsed.contains("payload") && valid(parsed["payload"]))
      return parsed["payload"];
    ++schema_failures_;
  }
  return std::nullopt;
}

DeclaredScope ExternalReasoner::infer_scope(const RenameRefactoring& seed, const std::string& context) {
  auto payload = exchange("infer_scope", json{{"seed", seed}, {"context", context}}, [](const json& p) {
    return p.is_object() && p.contains("pattern") && valid_pattern(p["pattern"]) &&
           (!p.contains("rationale") || p["rationale"].is_string());
  });
  DeclaredScope d;
  if (!payload) return d;  // empty pattern fails the round trip and triggers the fallback extractor
  d.pattern = make_pattern((*payload)["pattern"]["old"].get<std::string>(), (*payload)["pattern"]["new"].get<std::string>());
  d.rationale = payload->value("rationale", "");
  return d;
}

std::vector<Suggestion> ExternalReasoner::find_candidates(const CodeModel& model, const std::string& file,
                                                          const DeclaredScope& scope, const std::vector<Shot>& shots) {
  json js = json::array();
  for (const Shot& s : shots)
    js.push_back(json{{"snippet", s.snippet}, {"decision", s.accepted ? 1 : 0}, {"rename", s.rename}});
  const SourceFile* src = model.layout().find(file);
  auto payload = exchange("find_candidates",
                          json{{"file", file}, {"text", src ? src->text : ""}, {"scope", scope}, {"shots", js}},
                          valid_suggestions);
  if (!payload) return {};
  return (*payload)["suggestions"].get<std::vector<Suggestion>>();
}

RefineProposal ExternalReasoner::refine_guards(const DeclaredScope& scope, const std::vector<ReviewRecord>& reviews) {
  auto payload = exchange("refine_guards", json{{"scope", scope}, {"reviews", reviews}}, [](const json& p) {
    return p.is_object() && p.contains("guards") && valid_guards(p["guards"]) &&
           (!p.contains("pattern") || valid_pattern(p["pattern"])) &&
           (!p.contains("rationale") || p["rationale"].is_string());
  });
  RefineProposal out{scope, {}};
  if (!payload) {
    out.warnings.push_back("reasoner returned no usable refinement");
    return out;
  }
  out.scope.guards = (*payload)["guards"].get<std::vector<Guard>>();
  if (payload->contains("pattern"))
    out.scope.pattern = make_pattern((*payload)["pattern"]["old"].get<std::string>(),
                                     (*payload)["pattern"]["new"].get<std::string>());
  if (payload->contains("rationale")) out.scope.rationale = (*payload)["rationale"].get<std::string>();
  return out;
}

bool ExternalReasoner::filter_file(const CodeModel& model, const std::string& file, const DeclaredScope& scope) {
  const SourceFile* src = model.layout().find(file);
  auto payload = exchange("filter_file", json{{"file", file}, {"text", src ? src->text : ""}, {"scope", scope}},
                          [](const json& p) { return p.is_object() && p.contains("replicate") && p["replicate"].is_boolean(); });
  return payload && (*payload)["replicate"].get<bool>();
}

// ─── Fallback ──────────────────────────────────────────────────

FallbackReasoner::FallbackReasoner(std::unique_ptr<Reasoner> primary, std::unique_ptr<Reasoner> fallback,
                                   std::function<void(const std::string&)> on_fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)), on_fallback_(std::move(on_fallback)) {}

std::string FallbackReasoner::name() const {
  return degraded_ ? primary_->name() + "->" + fallback_->name() : primary_->name();
}

template <class F>
auto FallbackReasoner::call(F&& f) {
  count_call();
  if (!degraded_) {
    try {
      return f(*primary_);
    } catch (const ReasonerUnavailable& e) {
      std::lock_guard lock(mu_);
      if (!degraded_.exchange(true) && on_fallback_) on_fallback_(e.what());
    }
  }
  return f(*fallback_);
}

DeclaredScope FallbackReasoner::infer_scope(const RenameRefactoring& seed, const std::string& context) {
  return call([&](Reasoner& r) { return r.infer_scope(seed, context); });
}

std::vector<Suggestion> FallbackReasoner::find_candidates(const CodeModel& model, const std::string& file,
                                                          const DeclaredScope& scope, const std::vector<Shot>& shots) {
  return call([&](Reasoner& r) { return r.find_candidates(model, file, scope, shots); });
}

RefineProposal FallbackReasoner::refine_guards(const DeclaredScope& scope, const std::vector<ReviewRecord>& reviews) {
  return call([&](Reasoner& r) { return r.refine_guards(scope, reviews); });
}

bool FallbackReasoner::filter_file(const CodeModel& model, const std::string& file, const DeclaredScope& scope) {
  return call([&](Reasoner& r) { return r.filter_file(model, file, scope); });
}

// ─── Validation wrapper ────────────────────────────────────────

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::NotFound: return "not_found";
    case DropReason::ForeignDeclaration: return "foreign_declaration";
    case DropReason::PreconditionViolation: return "precondition_violation";
    case DropReason::Duplicate: return "duplicate";
    case DropReason::AlreadyRenamed: return "already_renamed";
  }
  return "?";
}

Validation validate(const std::vector<Suggestion>& suggestions, const CodeModel& model, const std::string& file,
                    const DeclaredScope* scope, const PreconditionCheck& check) {
  Validation out;
  std::set<DeclId> seen;
  for (const Suggestion& s : suggestions) {
    auto matches = resolve_identifier(model, s.identifier_name, file, s.line_number, s.identifier_type);
    const Declaration* local = nullptr;
    for (const Declaration* d : matches) {
      if (d->file == file) {
        local = d;
        break;
      }
    }
    if (!local) {
      if (matches.empty()) out.dropped.push_back({s, DropReason::NotFound, "no declaration named '" + s.identifier_name + "'"});
      else
        out.dropped.push_back({s, DropReason::ForeignDeclaration,
                               "'" + s.identifier_name + "' is declared in " + matches.front()->file});
      continue;
    }
    RenameRefactoring r{file, local->name, s.new_name, local->line, local->kind};
    DeclId key = model.canonical(local->id);
    if (seen.count(key)) {
      out.dropped.push_back({s, DropReason::Duplicate, "declaration already suggested in this batch"});
      continue;
    }
    PreconditionReport rep = check ? check(r) : check_preconditions(model, r);
    if (!rep.ok()) {
      std::string why;
      for (const Violation& v : rep.violations) why += (why.empty() ? "" : "; ") + v.message;
      out.dropped.push_back({s, DropReason::PreconditionViolation, why});
      continue;
    }
    seen.insert(key);
    ValidatedRename v{r, local->id, rep.group, false, s};
    if (scope) {
      auto expected = apply_pattern(scope->pattern, local->name);
      v.pattern_mismatch = !expected || *expected != s.new_name;
    }
    out.valid.push_back(std::move(v));
  }
  return out;
}

Suggestion as_suggestion(const ValidatedRename& v) {
  return {v.rename.old_name, v.rename.identifier_type, v.rename.new_name, v.rename.line_number, v.source.confidence};
}

}  // namespace corename
