#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "corename/reasoner.hpp"
#include "corename/scope_agent.hpp"

using namespace corename;
namespace fs = std::filesystem;

namespace {

CodeModel shop() {
  return parse_texts(".", {{"src/shop/Order.mini",
                            "public class Order {\n"
                            "  private field int orderTotal = 0;\n"
                            "  public method int orderSize(int orderCount) {\n"
                            "    var int orderLimit = orderCount + orderTotal;\n"
                            "    return orderLimit;\n"
                            "  }\n"
                            "  public method int getOrderTotal() {\n"
                            "    return orderTotal;\n"
                            "  }\n"
                            "}\n"},
                           {"src/shop/Cart.mini",
                            "public class Cart {\n"
                            "  private field Order current = new Order();\n"
                            "  public method int size() {\n"
                            "    return current.orderSize(2);\n"
                            "  }\n"
                            "}\n"}});
}

const std::string kOrder = "src/shop/Order.mini";

DeclaredScope order_scope() {
  DeclaredScope s;
  s.pattern = make_pattern("order", "purchase");
  return s;
}

}  // namespace

TEST(Validate, CorrectsLineAndKind) {
  CodeModel m = shop();
  Validation v = validate({{"orderLimit", DeclKind::Field, "purchaseLimit", 9, {}}}, m, kOrder);
  ASSERT_EQ(v.valid.size(), 1u);
  EXPECT_EQ(v.valid[0].rename.line_number, 4);
  EXPECT_EQ(v.valid[0].rename.identifier_type, DeclKind::LocalVariable);
  EXPECT_TRUE(v.dropped.empty());
}

TEST(Validate, DropReasons) {
  CodeModel m = shop();
  Validation v = validate({{"noSuch", DeclKind::Field, "x", 1, {}},
                           {"orderSize", DeclKind::Method, "purchaseSize", 4, {}},
                           {"orderTotal", DeclKind::Field, "purchaseTotal", 2, {}},
                           {"orderTotal", DeclKind::Field, "otherTotal", 2, {}},
                           {"orderCount", DeclKind::Parameter, "orderLimit", 3, {}}},
                          m, "src/shop/Cart.mini");
  ASSERT_EQ(v.dropped.size(), 5u);
  EXPECT_EQ(v.dropped[0].reason, DropReason::NotFound);
  EXPECT_EQ(v.dropped[1].reason, DropReason::ForeignDeclaration);

  Validation w = validate({{"orderTotal", DeclKind::Field, "purchaseTotal", 2, {}},
                           {"orderTotal", DeclKind::Field, "otherTotal", 2, {}},
                           {"orderCount", DeclKind::Parameter, "orderLimit", 3, {}}},
                          m, kOrder);
  ASSERT_EQ(w.valid.size(), 1u);
  ASSERT_EQ(w.dropped.size(), 2u);
  EXPECT_EQ(w.dropped[0].reason, DropReason::Duplicate);
  EXPECT_EQ(w.dropped[1].reason, DropReason::PreconditionViolation);
}

TEST(Validate, Idempotent) {
  CodeModel m = shop();
  DeclaredScope scope = order_scope();
  std::vector<Suggestion> raw{{"orderTotal", DeclKind::Field, "purchaseTotal", 7, {}},
                              {"orderSize", DeclKind::Method, "wrongName", 1, 0.5},
                              {"orderLimit", DeclKind::LocalVariable, "purchaseLimit", 4, {}}};
  Validation first = validate(raw, m, kOrder, &scope);
  std::vector<Suggestion> again;
  for (const ValidatedRename& v : first.valid) again.push_back(as_suggestion(v));
  Validation second = validate(again, m, kOrder, &scope);
  ASSERT_EQ(first.valid.size(), second.valid.size());
  for (std::size_t i = 0; i < first.valid.size(); ++i) {
    EXPECT_EQ(first.valid[i].rename, second.valid[i].rename);
    EXPECT_EQ(first.valid[i].pattern_mismatch, second.valid[i].pattern_mismatch);
  }
  EXPECT_TRUE(first.valid[1].pattern_mismatch);
  EXPECT_FALSE(first.valid[0].pattern_mismatch);
}

TEST(SeparatingGuard, PrefersKindAndVisibility) {
  DeclFacts getter{DeclKind::Method, Visibility::Public, "src/a/A.mini", "getOrder"};
  DeclFacts field{DeclKind::Field, Visibility::Private, "src/a/A.mini", "order"};
  auto g = separating_guard(getter, {field});
  ASSERT_TRUE(g);
  ASSERT_EQ(g->size(), 2u);
  EXPECT_EQ((*g)[0].kind, GuardAtom::Kind::ExcludeVisibility);
  EXPECT_TRUE(std::all_of(g->begin(), g->end(), [&](const GuardAtom& a) { return a.holds(getter); }));
}

TEST(SeparatingGuard, FallsBackToExactNameThenDirectory) {
  DeclFacts rejected{DeclKind::Method, Visibility::Public, "src/a/A.mini", "getOrder"};
  DeclFacts other{DeclKind::Method, Visibility::Public, "src/a/A.mini", "orderSize"};
  auto g = separating_guard(rejected, {other});
  ASSERT_TRUE(g);
  EXPECT_EQ(g->back().kind, GuardAtom::Kind::ExcludeNameRegex);
  EXPECT_FALSE(std::all_of(g->begin(), g->end(), [&](const GuardAtom& a) { return a.holds(other); }));

  DeclFacts twin{DeclKind::Method, Visibility::Public, "src/b/B.mini", "getOrder"};
  auto scoped = separating_guard(rejected, {twin});
  ASSERT_TRUE(scoped);
  EXPECT_EQ(scoped->back().kind, GuardAtom::Kind::RestrictDir);
  EXPECT_TRUE(std::all_of(scoped->begin(), scoped->end(), [&](const GuardAtom& a) { return a.holds(rejected); }));
  EXPECT_FALSE(std::all_of(scoped->begin(), scoped->end(), [&](const GuardAtom& a) { return a.holds(twin); }));

  DeclFacts same_dir{DeclKind::Method, Visibility::Public, "src/a/A.mini", "getOrder"};
  EXPECT_FALSE(separating_guard(rejected, {same_dir}));
}

TEST(Deterministic, CandidatesFollowPatternAndGuards) {
  CodeModel m = shop();
  DeterministicReasoner r;
  DeclaredScope scope = order_scope();
  auto all = r.find_candidates(m, kOrder, scope, {});
  std::set<std::string> names;
  for (const Suggestion& s : all) names.insert(s.identifier_name);
  EXPECT_EQ(names, (std::set<std::string>{"Order", "orderTotal", "orderSize", "orderCount", "orderLimit", "getOrderTotal"}));

  scope.guards.push_back({1, "", std::vector<GuardAtom>{{GuardAtom::Kind::ExcludeKind, DeclKind::Method, Visibility::Public, ""}}});
  for (const Suggestion& s : r.find_candidates(m, kOrder, scope, {})) EXPECT_NE(s.identifier_type, DeclKind::Method);
  EXPECT_TRUE(r.filter_file(m, kOrder, scope));
  EXPECT_FALSE(r.filter_file(m, "src/shop/Cart.mini", scope));
  EXPECT_EQ(r.calls(), 4);
}

// ─── External reasoner over HTTP ───────────────────────────────

namespace {

/// Local endpoint answering with queued bodies (or status codes) and recording requests.
struct StubEndpoint {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::mutex mu;
  std::deque<std::pair<int, std::string>> replies;
  std::vector<json> requests;
  std::vector<std::string> auth;

  StubEndpoint() {
    server.Post("/reason", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      requests.push_back(json::parse(req.body));
      auth.push_back(req.get_header_value("Authorization"));
      auto [status, body] = replies.empty() ? std::pair<int, std::string>{200, "{}"} : replies.front();
      if (!replies.empty()) replies.pop_front();
      res.status = status;
      res.set_content(body, "application/x-ndjson");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubEndpoint() {
    server.stop();
    thread.join();
  }
  void reply(int status, const json& body) {
    std::lock_guard lock(mu);
    replies.emplace_back(status, body.dump() + "\n");
  }
  void reply_raw(int status, std::string body) {
    std::lock_guard lock(mu);
    replies.emplace_back(status, std::move(body));
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/reason"; }
};

}  // namespace

TEST(External, FindCandidatesRoundTrip) {
  StubEndpoint stub;
  stub.reply(200, {{"role", "find_candidates"},
                   {"payload",
                    {{"suggestions",
                      {{{"identifier_name", "orderLimit"},
                        {"identifier_type", "local"},
                        {"new_name", "purchaseLimit"},
                        {"line_number", 4},
                        {"confidence", 0.9}}}}}}});
  fs::path transcript = fs::temp_directory_path() / "corename_transcript.jsonl";
  fs::remove(transcript);
  ExternalReasoner r({stub.url(), "s3cret", transcript.string(), 5000});
  CodeModel m = shop();
  auto out = r.find_candidates(m, kOrder, order_scope(), {{"snippet", true, {}}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].identifier_name, "orderLimit");
  EXPECT_EQ(out[0].identifier_type, DeclKind::LocalVariable);
  EXPECT_EQ(out[0].confidence, 0.9);
  ASSERT_EQ(stub.requests.size(), 1u);
  EXPECT_EQ(stub.requests[0]["role"], "find_candidates");
  EXPECT_EQ(stub.requests[0]["payload"]["file"], kOrder);
  EXPECT_EQ(stub.requests[0]["payload"]["shots"][0]["decision"], 1);
  EXPECT_EQ(stub.auth[0], "Bearer s3cret");
  std::ifstream in(transcript);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(json::parse(line)["request"]["role"], "find_candidates");
}

TEST(External, RetriesOnceOnMalformedPayload) {
  StubEndpoint stub;
  stub.reply_raw(200, "not json\n");
  stub.reply(200, {{"role", "filter_file"}, {"payload", {{"replicate", true}}}});
  ExternalReasoner r({stub.url(), "", std::nullopt, 5000});
  EXPECT_TRUE(r.filter_file(shop(), kOrder, order_scope()));
  EXPECT_EQ(r.schema_failures(), 1);
  EXPECT_EQ(stub.requests.size(), 2u);
}

TEST(External, TwoMalformedRepliesYieldEmpty) {
  StubEndpoint stub;
  json bad_conf{{"role", "find_candidates"},
                {"payload",
                 {{"suggestions",
                   {{{"identifier_name", "x"}, {"identifier_type", "field"}, {"new_name", "y"}, {"line_number", 1},
                     {"confidence", 1.5}}}}}}};
  stub.reply(200, bad_conf);
  stub.reply(200, {{"role", "filter_file"}, {"payload", {{"suggestions", json::array()}}}});
  ExternalReasoner r({stub.url(), "", std::nullopt, 5000});
  EXPECT_TRUE(r.find_candidates(shop(), kOrder, order_scope(), {}).empty());
  EXPECT_EQ(r.schema_failures(), 2);
}

TEST(External, InferScopeInconsistentPatternFallsBackToExtractor) {
  StubEndpoint stub;
  stub.reply(200, {{"role", "infer_scope"}, {"payload", {{"pattern", {{"old", "total"}, {"new", "sum"}}}}}});
  ExternalReasoner r({stub.url(), "", std::nullopt, 5000});
  RenameRefactoring seed{kOrder, "orderTotal", "purchaseTotal", 2, DeclKind::Field};
  InferOutcome out = infer_from_seed(seed, "", r);
  EXPECT_TRUE(out.pattern_inconsistent);
  EXPECT_EQ(apply_pattern(out.scope.pattern, "orderTotal"), "purchaseTotal");
}

TEST(External, ServerErrorsAndUnreachableAreUnavailable) {
  StubEndpoint stub;
  stub.reply(503, json::object());
  ExternalReasoner r({stub.url(), "", std::nullopt, 5000});
  EXPECT_THROW(r.filter_file(shop(), kOrder, order_scope()), ReasonerUnavailable);
  ExternalReasoner none({"", "", std::nullopt, 500});
  EXPECT_THROW(none.filter_file(shop(), kOrder, order_scope()), ReasonerUnavailable);
}

TEST(Fallback, SwitchesOnceAndStaysDegraded) {
  int notices = 0;
  FallbackReasoner r(std::make_unique<ExternalReasoner>(ExternalConfig{"http://127.0.0.1:1/reason", "", std::nullopt, 500}),
                     std::make_unique<DeterministicReasoner>(), [&](const std::string&) { ++notices; });
  CodeModel m = shop();
  EXPECT_FALSE(r.find_candidates(m, kOrder, order_scope(), {}).empty());
  EXPECT_TRUE(r.filter_file(m, kOrder, order_scope()));
  EXPECT_TRUE(r.degraded());
  EXPECT_EQ(notices, 1);
  EXPECT_EQ(r.name(), "external->deterministic");
}
