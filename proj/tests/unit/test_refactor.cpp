#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "corename/refactor.hpp"
#include "oracles/census.hpp"

using namespace corename;
namespace fs = std::filesystem;

namespace {

CodeModel model_of(std::map<std::string, std::string> texts) { return parse_texts(".", texts); }

const char* kShadow =
    "class Counter {\n"                 // 1
    "  field int f;\n"                  // 2
    "  field int total;\n"              // 3
    "  method int bump(int step) {\n"   // 4
    "    var int x = step;\n"           // 5
    "    x = x + 1;\n"                  // 6
    "    total = f + x;\n"              // 7
    "    return total;\n"               // 8
    "  }\n"                             // 9
    "  method void reset() {\n"         // 10
    "    total = 0;\n"                  // 11
    "  }\n"                             // 12
    "}\n";

}  // namespace

TEST(Preconditions, FreshLocalNameIsOk) {
  CodeModel m = model_of({{"Counter.mini", kShadow}});
  auto rep = check_preconditions(m, {"Counter.mini", "x", "y", 5, DeclKind::LocalVariable});
  EXPECT_TRUE(rep.ok());
  ASSERT_EQ(rep.group.size(), 1u);
}

TEST(Preconditions, LocalShadowingFieldIsRejected) {
  CodeModel m = model_of({{"Counter.mini", kShadow}});
  auto rep = check_preconditions(m, {"Counter.mini", "x", "f", 5, DeclKind::LocalVariable});
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violations[0].kind, Violation::Kind::Shadowing);
  EXPECT_EQ(rep.violations[0].line, 7);
}

TEST(Preconditions, DirectChecks) {
  CodeModel m = model_of({{"Counter.mini", kShadow}});
  EXPECT_EQ(check_preconditions(m, {"Counter.mini", "x", "while", 5, DeclKind::LocalVariable}).violations[0].kind,
            Violation::Kind::InvalidName);
  EXPECT_EQ(check_preconditions(m, {"Counter.mini", "x", "x", 5, DeclKind::LocalVariable}).violations[0].kind,
            Violation::Kind::Unchanged);
  EXPECT_EQ(check_preconditions(m, {"Counter.mini", "nope", "y", 5, DeclKind::LocalVariable}).violations[0].kind,
            Violation::Kind::TargetUnresolved);
  EXPECT_EQ(check_preconditions(m, {"Counter.mini", "f", "total", 2, DeclKind::Field}).violations[0].kind,
            Violation::Kind::SiblingCollision);
  EXPECT_EQ(check_preconditions(m, {"Counter.mini", "x", "step", 5, DeclKind::LocalVariable}).violations[0].kind,
            Violation::Kind::SiblingCollision);
}

TEST(Preconditions, OverrideGroupIsAtomic) {
  CodeModel m = model_of({
      {"Task.mini", "class Task {\n  method void run() {\n  }\n}\n"},
      {"A.mini", "class A extends Task {\n  method void run() {\n  }\n}\n"},
      {"B.mini", "class B extends Task {\n  method void run() {\n  }\n}\n"},
      {"C.mini", "class C extends A {\n  method void run() {\n    this.run();\n  }\n}\n"},
  });
  auto rep = check_preconditions(m, {"Task.mini", "run", "execute", 2, DeclKind::Method});
  ASSERT_TRUE(rep.ok());
  EXPECT_EQ(rep.group.size(), 1u + 3u);
  auto out = apply_rename(m, {"Task.mini", "run", "execute", 2, DeclKind::Method});
  EXPECT_EQ(out.edits.size(), 5u);
  for (const Declaration& d : out.model.declarations())
    if (d.kind == DeclKind::Method) EXPECT_EQ(d.name, "execute");
}

TEST(Preconditions, NewOverrideIsRejected) {
  CodeModel m = model_of({
      {"Base.mini", "class Base {\n  method int size() {\n    return 1;\n  }\n}\n"},
      {"Sub.mini", "class Sub extends Base {\n  method int count() {\n    return 2;\n  }\n}\n"},
  });
  auto rep = check_preconditions(m, {"Sub.mini", "count", "size", 2, DeclKind::Method});
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violations[0].kind, Violation::Kind::OverrideConflict);
}

TEST(ApplyRename, ZeroReferencesIsOneEdit) {
  CodeModel m = model_of({{"Counter.mini", kShadow}});
  auto out = apply_rename(m, {"Counter.mini", "reset", "clear", 10, DeclKind::Method});
  EXPECT_EQ(out.edits.size(), 1u);
  EXPECT_EQ(out.model.version(), m.version() + 1);
}

TEST(ApplyRename, FieldAcrossFilesMatchesCensus) {
  std::map<std::string, std::string> texts{
      {"src/main/p/Holder.mini", "class Holder {\n  field int joinHints;\n}\n"},
      {"src/main/p/A.mini", "class A {\n  method int get(Holder h) {\n    return h.joinHints;\n  }\n}\n"},
      {"src/main/q/B.mini", "class B {\n  method void set(Holder h) {\n    h.joinHints = 3;\n  }\n}\n"},
      {"src/test/p/T.mini", "class T {\n  // joinHints\n  method bool ok(Holder h) {\n    return h.joinHints == 0;\n  }\n}\n"},
  };
  CodeModel m = model_of(texts);
  auto out = apply_rename(m, {"src/main/p/Holder.mini", "joinHints", "queryHints", 2, DeclKind::Field});
  EXPECT_EQ(out.edits.size(), oracle::code_token_count(texts, "joinHints"));
  EXPECT_EQ(out.edits.size(), 1u + 3u);
  std::map<std::string, std::string> after;
  for (const SourceFile& f : out.model.layout().files) after.emplace(f.path, f.text);
  EXPECT_EQ(oracle::code_token_count(after, "joinHints"), 0u);
  EXPECT_EQ(oracle::code_token_count(after, "queryHints"), 4u);
  // Comment untouched by the code rename.
  EXPECT_NE(after["src/test/p/T.mini"].find("// joinHints"), std::string::npos);
}

TEST(ApplyRename, FailureThrowsWithoutChange) {
  CodeModel m = model_of({{"Counter.mini", kShadow}});
  EXPECT_THROW(apply_rename(m, {"Counter.mini", "x", "f", 5, DeclKind::LocalVariable}), PreconditionViolated);
}

TEST(UpdateComment, OnlyCommentTokensChange) {
  CodeModel m = model_of({{"H.mini",
                           "class H {\n  // uses joinHints\n  field int joinHints;\n  // joinHintsX stays\n}\n"}});
  auto out = update_comment(m, "H.mini", "joinHints", "queryHints");
  ASSERT_EQ(out.edits.size(), 1u);
  EXPECT_EQ(out.edits[0].before, "  // uses joinHints");
  EXPECT_EQ(out.edits[0].after, "  // uses queryHints");
  const std::string& text = out.model.layout().find("H.mini")->text;
  EXPECT_NE(text.find("field int joinHints;"), std::string::npos);
  EXPECT_NE(text.find("joinHintsX stays"), std::string::npos);
  EXPECT_TRUE(update_comment(m, "H.mini", "absent", "other").edits.empty());
}

TEST(Workspace, MaterializedFailureLeavesBytesIdentical) {
  fs::path dir = fs::temp_directory_path() / "corename_ws_atomic";
  fs::remove_all(dir);
  fs::create_directories(dir);
  { std::ofstream(dir / "Counter.mini") << kShadow; }
  Workspace ws(parse_project(dir.string()), true);
  EXPECT_THROW(ws.apply({"Counter.mini", "x", "f", 5, DeclKind::LocalVariable}), PreconditionViolated);
  std::ifstream in(dir / "Counter.mini");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, kShadow);

  ws.apply({"Counter.mini", "x", "y", 5, DeclKind::LocalVariable});
  CodeModel disk = parse_project(dir.string());
  EXPECT_EQ(disk.layout().files[0].text, ws.model().layout().files[0].text);
  EXPECT_NE(ws.unified_diff().find("+    var int y = step;"), std::string::npos);
  fs::remove_all(dir);
}
