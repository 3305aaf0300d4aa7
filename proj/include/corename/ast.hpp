#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "corename/model.hpp"

namespace corename {

// Syntax tree for one MiniLang file. Produced by parse_file(), consumed by
// the resolver. Immutable once built and shared between model versions.

struct Ident {
  std::string name;
  Span span;
  int line = 0;
};

struct TypeRef {
  enum class Kind { Int, Bool, String, Void, Class };
  Kind kind = Kind::Int;
  Ident ident;  // keyword text for primitives
};

struct Expr {
  enum class Kind { Int, Str, Bool, Null, This, Name, Field, Call, New, Unary, Binary };
  Kind kind = Kind::Int;
  int line = 0;
  Ident ident;        // Name, Field (member), Call (method)
  TypeRef type;       // New
  std::string op;     // Unary, Binary
  bool has_receiver = false;  // Call
  std::vector<std::unique_ptr<Expr>> kids;  // Field: [obj]; Call: [recv?, args...]; Unary: [x]; Binary: [l, r]
};

struct Stmt {
  enum class Kind { Var, Assign, ExprStmt, Return, If, While };
  Kind kind = Kind::ExprStmt;
  int line = 0;
  TypeRef type;                    // Var
  Ident name;                      // Var
  std::unique_ptr<Expr> target;    // Assign (Name or Field)
  std::unique_ptr<Expr> value;     // Var init, Assign rhs, ExprStmt, Return value, If/While condition
  std::vector<Stmt> body;          // If then / While body
  std::vector<Stmt> else_body;     // If else
};

struct Param {
  TypeRef type;
  Ident name;
};

struct FieldDecl {
  Visibility vis = Visibility::Public;
  TypeRef type;
  Ident name;
  std::unique_ptr<Expr> init;
};

struct MethodDecl {
  Visibility vis = Visibility::Public;
  TypeRef ret;
  Ident name;
  std::vector<Param> params;
  std::vector<Stmt> body;
};

struct Member {
  std::optional<FieldDecl> field;
  std::optional<MethodDecl> method;
};

struct ClassDecl {
  Visibility vis = Visibility::Public;
  Ident name;
  std::optional<Ident> base;
  std::vector<Member> members;  // source order
};

struct FileAst {
  std::string path;
  std::optional<ClassDecl> cls;
};

/// Lexes and parses one file. Throws SyntaxError.
std::shared_ptr<const FileAst> parse_file(const SourceFile& file);

/// Comment spans of a text (used when building SourceFile).
std::vector<Span> scan_comments(const std::string& text);

}  // namespace corename
