#include <algorithm>
#include <array>
#include <cctype>

#include "corename/ast.hpp"

namespace corename {

namespace {

constexpr std::array<std::string_view, 20> kKeywords{
    "class", "extends", "public", "private", "field",  "method", "var",  "return", "if",   "else",
    "while", "new",     "this",   "true",    "false",  "null",   "int",  "bool",   "string", "void"};

enum class Tok { Ident, Keyword, Int, Str, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Span span;
  int line = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(const SourceFile& file) : file_(file), text_(file.text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text_.size();
    while (i < n) {
      char c = text_[i];
      if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (c == '/' && i + 1 < n && text_[i + 1] == '/') {
        while (i < n && text_[i] != '\n') ++i;
        continue;
      }
      std::size_t start = i;
      if (ident_start(c)) {
        while (i < n && ident_char(text_[i])) ++i;
        std::string word(text_.substr(start, i - start));
        Tok kind = is_keyword(word) ? Tok::Keyword : Tok::Ident;
        out.push_back({kind, std::move(word), {start, i}, file_.line_of(start)});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i < n && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
        if (i < n && ident_char(text_[i])) fail(start, "malformed number");
        out.push_back({Tok::Int, std::string(text_.substr(start, i - start)), {start, i}, file_.line_of(start)});
        continue;
      }
      if (c == '"') {
        ++i;
        while (i < n && text_[i] != '"') {
          if (text_[i] == '\n') fail(start, "unterminated string literal");
          if (text_[i] == '\\') ++i;
          ++i;
        }
        if (i >= n) fail(start, "unterminated string literal");
        ++i;
        out.push_back({Tok::Str, std::string(text_.substr(start, i - start)), {start, i}, file_.line_of(start)});
        continue;
      }
      static constexpr std::array<std::string_view, 6> kTwo{"==", "!=", "<=", ">=", "&&", "||"};
      bool matched = false;
      if (i + 1 < n) {
        std::string_view two = text_.substr(i, 2);
        for (auto op : kTwo) {
          if (two == op) {
            out.push_back({Tok::Punct, std::string(op), {i, i + 2}, file_.line_of(i)});
            i += 2;
            matched = true;
            break;
          }
        }
      }
      if (matched) continue;
      if (std::string_view("{}();,.=+-*/%<>!").find(c) != std::string_view::npos) {
        out.push_back({Tok::Punct, std::string(1, c), {i, i + 1}, file_.line_of(i)});
        ++i;
        continue;
      }
      fail(i, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", {n, n}, file_.line_of(n == 0 ? 0 : n - 1)});
    return out;
  }

 private:
  [[noreturn]] void fail(std::size_t offset, const std::string& msg) {
    throw SyntaxError(file_.path, file_.line_of(offset), msg);
  }

  const SourceFile& file_;
  std::string_view text_;
};

class Parser {
 public:
  Parser(const SourceFile& file, std::vector<Token> toks) : file_(file), toks_(std::move(toks)) {}

  std::shared_ptr<const FileAst> run() {
    auto ast = std::make_shared<FileAst>();
    ast->path = file_.path;
    if (peek().kind != Tok::End) ast->cls = parse_class();
    if (peek().kind != Tok::End) fail("expected end of file (one class per file)");
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool is(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.kind == Tok::Punct || t.kind == Tok::Keyword) && t.text == text;
  }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of file" : "'" + t.text + "'";
    throw SyntaxError(file_.path, t.line, msg + ", got " + got);
  }

  Ident ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    Token t = take();
    return {std::move(t.text), t.span, t.line};
  }

  Visibility visibility() {
    if (accept("private")) return Visibility::Private;
    accept("public");
    return Visibility::Public;
  }

  TypeRef type(bool allow_void) {
    TypeRef ref;
    const Token& t = peek();
    if (t.kind == Tok::Keyword) {
      if (t.text == "int") ref.kind = TypeRef::Kind::Int;
      else if (t.text == "bool") ref.kind = TypeRef::Kind::Bool;
      else if (t.text == "string") ref.kind = TypeRef::Kind::String;
      else if (t.text == "void" && allow_void) ref.kind = TypeRef::Kind::Void;
      else fail("expected type");
      Token k = take();
      ref.ident = {std::move(k.text), k.span, k.line};
      return ref;
    }
    ref.kind = TypeRef::Kind::Class;
    ref.ident = ident();
    return ref;
  }

  ClassDecl parse_class() {
    ClassDecl cls;
    cls.vis = visibility();
    expect("class");
    cls.name = ident();
    if (accept("extends")) cls.base = ident();
    expect("{");
    while (!is("}")) {
      if (peek().kind == Tok::End) fail("expected '}'");
      cls.members.push_back(parse_member());
    }
    expect("}");
    return cls;
  }

  Member parse_member() {
    Member m;
    Visibility vis = visibility();
    if (accept("field")) {
      FieldDecl f;
      f.vis = vis;
      f.type = type(false);
      f.name = ident();
      if (accept("=")) f.init = expr();
      expect(";");
      m.field = std::move(f);
    } else if (accept("method")) {
      MethodDecl md;
      md.vis = vis;
      md.ret = type(true);
      md.name = ident();
      expect("(");
      if (!is(")")) {
        do {
          Param p;
          p.type = type(false);
          p.name = ident();
          md.params.push_back(std::move(p));
        } while (accept(","));
      }
      expect(")");
      md.body = block();
      m.method = std::move(md);
    } else {
      fail("expected 'field' or 'method'");
    }
    return m;
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> out;
    while (!is("}")) {
      if (peek().kind == Tok::End) fail("expected '}'");
      out.push_back(statement());
    }
    expect("}");
    return out;
  }

  Stmt statement() {
    Stmt s;
    s.line = peek().line;
    if (accept("var")) {
      s.kind = Stmt::Kind::Var;
      s.type = type(false);
      s.name = ident();
      if (accept("=")) s.value = expr();
      expect(";");
    } else if (accept("return")) {
      s.kind = Stmt::Kind::Return;
      if (!is(";")) s.value = expr();
      expect(";");
    } else if (accept("if")) {
      s.kind = Stmt::Kind::If;
      expect("(");
      s.value = expr();
      expect(")");
      s.body = block();
      if (accept("else")) s.else_body = block();
    } else if (accept("while")) {
      s.kind = Stmt::Kind::While;
      expect("(");
      s.value = expr();
      expect(")");
      s.body = block();
    } else {
      auto e = expr();
      if (accept("=")) {
        if (e->kind != Expr::Kind::Name && e->kind != Expr::Kind::Field) fail("invalid assignment target");
        s.kind = Stmt::Kind::Assign;
        s.target = std::move(e);
        s.value = expr();
      } else {
        if (e->kind != Expr::Kind::Call && e->kind != Expr::Kind::New) fail("expression statement must be a call");
        s.kind = Stmt::Kind::ExprStmt;
        s.value = std::move(e);
      }
      expect(";");
    }
    return s;
  }

  static int precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return 0;
  }

  std::unique_ptr<Expr> expr(int min_prec = 1) {
    auto lhs = unary();
    while (peek().kind == Tok::Punct) {
      int prec = precedence(peek().text);
      if (prec == 0 || prec < min_prec) break;
      Token op = take();
      auto rhs = expr(prec + 1);
      auto bin = std::make_unique<Expr>();
      bin->kind = Expr::Kind::Binary;
      bin->line = op.line;
      bin->op = op.text;
      bin->kids.push_back(std::move(lhs));
      bin->kids.push_back(std::move(rhs));
      lhs = std::move(bin);
    }
    return lhs;
  }

  std::unique_ptr<Expr> unary() {
    if (is("!") || is("-")) {
      Token op = take();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Unary;
      e->line = op.line;
      e->op = op.text;
      e->kids.push_back(unary());
      return e;
    }
    return postfix(primary());
  }

  std::vector<std::unique_ptr<Expr>> args() {
    std::vector<std::unique_ptr<Expr>> out;
    expect("(");
    if (!is(")")) {
      do out.push_back(expr());
      while (accept(","));
    }
    expect(")");
    return out;
  }

  std::unique_ptr<Expr> postfix(std::unique_ptr<Expr> e) {
    while (accept(".")) {
      Ident member = ident();
      auto next = std::make_unique<Expr>();
      next->line = member.line;
      next->ident = std::move(member);
      if (is("(")) {
        next->kind = Expr::Kind::Call;
        next->has_receiver = true;
        next->kids.push_back(std::move(e));
        for (auto& a : args()) next->kids.push_back(std::move(a));
      } else {
        next->kind = Expr::Kind::Field;
        next->kids.push_back(std::move(e));
      }
      e = std::move(next);
    }
    return e;
  }

  std::unique_ptr<Expr> primary() {
    auto e = std::make_unique<Expr>();
    const Token& t = peek();
    e->line = t.line;
    switch (t.kind) {
      case Tok::Int: e->kind = Expr::Kind::Int; take(); return e;
      case Tok::Str: e->kind = Expr::Kind::Str; take(); return e;
      case Tok::Ident: {
        e->ident = ident();
        if (is("(")) {
          e->kind = Expr::Kind::Call;
          e->kids = args();
        } else {
          e->kind = Expr::Kind::Name;
        }
        return e;
      }
      case Tok::Keyword:
        if (accept("true") || accept("false")) { e->kind = Expr::Kind::Bool; return e; }
        if (accept("null")) { e->kind = Expr::Kind::Null; return e; }
        if (accept("this")) { e->kind = Expr::Kind::This; return e; }
        if (accept("new")) {
          e->kind = Expr::Kind::New;
          e->type.kind = TypeRef::Kind::Class;
          e->type.ident = ident();
          expect("(");
          expect(")");
          return e;
        }
        break;
      case Tok::Punct:
        if (accept("(")) {
          auto inner = expr();
          expect(")");
          return inner;
        }
        break;
      case Tok::End: break;
    }
    fail("expected expression");
  }

  const SourceFile& file_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_keyword(std::string_view name) {
  return std::find(kKeywords.begin(), kKeywords.end(), name) != kKeywords.end();
}

bool is_valid_identifier(std::string_view name) {
  if (name.empty() || !ident_start(name.front())) return false;
  if (!std::all_of(name.begin(), name.end(), ident_char)) return false;
  return !is_keyword(name);
}

std::vector<Span> scan_comments(const std::string& text) {
  // Mirrors the lexer: comments start at `//` outside string literals.
  std::vector<Span> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '"') {
      ++i;
      while (i < n && text[i] != '"' && text[i] != '\n') {
        if (text[i] == '\\') ++i;
        ++i;
      }
      if (i < n && text[i] == '"') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      std::size_t start = i;
      while (i < n && text[i] != '\n') ++i;
      out.push_back({start, i});
      continue;
    }
    ++i;
  }
  return out;
}

std::shared_ptr<const FileAst> parse_file(const SourceFile& file) {
  Lexer lexer(file);
  Parser parser(file, lexer.run());
  return parser.run();
}

}  // namespace corename
