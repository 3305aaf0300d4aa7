#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

#include "corename/ast.hpp"
#include "corename/model.hpp"

namespace corename {

namespace fs = std::filesystem;

// ─── Small helpers ─────────────────────────────────────────────

std::string_view to_string(DeclKind kind) {
  switch (kind) {
    case DeclKind::Class: return "class";
    case DeclKind::Method: return "method";
    case DeclKind::Field: return "field";
    case DeclKind::Parameter: return "parameter";
    case DeclKind::LocalVariable: return "local_variable";
  }
  return "?";
}

std::string_view to_string(Visibility vis) { return vis == Visibility::Public ? "public" : "private"; }

std::optional<DeclKind> parse_decl_kind(std::string_view text) {
  if (text == "class") return DeclKind::Class;
  if (text == "method") return DeclKind::Method;
  if (text == "field") return DeclKind::Field;
  if (text == "parameter" || text == "param") return DeclKind::Parameter;
  if (text == "local_variable" || text == "variable" || text == "local") return DeclKind::LocalVariable;
  return std::nullopt;
}

std::optional<Visibility> parse_visibility(std::string_view text) {
  if (text == "public") return Visibility::Public;
  if (text == "private") return Visibility::Private;
  return std::nullopt;
}

int seed_priority(DeclKind kind) {
  switch (kind) {
    case DeclKind::Class: return 0;
    case DeclKind::Field: return 1;
    case DeclKind::Method: return 2;
    case DeclKind::Parameter: return 3;
    case DeclKind::LocalVariable: return 4;
  }
  return 5;
}

SyntaxError::SyntaxError(std::string file, int line, std::string message)
    : ModelError(file, line, file + ":" + std::to_string(line) + ": syntax error: " + message),
      message_(std::move(message)) {}

ResolutionError::ResolutionError(std::string file, int line, std::string name, std::string detail)
    : ModelError(file, line,
                 file + ":" + std::to_string(line) + ": cannot resolve '" + name + "'" +
                     (detail.empty() ? std::string() : ": " + detail)),
      name_(std::move(name)) {}

int SourceFile::line_of(std::size_t offset) const {
  auto it = std::upper_bound(line_index.begin(), line_index.end(), offset);
  return static_cast<int>(it - line_index.begin());
}

std::string_view SourceFile::line_text(int line) const {
  if (line < 1 || line > line_count()) return {};
  std::size_t begin = line_index[line - 1];
  std::size_t end = line < line_count() ? line_index[line] : text.size();
  std::string_view view(text);
  view = view.substr(begin, end - begin);
  while (!view.empty() && (view.back() == '\n' || view.back() == '\r')) view.remove_suffix(1);
  return view;
}

bool SourceFile::in_comment(std::size_t offset) const {
  auto it = std::upper_bound(comments.begin(), comments.end(), offset,
                             [](std::size_t off, const Span& s) { return off < s.begin; });
  if (it == comments.begin()) return false;
  --it;
  return offset >= it->begin && offset < it->end;
}

SourceFile make_source_file(std::string path, std::string text) {
  SourceFile f;
  f.path = std::move(path);
  f.text = std::move(text);
  f.line_index.push_back(0);
  for (std::size_t i = 0; i < f.text.size(); ++i)
    if (f.text[i] == '\n' && i + 1 < f.text.size()) f.line_index.push_back(i + 1);
  f.comments = scan_comments(f.text);
  return f;
}

const SourceFile* ProjectLayout::find(std::string_view path) const {
  auto it = std::lower_bound(files.begin(), files.end(), path,
                             [](const SourceFile& f, std::string_view p) { return f.path < p; });
  if (it == files.end() || it->path != path) return nullptr;
  return &*it;
}

namespace {
bool under_dir(std::string_view path, std::string_view dir) {
  if (dir == "." || dir.empty()) return true;
  return path.size() > dir.size() && path.substr(0, dir.size()) == dir && path[dir.size()] == '/';
}
}  // namespace

std::string ProjectLayout::source_dir_of(std::string_view path) const {
  for (const auto& d : source_dirs)
    if (d != "." && under_dir(path, d)) return d;
  return ".";
}

std::string ProjectLayout::dir_of(std::string_view path) {
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string() : std::string(path.substr(0, slash));
}

std::string ProjectLayout::package_of(std::string_view path) const {
  std::string sd = source_dir_of(path);
  std::string dir = dir_of(path);
  std::string rel = sd == "." ? dir : (dir.size() > sd.size() ? dir.substr(sd.size() + 1) : std::string());
  std::replace(rel.begin(), rel.end(), '/', '.');
  return rel;
}

// ─── Builder ───────────────────────────────────────────────────

enum class TypeKind { Int, Bool, String, Void, Null, Class, Unknown };

struct Type {
  TypeKind kind = TypeKind::Unknown;
  DeclId cls;
};

class ModelBuilder {
 public:
  ModelBuilder(ProjectLayout layout, std::map<std::string, std::shared_ptr<const FileAst>> asts, int version) {
    m_.layout_ = std::move(layout);
    m_.asts_ = std::move(asts);
    m_.version_ = version;
  }

  CodeModel build() {
    collect_classes();
    collect_members();
    link_superclasses();
    compute_overrides();
    for (auto& [path, ast] : m_.asts_)
      if (ast->cls) resolve_class(*ast);
    finish();
    return std::move(m_);
  }

 private:
  struct ClassInfo {
    DeclId id;
    const FileAst* ast = nullptr;
    std::map<std::string, DeclId, std::less<>> fields;
    std::map<std::pair<std::string, int>, DeclId> methods;
  };

  DeclId add_decl(DeclKind kind, const Ident& name, const std::string& file, std::optional<DeclId> owner,
                  std::optional<Visibility> vis, std::string type_name = {}, int arity = 0) {
    Declaration d;
    d.id = DeclId{static_cast<std::uint32_t>(m_.decls_.size())};
    d.kind = kind;
    d.name = name.name;
    d.file = file;
    d.line = name.line;
    d.owner = owner;
    d.visibility = vis;
    d.span = name.span;
    d.type_name = std::move(type_name);
    d.arity = arity;
    m_.decls_.push_back(std::move(d));
    return m_.decls_.back().id;
  }

  void collect_classes() {
    for (auto& [path, ast] : m_.asts_) {
      if (!ast->cls) continue;
      const ClassDecl& c = *ast->cls;
      if (m_.classes_.count(c.name.name))
        throw ResolutionError(path, c.name.line, c.name.name, "duplicate class");
      DeclId id = add_decl(DeclKind::Class, c.name, path, std::nullopt, c.vis);
      m_.classes_.emplace(c.name.name, id);
      ClassInfo info;
      info.id = id;
      info.ast = ast.get();
      classes_.emplace(id, std::move(info));
    }
  }

  static std::string type_text(const TypeRef& t) { return t.ident.name; }

  void check_type_exists(const TypeRef& t, const std::string& file) {
    if (t.kind == TypeRef::Kind::Class && !m_.classes_.count(t.ident.name))
      throw ResolutionError(file, t.ident.line, t.ident.name, "unknown class");
  }

  void collect_members() {
    for (auto& [cid, info] : classes_) {
      const std::string& file = info.ast->path;
      for (const Member& mem : info.ast->cls->members) {
        if (mem.field) {
          const FieldDecl& f = *mem.field;
          check_type_exists(f.type, file);
          if (info.fields.count(f.name.name))
            throw ResolutionError(file, f.name.line, f.name.name, "duplicate field");
          DeclId id = add_decl(DeclKind::Field, f.name, file, cid, f.vis, type_text(f.type));
          info.fields.emplace(f.name.name, id);
          field_ast_.emplace(id, &f);
        } else {
          const MethodDecl& md = *mem.method;
          check_type_exists(md.ret, file);
          int arity = static_cast<int>(md.params.size());
          auto key = std::make_pair(md.name.name, arity);
          if (info.methods.count(key))
            throw ResolutionError(file, md.name.line, md.name.name, "duplicate method");
          DeclId id = add_decl(DeclKind::Method, md.name, file, cid, md.vis, type_text(md.ret), arity);
          info.methods.emplace(key, id);
          method_ast_.emplace(id, &md);
          std::vector<DeclId> params;
          for (const Param& p : md.params) {
            check_type_exists(p.type, file);
            for (DeclId other : params)
              if (m_.decls_[other.value].name == p.name.name)
                throw ResolutionError(file, p.name.line, p.name.name, "duplicate parameter");
            params.push_back(add_decl(DeclKind::Parameter, p.name, file, id, std::nullopt, type_text(p.type)));
          }
          params_.emplace(id, std::move(params));
        }
      }
    }
  }

  void link_superclasses() {
    for (auto& [cid, info] : classes_) {
      const ClassDecl& c = *info.ast->cls;
      if (!c.base) continue;
      auto it = m_.classes_.find(c.base->name);
      if (it == m_.classes_.end())
        throw ResolutionError(info.ast->path, c.base->line, c.base->name, "unknown superclass");
      m_.superclass_.emplace(cid, it->second);
    }
    for (auto& [cid, info] : classes_) {
      std::set<DeclId> seen{cid};
      for (auto cur = m_.superclass(cid); cur; cur = m_.superclass(*cur)) {
        if (!seen.insert(*cur).second)
          throw ResolutionError(info.ast->path, info.ast->cls->name.line, info.ast->cls->name.name,
                                "cyclic inheritance");
      }
    }
  }

  std::optional<DeclId> find_method(DeclId cls, const std::string& name, int arity) const {
    for (std::optional<DeclId> cur = cls; cur; cur = m_.superclass(*cur)) {
      const ClassInfo& info = classes_.at(*cur);
      auto it = info.methods.find({name, arity});
      if (it != info.methods.end()) return it->second;
    }
    return std::nullopt;
  }

  std::optional<DeclId> find_field(DeclId cls, std::string_view name) const {
    for (std::optional<DeclId> cur = cls; cur; cur = m_.superclass(*cur)) {
      const ClassInfo& info = classes_.at(*cur);
      auto it = info.fields.find(name);
      if (it != info.fields.end()) return it->second;
    }
    return std::nullopt;
  }

  void compute_overrides() {
    m_.group_of_.resize(m_.decls_.size());
    std::iota(m_.group_of_.begin(), m_.group_of_.end(), 0u);
    std::function<std::uint32_t(std::uint32_t)> root = [&](std::uint32_t x) {
      while (m_.group_of_[x] != x) x = m_.group_of_[x] = m_.group_of_[m_.group_of_[x]];
      return x;
    };
    for (auto& [cid, info] : classes_) {
      auto base = m_.superclass(cid);
      if (!base) continue;
      for (auto& [key, mid] : info.methods) {
        auto over = find_method(*base, key.first, key.second);
        if (!over) continue;
        m_.overrides_.emplace(mid, *over);
        std::uint32_t a = root(mid.value), b = root(over->value);
        if (a != b) m_.group_of_[std::max(a, b)] = std::min(a, b);
      }
    }
    for (std::uint32_t i = 0; i < m_.group_of_.size(); ++i) m_.group_of_[i] = root(i);
    std::map<std::uint32_t, std::vector<DeclId>> groups;
    for (std::uint32_t i = 0; i < m_.group_of_.size(); ++i) groups[m_.group_of_[i]].push_back(DeclId{i});
    for (auto& [g, members] : groups)
      if (members.size() > 1) m_.group_members_.emplace(g, std::move(members));
  }

  // ── Bodies ──

  struct Frame {
    std::vector<std::map<std::string, DeclId, std::less<>>> scopes;
  };

  struct StmtCtx {
    std::set<DeclId> reads;
    std::set<DeclId> writes;
  };

  void add_ref(DeclId target, const Ident& id, const std::string& file) {
    m_.refs_.push_back({target, file, id.line, id.span, false});
  }

  StmtId add_stmt(StmtKind kind, const std::string& file, int line, std::optional<DeclId> method,
                  const StmtCtx& ctx) {
    Statement s;
    s.id = StmtId{static_cast<std::uint32_t>(m_.stmts_.size())};
    s.kind = kind;
    s.file = file;
    s.line = line;
    s.method = method;
    s.reads.assign(ctx.reads.begin(), ctx.reads.end());
    s.writes.assign(ctx.writes.begin(), ctx.writes.end());
    m_.stmts_.push_back(std::move(s));
    return m_.stmts_.back().id;
  }

  Type type_of(const TypeRef& t) const {
    switch (t.kind) {
      case TypeRef::Kind::Int: return {TypeKind::Int, {}};
      case TypeRef::Kind::Bool: return {TypeKind::Bool, {}};
      case TypeRef::Kind::String: return {TypeKind::String, {}};
      case TypeRef::Kind::Void: return {TypeKind::Void, {}};
      case TypeRef::Kind::Class: return {TypeKind::Class, m_.classes_.at(t.ident.name)};
    }
    return {};
  }

  Type type_of_decl(DeclId id) const {
    const Declaration& d = m_.decls_[id.value];
    if (d.type_name == "int") return {TypeKind::Int, {}};
    if (d.type_name == "bool") return {TypeKind::Bool, {}};
    if (d.type_name == "string") return {TypeKind::String, {}};
    if (d.type_name == "void") return {TypeKind::Void, {}};
    auto it = m_.classes_.find(d.type_name);
    if (it != m_.classes_.end()) return {TypeKind::Class, it->second};
    return {};
  }

  void type_ref(const TypeRef& t, const std::string& file, StmtCtx& ctx) {
    if (t.kind != TypeRef::Kind::Class) return;
    DeclId cls = m_.classes_.at(t.ident.name);
    add_ref(cls, t.ident, file);
    ctx.reads.insert(cls);
  }

  std::optional<DeclId> lookup_local(const Frame& frame, std::string_view name) const {
    for (auto it = frame.scopes.rbegin(); it != frame.scopes.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    return std::nullopt;
  }

  void record_call(DeclId callee, StmtCtx& ctx) {
    for (DeclId m : m_.override_group(callee)) {
      ctx.reads.insert(m);
      for (DeclId p : params_.at(m)) ctx.writes.insert(p);
      if (current_method_) m_.calls_[*current_method_].insert(m);
    }
  }

  Type expr(const Expr& e, const std::string& file, DeclId cls, const Frame& frame, StmtCtx& ctx) {
    switch (e.kind) {
      case Expr::Kind::Int: return {TypeKind::Int, {}};
      case Expr::Kind::Str: return {TypeKind::String, {}};
      case Expr::Kind::Bool: return {TypeKind::Bool, {}};
      case Expr::Kind::Null: return {TypeKind::Null, {}};
      case Expr::Kind::This: return {TypeKind::Class, cls};
      case Expr::Kind::Name: {
        std::optional<DeclId> target = lookup_local(frame, e.ident.name);
        if (!target) target = find_field(cls, e.ident.name);
        if (!target) throw ResolutionError(file, e.ident.line, e.ident.name);
        add_ref(*target, e.ident, file);
        ctx.reads.insert(*target);
        return type_of_decl(*target);
      }
      case Expr::Kind::Field: {
        Type obj = expr(*e.kids[0], file, cls, frame, ctx);
        if (obj.kind != TypeKind::Class)
          throw ResolutionError(file, e.ident.line, e.ident.name, "member access on non-class value");
        auto target = find_field(obj.cls, e.ident.name);
        if (!target) throw ResolutionError(file, e.ident.line, e.ident.name, "no such field");
        add_ref(*target, e.ident, file);
        ctx.reads.insert(*target);
        return type_of_decl(*target);
      }
      case Expr::Kind::Call: {
        DeclId recv_cls = cls;
        std::size_t first_arg = 0;
        if (e.has_receiver) {
          Type recv = expr(*e.kids[0], file, cls, frame, ctx);
          if (recv.kind != TypeKind::Class)
            throw ResolutionError(file, e.ident.line, e.ident.name, "call on non-class value");
          recv_cls = recv.cls;
          first_arg = 1;
        }
        int arity = static_cast<int>(e.kids.size() - first_arg);
        auto target = find_method(recv_cls, e.ident.name, arity);
        if (!target)
          throw ResolutionError(file, e.ident.line, e.ident.name,
                                "no method with " + std::to_string(arity) + " argument(s)");
        add_ref(*target, e.ident, file);
        for (std::size_t i = first_arg; i < e.kids.size(); ++i) expr(*e.kids[i], file, cls, frame, ctx);
        record_call(*target, ctx);
        return type_of_decl(*target);
      }
      case Expr::Kind::New:
        type_ref(e.type, file, ctx);
        if (!m_.classes_.count(e.type.ident.name))
          throw ResolutionError(file, e.type.ident.line, e.type.ident.name, "unknown class");
        return type_of(e.type);
      case Expr::Kind::Unary: {
        Type t = expr(*e.kids[0], file, cls, frame, ctx);
        return e.op == "!" ? Type{TypeKind::Bool, {}} : t;
      }
      case Expr::Kind::Binary: {
        Type l = expr(*e.kids[0], file, cls, frame, ctx);
        expr(*e.kids[1], file, cls, frame, ctx);
        if (e.op == "+" || e.op == "-" || e.op == "*" || e.op == "/" || e.op == "%")
          return l.kind == TypeKind::String ? l : Type{TypeKind::Int, {}};
        return {TypeKind::Bool, {}};
      }
    }
    return {};
  }

  void check_type_exists_local(const TypeRef& t, const std::string& file) { check_type_exists(t, file); }

  void statements(const std::vector<Stmt>& body, const std::string& file, DeclId cls, DeclId method,
                  Frame& frame) {
    frame.scopes.emplace_back();
    for (const Stmt& s : body) {
      StmtCtx ctx;
      switch (s.kind) {
        case Stmt::Kind::Var: {
          check_type_exists_local(s.type, file);
          if (lookup_local(frame, s.name.name))
            throw ResolutionError(file, s.name.line, s.name.name, "local already defined in this method");
          type_ref(s.type, file, ctx);
          if (s.value) expr(*s.value, file, cls, frame, ctx);
          DeclId id = add_decl(DeclKind::LocalVariable, s.name, file, method, std::nullopt, type_text(s.type));
          ctx.writes.insert(id);
          StmtId sid = add_stmt(StmtKind::LocalDecl, file, s.line, method, ctx);
          decl_stmt_.emplace(id, sid);
          frame.scopes.back().emplace(s.name.name, id);
          break;
        }
        case Stmt::Kind::Assign: {
          const Expr& t = *s.target;
          if (t.kind == Expr::Kind::Name) {
            std::optional<DeclId> target = lookup_local(frame, t.ident.name);
            if (!target) target = find_field(cls, t.ident.name);
            if (!target) throw ResolutionError(file, t.ident.line, t.ident.name);
            add_ref(*target, t.ident, file);
            ctx.writes.insert(*target);
          } else {
            Type obj = expr(*t.kids[0], file, cls, frame, ctx);
            if (obj.kind != TypeKind::Class)
              throw ResolutionError(file, t.ident.line, t.ident.name, "member access on non-class value");
            auto target = find_field(obj.cls, t.ident.name);
            if (!target) throw ResolutionError(file, t.ident.line, t.ident.name, "no such field");
            add_ref(*target, t.ident, file);
            ctx.writes.insert(*target);
          }
          expr(*s.value, file, cls, frame, ctx);
          add_stmt(StmtKind::Assign, file, s.line, method, ctx);
          break;
        }
        case Stmt::Kind::ExprStmt:
          expr(*s.value, file, cls, frame, ctx);
          add_stmt(StmtKind::Expr, file, s.line, method, ctx);
          break;
        case Stmt::Kind::Return:
          if (s.value) expr(*s.value, file, cls, frame, ctx);
          ctx.writes.insert(method);
          add_stmt(StmtKind::Return, file, s.line, method, ctx);
          break;
        case Stmt::Kind::If:
        case Stmt::Kind::While:
          expr(*s.value, file, cls, frame, ctx);
          add_stmt(StmtKind::Condition, file, s.line, method, ctx);
          statements(s.body, file, cls, method, frame);
          if (s.kind == Stmt::Kind::If && !s.else_body.empty()) statements(s.else_body, file, cls, method, frame);
          break;
      }
    }
    frame.scopes.pop_back();
  }

  void resolve_class(const FileAst& ast) {
    const ClassDecl& c = *ast.cls;
    const std::string& file = ast.path;
    DeclId cid = m_.classes_.at(c.name.name);
    {
      StmtCtx ctx;
      ctx.writes.insert(cid);
      if (c.base) {
        DeclId base = m_.classes_.at(c.base->name);
        add_ref(base, *c.base, file);
        ctx.reads.insert(base);
      }
      decl_stmt_.emplace(cid, add_stmt(StmtKind::ClassHeader, file, c.name.line, std::nullopt, ctx));
    }
    const ClassInfo& info = classes_.at(cid);
    for (const Member& mem : c.members) {
      if (mem.field) {
        const FieldDecl& f = *mem.field;
        DeclId fid = info.fields.at(f.name.name);
        StmtCtx ctx;
        ctx.writes.insert(fid);
        type_ref(f.type, file, ctx);
        current_method_.reset();
        Frame frame;
        if (f.init) expr(*f.init, file, cid, frame, ctx);
        decl_stmt_.emplace(fid, add_stmt(StmtKind::FieldDecl, file, f.name.line, std::nullopt, ctx));
        continue;
      }
      const MethodDecl& md = *mem.method;
      DeclId mid = info.methods.at({md.name.name, static_cast<int>(md.params.size())});
      current_method_ = mid;
      {
        StmtCtx ctx;
        ctx.writes.insert(mid);
        type_ref(md.ret, file, ctx);
        decl_stmt_.emplace(mid, add_stmt(StmtKind::MethodHeader, file, md.name.line, mid, ctx));
      }
      Frame frame;
      frame.scopes.emplace_back();
      const auto& params = params_.at(mid);
      for (std::size_t i = 0; i < md.params.size(); ++i) {
        StmtCtx ctx;
        ctx.writes.insert(params[i]);
        type_ref(md.params[i].type, file, ctx);
        decl_stmt_.emplace(params[i], add_stmt(StmtKind::ParamDecl, file, md.params[i].name.line, mid, ctx));
        frame.scopes.back().emplace(md.params[i].name.name, params[i]);
      }
      statements(md.body, file, cid, mid, frame);
      current_method_.reset();
    }
  }

  void finish() {
    const std::size_t n = m_.decls_.size();
    m_.decl_stmt_.assign(n, StmtId{});
    for (auto& [d, s] : decl_stmt_) m_.decl_stmt_[d.value] = s;
    // Locals were appended after compute_overrides(); extend the group table.
    for (std::size_t i = m_.group_of_.size(); i < n; ++i) m_.group_of_.push_back(static_cast<std::uint32_t>(i));
    m_.readers_.assign(n, {});
    m_.writers_.assign(n, {});
    for (const Statement& s : m_.stmts_) {
      for (DeclId r : s.reads) m_.readers_[r.value].push_back(s.id);
      for (DeclId w : s.writes) m_.writers_[w.value].push_back(s.id);
    }
    std::stable_sort(m_.refs_.begin(), m_.refs_.end(), [](const Reference& a, const Reference& b) {
      return std::tie(a.file, a.span.begin) < std::tie(b.file, b.span.begin);
    });
    m_.refs_by_target_.assign(n, {});
    for (std::uint32_t i = 0; i < m_.refs_.size(); ++i) m_.refs_by_target_[m_.refs_[i].target.value].push_back(i);
  }

  CodeModel m_;
  std::map<DeclId, ClassInfo> classes_;
  std::map<DeclId, const FieldDecl*> field_ast_;
  std::map<DeclId, const MethodDecl*> method_ast_;
  std::map<DeclId, std::vector<DeclId>> params_;
  std::map<DeclId, StmtId> decl_stmt_;
  std::optional<DeclId> current_method_;
};

// ─── CodeModel queries ─────────────────────────────────────────

std::vector<const Reference*> CodeModel::references_to(DeclId id) const {
  std::vector<const Reference*> out;
  for (std::uint32_t i : refs_by_target_.at(id.value)) out.push_back(&refs_[i]);
  return out;
}

std::vector<DeclId> CodeModel::declarations_in(std::string_view file) const {
  std::vector<DeclId> out;
  for (const Declaration& d : decls_)
    if (d.file == file) out.push_back(d.id);
  std::stable_sort(out.begin(), out.end(),
                   [&](DeclId a, DeclId b) { return decls_[a.value].span.begin < decls_[b.value].span.begin; });
  return out;
}

std::vector<Location> CodeModel::defuse(DeclId id) const {
  std::set<Location> locs;
  for (StmtId s : readers_.at(id.value)) locs.insert({stmts_[s.value].file, stmts_[s.value].line});
  for (StmtId s : writers_.at(id.value)) locs.insert({stmts_[s.value].file, stmts_[s.value].line});
  return {locs.begin(), locs.end()};
}

std::optional<DeclId> CodeModel::class_named(std::string_view name) const {
  auto it = classes_.find(name);
  if (it == classes_.end()) return std::nullopt;
  return it->second;
}

std::optional<DeclId> CodeModel::superclass(DeclId cls) const {
  auto it = superclass_.find(cls);
  if (it == superclass_.end()) return std::nullopt;
  return it->second;
}

std::optional<DeclId> CodeModel::overridden(DeclId method) const {
  auto it = overrides_.find(method);
  if (it == overrides_.end()) return std::nullopt;
  return it->second;
}

std::vector<DeclId> CodeModel::override_group(DeclId method) const {
  auto it = group_members_.find(group_of_.at(method.value));
  if (it == group_members_.end()) return {method};
  return it->second;
}

DeclId CodeModel::canonical(DeclId id) const { return DeclId{group_of_.at(id.value)}; }

// ─── Construction entry points ─────────────────────────────────

namespace {

std::vector<std::string> pick_source_dirs(const std::map<std::string, std::string>& texts,
                                          std::vector<std::string> requested) {
  if (!requested.empty()) return requested;
  std::vector<std::string> dirs;
  for (const auto& d : default_source_dirs()) {
    for (const auto& [path, text] : texts) {
      if (under_dir(path, d)) {
        dirs.push_back(d);
        break;
      }
    }
  }
  bool all_covered = std::all_of(texts.begin(), texts.end(), [&](const auto& kv) {
    return std::any_of(dirs.begin(), dirs.end(), [&](const std::string& d) { return under_dir(kv.first, d); });
  });
  if (dirs.empty() || !all_covered) dirs.push_back(".");
  return dirs;
}

CodeModel build_from(ProjectLayout layout, const CodeModel* base, int version) {
  std::map<std::string, std::shared_ptr<const FileAst>> asts;
  for (const SourceFile& f : layout.files) {
    if (base) {
      const SourceFile* old = base->layout().find(f.path);
      auto it = base->asts().find(f.path);
      if (old && it != base->asts().end() && old->text == f.text) {
        asts.emplace(f.path, it->second);
        continue;
      }
    }
    asts.emplace(f.path, parse_file(f));
  }
  ModelBuilder builder(std::move(layout), std::move(asts), version);
  return builder.build();
}

}  // namespace

CodeModel parse_texts(const std::string& root, const std::map<std::string, std::string>& texts,
                      std::vector<std::string> source_dirs, int version) {
  ProjectLayout layout;
  layout.root_dir = root;
  layout.source_dirs = pick_source_dirs(texts, std::move(source_dirs));
  for (const auto& [path, text] : texts) {
    bool covered = std::any_of(layout.source_dirs.begin(), layout.source_dirs.end(),
                               [&](const std::string& d) { return under_dir(path, d); });
    if (!covered) throw SyntaxError(path, 0, "file is outside the source directories");
    layout.files.push_back(make_source_file(path, text));
  }
  return build_from(std::move(layout), nullptr, version);
}

CodeModel reparse(const CodeModel& base, const std::map<std::string, std::string>& changed_texts) {
  ProjectLayout layout;
  layout.root_dir = base.layout().root_dir;
  layout.source_dirs = base.layout().source_dirs;
  for (const SourceFile& f : base.layout().files) {
    auto it = changed_texts.find(f.path);
    if (it == changed_texts.end()) layout.files.push_back(f);
    else layout.files.push_back(make_source_file(f.path, it->second));
  }
  return build_from(std::move(layout), &base, base.version() + 1);
}

CodeModel parse_project(const std::string& root) {
  std::map<std::string, std::string> texts;
  fs::path base(root);
  if (!fs::is_directory(base)) throw SyntaxError(root, 0, "project root is not a directory");
  for (const auto& entry : fs::recursive_directory_iterator(base)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".mini") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    texts.emplace(fs::relative(entry.path(), base).generic_string(), buf.str());
  }
  return parse_texts(root, texts);
}

// ─── Queries ───────────────────────────────────────────────────

std::vector<const Declaration*> resolve_identifier(const CodeModel& model, std::string_view name,
                                                   std::string_view file, int line_hint,
                                                   std::optional<DeclKind> kind_hint) {
  std::set<std::uint32_t> ids;
  for (const Declaration& d : model.declarations())
    if (d.file == file && d.name == name) ids.insert(d.id.value);
  for (const Reference& r : model.references())
    if (r.file == file && model.decl(r.target).name == name) ids.insert(r.target.value);
  std::vector<const Declaration*> out;
  for (std::uint32_t id : ids) out.push_back(&model.decl(DeclId{id}));
  auto key = [&](const Declaration* d) {
    int dist = std::abs(d->line - line_hint);
    int kind_miss = kind_hint && d->kind == *kind_hint ? 0 : 1;
    return std::make_tuple(dist, kind_miss, d->line, d->id.value);
  };
  std::stable_sort(out.begin(), out.end(), [&](const Declaration* a, const Declaration* b) { return key(a) < key(b); });
  return out;
}

std::set<StmtId> slice_statements(const CodeModel& model, DeclId decl, SliceDirection direction) {
  std::set<StmtId> result{model.decl_statement(decl)};
  std::vector<bool> seen(model.declarations().size(), false);
  std::vector<DeclId> work{decl};
  seen[decl.value] = true;
  while (!work.empty()) {
    DeclId d = work.back();
    work.pop_back();
    const auto& stmts = direction == SliceDirection::Forward ? model.readers(d) : model.writers(d);
    for (StmtId s : stmts) {
      result.insert(s);
      const Statement& st = model.stmt(s);
      const auto& next = direction == SliceDirection::Forward ? st.writes : st.reads;
      for (DeclId n : next) {
        if (seen[n.value]) continue;
        seen[n.value] = true;
        work.push_back(n);
      }
    }
  }
  return result;
}

std::set<Location> slice(const CodeModel& model, DeclId decl, SliceDirection direction) {
  std::set<Location> out;
  for (StmtId s : slice_statements(model, decl, direction)) out.insert({model.stmt(s).file, model.stmt(s).line});
  return out;
}

std::string qualified_name(const CodeModel& model, DeclId id) {
  const Declaration& d = model.decl(id);
  std::string prefix;
  if (d.owner) prefix = qualified_name(model, *d.owner) + ".";
  else {
    std::string pkg = model.layout().package_of(d.file);
    if (!pkg.empty()) prefix = pkg + ".";
  }
  return prefix + d.name;
}

}  // namespace corename
