#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "corename/benchmark.hpp"
#include "corename/orchestrator.hpp"
#include "corename/service.hpp"

using namespace corename;

namespace {

enum Exit { kOk = 0, kSessionError = 1, kUsage = 2, kAborted = 3 };

std::atomic<bool> g_interrupted{false};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct Common {
  std::string project;
  std::string seed;
  std::string gold;
  bool interactive = false;
  bool auto_accept = false;
  std::string reasoner;
  bool materialize = false;
  bool json_out = false;
  bool no_replication = false;
  bool aligned_guards = false;
  bool seed_preapplied = false;
  std::string session_dir;
  std::string bind;
  int K = 50, rounds_cap = 3, per_file_cap = 3, tool_failure_cap = 3;
  bool exit_when_done = false;
};

void add_session_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--reasoner", c.reasoner, "deterministic | external (env CORENAME_REASONER)")
      ->check(CLI::IsMember({"deterministic", "external"}));
  cmd->add_flag("--materialize", c.materialize, "write renamed files back to disk");
  cmd->add_flag("--json", c.json_out, "machine-readable output");
  cmd->add_flag("--no-replication", c.no_replication, "plan the seed file only");
  cmd->add_option("--K", c.K, "file-plan cap")->check(CLI::PositiveNumber);
  cmd->add_option("--rounds-cap", c.rounds_cap, "replication rounds")->check(CLI::PositiveNumber);
  cmd->add_option("--per-file-cap", c.per_file_cap, "plan iterations per file")->check(CLI::PositiveNumber);
  cmd->add_option("--tool-failure-cap", c.tool_failure_cap, "tool failures per file")->check(CLI::PositiveNumber);
  cmd->add_option("--session-dir", c.session_dir, "transcript directory (env CORENAME_SESSION_DIR)");
}

SessionConfig session_config(const Common& c) {
  SessionConfig sc;
  sc.K = c.K;
  sc.rounds_cap = c.rounds_cap;
  sc.per_file_cap = c.per_file_cap;
  sc.tool_failure_cap = c.tool_failure_cap;
  sc.reasoner_mode = c.reasoner.empty() ? env_or("CORENAME_REASONER", "deterministic") : c.reasoner;
  sc.materialize = c.materialize;
  sc.replication = !c.no_replication;
  sc.seed_preapplied = c.seed_preapplied;
  std::string dir = c.session_dir.empty() ? env_or("CORENAME_SESSION_DIR", "") : c.session_dir;
  if (!dir.empty()) sc.session_dir = dir;
  return sc;
}

std::unique_ptr<Reasoner> make_reasoner(const std::string& mode, const std::optional<std::string>& session_dir = {}) {
  if (mode == "deterministic") return std::make_unique<DeterministicReasoner>();
  if (mode != "external") throw CLI::ValidationError("--reasoner", "unknown reasoner mode " + mode);
  ExternalConfig cfg = external_config_from_env();
  if (cfg.url.empty()) throw CLI::ValidationError("--reasoner", "external mode needs CORENAME_REASONER_URL");
  if (session_dir) {
    std::filesystem::create_directories(*session_dir);
    cfg.transcript_path = *session_dir + "/reasoner.jsonl";
  }
  return std::make_unique<FallbackReasoner>(
      std::make_unique<ExternalReasoner>(cfg), std::make_unique<DeterministicReasoner>(),
      [](const std::string& why) { std::cerr << "warning: reasoner unavailable, degraded to deterministic: " << why << '\n'; });
}

void print_result(const SessionResult& r, const std::optional<SessionMetrics>& metrics, bool json_out) {
  if (json_out) {
    json j = r;
    if (metrics) j["metrics"] = *metrics;
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << "status: " << r.status << (r.reasoner_degraded ? " (reasoner degraded)" : "") << '\n';
  std::cout << "applied " << r.c_star.applied.size() << " rename(s):\n";
  for (const RenameRefactoring& a : r.c_star.applied) std::cout << "  " << to_string(a) << '\n';
  const Counters& c = r.counters;
  std::cout << "files inspected " << c.files_inspected << ", offered " << c.suggestions_offered << ", accepted "
            << c.accepted << ", rejected " << c.rejected << ", reasoner calls " << c.llm_calls << ", tool calls "
            << c.tool_calls << ", actions " << c.actions << '\n';
  for (const std::string& w : r.warnings) std::cout << "warning: " << w << '\n';
  if (metrics)
    std::cout << "TP " << metrics->tp << "  FP " << metrics->fp << "  FN " << metrics->fn << "  precision "
              << metrics->precision.str() << "  recall " << metrics->recall.str() << "  F1 " << metrics->f1.str()
              << '\n';
  if (r.events_path) std::cout << "events: " << *r.events_path << '\n';
}

int run_command(const Common& c, bool serve) {
  SessionConfig sc = session_config(c);
  std::optional<GoldSet> gold;
  if (!c.gold.empty()) gold = load_gold(c.gold);
  std::string project = c.project.empty() && gold ? fixture_dir(*gold) : c.project;
  if (project.empty()) throw CLI::ValidationError("--project", "required unless --oracle names a gold set");

  RenameRefactoring seed;
  if (!c.seed.empty()) {
    auto parsed = parse_rename_spec(c.seed);
    if (!parsed) throw CLI::ValidationError("--seed", "expected file:line:old:new:kind, got '" + c.seed + "'");
    seed = *parsed;
  } else if (gold) {
    seed = select_seed(*gold);
  } else {
    throw CLI::ValidationError("--seed", "required unless --oracle names a gold set");
  }

  CodeModel model;
  try {
    model = parse_project(project);
  } catch (const ModelError& e) {
    throw ParseFailure(e.file() + ":" + std::to_string(e.line()) + ": " + e.what());
  }

  std::set<GoldKey> gold_keys;
  std::unique_ptr<FeedbackSource> feedback;
  InteractiveFeedback* interactive = nullptr;
  if (serve || c.interactive) {
    sc.feedback_mode = FeedbackMode::Interactive;
    auto f = std::make_unique<InteractiveFeedback>();
    interactive = f.get();
    feedback = std::move(f);
  } else if (gold) {
    sc.feedback_mode = FeedbackMode::Oracle;
    if (c.aligned_guards) sc.initial_guards = gold->aligned_guards;
    gold_keys = resolve_gold(model, updated_gold(*gold, seed).renames);
    feedback = std::make_unique<OracleFeedback>(gold_keys);
  } else if (c.auto_accept) {
    sc.feedback_mode = FeedbackMode::AutoAccept;
    feedback = std::make_unique<AutoAcceptFeedback>();
  } else {
    throw CLI::ValidationError("run", "choose one of --interactive, --oracle <gold.json>, --auto-accept");
  }

  auto reasoner = make_reasoner(sc.reasoner_mode, sc.session_dir);
  Session session(std::move(model), seed, sc, *reasoner, *feedback);
  std::unique_ptr<SessionService> service;
  if (interactive) {
    ServiceOptions opts = service_options_from_env({});
    if (!c.bind.empty()) {
      auto colon = c.bind.rfind(':');
      if (colon == std::string::npos) throw CLI::ValidationError("--bind", "expected host:port");
      opts.host = c.bind.substr(0, colon);
      opts.port = std::stoi(c.bind.substr(colon + 1));
    }
    service = std::make_unique<SessionService>(session, *interactive, opts);
    if (!service->start()) throw std::runtime_error("cannot bind " + opts.host + ":" + std::to_string(opts.port));
    std::cerr << "review session at " << service->url() << '\n';
  }

  SessionResult result = session.run();
  if (interactive) interactive->close();
  std::optional<SessionMetrics> metrics;
  if (gold && !interactive) metrics = score(applied_keys(result), offered_keys(result), gold_keys);
  print_result(result, metrics, c.json_out);
  if (service && serve && !c.exit_when_done) {
    std::cerr << "session " << result.status << "; still serving read-only, Ctrl-C to exit\n";
    std::signal(SIGINT, [](int) { g_interrupted = true; });
    std::signal(SIGTERM, [](int) { g_interrupted = true; });
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  return result.status == "aborted" ? kAborted : kOk;
}

int parse_command(const std::string& project, bool json_out) {
  CodeModel m;
  try {
    m = parse_project(project);
  } catch (const ModelError& e) {
    throw ParseFailure(e.file() + ":" + std::to_string(e.line()) + ": " + e.what());
  }
  std::map<std::string, int> by_kind;
  for (const Declaration& d : m.declarations()) ++by_kind[std::string(to_string(d.kind))];
  int code_refs = 0, comment_refs = 0;
  for (const Reference& r : m.references()) (r.in_comment ? comment_refs : code_refs)++;
  if (json_out) {
    std::cout << json{{"files", m.layout().files.size()},
                      {"source_dirs", m.layout().source_dirs},
                      {"declarations", m.declarations().size()},
                      {"declarations_by_kind", by_kind},
                      {"references", code_refs},
                      {"comment_references", comment_refs},
                      {"statements", m.statements().size()}}
                     .dump(2)
              << '\n';
    return kOk;
  }
  std::cout << "files " << m.layout().files.size() << "\ndeclarations " << m.declarations().size() << '\n';
  for (const auto& [kind, n] : by_kind) std::cout << "  " << kind << ' ' << n << '\n';
  std::cout << "references " << code_refs << " (+" << comment_refs << " in comments)\nstatements "
            << m.statements().size() << '\n';
  return kOk;
}

int bench_command(const std::string& suite, const Common& c, const std::string& out_path) {
  BenchConfig bc;
  bc.session = session_config(c);
  bc.session.feedback_mode = c.auto_accept ? FeedbackMode::AutoAccept : FeedbackMode::Oracle;
  bc.use_aligned_guards = c.aligned_guards;
  std::string mode = bc.session.reasoner_mode;
  bc.make_reasoner = [mode] { return make_reasoner(mode); };
  BenchReport report = run_benchmark(suite, bc);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << json(report).dump(2) << '\n';
  }
  if (c.json_out) std::cout << json(report).dump(2) << '\n';
  else std::cout << format_table(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corename: coordinated renaming for MiniLang projects"};
  app.require_subcommand(1);
  Common c;
  std::string suite, out_path;

  auto* run = app.add_subcommand("run", "run one session from a seed rename");
  run->add_option("--project", c.project, "project root");
  run->add_option("--seed", c.seed, "seed rename file:line:old:new:kind");
  auto* i_opt = run->add_flag("--interactive", c.interactive, "review through the session service");
  auto* o_opt = run->add_option("--oracle", c.gold, "gold set JSON answering reviews");
  auto* a_opt = run->add_flag("--auto-accept", c.auto_accept, "accept every suggestion");
  i_opt->excludes(o_opt)->excludes(a_opt);
  o_opt->excludes(a_opt);
  run->add_flag("--aligned-guards", c.aligned_guards, "install the gold set's aligned guards on scope@0");
  run->add_flag("--seed-preapplied", c.seed_preapplied, "the seed is already present in the sources");
  run->add_option("--bind", c.bind, "service address host:port (env CORENAME_BIND)");
  add_session_flags(run, c);

  auto* serve = app.add_subcommand("serve", "run an interactive session behind the HTTP service");
  serve->add_option("--project", c.project, "project root")->required();
  serve->add_option("--seed", c.seed, "seed rename file:line:old:new:kind")->required();
  serve->add_option("--bind", c.bind, "service address host:port (env CORENAME_BIND)");
  serve->add_flag("--seed-preapplied", c.seed_preapplied, "the seed is already present in the sources");
  serve->add_flag("--exit-when-done", c.exit_when_done, "stop serving once the session ends");
  add_session_flags(serve, c);

  auto* bench = app.add_subcommand("bench", "run every gold set of a suite");
  bench->add_option("--suite", suite, "directory of gold-set JSON files")->required();
  bench->add_flag("--auto-accept", c.auto_accept, "accept every suggestion instead of consulting gold");
  bench->add_flag("--aligned-guards", c.aligned_guards, "install each gold set's aligned guards");
  bench->add_option("--out", out_path, "write the JSON report here");
  add_session_flags(bench, c);

  auto* parse = app.add_subcommand("parse", "print model statistics");
  parse->add_option("--project", c.project, "project root")->required();
  parse->add_flag("--json", c.json_out, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return run_command(c, false);
    if (*serve) return run_command(c, true);
    if (*bench) return bench_command(suite, c, out_path);
    if (*parse) return parse_command(c.project, c.json_out);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSessionError;
  }
  return kUsage;
}
