// gaar: command-line front end for reconstruction, validity checking and
// evaluation. Results go to stdout; diagnostics go to stderr.
//
// Exit codes: 0 success, 1 domain failure (invalid problem, failed run,
// exhausted run under --strict, unreadable input), 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaar/dataset.hpp"
#include "gaar/eval.hpp"
#include "gaar/llm.hpp"
#include "gaar/pipeline.hpp"
#include "gaar/solver.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw gaar::Error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

json string_array(const std::vector<std::string>& xs) { return json(xs); }

// ---- backend selection --------------------------------------------------------

struct BackendFlags {
  std::string mode = "replay";
  std::string model = "default";
  std::string cassette;
  std::string script;
  std::string record;
  std::string endpoint = "https://api.openai.com/v1";
  std::string credential_env = "GAAR_API_KEY";
  double temperature = 0.0;
};

void add_backend_flags(CLI::App& cmd, BackendFlags& f) {
  cmd.add_option("--backend", f.mode, "live, replay or scripted")
      ->check(CLI::IsMember({"live", "replay", "scripted"}));
  cmd.add_option("--model", f.model, "Model id sent with every request");
  cmd.add_option("--cassette", f.cassette, "Cassette for replay mode");
  cmd.add_option("--script", f.script,
                 "Scripted responses: a directory of .txt files (name order) or a JSON array");
  cmd.add_option("--record", f.record, "Append every exchange to this cassette");
  cmd.add_option("--endpoint", f.endpoint, "Base URL of the chat-completions API (live)");
  cmd.add_option("--credential-env", f.credential_env,
                 "Environment variable holding the API key (live)");
  cmd.add_option("--temperature", f.temperature, "Sampling temperature");
}

std::vector<std::string> load_script(const fs::path& p) {
  std::vector<std::string> out;
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(read_text(f));
    return out;
  }
  const json j = json::parse(read_text(p));
  if (!j.is_array()) throw gaar::InvalidArgument("script file must hold a JSON array");
  for (const auto& s : j) out.push_back(s.get<std::string>());
  return out;
}

// Owns the selected backend and, with --record, the recorder wrapped around it.
class BackendStack {
 public:
  explicit BackendStack(const BackendFlags& f) {
    if (f.mode == "replay") {
      if (f.cassette.empty()) throw UsageError("--backend replay requires --cassette");
      base_ = std::make_unique<gaar::llm::ReplayBackend>(fs::path(f.cassette));
    } else if (f.mode == "scripted") {
      if (f.script.empty()) throw UsageError("--backend scripted requires --script");
      base_ = std::make_unique<gaar::llm::ScriptedBackend>(load_script(f.script));
    } else {
      if (f.credential_env.empty()) throw UsageError("--credential-env must name a variable");
      gaar::llm::LiveConfig cfg;
      cfg.endpoint = f.endpoint;
      cfg.credential_env = f.credential_env;
      base_ = std::make_unique<gaar::llm::LiveBackend>(cfg);
    }
    if (!f.record.empty()) {
      std::vector<std::string> secrets;
      if (const char* key = std::getenv(f.credential_env.c_str()); key != nullptr && *key) {
        secrets.emplace_back(key);
      }
      recorder_ = std::make_unique<gaar::llm::RecordingBackend>(*base_, fs::path(f.record),
                                                                std::move(secrets), true);
    }
  }

  gaar::llm::Backend& get() { return recorder_ ? *recorder_ : *base_; }

 private:
  std::unique_ptr<gaar::llm::Backend> base_;
  std::unique_ptr<gaar::llm::Backend> recorder_;
};

// ---- pipeline flags -----------------------------------------------------------

struct PipelineFlags {
  std::string scheme = "general";
  std::size_t max_iter = 10;
  std::size_t fallacy_n = 3;
  std::size_t max_revisions = 2;
  bool no_fallacy_path = false;
  bool coarse = false;
  std::vector<std::string> drop;
  bool no_pruning = false;
  bool no_scheme_instruction = false;
  std::size_t premise_cap = 16;
  std::string assets;
};

void add_pipeline_flags(CLI::App& cmd, PipelineFlags& f) {
  cmd.add_option("--scheme", f.scheme, "Argument-type catalog: general or specific")
      ->check(CLI::IsMember({"general", "specific"}));
  cmd.add_option("--max-iter", f.max_iter, "Iteration budget");
  cmd.add_option("--fallacy-n", f.fallacy_n,
                 "Non-converging iterations before a fallacy revision");
  cmd.add_option("--max-revisions", f.max_revisions, "Fallacy revisions allowed per run");
  cmd.add_flag("--no-fallacy-path", f.no_fallacy_path, "Skip fallacy detection and revision");
  cmd.add_flag("--coarse-faithfulness", f.coarse, "Single faithfulness verdict");
  cmd.add_option("--drop-criterion", f.drop, "Disable a faithfulness criterion (repeatable)")
      ->check(CLI::IsMember({"accuracy", "completeness", "parsimony"}));
  cmd.add_flag("--no-pruning", f.no_pruning, "Keep premises outside every minimal set");
  cmd.add_flag("--no-scheme-instruction", f.no_scheme_instruction,
               "Omit argument-type guidance from the reconstruction prompt");
  cmd.add_option("--premise-cap", f.premise_cap, "Largest premise count enumerated exactly");
  cmd.add_option("--assets", f.assets, "Asset directory (prompts and catalogs)");
}

gaar::pipeline::PipelineConfig make_config(const PipelineFlags& f, const BackendFlags& b) {
  gaar::pipeline::PipelineConfig c;
  c.scheme_theory = f.scheme == "specific" ? gaar::pipeline::SchemeTheory::kSpecific
                                           : gaar::pipeline::SchemeTheory::kGeneral;
  c.max_iterations = f.max_iter;
  c.fallacy_revision_threshold = f.fallacy_n;
  c.max_fallacy_revisions = f.max_revisions;
  c.fallacy_path = !f.no_fallacy_path;
  c.fine_grained_faithfulness = !f.coarse;
  for (const auto& d : f.drop) c.criteria.erase(*gaar::pipeline::parse_criterion(d));
  c.pruning = !f.no_pruning;
  c.scheme_instruction = !f.no_scheme_instruction;
  c.premise_cap = f.premise_cap;
  c.model = b.model;
  c.temperature = b.temperature;
  try {
    c.validate();
  } catch (const gaar::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return c;
}

gaar::pipeline::Assets load_assets(const PipelineFlags& f) {
  return f.assets.empty() ? gaar::pipeline::Assets::defaults()
                          : gaar::pipeline::Assets::load(f.assets);
}

gaar::pipeline::ArgumentInput read_input(const fs::path& p) {
  const json j = json::parse(read_text(p));
  gaar::pipeline::ArgumentInput in;
  in.topic = j.contains("title") ? j.at("title").get<std::string>()
                                 : j.at("topic").get<std::string>();
  if (j.contains("background") && !j.at("background").is_null()) {
    in.background = j.at("background").get<std::string>();
  }
  in.argument = j.at("argument").get<std::string>();
  in.validate();
  return in;
}

// ---- reconstruct --------------------------------------------------------------

struct ReconstructFlags {
  std::string input;
  bool batch = false;
  std::string out;
  std::string sidecar;
  std::string trace;
  std::string trace_dir;
  std::string source = "synthetic";
  std::size_t jobs = 1;
  bool strict = false;
};

int run_reconstruct(const ReconstructFlags& r, const PipelineFlags& pf, const BackendFlags& bf) {
  const auto config = make_config(pf, bf);
  const auto assets = load_assets(pf);
  BackendStack backend(bf);

  if (r.batch) {
    if (r.out.empty()) throw UsageError("--batch requires --out");
    gaar::dataset::BatchOptions opt;
    opt.jobs = r.jobs;
    if (!r.sidecar.empty()) opt.sidecar = r.sidecar;
    if (!r.trace_dir.empty()) opt.trace_dir = r.trace_dir;
    auto src = gaar::dataset::parse_source(r.source);
    if (!src) throw UsageError("unknown --source tag " + r.source);
    opt.default_source = *src;
    const auto summary =
        gaar::dataset::batch_reconstruct(r.input, config, backend.get(), r.out, opt, assets);
    std::cout << gaar::dataset::to_json(summary).dump(2) << '\n';
    const bool all_converged = summary.converged == summary.total;
    return r.strict && !all_converged ? kDomainError : kOk;
  }

  const auto input = read_input(r.input);
  const auto result = gaar::pipeline::run_gaar(input, config, backend.get(), assets);
  const auto& t = result.trace;
  if (!r.trace.empty()) gaar::pipeline::write_trace(t, r.trace);
  json out = {
      {"status", std::string(gaar::pipeline::to_string(t.status))},
      {"iterations", t.iterations.size()},
      {"selected_iteration", t.selected_iteration ? json(*t.selected_iteration) : json(nullptr)},
      {"llm_calls", t.llm_calls()},
      {"revisions", t.revisions()},
      {"trace_hash", gaar::pipeline::trace_hash(t)},
      {"reconstruction", gaar::pipeline::to_json(result.reconstruction)},
      {"fallacy", result.fallacy ? gaar::pipeline::to_json(*result.fallacy) : json(nullptr)},
      {"formalization",
       result.formalization ? gaar::pipeline::to_json(*result.formalization) : json(nullptr)}};
  std::cout << out.dump(2) << '\n';
  switch (t.status) {
    case gaar::pipeline::RunStatus::kConverged:
      return kOk;
    case gaar::pipeline::RunStatus::kExhausted:
      std::cerr << "gaar: run exhausted " << t.iterations.size() << " iterations\n";
      return r.strict ? kDomainError : kOk;
    case gaar::pipeline::RunStatus::kFailed:
      std::cerr << "gaar: run failed: " << t.error << '\n';
      return kDomainError;
  }
  return kDomainError;
}

// ---- validate / prune ---------------------------------------------------------

struct SolverFlags {
  std::string problem;
  std::size_t cap = 16;
  bool ascii = false;
};

int run_validate(const SolverFlags& f) {
  const auto problem = gaar::solver::parse_problem(read_text(f.problem));
  const auto verdict = gaar::solver::check_validity(problem.premises, problem.conclusion);
  if (!verdict.valid()) {
    std::cout << "invalid\n";
    json model = json::object();
    for (const auto& [atom, value] : *verdict.countermodel) model[atom] = value;
    std::cout << "countermodel " << model.dump() << '\n';
    return kDomainError;
  }
  const auto sets = gaar::solver::minimal_premise_sets(
      problem.premises, problem.conclusion, {f.cap, /*allow_fallback=*/true});
  std::vector<std::string> pruned;
  for (const auto& p : problem.premises) {
    if (std::find(sets.union_labels.begin(), sets.union_labels.end(), p.label) ==
        sets.union_labels.end()) {
      pruned.push_back(p.label);
    }
  }
  std::cout << "valid\n";
  std::cout << "pruned " << string_array(pruned).dump() << '\n';
  std::cout << "minimal_sets " << json(sets.minimal_sets).dump() << '\n';
  std::cout << "exact " << (sets.exact ? "true" : "false") << '\n';
  return kOk;
}

int run_prune(const SolverFlags& f) {
  const auto problem = gaar::solver::parse_problem(read_text(f.problem));
  const auto kept =
      gaar::solver::prune(problem.premises, problem.conclusion, {f.cap, /*allow_fallback=*/true});
  std::cout << gaar::solver::render_problem(
      kept, problem.conclusion, f.ascii ? gaar::fol::Style::kAscii : gaar::fol::Style::kUnicode);
  return kOk;
}

// ---- evaluate -----------------------------------------------------------------

struct EvaluateFlags {
  std::string log;
  std::string a;
  std::string b;
  std::vector<std::string> methods;
  bool swap = false;
  double base = 10.0;
  double scale = 400.0;
  double initial = 1000.0;
};

void print_ratings(const gaar::eval::MatchLog& log, const EvaluateFlags& f) {
  gaar::eval::BtOptions opt;
  opt.elo = {f.base, f.scale, f.initial};
  const auto fit = gaar::eval::fit_bradley_terry(log, opt);
  if (fit.regularized) {
    std::cerr << "gaar: win graph not strongly connected; pseudo-counts added\n";
  }
  std::vector<std::pair<std::string, double>> rows(fit.ratings.begin(), fit.ratings.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::cout << "method\trating\n";
  for (const auto& [m, r] : rows) std::cout << m << '\t' << fixed(r, 2) << '\n';
}

int run_ratings(const EvaluateFlags& f) {
  print_ratings(gaar::eval::read_match_log(f.log), f);
  return kOk;
}

int run_rate(const EvaluateFlags& f) {
  const auto log = gaar::eval::read_match_log(f.log);
  const double rate = gaar::eval::winning_rate(log, f.a, f.b);
  std::cout << f.a << '\t' << f.b << '\t' << fixed(rate, 1) << '\n';
  return kOk;
}

// --method NAME=corpus.jsonl; items are the ids every corpus shares.
int run_pairwise(const EvaluateFlags& f, const PipelineFlags& pf, const BackendFlags& bf) {
  if (f.methods.size() < 2) throw UsageError("pairwise needs at least two --method entries");
  const auto assets = load_assets(pf);
  BackendStack backend(bf);
  std::map<std::string, std::map<std::string, gaar::pipeline::Reconstruction>> recons;
  std::map<std::string, gaar::pipeline::ArgumentInput> inputs;
  std::vector<std::string> names;
  for (const auto& spec : f.methods) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--method expects NAME=PATH");
    const std::string name = spec.substr(0, eq);
    if (recons.count(name)) throw UsageError("duplicate method " + name);
    names.push_back(name);
    for (const auto& r : gaar::dataset::read_corpus(spec.substr(eq + 1))) {
      recons[name][r.id] = r.reconstruction;
      inputs.emplace(r.id, gaar::pipeline::ArgumentInput{r.title, r.background, r.argument});
    }
  }
  std::vector<std::string> items;
  for (const auto& [id, in] : inputs) {
    bool everywhere = true;
    for (const auto& [m, rs] : recons) everywhere = everywhere && rs.count(id);
    if (everywhere) items.push_back(id);
  }
  if (items.empty()) throw gaar::Error("the method corpora share no item ids");
  gaar::eval::PairwiseJudge judge{backend.get(), assets.pairwise, inputs, recons, bf.model,
                                  bf.temperature};
  const auto log = gaar::eval::run_league(names, items, judge, {f.swap});
  if (!f.log.empty()) gaar::eval::write_match_log(log, f.log);
  print_ratings(log, f);
  return kOk;
}

// ---- stats / split / topsis ---------------------------------------------------

int run_stats(const std::string& corpus, bool as_json, bool sample) {
  const auto stats = gaar::dataset::compute_stats(
      gaar::dataset::read_corpus(corpus),
      sample ? gaar::dataset::Deviation::kSample : gaar::dataset::Deviation::kPopulation);
  if (as_json) {
    std::cout << gaar::dataset::to_json(stats).dump(2) << '\n';
  } else {
    std::cout << gaar::dataset::render_stats_table(stats);
  }
  return kOk;
}

struct SplitFlags {
  std::string corpus;
  std::size_t train = 0;
  std::size_t test = 0;
  std::uint64_t seed = 0;
  std::string train_out;
  std::string test_out;
};

int run_split(const SplitFlags& f) {
  const auto records = gaar::dataset::read_corpus(f.corpus);
  const auto [train, test] = gaar::dataset::split(records, f.train, f.test, f.seed);
  gaar::dataset::write_corpus(train, f.train_out);
  gaar::dataset::write_corpus(test, f.test_out);
  auto ids = [](const std::vector<gaar::dataset::ArguinasRecord>& rs) {
    std::vector<std::string> out;
    for (const auto& r : rs) out.push_back(r.id);
    return out;
  };
  json out = {{"seed", f.seed},
              {"train", train.size()},
              {"test", test.size()},
              {"train_ids", ids(train)},
              {"test_ids", ids(test)}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int run_topsis(const std::string& csv) {
  const auto rows = gaar::eval::read_topsis_csv(csv);
  const auto scores = gaar::eval::topsis(rows);
  std::cout << "method\tscore\n";
  for (const auto& r : rows) std::cout << r.method << '\t' << fixed(scores.at(r.method), 2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Argument reconstruction, validity checking and evaluation"};
  app.name("gaar");
  app.require_subcommand(1);

  BackendFlags backend_flags;
  PipelineFlags pipeline_flags;

  ReconstructFlags rf;
  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct one argument or a corpus");
  reconstruct->add_option("input", rf.input, "Argument JSON file, or a corpus with --batch")
      ->required();
  reconstruct->add_flag("--batch", rf.batch, "Treat input as a line-delimited corpus");
  reconstruct->add_option("--out", rf.out, "Output corpus (batch)");
  reconstruct->add_option("--sidecar", rf.sidecar, "Rejected-run log (batch)");
  reconstruct->add_option("--trace", rf.trace, "Write the run trace here (single)");
  reconstruct->add_option("--trace-dir", rf.trace_dir, "Write one trace per run here (batch)");
  reconstruct->add_option("--source", rf.source, "Source tag for entries without one (batch)");
  reconstruct->add_option("--jobs", rf.jobs, "Concurrent runs (batch)")
      ->check(CLI::PositiveNumber);
  reconstruct->add_flag("--strict", rf.strict, "Exit 1 when a run does not converge");
  add_backend_flags(*reconstruct, backend_flags);
  add_pipeline_flags(*reconstruct, pipeline_flags);

  SolverFlags sf;
  auto* validate = app.add_subcommand("validate", "Check a problem file and report prunable premises");
  validate->add_option("problem", sf.problem, "One formula per line, last line CONCLUSION: ...")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--cap", sf.cap, "Largest premise count enumerated exactly");
  auto* prune = app.add_subcommand("prune", "Print the problem restricted to needed premises");
  prune->add_option("problem", sf.problem, "Problem file")->required()->check(CLI::ExistingFile);
  prune->add_option("--cap", sf.cap, "Largest premise count enumerated exactly");
  prune->add_flag("--ascii", sf.ascii, "Render connectives in ASCII");

  EvaluateFlags ef;
  auto* evaluate = app.add_subcommand("evaluate", "Pairwise judging and ratings");
  evaluate->require_subcommand(1);
  auto add_elo = [&](CLI::App& cmd) {
    cmd.add_option("--base", ef.base, "Elo base");
    cmd.add_option("--scale", ef.scale, "Elo scale");
    cmd.add_option("--initial", ef.initial, "Rating of the geometric-mean strength");
  };
  auto* pairwise = evaluate->add_subcommand("pairwise", "Judge every pair of methods per item");
  pairwise->add_option("--method", ef.methods, "NAME=corpus.jsonl (repeatable)")->required();
  pairwise->add_option("--log", ef.log, "Write the match log here");
  pairwise->add_flag("--swap", ef.swap, "Judge both presentation orders; disagreement is a tie");
  add_elo(*pairwise);
  add_backend_flags(*pairwise, backend_flags);
  pairwise->add_option("--assets", pipeline_flags.assets, "Asset directory");
  auto* ratings = evaluate->add_subcommand("ratings", "Bradley-Terry ratings from a match log");
  ratings->add_option("log", ef.log, "Match log")->required()->check(CLI::ExistingFile);
  add_elo(*ratings);
  auto* rate = evaluate->add_subcommand("rate", "Winning rate of A over B in a match log");
  rate->add_option("log", ef.log, "Match log")->required()->check(CLI::ExistingFile);
  rate->add_option("a", ef.a, "Method A")->required();
  rate->add_option("b", ef.b, "Method B")->required();

  std::string corpus;
  bool stats_json = false;
  bool sample_std = false;
  auto* stats = app.add_subcommand("stats", "Per-source corpus statistics");
  stats->add_option("corpus", corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  stats->add_flag("--json", stats_json, "Print JSON instead of a table");
  stats->add_flag("--sample-std", sample_std, "Sample instead of population deviation");

  SplitFlags spf;
  auto* split = app.add_subcommand("split", "Seeded train/test split of a corpus");
  split->add_option("corpus", spf.corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  split->add_option("--train", spf.train, "Training records")->required();
  split->add_option("--test", spf.test, "Test records")->required();
  split->add_option("--seed", spf.seed, "Shuffle seed");
  split->add_option("--train-out", spf.train_out, "Training corpus output")->required();
  split->add_option("--test-out", spf.test_out, "Test corpus output")->required();

  std::string csv;
  auto* topsis = app.add_subcommand("topsis", "TOPSIS scores from method,cost,quality rows");
  topsis->add_option("csv", csv, "CSV file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "gaar: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*reconstruct) return run_reconstruct(rf, pipeline_flags, backend_flags);
    if (*validate) return run_validate(sf);
    if (*prune) return run_prune(sf);
    if (*pairwise) return run_pairwise(ef, pipeline_flags, backend_flags);
    if (*ratings) return run_ratings(ef);
    if (*rate) return run_rate(ef);
    if (*stats) return run_stats(corpus, stats_json, sample_std);
    if (*split) return run_split(spf);
    if (*topsis) return run_topsis(csv);
  } catch (const UsageError& e) {
    std::cerr << "gaar: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "gaar: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}
