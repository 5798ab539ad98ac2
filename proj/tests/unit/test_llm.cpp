#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gaar/llm.hpp"
#include "gaar/log.hpp"
#include "gaar/pipeline.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace gaar::llm;
using gaar::pipeline::Criterion;
using gaar::pipeline::Premise;
using gaar::pipeline::Reconstruction;

std::string walkthrough_response(const char* name) {
  return testsupport::read_file(testsupport::fixture_dir() / "walkthrough" / "responses" / name);
}

// ---- templates ----------------------------------------------------------------

TEST(Template, ReconstructionPromptContainsArgumentVerbatim) {
  auto fx = testsupport::walkthrough();
  const auto& t = gaar::pipeline::Assets::defaults().reconstruction;
  Bindings b = {{"TOPIC", fx.input.topic},      {"BACKGROUND", ""},
                {"ARGUMENT", fx.input.argument}, {"SCHEME_INSTRUCTION", ""},
                {"FALLACY", ""},                {"FEEDBACK", ""},
                {"FORMAT_REMINDER", ""}};
  const std::string prompt = render_prompt(t, b);
  EXPECT_NE(prompt.find(fx.input.argument), std::string::npos);
  EXPECT_NE(prompt.find(fx.input.topic), std::string::npos);
  EXPECT_EQ(prompt.find("[["), std::string::npos);
  EXPECT_NE(prompt.find("## Premises"), std::string::npos);
}

TEST(Template, NoSlotTemplateIsIdentity) {
  auto t = PromptTemplate::from_body("plain", "No slots here, [only] [ brackets ].\n");
  EXPECT_TRUE(t.required.empty());
  EXPECT_EQ(render_prompt(t, {}), t.body);
}

TEST(Template, UnusedBindingIsAcceptedWithWarning) {
  std::vector<std::string> messages;
  auto previous = gaar::log::set_sink(
      [&](gaar::log::Level, std::string_view m) { messages.emplace_back(m); });
  auto t = PromptTemplate::from_body("x", "Hello [[NAME]].");
  EXPECT_EQ(render_prompt(t, {{"NAME", "world"}, {"EXTRA", "1"}}), "Hello world.");
  gaar::log::set_sink(previous);
  ASSERT_EQ(messages.size(), 1u);
  EXPECT_NE(messages[0].find("EXTRA"), std::string::npos);
}

TEST(Template, MissingPlaceholderNamesEverySlot) {
  auto t = PromptTemplate::from_body("x", "[[A]] and [[B]] and [[A]]");
  try {
    render_prompt(t, {{"B", "b"}});
    FAIL() << "expected MissingPlaceholder";
  } catch (const MissingPlaceholder& e) {
    EXPECT_NE(std::string(e.what()).find("A"), std::string::npos);
  }
}

TEST(Template, SubstitutionIsSinglePassAndByteExact) {
  auto t = PromptTemplate::from_body("x", "<[[A]]|[[B]]>");
  EXPECT_EQ(render_prompt(t, {{"A", "[[B]]"}, {"B", " two\n"}}), "<[[B]]| two\n>");
  EXPECT_EQ(placeholders_in("[[lower]] [[OK_1]] [[ ]] [["), (std::set<std::string>{"OK_1"}));
}

TEST(Template, LoadReadsFileAndRequiresItsSlots) {
  const auto p = std::filesystem::temp_directory_path() / "gaar_tpl.txt";
  {
    std::ofstream out(p);
    out << "Topic: [[TOPIC]]\n";
  }
  auto t = load_template(p, "tpl");
  EXPECT_EQ(t.name, "tpl");
  EXPECT_EQ(t.required, (std::set<std::string>{"TOPIC"}));
  EXPECT_THROW(load_template(p.string() + ".missing", "m"), gaar::Error);
}

// ---- backends -----------------------------------------------------------------

CompletionRequest request(std::string tmpl, Bindings b = {}) {
  CompletionRequest r;
  r.model = "m";
  r.template_name = std::move(tmpl);
  r.bindings = std::move(b);
  r.prompt = "prompt for " + r.template_name;
  return r;
}

TEST(Scripted, ReturnsInOrderThenErrors) {
  ScriptedBackend b({"A", "B"});
  EXPECT_EQ(b.complete(request("x")).text, "A");
  EXPECT_EQ(b.complete(request("y")).text, "B");
  EXPECT_THROW(b.complete(request("z")), BackendError);
  EXPECT_EQ(b.calls(), 2u);
}

TEST(Scripted, CursorIsSafeAcrossThreads) {
  std::vector<std::string> responses;
  for (int i = 0; i < 400; ++i) responses.push_back(std::to_string(i));
  ScriptedBackend b(responses);
  std::mutex mu;
  std::set<std::string> seen;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 100; ++i) {
        auto r = b.complete(request("x")).text;
        std::lock_guard lock(mu);
        seen.insert(r);
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(seen.size(), 400u);
}

TEST(Replay, ReturnsRecordedResponsesAndMissesLoudly) {
  const auto path = std::filesystem::temp_directory_path() / "gaar_replay.jsonl";
  {
    ScriptedBackend inner({"one", "two", "three"});
    RecordingBackend rec(inner, path);
    rec.complete(request("a", {{"X", "1"}}));
    rec.complete(request("a", {{"X", "1"}}));
    rec.complete(request("b"));
  }
  ReplayBackend replay(path);
  EXPECT_EQ(replay.complete(request("a", {{"X", "1"}})).text, "one");
  EXPECT_EQ(replay.complete(request("b")).text, "three");
  EXPECT_EQ(replay.complete(request("a", {{"X", "1"}})).text, "two");
  EXPECT_THROW(replay.complete(request("a", {{"X", "1"}})), CacheMiss);
  EXPECT_THROW(replay.complete(request("a", {{"X", "2"}})), CacheMiss);
  replay.rewind();
  EXPECT_EQ(replay.complete(request("a", {{"X", "1"}})).text, "one");
}

TEST(Replay, KeyIgnoresModelAndPromptButNotDecoding) {
  auto a = request("t", {{"X", "1"}});
  auto b = a;
  b.model = "other";
  b.prompt = "different wording";
  EXPECT_EQ(request_key(a), request_key(b));
  b.decoding.temperature = 0.7;
  EXPECT_NE(request_key(a), request_key(b));
  auto c = a;
  c.bindings["X"] = "1 ";
  EXPECT_NE(request_key(a), request_key(c));
}

TEST(Replay, MalformedCassetteLineIsReported) {
  const auto path = std::filesystem::temp_directory_path() / "gaar_bad.jsonl";
  {
    std::ofstream out(path);
    out << "{not json}\n";
  }
  try {
    read_cassette(path);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
  }
}

TEST(Recording, ScrubsCredentials) {
  const std::string secret = "sk-test-0123456789abcdef";
  const auto path = std::filesystem::temp_directory_path() / "gaar_scrub.jsonl";
  {
    FunctionBackend inner([&](const CompletionRequest&) { return "echo " + secret; });
    RecordingBackend rec(inner, path, {secret});
    rec.complete(request("t", {{"ARGUMENT", "my key is " + secret}}));
  }
  const std::string content = testsupport::read_file(path);
  EXPECT_EQ(content.find(secret), std::string::npos);
  EXPECT_NE(content.find("[REDACTED]"), std::string::npos);
  EXPECT_EQ(scrub("a" + secret + "b" + secret, {secret, ""}), "a[REDACTED]b[REDACTED]");
}

TEST(Usage, NegativeCountsRejected) {
  EXPECT_THROW(Usage::from_json({{"prompt_tokens", -1}, {"completion_tokens", 0}}),
               BackendError);
  Usage u = Usage::from_json({{"prompt_tokens", 3}, {"completion_tokens", 4}});
  EXPECT_EQ(u.prompt_tokens, 3);
  EXPECT_EQ(u.completion_tokens, 4);
}

// ---- live backend against a local server ----------------------------------------

class LocalServer {
 public:
  explicit LocalServer(std::function<void(const httplib::Request&, httplib::Response&)> h) {
    server_.Post("/v1/chat/completions", std::move(h));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string completion_body(const std::string& text) {
  return json({{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})},
               {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}})
      .dump();
}

TEST(Live, RateLimitRetriesAreBoundedThenRaise) {
  std::atomic<int> hits{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 429;
    res.set_content("slow down", "text/plain");
  });
  std::vector<std::chrono::milliseconds> sleeps;
  LiveConfig cfg;
  cfg.endpoint = server.endpoint();
  cfg.retry.max_retries = 3;
  cfg.timeout = std::chrono::seconds(5);
  LiveBackend backend(cfg, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  EXPECT_THROW(backend.complete(request("t")), RateLimited);
  EXPECT_EQ(hits.load(), 4);
  ASSERT_EQ(sleeps.size(), 3u);
  // Exponential: 500, 1000, 2000 ms, give or take scheduling slack.
  EXPECT_GT(sleeps[0].count(), 250);
  EXPECT_LE(sleeps[0].count(), 500);
  EXPECT_GT(sleeps[2].count(), 1750);
}

TEST(Live, SucceedsAfterTransientFailuresAndSendsCredential) {
  std::atomic<int> hits{0};
  std::string auth;
  std::string model;
  LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (++hits < 3) {
      res.status = hits == 1 ? 503 : 429;
      res.set_header("Retry-After", "0");
      return;
    }
    auth = req.get_header_value("Authorization");
    model = json::parse(req.body)["model"];
    res.set_content(completion_body("# Faithfulness\nYes"), "application/json");
  });
  ::setenv("GAAR_TEST_KEY", "sk-local-secret", 1);
  LiveConfig cfg;
  cfg.endpoint = server.endpoint();
  cfg.credential_env = "GAAR_TEST_KEY";
  cfg.timeout = std::chrono::seconds(5);
  LiveBackend backend(cfg, [](std::chrono::milliseconds) {});
  auto r = backend.complete(request("t"));
  EXPECT_EQ(r.text, "# Faithfulness\nYes");
  EXPECT_EQ(r.usage.prompt_tokens, 11);
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(auth, "Bearer sk-local-secret");
  EXPECT_EQ(model, "m");
  ::unsetenv("GAAR_TEST_KEY");
}

TEST(Live, ClientErrorFailsImmediately) {
  std::atomic<int> hits{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
    res.set_content("bad key", "text/plain");
  });
  LiveConfig cfg;
  cfg.endpoint = server.endpoint();
  LiveBackend backend(cfg, [](std::chrono::milliseconds) {});
  EXPECT_THROW(backend.complete(request("t")), BackendError);
  EXPECT_EQ(hits.load(), 1);
}

TEST(Live, UnreachableEndpointIsTransportError) {
  LiveConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1";
  cfg.retry.max_retries = 1;
  cfg.timeout = std::chrono::seconds(1);
  LiveBackend backend(cfg, [](std::chrono::milliseconds) {});
  EXPECT_THROW(backend.complete(request("t")), TransportError);
  EXPECT_THROW(LiveBackend(LiveConfig{"localhost:80", "", {}, std::chrono::seconds(1)}),
               gaar::InvalidArgument);
}

TEST(Live, RecordedLiveRunNeverStoresCredential) {
  LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
    // A misbehaving endpoint that echoes the header back.
    res.set_content(completion_body(req.get_header_value("Authorization")), "application/json");
  });
  ::setenv("GAAR_TEST_KEY2", "sk-echo-secret", 1);
  LiveConfig cfg;
  cfg.endpoint = server.endpoint();
  cfg.credential_env = "GAAR_TEST_KEY2";
  LiveBackend live(cfg, [](std::chrono::milliseconds) {});
  const auto path = std::filesystem::temp_directory_path() / "gaar_live.jsonl";
  {
    RecordingBackend rec(live, path, {"sk-echo-secret"});
    rec.complete(request("t"));
  }
  EXPECT_EQ(testsupport::read_file(path).find("sk-echo-secret"), std::string::npos);
  ::unsetenv("GAAR_TEST_KEY2");
}

// ---- section splitting ----------------------------------------------------------

TEST(Sections, HeadingsNeedASpaceAndFencesAreSkipped) {
  auto s = split_sections("chatter\n# A\nx\n```\n# not a heading\n```\n##B\n## C:\ny\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].title, "A");
  EXPECT_NE(s[0].body.find("##B"), std::string::npos);
  EXPECT_NE(s[0].body.find("# not a heading"), std::string::npos);
  EXPECT_EQ(text::normalize_title(s[1].title), "c");
}

// ---- reconstruction parser ------------------------------------------------------

TEST(ParseReconstruction, WalkthroughStage2) {
  Reconstruction r = parse_reconstruction(walkthrough_response("06_reconstruction.txt"));
  ASSERT_EQ(r.premises.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.premises[i].label, "P" + std::to_string(i + 1));
    EXPECT_EQ(r.premises[i].implicit, i >= 3);
  }
  EXPECT_EQ(r.conclusion, "We should allow abortion.");
  EXPECT_TRUE(r.intermediate_conclusions.empty());
  EXPECT_FALSE(r.connections.empty());
  EXPECT_EQ(r.premises[3].text.rfind("If contraception prevents", 0), 0u);
}

TEST(ParseReconstruction, ToleratesChatterAndMarkdown) {
  auto r = parse_reconstruction(
      "Sure! Here it is.\n\n## **Premises**\n- **P1:** A holds.\n* P2. [Implicit] B holds\n"
      "  and continues.\n\n## Intermediate Conclusions\nIC1: A and B.\n\n"
      "## Conclusion:\n**C:** Therefore C.\n\nHope this helps.");
  ASSERT_EQ(r.premises.size(), 2u);
  EXPECT_EQ(r.premises[0].text, "A holds.");
  EXPECT_TRUE(r.premises[1].implicit);
  EXPECT_EQ(r.premises[1].text, "B holds and continues.");
  EXPECT_EQ(r.intermediate_conclusions, (std::vector<std::string>{"A and B."}));
  EXPECT_EQ(r.conclusion.rfind("Therefore C.", 0), 0u);
}

TEST(ParseReconstruction, HeaderTypoIsParseError) {
  try {
    parse_reconstruction("##Premises\nP1: A.\n\n## Conclusion\nC: B.\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("## Premises"), std::string::npos);
  }
}

TEST(ParseReconstruction, MissingConclusionIsParseError) {
  try {
    parse_reconstruction("## Premises\nP1: A.\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("## Conclusion"), std::string::npos);
  }
}

TEST(ParseReconstruction, LabelsMustBeConsecutive) {
  EXPECT_THROW(parse_reconstruction("## Premises\nP1: A.\nP3: B.\n\n## Conclusion\nC.\n"),
               ParseError);
  EXPECT_THROW(parse_reconstruction("## Premises\nA.\n\n## Conclusion\nC.\n"), ParseError);
  EXPECT_THROW(parse_reconstruction("## Premises\nP1: (Implicit)\n\n## Conclusion\nC.\n"),
               ParseError);
}

// Random reconstructions survive render -> parse unchanged.
TEST(ParseReconstruction, RenderParseInverseProperty) {
  std::mt19937_64 rng(20261014);
  const std::vector<std::string> words = {"rain", "street", "wet", "if", "then", "all",
                                          "some", "not",    "grey", "sky", "x", "(a)"};
  auto sentence = [&] {
    std::uniform_int_distribution<std::size_t> len(1, 8), w(0, words.size() - 1);
    std::string s;
    for (std::size_t i = len(rng); i > 0; --i) s += (s.empty() ? "" : " ") + words[w(rng)];
    return s + ".";
  };
  for (int trial = 0; trial < 300; ++trial) {
    Reconstruction r;
    std::uniform_int_distribution<int> n(1, 7), ic(0, 2), coin(0, 1);
    for (int i = n(rng); i > 0; --i) {
      r.premises.push_back(
          {"P" + std::to_string(r.premises.size() + 1), sentence(), coin(rng) == 1});
    }
    for (int i = ic(rng); i > 0; --i) r.intermediate_conclusions.push_back(sentence());
    r.conclusion = sentence();
    if (coin(rng) == 1) r.connections = sentence();
    Reconstruction back = parse_reconstruction(render_reconstruction(r));
    ASSERT_EQ(back, r) << render_reconstruction(r);
  }
}

// ---- fallacy parser -------------------------------------------------------------

TEST(ParseFallacy, WalkthroughStage1) {
  auto r = parse_fallacy(walkthrough_response("01_fallacy_detection.txt"));
  EXPECT_FALSE(r.has_formal());
  ASSERT_EQ(r.informal.size(), 1u);
  EXPECT_EQ(r.informal[0].name, "false equivalence");
  EXPECT_FALSE(r.none_detected());
}

TEST(ParseFallacy, NoneIsExplicit) {
  auto r = parse_fallacy("# Formal Fallacy\nNone\n\n# Informal Fallacies\nNone.\n");
  EXPECT_TRUE(r.none_detected());
}

TEST(ParseFallacy, EmptyRationaleIsParseError) {
  EXPECT_THROW(parse_fallacy("# Formal Fallacy\nNone\n\n# Informal Fallacies\n- ad hominem:\n"),
               ParseError);
  EXPECT_THROW(parse_fallacy("# Formal Fallacy\naffirming the consequent:\n\n"
                             "# Informal Fallacies\nNone\n"),
               ParseError);
}

TEST(ParseFallacy, FormalAndInformalCoexist) {
  auto r = parse_fallacy(
      "# Formal Fallacy\naffirming the consequent: infers P from Q and P → Q.\n\n"
      "# Informal Fallacies\n- ad hominem: attacks the speaker.\n- slippery slope: chains\n"
      "  unlikely steps.\n");
  ASSERT_TRUE(r.has_formal());
  EXPECT_EQ(r.formal->name, "affirming the consequent");
  ASSERT_EQ(r.informal.size(), 2u);
  EXPECT_EQ(r.informal[1].rationale, "chains unlikely steps.");
  EXPECT_EQ(parse_fallacy(render_fallacy(r)), r);
}

TEST(ParseFallacy, MissingSectionIsParseError) {
  EXPECT_THROW(parse_fallacy("# Formal Fallacy\nNone\n"), ParseError);
  EXPECT_THROW(parse_fallacy("# Informal Fallacies\nNone\n"), ParseError);
}

// ---- formalization parser -------------------------------------------------------

const std::vector<std::string> kFive = {"P1", "P2", "P3", "P4", "P5"};

TEST(ParseFormalization, WalkthroughStage2) {
  auto f = parse_formalization(walkthrough_response("07_formalization.txt"), kFive);
  EXPECT_EQ(f.premises.size(), 5u);
  EXPECT_EQ(f.keys.size(), 6u);
  EXPECT_TRUE(f.additions.empty());
  EXPECT_EQ(gaar::fol::render_formula(f.conclusion), "S(A)");
  ASSERT_NE(f.keys.find("R"), nullptr);
  EXPECT_EQ(f.keys.find("R")->params, (std::vector<std::string>{"x", "y"}));
  EXPECT_TRUE(gaar::solver::check_validity(f.premises, f.conclusion).valid());
}

TEST(ParseFormalization, WalkthroughStage1KeyContinuationLine) {
  auto f = parse_formalization(walkthrough_response("03_formalization.txt"),
                               {"P1", "P2", "P3", "P4", "P5", "P6"});
  EXPECT_EQ(f.keys.find("P")->phrase, "x prevents the development of a potential human being");
  EXPECT_EQ(f.keys.size(), 6u);
}

TEST(ParseFormalization, MissingKeyIsKeyCoverageError) {
  std::string t = walkthrough_response("07_formalization.txt");
  t.erase(t.find("S(x) = we should allow x\n"), std::string("S(x) = we should allow x\n").size());
  try {
    parse_formalization(t, kFive);
    FAIL();
  } catch (const gaar::pipeline::KeyCoverageError& e) {
    EXPECT_NE(std::string(e.what()).find("S"), std::string::npos);
  }
}

TEST(ParseFormalization, LabelMismatchIsParseError) {
  std::string t = walkthrough_response("07_formalization.txt");
  t.erase(t.find("P5: "), t.find('\n', t.find("P5: ")) - t.find("P5: ") + 1);
  EXPECT_THROW(parse_formalization(t, kFive), ParseError);
  try {
    parse_formalization(t, kFive);
  } catch (const gaar::pipeline::KeyCoverageError&) {
    FAIL() << "label mismatch must not be reported as key coverage";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("P1,P2,P3,P4"), std::string::npos) << e.what();
  }
}

TEST(ParseFormalization, SyntaxErrorNamesTheLine) {
  std::string t = walkthrough_response("07_formalization.txt");
  t.replace(t.find("P3: P(A)"), 8, "P3: P(A ∧");
  try {
    parse_formalization(t, kFive);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("premise P3"), std::string::npos) << e.what();
  }
}

TEST(ParseFormalization, RenderParseRoundTrip) {
  auto f = parse_formalization(walkthrough_response("03_formalization.txt"),
                               {"P1", "P2", "P3", "P4", "P5", "P6"});
  auto back = parse_formalization(render_formalization(f), {"P1", "P2", "P3", "P4", "P5", "P6"});
  EXPECT_EQ(back.keys, f.keys);
  ASSERT_EQ(back.premises.size(), f.premises.size());
  for (std::size_t i = 0; i < f.premises.size(); ++i) {
    EXPECT_EQ(back.premises[i].formula, f.premises[i].formula);
  }
  EXPECT_EQ(back.conclusion, f.conclusion);
}

// ---- streamlining parser --------------------------------------------------------

TEST(ParseStreamline, CarriesImplicitFlagsByLabel) {
  auto source = parse_reconstruction(walkthrough_response("02_reconstruction.txt"));
  auto f = parse_formalization(walkthrough_response("03_formalization.txt"),
                               {"P1", "P2", "P3", "P4", "P5", "P6"});
  f.premises.pop_back();  // P6 pruned
  auto r = parse_streamline(walkthrough_response("04_streamlining.txt"), f.premises, source);
  ASSERT_EQ(r.premises.size(), 5u);
  EXPECT_TRUE(r.premises[3].implicit);
  EXPECT_TRUE(r.premises[4].implicit);
  EXPECT_FALSE(r.premises[0].implicit);
  EXPECT_EQ(r.conclusion, "We allow (or should allow) abortion.");
}

TEST(ParseStreamline, CountOrLabelMismatchIsParseError) {
  auto source = parse_reconstruction(walkthrough_response("06_reconstruction.txt"));
  auto f = parse_formalization(walkthrough_response("07_formalization.txt"), kFive);
  const std::string text = walkthrough_response("08_streamlining.txt");
  auto fewer = f.premises;
  fewer.pop_back();
  EXPECT_THROW(parse_streamline(text, fewer, source), ParseError);
  auto relabeled = f.premises;
  relabeled[4].label = "P7";
  EXPECT_THROW(parse_streamline(text, relabeled, source), ParseError);
}

// ---- faithfulness parser --------------------------------------------------------

const std::set<Criterion> kAll = {Criterion::kAccuracy, Criterion::kCompleteness,
                                  Criterion::kParsimony};

TEST(ParseFaithfulness, BareYesConvergesInCoarseMode) {
  auto v = parse_faithfulness("# Faithfulness\nYes", kAll, false);
  EXPECT_TRUE(v.converged());
  EXPECT_TRUE(v.criteria.empty());
  EXPECT_FALSE(parse_faithfulness("# Faithfulness\nNo.", kAll, false).converged());
}

TEST(ParseFaithfulness, WalkthroughIterations) {
  auto first = parse_faithfulness(walkthrough_response("05_faithfulness.txt"), kAll);
  EXPECT_FALSE(first.converged());
  EXPECT_FALSE(first.criteria.at(Criterion::kAccuracy).pass);
  EXPECT_TRUE(first.criteria.at(Criterion::kCompleteness).pass);
  EXPECT_TRUE(first.criteria.at(Criterion::kParsimony).pass);
  EXPECT_NE(first.criteria.at(Criterion::kAccuracy).explanation.find("over-generalized"),
            std::string::npos);
  auto second = parse_faithfulness(walkthrough_response("09_faithfulness.txt"), kAll);
  EXPECT_TRUE(second.converged());
}

TEST(ParseFaithfulness, MissingVerdictIsParseError) {
  EXPECT_THROW(parse_faithfulness("# Accuracy\nYes\n", kAll, false), ParseError);
  EXPECT_THROW(parse_faithfulness("# Faithfulness\nMaybe\n", kAll, false), ParseError);
  EXPECT_THROW(parse_faithfulness("# Faithfulness\nNonetheless yes\n", kAll, false), ParseError);
  // Fine-grained mode needs each enabled criterion.
  EXPECT_THROW(parse_faithfulness("# Accuracy\nYes\n# Faithfulness\nYes\n", kAll, true),
               ParseError);
  EXPECT_NO_THROW(parse_faithfulness("# Accuracy\nYes\n# Faithfulness\nYes\n",
                                     {Criterion::kAccuracy}, true));
}

TEST(ParseFaithfulness, CriterionNoOverridesOverallYes) {
  auto v = parse_faithfulness(
      "# Accuracy\nNo - P2 is wrong.\n# Completeness\nYes\n# Parsimony\n**Yes**\n"
      "# Faithfulness\nYes\n",
      kAll);
  EXPECT_FALSE(v.converged());
  EXPECT_EQ(v.criteria.at(Criterion::kAccuracy).explanation, "P2 is wrong.");
  EXPECT_EQ(parse_faithfulness(render_faithfulness(v), kAll).criteria, v.criteria);
}

// ---- pairwise parser ------------------------------------------------------------

TEST(ParsePairwise, DocumentedExample) {
  auto j = parse_pairwise_judgment(
      R"({"accuracy":"A++","completeness":"TIE","parsimony":"B++++","overall_winner":"B"})");
  EXPECT_EQ(j.criteria.at(Criterion::kAccuracy), (CriterionOutcome{Side::kA, 2}));
  EXPECT_EQ(j.criteria.at(Criterion::kCompleteness), (CriterionOutcome{Side::kTie, 0}));
  EXPECT_EQ(j.criteria.at(Criterion::kParsimony), (CriterionOutcome{Side::kB, 4}));
  EXPECT_EQ(j.overall, Side::kB);
}

TEST(ParsePairwise, OverallTieAndSurroundingChatter) {
  auto j = parse_pairwise_judgment(
      "My verdict:\n```json\n{\"reasoning\": \"close\", \"accuracy\": \"B+\", "
      "\"completeness\": \"A+++++\", \"parsimony\": \"tie\", \"overall_winner\": \"TIE\"}\n```");
  EXPECT_EQ(j.overall, Side::kTie);
  EXPECT_EQ(j.criteria.at(Criterion::kCompleteness).disparity, 5);
  EXPECT_EQ(j.reasoning, "close");
}

TEST(ParsePairwise, IllegalValuesAreParseErrors) {
  const std::string base = R"("completeness":"TIE","parsimony":"TIE","overall_winner":"A"})";
  EXPECT_THROW(parse_pairwise_judgment(R"({"accuracy":"A++++++",)" + base), ParseError);
  EXPECT_THROW(parse_pairwise_judgment(R"({"accuracy":"A",)" + base), ParseError);
  EXPECT_THROW(parse_pairwise_judgment(R"({"accuracy":"C+",)" + base), ParseError);
  EXPECT_THROW(parse_pairwise_judgment(R"({"accuracy":"A+"})"), ParseError);
  EXPECT_THROW(parse_pairwise_judgment("no object here"), ParseError);
  EXPECT_THROW(parse_pairwise_judgment(R"({"accuracy": 1,)" + base), ParseError);
  EXPECT_THROW(parse_pairwise_judgment(
                   R"({"accuracy":"A+","completeness":"TIE","parsimony":"TIE","overall_winner":"X"})"),
               ParseError);
}

}  // namespace
