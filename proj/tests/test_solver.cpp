#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "axml/solver.hpp"
#include "axml/testkit.hpp"
#include "axml/util.hpp"

using namespace axml;

namespace {

Symbol sym(const char* s) { return Symbol::intern(s); }

NestedWord nw(const std::string& text) { return parseNestedWord(text); }

// Juliet must rewrite <forecast/> into <weather/> to validate against the
// city grammar; the target is grammar-backed, so the simple pipeline applies
Game makeCityGame() {
  TreeGrammar gr;
  gr.types = {"city", "events", "name", "weather"};
  gr.start = "city";
  for (const std::string& t : gr.types) gr.label[t] = Symbol::intern(t);
  gr.content["city"] = parseDre("name.weather.events");
  gr.content["events"] = parseDre("eps");
  gr.content["name"] = parseDre("eps");
  gr.content["weather"] = parseDre("eps");
  Game g;
  g.alphabet = {sym("city"), sym("events"), sym("forecast"), sym("name"), sym("weather")};
  g.functions = {sym("forecast")};
  ReplacementSpec spec;
  spec.words = {nw("<weather></weather>")};
  g.rules[sym("forecast")] = std::move(spec);
  Snwa snwa = grammarToSnwa(gr, g.alphabet);
  g.target = snwa.d;
  g.targetSnwa = std::move(snwa);
  g.targetGrammar = std::move(gr);
  g.validate();
  return g;
}

// same shape as the reference game but Romeo may also answer <c></c>,
// which the target rejects
Game makeRomeoPicksC() {
  Game g = makeG0();
  g.alphabet = {sym("a"), sym("b"), sym("c"), sym("r")};
  ReplacementSpec spec;
  spec.words = {nw("<b></b>"), nw("<c></c>")};
  g.rules[sym("a")] = std::move(spec);
  g.target = wordListDnwa({nw("<r><b></b></r>")}, g.alphabet);
  g.validate();
  return g;
}

// explicit games over the grammar-backed city-like targets
Game randomSimpleGame(uint64_t seed) {
  TreeGrammar gr = randomGrammar({}, seed);
  Rng rng(seed * 7919);
  Game g;
  std::set<Symbol> alpha{sym("f")};
  for (const auto& [t, l] : gr.label) alpha.insert(l);
  g.alphabet.assign(alpha.begin(), alpha.end());
  g.functions = {sym("f")};
  if (rng.chance(1, 2)) {
    Symbol extra = gr.label.at(gr.types[rng.below(gr.types.size())]);
    if (extra != sym("f")) g.functions.push_back(extra);
  }
  std::sort(g.functions.begin(), g.functions.end());
  g.functions.erase(std::unique(g.functions.begin(), g.functions.end()), g.functions.end());
  for (Symbol f : g.functions) {
    ReplacementSpec spec;
    size_t n = 1 + rng.below(2);
    for (size_t i = 0; i < n; ++i) spec.words.push_back(randomWord(rng, g.alphabet, 4, 2));
    spec.normalize();
    g.rules[f] = std::move(spec);
  }
  Snwa snwa = grammarToSnwa(gr, g.alphabet);
  g.target = snwa.d;
  g.targetSnwa = std::move(snwa);
  g.targetGrammar = std::move(gr);
  g.validate();
  return g;
}

}  // namespace

TEST_CASE("replacement lists normalize to length lexicographic order") {
  ReplacementSpec spec;
  spec.words = {nw("<b></b>"), nw(""), nw("<a><b></b></a>"), nw("<a></a>"), nw("<b></b>")};
  spec.normalize();
  CHECK(spec.words == std::vector<NestedWord>{nw(""), nw("<a></a>"), nw("<b></b>"),
                                              nw("<a><b></b></a>")});
}

TEST_CASE("games reject malformed pieces") {
  Game g = makeG0();
  CHECK_NOTHROW(g.validate());
  CHECK(g.isFunction(sym("a")));
  CHECK_FALSE(g.isFunction(sym("b")));

  SUBCASE("functions outside the alphabet") {
    g.functions = {sym("z")};
    g.rules.clear();
    g.rules[sym("z")] = ReplacementSpec{{nw("<b></b>")}, std::nullopt};
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("InvalidGame"), AxmlError);
  }
  SUBCASE("missing rule") {
    g.rules.clear();
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("one rule per function"), AxmlError);
  }
  SUBCASE("empty replacement list") {
    g.rules[sym("a")] = ReplacementSpec{};
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("EmptyReplacementLanguage"), AxmlError);
  }
  SUBCASE("replacement words outside the alphabet") {
    g.rules[sym("a")] = ReplacementSpec{{nw("<z></z>")}, std::nullopt};
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("SymbolNotInAlphabet"), AxmlError);
  }
  SUBCASE("target over the wrong alphabet") {
    Rng rng(1);
    g.target = randomDnwa(rng, {sym("a"), sym("b")}, 2);
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("AlphabetMismatch"), AxmlError);
  }
  SUBCASE("target must push the pre-open state") {
    Nwa raw = g.target.a;
    raw.open[{"q0", sym("r")}] = {{"q1", "q1"}};
    Dnwa t;
    t.a = std::move(raw);
    g.target = std::move(t);
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("NotNormalForm"), AxmlError);
  }
  SUBCASE("replay mode text") {
    CHECK(ReplayMode::none().str() == "none");
    CHECK(ReplayMode::bounded(3).str() == "bounded(3)");
    CHECK(ReplayMode::unbounded().str() == "unbounded");
  }
}

TEST_CASE("the acceptance automaton extends the target by the call options") {
  Game g = makeG0();
  Anwa ac = buildAc(g, baseCallEffect(g));
  CHECK(anwaMembership(ac, makeW0()));
  CHECK_FALSE(anwaMembership(ac, nw("<a></a>")));
  // the read-only disjunct keeps every target word accepted
  for (const NestedWord& w : enumerateWords(g.alphabet, 2, 2)) {
    if (dnwaAccepts(g.target, w)) CHECK(anwaMembership(ac, w));
  }
}

TEST_CASE("the simple acceptance automaton matches the general one") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Game g = randomSimpleGame(seed);
    CallEffect base = baseCallEffect(g);
    Sanwa simple = buildAcSimple(g, base);
    Anwa general = buildAc(g, base);
    Rng rng(seed * 271);
    for (int i = 0; i < 15; ++i) {
      NestedWord w = randomWord(rng, g.alphabet, 8, 3);
      CHECK(sanwaVerify(simple, w) == anwaMembership(general, w));
    }
  }
}

TEST_CASE("both containment routes compute the same iterated effects") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Game g = randomSimpleGame(seed);
    CallEffect base = baseCallEffect(g);
    CallEffect viaSimple = iterateCallEffect(g, base);
    Game general = g;
    general.targetSnwa.reset();
    CHECK(viaSimple == iterateCallEffect(general, base));
  }
}

TEST_CASE("the simple pipeline needs a grammar backed target") {
  Game g = makeG0();
  SolveOptions opt;
  opt.pipeline = Pipeline::Simple;
  CHECK_THROWS_WITH_AS(decideJWin(g, makeW0(), ReplayMode::none(), opt),
                       doctest::Contains("TargetNotSimple"), AxmlError);
}

TEST_CASE("reference game verdicts") {
  Game g = makeG0();
  SolveResult res = decideJWin(g, makeW0(), ReplayMode::none());
  CHECK(res.verdict == Verdict::JulietWins);
  CHECK(res.stats.pipeline == "general");
  CHECK(res.stats.iterations == 0);
  CHECK(res.stats.effects.cells == 6);
  CHECK(decideJWin(g, nw("<r><b></b></r>"), ReplayMode::none()).verdict == Verdict::JulietWins);
  CHECK(decideJWin(g, nw("<b></b>"), ReplayMode::unbounded()).verdict == Verdict::RomeoWins);
  CHECK_THROWS_WITH_AS(decideJWin(g, makeW0(), ReplayMode::bounded(0)),
                       doctest::Contains("InvalidReplayMode"), AxmlError);
  CHECK_THROWS_WITH_AS(decideJWin(g, nw("<z></z>"), ReplayMode::none()),
                       doctest::Contains("AlphabetMismatch"), AxmlError);
}

TEST_CASE("the two stage game needs two replay levels") {
  Game g = makeTwoStageGame();
  NestedWord w = nw("<r><a></a></r>");
  CHECK(decideJWin(g, w, ReplayMode::none()).verdict == Verdict::RomeoWins);
  CHECK(decideJWin(g, w, ReplayMode::bounded(1)).verdict == Verdict::RomeoWins);
  SolveResult two = decideJWin(g, w, ReplayMode::bounded(2));
  CHECK(two.verdict == Verdict::JulietWins);
  CHECK(two.stats.iterations == 1);
  SolveResult fix = decideJWin(g, w, ReplayMode::unbounded());
  CHECK(fix.verdict == Verdict::JulietWins);
  CHECK(fix.stats.iterations == 2);
  CHECK(bruteForceSolve(g, w, ReplayMode::none()).verdict == Verdict::RomeoWins);
  CHECK(bruteForceSolve(g, w, ReplayMode::bounded(2)).verdict == Verdict::JulietWins);
}

TEST_CASE("the city game rewrites the forecast into weather") {
  Game g = makeCityGame();
  NestedWord doc = nw("<city><name></name><forecast></forecast><events></events></city>");
  NestedWord valid = nw("<city><name></name><weather></weather><events></events></city>");
  CHECK(grammarValidateTree(*g.targetGrammar, valid));
  CHECK_FALSE(grammarValidateTree(*g.targetGrammar, doc));
  CHECK(dnwaAccepts(g.target, valid));
  CHECK_FALSE(dnwaAccepts(g.target, doc));

  SolveResult res = decideJWin(g, doc, ReplayMode::none());
  CHECK(res.verdict == Verdict::JulietWins);
  CHECK(res.stats.pipeline == "simple");
  SolveOptions forceGeneral;
  forceGeneral.pipeline = Pipeline::General;
  CHECK(decideJWin(g, doc, ReplayMode::none(), forceGeneral).verdict == Verdict::JulietWins);
  CHECK(bruteForceSolve(g, doc, ReplayMode::none()).verdict == Verdict::JulietWins);
  CHECK(decideJWin(g, valid, ReplayMode::none()).verdict == Verdict::JulietWins);
  // out of position the rewrite cannot save the document
  NestedWord wrong = nw("<city><forecast></forecast><weather></weather><events></events></city>");
  CHECK(decideJWin(g, wrong, ReplayMode::none()).verdict == Verdict::RomeoWins);

  Strategy s = extractStrategy(g, doc, ReplayMode::none());
  REQUIRE(s.root.has_value());
  CHECK(s.root->position == 4);
  CHECK(s.root->call);
  CHECK(strategyWins(g, doc, ReplayMode::none(), s));
}

TEST_CASE("pipeline verdicts match the brute force oracle on random games") {
  std::vector<ReplayMode> modes{ReplayMode::none(), ReplayMode::bounded(2),
                                ReplayMode::bounded(3)};
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    RandomGameParams p;
    p.functions = 2;
    Game g = randomFiniteGame(p, seed);
    Rng rng(seed * 13);
    NestedWord w = randomWord(rng, g.alphabet, 8, 3);
    Verdict prev = Verdict::Inconclusive;
    for (ReplayMode mode : modes) {
      OracleResult oracle = bruteForceSolve(g, w, mode);
      REQUIRE(oracle.verdict != Verdict::Inconclusive);
      SolveResult res = decideJWin(g, w, mode);
      CHECK(res.verdict == oracle.verdict);
      // more replay never hurts Juliet
      if (prev == Verdict::JulietWins) CHECK(res.verdict == Verdict::JulietWins);
      prev = res.verdict;
      if (oracle.verdict == Verdict::JulietWins) {
        REQUIRE(oracle.strategy.has_value());
        CHECK(strategyWins(g, w, mode, *oracle.strategy));
        CHECK(strategyWins(g, w, mode, extractStrategy(g, w, mode)));
      }
    }
    SolveResult un = decideJWin(g, w, ReplayMode::unbounded());
    size_t k = std::max<size_t>(un.stats.iterations, 1);
    CHECK(un.verdict == bruteForceSolve(g, w, ReplayMode::bounded(k)).verdict);
    if (prev == Verdict::JulietWins) CHECK(un.verdict == Verdict::JulietWins);
    if (un.verdict == Verdict::JulietWins)
      CHECK(strategyWins(g, w, ReplayMode::unbounded(),
                         extractStrategy(g, w, ReplayMode::unbounded())));
  }
}

TEST_CASE("simple pipeline verdicts match the general ones on grammar games") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Game g = randomSimpleGame(seed);
    Rng rng(seed * 101);
    NestedWord w = randomWord(rng, g.alphabet, 8, 3);
    for (ReplayMode mode : {ReplayMode::none(), ReplayMode::bounded(2)}) {
      SolveResult simple = decideJWin(g, w, mode);
      CHECK(simple.stats.pipeline == "simple");
      SolveOptions forceGeneral;
      forceGeneral.pipeline = Pipeline::General;
      SolveResult general = decideJWin(g, w, mode, forceGeneral);
      CHECK(general.stats.pipeline == "general");
      CHECK(simple.verdict == general.verdict);
      OracleResult oracle = bruteForceSolve(g, w, mode);
      if (oracle.verdict != Verdict::Inconclusive) CHECK(simple.verdict == oracle.verdict);
    }
  }
}

TEST_CASE("oracle verdicts on the pinned instances") {
  Game g = makeG0();
  OracleResult res = bruteForceSolve(g, makeW0(), ReplayMode::none());
  CHECK(res.verdict == Verdict::JulietWins);
  REQUIRE(res.strategy.has_value());
  REQUIRE(res.strategy->root.has_value());
  // the unique winning line: read to </a>, call, read the rest
  CHECK(res.strategy->root->position == 2);
  CHECK(res.strategy->root->call);
  CHECK(strategyWins(g, makeW0(), ReplayMode::none(), *res.strategy));

  // degenerate floor: no call budget at all turns the game into a membership test
  CHECK(bruteForceSolve(g, makeW0(), ReplayMode::bounded(0)).verdict == Verdict::RomeoWins);

  CHECK(bruteForceSolve(makeRomeoPicksC(), makeW0(), ReplayMode::none()).verdict ==
        Verdict::RomeoWins);
  CHECK(decideJWin(makeRomeoPicksC(), makeW0(), ReplayMode::none()).verdict ==
        Verdict::RomeoWins);
}

TEST_CASE("oracle resource limits surface as inconclusive") {
  Game g = makeG0();
  OracleLimits tiny;
  tiny.maxSteps = 0;
  CHECK(bruteForceSolve(g, makeW0(), ReplayMode::none(), tiny).verdict == Verdict::Inconclusive);
  OracleLimits narrow;
  narrow.maxWordLen = 3;
  CHECK(bruteForceSolve(g, makeW0(), ReplayMode::none(), narrow).verdict ==
        Verdict::Inconclusive);
}

TEST_CASE("oracle reply enumeration for automata is honestly truncated") {
  // the rule and the target both accept every word over b, so each enumerated
  // reply wins but the enumeration cannot be exhaustive
  Game g;
  g.alphabet = {sym("a"), sym("b")};
  g.functions = {sym("a")};
  Nwa rule;
  rule.states = {"s"};
  rule.alphabet = g.alphabet;
  rule.initial = "s";
  rule.accepting = {"s"};
  rule.open[{"s", sym("b")}] = {{"s", "s"}};
  rule.close[{"s", "s", sym("b")}] = {"s"};
  ReplacementSpec spec;
  spec.automaton = std::move(rule);
  g.rules[sym("a")] = std::move(spec);
  Nwa target;
  target.states = {"t"};
  target.alphabet = g.alphabet;
  target.initial = "t";
  target.accepting = {"t"};
  target.open[{"t", sym("b")}] = {{"t", "t"}};
  target.close[{"t", "t", sym("b")}] = {"t"};
  g.target = toNormalForm(makeDnwa(std::move(target)));
  g.validate();

  CHECK(bruteForceSolve(g, nw("<a></a>"), ReplayMode::none()).verdict == Verdict::Inconclusive);
  // the effect pipeline decides the same game exactly
  CHECK(decideJWin(g, nw("<a></a>"), ReplayMode::none()).verdict == Verdict::JulietWins);
}

TEST_CASE("extracted strategies prefer reading") {
  Game g = makeG0();
  SUBCASE("no decision points leaves an empty tree") {
    Strategy s = extractStrategy(g, nw("<r><b></b></r>"), ReplayMode::none());
    CHECK_FALSE(s.root.has_value());
    CHECK(strategyWins(g, nw("<r><b></b></r>"), ReplayMode::none(), s));
  }
  SUBCASE("read wins beat call wins") {
    g.target = wordListDnwa({makeW0(), nw("<r><b></b></r>")}, g.alphabet);
    g.validate();
    Strategy s = extractStrategy(g, makeW0(), ReplayMode::none());
    REQUIRE(s.root.has_value());
    CHECK(s.root->position == 2);
    CHECK_FALSE(s.root->call);
    CHECK(strategyWins(g, makeW0(), ReplayMode::none(), s));
  }
  SUBCASE("the reference game forces the call") {
    Strategy s = extractStrategy(g, makeW0(), ReplayMode::none());
    REQUIRE(s.root.has_value());
    CHECK(s.root->position == 2);
    CHECK(s.root->state == "bot");
    CHECK(s.root->call);
    REQUIRE(s.root->children.size() == 1);
    // after the reply everything is read; the leaf records the final state
    CHECK(s.root->children[0].position == 4);
    CHECK(s.root->children[0].state == "qF");
    CHECK_FALSE(s.root->children[0].call);
    CHECK(strategyWins(g, makeW0(), ReplayMode::none(), s));
  }
  SUBCASE("losing positions refuse extraction") {
    CHECK_THROWS_WITH_AS(extractStrategy(g, nw("<b></b>"), ReplayMode::unbounded()),
                         doctest::Contains("NotWinnable"), AxmlError);
  }
}

TEST_CASE("strategies need explicit replacement lists") {
  Game g;
  g.alphabet = {sym("a"), sym("b")};
  g.functions = {sym("a")};
  ReplacementSpec spec;
  spec.automaton = wordListNwa({nw("<b></b>")}, g.alphabet);
  g.rules[sym("a")] = std::move(spec);
  g.target = wordListDnwa({nw("<b></b>")}, g.alphabet);
  g.validate();
  CHECK(decideJWin(g, nw("<a></a>"), ReplayMode::none()).verdict == Verdict::JulietWins);
  CHECK_THROWS_WITH_AS(extractStrategy(g, nw("<a></a>"), ReplayMode::none()),
                       doctest::Contains("ExplicitRulesRequired"), AxmlError);
}

TEST_CASE("strategy replay audits the call budget") {
  Game g = makeTwoStageGame();
  NestedWord w = nw("<r><a></a></r>");
  Strategy s = extractStrategy(g, w, ReplayMode::bounded(2));
  CHECK(strategyWins(g, w, ReplayMode::bounded(2), s));
  CHECK(strategyWins(g, w, ReplayMode::unbounded(), s));
  // the same tree calls at context 2, which no-replay play must reject
  CHECK_FALSE(strategyWins(g, w, ReplayMode::none(), s));

  // an all-read tree loses the reference game
  CHECK_FALSE(strategyWins(makeG0(), makeW0(), ReplayMode::none(), Strategy{}));
}

TEST_CASE("interactive play with a human Juliet") {
  Game g = makeG0();
  SUBCASE("reading everywhere loses") {
    std::istringstream in("read\nread\n");
    std::ostringstream out;
    PlayResult res = interactivePlay(g, makeW0(), ReplayMode::none(), true, in, out);
    CHECK(res.verdict == Verdict::RomeoWins);
    CHECK(res.transcript.find("[J] </a> at 2 (context 1): read or call?") != std::string::npos);
    CHECK(res.transcript.find("final: <r><a></a></r>") != std::string::npos);
    CHECK(res.transcript.find("result: RomeoWins") != std::string::npos);
    CHECK(out.str() == res.transcript);
  }
  SUBCASE("calling the function wins against the only reply") {
    std::istringstream in("call\nread\nread\n");
    std::ostringstream out;
    PlayResult res = interactivePlay(g, makeW0(), ReplayMode::none(), true, in, out);
    CHECK(res.verdict == Verdict::JulietWins);
    CHECK(res.transcript.find("romeo: 1) <b></b>") != std::string::npos);
    CHECK(res.transcript.find("final: <r><b></b></r>") != std::string::npos);
  }
  SUBCASE("illegal calls are rejected and the play continues") {
    std::istringstream in("read\ncall\nread\n");
    std::ostringstream out;
    PlayResult res = interactivePlay(g, makeW0(), ReplayMode::none(), true, in, out);
    CHECK(res.verdict == Verdict::RomeoWins);
    CHECK(res.transcript.find("rejected: r is not a function symbol") != std::string::npos);
  }
  SUBCASE("exhausted budgets are rejected with the context") {
    Game two = makeTwoStageGame();
    // call a, then try to call b at context 2 under no replay
    std::istringstream in("call\ncall\nread\nread\nread\n");
    std::ostringstream out;
    PlayResult res =
        interactivePlay(two, nw("<r><a></a></r>"), ReplayMode::none(), true, in, out);
    CHECK(res.verdict == Verdict::RomeoWins);
    CHECK(res.transcript.find("rejected: replay budget exhausted at context 2") !=
          std::string::npos);
  }
  SUBCASE("ending the input forfeits") {
    std::istringstream in("");
    std::ostringstream out;
    PlayResult res = interactivePlay(g, makeW0(), ReplayMode::none(), true, in, out);
    CHECK(res.verdict == Verdict::Inconclusive);
    CHECK(res.transcript.find("warning: input ended before the play finished") !=
          std::string::npos);
  }
}

TEST_CASE("interactive play with a human Romeo") {
  Game g = makeG0();
  SUBCASE("the engine calls and wins whatever Romeo picks") {
    std::istringstream in("1\n");
    std::ostringstream out;
    PlayResult res = interactivePlay(g, makeW0(), ReplayMode::none(), false, in, out);
    CHECK(res.verdict == Verdict::JulietWins);
    CHECK(res.transcript.find("juliet: call at 2") != std::string::npos);
    CHECK(res.transcript.find("[R] replacement for a: 1) <b></b>") != std::string::npos);
  }
  SUBCASE("literal replacement words are accepted") {
    std::istringstream in("<b></b>\n");
    std::ostringstream out;
    PlayResult res = interactivePlay(g, makeW0(), ReplayMode::none(), false, in, out);
    CHECK(res.verdict == Verdict::JulietWins);
  }
  SUBCASE("off-list answers are rejected until a legal one arrives") {
    // every reply wins, so the engine calls and Romeo has to answer
    Game both = makeRomeoPicksC();
    both.target =
        wordListDnwa({nw("<r><b></b></r>"), nw("<r><c></c></r>")}, both.alphabet);
    both.validate();
    std::istringstream in("7\n<c></c\n<a></a>\n2\n");
    std::ostringstream out;
    PlayResult res = interactivePlay(both, makeW0(), ReplayMode::none(), false, in, out);
    CHECK(res.verdict == Verdict::JulietWins);
    CHECK(res.transcript.find("rejected: not a word of R_a") != std::string::npos);
    CHECK(res.transcript.find("rejected: expected a replacement index or a well-nested word") !=
          std::string::npos);
    CHECK(res.transcript.find("final: <r><c></c></r>") != std::string::npos);
  }
}
