#include <doctest.h>

#include <algorithm>
#include <set>

#include "axml/schemas.hpp"
#include "axml/testkit.hpp"
#include "axml/util.hpp"

using namespace axml;

namespace {

Symbol sym(const char* s) { return Symbol::intern(s); }

NestedWord nw(const std::string& text) { return parseNestedWord(text); }

const char* kCityGrammar =
    "start city\n"
    "element city -> name.weather.events\n"
    "element name -> eps\n"
    "element weather -> eps\n"
    "element events -> eps\n";

const char* kCityDoc = "<city><name></name><weather></weather><events></events></city>";

// independent regex matcher: set of end offsets reachable from `from`
std::set<size_t> matchEnds(const Dre& d, const std::vector<Symbol>& w, size_t from) {
  switch (d.kind) {
    case Dre::Kind::Empty:
      return {};
    case Dre::Kind::Epsilon:
      return {from};
    case Dre::Kind::Sym:
      if (from < w.size() && w[from] == d.sym) return {from + 1};
      return {};
    case Dre::Kind::Concat: {
      std::set<size_t> cur{from};
      for (const Dre& k : d.kids) {
        std::set<size_t> next;
        for (size_t p : cur) {
          std::set<size_t> ends = matchEnds(k, w, p);
          next.insert(ends.begin(), ends.end());
        }
        cur = std::move(next);
        if (cur.empty()) break;
      }
      return cur;
    }
    case Dre::Kind::Union: {
      std::set<size_t> out;
      for (const Dre& k : d.kids) {
        std::set<size_t> ends = matchEnds(k, w, from);
        out.insert(ends.begin(), ends.end());
      }
      return out;
    }
    case Dre::Kind::Star: {
      std::set<size_t> out{from};
      std::set<size_t> frontier{from};
      while (!frontier.empty()) {
        std::set<size_t> next;
        for (size_t p : frontier) {
          for (size_t e : matchEnds(d.kids.at(0), w, p))
            if (out.insert(e).second) next.insert(e);
        }
        frontier = std::move(next);
      }
      return out;
    }
    case Dre::Kind::Opt: {
      std::set<size_t> out = matchEnds(d.kids.at(0), w, from);
      out.insert(from);
      return out;
    }
  }
  return {};
}

bool regexAccepts(const Dre& d, const std::vector<Symbol>& w) {
  return matchEnds(d, w, 0).count(w.size()) > 0;
}

std::vector<Symbol> labelsOf(const TreeGrammar& g) {
  std::set<Symbol> out;
  for (const auto& t : g.types) out.insert(g.label.at(t));
  return {out.begin(), out.end()};
}

}  // namespace

TEST_CASE("dre parse and print round trip") {
  for (const char* text : {"a", "eps", "empty", "a.b", "a+b", "a.b*", "(a.b)*", "a+b.c",
                           "(a+b).c", "a?", "(a+b)*.a", "a.b.c+d?"}) {
    Dre d = parseDre(text);
    CHECK(printDre(parseDre(printDre(d))) == printDre(d));
  }
  // '.' binds tighter than '+', postfix tighter than '.'
  CHECK(printDre(parseDre("a+b.c")) == "a+b.c");
  CHECK(printDre(parseDre("(a+b).c")) == "(a+b).c");
  CHECK(printDre(parseDre("a.b*")) == "a.b*");
  CHECK(printDre(parseDre("(a.b)*")) == "(a.b)*");
  CHECK_THROWS_WITH_AS(parseDre("(a"), doctest::Contains("SyntaxError"), AxmlError);
  CHECK_THROWS_WITH_AS(parseDre("a +"), doctest::Contains("SyntaxError"), AxmlError);
  CHECK_THROWS_WITH_AS(parseDre("a b"), doctest::Contains("SyntaxError"), AxmlError);
  CHECK_THROWS_WITH_AS(parseDre(""), doctest::Contains("SyntaxError"), AxmlError);
}

TEST_CASE("determinism check pins the expected witnesses") {
  CHECK(dreCheckDeterminism(parseDre("a.b*")).deterministic);
  CHECK(dreCheckDeterminism(parseDre("a+b")).deterministic);
  CHECK(dreCheckDeterminism(parseDre("(a.b)*")).deterministic);

  DreDeterminism r = dreCheckDeterminism(parseDre("(a+b)*.a"));
  REQUIRE_FALSE(r.deterministic);
  CHECK(r.witness->prefix.empty());
  CHECK(r.witness->symbol == sym("a"));
  CHECK(r.witness->pos1 == 1);
  CHECK(r.witness->pos2 == 3);

  r = dreCheckDeterminism(parseDre("a?.a"));
  REQUIRE_FALSE(r.deterministic);
  CHECK(r.witness->prefix.empty());
  CHECK(r.witness->pos1 == 1);
  CHECK(r.witness->pos2 == 2);

  // conflict only after reading a prefix
  r = dreCheckDeterminism(parseDre("a.(b.c+b.d)"));
  REQUIRE_FALSE(r.deterministic);
  CHECK(r.witness->prefix == std::vector<Symbol>{sym("a")});
  CHECK(r.witness->symbol == sym("b"));
}

TEST_CASE("glushkov dfa shape and language") {
  Dfa eps = dreToDfa(parseDre("eps"));
  CHECK(eps.nStates == 1);
  CHECK(dfaAccepts(eps, {}));
  CHECK_FALSE(dfaAccepts(eps, {sym("a")}));

  Dfa chain = dreToDfa(parseDre("a.b"));
  CHECK(chain.nStates == 3);
  CHECK(dfaAccepts(chain, {sym("a"), sym("b")}));
  CHECK_FALSE(dfaAccepts(chain, {sym("a")}));
  CHECK_FALSE(dfaAccepts(chain, {sym("b"), sym("a")}));

  CHECK_THROWS_WITH_AS(dreToDfa(parseDre("(a+b)*.a")), doctest::Contains("NotDeterministic"),
                       AxmlError);
}

TEST_CASE("glushkov dfa agrees with a plain regex matcher on random expressions") {
  Rng rng(2025);
  std::vector<Symbol> alpha{sym("a"), sym("b"), sym("c")};
  size_t checkedExprs = 0;
  while (checkedExprs < 50) {
    Dre d = randomDre(rng, alpha, 3);
    if (!dreCheckDeterminism(d).deterministic) continue;
    ++checkedExprs;
    Dfa dfa = dreToDfa(d);
    for (size_t i = 0; i < 10; ++i) {
      std::vector<Symbol> w;
      size_t len = rng.below(6);
      for (size_t k = 0; k < len; ++k) w.push_back(alpha[rng.below(alpha.size())]);
      CHECK(dfaAccepts(dfa, w) == regexAccepts(d, w));
    }
  }
}

TEST_CASE("accepted dres yield deterministic position automata") {
  Rng rng(77);
  std::vector<Symbol> alpha{sym("a"), sym("b")};
  for (size_t i = 0; i < 200; ++i) {
    Dre d = randomDre(rng, alpha, 3);
    if (!dreCheckDeterminism(d).deterministic) continue;
    Dfa dfa = dreToDfa(d);  // throws on any duplicated (state, symbol) edge
    CHECK(dfa.nStates >= 1);
  }
}

TEST_CASE("completed dfa is total and keeps the language") {
  Dfa d = dreToDfa(parseDre("a.b"));
  std::vector<Symbol> alpha{sym("a"), sym("b"), sym("c")};
  Dfa t = completeDfa(d, alpha);
  CHECK(t.nStates == d.nStates + 1);
  for (size_t q = 0; q < t.nStates; ++q)
    for (Symbol s : alpha) CHECK(t.trans.count({q, s}) == 1);
  for (const std::vector<Symbol>& w :
       {std::vector<Symbol>{}, {sym("a")}, {sym("a"), sym("b")}, {sym("c")},
        {sym("a"), sym("b"), sym("c")}})
    CHECK(dfaAccepts(t, w) == dfaAccepts(d, w));
}

TEST_CASE("grammar parse, print and classify") {
  TreeGrammar city = parseGrammar(kCityGrammar);
  CHECK(city.start == "city");
  CHECK(city.types.size() == 4);
  CHECK(classifyGrammar(city).kind == GrammarClass::Kind::Local);
  TreeGrammar again = parseGrammar(printGrammar(city));
  CHECK(printGrammar(again) == printGrammar(city));

  // same label on chained types: single-type but not local
  TreeGrammar st = parseGrammar(
      "start r\n"
      "element r -> x\n"
      "type x label b -> y\n"
      "type y label b -> eps\n");
  CHECK(classifyGrammar(st).kind == GrammarClass::Kind::SingleType);

  // competing types inside one content model
  TreeGrammar neither = parseGrammar(
      "start r\n"
      "element r -> x+y\n"
      "type x label b -> eps\n"
      "type y label b -> eps\n");
  GrammarClass cls = classifyGrammar(neither);
  REQUIRE(cls.kind == GrammarClass::Kind::Neither);
  CHECK(cls.containerType == "r");
  CHECK(cls.typeA == "x");
  CHECK(cls.typeB == "y");

  CHECK_THROWS_WITH_AS(parseGrammar("element a -> eps\n"), doctest::Contains("SyntaxError"),
                       AxmlError);  // no start
  CHECK_THROWS_WITH_AS(parseGrammar("start a\nelement a -> b\n"),
                       doctest::Contains("undeclared type"), AxmlError);
  CHECK_THROWS_WITH_AS(parseGrammar("start a\nelement a -> (b+c)*.b\nelement b -> eps\nelement c -> eps\n"),
                       doctest::Contains("NotDeterministic"), AxmlError);
}

TEST_CASE("tree validation follows content models exactly") {
  TreeGrammar city = parseGrammar(kCityGrammar);
  CHECK(grammarValidateTree(city, nw(kCityDoc)));
  CHECK_FALSE(grammarValidateTree(city, nw("<city><name></name><weather></weather></city>")));
  CHECK_FALSE(grammarValidateTree(
      city, nw("<city><weather></weather><name></name><events></events></city>")));
  CHECK_FALSE(grammarValidateTree(city, nw("<name></name>")));
  CHECK_THROWS_WITH_AS(grammarValidateTree(city, nw("")), doctest::Contains("NotRooted"),
                       AxmlError);
  CHECK_THROWS_WITH_AS(grammarValidateTree(city, nw("<a></a><b></b>")),
                       doctest::Contains("NotRooted"), AxmlError);

  // candidate tracking stays exact when two types share a label
  TreeGrammar tricky = parseGrammar(
      "start r\n"
      "element r -> x.c+y.d\n"
      "type x label a -> eps\n"
      "type y label a -> b*\n"
      "element b -> eps\n"
      "element c -> eps\n"
      "element d -> eps\n");
  CHECK(classifyGrammar(tricky).kind == GrammarClass::Kind::Neither);
  CHECK(grammarValidateTree(tricky, nw("<r><a></a><c></c></r>")));
  CHECK(grammarValidateTree(tricky, nw("<r><a></a><d></d></r>")));
  CHECK(grammarValidateTree(tricky, nw("<r><a><b></b></a><d></d></r>")));
  CHECK_FALSE(grammarValidateTree(tricky, nw("<r><a><b></b></a><c></c></r>")));
  CHECK_FALSE(grammarValidateTree(tricky, nw("<r><a></a></r>")));
}

TEST_CASE("single-type grammars compile to simple automata") {
  TreeGrammar city = parseGrammar(kCityGrammar);
  Snwa s = grammarToSnwa(city, {sym("zz")});
  CHECK(s.d.sink.empty());  // construction is already total
  for (const auto& [key, val] : s.d.a.open) CHECK(val.front().second == key.first);
  CHECK(dnwaAccepts(s.d, nw(kCityDoc)));
  CHECK_FALSE(dnwaAccepts(s.d, nw("<city><name></name><events></events><weather></weather></city>")));
  CHECK_FALSE(dnwaAccepts(s.d, nw("<zz></zz>")));
  CHECK_FALSE(dnwaAccepts(s.d, nw("")));
  CHECK_FALSE(dnwaAccepts(s.d, parseNestedWord(std::string(kCityDoc) + kCityDoc)));

  TreeGrammar neither = parseGrammar(
      "start r\n"
      "element r -> x+y\n"
      "type x label b -> eps\n"
      "type y label b -> eps\n");
  CHECK_THROWS_WITH_AS(grammarToSnwa(neither), doctest::Contains("NotSingleType"), AxmlError);
}

TEST_CASE("snwa acceptance equals tree validation on enumerated words") {
  std::vector<TreeGrammar> grammars = {
      parseGrammar(kCityGrammar),
      parseGrammar(
          "start r\n"
          "element r -> x\n"
          "type x label b -> y\n"
          "type y label b -> eps\n"),
      parseGrammar(
          "start r\n"
          "element r -> a*.b?\n"
          "element a -> b\n"
          "element b -> eps\n"),
  };
  for (const TreeGrammar& g : grammars) {
    std::vector<Symbol> alpha = labelsOf(g);
    alpha.push_back(sym("zz"));
    std::sort(alpha.begin(), alpha.end());
    Snwa s = grammarToSnwa(g, {sym("zz")});
    size_t accepted = 0;
    for (const NestedWord& w : enumerateWords(alpha, 2, 2)) {
      bool valid = w.isRooted() && grammarValidateTree(g, w);
      CHECK(dnwaAccepts(s.d, w) == valid);
      accepted += valid;
    }
    // tree counts blow up with the label count, so deep bounds need few labels
    size_t depth = alpha.size() <= 3 ? 3 : 2;
    size_t width = alpha.size() <= 2 ? 3 : 2;
    for (const NestedWord& w : enumerateTrees(alpha, depth, width)) {
      CHECK(dnwaAccepts(s.d, w) == grammarValidateTree(g, w));
    }
    (void)accepted;
  }
}

TEST_CASE("snwa lifts to a simple alternating automaton") {
  TreeGrammar city = parseGrammar(kCityGrammar);
  Snwa s = grammarToSnwa(city);
  Sanwa lifted = snwaAsSanwa(s);  // throws if the witness were rejected
  std::vector<Symbol> alpha = labelsOf(city);

  Rng rng(11);
  for (size_t i = 0; i < 300; ++i) {
    NestedWord w = randomWord(rng, alpha, 10, 3);
    CHECK(sanwaVerify(lifted, w) == dnwaAccepts(s.d, w));
    CHECK(anwaMembership(lifted.a, w) == dnwaAccepts(s.d, w));
  }
  for (const NestedWord& w : enumerateTrees(alpha, 2, 3))
    CHECK(sanwaVerify(lifted, w) == grammarValidateTree(city, w));

  // complement flips membership
  Sanwa dual = sanwaDual(lifted);
  CHECK_FALSE(sanwaVerify(dual, nw(kCityDoc)));
  CHECK(sanwaVerify(dual, nw("<city></city>")));
  CHECK(sanwaVerify(dual, nw("")));

  // the summary game sees the intersection with the universal language
  SanwaNonemptyResult r = sanwaNwaNonempty(universalDnwa(alpha).a, lifted);
  CHECK(r.nonEmpty);
  CHECK(r.withinBudgets);
  r = sanwaNwaNonempty(wordListNwa({nw(kCityDoc)}, alpha), lifted);
  CHECK(r.nonEmpty);
  r = sanwaNwaNonempty(wordListNwa({nw("<city></city>")}, alpha), lifted);
  CHECK_FALSE(r.nonEmpty);
}
