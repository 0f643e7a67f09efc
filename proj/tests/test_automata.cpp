#include <doctest.h>

#include <algorithm>

#include "axml/automata.hpp"
#include "axml/util.hpp"

using namespace axml;

namespace {

Symbol sym(const char* s) { return Symbol::intern(s); }

NestedWord nw(const std::string& text) { return parseNestedWord(text); }

// the running example target: accepts exactly <r><b></b></r>
Dnwa makeA0() {
  Nwa n;
  n.states = {"q0", "q1", "q2", "q3", "qF"};
  n.alphabet = {sym("a"), sym("b"), sym("r")};
  n.initial = "q0";
  n.accepting = {"qF"};
  n.open[{"q0", sym("r")}] = {{"q1", "q0"}};
  n.open[{"q1", sym("b")}] = {{"q2", "q1"}};
  n.close[{"q2", "q1", sym("b")}] = {"q3"};
  n.close[{"q3", "q0", sym("r")}] = {"qF"};
  return makeDnwa(std::move(n));
}

NestedWord wrap(Symbol s, const NestedWord& w) {
  std::vector<Tag> tags{openTag(s)};
  tags.insert(tags.end(), w.tags().begin(), w.tags().end());
  tags.push_back(closeTag(s));
  return NestedWord(std::move(tags));
}

// every word over the alphabet up to the given tag length, grown by appending
// a matched pair or wrapping the whole word
std::vector<NestedWord> smallWords(size_t maxLen,
                                   std::vector<Symbol> alpha = {sym("a"), sym("b"), sym("r")}) {
  std::vector<NestedWord> out{nw("")};
  for (size_t round = 0; round < maxLen / 2; ++round) {
    std::vector<NestedWord> next = out;
    for (const NestedWord& w : out) {
      if (w.size() + 2 > maxLen) continue;
      for (Symbol s : alpha) {
        next.push_back(w + flatEmbed({s}));
        next.push_back(wrap(s, w));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("completion adds a fresh sink and keeps the language") {
  Dnwa a0 = makeA0();
  CHECK(a0.sink == "bot");
  CHECK(a0.a.states == std::vector<std::string>{"bot", "q0", "q1", "q2", "q3", "qF"});
  CHECK(dnwaAccepts(a0, nw("<r><b></b></r>")));
  CHECK_FALSE(dnwaAccepts(a0, nw("<r><a></a></r>")));
  CHECK_FALSE(dnwaAccepts(a0, nw("")));
  CHECK_FALSE(dnwaAccepts(a0, nw("<r><b></b></r><r><b></b></r>")));
  // fresh sink name extends when taken
  Nwa n;
  n.states = {"bot", "x"};
  n.alphabet = {sym("a")};
  n.initial = "x";
  n.accepting = {"x"};
  Dnwa d = makeDnwa(std::move(n));
  CHECK(d.sink == "bot_");
}

TEST_CASE("runDnwa follows open and close steps") {
  Dnwa a0 = makeA0();
  CHECK(runDnwa(a0, "q0", nw("<r><b></b></r>")) == "qF");
  CHECK(runDnwa(a0, "q0", nw("<r></r>")) == "bot");
  CHECK(runDnwa(a0, "q1", nw("<b></b>")) == "q3");
  CHECK(runDnwa(a0, "q0", nw("")) == "q0");
  CHECK_THROWS_WITH_AS(runDnwa(a0, "q0", nw("<z></z>")),
                       doctest::Contains("SymbolNotInAlphabet"), AxmlError);
}

TEST_CASE("nondeterministic duplicates are rejected") {
  Nwa n;
  n.states = {"p", "q"};
  n.alphabet = {sym("a")};
  n.initial = "p";
  n.accepting = {"q"};
  n.open[{"p", sym("a")}] = {{"p", "p"}, {"q", "p"}};
  CHECK_THROWS_WITH_AS(makeDnwa(std::move(n)), doctest::Contains("NotDeterministic"), AxmlError);
}

TEST_CASE("nwaAccepts explores nondeterministic runs with correlated stacks") {
  // two open choices; only the push made at the open decides the close
  Nwa n;
  n.states = {"s", "x", "y", "h1", "h2", "f"};
  n.alphabet = {sym("a")};
  n.initial = "s";
  n.accepting = {"f"};
  n.open[{"s", sym("a")}] = {{"x", "h1"}, {"y", "h2"}};
  n.close[{"x", "h2", sym("a")}] = {"f"};  // wrong pairing, never taken
  n.close[{"y", "h2", sym("a")}] = {"f"};
  n.normalizeStorage();
  CHECK(nwaAccepts(n, nw("<a></a>")));
  n.close.erase({"y", "h2", sym("a")});
  CHECK_FALSE(nwaAccepts(n, nw("<a></a>")));
}

TEST_CASE("normal form pushes the source state and preserves runs") {
  // build a total automaton whose pushes are not the source
  Nwa n;
  n.states = {"p", "q"};
  n.alphabet = {sym("a")};
  n.initial = "p";
  n.accepting = {"q"};
  for (const std::string& s : {"p", "q"}) {
    n.open[{s, sym("a")}] = {{s == "p" ? "q" : "p", "q"}};  // always push q
    for (const std::string& h : {"p", "q"}) n.close[{s, h, sym("a")}] = {s == "p" ? "p" : "q"};
  }
  Dnwa d = makeDnwa(std::move(n));
  Dnwa nf = toNormalForm(d);
  for (const auto& [key, val] : nf.a.open) CHECK(val.front().second == key.first);
  for (const NestedWord& w : smallWords(6, {sym("a")}))
    CHECK(runDnwa(d, "p", w) == runDnwa(nf, "p", w));
  // idempotent and bit-identical on already-normal input
  Dnwa nf2 = toNormalForm(nf);
  CHECK(nf2.a.open == nf.a.open);
  CHECK(nf2.a.close == nf.a.close);
  CHECK(nf2.a.states == nf.a.states);
}

TEST_CASE("product recognizes the intersection") {
  Dnwa a0 = makeA0();
  Dnwa uni = universalDnwa(a0.a.alphabet);
  Dnwa both = product(a0, uni);
  for (const NestedWord& w : smallWords(6))
    CHECK(dnwaAccepts(both, w) == dnwaAccepts(a0, w));
  Nwa mismatched;
  mismatched.states = {"u"};
  mismatched.alphabet = {sym("z")};
  mismatched.initial = "u";
  mismatched.accepting = {"u"};
  CHECK_THROWS_WITH_AS(product(a0, makeDnwa(std::move(mismatched))),
                       doctest::Contains("AlphabetMismatch"), AxmlError);
}

TEST_CASE("complement obeys De Morgan on small words") {
  Dnwa a0 = makeA0();
  Dnwa co = complementDnwa(a0);
  Dnwa coco = complementDnwa(co);
  for (const NestedWord& w : smallWords(6)) {
    CHECK(dnwaAccepts(co, w) == !dnwaAccepts(a0, w));
    CHECK(dnwaAccepts(coco, w) == dnwaAccepts(a0, w));
  }
}

TEST_CASE("wellMatchedReach matches bounded enumeration") {
  Dnwa a0 = makeA0();
  auto reach = wellMatchedReach(a0);
  // brute force over small words from every state
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& q : a0.a.states)
    for (const NestedWord& w : smallWords(8)) expected.insert({q, runDnwa(a0, q, w)});
  CHECK(reach == expected);
  CHECK(reach.count({"q1", "q3"}) == 1);   // <b></b>
  CHECK(reach.count({"q0", "qF"}) == 1);   // <r><b></b></r>
  CHECK(reach.count({"q0", "q3"}) == 0);
}

TEST_CASE("word list trie accepts exactly the listed words") {
  std::vector<Symbol> alpha{sym("a"), sym("b"), sym("r")};
  std::vector<NestedWord> words{nw("<b></b>"), nw("<r><a></a></r>"), nw("")};
  Dnwa d = wordListDnwa(words, alpha);
  for (const NestedWord& w : smallWords(6)) {
    bool listed = std::find(words.begin(), words.end(), w) != words.end();
    CHECK(dnwaAccepts(d, w) == listed);
  }
  // trie pushes are sources; completion adds sink pushes, renormalizing keeps
  // the language
  Nwa raw = wordListNwa(words, alpha);
  for (const auto& [key, val] : raw.open)
    for (const auto& [q1, p] : val) CHECK(p == key.first);
  Dnwa nf = toNormalForm(d);
  for (const NestedWord& w : smallWords(6)) CHECK(dnwaAccepts(nf, w) == dnwaAccepts(d, w));
}
