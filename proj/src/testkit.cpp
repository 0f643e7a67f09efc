#include "axml/testkit.hpp"

#include <algorithm>
#include <sstream>

#include "axml/util.hpp"

namespace axml {

namespace {

constexpr size_t kEnumCap = 5000000;

NestedWord wrapWord(Symbol s, const NestedWord& w) {
  std::vector<Tag> tags{openTag(s)};
  tags.insert(tags.end(), w.tags().begin(), w.tags().end());
  tags.push_back(closeTag(s));
  return NestedWord(std::move(tags));
}

// forests of up to maxWidth factors drawn (with repetition) from trees
std::vector<NestedWord> forestsOf(const std::vector<NestedWord>& trees, size_t maxWidth) {
  std::vector<NestedWord> out{NestedWord()};
  std::vector<NestedWord> layer{NestedWord()};
  for (size_t k = 0; k < maxWidth; ++k) {
    std::vector<NestedWord> next;
    for (const NestedWord& f : layer) {
      for (const NestedWord& t : trees) {
        next.push_back(f + t);
        if (out.size() + next.size() > kEnumCap)
          fail("ExplosionGuard", "word enumeration exceeded " + std::to_string(kEnumCap));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
    if (layer.empty()) break;
  }
  return out;
}

void sortLengthLex(std::vector<NestedWord>& words) {
  std::sort(words.begin(), words.end(), [](const NestedWord& x, const NestedWord& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  words.erase(std::unique(words.begin(), words.end()), words.end());
}

}  // namespace

std::vector<NestedWord> enumerateTrees(const std::vector<Symbol>& alphabet, size_t maxDepth,
                                       size_t maxWidth) {
  if (maxWidth == 0) return {};  // a rooted word is one top-level factor
  std::vector<NestedWord> trees;  // all trees of depth up to the current layer
  for (size_t d = 0; d < maxDepth; ++d) {
    std::vector<NestedWord> grown;
    for (const NestedWord& f : forestsOf(trees, maxWidth)) {
      for (Symbol s : alphabet) {
        grown.push_back(wrapWord(s, f));
        if (grown.size() > kEnumCap)
          fail("ExplosionGuard", "tree enumeration exceeded " + std::to_string(kEnumCap));
      }
    }
    sortLengthLex(grown);
    if (grown == trees) break;  // no new shapes fit the bounds
    trees = std::move(grown);
  }
  sortLengthLex(trees);
  return trees;
}

std::vector<NestedWord> enumerateWords(const std::vector<Symbol>& alphabet, size_t maxDepth,
                                       size_t maxWidth) {
  std::vector<NestedWord> words = forestsOf(enumerateTrees(alphabet, maxDepth, maxWidth), maxWidth);
  sortLengthLex(words);
  return words;
}

Dre randomDre(Rng& rng, const std::vector<Symbol>& alphabet, size_t depth) {
  auto leaf = [&]() {
    if (alphabet.empty() || rng.chance(1, 5)) return rng.chance(1, 4) ? dreEmpty() : dreEpsilon();
    return dreSym(alphabet[rng.below(alphabet.size())]);
  };
  if (depth == 0) return leaf();
  switch (rng.below(6)) {
    case 0:
      return dreConcat({randomDre(rng, alphabet, depth - 1), randomDre(rng, alphabet, depth - 1)});
    case 1:
      return dreUnion({randomDre(rng, alphabet, depth - 1), randomDre(rng, alphabet, depth - 1)});
    case 2:
      return dreStar(randomDre(rng, alphabet, depth - 1));
    case 3:
      return dreOpt(randomDre(rng, alphabet, depth - 1));
    default:
      return leaf();
  }
}

NestedWord randomWord(Rng& rng, const std::vector<Symbol>& alphabet, size_t maxLen,
                      size_t maxDepth) {
  std::vector<Tag> tags;
  std::vector<Symbol> stack;
  size_t len = rng.below(maxLen + 1);
  while (tags.size() + stack.size() < len) {
    bool canOpen = stack.size() < maxDepth && tags.size() + stack.size() + 2 <= len;
    bool mustClose = !canOpen;
    if (!stack.empty() && (mustClose || rng.chance(1, 2))) {
      tags.push_back(closeTag(stack.back()));
      stack.pop_back();
    } else if (canOpen && !alphabet.empty()) {
      Symbol s = alphabet[rng.below(alphabet.size())];
      tags.push_back(openTag(s));
      stack.push_back(s);
    } else {
      break;
    }
  }
  while (!stack.empty()) {
    tags.push_back(closeTag(stack.back()));
    stack.pop_back();
  }
  return NestedWord(std::move(tags));
}

Dnwa randomDnwa(Rng& rng, const std::vector<Symbol>& alphabet, size_t states) {
  Nwa raw;
  for (size_t i = 0; i < states; ++i) raw.states.push_back("s" + std::to_string(i));
  raw.alphabet = alphabet;
  raw.initial = "s0";
  for (const std::string& q : raw.states)
    if (rng.chance(1, 3)) raw.accepting.push_back(q);
  auto pickState = [&] { return raw.states[rng.below(states)]; };
  for (const std::string& q : raw.states)
    for (Symbol s : alphabet) {
      if (rng.chance(4, 5)) raw.open[{q, s}] = {{pickState(), q}};
      for (const std::string& h : raw.states)
        if (rng.chance(4, 5)) raw.close[{q, h, s}] = {pickState()};
    }
  raw.normalizeStorage();
  // completion adds a stay-and-push sink, so normal form has to be restored
  return toNormalForm(makeDnwa(std::move(raw)));
}

Nwa randomNwa(Rng& rng, const std::vector<Symbol>& alphabet, size_t states) {
  Nwa a;
  for (size_t i = 0; i < states; ++i) a.states.push_back("s" + std::to_string(i));
  a.alphabet = alphabet;
  a.initial = "s0";
  for (const std::string& q : a.states)
    if (rng.chance(1, 3)) a.accepting.push_back(q);
  auto pick = [&] { return a.states[rng.below(states)]; };
  for (const std::string& q : a.states)
    for (Symbol s : alphabet) {
      while (rng.chance(3, 5) && a.open[{q, s}].size() < 2) a.open[{q, s}].push_back({pick(), pick()});
      for (const std::string& h : a.states)
        while (rng.chance(3, 5) && a.close[{q, h, s}].size() < 2) a.close[{q, h, s}].push_back(pick());
    }
  a.normalizeStorage();
  a.validate();
  return a;
}

namespace {

Formula randomOpenFormula(Rng& rng, const std::vector<std::string>& states, size_t depth) {
  if (depth == 0 || rng.chance(1, 2)) {
    if (rng.chance(1, 10)) return rng.chance(1, 2) ? fTrue() : fFalse();
    return fAtom(states[rng.below(states.size())], states[rng.below(states.size())]);
  }
  std::vector<Formula> kids{randomOpenFormula(rng, states, depth - 1),
                            randomOpenFormula(rng, states, depth - 1)};
  return rng.chance(1, 2) ? fAnd(std::move(kids)) : fOr(std::move(kids));
}

Formula randomCloseFormula(Rng& rng, const std::vector<std::string>& states, size_t depth) {
  if (depth == 0 || rng.chance(1, 2)) {
    if (rng.chance(1, 10)) return rng.chance(1, 2) ? fTrue() : fFalse();
    return fAtom(states[rng.below(states.size())]);
  }
  std::vector<Formula> kids{randomCloseFormula(rng, states, depth - 1),
                            randomCloseFormula(rng, states, depth - 1)};
  return rng.chance(1, 2) ? fAnd(std::move(kids)) : fOr(std::move(kids));
}

}  // namespace

Anwa randomAnwa(Rng& rng, const std::vector<Symbol>& alphabet, size_t states) {
  Anwa a;
  for (size_t i = 0; i < states; ++i) a.states.push_back("s" + std::to_string(i));
  a.alphabet = alphabet;
  a.initial = "s0";
  for (const std::string& q : a.states)
    if (rng.chance(1, 3)) a.accepting.push_back(q);
  for (const std::string& q : a.states)
    for (Symbol s : alphabet) {
      if (rng.chance(4, 5)) a.open[{q, s}] = randomOpenFormula(rng, a.states, 2);
      for (const std::string& h : a.states)
        if (rng.chance(3, 5)) a.close[{q, h, s}] = randomCloseFormula(rng, a.states, 2);
    }
  a.validate();
  return a;
}

Sanwa randomSanwa(uint64_t seed) { return snwaAsSanwa(grammarToSnwa(randomGrammar({}, seed))); }

Game randomFiniteGame(const RandomGameParams& p, uint64_t seed) {
  Rng rng(seed);
  std::vector<Symbol> alphabet;
  for (size_t i = 0; i < p.alphabet; ++i)
    alphabet.push_back(Symbol::intern(std::string(1, static_cast<char>('a' + i))));
  std::sort(alphabet.begin(), alphabet.end());
  Game g;
  g.alphabet = alphabet;
  for (size_t i = 0; i < std::min(p.functions, p.alphabet); ++i)
    if (rng.chance(2, 3) || g.functions.empty()) g.functions.push_back(alphabet[i]);
  std::sort(g.functions.begin(), g.functions.end());
  for (Symbol f : g.functions) {
    ReplacementSpec spec;
    size_t n = 1 + rng.below(p.maxWords);
    for (size_t i = 0; i < n; ++i)
      spec.words.push_back(randomWord(rng, alphabet, p.maxWordLen, p.maxWordDepth));
    spec.normalize();
    g.rules[f] = std::move(spec);
  }
  g.target = randomDnwa(rng, alphabet, p.states);
  g.validate();
  return g;
}

TreeGrammar randomGrammar(const RandomGrammarParams& p, uint64_t seed) {
  Rng rng(seed);
  TreeGrammar g;
  size_t nTypes = 1 + rng.below(p.types);
  for (size_t i = 0; i < nTypes; ++i) g.types.push_back("t" + std::to_string(i));
  for (size_t i = 0; i < nTypes; ++i)
    g.label[g.types[i]] = Symbol::intern(std::string(1, static_cast<char>('a' + rng.below(p.labels))));
  g.start = g.types[rng.below(nTypes)];
  for (const std::string& t : g.types) {
    // at most one mentioned type per label keeps the grammar single-type
    std::map<Symbol, std::string> perLabel;
    for (const std::string& u : g.types)
      if (rng.chance(1, 2)) perLabel[g.label.at(u)] = u;
    std::vector<Symbol> mentionable;
    for (const auto& [l, u] : perLabel) mentionable.push_back(Symbol::intern(u));
    for (int attempt = 0;; ++attempt) {
      Dre d = randomDre(rng, mentionable, p.dreDepth);
      if (dreCheckDeterminism(d).deterministic) {
        g.content[t] = std::move(d);
        break;
      }
      if (attempt == 20) {
        g.content[t] = dreEpsilon();
        break;
      }
    }
  }
  g.validate();
  return g;
}

namespace {

void checkQbfShape(const Qbf& q) {
  int n = static_cast<int>(q.vars());
  for (const auto& clause : q.clauses)
    for (int lit : clause)
      if (lit == 0 || lit > n || lit < -n)
        fail("SyntaxError", "literal " + std::to_string(lit) + " out of range");
}

bool matrixHolds(const Qbf& q, uint32_t assignment) {
  for (const auto& clause : q.clauses) {
    bool sat = false;
    for (int lit : clause) {
      uint32_t bit = (assignment >> (std::abs(lit) - 1)) & 1u;
      if ((lit > 0) == (bit != 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace

bool qbfEval(const Qbf& q) {
  if (q.vars() > 20)
    fail("TooManyVariables", std::to_string(q.vars()) + " variables, the evaluator takes 20");
  checkQbfShape(q);
  auto eval = [&](auto&& self, size_t i, uint32_t assignment) -> bool {
    if (i == q.vars()) return matrixHolds(q, assignment);
    bool whenTrue = self(self, i + 1, assignment | (1u << i));
    if (whenTrue == q.isExists[i]) return whenTrue;  // short circuit
    return self(self, i + 1, assignment);
  };
  return eval(eval, 0, 0);
}

Qbf parseQdimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Qbf q;
  size_t declaredClauses = 0;
  size_t boundVars = 0;  // quantifier lines must bind 1..n left to right
  bool sawHeader = false;
  bool inPrefix = true;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head == "c") continue;
    if (head == "p") {
      std::string fmt;
      size_t vars = 0;
      if (sawHeader || !(ls >> fmt >> vars >> declaredClauses) || fmt != "cnf")
        fail("ParseError", "expected a single 'p cnf <vars> <clauses>' header");
      q.isExists.assign(vars, false);
      sawHeader = true;
      continue;
    }
    if (!sawHeader) fail("ParseError", "clause or quantifier line before the header");
    if (head == "e" || head == "a") {
      if (!inPrefix) fail("ParseError", "quantifier line after the first clause");
      int v = 0;
      while (ls >> v && v != 0) {
        if (v < 0 || static_cast<size_t>(v) > q.isExists.size())
          fail("ParseError", "quantified variable " + std::to_string(v) + " out of range");
        if (static_cast<size_t>(v) != ++boundVars)
          fail("ParseError", "quantifier lines must bind variables 1..n in order");
        q.isExists[v - 1] = head == "e";
      }
      if (v != 0) fail("ParseError", "quantifier line not terminated by 0");
      continue;
    }
    inPrefix = false;
    std::vector<int> clause;
    std::istringstream cs(line);
    int lit = 0;
    bool terminated = false;
    while (cs >> lit) {
      if (lit == 0) {
        terminated = true;
        break;
      }
      if (static_cast<size_t>(std::abs(lit)) > q.isExists.size())
        fail("ParseError", "literal " + std::to_string(lit) + " out of range");
      clause.push_back(lit);
    }
    if (!terminated) fail("ParseError", "clause line not terminated by 0");
    q.clauses.push_back(std::move(clause));
  }
  if (!sawHeader) fail("ParseError", "missing 'p cnf' header");
  if (boundVars != q.isExists.size())
    fail("ParseError", "quantifier lines bind " + std::to_string(boundVars) + " of " +
                           std::to_string(q.isExists.size()) + " variables");
  if (q.clauses.size() != declaredClauses)
    fail("ParseError", "header declares " + std::to_string(declaredClauses) + " clauses, found " +
                           std::to_string(q.clauses.size()));
  return q;
}

std::string printQdimacs(const Qbf& q) {
  std::ostringstream out;
  out << "p cnf " << q.vars() << ' ' << q.clauses.size() << '\n';
  for (size_t i = 0; i < q.vars();) {
    size_t j = i;
    while (j < q.vars() && q.isExists[j] == q.isExists[i]) ++j;
    out << (q.isExists[i] ? 'e' : 'a');
    for (size_t v = i; v < j; ++v) out << ' ' << v + 1;
    out << " 0\n";
    i = j;
  }
  for (const auto& clause : q.clauses) {
    for (int lit : clause) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

std::pair<Anwa, NestedWord> qbfToAnwa(const Qbf& q) {
  checkQbfShape(q);
  size_t n = q.vars();
  size_t m = q.clauses.size();

  auto var = [](size_t i) { return Symbol::intern("v" + std::to_string(i)); };
  Symbol x = Symbol::intern("X");
  auto clauseState = [](size_t j) { return "q" + std::to_string(j); };
  auto hasLit = [&](size_t j, int lit) {
    const auto& c = q.clauses[j - 1];
    return std::find(c.begin(), c.end(), lit) != c.end();
  };

  Anwa a;
  a.states = {"q0", "q+", "q-", "qF"};
  for (size_t j = 1; j <= m; ++j) a.states.push_back(clauseState(j));
  std::sort(a.states.begin(), a.states.end());
  for (size_t i = 1; i <= n; ++i) a.alphabet.push_back(var(i));
  a.alphabet.push_back(x);
  std::sort(a.alphabet.begin(), a.alphabet.end());
  a.initial = "q0";
  a.accepting = {"qF"};

  // before <X> the automaton walks the variable spine, branching on each
  // variable into the two truth values; the state pushed at <v_i> is the value
  // chosen for x_{i-1} (the initial state under <v_1>)
  std::vector<std::string> spine{"q0", "q+", "q-"};
  for (const std::string& from : spine) {
    for (size_t i = 1; i <= n; ++i) {
      std::vector<Formula> value{fAtom("q+", from), fAtom("q-", from)};
      a.open[{from, var(i)}] = q.isExists[i - 1] ? fOr(std::move(value)) : fAnd(std::move(value));
    }
    std::vector<Formula> picks;
    for (size_t j = 1; j <= m; ++j) picks.push_back(fAtom(clauseState(j), from));
    a.open[{from, x}] = fAnd(std::move(picks));
  }
  // on the way out every clause branch looks for one satisfied literal; the
  // popped state carries the truth value of the variable the tag closes over
  for (size_t j = 1; j <= m; ++j) {
    for (bool positive : {true, false}) {
      std::string value = positive ? "q+" : "q-";
      if (n > 0)
        a.close[{clauseState(j), value, x}] =
            fAtom(hasLit(j, positive ? static_cast<int>(n) : -static_cast<int>(n))
                      ? "qF"
                      : clauseState(j));
      for (size_t i = 2; i <= n; ++i)
        a.close[{clauseState(j), value, var(i)}] =
            fAtom(hasLit(j, positive ? static_cast<int>(i - 1) : -static_cast<int>(i - 1))
                      ? "qF"
                      : clauseState(j));
    }
  }
  if (n > 0)
    for (const std::string& anyQ : a.states) a.close[{anyQ, "q0", var(1)}] = fAtom(anyQ);
  for (const std::string& h : a.states)
    for (size_t i = 1; i <= n; ++i) a.close[{"qF", h, var(i)}] = fAtom("qF");
  a.validate();

  std::vector<Tag> tags;
  for (size_t i = 1; i <= n; ++i) tags.push_back(openTag(var(i)));
  tags.push_back(openTag(x));
  tags.push_back(closeTag(x));
  for (size_t i = n; i > 0; --i) tags.push_back(closeTag(var(i)));
  return {std::move(a), NestedWord(std::move(tags))};
}

Game makeG0() {
  Game g;
  Symbol a = Symbol::intern("a");
  Symbol b = Symbol::intern("b");
  Symbol r = Symbol::intern("r");
  g.alphabet = {a, b, r};
  g.functions = {a};
  ReplacementSpec spec;
  spec.words = {parseNestedWord("<b></b>")};
  g.rules[a] = std::move(spec);
  Nwa raw;
  raw.states = {"bot", "q0", "q1", "q2", "q3", "qF"};
  raw.alphabet = g.alphabet;
  raw.initial = "q0";
  raw.accepting = {"qF"};
  for (const std::string& q : raw.states)
    for (Symbol s : g.alphabet) {
      raw.open[{q, s}] = {{"bot", q}};
      for (const std::string& h : raw.states) raw.close[{q, h, s}] = {"bot"};
    }
  raw.open[{"q0", r}] = {{"q1", "q0"}};
  raw.open[{"q1", b}] = {{"q2", "q1"}};
  raw.close[{"q2", "q1", b}] = {"q3"};
  raw.close[{"q3", "q0", r}] = {"qF"};
  raw.normalizeStorage();
  g.target = makeDnwa(std::move(raw));
  g.validate();
  return g;
}

NestedWord makeW0() { return parseNestedWord("<r><a></a></r>"); }

Game makeTwoStageGame() {
  Game g;
  Symbol a = Symbol::intern("a");
  Symbol b = Symbol::intern("b");
  Symbol c = Symbol::intern("c");
  Symbol r = Symbol::intern("r");
  g.alphabet = {a, b, c, r};
  g.functions = {a, b};
  ReplacementSpec ra;
  ra.words = {parseNestedWord("<b></b>")};
  g.rules[a] = std::move(ra);
  ReplacementSpec rb;
  rb.words = {parseNestedWord("<c></c>")};
  g.rules[b] = std::move(rb);
  g.target = wordListDnwa({parseNestedWord("<r><c></c></r>")}, g.alphabet);
  g.validate();
  return g;
}

namespace {

constexpr size_t kEffectOracleBudget = 2000000;

// raw set-of-sets semantics, minimized only by the caller: every recursive
// step below keeps dominated sets so the oracle stays independent of the
// antichain algebra it is checking
struct EffectOracle {
  const Game& g;
  size_t depthCap;
  size_t ops = 0;

  void spend(size_t n) {
    ops += n;
    if (ops > kEffectOracleBudget)
      fail("ExplosionGuard", "effect oracle exceeded " + std::to_string(kEffectOracleBudget) +
                                 " operations");
  }

  // all outcome sets of Juliet strategies reading tags[pos..] from q; ctx
  // carries the replacement context per tag, stack the pre-open states
  std::set<StateSet> run(const EffectSpace& space, const std::vector<Tag>& tags,
                         const std::vector<uint32_t>& ctx, size_t pos, const std::string& q,
                         std::vector<std::string>& stack) {
    spend(1);
    if (pos == tags.size()) return {space.bit(q)};
    const Tag& t = tags[pos];
    if (t.open) {
      const auto& [q1, h] = g.target.openStep(q, t.symbol);
      stack.push_back(h);
      std::set<StateSet> out = run(space, tags, ctx, pos + 1, q1, stack);
      stack.pop_back();
      return out;
    }
    std::string h = stack.back();
    stack.pop_back();
    std::set<StateSet> out =
        run(space, tags, ctx, pos + 1, g.target.closeStep(q, h, t.symbol), stack);
    if (g.isFunction(t.symbol) && ctx[pos] <= depthCap) {
      // a call: Romeo picks any replacement word, so a strategy contributes
      // the union of one achievable set per word
      const ReplacementSpec& spec = g.rules.at(t.symbol);
      if (!spec.isExplicit())
        fail("ExplicitRulesRequired", "effect oracle needs explicit words for " + t.symbol.str());
      std::vector<std::set<StateSet>> perWord;
      for (const NestedWord& v : spec.words) {
        std::vector<uint32_t> innerCtx(v.size(), ctx[pos] + 1);
        std::vector<std::string> innerStack;
        std::set<StateSet> after;
        // read the replacement from the pre-open state h, then go on with
        // the rest of the word
        for (StateSet mid : run(space, v.tags(), innerCtx, 0, h, innerStack)) {
          std::vector<std::set<StateSet>> cont;
          for (const std::string& name : space.names(mid)) {
            std::vector<std::string> restStack = stack;
            cont.push_back(run(space, tags, ctx, pos + 1, name, restStack));
          }
          // Romeo also resolves which mid state the play continues from
          for (StateSet u : unionsOf(cont)) after.insert(u);
        }
        perWord.push_back(std::move(after));
      }
      for (StateSet u : unionsOf(perWord)) out.insert(u);
    }
    stack.push_back(std::move(h));
    return out;
  }

  // all unions drawing one set from every entry
  std::set<StateSet> unionsOf(const std::vector<std::set<StateSet>>& family) {
    std::set<StateSet> acc{0};
    for (const std::set<StateSet>& f : family) {
      std::set<StateSet> next;
      for (StateSet s : acc)
        for (StateSet t : f) {
          next.insert(s | t);
          spend(1);
        }
      acc = std::move(next);
    }
    return acc;
  }
};

}  // namespace

Antichain bruteForceEffect(const Game& g, const NestedWord& w, const std::string& q,
                           size_t depthCap) {
  g.validate();
  EffectSpace space(g.target);
  EffectOracle oracle{g, depthCap};
  std::vector<uint32_t> ctx(w.size(), 1);
  std::vector<std::string> stack;
  std::set<StateSet> raw = oracle.run(space, w.tags(), ctx, 0, q, stack);
  return minimize(std::vector<StateSet>(raw.begin(), raw.end()));
}

}  // namespace axml
