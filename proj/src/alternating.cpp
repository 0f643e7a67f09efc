#include "axml/alternating.hpp"

#include <algorithm>
#include <cmath>

namespace axml {

namespace {

void sortUnique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string pairName(const std::string& p, const std::string& q) {
  return "pair(" + p + "," + q + ")";
}

std::string trkName(const std::string& q) { return "trk(" + q + ")"; }

Formula dualize(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
      return fFalse();
    case Formula::Kind::False:
      return fTrue();
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.kids.size());
      for (const Formula& k : f.kids) kids.push_back(dualize(k));
      Formula out;
      out.kind = f.kind == Formula::Kind::And ? Formula::Kind::Or : Formula::Kind::And;
      out.kids = std::move(kids);
      return out;
    }
  }
  return fFalse();
}

}  // namespace

Formula fTrue() {
  Formula f;
  f.kind = Formula::Kind::True;
  return f;
}

Formula fFalse() {
  Formula f;
  f.kind = Formula::Kind::False;
  return f;
}

Formula fAtom(std::string q, std::string h) {
  Formula f;
  f.kind = Formula::Kind::Atom;
  f.q = std::move(q);
  f.h = std::move(h);
  return f;
}

Formula fAnd(std::vector<Formula> kids) {
  if (kids.empty()) return fTrue();
  if (kids.size() == 1) return std::move(kids.front());
  Formula f;
  f.kind = Formula::Kind::And;
  f.kids = std::move(kids);
  return f;
}

Formula fOr(std::vector<Formula> kids) {
  if (kids.empty()) return fFalse();
  if (kids.size() == 1) return std::move(kids.front());
  Formula f;
  f.kind = Formula::Kind::Or;
  f.kids = std::move(kids);
  return f;
}

void collectAtoms(const Formula& f, std::set<std::pair<std::string, std::string>>& out) {
  if (f.kind == Formula::Kind::Atom) out.insert({f.q, f.h});
  for (const Formula& k : f.kids) collectAtoms(k, out);
}

namespace {

struct FormulaParser {
  const std::string& text;
  size_t pos = 0;

  explicit FormulaParser(const std::string& t) : text(t) {}

  void skipWs() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool identChar(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '\'' || c == '?' || c == '!' || c == '.' || c == ':' || c == '-';
  }

  std::string ident() {
    skipWs();
    size_t start = pos;
    while (pos < text.size() && identChar(text[pos])) ++pos;
    if (pos == start) fail("SyntaxError", "expected identifier in formula at offset " + std::to_string(pos));
    return text.substr(start, pos - start);
  }

  bool eat(char c) {
    skipWs();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c))
      fail("SyntaxError", std::string("expected '") + c + "' in formula at offset " + std::to_string(pos));
  }

  Formula expr() {
    std::vector<Formula> terms;
    terms.push_back(term());
    while (eat('|')) terms.push_back(term());
    return fOr(std::move(terms));
  }

  Formula term() {
    std::vector<Formula> prims;
    prims.push_back(prim());
    while (eat('&')) prims.push_back(prim());
    return fAnd(std::move(prims));
  }

  Formula prim() {
    skipWs();
    if (eat('(')) {
      Formula inner = expr();
      // bare identifier followed by ',' is an open atom, otherwise grouping
      if (inner.kind == Formula::Kind::Atom && inner.h.empty() && eat(',')) {
        std::string h = ident();
        expect(')');
        return fAtom(inner.q, h);
      }
      expect(')');
      return inner;
    }
    std::string name = ident();
    if (name == "true") return fTrue();
    if (name == "false") return fFalse();
    return fAtom(name);
  }

  Formula parse() {
    Formula f = expr();
    skipWs();
    if (pos != text.size())
      fail("SyntaxError", "trailing characters in formula at offset " + std::to_string(pos));
    return f;
  }
};

void printInto(const Formula& f, std::string& out, bool parenthesizeOr) {
  switch (f.kind) {
    case Formula::Kind::True:
      out += "true";
      return;
    case Formula::Kind::False:
      out += "false";
      return;
    case Formula::Kind::Atom:
      if (f.h.empty()) {
        out += f.q;
      } else {
        out += "(" + f.q + "," + f.h + ")";
      }
      return;
    case Formula::Kind::And:
      for (size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += " & ";
        printInto(f.kids[i], out, true);
      }
      return;
    case Formula::Kind::Or: {
      if (parenthesizeOr) out += "(";
      for (size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += " | ";
        printInto(f.kids[i], out, false);
      }
      if (parenthesizeOr) out += ")";
      return;
    }
  }
}

}  // namespace

Formula parseFormula(const std::string& text) {
  FormulaParser p(text);
  return p.parse();
}

std::string printFormula(const Formula& f) {
  std::string out;
  printInto(f, out, false);
  return out;
}

bool Anwa::isAccepting(const std::string& q) const {
  return std::binary_search(accepting.begin(), accepting.end(), q);
}

bool Anwa::hasState(const std::string& q) const {
  return std::binary_search(states.begin(), states.end(), q);
}

bool Anwa::hasSymbol(Symbol s) const {
  return std::binary_search(alphabet.begin(), alphabet.end(), s);
}

void Anwa::normalizeStorage() {
  sortUnique(states);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  sortUnique(accepting);
}

void Anwa::validate() const {
  if (states.empty()) fail("SyntaxError", "automaton has no states");
  if (!hasState(initial)) fail("SyntaxError", "initial state '" + initial + "' not declared");
  for (const auto& q : accepting)
    if (!hasState(q)) fail("SyntaxError", "accepting state '" + q + "' not declared");
  auto checkFormula = [&](const Formula& f, bool isOpen, const std::string& where) {
    std::set<std::pair<std::string, std::string>> atoms;
    collectAtoms(f, atoms);
    for (const auto& [q, h] : atoms) {
      if (!hasState(q)) fail("SyntaxError", "formula at " + where + " uses unknown state '" + q + "'");
      if (isOpen) {
        if (h.empty()) fail("SyntaxError", "open formula at " + where + " has an atom without pushed state");
        if (!hasState(h)) fail("SyntaxError", "formula at " + where + " pushes unknown state '" + h + "'");
      } else if (!h.empty()) {
        fail("SyntaxError", "close formula at " + where + " has a paired atom");
      }
    }
  };
  for (const auto& [key, f] : open) {
    if (!hasState(key.first)) fail("SyntaxError", "open formula from unknown state '" + key.first + "'");
    if (!hasSymbol(key.second)) fail("SymbolNotInAlphabet", key.second.str());
    checkFormula(f, true, key.first + "/<" + key.second.str() + ">");
  }
  for (const auto& [key, f] : close) {
    if (!hasState(std::get<0>(key)))
      fail("SyntaxError", "close formula from unknown state '" + std::get<0>(key) + "'");
    if (!hasState(std::get<1>(key)))
      fail("SyntaxError", "close formula pops unknown state '" + std::get<1>(key) + "'");
    if (!hasSymbol(std::get<2>(key))) fail("SymbolNotInAlphabet", std::get<2>(key).str());
    checkFormula(f, false, std::get<0>(key) + "/</" + std::get<2>(key).str() + ">");
  }
}

namespace {

struct MembershipCtx {
  const Anwa& a;
  const NestedWord& w;
  std::map<std::string, int> stateIdx;
  std::vector<std::pair<int, int>> stackNodes;  // (parent, pushed state)
  std::map<std::pair<int, int>, int> stackIds;
  std::map<std::tuple<int, size_t, int>, bool> memo;

  explicit MembershipCtx(const Anwa& anwa, const NestedWord& word) : a(anwa), w(word) {
    for (size_t i = 0; i < a.states.size(); ++i) stateIdx[a.states[i]] = static_cast<int>(i);
  }

  int pushStack(int parent, int h) {
    auto [it, inserted] = stackIds.try_emplace({parent, h}, static_cast<int>(stackNodes.size()));
    if (inserted) stackNodes.emplace_back(parent, h);
    return it->second;
  }

  bool run(int q, size_t pos, int stack) {
    if (pos == w.size()) return a.isAccepting(a.states[q]);
    auto key = std::make_tuple(q, pos, stack);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    memo.emplace(key, false);  // cycles cannot occur (pos advances), placeholder only

    const Tag& t = w.at(pos);
    bool result;
    if (t.open) {
      auto fit = a.open.find({a.states[q], t.symbol});
      result = fit != a.open.end() &&
               evalFormula(fit->second, [&](const std::string& q1, const std::string& h) {
                 return run(stateIdx.at(q1), pos + 1, pushStack(stack, stateIdx.at(h)));
               });
    } else {
      const auto& [parent, hi] = stackNodes[stack];
      auto fit = a.close.find({a.states[q], a.states[hi], t.symbol});
      result = fit != a.close.end() &&
               evalFormula(fit->second, [&](const std::string& q1, const std::string&) {
                 return run(stateIdx.at(q1), pos + 1, parent);
               });
    }
    memo[key] = result;
    return result;
  }
};

}  // namespace

bool anwaMembership(const Anwa& a, const NestedWord& w) {
  for (const Tag& t : w.tags())
    if (!a.hasSymbol(t.symbol)) fail("SymbolNotInAlphabet", t.symbol.str());
  MembershipCtx ctx(a, w);
  ctx.stackNodes.emplace_back(-1, -1);  // id 0 = empty stack sentinel, never popped
  return ctx.run(ctx.stateIdx.at(a.initial), 0, 0);
}

Anwa anwaDual(const Anwa& a) {
  Anwa out;
  out.states = a.states;
  out.alphabet = a.alphabet;
  out.initial = a.initial;
  for (const auto& q : a.states)
    if (!a.isAccepting(q)) out.accepting.push_back(q);
  for (const auto& q : a.states) {
    for (Symbol s : a.alphabet) {
      auto oit = a.open.find({q, s});
      out.open[{q, s}] = oit == a.open.end() ? fTrue() : dualize(oit->second);
      for (const auto& h : a.states) {
        auto cit = a.close.find({q, h, s});
        out.close[{q, h, s}] = cit == a.close.end() ? fTrue() : dualize(cit->second);
      }
    }
  }
  out.validate();
  return out;
}

namespace {

// substitutes nwa moves into one alternating formula at an open position
Formula intersectOpenFormula(const Formula& f, const Nwa& b, const std::string& qb, Symbol s) {
  auto moves = b.open.find({qb, s});
  auto eachMove = [&](auto&& atomOf) {
    std::vector<Formula> alts;
    if (moves != b.open.end())
      for (const auto& [qb1, hb] : moves->second) alts.push_back(atomOf(qb1, hb));
    return fOr(std::move(alts));
  };
  switch (f.kind) {
    case Formula::Kind::False:
      return fFalse();
    case Formula::Kind::True:
      return eachMove([&](const std::string& qb1, const std::string& hb) {
        return fAtom(trkName(qb1), trkName(hb));
      });
    case Formula::Kind::Atom:
      return eachMove([&](const std::string& qb1, const std::string& hb) {
        return fAtom(pairName(f.q, qb1), pairName(f.h, hb));
      });
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      for (const Formula& k : f.kids) kids.push_back(intersectOpenFormula(k, b, qb, s));
      Formula out;
      out.kind = f.kind;
      out.kids = std::move(kids);
      return out;
    }
  }
  return fFalse();
}

Formula intersectCloseFormula(const Formula& f, const Nwa& b, const std::string& qb,
                              const std::string& hb, Symbol s) {
  auto moves = b.close.find({qb, hb, s});
  auto eachMove = [&](auto&& atomOf) {
    std::vector<Formula> alts;
    if (moves != b.close.end())
      for (const auto& qb1 : moves->second) alts.push_back(atomOf(qb1));
    return fOr(std::move(alts));
  };
  switch (f.kind) {
    case Formula::Kind::False:
      return fFalse();
    case Formula::Kind::True:
      return eachMove([&](const std::string& qb1) { return fAtom(trkName(qb1)); });
    case Formula::Kind::Atom:
      return eachMove([&](const std::string& qb1) { return fAtom(pairName(f.q, qb1)); });
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      for (const Formula& k : f.kids) kids.push_back(intersectCloseFormula(k, b, qb, hb, s));
      Formula out;
      out.kind = f.kind;
      out.kids = std::move(kids);
      return out;
    }
  }
  return fFalse();
}

}  // namespace

Anwa anwaIntersectNwa(const Anwa& a, const Nwa& b) {
  if (a.alphabet != b.alphabet) fail("AlphabetMismatch", "intersection requires identical alphabets");
  Anwa out;
  out.alphabet = a.alphabet;
  for (const auto& p : a.states)
    for (const auto& q : b.states) out.states.push_back(pairName(p, q));
  for (const auto& q : b.states) out.states.push_back(trkName(q));
  out.initial = pairName(a.initial, b.initial);
  for (const auto& p : a.accepting)
    for (const auto& q : b.accepting) out.accepting.push_back(pairName(p, q));
  for (const auto& q : b.accepting) out.accepting.push_back(trkName(q));

  for (const auto& p : a.states) {
    for (const auto& qb : b.states) {
      for (Symbol s : a.alphabet) {
        auto oit = a.open.find({p, s});
        if (oit != a.open.end()) {
          Formula f = intersectOpenFormula(oit->second, b, qb, s);
          if (!(f == fFalse())) out.open[{pairName(p, qb), s}] = std::move(f);
        }
        for (const auto& h : a.states) {
          for (const auto& hb : b.states) {
            auto cit = a.close.find({p, h, s});
            if (cit == a.close.end()) continue;
            Formula f = intersectCloseFormula(cit->second, b, qb, hb, s);
            if (!(f == fFalse()))
              out.close[{pairName(p, qb), pairName(h, hb), s}] = std::move(f);
          }
        }
      }
    }
  }
  // tracker states carry the nwa run after an alternating branch ended on True
  for (const auto& qb : b.states) {
    for (Symbol s : a.alphabet) {
      auto oit = b.open.find({qb, s});
      if (oit != b.open.end()) {
        std::vector<Formula> alts;
        for (const auto& [qb1, hb] : oit->second) alts.push_back(fAtom(trkName(qb1), trkName(hb)));
        out.open[{trkName(qb), s}] = fOr(std::move(alts));
      }
      for (const auto& hb : b.states) {
        auto cit = b.close.find({qb, hb, s});
        if (cit == b.close.end()) continue;
        std::vector<Formula> alts;
        for (const auto& qb1 : cit->second) alts.push_back(fAtom(trkName(qb1)));
        Formula f = fOr(std::move(alts));
        // the popped entry may come from a pair-state open below the branch point
        out.close[{trkName(qb), trkName(hb), s}] = f;
        for (const auto& h : a.states) out.close[{trkName(qb), pairName(h, hb), s}] = f;
      }
    }
  }
  out.normalizeStorage();
  out.validate();
  return out;
}

namespace {

// depth-first walk over the well-formed tag sequences of one fixed length in
// lexicographic tag order; opens sort before closes, so shallow words come
// before deep ones of the same length
struct BoundedWordEnum {
  const std::vector<Symbol>& alphabet;
  size_t maxDepth, maxWidth, len;
  size_t& budget;  // complete words still allowed, shared across lengths
  bool& exhausted;

  std::vector<Tag> tags;
  std::vector<Symbol> stack;
  std::vector<size_t> children{0};  // per open frame; slot 0 counts top-level factors

  // visit(word) returns true to stop the whole search
  template <typename F>
  bool dfs(F&& visit) {
    if (tags.size() == len) {
      if (budget == 0) {
        exhausted = false;
        return true;
      }
      --budget;
      return visit(NestedWord(std::vector<Tag>(tags)));
    }
    size_t remaining = len - tags.size();
    // every open frame still needs its close
    if (stack.size() > remaining) return false;
    if (stack.size() < maxDepth && children.back() < maxWidth && stack.size() + 2 <= remaining) {
      for (Symbol s : alphabet) {
        ++children.back();
        stack.push_back(s);
        children.push_back(0);
        tags.push_back(openTag(s));
        bool stop = dfs(visit);
        tags.pop_back();
        children.pop_back();
        stack.pop_back();
        --children.back();
        if (stop) return true;
      }
    }
    if (!stack.empty()) {
      Symbol s = stack.back();
      size_t saved = children.back();
      children.pop_back();
      stack.pop_back();
      tags.push_back(closeTag(s));
      bool stop = dfs(visit);
      tags.pop_back();
      stack.push_back(s);
      children.push_back(saved);
      if (stop) return true;
    }
    return false;
  }
};

}  // namespace

EmptinessResult anwaEmptinessBounded(const Anwa& a, size_t maxDepth, size_t maxWidth,
                                     size_t maxWords) {
  // largest node count the bounds allow; the budget cuts the search off long
  // before this for all but tiny bounds
  size_t maxNodes = 0, layer = 1;
  for (size_t d = 0; d < maxDepth; ++d) {
    layer *= maxWidth;
    maxNodes += layer;
    if (maxNodes > maxWords) {
      maxNodes = maxWords;
      break;
    }
  }
  EmptinessResult res;
  size_t budget = maxWords;
  for (size_t len = 0; len <= 2 * maxNodes; len += 2) {
    BoundedWordEnum en{a.alphabet, maxDepth, maxWidth, len, budget, res.exhausted, {}, {}, {0}};
    bool stopped = en.dfs([&](NestedWord w) {
      if (!anwaMembership(a, w)) return false;
      res.nonEmpty = true;
      res.witness = std::move(w);
      return true;
    });
    if (stopped) break;
  }
  return res;
}

const std::string& Sanwa::typeName(const std::string& q) const {
  auto it = w.typeOf.find(q);
  if (it == w.typeOf.end()) fail("SyntaxError", "state '" + q + "' has no declared type");
  return it->second;
}

bool Sanwa::locallyAccepting(const std::string& q, Symbol s) const {
  auto it = w.localAccept.find(s);
  return it != w.localAccept.end() && it->second.count(q) > 0;
}

const std::string& Sanwa::target(const std::string& h, Symbol s) const {
  if (w.failure && h == *w.failure) return *w.failure;
  auto it = w.targetFn.find({h, s});
  if (it == w.targetFn.end())
    fail("NotHorizontallySimple", "no target for popped state '" + h + "' on '" + s.str() + "'");
  return it->second;
}

Sanwa checkSimplicity(const Anwa& a, const SimplicityWitness& w) {
  a.validate();
  if (!a.hasState(w.testState)) fail("SyntaxError", "test state '" + w.testState + "' not declared");
  if (w.antiTestState && !a.hasState(*w.antiTestState))
    fail("SyntaxError", "anti-test state '" + *w.antiTestState + "' not declared");
  if (w.antiTestState && *w.antiTestState == w.testState)
    fail("SyntaxError", "anti-test state equals the test state");
  if (w.failure && !a.hasState(*w.failure))
    fail("SyntaxError", "failure state '" + *w.failure + "' not declared");
  if (w.failure && (*w.failure == w.testState || (w.antiTestState && *w.failure == *w.antiTestState)))
    fail("SyntaxError", "failure state equals a test state");

  auto isSpecial = [&](const std::string& q) {
    return q == w.testState || (w.antiTestState && q == *w.antiTestState) ||
           (w.failure && q == *w.failure);
  };
  for (const auto& [q, ty] : w.typeOf) {
    if (!a.hasState(q)) fail("SyntaxError", "typed state '" + q + "' not declared");
    if (isSpecial(q)) fail("SyntaxError", "special state '" + q + "' must not carry a type");
    (void)ty;
  }
  for (const auto& q : a.states)
    if (!isSpecial(q) && !w.typeOf.count(q))
      fail("SyntaxError", "state '" + q + "' has no declared type");
  for (const auto& [s, states] : w.localAccept)
    for (const auto& q : states)
      if (!a.hasState(q)) fail("SyntaxError", "locally accepting state '" + q + "' on '" + s.str() +
                                                  "' not declared");

  Sanwa out{a, w};

  // target function must be total on typed states and preserve the type
  for (const auto& [q, ty] : w.typeOf) {
    for (Symbol s : a.alphabet) {
      auto it = w.targetFn.find({q, s});
      if (it == w.targetFn.end())
        fail("NotHorizontallySimple", "no target for state '" + q + "' on '" + s.str() + "'");
      const std::string& tgt = it->second;
      if (w.failure && tgt == *w.failure) continue;
      if (!w.typeOf.count(tgt) || w.typeOf.at(tgt) != ty)
        fail("TypeNotPreserved", "target of ('" + q + "', '" + s.str() + "') is '" + tgt +
                                     "' outside type '" + ty + "'");
    }
  }

  // horizontal simplicity: closes only look at the popped state
  for (const auto& [key, f] : a.close) {
    const auto& [q, h, s] = key;
    if (h == w.testState) {
      bool acc = out.locallyAccepting(q, s);
      if (!((acc && f == fTrue()) || (!acc && f == fFalse())))
        fail("NotHorizontallySimple",
             "close formula (" + q + ", " + h + ", " + s.str() + ") disagrees with local acceptance");
    } else if (w.antiTestState && h == *w.antiTestState) {
      bool acc = out.locallyAccepting(q, s);
      if (!((acc && f == fFalse()) || (!acc && f == fTrue())))
        fail("NotHorizontallySimple",
             "close formula (" + q + ", " + h + ", " + s.str() +
                 ") disagrees with complemented local acceptance");
    } else if (w.failure && h == *w.failure) {
      if (!(f == fAtom(*w.failure)))
        fail("NotHorizontallySimple",
             "close formula (" + q + ", " + h + ", " + s.str() + ") must return the failure state");
    } else {
      if (!(f == fAtom(out.target(h, s))))
        fail("NotHorizontallySimple",
             "close formula (" + q + ", " + h + ", " + s.str() + ") is not the target atom");
    }
  }

  // vertical simplicity: one linear successor per (type, symbol), pushed
  // states stay inside the source type (test and failure states aside), and
  // open formulas of typed states must be present and satisfiable
  std::map<std::pair<std::string, Symbol>, std::string> linOf;
  for (const auto& [q, ty] : w.typeOf) {
    for (Symbol s : a.alphabet) {
      auto it = a.open.find({q, s});
      if (it == a.open.end() || it->second == fFalse())
        fail("NotVerticallySimple", "type '" + ty + "' has a blocked open on '" + s.str() + "'");
      std::set<std::pair<std::string, std::string>> atoms;
      collectAtoms(it->second, atoms);
      for (const auto& [lin, hier] : atoms) {
        auto [lit, inserted] = linOf.try_emplace({ty, s}, lin);
        if (!inserted && lit->second != lin)
          fail("NotVerticallySimple",
               "type '" + ty + "' has two linear successors on '" + s.str() + "'");
        if (hier == w.testState || (w.antiTestState && hier == *w.antiTestState) ||
            (w.failure && hier == *w.failure))
          continue;
        if (!w.typeOf.count(hier) || w.typeOf.at(hier) != ty)
          fail("NotVerticallySimple", "type '" + ty + "' pushes state '" + hier +
                                          "' outside the type on '" + s.str() + "'");
      }
    }
  }
  return out;
}

namespace {

struct VerifyCtx {
  const Sanwa& s;
  const NestedWord& w;
  std::map<std::tuple<std::string, size_t, size_t, uint64_t>, bool> memo;

  // segment w[i..j] read from q; f = enclosing called symbol, invalid at top
  // level; anti complements the local-acceptance check at the segment end
  bool verify(const std::string& q, size_t i, size_t j, Symbol f, bool anti) {
    if (i > j) {
      if (!f.valid()) return s.a.isAccepting(q);
      return s.locallyAccepting(q, f) != anti;
    }
    uint64_t ctxKey = (static_cast<uint64_t>(f.valid() ? f.id() : 0) << 1) | (anti ? 1 : 0);
    auto key = std::make_tuple(q, i, j, ctxKey);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const Tag& t = w.at(i);
    if (!t.open) fail("NotWellNested", "segment does not start with an open tag");
    size_t m = w.matching(i);
    Symbol a = t.symbol;
    bool result = false;
    auto fit = s.a.open.find({q, a});
    if (fit != s.a.open.end()) {
      result = evalFormula(fit->second, [&](const std::string& q1, const std::string& h) {
        if (h == s.w.testState) {
          // descend into the content; empty content is handled by i > j
          return m == i + 1 ? s.locallyAccepting(q1, a) : verify(q1, i + 1, m - 1, a, false);
        }
        if (s.w.antiTestState && h == *s.w.antiTestState) {
          return m == i + 1 ? !s.locallyAccepting(q1, a) : verify(q1, i + 1, m - 1, a, true);
        }
        // jump across the factor and continue from the target state
        return verify(s.target(h, a), m + 1, j, f, anti);
      });
    }
    memo[key] = result;
    return result;
  }
};

}  // namespace

bool sanwaVerify(const Sanwa& s, const NestedWord& word) {
  for (const Tag& t : word.tags())
    if (!s.a.hasSymbol(t.symbol)) fail("SymbolNotInAlphabet", t.symbol.str());
  if (word.empty()) return s.a.isAccepting(s.a.initial);
  VerifyCtx ctx{s, word, {}};
  return ctx.verify(s.a.initial, 0, word.size() - 1, Symbol(), false);
}

Sanwa sanwaDual(const Sanwa& s) {
  Sanwa out;
  out.w = s.w;
  out.a.states = s.a.states;
  out.a.alphabet = s.a.alphabet;
  out.a.initial = s.a.initial;
  for (const auto& q : s.a.states)
    if (!s.a.isAccepting(q)) out.a.accepting.push_back(q);
  // complemented local acceptance over everything but the test states
  auto isTest = [&](const std::string& q) {
    return q == s.w.testState || (s.w.antiTestState && q == *s.w.antiTestState);
  };
  out.w.localAccept.clear();
  for (Symbol sym : s.a.alphabet) {
    std::set<std::string>& acc = out.w.localAccept[sym];
    for (const auto& q : s.a.states)
      if (!isTest(q) && !s.locallyAccepting(q, sym)) acc.insert(q);
  }
  for (const auto& q : s.a.states) {
    for (Symbol sym : s.a.alphabet) {
      auto oit = s.a.open.find({q, sym});
      out.a.open[{q, sym}] = oit == s.a.open.end() ? fTrue() : dualize(oit->second);
      for (const auto& h : s.a.states) {
        Formula f;
        if (h == s.w.testState) {
          f = out.w.localAccept.at(sym).count(q) ? fTrue() : fFalse();
        } else if (s.w.antiTestState && h == *s.w.antiTestState) {
          f = out.w.localAccept.at(sym).count(q) ? fFalse() : fTrue();
        } else if (s.w.failure && h == *s.w.failure) {
          f = fAtom(*s.w.failure);
        } else if (s.w.typeOf.count(h)) {
          f = fAtom(s.target(h, sym));
        } else {
          continue;
        }
        out.a.close[{q, h, sym}] = std::move(f);
      }
    }
  }
  out.a.validate();
  return out;
}

namespace {

// summary element: some word takes A from q1 to q2, and for every B state in
// the map there is a run over the same word whose surviving branches end
// exactly in the recorded frontier (jump reads of enclosed factors included)
struct SummaryElem {
  int q1 = 0, q2 = 0;
  std::map<int, uint64_t> s;
  bool operator<(const SummaryElem& o) const {
    if (q1 != o.q1) return q1 < o.q1;
    if (q2 != o.q2) return q2 < o.q2;
    return s < o.s;
  }
  bool operator==(const SummaryElem& o) const { return q1 == o.q1 && q2 == o.q2 && s == o.s; }
};

struct SummaryOption {
  bool usesTest = false;
  bool usesAnti = false;
  int lin = -1;          // linear successor, only meaningful with a test branch
  uint64_t frontier = 0; // union of targets of the non-test pushed states
  bool operator<(const SummaryOption& o) const {
    return std::tie(usesTest, usesAnti, lin, frontier) <
           std::tie(o.usesTest, o.usesAnti, o.lin, o.frontier);
  }
};

constexpr size_t kMaxSummaryElems = 2000000;

}  // namespace

SanwaNonemptyResult sanwaNwaNonempty(const Nwa& a, const Sanwa& b) {
  if (a.alphabet != b.a.alphabet)
    fail("AlphabetMismatch", "intersection game requires identical alphabets");
  if (b.a.states.size() > 64)
    fail("SearchSpaceExceeded", "intersection game supports at most 64 states on the simple side");

  std::map<std::string, int> aIdx, bIdx;
  for (size_t i = 0; i < a.states.size(); ++i) aIdx[a.states[i]] = static_cast<int>(i);
  for (size_t i = 0; i < b.a.states.size(); ++i) bIdx[b.a.states[i]] = static_cast<int>(i);
  const int testIdx = bIdx.at(b.w.testState);
  const int antiIdx = b.w.antiTestState ? bIdx.at(*b.w.antiTestState) : -1;

  // claim-bearing B states: runs never start at a test state
  std::vector<int> dom;
  for (size_t i = 0; i < b.a.states.size(); ++i)
    if (static_cast<int>(i) != testIdx && static_cast<int>(i) != antiIdx)
      dom.push_back(static_cast<int>(i));

  // per (B state, symbol): all (linear successor, pushed set) shapes
  // satisfying the open formula, folded to distinct option records
  std::map<std::pair<int, uint32_t>, std::vector<SummaryOption>> options;
  for (int q : dom) {
    for (Symbol sym : b.a.alphabet) {
      auto fit = b.a.open.find({b.a.states[q], sym});
      if (fit == b.a.open.end()) continue;
      const Formula& f = fit->second;
      std::set<std::pair<std::string, std::string>> atomSet;
      collectAtoms(f, atomSet);
      std::vector<std::pair<std::string, std::string>> atoms(atomSet.begin(), atomSet.end());
      if (atoms.size() > 20) fail("SearchSpaceExceeded", "open formula has too many atoms");
      std::set<SummaryOption> found;
      for (uint64_t mask = 0; mask < (1ull << atoms.size()); ++mask) {
        std::set<std::pair<std::string, std::string>> chosen;
        std::string lin;
        bool sameLin = true;
        for (size_t i = 0; i < atoms.size(); ++i) {
          if (!(mask & (1ull << i))) continue;
          chosen.insert(atoms[i]);
          if (lin.empty()) {
            lin = atoms[i].first;
          } else if (lin != atoms[i].first) {
            sameLin = false;
          }
        }
        if (!sameLin) continue;
        if (!evalFormula(f, [&](const std::string& ql, const std::string& hl) {
              return chosen.count({ql, hl}) > 0;
            }))
          continue;
        SummaryOption opt;
        for (const auto& [ql, hl] : chosen) {
          (void)ql;
          if (hl == b.w.testState) {
            opt.usesTest = true;
          } else if (b.w.antiTestState && hl == *b.w.antiTestState) {
            opt.usesAnti = true;
          } else {
            opt.frontier |= 1ull << bIdx.at(b.target(hl, sym));
          }
        }
        opt.lin = (opt.usesTest || opt.usesAnti) ? bIdx.at(lin) : -1;
        found.insert(opt);
      }
      if (!found.empty())
        options[{q, sym.id()}] = std::vector<SummaryOption>(found.begin(), found.end());
    }
  }

  auto isTestName = [&](const std::string& q) {
    return q == b.w.testState || (b.w.antiTestState && q == *b.w.antiTestState);
  };
  uint64_t acceptBits = 0;
  for (const auto& q : b.a.accepting)
    if (!isTestName(q)) acceptBits |= 1ull << bIdx.at(q);
  std::map<Symbol, uint64_t> localBits;
  for (Symbol sym : b.a.alphabet) {
    uint64_t bits = 0;
    auto it = b.w.localAccept.find(sym);
    if (it != b.w.localAccept.end())
      for (const auto& q : it->second)
        if (!isTestName(q)) bits |= 1ull << bIdx.at(q);
    localBits[sym] = bits;
  }

  std::set<SummaryElem> world;
  auto addElem = [&](SummaryElem e) {
    if (world.size() >= kMaxSummaryElems)
      fail("SearchSpaceExceeded", "intersection game summary set exceeded its cap");
    return world.insert(std::move(e)).second;
  };

  // empty-word claims
  for (size_t q = 0; q < a.states.size(); ++q) {
    SummaryElem e;
    e.q1 = e.q2 = static_cast<int>(q);
    for (int d : dom) e.s[d] = 1ull << d;
    addElem(std::move(e));
  }

  // enumerate per-B-state option choices for one enclosing symbol; optionOk
  // encodes the test-branch side condition of the current rule
  auto emitWrapped = [&](int q1, int q2, Symbol sym, auto&& optionOk, auto&& emit) {
    std::vector<std::pair<int, std::vector<SummaryOption>>> usable;
    for (int q : dom) {
      auto it = options.find({q, sym.id()});
      if (it == options.end()) continue;
      std::vector<SummaryOption> ok;
      for (const SummaryOption& o : it->second)
        if (optionOk(o)) ok.push_back(o);
      if (!ok.empty()) usable.emplace_back(q, std::move(ok));
    }
    std::map<int, uint64_t> acc;
    auto rec = [&](auto&& self, size_t i) -> void {
      if (i == usable.size()) {
        SummaryElem e;
        e.q1 = q1;
        e.q2 = q2;
        e.s = acc;
        emit(std::move(e));
        return;
      }
      for (const SummaryOption& o : usable[i].second) {
        acc[usable[i].first] = o.frontier;
        self(self, i + 1);
      }
      acc.erase(usable[i].first);
    };
    rec(rec, 0);
  };

  // single open/close pairs straight from the rules
  std::vector<SummaryElem> pending;
  for (const auto& [key, succs] : a.open) {
    Symbol sym = key.second;
    int q1 = aIdx.at(key.first);
    for (const auto& [q1i, p] : succs) {
      auto cit = a.close.find({q1i, p, sym});
      if (cit == a.close.end()) continue;
      for (const auto& q2s : cit->second) {
        emitWrapped(q1, aIdx.at(q2s), sym,
                    [&](const SummaryOption& o) {
                      bool acc = o.lin >= 0 && ((localBits.at(sym) >> o.lin) & 1ull) != 0;
                      if (o.usesTest && !acc) return false;
                      if (o.usesAnti && acc) return false;
                      return true;
                    },
                    [&](SummaryElem e) { pending.push_back(std::move(e)); });
      }
    }
  }
  for (SummaryElem& e : pending) addElem(std::move(e));

  SanwaNonemptyResult res;
  size_t deltaA = 0;
  for (const auto& [k, v] : a.open) {
    (void)k;
    deltaA += v.size();
  }
  for (const auto& [k, v] : a.close) {
    (void)k;
    deltaA += v.size();
  }
  double logArg = std::max<double>(2.0, static_cast<double>(a.alphabet.size()) *
                                            static_cast<double>(a.states.size()));
  res.budgetConcat =
      static_cast<size_t>(std::ceil(static_cast<double>(b.a.states.size()) * std::log2(logArg)));
  res.budgetNesting = 3 * (a.alphabet.size() + 1) * a.states.size() * a.states.size() *
                      std::max<size_t>(deltaA, 1);

  auto composeAll = [&]() {
    size_t rounds = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<SummaryElem> found;
      for (const SummaryElem& e1 : world) {
        for (const SummaryElem& e2 : world) {
          if (e1.q2 != e2.q1) continue;
          SummaryElem e;
          e.q1 = e1.q1;
          e.q2 = e2.q2;
          bool any = false;
          for (const auto& [q, bits] : e1.s) {
            uint64_t unionBits = 0;
            bool ok = true;
            for (int t = 0; t < 64 && ok; ++t) {
              if (!(bits & (1ull << t))) continue;
              auto it = e2.s.find(t);
              if (it == e2.s.end()) {
                ok = false;
              } else {
                unionBits |= it->second;
              }
            }
            if (ok) {
              e.s[q] = unionBits;
              any = true;
            }
          }
          (void)any;
          if (!world.count(e)) found.push_back(std::move(e));
        }
      }
      for (SummaryElem& e : found)
        if (addElem(std::move(e))) changed = true;
      if (changed) ++rounds;
    }
    return rounds;
  };

  res.concatRounds = composeAll();
  size_t nesting = 0;
  while (true) {
    std::vector<SummaryElem> wraps;
    for (const auto& [key, succs] : a.open) {
      Symbol sym = key.second;
      int q1 = aIdx.at(key.first);
      for (const auto& [q1is, p] : succs) {
        int q1i = aIdx.at(q1is);
        for (const SummaryElem& inner : world) {
          if (inner.q1 != q1i) continue;
          auto cit = a.close.find({a.states[inner.q2], p, sym});
          if (cit == a.close.end()) continue;
          for (const auto& q2s : cit->second) {
            emitWrapped(q1, aIdx.at(q2s), sym,
                        [&](const SummaryOption& o) {
                          if (!o.usesTest && !o.usesAnti) return true;
                          auto it = inner.s.find(o.lin);
                          if (it == inner.s.end()) return false;
                          if (o.usesTest && (it->second & ~localBits.at(sym)) != 0) return false;
                          if (o.usesAnti && (it->second & localBits.at(sym)) != 0) return false;
                          return true;
                        },
                        [&](SummaryElem e) {
                          if (!world.count(e)) wraps.push_back(std::move(e));
                        });
          }
        }
      }
    }
    bool grew = false;
    for (SummaryElem& e : wraps)
      if (addElem(std::move(e))) grew = true;
    if (!grew) break;
    ++nesting;
    res.concatRounds = std::max(res.concatRounds, composeAll());
  }
  res.nestingRounds = nesting;
  res.withinBudgets =
      res.concatRounds <= res.budgetConcat && res.nestingRounds <= res.budgetNesting;
  res.elements = world.size();

  int initA = aIdx.at(a.initial);
  int initB = bIdx.at(b.a.initial);
  for (const SummaryElem& e : world) {
    if (e.q1 != initA) continue;
    if (!a.isAccepting(a.states[e.q2])) continue;
    auto it = e.s.find(initB);
    if (it == e.s.end()) continue;
    if ((it->second & ~acceptBits) == 0) {
      res.nonEmpty = true;
      break;
    }
  }
  return res;
}

}  // namespace axml
