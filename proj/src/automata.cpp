#include "axml/automata.hpp"

#include <algorithm>

namespace axml {

namespace {

void sortUnique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string pairName(const std::string& p, const std::string& q) {
  return "pair(" + p + "," + q + ")";
}

}  // namespace

bool Nwa::isAccepting(const std::string& q) const {
  return std::binary_search(accepting.begin(), accepting.end(), q);
}

bool Nwa::hasState(const std::string& q) const {
  return std::binary_search(states.begin(), states.end(), q);
}

bool Nwa::hasSymbol(Symbol s) const {
  return std::binary_search(alphabet.begin(), alphabet.end(), s);
}

void Nwa::normalizeStorage() {
  sortUnique(states);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  sortUnique(accepting);
  for (auto& [key, v] : open) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& [key, v] : close) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

void Nwa::validate() const {
  if (states.empty()) fail("SyntaxError", "automaton has no states");
  if (!hasState(initial)) fail("SyntaxError", "initial state '" + initial + "' not declared");
  for (const auto& q : accepting)
    if (!hasState(q)) fail("SyntaxError", "accepting state '" + q + "' not declared");
  for (const auto& [key, succs] : open) {
    if (!hasState(key.first)) fail("SyntaxError", "open transition from unknown state '" + key.first + "'");
    if (!hasSymbol(key.second)) fail("SymbolNotInAlphabet", key.second.str());
    for (const auto& [q, h] : succs) {
      if (!hasState(q)) fail("SyntaxError", "open transition to unknown state '" + q + "'");
      if (!hasState(h)) fail("SyntaxError", "open transition pushes unknown state '" + h + "'");
    }
  }
  for (const auto& [key, succs] : close) {
    if (!hasState(std::get<0>(key)))
      fail("SyntaxError", "close transition from unknown state '" + std::get<0>(key) + "'");
    if (!hasState(std::get<1>(key)))
      fail("SyntaxError", "close transition pops unknown state '" + std::get<1>(key) + "'");
    if (!hasSymbol(std::get<2>(key))) fail("SymbolNotInAlphabet", std::get<2>(key).str());
    for (const auto& q : succs)
      if (!hasState(q)) fail("SyntaxError", "close transition to unknown state '" + q + "'");
  }
}

const std::pair<std::string, std::string>& Dnwa::openStep(const std::string& q, Symbol s) const {
  if (!a.hasSymbol(s)) fail("SymbolNotInAlphabet", s.str());
  auto it = a.open.find({q, s});
  if (it == a.open.end() || it->second.size() != 1)
    fail("SyntaxError", "missing open transition (" + q + ", " + s.str() + ")");
  return it->second.front();
}

const std::string& Dnwa::closeStep(const std::string& q, const std::string& h, Symbol s) const {
  if (!a.hasSymbol(s)) fail("SymbolNotInAlphabet", s.str());
  auto it = a.close.find({q, h, s});
  if (it == a.close.end() || it->second.size() != 1)
    fail("SyntaxError", "missing close transition (" + q + ", " + h + ", " + s.str() + ")");
  return it->second.front();
}

Dnwa makeDnwa(Nwa raw) {
  raw.normalizeStorage();
  raw.validate();
  for (const auto& [key, succs] : raw.open)
    if (succs.size() > 1)
      fail("NotDeterministic",
           "open (" + key.first + ", " + key.second.str() + ") has " + std::to_string(succs.size()) + " successors");
  for (const auto& [key, succs] : raw.close)
    if (succs.size() > 1)
      fail("NotDeterministic", "close (" + std::get<0>(key) + ", " + std::get<1>(key) + ", " +
                                   std::get<2>(key).str() + ") has " + std::to_string(succs.size()) +
                                   " successors");

  bool total = true;
  for (const auto& q : raw.states) {
    for (Symbol s : raw.alphabet) {
      if (!raw.open.count({q, s})) {
        total = false;
        break;
      }
      for (const auto& h : raw.states)
        if (!raw.close.count({q, h, s})) {
          total = false;
          break;
        }
      if (!total) break;
    }
    if (!total) break;
  }

  Dnwa d;
  if (total) {
    d.a = std::move(raw);
    return d;
  }

  std::string sink = "bot";
  while (raw.hasState(sink)) sink += "_";
  raw.states.push_back(sink);
  sortUnique(raw.states);
  for (const auto& q : raw.states) {
    for (Symbol s : raw.alphabet) {
      auto& o = raw.open[{q, s}];
      if (o.empty()) o.emplace_back(sink, sink);
      for (const auto& h : raw.states) {
        auto& c = raw.close[{q, h, s}];
        if (c.empty()) c.push_back(sink);
      }
    }
  }
  raw.validate();
  d.a = std::move(raw);
  d.sink = sink;
  return d;
}

std::string runDnwa(const Dnwa& d, const std::string& from, const NestedWord& w) {
  if (!d.a.hasState(from)) fail("SyntaxError", "run from unknown state '" + from + "'");
  std::string q = from;
  std::vector<std::string> stack;
  for (const Tag& t : w.tags()) {
    if (t.open) {
      const auto& [q1, h] = d.openStep(q, t.symbol);
      stack.push_back(h);
      q = q1;
    } else {
      q = d.closeStep(q, stack.back(), t.symbol);
      stack.pop_back();
    }
  }
  return q;
}

bool dnwaAccepts(const Dnwa& d, const NestedWord& w) {
  return d.a.isAccepting(runDnwa(d, d.a.initial, w));
}

bool nwaAccepts(const Nwa& a, const NestedWord& w) {
  std::map<std::string, int> stateIdx;
  for (size_t i = 0; i < a.states.size(); ++i) stateIdx[a.states[i]] = static_cast<int>(i);
  // interned stacks: node = (parent node, pushed state); -1 = empty stack
  std::vector<std::pair<int, int>> stackNodes;
  std::map<std::pair<int, int>, int> stackIds;
  auto pushStack = [&](int parent, int h) {
    auto [it, inserted] = stackIds.try_emplace({parent, h}, static_cast<int>(stackNodes.size()));
    if (inserted) stackNodes.emplace_back(parent, h);
    return it->second;
  };

  std::set<std::pair<int, int>> configs;  // (linear state, stack node)
  configs.insert({stateIdx.at(a.initial), -1});
  for (const Tag& t : w.tags()) {
    if (!a.hasSymbol(t.symbol)) fail("SymbolNotInAlphabet", t.symbol.str());
    std::set<std::pair<int, int>> next;
    for (const auto& [qi, sn] : configs) {
      if (t.open) {
        auto it = a.open.find({a.states[qi], t.symbol});
        if (it == a.open.end()) continue;
        for (const auto& [q1, h] : it->second)
          next.insert({stateIdx.at(q1), pushStack(sn, stateIdx.at(h))});
      } else {
        const auto& [parent, hi] = stackNodes[sn];
        auto it = a.close.find({a.states[qi], a.states[hi], t.symbol});
        if (it == a.close.end()) continue;
        for (const auto& q1 : it->second) next.insert({stateIdx.at(q1), parent});
      }
    }
    configs = std::move(next);
    if (configs.empty()) return false;
  }
  for (const auto& [qi, sn] : configs)
    if (a.isAccepting(a.states[qi])) return true;
  return false;
}

Dnwa toNormalForm(const Dnwa& d) {
  Nwa n;
  n.states = d.a.states;
  n.alphabet = d.a.alphabet;
  n.initial = d.a.initial;
  n.accepting = d.a.accepting;
  for (const auto& p : d.a.states) {
    for (Symbol s : d.a.alphabet) {
      const auto& [q1, h] = d.openStep(p, s);
      n.open[{p, s}] = {{q1, p}};
      for (const auto& q : d.a.states) n.close[{q, p, s}] = {d.closeStep(q, h, s)};
    }
  }
  Dnwa out = makeDnwa(std::move(n));
  out.sink = d.sink;
  return out;
}

Dnwa product(const Dnwa& x, const Dnwa& y) {
  if (x.a.alphabet != y.a.alphabet)
    fail("AlphabetMismatch", "product requires identical alphabets");
  Nwa n;
  n.alphabet = x.a.alphabet;
  for (const auto& p : x.a.states)
    for (const auto& q : y.a.states) n.states.push_back(pairName(p, q));
  n.initial = pairName(x.a.initial, y.a.initial);
  for (const auto& p : x.a.accepting)
    for (const auto& q : y.a.accepting) n.accepting.push_back(pairName(p, q));
  for (const auto& p : x.a.states) {
    for (const auto& q : y.a.states) {
      for (Symbol s : n.alphabet) {
        const auto& [p1, hx] = x.openStep(p, s);
        const auto& [q1, hy] = y.openStep(q, s);
        n.open[{pairName(p, q), s}] = {{pairName(p1, q1), pairName(hx, hy)}};
        for (const auto& hp : x.a.states)
          for (const auto& hq : y.a.states)
            n.close[{pairName(p, q), pairName(hp, hq), s}] = {
                pairName(x.closeStep(p, hp, s), y.closeStep(q, hq, s))};
      }
    }
  }
  return makeDnwa(std::move(n));
}

Dnwa complementDnwa(const Dnwa& d) {
  Dnwa out = d;
  std::vector<std::string> acc;
  for (const auto& q : d.a.states)
    if (!d.a.isAccepting(q)) acc.push_back(q);
  out.a.accepting = std::move(acc);
  return out;
}

std::set<std::pair<std::string, std::string>> wellMatchedReach(const Dnwa& d) {
  const auto& states = d.a.states;
  std::set<std::pair<std::string, std::string>> r;
  for (const auto& q : states) r.insert({q, q});
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<std::string, std::string>> found;
    // transitive composition
    for (const auto& [p, q] : r)
      for (const auto& q2 : states)
        if (r.count({q, q2}) && !r.count({p, q2})) found.emplace_back(p, q2);
    // wrap a reachable interior in matching open/close
    for (const auto& p : states) {
      for (Symbol s : d.a.alphabet) {
        const auto& [p1, h] = d.openStep(p, s);
        for (const auto& q1 : states) {
          if (!r.count({p1, q1})) continue;
          const auto& q2 = d.closeStep(q1, h, s);
          if (!r.count({p, q2})) found.emplace_back(p, q2);
        }
      }
    }
    for (auto& e : found)
      if (r.insert(std::move(e)).second) changed = true;
  }
  return r;
}

Dnwa universalDnwa(const std::vector<Symbol>& alphabet) {
  Nwa n;
  n.states = {"u"};
  n.alphabet = alphabet;
  n.initial = "u";
  n.accepting = {"u"};
  for (Symbol s : n.alphabet) {
    n.open[{"u", s}] = {{"u", "u"}};
    n.close[{"u", "u", s}] = {"u"};
  }
  return makeDnwa(std::move(n));
}

Nwa wordListNwa(const std::vector<NestedWord>& words, const std::vector<Symbol>& alphabet) {
  std::vector<NestedWord> sorted = words;
  std::sort(sorted.begin(), sorted.end(), [](const NestedWord& a, const NestedWord& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  Nwa n;
  n.alphabet = alphabet;
  std::sort(n.alphabet.begin(), n.alphabet.end());
  n.alphabet.erase(std::unique(n.alphabet.begin(), n.alphabet.end()), n.alphabet.end());

  auto name = [](size_t i) { return "t" + std::to_string(i); };
  size_t nStates = 1;  // t0 = root
  n.initial = name(0);
  // trie edges: key distinguishes opens from closes via the popped state ("" for opens)
  std::map<std::tuple<size_t, bool, uint32_t>, size_t> edges;
  std::set<size_t> acceptingIdx;
  for (const NestedWord& w : sorted) {
    size_t cur = 0;
    std::vector<size_t> stack;  // state index before each pending open
    for (const Tag& t : w.tags()) {
      if (!std::binary_search(n.alphabet.begin(), n.alphabet.end(), t.symbol))
        fail("SymbolNotInAlphabet", t.symbol.str());
      size_t before = cur;
      auto key = std::make_tuple(cur, t.open, t.symbol.id());
      auto it = edges.find(key);
      size_t nxt;
      if (it != edges.end()) {
        nxt = it->second;
      } else {
        nxt = nStates++;
        edges.emplace(key, nxt);
        if (t.open) {
          n.open[{name(before), t.symbol}] = {{name(nxt), name(before)}};
        } else {
          n.close[{name(before), name(stack.back()), t.symbol}] = {name(nxt)};
        }
      }
      if (t.open) {
        stack.push_back(before);
      } else {
        stack.pop_back();
      }
      cur = nxt;
    }
    acceptingIdx.insert(cur);
  }
  for (size_t i = 0; i < nStates; ++i) n.states.push_back(name(i));
  for (size_t i : acceptingIdx) n.accepting.push_back(name(i));
  n.normalizeStorage();
  n.validate();
  return n;
}

Dnwa wordListDnwa(const std::vector<NestedWord>& words, const std::vector<Symbol>& alphabet) {
  // completion adds a stay-and-push sink, so normal form has to be restored
  return toNormalForm(makeDnwa(wordListNwa(words, alphabet)));
}

}  // namespace axml
