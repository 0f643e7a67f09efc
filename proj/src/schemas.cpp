#include "axml/schemas.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <sstream>

#include "axml/util.hpp"

namespace axml {

namespace {

bool identChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '^' || c == '\'' ||
         c == ':' || c == '-';
}

struct DreParser {
  const std::string& text;
  size_t pos = 0;

  void skipWs() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek(char c) {
    skipWs();
    return pos < text.size() && text[pos] == c;
  }

  Dre parsePrimary() {
    skipWs();
    if (pos >= text.size()) fail("SyntaxError", "expected expression at offset " + std::to_string(pos));
    if (text[pos] == '(') {
      ++pos;
      Dre inner = parseUnion();
      if (!peek(')')) fail("SyntaxError", "expected ')' at offset " + std::to_string(pos));
      ++pos;
      return inner;
    }
    size_t start = pos;
    while (pos < text.size() && identChar(text[pos])) ++pos;
    if (pos == start) fail("SyntaxError", "expected name at offset " + std::to_string(pos));
    std::string name = text.substr(start, pos - start);
    if (name == "eps") return dreEpsilon();
    if (name == "empty") return dreEmpty();
    return dreSym(Symbol::intern(name));
  }

  Dre parsePostfix() {
    Dre d = parsePrimary();
    while (true) {
      if (peek('*')) {
        ++pos;
        d = dreStar(std::move(d));
      } else if (peek('?')) {
        ++pos;
        d = dreOpt(std::move(d));
      } else {
        break;
      }
    }
    return d;
  }

  Dre parseConcat() {
    std::vector<Dre> kids{parsePostfix()};
    while (peek('.')) {
      ++pos;
      kids.push_back(parsePostfix());
    }
    return dreConcat(std::move(kids));
  }

  Dre parseUnion() {
    std::vector<Dre> kids{parseConcat()};
    while (peek('+')) {
      ++pos;
      kids.push_back(parseConcat());
    }
    return dreUnion(std::move(kids));
  }
};

// marked-expression data: positions numbered 1..n in reading order
struct Glushkov {
  std::vector<Symbol> symAt{Symbol()};  // slot 0 unused
  bool nullable = false;
  std::vector<size_t> first, last;
  std::map<size_t, std::vector<size_t>> follow;
};

struct SubInfo {
  bool nullable = false;
  std::vector<size_t> first, last;
};

void addFollow(Glushkov& g, const std::vector<size_t>& from, const std::vector<size_t>& to) {
  for (size_t p : from) {
    auto& f = g.follow[p];
    for (size_t q : to)
      if (std::find(f.begin(), f.end(), q) == f.end()) f.push_back(q);
  }
}

SubInfo walkDre(const Dre& d, Glushkov& g) {
  switch (d.kind) {
    case Dre::Kind::Empty:
      return {false, {}, {}};
    case Dre::Kind::Epsilon:
      return {true, {}, {}};
    case Dre::Kind::Sym: {
      size_t p = g.symAt.size();
      g.symAt.push_back(d.sym);
      return {false, {p}, {p}};
    }
    case Dre::Kind::Concat: {
      SubInfo acc{true, {}, {}};
      for (const Dre& k : d.kids) {
        SubInfo s = walkDre(k, g);
        addFollow(g, acc.last, s.first);
        if (acc.nullable) acc.first.insert(acc.first.end(), s.first.begin(), s.first.end());
        if (s.nullable) {
          acc.last.insert(acc.last.end(), s.last.begin(), s.last.end());
        } else {
          acc.last = s.last;
        }
        acc.nullable = acc.nullable && s.nullable;
      }
      return acc;
    }
    case Dre::Kind::Union: {
      SubInfo acc{false, {}, {}};
      for (const Dre& k : d.kids) {
        SubInfo s = walkDre(k, g);
        acc.nullable = acc.nullable || s.nullable;
        acc.first.insert(acc.first.end(), s.first.begin(), s.first.end());
        acc.last.insert(acc.last.end(), s.last.begin(), s.last.end());
      }
      return acc;
    }
    case Dre::Kind::Star: {
      SubInfo s = walkDre(d.kids.at(0), g);
      addFollow(g, s.last, s.first);
      s.nullable = true;
      return s;
    }
    case Dre::Kind::Opt: {
      SubInfo s = walkDre(d.kids.at(0), g);
      s.nullable = true;
      return s;
    }
  }
  return {};
}

Glushkov glushkov(const Dre& d) {
  Glushkov g;
  SubInfo top = walkDre(d, g);
  g.nullable = top.nullable;
  g.first = std::move(top.first);
  g.last = std::move(top.last);
  return g;
}

// first pair of distinct equally-labelled positions, scanning by position
std::optional<std::pair<size_t, size_t>> symbolClash(const Glushkov& g, std::vector<size_t> set) {
  std::sort(set.begin(), set.end());
  std::map<Symbol, size_t> seen;
  for (size_t p : set) {
    auto [it, inserted] = seen.try_emplace(g.symAt[p], p);
    if (!inserted && it->second != p) return std::make_pair(it->second, p);
  }
  return std::nullopt;
}

std::string freshName(std::string base, const std::set<std::string>& taken) {
  while (taken.count(base)) base += "_";
  return base;
}

std::string stateName(const std::string& type, size_t dfaState) {
  return type + "." + std::to_string(dfaState);
}

}  // namespace

Dre parseDre(const std::string& text) {
  DreParser p{text};
  Dre d = p.parseUnion();
  p.skipWs();
  if (p.pos != text.size())
    fail("SyntaxError", "trailing characters in expression at offset " + std::to_string(p.pos));
  return d;
}

namespace {

// precedence: union 1, concat 2, postfix 3
int drePrec(const Dre& d) {
  switch (d.kind) {
    case Dre::Kind::Union:
      return 1;
    case Dre::Kind::Concat:
      return 2;
    default:
      return 3;
  }
}

void printDreInto(const Dre& d, int minPrec, std::string& out) {
  bool parens = drePrec(d) < minPrec;
  if (parens) out += '(';
  switch (d.kind) {
    case Dre::Kind::Empty:
      out += "empty";
      break;
    case Dre::Kind::Epsilon:
      out += "eps";
      break;
    case Dre::Kind::Sym:
      out += d.sym.str();
      break;
    case Dre::Kind::Concat:
      for (size_t i = 0; i < d.kids.size(); ++i) {
        if (i) out += '.';
        printDreInto(d.kids[i], 2, out);
      }
      break;
    case Dre::Kind::Union:
      for (size_t i = 0; i < d.kids.size(); ++i) {
        if (i) out += '+';
        printDreInto(d.kids[i], 2, out);
      }
      break;
    case Dre::Kind::Star:
      printDreInto(d.kids.at(0), 3, out);
      out += '*';
      break;
    case Dre::Kind::Opt:
      printDreInto(d.kids.at(0), 3, out);
      out += '?';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string printDre(const Dre& d) {
  std::string out;
  printDreInto(d, 1, out);
  return out;
}

Dre dreEmpty() { return {}; }

Dre dreEpsilon() {
  Dre d;
  d.kind = Dre::Kind::Epsilon;
  return d;
}

Dre dreSym(Symbol s) {
  Dre d;
  d.kind = Dre::Kind::Sym;
  d.sym = s;
  return d;
}

Dre dreConcat(std::vector<Dre> kids) {
  if (kids.empty()) return dreEpsilon();
  if (kids.size() == 1) return std::move(kids.front());
  Dre d;
  d.kind = Dre::Kind::Concat;
  d.kids = std::move(kids);
  return d;
}

Dre dreUnion(std::vector<Dre> kids) {
  if (kids.empty()) return dreEmpty();
  if (kids.size() == 1) return std::move(kids.front());
  Dre d;
  d.kind = Dre::Kind::Union;
  d.kids = std::move(kids);
  return d;
}

Dre dreStar(Dre kid) {
  Dre d;
  d.kind = Dre::Kind::Star;
  d.kids.push_back(std::move(kid));
  return d;
}

Dre dreOpt(Dre kid) {
  Dre d;
  d.kind = Dre::Kind::Opt;
  d.kids.push_back(std::move(kid));
  return d;
}

DreDeterminism dreCheckDeterminism(const Dre& d) {
  Glushkov g = glushkov(d);
  auto witness = [&](std::vector<Symbol> prefix, std::pair<size_t, size_t> clash) {
    DreDeterminism out;
    out.deterministic = false;
    out.witness = DreWitness{std::move(prefix), g.symAt[clash.first], clash.first, clash.second};
    return out;
  };
  if (auto clash = symbolClash(g, g.first)) return witness({}, *clash);
  // shortest prefix reaching each position, breadth-first through the
  // position automaton
  std::map<size_t, size_t> parent;  // position -> predecessor position (0 = start)
  std::deque<size_t> queue;
  auto reach = [&](size_t from, const std::vector<size_t>& next) {
    for (size_t p : next) {
      if (parent.count(p)) continue;
      parent[p] = from;
      queue.push_back(p);
    }
  };
  reach(0, g.first);
  while (!queue.empty()) {
    size_t x = queue.front();
    queue.pop_front();
    auto fit = g.follow.find(x);
    if (fit == g.follow.end()) continue;
    if (auto clash = symbolClash(g, fit->second)) {
      std::vector<Symbol> prefix;
      for (size_t p = x; p != 0; p = parent.at(p)) prefix.push_back(g.symAt[p]);
      std::reverse(prefix.begin(), prefix.end());
      return witness(std::move(prefix), *clash);
    }
    reach(x, fit->second);
  }
  return {};
}

bool dfaAccepts(const Dfa& d, const std::vector<Symbol>& word) {
  size_t q = d.initial;
  for (Symbol s : word) {
    auto it = d.trans.find({q, s});
    if (it == d.trans.end()) return false;
    q = it->second;
  }
  return d.accepting.at(q);
}

Dfa completeDfa(const Dfa& d, const std::vector<Symbol>& alphabet) {
  Dfa out = d;
  out.alphabet.insert(out.alphabet.end(), alphabet.begin(), alphabet.end());
  std::sort(out.alphabet.begin(), out.alphabet.end());
  out.alphabet.erase(std::unique(out.alphabet.begin(), out.alphabet.end()), out.alphabet.end());
  size_t dead = out.nStates++;
  out.accepting.push_back(false);
  for (size_t q = 0; q < out.nStates; ++q)
    for (Symbol s : out.alphabet) out.trans.try_emplace({q, s}, dead);
  return out;
}

Dfa dreToDfa(const Dre& d) {
  DreDeterminism det = dreCheckDeterminism(d);
  if (!det.deterministic) {
    const DreWitness& w = *det.witness;
    fail("NotDeterministic", "positions " + std::to_string(w.pos1) + " and " +
                                 std::to_string(w.pos2) + " compete on '" + w.symbol.str() + "'");
  }
  Glushkov g = glushkov(d);
  Dfa out;
  out.nStates = g.symAt.size();  // state 0 plus one per position
  out.initial = 0;
  out.accepting.assign(out.nStates, false);
  out.accepting[0] = g.nullable;
  for (size_t p : g.last) out.accepting[p] = true;
  for (size_t p : g.first) out.trans[{0, g.symAt[p]}] = p;
  for (const auto& [p, next] : g.follow)
    for (size_t q : next) out.trans[{p, g.symAt[q]}] = q;
  for (size_t p = 1; p < g.symAt.size(); ++p) out.alphabet.push_back(g.symAt[p]);
  std::sort(out.alphabet.begin(), out.alphabet.end());
  out.alphabet.erase(std::unique(out.alphabet.begin(), out.alphabet.end()), out.alphabet.end());
  return out;
}

bool TreeGrammar::hasType(const std::string& t) const {
  return std::binary_search(types.begin(), types.end(), t);
}

void TreeGrammar::validate() const {
  if (types.empty()) fail("SyntaxError", "grammar declares no types");
  if (!std::is_sorted(types.begin(), types.end()) ||
      std::adjacent_find(types.begin(), types.end()) != types.end())
    fail("SyntaxError", "grammar types must be sorted and unique");
  if (!hasType(start)) fail("SyntaxError", "start type '" + start + "' not declared");
  for (const auto& t : types) {
    if (t.find('.') != std::string::npos)
      fail("SyntaxError", "type name '" + t + "' may not contain '.'");
    if (!label.count(t)) fail("SyntaxError", "type '" + t + "' has no label");
    auto cit = content.find(t);
    if (cit == content.end()) fail("SyntaxError", "type '" + t + "' has no content model");
    std::function<void(const Dre&)> scan = [&](const Dre& d) {
      if (d.kind == Dre::Kind::Sym && !hasType(d.sym.str()))
        fail("SyntaxError", "content of '" + t + "' mentions undeclared type '" + d.sym.str() + "'");
      for (const Dre& k : d.kids) scan(k);
    };
    scan(cit->second);
    DreDeterminism det = dreCheckDeterminism(cit->second);
    if (!det.deterministic)
      fail("NotDeterministic", "content model of '" + t + "': positions " +
                                   std::to_string(det.witness->pos1) + " and " +
                                   std::to_string(det.witness->pos2) + " compete on '" +
                                   det.witness->symbol.str() + "'");
  }
  for (const auto& [t, l] : label) {
    (void)l;
    if (!hasType(t)) fail("SyntaxError", "label declared for unknown type '" + t + "'");
  }
  for (const auto& [t, c] : content) {
    (void)c;
    if (!hasType(t)) fail("SyntaxError", "content declared for unknown type '" + t + "'");
  }
}

TreeGrammar parseGrammar(const std::string& text) {
  TreeGrammar g;
  std::istringstream in(text);
  std::string line;
  size_t lineNo = 0;
  bool haveStart = false;
  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto declare = [&](const std::string& name, const std::string& lbl, const std::string& dre) {
    if (std::count(g.types.begin(), g.types.end(), name))
      fail("SyntaxError", "line " + std::to_string(lineNo) + ": type '" + name + "' declared twice");
    g.types.push_back(name);
    g.label[name] = Symbol::intern(lbl);
    g.content[name] = parseDre(dre);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "start") {
      std::string name;
      if (!(ls >> name) || haveStart)
        fail("SyntaxError", "line " + std::to_string(lineNo) + ": bad start declaration");
      g.start = name;
      haveStart = true;
      std::string extra;
      if (ls >> extra)
        fail("SyntaxError", "line " + std::to_string(lineNo) + ": trailing tokens after start");
    } else if (word == "type" || word == "element") {
      std::string name;
      if (!(ls >> name)) fail("SyntaxError", "line " + std::to_string(lineNo) + ": missing name");
      std::string lbl = name;
      if (word == "type") {
        std::string kw;
        if (!(ls >> kw) || kw != "label" || !(ls >> lbl))
          fail("SyntaxError", "line " + std::to_string(lineNo) + ": expected 'label LABEL'");
      }
      std::string arrow;
      if (!(ls >> arrow) || arrow != "->")
        fail("SyntaxError", "line " + std::to_string(lineNo) + ": expected '->'");
      std::string rest;
      std::getline(ls, rest);
      declare(name, lbl, trim(rest));
    } else {
      fail("SyntaxError", "line " + std::to_string(lineNo) + ": unknown declaration '" + word + "'");
    }
  }
  if (!haveStart) fail("SyntaxError", "grammar has no start declaration");
  std::sort(g.types.begin(), g.types.end());
  g.validate();
  return g;
}

std::string printGrammar(const TreeGrammar& g) {
  std::string out = "start " + g.start + "\n";
  for (const auto& t : g.types) {
    if (g.label.at(t) == Symbol::intern(t)) {
      out += "element " + t + " -> " + printDre(g.content.at(t)) + "\n";
    } else {
      out += "type " + t + " label " + g.label.at(t).str() + " -> " + printDre(g.content.at(t)) +
             "\n";
    }
  }
  return out;
}

namespace {

std::set<std::string> mentionedTypes(const Dre& d) {
  std::set<std::string> out;
  std::function<void(const Dre&)> scan = [&](const Dre& x) {
    if (x.kind == Dre::Kind::Sym) out.insert(x.sym.str());
    for (const Dre& k : x.kids) scan(k);
  };
  scan(d);
  return out;
}

}  // namespace

GrammarClass classifyGrammar(const TreeGrammar& g) {
  std::map<Symbol, std::vector<std::string>> byLabel;
  for (const auto& t : g.types) byLabel[g.label.at(t)].push_back(t);
  bool local = true;
  for (const auto& [l, ts] : byLabel) {
    (void)l;
    if (ts.size() > 1) local = false;
  }
  if (local) return {GrammarClass::Kind::Local, "", "", ""};
  for (const auto& t : g.types) {
    std::set<std::string> mentioned = mentionedTypes(g.content.at(t));
    std::map<Symbol, std::string> seen;
    for (const auto& m : mentioned) {
      auto [it, inserted] = seen.try_emplace(g.label.at(m), m);
      if (!inserted) return {GrammarClass::Kind::Neither, t, it->second, m};
    }
  }
  return {GrammarClass::Kind::SingleType, "", "", ""};
}

Snwa grammarToSnwa(const TreeGrammar& g, const std::vector<Symbol>& extraAlphabet) {
  g.validate();
  GrammarClass cls = classifyGrammar(g);
  if (cls.kind == GrammarClass::Kind::Neither)
    fail("NotSingleType", "types '" + cls.typeA + "' and '" + cls.typeB +
                              "' compete inside the content model of '" + cls.containerType + "'");

  std::set<std::string> taken(g.types.begin(), g.types.end());
  Snwa out;
  out.rootType = freshName("root", taken);
  taken.insert(out.rootType);
  out.junkType = freshName("junk", taken);
  out.bot = "bot";

  std::map<std::string, Dfa> dfas;
  std::map<std::string, Dre> contents = g.content;
  contents[out.rootType] = dreSym(Symbol::intern(g.start));
  for (const auto& [t, c] : contents) dfas[t] = dreToDfa(c);

  // unique child type per (container type, label); absent means junk
  std::map<std::pair<std::string, Symbol>, std::string> nu;
  for (const auto& [t, c] : contents)
    for (const auto& m : mentionedTypes(c)) nu[{t, g.label.at(m)}] = m;

  std::vector<Symbol> alphabet = extraAlphabet;
  for (const auto& t : g.types) alphabet.push_back(g.label.at(t));
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

  Nwa n;
  n.alphabet = alphabet;
  n.states.push_back(out.bot);
  out.typeOfState[out.bot] = out.junkType;
  for (const auto& [t, d] : dfas) {
    for (size_t p = 0; p < d.nStates; ++p) {
      std::string q = stateName(t, p);
      n.states.push_back(q);
      out.typeOfState[q] = t;
      if (d.accepting[p]) {
        // the virtual root has no enclosing label, so it never accepts locally
        if (t == out.rootType) continue;
        out.localAccept[g.label.at(t)].insert(q);
      }
    }
  }
  std::sort(n.states.begin(), n.states.end());
  n.initial = stateName(out.rootType, dfas.at(out.rootType).initial);
  for (size_t p = 0; p < dfas.at(out.rootType).nStates; ++p)
    if (dfas.at(out.rootType).accepting[p]) n.accepting.push_back(stateName(out.rootType, p));
  std::sort(n.accepting.begin(), n.accepting.end());

  // opens enter the child type's content model; targetFn advances the parent
  // content model over the child's type
  for (const auto& q : n.states) {
    const std::string& t = out.typeOfState.at(q);
    for (Symbol a : alphabet) {
      if (q == out.bot) {
        n.open[{q, a}] = {{out.bot, q}};
        out.targetFn[{q, a}] = out.bot;
        continue;
      }
      auto nit = nu.find({t, a});
      std::string entry = out.bot;
      std::string tgt = out.bot;
      if (nit != nu.end()) {
        entry = stateName(nit->second, dfas.at(nit->second).initial);
        size_t p = std::stoul(q.substr(t.size() + 1));
        auto step = dfas.at(t).trans.find({p, Symbol::intern(nit->second)});
        if (step != dfas.at(t).trans.end()) tgt = stateName(t, step->second);
      }
      n.open[{q, a}] = {{entry, q}};
      out.targetFn[{q, a}] = tgt;
    }
  }
  for (const auto& q1 : n.states) {
    for (const auto& h : n.states) {
      for (Symbol a : alphabet) {
        auto lit = out.localAccept.find(a);
        bool ok = lit != out.localAccept.end() && lit->second.count(q1) > 0;
        n.close[{q1, h, a}] = {ok ? out.targetFn.at({h, a}) : out.bot};
      }
    }
  }
  out.d = makeDnwa(std::move(n));
  return out;
}

bool grammarValidateTree(const TreeGrammar& g, const NestedWord& w) {
  g.validate();
  if (!w.isRooted()) fail("NotRooted", "validation needs a single rooted tree");
  std::map<std::string, Dfa> dfas;
  for (const auto& t : g.types) dfas[t] = dreToDfa(g.content.at(t));
  // bottom-up candidate types per node; exact for every grammar since all
  // child typings are tracked, not just a forced one
  std::function<std::set<std::string>(size_t, size_t)> cands = [&](size_t i,
                                                                   size_t j) -> std::set<std::string> {
    Symbol lbl = w.at(i).symbol;
    std::vector<std::set<std::string>> kids;
    for (size_t k = i + 1; k < j; k = w.matching(k) + 1) kids.push_back(cands(k, w.matching(k)));
    std::set<std::string> out;
    for (const auto& t : g.types) {
      if (g.label.at(t) != lbl) continue;
      const Dfa& d = dfas.at(t);
      std::set<size_t> reach{d.initial};
      for (const auto& kidTypes : kids) {
        std::set<size_t> next;
        for (size_t p : reach) {
          for (const auto& y : kidTypes) {
            auto it = d.trans.find({p, Symbol::intern(y)});
            if (it != d.trans.end()) next.insert(it->second);
          }
        }
        reach = std::move(next);
        if (reach.empty()) break;
      }
      for (size_t p : reach)
        if (d.accepting[p]) {
          out.insert(t);
          break;
        }
    }
    return out;
  };
  return cands(0, w.size() - 1).count(g.start) > 0;
}

Sanwa snwaAsSanwa(const Snwa& s) {
  Anwa a;
  a.states = s.d.a.states;
  a.alphabet = s.d.a.alphabet;
  a.initial = s.d.a.initial;
  a.accepting = s.d.a.accepting;
  std::set<std::string> taken(a.states.begin(), a.states.end());
  std::string test = freshName("q?", taken);
  taken.insert(test);
  std::string anti = freshName("q!", taken);
  a.states.push_back(test);
  a.states.push_back(anti);
  std::sort(a.states.begin(), a.states.end());

  SimplicityWitness w;
  w.testState = test;
  w.antiTestState = anti;
  w.failure = s.bot;
  w.localAccept = s.localAccept;
  for (const auto& q : s.d.a.states)
    if (q != s.bot) w.typeOf[q] = s.typeOfState.at(q);

  for (const auto& q : s.d.a.states) {
    if (q == s.bot) continue;
    for (Symbol sym : a.alphabet) {
      const std::string& lin = s.d.openStep(q, sym).first;
      const std::string& tgt = s.targetFn.at({q, sym});
      // reading a factor lands at the target exactly when the content
      // validates and in the failure sink otherwise; a run may also leave the
      // content unexamined by claiming both outcomes at once. The pushed state
      // is already the post-close target, so jumps resolve through the
      // identity.
      a.open[{q, sym}] = fOr({fAnd({fAtom(lin, tgt), fAtom(lin, test)}),
                              fAnd({fAtom(lin, s.bot), fAtom(lin, anti)}),
                              fAnd({fAtom(lin, tgt), fAtom(lin, s.bot)})});
      w.targetFn[{q, sym}] = q;
    }
  }
  // the sink keeps reading, so runs that failed a content check still consume
  // the rest of the word instead of dying
  for (Symbol sym : a.alphabet) a.open[{s.bot, sym}] = fAtom(s.bot, s.bot);
  for (const auto& q1 : s.d.a.states) {
    for (Symbol sym : a.alphabet) {
      bool acc = w.localAccept.count(sym) > 0 && w.localAccept.at(sym).count(q1) > 0;
      a.close[{q1, test, sym}] = acc ? fTrue() : fFalse();
      a.close[{q1, anti, sym}] = acc ? fFalse() : fTrue();
      for (const auto& h : s.d.a.states) a.close[{q1, h, sym}] = fAtom(h);
    }
  }
  return checkSimplicity(a, w);
}

}  // namespace axml
