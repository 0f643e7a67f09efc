#include "axml/solver.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "axml/automata.hpp"
#include "axml/schemas.hpp"
#include "axml/util.hpp"

namespace axml {

std::string verdictName(Verdict v) {
  switch (v) {
    case Verdict::JulietWins:
      return "JulietWins";
    case Verdict::RomeoWins:
      return "RomeoWins";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

void checkWordAlphabet(const Game& g, const NestedWord& w) {
  for (const Tag& t : w.tags())
    if (!std::binary_search(g.alphabet.begin(), g.alphabet.end(), t.symbol))
      fail("AlphabetMismatch", "word uses " + t.symbol.str());
}

size_t callCap(ReplayMode mode) {
  switch (mode.kind) {
    case ReplayMode::Kind::None:
      return 1;
    case ReplayMode::Kind::Bounded:
      return mode.bound;
    case ReplayMode::Kind::Unbounded:
      return SIZE_MAX;
  }
  return SIZE_MAX;
}

// linear target state right before position upTo
std::string stateAt(const Dnwa& t, const NestedWord& w, size_t upTo) {
  std::string q = t.a.initial;
  std::vector<std::string> stack;
  for (size_t i = 0; i < upTo; ++i) {
    const Tag& tag = w.at(i);
    if (tag.open) {
      const auto& [q1, h] = t.openStep(q, tag.symbol);
      stack.push_back(h);
      q = q1;
    } else {
      q = t.closeStep(q, stack.back(), tag.symbol);
      stack.pop_back();
    }
  }
  return q;
}

// replaces the factor [openPos, closePos] by v; the new tags sit one
// replacement context deeper and reading resumes at the replacement
Configuration spliceCall(const Configuration& k, size_t openPos, size_t closePos,
                         const NestedWord& v) {
  std::vector<Tag> tags(k.word.tags().begin(), k.word.tags().begin() + openPos);
  tags.insert(tags.end(), v.tags().begin(), v.tags().end());
  tags.insert(tags.end(), k.word.tags().begin() + closePos + 1, k.word.tags().end());
  std::vector<uint32_t> depth(k.depth.begin(), k.depth.begin() + openPos);
  depth.insert(depth.end(), v.size(), k.depth[closePos] + 1);
  depth.insert(depth.end(), k.depth.begin() + closePos + 1, k.depth.end());
  Configuration out;
  out.word = NestedWord(std::move(tags));
  out.depth = std::move(depth);
  out.pos = openPos;
  return out;
}

size_t nextDecision(const Game& g, const Configuration& k, size_t cap) {
  for (size_t i = k.pos; i < k.word.size(); ++i) {
    const Tag& t = k.word.at(i);
    if (!t.open && g.isFunction(t.symbol) && k.depth[i] <= cap) return i;
  }
  return SIZE_MAX;
}

}  // namespace

Anwa buildAc(const Game& g, const CallEffect& c) {
  g.validate();
  Dnwa t = toNormalForm(g.target);
  EffectSpace space(t);
  Anwa out;
  out.states = t.a.states;
  out.alphabet = g.alphabet;
  out.initial = t.a.initial;
  out.accepting = t.a.accepting;
  for (const std::string& q : out.states)
    for (Symbol s : out.alphabet) out.open[{q, s}] = fAtom(t.openStep(q, s).first, q);
  for (const std::string& q : out.states)
    for (const std::string& h : out.states)
      for (Symbol s : out.alphabet) {
        Formula f = fAtom(t.closeStep(q, h, s));
        if (g.isFunction(s)) {
          auto cell = c.perFunction.find(s);
          if (cell == c.perFunction.end())
            fail("UnknownFunction", "no call effect cell for " + s.str());
          std::vector<Formula> kids{std::move(f)};
          for (StateSet x : cell->second[space.indexOf(h)].sets) {
            std::vector<Formula> conj;
            for (const std::string& r : space.names(x)) conj.push_back(fAtom(r));
            kids.push_back(fAnd(std::move(conj)));
          }
          f = fOr(std::move(kids));
        }
        out.close[{q, h, s}] = std::move(f);
      }
  out.normalizeStorage();
  out.validate();
  return out;
}

Sanwa buildAcSimple(const Game& g, const CallEffect& c) {
  g.validate();
  if (!g.targetSnwa) fail("TargetNotSimple", "the target does not carry a grammar-backed automaton");
  const Snwa& snwa = *g.targetSnwa;
  if (snwa.d.a.states != g.target.a.states)
    fail("TargetNotSimple", "grammar-backed automaton does not match the target");
  EffectSpace space(g.target);
  Sanwa base = snwaAsSanwa(snwa);
  for (const auto& [q, type] : base.w.typeOf) {
    for (Symbol f : g.functions) {
      auto cell = c.perFunction.find(f);
      if (cell == c.perFunction.end()) fail("UnknownFunction", "no call effect cell for " + f.str());
      const std::string& lin = snwa.d.openStep(q, f).first;
      std::vector<Formula> kids{base.a.open.at({q, f})};
      for (StateSet x : cell->second[space.indexOf(q)].sets) {
        std::vector<Formula> conj;
        for (const std::string& r : space.names(x)) {
          if (r != snwa.bot && base.w.typeOf.at(r) != type)
            fail("TargetNotSimple", "call effect at (" + f.str() + ", " + q +
                                        ") crosses from type " + type + " into " + r);
          conj.push_back(fAtom(lin, r));
        }
        kids.push_back(fAnd(std::move(conj)));
      }
      base.a.open[{q, f}] = fOr(std::move(kids));
    }
  }
  return checkSimplicity(base.a, base.w);
}

namespace {

// C^1..C^k for bounded replay; the full fixpoint chain for unbounded replay,
// where strategies never need chains deeper than the fixpoint index
struct EffectLevels {
  std::vector<CallEffect> chain;
  size_t cap = 1;  // highest replacement context at which a call is allowed

  const CallEffect* forContext(uint32_t ctx) const {
    if (ctx == 0 || ctx > cap) return nullptr;
    return &chain[cap - ctx];
  }
  const CallEffect& top() const { return chain.back(); }
};

EffectLevels buildLevels(const Game& g, ReplayMode mode, const IterateOptions& opt,
                         EffectStats* stats, size_t* iterations) {
  EffectLevels lv;
  lv.chain.push_back(baseCallEffect(g, stats));
  switch (mode.kind) {
    case ReplayMode::Kind::None:
      lv.cap = 1;
      break;
    case ReplayMode::Kind::Bounded:
      if (mode.bound < 1) fail("InvalidReplayMode", "bounded replay needs a bound of at least 1");
      for (size_t i = 1; i < mode.bound; ++i) {
        lv.chain.push_back(iterateCallEffect(g, lv.chain.back(), opt, stats));
        if (iterations) ++*iterations;
      }
      lv.cap = mode.bound;
      break;
    case ReplayMode::Kind::Unbounded:
      if (g.functions.empty()) {
        lv.cap = 1;
        break;
      }
      while (true) {
        CallEffect next = iterateCallEffect(g, lv.chain.back(), opt, stats);
        if (iterations) ++*iterations;
        if (next == lv.chain.back()) break;
        lv.chain.push_back(std::move(next));
      }
      lv.cap = lv.chain.size();
      break;
  }
  return lv;
}

// effect of the factor <a> interior </a> whose close sits at replacement
// context ctx; mirrors the plain operator but draws the call options from the
// level matching the remaining replay budget
Effect hOperatorAt(const Game& g, const EffectSpace& space, const EffectLevels& lv, Symbol a,
                   const Effect& interior, uint32_t ctx) {
  const CallEffect* ce = g.isFunction(a) ? lv.forContext(ctx) : nullptr;
  const std::vector<Antichain>* options = ce ? &ce->perFunction.at(a) : nullptr;
  Effect out;
  out.at.resize(space.states.size());
  for (size_t qi = 0; qi < space.states.size(); ++qi) {
    const std::string& q = space.states[qi];
    const auto& [q1, pushed] = g.target.openStep(q, a);
    const Antichain& inner = interior.at[space.indexOf(q1)];
    std::vector<StateSet> res;
    for (StateSet x : inner.sets) {
      std::vector<Antichain> family;
      for (size_t ri = 0; ri < space.states.size(); ++ri) {
        if (!((x >> ri) & 1)) continue;
        StateSet read = space.bit(g.target.closeStep(space.states[ri], pushed, a));
        if (options) {
          std::vector<StateSet> withRead = (*options)[qi].sets;
          withRead.push_back(read);
          family.push_back(minimize(std::move(withRead)));
        } else {
          family.push_back(Antichain{{read}});
        }
      }
      Antichain mixed = mix(family);
      res.insert(res.end(), mixed.sets.begin(), mixed.sets.end());
    }
    out.at[qi] = minimize(std::move(res));
  }
  return out;
}

Effect spanEffectAt(const Game& g, const EffectSpace& space, const EffectLevels& lv,
                    const Configuration& k, size_t from, size_t to) {
  Effect e = identityEffect(space);
  size_t p = from;
  while (p < to) {
    size_t m = k.word.matching(p);
    Effect interior = spanEffectAt(g, space, lv, k, p + 1, m);
    e = compose(e, hOperatorAt(g, space, lv, k.word.at(p).symbol, interior, k.depth[m]));
    p = m + 1;
  }
  return e;
}

// folds one pending close over the running antichain: Juliet reads or, when
// the context allows, calls with the recorded options at the pre-open state
Antichain closeValueAt(const Game& g, const EffectSpace& space, const EffectLevels& lv, Symbol a,
                       const std::string& preOpen, uint32_t ctx, const Antichain& cur) {
  const CallEffect* ce = g.isFunction(a) ? lv.forContext(ctx) : nullptr;
  const std::vector<Antichain>* options = ce ? &ce->perFunction.at(a) : nullptr;
  size_t pi = space.indexOf(preOpen);
  std::vector<StateSet> res;
  for (StateSet x : cur.sets) {
    std::vector<Antichain> family;
    for (size_t ri = 0; ri < space.states.size(); ++ri) {
      if (!((x >> ri) & 1)) continue;
      StateSet read = space.bit(g.target.closeStep(space.states[ri], preOpen, a));
      if (options) {
        std::vector<StateSet> withRead = (*options)[pi].sets;
        withRead.push_back(read);
        family.push_back(minimize(std::move(withRead)));
      } else {
        family.push_back(Antichain{{read}});
      }
    }
    Antichain mixed = mix(family);
    res.insert(res.end(), mixed.sets.begin(), mixed.sets.end());
  }
  return minimize(std::move(res));
}

// whether Juliet wins from the middle of a play: the prefix before pos is
// already read, the pending closes take their options from the tag contexts
bool configWinning(const Game& g, const EffectSpace& space, const EffectLevels& lv,
                   const Configuration& k) {
  std::string q = g.target.a.initial;
  std::vector<std::pair<std::string, size_t>> pending;  // (pre-open state, open position)
  for (size_t i = 0; i < k.pos; ++i) {
    const Tag& tag = k.word.at(i);
    if (tag.open) {
      pending.push_back({q, i});
      q = g.target.openStep(q, tag.symbol).first;
    } else {
      q = g.target.closeStep(q, pending.back().first, tag.symbol);
      pending.pop_back();
    }
  }
  Antichain cur{{space.bit(q)}};
  size_t i = k.pos;
  while (true) {
    size_t stop = pending.empty() ? k.word.size() : k.word.matching(pending.back().second);
    Effect span = spanEffectAt(g, space, lv, k, i, stop);
    cur = applyToAntichain(span, cur);
    if (pending.empty()) break;
    Symbol a = k.word.at(stop).symbol;
    cur = closeValueAt(g, space, lv, a, pending.back().first, k.depth[stop], cur);
    pending.pop_back();
    i = stop + 1;
  }
  StateSet acc = space.acceptingMask(g.target);
  for (StateSet s : cur.sets)
    if ((s & ~acc) == 0) return true;
  return false;
}

}  // namespace

SolveResult decideJWin(const Game& g, const NestedWord& w, ReplayMode mode,
                       const SolveOptions& opt) {
  g.validate();
  checkWordAlphabet(g, w);
  SolveResult res;
  EffectLevels lv = buildLevels(g, mode, opt.iterate, &res.stats.effects, &res.stats.iterations);
  bool simple = false;
  switch (opt.pipeline) {
    case Pipeline::Auto:
      simple = g.targetSnwa.has_value() && mode.kind != ReplayMode::Kind::Unbounded;
      break;
    case Pipeline::Simple:
      simple = true;
      break;
    case Pipeline::General:
      simple = false;
      break;
  }
  bool member;
  if (simple) {
    res.stats.pipeline = "simple";
    member = sanwaVerify(buildAcSimple(g, lv.top()), w);
  } else {
    res.stats.pipeline = "general";
    member = anwaMembership(buildAc(g, lv.top()), w);
  }
  res.verdict = member ? Verdict::JulietWins : Verdict::RomeoWins;
  return res;
}

namespace {

struct Extractor {
  const Game& g;
  const EffectSpace& space;
  const EffectLevels& lv;

  bool callable(const Configuration& k, size_t i) const {
    const Tag& t = k.word.at(i);
    return !t.open && g.isFunction(t.symbol) && lv.forContext(k.depth[i]) != nullptr;
  }

  size_t nextDecisionPoint(const Configuration& k) const {
    for (size_t i = k.pos; i < k.word.size(); ++i)
      if (callable(k, i)) return i;
    return SIZE_MAX;
  }

  StrategyNode restIsRead(const Configuration& k) const {
    StrategyNode n;
    n.position = k.word.size();
    n.state = stateAt(g.target, k.word, k.word.size());
    return n;
  }

  std::optional<StrategyNode> extract(const Configuration& k) const {
    size_t i = nextDecisionPoint(k);
    if (i == SIZE_MAX) return std::nullopt;
    StrategyNode n;
    n.position = i;
    n.state = stateAt(g.target, k.word, i);
    Configuration afterRead{k.word, k.depth, i + 1};
    if (configWinning(g, space, lv, afterRead)) {
      if (auto child = extract(afterRead)) n.children.push_back(std::move(*child));
      return n;
    }
    n.call = true;
    Symbol a = k.word.at(i).symbol;
    const ReplacementSpec& spec = g.rules.at(a);
    if (!spec.isExplicit())
      fail("ExplicitRulesRequired", "cannot enumerate replies for the call at " + a.str());
    for (const NestedWord& v : spec.words) {
      Configuration next = spliceCall(k, k.word.matching(i), i, v);
      if (auto child = extract(next))
        n.children.push_back(std::move(*child));
      else
        n.children.push_back(restIsRead(next));
    }
    return n;
  }
};

}  // namespace

Strategy extractStrategy(const Game& g, const NestedWord& w, ReplayMode mode,
                         const SolveOptions& opt) {
  g.validate();
  checkWordAlphabet(g, w);
  EffectLevels lv = buildLevels(g, mode, opt.iterate, nullptr, nullptr);
  EffectSpace space(g.target);
  Configuration start{w, std::vector<uint32_t>(w.size(), 1), 0};
  if (!configWinning(g, space, lv, start))
    fail("NotWinnable", "Juliet does not win (" + serializeNestedWord(w) + ", " + mode.str() + ")");
  Extractor ex{g, space, lv};
  Strategy s;
  s.root = ex.extract(start);
  return s;
}

bool strategyWins(const Game& g, const NestedWord& w, ReplayMode mode, const Strategy& s) {
  g.validate();
  checkWordAlphabet(g, w);
  size_t cap = callCap(mode);
  std::function<bool(Configuration, const StrategyNode*)> play =
      [&](Configuration k, const StrategyNode* node) -> bool {
    size_t p = k.pos;
    while (p < k.word.size()) {
      const Tag& t = k.word.at(p);
      if (t.open) {
        ++p;
        continue;
      }
      const StrategyNode* here = (node && node->position == p) ? node : nullptr;
      if (here && here->call) {
        // the bound audit: a call outside the replay budget voids the strategy
        if (!g.isFunction(t.symbol) || k.depth[p] > cap) return false;
        const ReplacementSpec& spec = g.rules.at(t.symbol);
        if (!spec.isExplicit())
          fail("ExplicitRulesRequired", "cannot enumerate replies for the call at " +
                                            t.symbol.str());
        for (size_t vi = 0; vi < spec.words.size(); ++vi) {
          Configuration next = spliceCall(k, k.word.matching(p), p, spec.words[vi]);
          const StrategyNode* child = vi < here->children.size() ? &here->children[vi] : nullptr;
          if (!play(next, child)) return false;
        }
        return true;
      }
      if (here) node = here->children.empty() ? nullptr : &here->children[0];
      ++p;
    }
    return dnwaAccepts(g.target, k.word);
  };
  Configuration start{w, std::vector<uint32_t>(w.size(), 1), 0};
  return play(start, s.root ? &*s.root : nullptr);
}

namespace {

enum class Val { Lose = 0, Unknown = 1, Win = 2 };

Val betterForJuliet(Val x, Val y) { return static_cast<int>(x) >= static_cast<int>(y) ? x : y; }
Val worseForJuliet(Val x, Val y) { return static_cast<int>(x) <= static_cast<int>(y) ? x : y; }

std::string configKey(const Configuration& k, size_t decision) {
  std::string key = serializeNestedWord(k.word);
  key += '|';
  for (uint32_t d : k.depth) {
    key += std::to_string(d);
    key += ',';
  }
  key += '|';
  key += std::to_string(decision);
  return key;
}

// explicit minimax over configurations; cycles count against Juliet (finite
// strategies only), so a repeat on the current path reads as a loss and the
// tainted losses are simply not memoized
struct Oracle {
  const Game& g;
  size_t cap;
  OracleLimits limits;
  size_t steps = 0;
  bool aborted = false;
  std::map<std::string, int> memo;
  std::set<std::string> inProgress;
  std::map<Symbol, std::pair<std::vector<NestedWord>, bool>> replies;

  static constexpr size_t kReplyLen = 8;

  // Romeo's options: exhaustive for explicit rules; for automaton rules a
  // bounded enumeration whose second component marks possible truncation
  const std::pair<std::vector<NestedWord>, bool>& repliesFor(Symbol f) {
    auto it = replies.find(f);
    if (it != replies.end()) return it->second;
    const ReplacementSpec& spec = g.rules.at(f);
    std::pair<std::vector<NestedWord>, bool> entry;
    if (spec.isExplicit()) {
      entry = {spec.words, false};
    } else {
      std::vector<Tag> cur;
      std::vector<std::string> stack;
      // every well-nested word up to kReplyLen tags, filtered by the automaton
      std::function<void()> rec = [&] {
        if (stack.empty()) {
          NestedWord cand((std::vector<Tag>(cur)));
          if (nwaAccepts(*spec.automaton, cand)) entry.first.push_back(std::move(cand));
        }
        if (cur.size() + stack.size() + 2 <= kReplyLen)
          for (Symbol s : g.alphabet) {
            cur.push_back(openTag(s));
            stack.push_back(s.str());
            rec();
            stack.pop_back();
            cur.pop_back();
          }
        if (!stack.empty() && cur.size() + stack.size() <= kReplyLen) {
          Symbol s = Symbol::intern(stack.back());
          cur.push_back(closeTag(s));
          stack.pop_back();
          rec();
          stack.push_back(s.str());
          cur.pop_back();
        }
      };
      rec();
      std::sort(entry.first.begin(), entry.first.end(),
                [](const NestedWord& x, const NestedWord& y) {
                  if (x.size() != y.size()) return x.size() < y.size();
                  return x < y;
                });
      entry.first.erase(std::unique(entry.first.begin(), entry.first.end()), entry.first.end());
      entry.second = true;
    }
    return replies.emplace(f, std::move(entry)).first->second;
  }

  // returns (value, tainted-by-a-path-repeat)
  std::pair<Val, bool> eval(const Configuration& k) {
    if (aborted) return {Val::Unknown, false};
    Configuration cfg = k;
    cfg.pos = nextDecision(g, k, cap);
    if (cfg.pos == SIZE_MAX)
      return {dnwaAccepts(g.target, k.word) ? Val::Win : Val::Lose, false};
    std::string key = configKey(k, cfg.pos);
    if (auto it = memo.find(key); it != memo.end()) return {static_cast<Val>(it->second), false};
    if (inProgress.count(key)) return {Val::Lose, true};
    if (++steps > limits.maxSteps) {
      aborted = true;
      return {Val::Unknown, false};
    }
    inProgress.insert(key);
    size_t i = cfg.pos;
    auto [readVal, readTaint] = eval({k.word, k.depth, i + 1});
    Val best = readVal;
    bool taint = readTaint;
    if (best != Val::Win && !aborted) {
      Symbol a = k.word.at(i).symbol;
      const auto& [words, truncated] = repliesFor(a);
      size_t openPos = k.word.matching(i);
      Val callVal = Val::Win;
      bool callTaint = false;
      for (const NestedWord& v : words) {
        size_t newLen = k.word.size() - (i - openPos + 1) + v.size();
        if (newLen > limits.maxWordLen) {
          callVal = worseForJuliet(callVal, Val::Unknown);
          continue;
        }
        auto [cv, ct] = eval(spliceCall(k, openPos, i, v));
        callTaint = callTaint || ct;
        callVal = worseForJuliet(callVal, cv);
        if (callVal == Val::Lose || aborted) break;
      }
      if (truncated && callVal == Val::Win) callVal = Val::Unknown;
      best = betterForJuliet(readVal, callVal);
      taint = readTaint || callTaint;
    }
    inProgress.erase(key);
    if (best == Val::Win) taint = false;
    if (!aborted && !taint) memo[key] = static_cast<int>(best);
    return {best, taint};
  }

  std::optional<StrategyNode> buildNode(const Configuration& k) {
    size_t i = nextDecision(g, k, cap);
    if (i == SIZE_MAX || aborted) return std::nullopt;
    StrategyNode n;
    n.position = i;
    n.state = stateAt(g.target, k.word, i);
    Configuration afterRead{k.word, k.depth, i + 1};
    if (eval(afterRead).first == Val::Win) {
      if (auto child = buildNode(afterRead)) n.children.push_back(std::move(*child));
      return n;
    }
    n.call = true;
    size_t openPos = k.word.matching(i);
    for (const NestedWord& v : repliesFor(k.word.at(i).symbol).first) {
      Configuration next = spliceCall(k, openPos, i, v);
      if (auto child = buildNode(next)) {
        n.children.push_back(std::move(*child));
      } else {
        StrategyNode leaf;
        leaf.position = next.word.size();
        leaf.state = stateAt(g.target, next.word, next.word.size());
        n.children.push_back(std::move(leaf));
      }
    }
    return n;
  }
};

}  // namespace

OracleResult bruteForceSolve(const Game& g, const NestedWord& w, ReplayMode mode,
                             const OracleLimits& limits) {
  g.validate();
  checkWordAlphabet(g, w);
  Oracle o{g, callCap(mode), limits};
  Configuration start{w, std::vector<uint32_t>(w.size(), 1), 0};
  auto [value, taint] = o.eval(start);
  (void)taint;  // the root value is exact: repeat-free plays suffice to win
  OracleResult res;
  res.steps = o.steps;
  if (o.aborted || value == Val::Unknown) {
    res.verdict = Verdict::Inconclusive;
    return res;
  }
  res.verdict = value == Val::Win ? Verdict::JulietWins : Verdict::RomeoWins;
  if (value == Val::Win) {
    res.strategy = Strategy{o.buildNode(start)};
    if (o.aborted) res.strategy.reset();
  }
  return res;
}

PlayResult interactivePlay(const Game& g, const NestedWord& w, ReplayMode mode, bool humanIsJuliet,
                           std::istream& in, std::ostream& out) {
  g.validate();
  checkWordAlphabet(g, w);
  size_t cap = callCap(mode);
  Oracle oracle{g, cap, OracleLimits{}};
  PlayResult result;
  auto emit = [&](const std::string& line) {
    out << line << "\n";
    result.transcript += line;
    result.transcript += "\n";
  };
  auto forfeit = [&](const std::string& why) {
    emit("warning: " + why);
    result.verdict = Verdict::Inconclusive;
    return result;
  };
  Configuration k{w, std::vector<uint32_t>(w.size(), 1), 0};
  emit("word: " + serializeNestedWord(k.word));
  size_t p = 0;
  while (p < k.word.size()) {
    const Tag& t = k.word.at(p);
    if (t.open) {
      ++p;
      continue;
    }
    Symbol a = t.symbol;
    bool canCall = g.isFunction(a) && k.depth[p] <= cap;
    bool doCall = false;
    if (humanIsJuliet) {
      emit("[J] </" + a.str() + "> at " + std::to_string(p) + " (context " +
           std::to_string(k.depth[p]) + "): read or call?");
      while (true) {
        std::string line;
        if (!std::getline(in, line)) return forfeit("input ended before the play finished");
        emit("juliet: " + line);
        if (line == "read" || line == "r") break;
        if (line == "call" || line == "c") {
          if (!g.isFunction(a)) {
            emit("rejected: " + a.str() + " is not a function symbol");
            continue;
          }
          if (k.depth[p] > cap) {
            emit("rejected: replay budget exhausted at context " + std::to_string(k.depth[p]));
            continue;
          }
          doCall = true;
          break;
        }
        emit("rejected: expected read or call");
      }
    } else if (canCall) {
      auto [readVal, readTaint] = oracle.eval({k.word, k.depth, p + 1});
      (void)readTaint;
      if (oracle.aborted) return forfeit("oracle step limit reached, engine forfeits");
      if (readVal == Val::Win) {
        doCall = false;
      } else {
        const auto& [words, truncated] = oracle.repliesFor(a);
        size_t openPos = k.word.matching(p);
        Val callVal = Val::Win;
        for (const NestedWord& v : words) {
          callVal = worseForJuliet(callVal, oracle.eval(spliceCall(k, openPos, p, v)).first);
          if (oracle.aborted) return forfeit("oracle step limit reached, engine forfeits");
          if (callVal == Val::Lose) break;
        }
        if (truncated && callVal == Val::Win) callVal = Val::Unknown;
        if (callVal == Val::Unknown) return forfeit("oracle cannot resolve the call, engine forfeits");
        doCall = callVal == Val::Win;
      }
      emit(std::string("juliet: ") + (doCall ? "call" : "read") + " at " + std::to_string(p));
    }
    if (!doCall) {
      ++p;
      continue;
    }
    const ReplacementSpec& spec = g.rules.at(a);
    size_t openPos = k.word.matching(p);
    size_t pick = SIZE_MAX;
    if (humanIsJuliet) {
      // the engine answers for Romeo
      if (!spec.isExplicit())
        return forfeit("automaton-backed rules, engine cannot enumerate Romeo's replies");
      bool sawUnknown = false;
      for (size_t vi = 0; vi < spec.words.size(); ++vi) {
        Val v = oracle.eval(spliceCall(k, openPos, p, spec.words[vi])).first;
        if (oracle.aborted) return forfeit("oracle step limit reached, engine forfeits");
        if (v == Val::Lose) {
          pick = vi;
          break;
        }
        if (v == Val::Unknown) sawUnknown = true;
      }
      if (pick == SIZE_MAX && sawUnknown)
        return forfeit("oracle cannot resolve Romeo's reply, engine forfeits");
      if (pick == SIZE_MAX) pick = 0;
      emit("romeo: " + std::to_string(pick + 1) + ") " + serializeNestedWord(spec.words[pick]));
    } else {
      std::string menu = "[R] replacement for " + a.str() + ":";
      for (size_t vi = 0; vi < spec.words.size(); ++vi)
        menu += " " + std::to_string(vi + 1) + ") " + serializeNestedWord(spec.words[vi]);
      emit(menu);
      while (true) {
        std::string line;
        if (!std::getline(in, line)) return forfeit("input ended before the play finished");
        emit("romeo: " + line);
        size_t idx = 0;
        bool numeric = !line.empty() && line.find_first_not_of("0123456789") == std::string::npos;
        if (numeric) idx = static_cast<size_t>(std::stoull(line));
        if (numeric && spec.isExplicit() && idx >= 1 && idx <= spec.words.size()) {
          pick = idx - 1;
          break;
        }
        // a literal replacement word is accepted when the rule allows it
        try {
          NestedWord cand = parseNestedWord(line);
          if (spec.isExplicit()) {
            auto itw = std::find(spec.words.begin(), spec.words.end(), cand);
            if (itw != spec.words.end()) {
              pick = static_cast<size_t>(itw - spec.words.begin());
              break;
            }
          } else if (nwaAccepts(*spec.automaton, cand)) {
            k = spliceCall(k, openPos, p, cand);
            pick = SIZE_MAX;
            break;
          }
          emit("rejected: not a word of R_" + a.str());
        } catch (const AxmlError&) {
          emit("rejected: expected a replacement index or a well-nested word");
        }
      }
    }
    if (pick != SIZE_MAX) k = spliceCall(k, openPos, p, spec.words[pick]);
    p = openPos;
    emit("word: " + serializeNestedWord(k.word));
  }
  emit("final: " + serializeNestedWord(k.word));
  result.verdict = dnwaAccepts(g.target, k.word) ? Verdict::JulietWins : Verdict::RomeoWins;
  emit("result: " + verdictName(result.verdict));
  return result;
}

}  // namespace axml
