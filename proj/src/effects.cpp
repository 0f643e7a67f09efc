#include "axml/effects.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <set>
#include <thread>

#include "axml/alternating.hpp"
#include "axml/automata.hpp"
#include "axml/solver.hpp"
#include "axml/util.hpp"

namespace axml {

EffectSpace::EffectSpace(const Dnwa& d) : states(d.a.states) {
  if (states.size() > 64)
    fail("TooManyStates",
         "effect bitsets cap the target at 64 states, got " + std::to_string(states.size()));
}

size_t EffectSpace::indexOf(const std::string& q) const {
  auto it = std::lower_bound(states.begin(), states.end(), q);
  if (it == states.end() || *it != q) fail("UnknownState", q);
  return static_cast<size_t>(it - states.begin());
}

std::vector<std::string> EffectSpace::names(StateSet s) const {
  std::vector<std::string> out;
  for (size_t i = 0; i < states.size(); ++i)
    if ((s >> i) & 1) out.push_back(states[i]);
  return out;
}

StateSet EffectSpace::acceptingMask(const Dnwa& d) const {
  StateSet m = 0;
  for (const std::string& q : d.a.accepting) m |= bit(q);
  return m;
}

bool Antichain::dominates(StateSet x) const {
  for (StateSet s : sets)
    if ((s & ~x) == 0) return true;
  return false;
}

Antichain minimize(std::vector<StateSet> sets) {
  std::sort(sets.begin(), sets.end(), [](StateSet x, StateSet y) {
    if (std::popcount(x) != std::popcount(y)) return std::popcount(x) < std::popcount(y);
    return x < y;
  });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  Antichain out;
  for (StateSet s : sets) {
    bool covered = false;
    for (StateSet kept : out.sets)
      if ((kept & ~s) == 0) {
        covered = true;
        break;
      }
    if (!covered) out.sets.push_back(s);
  }
  return out;
}

Antichain mix(const std::vector<Antichain>& family) {
  // the empty family has exactly the empty union
  std::vector<StateSet> acc{0};
  for (const Antichain& f : family) {
    if (f.empty()) fail("EmptyFamilyMember", "mix over a family with an empty antichain");
    std::vector<StateSet> next;
    next.reserve(acc.size() * f.sets.size());
    for (StateSet s : acc)
      for (StateSet t : f.sets) next.push_back(s | t);
    // dominated partial unions only produce dominated full unions
    acc = minimize(std::move(next)).sets;
  }
  return Antichain{std::move(acc)};
}

Effect identityEffect(const EffectSpace& space) {
  Effect e;
  e.at.reserve(space.states.size());
  for (size_t i = 0; i < space.states.size(); ++i)
    e.at.push_back(Antichain{{StateSet{1} << i}});
  return e;
}

Antichain applyToSet(const Effect& e, StateSet x) {
  std::vector<Antichain> family;
  for (size_t i = 0; i < e.at.size(); ++i)
    if ((x >> i) & 1) family.push_back(e.at[i]);
  return mix(family);
}

Antichain applyToAntichain(const Effect& e, const Antichain& a) {
  std::vector<StateSet> out;
  for (StateSet x : a.sets) {
    Antichain part = applyToSet(e, x);
    out.insert(out.end(), part.sets.begin(), part.sets.end());
  }
  return minimize(std::move(out));
}

Effect compose(const Effect& e1, const Effect& e2) {
  Effect out;
  out.at.reserve(e1.at.size());
  for (const Antichain& a : e1.at) out.at.push_back(applyToAntichain(e2, a));
  return out;
}

Effect hOperator(const Game& g, Symbol a, const Effect& interior, const CallEffect& c) {
  EffectSpace space(g.target);
  const std::vector<Antichain>* options = nullptr;
  if (g.isFunction(a)) {
    auto it = c.perFunction.find(a);
    if (it == c.perFunction.end()) fail("UnknownFunction", "no call effect cell for " + a.str());
    options = &it->second;
  }
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

namespace {

using PairState = std::pair<std::string, std::string>;

// well-matched reachability over the synchronous product of a replacement
// automaton (possibly nondeterministic) and the deterministic target
std::map<PairState, std::set<PairState>> pairReach(const Nwa& x, const Dnwa& y) {
  std::map<PairState, std::set<PairState>> r;
  for (const std::string& p : x.states)
    for (const std::string& q : y.a.states) r[{p, q}].insert({p, q});
  bool changed = true;
  while (changed) {
    changed = false;
    // one well-matched factor: open, matched interior, close
    for (const auto& [key, succs] : x.open) {
      const auto& [p, a] = key;
      for (const std::string& q : y.a.states) {
        const auto& [q1, hq] = y.openStep(q, a);
        for (const auto& [p1, hp] : succs) {
          for (const PairState& mid : r[{p1, q1}]) {
            auto closeIt = x.close.find({mid.first, hp, a});
            if (closeIt == x.close.end()) continue;
            const std::string& q3 = y.closeStep(mid.second, hq, a);
            for (const std::string& p3 : closeIt->second)
              if (r[{p, q}].insert({p3, q3}).second) changed = true;
          }
        }
      }
    }
    // transitive closure over concatenation
    for (auto& [from, succs] : r) {
      std::vector<PairState> frontier(succs.begin(), succs.end());
      for (size_t i = 0; i < frontier.size(); ++i) {
        for (const PairState& next : r[frontier[i]])
          if (succs.insert(next).second) {
            frontier.push_back(next);
            changed = true;
          }
      }
    }
  }
  return r;
}

Nwa ruleNwa(const Game& g, Symbol f) {
  const ReplacementSpec& spec = g.rules.at(f);
  if (spec.isExplicit()) return wordListNwa(spec.words, g.alphabet);
  return *spec.automaton;
}

}  // namespace

CallEffect baseCallEffect(const Game& g, EffectStats* stats) {
  g.validate();
  EffectSpace space(g.target);
  CallEffect c;
  for (Symbol f : g.functions) {
    Nwa ra = ruleNwa(g, f);
    auto reach = pairReach(ra, g.target);
    std::vector<Antichain> cells(space.states.size());
    for (size_t qi = 0; qi < space.states.size(); ++qi) {
      StateSet s = 0;
      for (const PairState& end : reach[{ra.initial, space.states[qi]}])
        if (ra.isAccepting(end.first)) s |= space.bit(end.second);
      if (s == 0)
        fail("EmptyReplacementLanguage", "rule automaton for " + f.str() + " accepts no word");
      cells[qi] = Antichain{{s}};
      if (stats) ++stats->cells;
    }
    c.perFunction[f] = std::move(cells);
  }
  return c;
}

namespace {

// containment of one replacement language in L(A_{q,X}), shared by the
// sequential and the threaded iteration paths
struct ContainmentContext {
  const Game& g;
  const EffectSpace& space;
  const IterateOptions& opt;
  Anwa general;                 // buildAc(g, c), re-rooted per query
  std::optional<Sanwa> simple;  // buildAcSimple(g, c) when the target allows it
  std::map<Symbol, Nwa> ruleAutomata;
};

bool containsRuleLanguage(const ContainmentContext& ctx, Symbol f, const std::string& q,
                          StateSet x) {
  const ReplacementSpec& spec = ctx.g.rules.at(f);
  std::vector<std::string> accepting = ctx.space.names(x);
  if (ctx.simple) {
    Sanwa s = *ctx.simple;
    s.a.initial = q;
    s.a.accepting = accepting;
    if (spec.isExplicit()) {
      for (const NestedWord& w : spec.words)
        if (!sanwaVerify(s, w)) return false;
      return true;
    }
    return !sanwaNwaNonempty(ctx.ruleAutomata.at(f), sanwaDual(s)).nonEmpty;
  }
  Anwa a = ctx.general;
  a.initial = q;
  a.accepting = accepting;
  if (spec.isExplicit()) {
    for (const NestedWord& w : spec.words)
      if (!anwaMembership(a, w)) return false;
    return true;
  }
  std::string cell = "(" + f.str() + ", " + q + ", {" +
                     [&] {
                       std::string names;
                       for (const std::string& r : accepting) names += (names.empty() ? "" : ",") + r;
                       return names;
                     }() +
                     "})";
  if (!ctx.opt.allowBounded)
    fail("InconclusiveEmptiness",
         cell + ": automaton rules with a general target need the bounded fallback");
  EmptinessResult res = anwaEmptinessBounded(anwaIntersectNwa(anwaDual(a), ctx.ruleAutomata.at(f)),
                                             ctx.opt.boundDepth, ctx.opt.boundWidth);
  if (res.nonEmpty) return false;
  fail("InconclusiveEmptiness", cell + ": bounded search found no counterexample");
}

// minimal X with R_f ⊆ L(A_{q,X}), by ascending cardinality with supersets
// of accepted sets pruned
Antichain iterateCell(const ContainmentContext& ctx, Symbol f, size_t qi, size_t* checks) {
  size_t n = ctx.space.states.size();
  const std::string& q = ctx.space.states[qi];
  std::vector<StateSet> accepted;
  auto covered = [&](StateSet x) {
    for (StateSet s : accepted)
      if ((s & ~x) == 0) return true;
    return false;
  };
  for (size_t k = 0; k <= n; ++k) {
    std::vector<size_t> pick(k);
    for (size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      StateSet x = 0;
      for (size_t i : pick) x |= StateSet{1} << i;
      if (!covered(x)) {
        ++*checks;
        if (containsRuleLanguage(ctx, f, q, x)) accepted.push_back(x);
      }
      // next k-combination in position-lexicographic (= numeric) order
      size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return Antichain{std::move(accepted)};
}

}  // namespace

CallEffect iterateCallEffect(const Game& g, const CallEffect& c, const IterateOptions& opt,
                             EffectStats* stats) {
  EffectSpace space(g.target);
  ContainmentContext ctx{g, space, opt, buildAc(g, c), std::nullopt, {}};
  if (g.targetSnwa) ctx.simple = buildAcSimple(g, c);
  for (Symbol f : g.functions)
    if (!g.rules.at(f).isExplicit()) ctx.ruleAutomata[f] = *g.rules.at(f).automaton;

  struct Cell {
    Symbol f;
    size_t qi = 0;
    Antichain result;
    size_t checks = 0;
    std::exception_ptr error;
  };
  std::vector<Cell> cells;
  for (Symbol f : g.functions)
    for (size_t qi = 0; qi < space.states.size(); ++qi) cells.push_back({f, qi, {}, 0, nullptr});

  auto work = [&](Cell& cell) {
    try {
      cell.result = iterateCell(ctx, cell.f, cell.qi, &cell.checks);
    } catch (...) {
      cell.error = std::current_exception();
    }
  };
  if (opt.threads <= 1 || cells.size() <= 1) {
    for (Cell& cell : cells) work(cell);
  } else {
    std::atomic<size_t> nextCell{0};
    std::vector<std::thread> pool;
    size_t workers = std::min(opt.threads, cells.size());
    for (size_t t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        while (true) {
          size_t i = nextCell.fetch_add(1);
          if (i >= cells.size()) return;
          work(cells[i]);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  CallEffect out;
  for (Cell& cell : cells) {
    if (cell.error) std::rethrow_exception(cell.error);
    auto& vec = out.perFunction[cell.f];
    vec.resize(space.states.size());
    vec[cell.qi] = std::move(cell.result);
    if (stats) {
      ++stats->cells;
      stats->containmentChecks += cell.checks;
    }
  }
  return out;
}

std::pair<CallEffect, size_t> fixpointCallEffect(const Game& g, const IterateOptions& opt,
                                                 EffectStats* stats) {
  CallEffect c = baseCallEffect(g, stats);
  if (g.functions.empty()) return {c, 0};
  size_t iterations = 0;
  while (true) {
    CallEffect next = iterateCallEffect(g, c, opt, stats);
    ++iterations;
    if (next == c) return {c, iterations};
    c = std::move(next);
  }
}

namespace {

Effect spanEffect(const Game& g, const CallEffect& c, const EffectSpace& space,
                  const NestedWord& w, size_t from, size_t to) {
  Effect e = identityEffect(space);
  size_t p = from;
  while (p < to) {
    size_t m = w.matching(p);
    Effect interior = spanEffect(g, c, space, w, p + 1, m);
    e = compose(e, hOperator(g, w.at(p).symbol, interior, c));
    p = m + 1;
  }
  return e;
}

}  // namespace

Effect wordEffect(const Game& g, const CallEffect& c, const NestedWord& w) {
  EffectSpace space(g.target);
  return spanEffect(g, c, space, w, 0, w.size());
}

}  // namespace axml
