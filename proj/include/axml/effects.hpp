#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "axml/game.hpp"

namespace axml {

// State sets of the target automaton as bitmasks; 64 states is the v1 cap.
using StateSet = uint64_t;

struct EffectSpace {
  std::vector<std::string> states;  // sorted; position = bit index

  explicit EffectSpace(const Dnwa& d);
  size_t indexOf(const std::string& q) const;
  StateSet bit(const std::string& q) const { return StateSet{1} << indexOf(q); }
  std::vector<std::string> names(StateSet s) const;
  StateSet acceptingMask(const Dnwa& d) const;
};

// set of minimal state sets, canonically ordered by (size, numeric value)
struct Antichain {
  std::vector<StateSet> sets;
  bool operator==(const Antichain&) const = default;
  bool empty() const { return sets.empty(); }
  // true when some member is contained in x
  bool dominates(StateSet x) const;
};

Antichain minimize(std::vector<StateSet> sets);

// all unions picking one member from every family entry, minimized;
// rejects families with an empty member
Antichain mix(const std::vector<Antichain>& family);

// what Juliet can force about the target state: for each start state, an
// antichain of achievable state sets (Romeo picks inside a set)
struct Effect {
  std::vector<Antichain> at;  // indexed by EffectSpace order
  bool operator==(const Effect&) const = default;
};

// effect of one call, per function symbol and pre-open state
struct CallEffect {
  std::map<Symbol, std::vector<Antichain>> perFunction;
  bool operator==(const CallEffect&) const = default;
};

Effect identityEffect(const EffectSpace& space);

// effect of reading w1 then w2
Effect compose(const Effect& e1, const Effect& e2);

// antichain forceable from anywhere inside X (Romeo resolves the start)
Antichain applyToSet(const Effect& e, StateSet x);
Antichain applyToAntichain(const Effect& e, const Antichain& a);

// effect of one factor <a> interior </a> given the interior's effect: at the
// close Juliet either reads (target close step) or, for function symbols,
// calls with the options recorded in c at the pre-open state
Effect hOperator(const Game& g, Symbol a, const Effect& interior, const CallEffect& c);

struct IterateOptions {
  bool allowBounded = false;  // permit the bounded emptiness fallback
  size_t boundDepth = 3;
  size_t boundWidth = 3;
  size_t threads = 1;
};

struct EffectStats {
  size_t cells = 0;              // (symbol, state) call-effect cells computed
  size_t containmentChecks = 0;  // candidate replacement-language containments
};

// one-call effect: Romeo picks a replacement word, Juliet reads it with no
// further calls; EmptyReplacementLanguage when a rule has no words
CallEffect baseCallEffect(const Game& g, EffectStats* stats = nullptr);

// adds one replay level: minimal state sets X such that every replacement
// word is accepted when plays may use the previous level inside
CallEffect iterateCallEffect(const Game& g, const CallEffect& c, const IterateOptions& opt = {},
                             EffectStats* stats = nullptr);

// iterates until stable; returns the fixpoint and the number of iterate
// applications performed (a fixpoint reached immediately still counts one)
std::pair<CallEffect, size_t> fixpointCallEffect(const Game& g, const IterateOptions& opt = {},
                                                 EffectStats* stats = nullptr);

// effect of reading w with call options c at every function close
Effect wordEffect(const Game& g, const CallEffect& c, const NestedWord& w);

}  // namespace axml
