#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "axml/util.hpp"

namespace axml {

// Interned tag name. Comparison follows the name, not the intern id, so that
// anything keyed or sorted by Symbol is stable across runs.
class Symbol {
 public:
  Symbol() = default;  // invalid sentinel
  static Symbol intern(std::string_view name);
  const std::string& str() const;
  bool valid() const { return id_ != 0; }
  uint32_t id() const { return id_; }
  bool operator==(const Symbol& o) const { return id_ == o.id_; }
  bool operator!=(const Symbol& o) const { return id_ != o.id_; }
  std::strong_ordering operator<=>(const Symbol& o) const {
    if (id_ == o.id_) return std::strong_ordering::equal;
    return str() <=> o.str();
  }

 private:
  explicit Symbol(uint32_t id) : id_(id) {}
  uint32_t id_ = 0;
};

struct Tag {
  bool open = true;
  Symbol symbol;

  bool operator==(const Tag&) const = default;
  // opens sort before closes; used for canonical word enumeration order
  std::strong_ordering operator<=>(const Tag& o) const {
    if (open != o.open) return open ? std::strong_ordering::less : std::strong_ordering::greater;
    return symbol <=> o.symbol;
  }
};

inline Tag openTag(Symbol s) { return Tag{true, s}; }
inline Tag closeTag(Symbol s) { return Tag{false, s}; }

// Well-nested sequence of open/close tags. The constructor rejects anything
// that is not well nested and precomputes the matching table.
class NestedWord {
 public:
  NestedWord() = default;
  explicit NestedWord(std::vector<Tag> tags);

  size_t size() const { return tags_.size(); }
  bool empty() const { return tags_.empty(); }
  const Tag& at(size_t i) const;
  const std::vector<Tag>& tags() const { return tags_; }

  // index of the partner tag of position i
  size_t matching(size_t i) const;

  // single factor from the first tag to its match, i.e. a tree
  bool isRooted() const { return !tags_.empty() && match_[0] == tags_.size() - 1; }

  // tags [from, to), which must themselves be well nested
  NestedWord slice(size_t from, size_t to) const;

  // ranges [open, close] of the top-level factors
  std::vector<std::pair<size_t, size_t>> topLevelFactors() const;

  NestedWord operator+(const NestedWord& o) const;
  bool operator==(const NestedWord& o) const { return tags_ == o.tags_; }
  bool operator!=(const NestedWord& o) const { return tags_ != o.tags_; }
  std::strong_ordering operator<=>(const NestedWord& o) const { return tags_ <=> o.tags_; }

 private:
  std::vector<Tag> tags_;
  std::vector<uint32_t> match_;
};

struct Measures {
  size_t depth = 0;
  size_t width = 0;      // max number of children over all nodes
  size_t rootWidth = 0;  // number of top-level factors
  bool operator==(const Measures&) const = default;
};

// text form: <a><b></b></a>, whitespace between tags ignored
NestedWord parseNestedWord(const std::string& text);
std::string serializeNestedWord(const NestedWord& w);

Measures measures(const NestedWord& w);

// a1..an  ->  <a1></a1>...<an></an>
NestedWord flatEmbed(const std::vector<Symbol>& flat);

}  // namespace axml
