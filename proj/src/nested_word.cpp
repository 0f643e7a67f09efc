#include "axml/nested_word.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace axml {

namespace {

struct InternTable {
  std::mutex mu;
  std::map<std::string, uint32_t, std::less<>> byName;
  std::vector<std::string> names;  // id - 1 indexes this
};

InternTable& table() {
  static InternTable t;
  return t;
}

}  // namespace

Symbol Symbol::intern(std::string_view name) {
  if (name.empty()) fail("SyntaxError", "empty tag name");
  InternTable& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.byName.find(name);
  if (it != t.byName.end()) return Symbol(it->second);
  t.names.emplace_back(name);
  uint32_t id = static_cast<uint32_t>(t.names.size());
  t.byName.emplace(std::string(name), id);
  return Symbol(id);
}

const std::string& Symbol::str() const {
  static const std::string invalid = "<invalid>";
  if (id_ == 0) return invalid;
  InternTable& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.names[id_ - 1];
}

NestedWord::NestedWord(std::vector<Tag> tags) : tags_(std::move(tags)) {
  match_.assign(tags_.size(), 0);
  std::vector<size_t> stack;
  for (size_t i = 0; i < tags_.size(); ++i) {
    if (tags_[i].open) {
      stack.push_back(i);
    } else {
      if (stack.empty())
        fail("NotWellNested", "unmatched close tag </" + tags_[i].symbol.str() +
                                  "> at position " + std::to_string(i));
      size_t j = stack.back();
      if (tags_[j].symbol != tags_[i].symbol)
        fail("NotWellNested", "close tag </" + tags_[i].symbol.str() +
                                  "> at position " + std::to_string(i) +
                                  " does not match <" + tags_[j].symbol.str() + ">");
      stack.pop_back();
      match_[i] = static_cast<uint32_t>(j);
      match_[j] = static_cast<uint32_t>(i);
    }
  }
  if (!stack.empty())
    fail("NotWellNested", "unmatched open tag <" + tags_[stack.back()].symbol.str() +
                              "> at position " + std::to_string(stack.back()));
}

const Tag& NestedWord::at(size_t i) const {
  if (i >= tags_.size())
    fail("IndexOutOfRange", "position " + std::to_string(i) + " in word of length " +
                                std::to_string(tags_.size()));
  return tags_[i];
}

size_t NestedWord::matching(size_t i) const {
  if (i >= tags_.size())
    fail("IndexOutOfRange", "position " + std::to_string(i) + " in word of length " +
                                std::to_string(tags_.size()));
  return match_[i];
}

NestedWord NestedWord::slice(size_t from, size_t to) const {
  if (from > to || to > tags_.size())
    fail("IndexOutOfRange", "slice [" + std::to_string(from) + ", " + std::to_string(to) +
                                ") of word of length " + std::to_string(tags_.size()));
  return NestedWord(std::vector<Tag>(tags_.begin() + from, tags_.begin() + to));
}

std::vector<std::pair<size_t, size_t>> NestedWord::topLevelFactors() const {
  std::vector<std::pair<size_t, size_t>> out;
  size_t i = 0;
  while (i < tags_.size()) {
    out.emplace_back(i, match_[i]);
    i = match_[i] + 1;
  }
  return out;
}

NestedWord NestedWord::operator+(const NestedWord& o) const {
  std::vector<Tag> tags = tags_;
  tags.insert(tags.end(), o.tags_.begin(), o.tags_.end());
  return NestedWord(std::move(tags));
}

NestedWord parseNestedWord(const std::string& text) {
  std::vector<Tag> tags;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c != '<')
      fail("SyntaxError", "expected '<' at position " + std::to_string(i));
    ++i;
    bool open = true;
    if (i < text.size() && text[i] == '/') {
      open = false;
      ++i;
    }
    size_t start = i;
    while (i < text.size() && text[i] != '>' && text[i] != '<') ++i;
    if (i >= text.size() || text[i] != '>')
      fail("SyntaxError", "unterminated tag at position " + std::to_string(start));
    std::string name = text.substr(start, i - start);
    if (name.empty())
      fail("SyntaxError", "empty tag name at position " + std::to_string(start));
    for (char nc : name)
      if (nc == ' ' || nc == '\t')
        fail("SyntaxError", "whitespace inside tag name at position " + std::to_string(start));
    ++i;
    tags.push_back(Tag{open, Symbol::intern(name)});
  }
  return NestedWord(std::move(tags));
}

std::string serializeNestedWord(const NestedWord& w) {
  std::string out;
  for (const Tag& t : w.tags()) {
    out += t.open ? "<" : "</";
    out += t.symbol.str();
    out += ">";
  }
  return out;
}

Measures measures(const NestedWord& w) {
  Measures m;
  m.rootWidth = w.topLevelFactors().size();
  // children counts per open node, tracked with a stack
  std::vector<size_t> childCount;
  size_t depth = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w.at(i).open) {
      if (!childCount.empty()) ++childCount.back();
      childCount.push_back(0);
      ++depth;
      m.depth = std::max(m.depth, depth);
    } else {
      m.width = std::max(m.width, childCount.back());
      childCount.pop_back();
      --depth;
    }
  }
  return m;
}

NestedWord flatEmbed(const std::vector<Symbol>& flat) {
  std::vector<Tag> tags;
  tags.reserve(flat.size() * 2);
  for (Symbol s : flat) {
    tags.push_back(openTag(s));
    tags.push_back(closeTag(s));
  }
  return NestedWord(std::move(tags));
}

}  // namespace axml
