#include "topdown/trees.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "topdown/error.hpp"

namespace topdown {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

bool is_identifier_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x80) return true;
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '\'' ||
         c == '.' || c == '$';
}

}  // namespace

bool is_identifier(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), is_identifier_char);
}

// ---------------------------------------------------------------------------
// RankedAlphabet

RankedAlphabet::RankedAlphabet(std::initializer_list<std::pair<std::string, int>> symbols) {
  for (const auto& [name, arity] : symbols) add(name, arity);
}

void RankedAlphabet::add(std::string name, int arity) {
  if (!is_identifier(name)) throw ModelError("invalid symbol name '" + name + "'");
  if (name == kHole) throw ModelError("symbol name '" + name + "' is reserved for the context hole");
  if (arity < 0) throw ModelError("symbol '" + name + "' has negative arity");
  if (contains(name)) throw ModelError("duplicate symbol '" + name + "'");
  symbols_.emplace(std::move(name), arity);
}

std::optional<int> RankedAlphabet::arity(std::string_view name) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) return std::nullopt;
  return it->second;
}

int RankedAlphabet::max_arity() const noexcept {
  int best = 0;
  for (const auto& [_, arity] : symbols_) best = std::max(best, arity);
  return best;
}

bool RankedAlphabet::has_nullary() const noexcept {
  return std::any_of(symbols_.begin(), symbols_.end(), [](const auto& s) { return s.second == 0; });
}

std::string RankedAlphabet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, arity] : symbols_) {
    if (!first) out += ',';
    first = false;
    out += name + "/" + std::to_string(arity);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Tree

struct Tree::Node {
  std::string label;
  std::vector<Tree> children;
  std::uint64_t size = 1;
  std::uint64_t holes = 0;
};

Tree::Tree(std::string label, std::vector<Tree> children) {
  auto node = std::make_shared<Node>();
  node->holes = label == kHole ? 1 : 0;
  for (const Tree& child : children) {
    node->size = saturating_add(node->size, child.size());
    node->holes = saturating_add(node->holes, child.hole_count());
  }
  node->label = std::move(label);
  node->children = std::move(children);
  node_ = std::move(node);
}

const std::string& Tree::label() const noexcept { return node_->label; }
std::span<const Tree> Tree::children() const noexcept { return node_->children; }
std::uint64_t Tree::size() const noexcept { return node_->size; }
std::uint64_t Tree::hole_count() const noexcept { return node_->holes; }

std::string Tree::to_string() const {
  std::string out = label();
  if (!node_->children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < node_->children.size(); ++i) {
      if (i != 0) out += ',';
      out += node_->children[i].to_string();
    }
    out += ')';
  }
  return out;
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->size != b.node_->size || a.label() != b.label()) return false;
  return std::equal(a.children().begin(), a.children().end(), b.children().begin(), b.children().end());
}

std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const bool a_hole = a.is_hole();
  const bool b_hole = b.is_hole();
  if (a_hole != b_hole) return a_hole ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = a.label().compare(b.label()); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  return std::lexicographical_compare_three_way(a.children().begin(), a.children().end(), b.children().begin(),
                                                b.children().end());
}

std::string address_to_string(const NodeAddress& address) {
  if (address.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < address.size(); ++i) {
    if (i != 0) out += '.';
    out += std::to_string(address[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Context

namespace {

bool find_hole(const Tree& tree, NodeAddress& path) {
  if (tree.is_hole()) return true;
  for (std::size_t i = 0; i < tree.arity(); ++i) {
    if (tree.children()[i].hole_count() == 0) continue;
    path.push_back(static_cast<std::uint32_t>(i + 1));
    if (find_hole(tree.children()[i], path)) return true;
    path.pop_back();
  }
  return false;
}

}  // namespace

Context::Context(Tree tree) : tree_(std::move(tree)) {
  if (tree_.hole_count() != 1) {
    throw ModelError("a context needs exactly one hole, '" + tree_.to_string() + "' has " +
                     std::to_string(tree_.hole_count()));
  }
  if (tree_.is_hole() && tree_.arity() != 0) throw ModelError("the hole must be a leaf");
  find_hole(tree_, hole_);
  if (!subtree_at(tree_, hole_).children().empty()) throw ModelError("the hole must be a leaf");
}

// ---------------------------------------------------------------------------
// Structural operations

namespace {

bool validate(const RankedAlphabet& alphabet, const Tree& tree, bool allow_hole) {
  if (tree.is_hole()) return allow_hole && tree.arity() == 0;
  auto arity = alphabet.arity(tree.label());
  if (!arity || static_cast<std::size_t>(*arity) != tree.arity()) return false;
  return std::all_of(tree.children().begin(), tree.children().end(),
                     [&](const Tree& child) { return validate(alphabet, child, allow_hole); });
}

void collect_nodes(const Tree& tree, NodeAddress& prefix, std::vector<NodeAddress>& out) {
  out.push_back(prefix);
  for (std::size_t i = 0; i < tree.arity(); ++i) {
    prefix.push_back(static_cast<std::uint32_t>(i + 1));
    collect_nodes(tree.children()[i], prefix, out);
    prefix.pop_back();
  }
}

Tree replace_from(const Tree& tree, const NodeAddress& address, std::size_t depth, Tree replacement) {
  if (depth == address.size()) return replacement;
  const std::uint32_t index = address[depth];
  if (index == 0 || index > tree.arity()) {
    throw std::out_of_range("node " + address_to_string(address) + " does not exist in " + tree.to_string());
  }
  std::vector<Tree> children(tree.children().begin(), tree.children().end());
  children[index - 1] = replace_from(children[index - 1], address, depth + 1, std::move(replacement));
  return Tree(tree.label(), std::move(children));
}

}  // namespace

bool validate_tree(const RankedAlphabet& alphabet, const Tree& tree) { return validate(alphabet, tree, false); }

bool validate_context(const RankedAlphabet& alphabet, const Context& context) {
  return validate(alphabet, context.tree(), true);
}

std::vector<NodeAddress> nodes(const Tree& tree) {
  std::vector<NodeAddress> out;
  NodeAddress prefix;
  collect_nodes(tree, prefix, out);
  return out;
}

const Tree& subtree_at(const Tree& tree, const NodeAddress& address) {
  const Tree* current = &tree;
  for (std::uint32_t index : address) {
    if (index == 0 || index > current->arity()) {
      throw std::out_of_range("node " + address_to_string(address) + " does not exist in " + tree.to_string());
    }
    current = &current->children()[index - 1];
  }
  return *current;
}

Tree replace_at(const Tree& tree, const NodeAddress& address, Tree replacement) {
  return replace_from(tree, address, 0, std::move(replacement));
}

Tree plug(const Context& context, const Tree& tree) { return replace_at(context.tree(), context.hole_address(), tree); }

Context plug_context(const Context& outer, const Context& inner) {
  return Context(replace_at(outer.tree(), outer.hole_address(), inner.tree()));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  Tree parse_document() {
    Tree tree = parse_node();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return tree;
  }

 private:
  Tree parse_node() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_identifier_char(text_[pos_])) ++pos_;
    if (start == pos_) fail(pos_ < text_.size() ? "expected a symbol name" : "unexpected end of input");
    std::string label(text_.substr(start, pos_ - start));
    skip_space();
    std::vector<Tree> children;
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ')') fail("nullary symbols are written without parentheses");
      for (;;) {
        children.push_back(parse_node());
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input, expected ',' or ')'");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
      if (label == kHole) fail("the hole 'x' cannot have children");
    }
    return Tree(std::move(label), std::move(children));
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(message, line, column);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Tree parse_tree(std::string_view text) {
  Tree tree = TreeParser(text).parse_document();
  if (tree.hole_count() != 0) throw ParseError("the hole 'x' may only occur in contexts", 0, 0);
  return tree;
}

Context parse_context(std::string_view text) {
  Tree tree = TreeParser(text).parse_document();
  if (tree.hole_count() != 1) {
    throw ParseError("a context needs exactly one hole 'x', found " + std::to_string(tree.hole_count()), 0, 0);
  }
  return Context(std::move(tree));
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

class Budget {
 public:
  explicit Budget(std::size_t cap) : cap_(cap) {}
  void take(std::size_t n) {
    used_ += n;
    if (used_ > cap_) throw ResourceLimitError("enumeration exceeded the cap of " + std::to_string(cap_) + " items");
  }

 private:
  std::size_t cap_;
  std::size_t used_ = 0;
};

// Calls `emit(parts)` for every composition of `total` into `parts.size()`
// positive parts, in lexicographic order.
template <typename Emit>
void for_each_composition(std::size_t total, std::vector<std::size_t>& parts, std::size_t index, Emit&& emit) {
  const std::size_t remaining_slots = parts.size() - index;
  if (remaining_slots == 1) {
    if (total == 0) return;
    parts[index] = total;
    emit(parts);
    return;
  }
  for (std::size_t first = 1; first + (remaining_slots - 1) <= total; ++first) {
    parts[index] = first;
    for_each_composition(total - first, parts, index + 1, emit);
  }
}

// Cartesian product over per-position candidate lists.
template <typename Emit>
void for_each_product(const std::vector<const std::vector<Tree>*>& choices, std::vector<Tree>& current,
                      std::size_t index, Emit&& emit) {
  if (index == choices.size()) {
    emit(current);
    return;
  }
  for (const Tree& t : *choices[index]) {
    current.push_back(t);
    for_each_product(choices, current, index + 1, emit);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::vector<Tree>> enumerate_trees_by_size(const RankedAlphabet& alphabet, std::size_t max_nodes,
                                                       std::size_t cap) {
  std::vector<std::vector<Tree>> by_size(max_nodes + 1);
  Budget budget(cap);
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    auto& bucket = by_size[n];
    for (const auto& [name, arity] : alphabet.symbols()) {
      if (arity == 0) {
        if (n == 1) {
          budget.take(1);
          bucket.emplace_back(name);
        }
        continue;
      }
      if (n < static_cast<std::size_t>(arity) + 1) continue;
      std::vector<std::size_t> parts(static_cast<std::size_t>(arity));
      for_each_composition(n - 1, parts, 0, [&](const std::vector<std::size_t>& sizes) {
        std::vector<const std::vector<Tree>*> choices;
        std::size_t count = 1;
        for (std::size_t s : sizes) {
          choices.push_back(&by_size[s]);
          count *= by_size[s].size();
        }
        if (count == 0) return;
        budget.take(count);
        std::vector<Tree> current;
        for_each_product(choices, current, 0,
                         [&](const std::vector<Tree>& children) { bucket.emplace_back(name, children); });
      });
    }
    std::sort(bucket.begin(), bucket.end());
  }
  return by_size;
}

std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, std::size_t max_nodes, std::size_t cap) {
  std::vector<Tree> out;
  for (auto& bucket : enumerate_trees_by_size(alphabet, max_nodes, cap)) {
    out.insert(out.end(), bucket.begin(), bucket.end());
  }
  return out;
}

std::vector<Context> enumerate_contexts(const RankedAlphabet& alphabet, std::size_t max_nodes, std::size_t cap) {
  if (max_nodes == 0) return {};
  const auto trees = enumerate_trees_by_size(alphabet, max_nodes, cap);
  std::vector<std::vector<Tree>> by_size(max_nodes + 1);
  Budget budget(cap);
  budget.take(1);
  by_size[1].push_back(Tree::hole());
  for (std::size_t n = 2; n <= max_nodes; ++n) {
    auto& bucket = by_size[n];
    for (const auto& [name, arity] : alphabet.symbols()) {
      if (arity == 0 || n < static_cast<std::size_t>(arity) + 1) continue;
      std::vector<std::size_t> parts(static_cast<std::size_t>(arity));
      for (std::size_t hole = 0; hole < parts.size(); ++hole) {
        for_each_composition(n - 1, parts, 0, [&](const std::vector<std::size_t>& sizes) {
          std::vector<const std::vector<Tree>*> choices;
          std::size_t count = 1;
          for (std::size_t i = 0; i < sizes.size(); ++i) {
            choices.push_back(i == hole ? &by_size[sizes[i]] : &trees[sizes[i]]);
            count *= choices.back()->size();
          }
          if (count == 0) return;
          budget.take(count);
          std::vector<Tree> current;
          for_each_product(choices, current, 0,
                           [&](const std::vector<Tree>& children) { bucket.emplace_back(name, children); });
        });
      }
    }
    std::sort(bucket.begin(), bucket.end());
  }
  std::vector<Context> out;
  for (auto& bucket : by_size) {
    for (auto& tree : bucket) out.emplace_back(std::move(tree));
  }
  return out;
}

}  // namespace topdown
