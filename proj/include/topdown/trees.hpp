#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topdown {

/// Name of the reserved nullary hole symbol of contexts.
inline constexpr std::string_view kHole = "x";

/// True iff `name` can be used as a symbol or state identifier in the text
/// formats: non-empty, made of ASCII alphanumerics, `_`, `'`, `.`, `$`, or
/// any non-ASCII byte (UTF-8).
bool is_identifier(std::string_view name);

/// Finite set of symbols, each carrying a fixed arity. Iteration is in
/// ascending name order.
class RankedAlphabet {
 public:
  using Map = std::map<std::string, int, std::less<>>;

  RankedAlphabet() = default;
  RankedAlphabet(std::initializer_list<std::pair<std::string, int>> symbols);

  /// Throws ModelError on a duplicate, malformed or reserved name, or a
  /// negative arity.
  void add(std::string name, int arity);

  std::optional<int> arity(std::string_view name) const;
  bool contains(std::string_view name) const { return symbols_.find(name) != symbols_.end(); }
  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const Map& symbols() const noexcept { return symbols_; }
  int max_arity() const noexcept;
  bool has_nullary() const noexcept;

  /// `{a/0,b/0,f/2}`.
  std::string to_string() const;

  friend bool operator==(const RankedAlphabet&, const RankedAlphabet&) = default;

 private:
  Map symbols_;
};

/// Immutable ranked ordered tree. Copies share structure.
///
/// Trees are totally ordered by label (the hole sorts before every other
/// label, the rest by byte order), then by children lexicographically.
class Tree {
 public:
  explicit Tree(std::string label, std::vector<Tree> children = {});

  static Tree hole() { return Tree(std::string(kHole)); }

  const std::string& label() const noexcept;
  std::span<const Tree> children() const noexcept;
  std::size_t arity() const noexcept { return children().size(); }
  bool is_hole() const noexcept { return label() == kHole; }

  /// Node count, saturating at UINT64_MAX.
  std::uint64_t size() const noexcept;
  /// Number of hole leaves.
  std::uint64_t hole_count() const noexcept;

  std::string to_string() const;

  friend bool operator==(const Tree& a, const Tree& b);
  friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
};

/// Dewey path of 1-based child indices; empty is the root.
using NodeAddress = std::vector<std::uint32_t>;

/// `ε` for the root, otherwise indices joined by `.`.
std::string address_to_string(const NodeAddress& address);

/// A tree with exactly one hole leaf.
class Context {
 public:
  /// Throws ModelError unless `tree` has exactly one hole.
  explicit Context(Tree tree);

  static Context hole() { return Context(Tree::hole()); }

  const Tree& tree() const noexcept { return tree_; }
  const NodeAddress& hole_address() const noexcept { return hole_; }
  std::uint64_t size() const noexcept { return tree_.size(); }
  std::string to_string() const { return tree_.to_string(); }

  friend bool operator==(const Context& a, const Context& b) { return a.tree_ == b.tree_; }
  friend std::strong_ordering operator<=>(const Context& a, const Context& b) { return a.tree_ <=> b.tree_; }

 private:
  Tree tree_;
  NodeAddress hole_;
};

/// Every label is declared and every node's child count equals its arity.
/// Holes are rejected.
bool validate_tree(const RankedAlphabet& alphabet, const Tree& tree);
/// As validate_tree, but the single hole leaf is allowed.
bool validate_context(const RankedAlphabet& alphabet, const Context& context);

/// All node addresses in preorder (which is also lexicographic order).
std::vector<NodeAddress> nodes(const Tree& tree);

/// Throws std::out_of_range on an address that does not exist in `tree`.
const Tree& subtree_at(const Tree& tree, const NodeAddress& address);
Tree replace_at(const Tree& tree, const NodeAddress& address, Tree replacement);

Tree plug(const Context& context, const Tree& tree);
Context plug_context(const Context& outer, const Context& inner);

/// Parses `f(a,g(b))`. Whitespace is insignificant; nullary symbols are
/// written bare. Throws ParseError.
Tree parse_tree(std::string_view text);
/// Parses a context; exactly one bare `x` must occur.
Context parse_context(std::string_view text);

/// Default cap on the number of items an enumeration may produce.
inline constexpr std::size_t kDefaultEnumerationCap = 5'000'000;

/// Trees grouped by exact node count: result[n] holds every well-formed tree
/// with n nodes in canonical order (result[0] is empty). Throws
/// ResourceLimitError once more than `cap` trees are produced.
std::vector<std::vector<Tree>> enumerate_trees_by_size(const RankedAlphabet& alphabet, std::size_t max_nodes,
                                                       std::size_t cap = kDefaultEnumerationCap);

/// All trees with at most `max_nodes` nodes, ordered by size then canonically.
std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, std::size_t max_nodes,
                                  std::size_t cap = kDefaultEnumerationCap);

/// All contexts with at most `max_nodes` nodes (the hole counts), ordered by
/// size then canonically; the first one is the bare hole.
std::vector<Context> enumerate_contexts(const RankedAlphabet& alphabet, std::size_t max_nodes,
                                        std::size_t cap = kDefaultEnumerationCap);

}  // namespace topdown
