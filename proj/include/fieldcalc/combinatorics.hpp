#ifndef FIELDCALC_COMBINATORICS_HPP
#define FIELDCALC_COMBINATORICS_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fieldcalc/common.hpp"

namespace fieldcalc {

using BigInt = boost::multiprecision::cpp_int;

// Enumeration guards. Counts explode past these; fail loudly instead of
// hanging.
inline constexpr int kMaxPartitionN = 12;
inline constexpr int kMaxPairPartitionN = 14;
inline constexpr int kMaxHierarchyN = 9;

/// Set partition of {0..n-1}: disjoint nonempty blocks covering the ground
/// set. Canonical form: each block sorted, blocks ordered by smallest
/// element.
struct Partition {
  std::vector<std::vector<int>> blocks;

  int n_blocks() const { return static_cast<int>(blocks.size()); }
  int ground_size() const;
  /// Block index of each element; this is the restricted-growth string and
  /// the canonical comparison key.
  std::vector<int> rgs() const;
  bool is_valid(int n) const;
  std::string to_string() const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.blocks == b.blocks; }
  friend bool operator<(const Partition& a, const Partition& b) { return a.rgs() < b.rgs(); }
};

/// Pair partition: disjoint 2-element blocks covering {0..n-1}. Stored as
/// (lo, hi) pairs ordered by first element.
struct PairPartition {
  std::vector<std::pair<int, int>> pairs;

  bool is_valid(int n) const;
  std::string to_string() const;

  friend bool operator==(const PairPartition& a, const PairPartition& b) { return a.pairs == b.pairs; }
  friend bool operator<(const PairPartition& a, const PairPartition& b) { return a.pairs < b.pairs; }
};

/// Apportionment: like a partition but at most one block may be empty
/// (set semantics). The empty block, when present, is listed last.
struct Apportionment {
  std::vector<std::vector<int>> nonempty_blocks;
  bool has_empty_block = false;

  int n_blocks() const { return static_cast<int>(nonempty_blocks.size()) + (has_empty_block ? 1 : 0); }
  bool is_valid(int n) const;
  std::string to_string() const;

  friend bool operator==(const Apportionment& a, const Apportionment& b) {
    return a.has_empty_block == b.has_empty_block && a.nonempty_blocks == b.nonempty_blocks;
  }
};

/// Hierarchy (total partition) over {0..n-1}: a rooted tree whose leaves
/// biject with the ground set and whose internal nodes all have >= 2
/// children; the children's leaf sets partition the node's leaf set.
/// Children are ordered by smallest leaf.
struct Hierarchy {
  struct Node {
    std::vector<int> leaves;      // sorted
    std::vector<Node> children;   // empty iff leaf

    bool is_leaf() const { return children.empty(); }
  };

  Node root;

  int n_leaves() const { return static_cast<int>(root.leaves.size()); }
  bool is_valid(int n) const;
  std::string to_string() const;

  friend bool operator==(const Hierarchy& a, const Hierarchy& b);
  friend bool operator<(const Hierarchy& a, const Hierarchy& b);
};

namespace detail {

template <class F>
void visit_partitions_rgs(int n, F&& f) {
  // Restricted growth strings in lexicographic order: a[0] = 0,
  // a[i] <= 1 + max(a[0..i-1]).
  if (n == 0) {
    f(Partition{});
    return;
  }
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::vector<int> mx(static_cast<std::size_t>(n), 0);  // mx[i] = max(a[0..i])
  auto emit = [&]() {
    Partition p;
    int nb = mx[static_cast<std::size_t>(n - 1)] + 1;
    p.blocks.assign(static_cast<std::size_t>(nb), {});
    for (int i = 0; i < n; ++i) p.blocks[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])].push_back(i);
    f(const_cast<const Partition&>(p));
  };
  while (true) {
    emit();
    int i = n - 1;
    while (i > 0 && a[static_cast<std::size_t>(i)] > mx[static_cast<std::size_t>(i - 1)]) --i;
    if (i == 0) break;
    ++a[static_cast<std::size_t>(i)];
    mx[static_cast<std::size_t>(i)] = std::max(mx[static_cast<std::size_t>(i - 1)], a[static_cast<std::size_t>(i)]);
    for (int k = i + 1; k < n; ++k) {
      a[static_cast<std::size_t>(k)] = 0;
      mx[static_cast<std::size_t>(k)] = mx[static_cast<std::size_t>(i)];
    }
  }
}

template <class F>
void visit_pairings(std::vector<int>& free, std::vector<std::pair<int, int>>& acc, F&& f) {
  if (free.empty()) {
    f(const_cast<const std::vector<std::pair<int, int>>&>(acc));
    return;
  }
  int first = free.front();
  for (std::size_t j = 1; j < free.size(); ++j) {
    int partner = free[j];
    std::vector<int> rest;
    rest.reserve(free.size() - 2);
    for (std::size_t k = 1; k < free.size(); ++k)
      if (k != j) rest.push_back(free[k]);
    acc.emplace_back(first, partner);
    visit_pairings(rest, acc, f);
    acc.pop_back();
  }
}

// Type-erased: the hierarchy construction recurses through itself, which
// must happen at a single callable type.
void visit_hierarchies_over(const std::vector<int>& leaf_set,
                            const std::function<void(const Hierarchy::Node&)>& f);

}  // namespace detail

/// Streams all set partitions of {0..n-1} in canonical (RGS-lexicographic)
/// order. Count is Bell(n). Guarded at n <= 12.
template <class F>
void for_each_partition(int n, F&& f) {
  if (n < 0) throw InvalidInput("for_each_partition: n must be nonnegative");
  if (n > kMaxPartitionN) throw SizeLimitError("for_each_partition: n exceeds guard " + std::to_string(kMaxPartitionN));
  detail::visit_partitions_rgs(n, std::forward<F>(f));
}

/// Streams all pair partitions of {0..n-1}; empty stream for odd n.
/// Count is (n-1)!! for even n. Guarded at n <= 14.
template <class F>
void for_each_pair_partition(int n, F&& f) {
  if (n < 0) throw InvalidInput("for_each_pair_partition: n must be nonnegative");
  if (n > kMaxPairPartitionN)
    throw SizeLimitError("for_each_pair_partition: n exceeds guard " + std::to_string(kMaxPairPartitionN));
  if (n % 2 != 0) return;
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<std::pair<int, int>> acc;
  detail::visit_pairings(all, acc, [&](const std::vector<std::pair<int, int>>& pairs) {
    PairPartition pp;
    pp.pairs = pairs;
    f(const_cast<const PairPartition&>(pp));
  });
}

/// Streams all apportionments of {0..n-1}: every partition, then the same
/// partition with one empty block adjoined. Count is 2 * Bell(n).
template <class F>
void for_each_apportionment(int n, F&& f) {
  for_each_partition(n, [&](const Partition& p) {
    Apportionment a;
    a.nonempty_blocks = p.blocks;
    a.has_empty_block = false;
    f(const_cast<const Apportionment&>(a));
    a.has_empty_block = true;
    f(const_cast<const Apportionment&>(a));
  });
}

/// Streams all hierarchies over {0..n-1} (n >= 1) in canonical order.
/// Count is the total-partition number A000311(n). Guarded at n <= 9.
template <class F>
void for_each_hierarchy(int n, F&& f) {
  if (n < 1) throw InvalidInput("for_each_hierarchy: n must be positive");
  if (n > kMaxHierarchyN) throw SizeLimitError("for_each_hierarchy: n exceeds guard " + std::to_string(kMaxHierarchyN));
  std::vector<int> leaves(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) leaves[static_cast<std::size_t>(i)] = i;
  detail::visit_hierarchies_over(leaves, [&f](const Hierarchy::Node& root) {
    Hierarchy h;
    h.root = root;
    f(const_cast<const Hierarchy&>(h));
  });
}

std::vector<Partition> enumerate_partitions(int n);
std::vector<PairPartition> enumerate_pair_partitions(int n);
std::vector<Apportionment> enumerate_apportionments(int n);
std::vector<Hierarchy> enumerate_hierarchies(int n);

/// Bell numbers via the Bell-triangle recurrence.
BigInt count_partitions(int n);
/// (n-1)!! for even n, 0 for odd n.
BigInt count_pair_partitions(int n);
/// 2 * Bell(n).
BigInt count_apportionments(int n);
/// Total-partition numbers A000311 via the block-of-element-n recurrence.
BigInt count_hierarchies(int n);

}  // namespace fieldcalc

#endif  // FIELDCALC_COMBINATORICS_HPP
