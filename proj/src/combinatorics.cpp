#include "fieldcalc/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fieldcalc {

namespace {

std::string block_to_string(const std::vector<int>& block) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (i) os << ',';
    os << block[i];
  }
  os << '}';
  return os.str();
}

void node_to_string(const Hierarchy::Node& node, std::ostringstream& os) {
  if (node.is_leaf()) {
    os << node.leaves.front();
    return;
  }
  os << '(';
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i) os << ',';
    node_to_string(node.children[i], os);
  }
  os << ')';
}

bool node_valid(const Hierarchy::Node& node) {
  if (node.leaves.empty()) return false;
  if (!std::is_sorted(node.leaves.begin(), node.leaves.end())) return false;
  if (node.is_leaf()) return node.leaves.size() == 1;
  if (node.children.size() < 2) return false;
  // children's leaf sets must partition this node's leaf set, ordered by
  // smallest leaf
  std::vector<int> merged;
  int prev_min = -1;
  for (const auto& c : node.children) {
    if (!node_valid(c)) return false;
    if (c.leaves.front() <= prev_min) return false;
    prev_min = c.leaves.front();
    merged.insert(merged.end(), c.leaves.begin(), c.leaves.end());
  }
  std::sort(merged.begin(), merged.end());
  return merged == node.leaves;
}

bool node_equal(const Hierarchy::Node& a, const Hierarchy::Node& b) {
  if (a.leaves != b.leaves) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!node_equal(a.children[i], b.children[i])) return false;
  return true;
}

// Canonical comparison matching the enumeration order: first the partition
// of the leaf set into child leaf sets (RGS order), then children
// recursively.
bool node_less(const Hierarchy::Node& a, const Hierarchy::Node& b) {
  if (a.is_leaf() || b.is_leaf()) return false;  // same leaf set: leaf iff singleton
  auto rgs_of = [](const Hierarchy::Node& n) {
    std::map<int, int> block_of;
    for (std::size_t c = 0; c < n.children.size(); ++c)
      for (int leaf : n.children[c].leaves) block_of[leaf] = static_cast<int>(c);
    std::vector<int> r;
    r.reserve(n.leaves.size());
    for (int leaf : n.leaves) r.push_back(block_of.at(leaf));
    return r;
  };
  auto ra = rgs_of(a), rb = rgs_of(b);
  if (ra != rb) return ra < rb;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (node_less(a.children[i], b.children[i])) return true;
    if (node_less(b.children[i], a.children[i])) return false;
  }
  return false;
}

void hierarchy_child_product(const std::vector<std::vector<int>>& blocks, std::size_t idx,
                             std::vector<Hierarchy::Node>& acc, const std::vector<int>& leaf_set,
                             const std::function<void(const Hierarchy::Node&)>& f) {
  if (idx == blocks.size()) {
    Hierarchy::Node node;
    node.leaves = leaf_set;
    node.children = acc;
    f(node);
    return;
  }
  detail::visit_hierarchies_over(blocks[idx], [&](const Hierarchy::Node& child) {
    acc.push_back(child);
    hierarchy_child_product(blocks, idx + 1, acc, leaf_set, f);
    acc.pop_back();
  });
}

const std::vector<BigInt>& bell_numbers(int n) {
  static std::vector<BigInt> bell = {1};
  static std::vector<BigInt> row = {1};  // last Bell-triangle row
  while (static_cast<int>(bell.size()) <= n) {
    std::vector<BigInt> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (const BigInt& v : row) next.push_back(next.back() + v);
    row = std::move(next);
    bell.push_back(row.front());
  }
  return bell;
}

}  // namespace

namespace detail {

void visit_hierarchies_over(const std::vector<int>& leaf_set,
                            const std::function<void(const Hierarchy::Node&)>& f) {
  if (leaf_set.size() == 1) {
    Hierarchy::Node leaf;
    leaf.leaves = leaf_set;
    f(leaf);
    return;
  }
  int k = static_cast<int>(leaf_set.size());
  visit_partitions_rgs(k, [&](const Partition& p) {
    if (p.n_blocks() < 2) return;  // a single-child node would be degenerate
    std::vector<std::vector<int>> blocks(p.blocks.size());
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
      for (int pos : p.blocks[b]) blocks[b].push_back(leaf_set[static_cast<std::size_t>(pos)]);
    std::vector<Hierarchy::Node> acc;
    hierarchy_child_product(blocks, 0, acc, leaf_set, f);
  });
}

}  // namespace detail

int Partition::ground_size() const {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.size());
  return n;
}

std::vector<int> Partition::rgs() const {
  int n = ground_size();
  std::vector<int> r(static_cast<std::size_t>(n), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int e : blocks[b]) r[static_cast<std::size_t>(e)] = static_cast<int>(b);
  return r;
}

bool Partition::is_valid(int n) const {
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  int prev_min = -1;
  for (const auto& b : blocks) {
    if (b.empty()) return false;
    if (!std::is_sorted(b.begin(), b.end())) return false;
    if (b.front() <= prev_min) return false;
    prev_min = b.front();
    for (int e : b) {
      if (e < 0 || e >= n) return false;
      if (seen[static_cast<std::size_t>(e)]++) return false;
    }
  }
  for (int s : seen)
    if (s != 1) return false;
  return true;
}

std::string Partition::to_string() const {
  if (blocks.empty()) return "()";
  std::string out;
  for (const auto& b : blocks) out += block_to_string(b);
  return out;
}

bool PairPartition::is_valid(int n) const {
  if (n % 2 != 0) return false;
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  int prev_first = -1;
  for (auto [a, b] : pairs) {
    if (a >= b) return false;
    if (a <= prev_first) return false;
    prev_first = a;
    for (int e : {a, b}) {
      if (e < 0 || e >= n) return false;
      if (seen[static_cast<std::size_t>(e)]++) return false;
    }
  }
  return static_cast<int>(pairs.size()) * 2 == n;
}

std::string PairPartition::to_string() const {
  if (pairs.empty()) return "()";
  std::string out;
  for (auto [a, b] : pairs) out += block_to_string({a, b});
  return out;
}

bool Apportionment::is_valid(int n) const {
  Partition p{nonempty_blocks};
  return p.is_valid(n);
}

std::string Apportionment::to_string() const {
  if (nonempty_blocks.empty() && !has_empty_block) return "()";
  std::string out;
  for (const auto& b : nonempty_blocks) out += block_to_string(b);
  if (has_empty_block) out += "{}";
  return out;
}

bool Hierarchy::is_valid(int n) const {
  if (static_cast<int>(root.leaves.size()) != n) return false;
  for (int i = 0; i < n; ++i)
    if (root.leaves[static_cast<std::size_t>(i)] != i) return false;
  return node_valid(root);
}

std::string Hierarchy::to_string() const {
  std::ostringstream os;
  node_to_string(root, os);
  return os.str();
}

bool operator==(const Hierarchy& a, const Hierarchy& b) { return node_equal(a.root, b.root); }
bool operator<(const Hierarchy& a, const Hierarchy& b) { return node_less(a.root, b.root); }

std::vector<Partition> enumerate_partitions(int n) {
  std::vector<Partition> out;
  for_each_partition(n, [&](const Partition& p) { out.push_back(p); });
  return out;
}

std::vector<PairPartition> enumerate_pair_partitions(int n) {
  std::vector<PairPartition> out;
  for_each_pair_partition(n, [&](const PairPartition& p) { out.push_back(p); });
  return out;
}

std::vector<Apportionment> enumerate_apportionments(int n) {
  std::vector<Apportionment> out;
  for_each_apportionment(n, [&](const Apportionment& a) { out.push_back(a); });
  return out;
}

std::vector<Hierarchy> enumerate_hierarchies(int n) {
  std::vector<Hierarchy> out;
  for_each_hierarchy(n, [&](const Hierarchy& h) { out.push_back(h); });
  return out;
}

BigInt count_partitions(int n) {
  if (n < 0) throw InvalidInput("count_partitions: n must be nonnegative");
  return bell_numbers(n)[static_cast<std::size_t>(n)];
}

BigInt count_pair_partitions(int n) {
  if (n < 0) throw InvalidInput("count_pair_partitions: n must be nonnegative");
  if (n % 2 != 0) return 0;
  BigInt v = 1;
  for (int k = n - 1; k > 1; k -= 2) v *= k;
  return v;
}

BigInt count_apportionments(int n) { return 2 * count_partitions(n); }

BigInt count_hierarchies(int n) {
  if (n < 1) throw InvalidInput("count_hierarchies: n must be positive");
  // b(n) = hierarchies on n labeled leaves. c(n) = sum over all set
  // partitions of [n] of prod b(|block|), via the usual
  // "block containing element n has size j" recurrence. For n >= 2 the root
  // split must have >= 2 blocks, i.e. the block of element n has size < n.
  std::vector<BigInt> b(static_cast<std::size_t>(n) + 1, 0), c(static_cast<std::size_t>(n) + 1, 0);
  b[1] = 1;
  c[0] = 1;
  c[1] = 1;
  auto choose = [](int a, int k) {
    BigInt r = 1;
    for (int i = 0; i < k; ++i) r = r * (a - i) / (i + 1);
    return r;
  };
  for (int k = 2; k <= n; ++k) {
    BigInt s = 0;
    for (int j = 1; j <= k - 1; ++j) s += choose(k - 1, j - 1) * b[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(k - j)];
    b[static_cast<std::size_t>(k)] = s;
    c[static_cast<std::size_t>(k)] = s + b[static_cast<std::size_t>(k)];  // adds the single-block partition
  }
  return b[static_cast<std::size_t>(n)];
}

double factorial(int n) {
  if (n < 0) throw InvalidInput("factorial: negative argument");
  if (n > 170) throw NumericError("factorial: overflow for n > 170");
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (int i = 1; i <= 170; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] * i;
    return t;
  }();
  return table[static_cast<std::size_t>(n)];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  // arguments here stay small enough that this is exact
  return r;
}

}  // namespace fieldcalc
