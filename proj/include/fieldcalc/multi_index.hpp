#ifndef FIELDCALC_MULTI_INDEX_HPP
#define FIELDCALC_MULTI_INDEX_HPP

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <utility>
#include <vector>

#include "fieldcalc/common.hpp"

namespace fieldcalc {

/// Canonical multi-index: a sorted tuple of base-space point indices,
/// repetitions allowed. This is the discrete stand-in for a finite subset of
/// the base space; repeated points are kept first-class.
///
/// Ordering is (order, lexicographic), so map iteration visits indices
/// order by order.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> pts) : pts_(std::move(pts)) {
    std::sort(pts_.begin(), pts_.end());
  }
  MultiIndex(std::initializer_list<int> pts) : MultiIndex(std::vector<int>(pts)) {}

  /// Wraps an already-sorted vector without re-sorting.
  static MultiIndex from_sorted(std::vector<int> pts) {
    MultiIndex x;
    x.pts_ = std::move(pts);
    return x;
  }

  int order() const { return static_cast<int>(pts_.size()); }
  bool empty() const { return pts_.empty(); }
  int operator[](int i) const { return pts_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& points() const { return pts_; }

  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  /// Multiset union with one extra copy of point x.
  MultiIndex plus(int x) const {
    std::vector<int> p = pts_;
    p.insert(std::upper_bound(p.begin(), p.end(), x), x);
    return from_sorted(std::move(p));
  }

  /// Removes one copy of point x; throws if absent.
  MultiIndex minus(int x) const {
    std::vector<int> p = pts_;
    auto it = std::lower_bound(p.begin(), p.end(), x);
    if (it == p.end() || *it != x) throw InvalidInput("MultiIndex::minus: point not present");
    p.erase(it);
    return from_sorted(std::move(p));
  }

  /// Removes the entry at a given position (0-based within the sorted tuple).
  MultiIndex minus_at(int pos) const {
    std::vector<int> p = pts_;
    p.erase(p.begin() + pos);
    return from_sorted(std::move(p));
  }

  /// Multiset union.
  MultiIndex merged(const MultiIndex& other) const {
    std::vector<int> p(pts_.size() + other.pts_.size());
    std::merge(pts_.begin(), pts_.end(), other.pts_.begin(), other.pts_.end(), p.begin());
    return from_sorted(std::move(p));
  }

  int count(int x) const {
    auto r = std::equal_range(pts_.begin(), pts_.end(), x);
    return static_cast<int>(r.second - r.first);
  }

  /// Distinct points with multiplicities, in ascending point order.
  std::vector<std::pair<int, int>> multiplicities() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < pts_.size();) {
      std::size_t j = i;
      while (j < pts_.size() && pts_[j] == pts_[i]) ++j;
      out.emplace_back(pts_[i], static_cast<int>(j - i));
      i = j;
    }
    return out;
  }

  /// Number of distinct permutations of the tuple: n! / prod(mult!).
  double permutation_count() const {
    double c = factorial(order());
    for (auto [pt, k] : multiplicities()) c /= factorial(k);
    return c;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.pts_ == b.pts_; }

  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (a.pts_.size() != b.pts_.size())
      return a.pts_.size() < b.pts_.size() ? std::strong_ordering::less : std::strong_ordering::greater;
    for (std::size_t i = 0; i < a.pts_.size(); ++i) {
      if (a.pts_[i] != b.pts_[i])
        return a.pts_[i] < b.pts_[i] ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

 private:
  std::vector<int> pts_;
};

/// Visits every canonical multi-index of exact order n over m points, in
/// lexicographic order.
template <class F>
void for_each_multi_index_of_order(int m, int n, F&& f) {
  std::vector<int> t(static_cast<std::size_t>(n), 0);
  if (n == 0) {
    f(MultiIndex{});
    return;
  }
  if (m <= 0) return;
  while (true) {
    f(MultiIndex::from_sorted(t));
    int i = n - 1;
    while (i >= 0 && t[static_cast<std::size_t>(i)] == m - 1) --i;
    if (i < 0) break;
    int v = ++t[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) t[static_cast<std::size_t>(k)] = v;
  }
}

/// Visits every canonical multi-index of order <= n_max, order by order.
template <class F>
void for_each_multi_index(int m, int n_max, F&& f) {
  for (int n = 0; n <= n_max; ++n) for_each_multi_index_of_order(m, n, f);
}

}  // namespace fieldcalc

#endif  // FIELDCALC_MULTI_INDEX_HPP
