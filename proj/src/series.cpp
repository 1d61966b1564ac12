#include "fieldcalc/series.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fieldcalc/combinatorics.hpp"

namespace fieldcalc {

double guichardet_weight(const MultiIndex& x, const BaseSpace& base) {
  double w = 1.0;
  for (auto [pt, k] : x.multiplicities()) {
    if (pt < 0 || pt >= base.size()) throw InvalidInput("guichardet_weight: point outside base space");
    for (int i = 0; i < k; ++i) w *= base.weight(pt);
    w /= factorial(k);
  }
  return w;
}

double guichardet_integral(const SymmetricSeries& f, const BaseSpace& base) {
  double acc = 0.0;
  for (const auto& [x, v] : f.entries()) acc += v * guichardet_weight(x, base);
  return acc;
}

double contract(const SymmetricSeries& f, const SymmetricSeries& g, const BaseSpace& base) {
  int cap = std::min(f.truncation_order(), g.truncation_order());
  double acc = 0.0;
  for (const auto& [x, v] : f.entries()) {
    if (x.order() > cap) break;  // map is ordered by (order, lex)
    acc += v * g.at(x) * guichardet_weight(x, base);
  }
  return acc;
}

SymmetricSeries exponential_vector(const Source& f, int n_max, const BaseSpace& base) {
  if (static_cast<int>(f.size()) != base.size())
    throw InvalidInput("exponential_vector: source length does not match base space");
  // enumerate over the support only; points with f(x) = 0 contribute nothing
  std::vector<int> support;
  for (int x = 0; x < base.size(); ++x)
    if (f[static_cast<std::size_t>(x)] != 0.0) support.push_back(x);

  SymmetricSeries out(n_max);
  out.set(MultiIndex{}, 1.0);
  std::vector<int> tuple;
  auto rec = [&](auto&& self, std::size_t min_slot, double prod) -> void {
    if (static_cast<int>(tuple.size()) == n_max) return;
    for (std::size_t s = min_slot; s < support.size(); ++s) {
      tuple.push_back(support[s]);
      double p = prod * f[static_cast<std::size_t>(support[s])];
      out.set(MultiIndex::from_sorted(tuple), p);
      self(self, s, p);
      tuple.pop_back();
    }
  };
  rec(rec, 0, 1.0);
  return out;
}

double eval_generating(const SymmetricSeries& f, const Source& j, const BaseSpace& base) {
  if (static_cast<int>(j.size()) != base.size())
    throw InvalidInput("eval_generating: source length does not match base space");
  double acc = 0.0;
  for (const auto& [x, v] : f.entries()) {
    double term = v;
    for (auto [pt, k] : x.multiplicities()) {
      double wj = base.weight(pt) * j[static_cast<std::size_t>(pt)];
      for (int i = 0; i < k; ++i) term *= wj;
      term /= factorial(k);
    }
    acc += term;
  }
  return acc;
}

SymmetricSeries wick_product(const SymmetricSeries& f, const SymmetricSeries& g) {
  int n_out = std::min(f.truncation_order(), g.truncation_order());
  SymmetricSeries out(n_out);
  for (const auto& [x1, a] : f.entries()) {
    if (x1.order() > n_out) break;
    for (const auto& [x2, b] : g.entries()) {
      if (x1.order() + x2.order() > n_out) break;
      MultiIndex x = x1.merged(x2);
      // number of position splittings of the multiset realizing (x1, x2)
      double mult = 1.0;
      for (auto [pt, k1] : x1.multiplicities()) mult *= binomial(x.count(pt), k1);
      out.add(x, a * b * mult);
    }
  }
  return out;
}

SymmetricSeries wick_power(const SymmetricSeries& f, int n) {
  if (n < 0) throw InvalidInput("wick_power: negative exponent");
  SymmetricSeries acc = SymmetricSeries::unit(f.truncation_order());
  for (int i = 0; i < n; ++i) acc = wick_product(acc, f);
  return acc;
}

SymmetricSeries derivative(const SymmetricSeries& f, int x) {
  int n_out = std::max(f.truncation_order() - 1, 0);
  SymmetricSeries out(n_out);
  if (f.truncation_order() == 0) return out;
  for (const auto& [idx, v] : f.entries()) {
    if (idx.count(x) == 0) continue;
    out.set(idx.minus(x), v);
  }
  return out;
}

SymmetricSeries compose(std::span<const double> maclaurin, const SymmetricSeries& f) {
  if (maclaurin.empty()) throw InvalidInput("compose: need at least the constant coefficient");
  int n_max = f.truncation_order();
  int k_cap = static_cast<int>(maclaurin.size()) - 1;
  if (f.at(MultiIndex{}) == 0.0) k_cap = std::min(k_cap, n_max);

  SymmetricSeries out(n_max);
  SymmetricSeries power = SymmetricSeries::unit(n_max);
  for (int n = 0; n <= k_cap; ++n) {
    if (n > 0) power = wick_product(power, f);
    double c = maclaurin[static_cast<std::size_t>(n)] / factorial(n);
    if (c != 0.0)
      for (const auto& [x, v] : power.entries()) out.add(x, c * v);
  }
  return out;
}

SymmetricSeries exp_series(const SymmetricSeries& k) {
  if (k.at(MultiIndex{}) != 0.0)
    throw InvalidInput("exp_series: order-0 coefficient must vanish (normalize first)");
  std::vector<double> h(static_cast<std::size_t>(k.truncation_order()) + 1, 1.0);
  return compose(h, k);
}

SymmetricSeries log_series(const SymmetricSeries& g) {
  double c = g.at(MultiIndex{});
  if (!(c > 0.0)) throw InvalidInput("log_series: order-0 coefficient must be positive");
  SymmetricSeries shifted = g;
  shifted.set(MultiIndex{}, 0.0);
  // Maclaurin coefficients of ln(c + z): h_0 = ln c, h_n = (-1)^(n-1) (n-1)! / c^n.
  // These are the oracle-validated partition-lattice weights at c = 1.
  std::vector<double> h(static_cast<std::size_t>(g.truncation_order()) + 1);
  h[0] = std::log(c);
  double cpow = 1.0;
  for (int n = 1; n <= g.truncation_order(); ++n) {
    cpow *= c;
    h[static_cast<std::size_t>(n)] = (n % 2 == 1 ? 1.0 : -1.0) * factorial(n - 1) / cpow;
  }
  return compose(h, shifted);
}

SymmetricSeries inverse_series(const SymmetricSeries& g) {
  double c = g.at(MultiIndex{});
  if (c == 0.0) throw InvalidInput("inverse_series: order-0 coefficient must be nonzero");
  SymmetricSeries shifted = g;
  shifted.set(MultiIndex{}, 0.0);
  // Maclaurin coefficients of 1/(c + z): h_n = (-1)^n n! / c^(n+1).
  std::vector<double> h(static_cast<std::size_t>(g.truncation_order()) + 1);
  double cpow = c;
  for (int n = 0; n <= g.truncation_order(); ++n) {
    h[static_cast<std::size_t>(n)] = (n % 2 == 0 ? 1.0 : -1.0) * factorial(n) / cpow;
    cpow *= c;
  }
  return compose(h, shifted);
}

namespace {

// Sub-multi-index picked out by a sorted position block of x.
MultiIndex positions_to_index(const MultiIndex& x, const std::vector<int>& block) {
  std::vector<int> pts;
  pts.reserve(block.size());
  for (int pos : block) pts.push_back(x[pos]);
  return MultiIndex::from_sorted(std::move(pts));
}

template <class Weight>
SymmetricSeries partition_transform(const SymmetricSeries& in, Weight&& weight_of_block_count, double empty_value) {
  SymmetricSeries out(in.truncation_order());
  out.set(MultiIndex{}, empty_value);
  int m_hint = 0;
  for (const auto& [x, v] : in.entries())
    for (int pt : x) m_hint = std::max(m_hint, pt + 1);
  for_each_multi_index(m_hint, in.truncation_order(), [&](const MultiIndex& x) {
    if (x.order() == 0) return;
    double acc = 0.0;
    for_each_partition(x.order(), [&](const Partition& p) {
      double term = weight_of_block_count(p.n_blocks());
      if (term == 0.0) return;
      for (const auto& block : p.blocks) {
        term *= in.at(positions_to_index(x, block));
        if (term == 0.0) break;
      }
      acc += term;
    });
    out.set(x, acc);
  });
  return out;
}

}  // namespace

SymmetricSeries exp_series_partitions(const SymmetricSeries& k) {
  if (k.at(MultiIndex{}) != 0.0)
    throw InvalidInput("exp_series_partitions: order-0 coefficient must vanish");
  return partition_transform(k, [](int) { return 1.0; }, 1.0);
}

SymmetricSeries log_series_partitions(const SymmetricSeries& g) {
  if (g.at(MultiIndex{}) != 1.0)
    throw InvalidInput("log_series_partitions: order-0 coefficient must be 1");
  // Moebius weights of the partition lattice: (-1)^(N-1) (N-1)!.
  return partition_transform(
      g, [](int n_blocks) { return (n_blocks % 2 == 1 ? 1.0 : -1.0) * factorial(n_blocks - 1); }, 0.0);
}

std::string series_to_json(const SymmetricSeries& s) {
  std::ostringstream os;
  os << "{\"n_max\": " << s.truncation_order() << ", \"entries\": [";
  bool first = true;
  char buf[64];
  for (const auto& [x, v] : s.entries()) {
    if (!first) os << ", ";
    first = false;
    os << "{\"idx\": [";
    for (int i = 0; i < x.order(); ++i) {
      if (i) os << ", ";
      os << x[i];
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << "], \"val\": " << buf << "}";
  }
  os << "]}";
  return os.str();
}

SymmetricSeries series_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("series JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n_max") || !doc.contains("entries"))
    throw InvalidInput("series JSON: expected object with \"n_max\" and \"entries\"");
  SymmetricSeries out(doc["n_max"].get<int>());
  for (const auto& e : doc["entries"]) {
    if (!e.contains("idx") || !e.contains("val")) throw InvalidInput("series JSON: entry missing \"idx\" or \"val\"");
    std::vector<int> pts = e["idx"].get<std::vector<int>>();
    if (!std::is_sorted(pts.begin(), pts.end())) throw InvalidInput("series JSON: \"idx\" must be sorted");
    out.set(MultiIndex::from_sorted(std::move(pts)), e["val"].get<double>());
  }
  return out;
}

}  // namespace fieldcalc
