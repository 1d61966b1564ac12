#include "fieldcalc/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fieldcalc {

namespace {

using nlohmann::json;

[[noreturn]] void missing(const std::string& key) {
  throw InvalidInput("model file: missing key \"" + key + "\"");
}

const json& require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) missing(key);
  return doc.at(key);
}

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string model_canonical_json(const ModelSpec& spec) {
  std::ostringstream os;
  int m = spec.base.size();
  os << "{\"m\": " << m << ", \"weights\": [";
  for (int i = 0; i < m; ++i) os << (i ? ", " : "") << format_double(spec.base.weight(i));
  os << "], \"metric\": [";
  for (int r = 0; r < m; ++r) {
    os << (r ? ", [" : "[");
    for (int c = 0; c < m; ++c) os << (c ? ", " : "") << format_double(spec.metric(r, c));
    os << "]";
  }
  os << "], \"interaction\": {\"coupling\": " << format_double(spec.interaction.coupling) << ", \"terms\": [";
  bool first = true;
  for (const auto& [idx, val] : spec.interaction.v.entries()) {
    os << (first ? "" : ", ") << "{\"idx\": [";
    first = false;
    for (int i = 0; i < idx.order(); ++i) os << (i ? ", " : "") << idx[i];
    os << "], \"val\": " << format_double(val) << "}";
  }
  os << "]}, \"n_max\": " << spec.n_max << ", \"N_max\": " << spec.n_max_moments << "}";
  return os.str();
}

LoadedModel parse_model_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput("model file: JSON parse error at line " + std::to_string(line_of_byte(text, e.byte)) + ": " +
                       e.what());
  }
  if (!doc.is_object()) throw InvalidInput("model file: top level must be an object");

  LoadedModel out;
  int m = 0;
  try {
    m = require(doc, "m").get<int>();
  } catch (const json::exception&) {
    throw InvalidInput("model file: key \"m\" must be an integer");
  }
  if (m < 1) throw InvalidInput("model file: \"m\" must be >= 1");

  std::vector<double> weights;
  try {
    weights = require(doc, "weights").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw InvalidInput("model file: key \"weights\" must be an array of numbers");
  }
  if (static_cast<int>(weights.size()) != m) throw InvalidInput("model file: \"weights\" must have length m");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidInput("model file: \"weights\" must be positive");
  out.spec.base = BaseSpace(weights);

  std::vector<std::vector<double>> rows;
  try {
    rows = require(doc, "metric").get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    throw InvalidInput("model file: key \"metric\" must be an m x m array of numbers");
  }
  if (static_cast<int>(rows.size()) != m) throw InvalidInput("model file: \"metric\" must have m rows");
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != m) throw InvalidInput("model file: \"metric\" rows must have length m");

  double asym = 0.0, scale = 0.0;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      asym = std::max(asym, std::abs(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -
                                     rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]));
      scale = std::max(scale, std::abs(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]));
    }
  if (asym > 1e-12 * std::max(1.0, scale))
    throw InvalidInput("model file: \"metric\" is not symmetric (max asymmetry " + format_double(asym) + ")");
  std::vector<double> g(static_cast<std::size_t>(m * m));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      g[static_cast<std::size_t>(r * m + c)] = 0.5 * (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +
                                                      rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
  if (asym > 0.0)
    out.warnings.push_back("metric symmetrized on load (max asymmetry " + format_double(asym) + ")");
  out.spec.metric = Metric::make(g, out.spec.base);

  const json& inter = require(doc, "interaction");
  if (!inter.is_object()) throw InvalidInput("model file: key \"interaction\" must be an object");
  try {
    out.spec.interaction.coupling = require(inter, "coupling").get<double>();
  } catch (const json::exception&) {
    throw InvalidInput("model file: key \"coupling\" must be a number");
  }
  const json& terms = require(inter, "terms");
  if (!terms.is_array()) throw InvalidInput("model file: key \"terms\" must be an array");

  int degree_cap = 0;
  for (const auto& t : terms) {
    if (!t.is_object() || !t.contains("idx") || !t.contains("val"))
      throw InvalidInput("model file: interaction terms need \"idx\" and \"val\"");
    std::vector<int> idx;
    double val;
    try {
      idx = t.at("idx").get<std::vector<int>>();
      val = t.at("val").get<double>();
    } catch (const json::exception&) {
      throw InvalidInput("model file: interaction term \"idx\"/\"val\" has wrong type");
    }
    if (idx.empty()) throw InvalidInput("model file: interaction terms must not be empty (no order-0 term)");
    if (!std::is_sorted(idx.begin(), idx.end()))
      throw InvalidInput("model file: interaction term \"idx\" must be sorted");
    for (int p : idx)
      if (p < 0 || p >= m) throw InvalidInput("model file: interaction term \"idx\" outside [0, m)");
    degree_cap = std::max(degree_cap, static_cast<int>(idx.size()));
  }

  int n_max = 0, big_n = 0;
  try {
    n_max = require(doc, "n_max").get<int>();
    big_n = require(doc, "N_max").get<int>();
  } catch (const json::exception&) {
    throw InvalidInput("model file: keys \"n_max\"/\"N_max\" must be integers");
  }
  if (n_max < 0 || big_n < 0) throw InvalidInput("model file: truncation orders must be nonnegative");

  SymmetricSeries v(degree_cap);
  for (const auto& t : terms) {
    std::vector<int> idx = t.at("idx").get<std::vector<int>>();
    MultiIndex mi = MultiIndex::from_sorted(std::move(idx));
    if (v.at(mi) != 0.0) throw InvalidInput("model file: duplicate interaction term \"idx\"");
    v.set(mi, t.at("val").get<double>());
  }
  out.spec.interaction.v = std::move(v);
  out.spec.n_max = n_max;
  out.spec.n_max_moments = big_n;
  out.spec.validate();

  out.canonical_json = model_canonical_json(out.spec);
  out.hash_hex = fnv1a64_hex(out.canonical_json);
  return out;
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

std::vector<double> parse_vector_file(const std::string& path, int expected_len) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open vector file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw InvalidInput("vector file: JSON parse error: " + std::string(e.what()));
  }
  std::vector<double> v;
  try {
    v = doc.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw InvalidInput("vector file: expected a JSON array of numbers");
  }
  if (expected_len >= 0 && static_cast<int>(v.size()) != expected_len)
    throw InvalidInput("vector file: expected length " + std::to_string(expected_len) + ", got " +
                       std::to_string(v.size()));
  return v;
}

}  // namespace fieldcalc
