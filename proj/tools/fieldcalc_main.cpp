// Batch front door for the field-calculus library: model ingestion, command
// dispatch, structured output. All truncations, seeds and tolerances are
// explicit; identical invocations produce byte-identical output.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fieldcalc/combinatorics.hpp"
#include "fieldcalc/model_io.hpp"
#include "fieldcalc/oracle.hpp"
#include "fieldcalc/parallel.hpp"
#include "fieldcalc/trees.hpp"

namespace fc = fieldcalc;

namespace {

std::string meta_json(const fc::LoadedModel& model, int n_max, int big_n, const std::string& seed_text = "null") {
  std::ostringstream os;
  os << "{\"tool_version\": \"" << fc::kToolVersion << "\", \"model_hash\": \"" << model.hash_hex
     << "\", \"truncations\": {\"n_max\": " << n_max << ", \"N_max\": " << big_n << "}, \"seed\": " << seed_text
     << "}";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fc::InvalidInput("cannot open output file: " + path);
  out << content;
  if (!out) throw fc::InvalidInput("failed writing output file: " + path);
}

std::string series_csv(const fc::SymmetricSeries& s) {
  std::ostringstream os;
  os << "idx,val\n";
  for (const auto& [x, v] : s.entries()) {
    os << '"';
    for (int i = 0; i < x.order(); ++i) os << (i ? " " : "") << x[i];
    os << "\"," << fc::format_double(v) << "\n";
  }
  return os.str();
}

void print_warnings(const fc::LoadedModel& model) {
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
}

void guard_enumeration_size(const fc::BigInt& count, double max_work, const std::string& what) {
  if (count > fc::BigInt(static_cast<long long>(max_work)))
    throw fc::SizeLimitError("refusing to enumerate " + count.str() + " " + what + " (--max-work is " +
                             fc::format_double(max_work) + ")");
}

int run_enumerate(const std::string& family, int n, bool count_only, double max_work) {
  fc::BigInt count;
  if (family == "partitions")
    count = fc::count_partitions(n);
  else if (family == "pairs")
    count = fc::count_pair_partitions(n);
  else if (family == "apportionments")
    count = fc::count_apportionments(n);
  else if (family == "hierarchies")
    count = fc::count_hierarchies(n);
  else
    throw fc::InvalidInput("unknown family: " + family);

  if (count_only) {
    std::cout << count.str() << "\n";
    return 0;
  }
  guard_enumeration_size(count, max_work, family);
  std::ostringstream os;
  if (family == "partitions")
    fc::for_each_partition(n, [&](const fc::Partition& p) { os << p.to_string() << "\n"; });
  else if (family == "pairs")
    fc::for_each_pair_partition(n, [&](const fc::PairPartition& p) { os << p.to_string() << "\n"; });
  else if (family == "apportionments")
    fc::for_each_apportionment(n, [&](const fc::Apportionment& a) { os << a.to_string() << "\n"; });
  else
    fc::for_each_hierarchy(n, [&](const fc::Hierarchy& h) { os << h.to_string() << "\n"; });
  std::cout << os.str();
  return 0;
}

int run_moments(const std::string& model_path, int n_override, const std::string& out_path,
                const std::string& csv_path, unsigned threads, bool cumulants) {
  fc::LoadedModel model = fc::load_model_file(model_path);
  print_warnings(model);
  int big_n = n_override >= 0 ? n_override : model.spec.n_max_moments;

  double xi = fc::partition_function(model.spec);
  fc::SymmetricSeries series = fc::interacting_moments(model.spec, big_n, threads);
  if (cumulants) series = fc::moments_to_cumulants(series);

  std::string meta = meta_json(model, model.spec.n_max, big_n);
  std::string series_json = fc::series_to_json(series);
  write_file(out_path, "{\"meta\": " + meta + ", " + series_json.substr(1) + "\n");
  if (!csv_path.empty()) write_file(csv_path, series_csv(series));

  std::cout << "{\"meta\": " << meta << ", \"xi\": " << fc::format_double(xi) << "}\n";
  return 0;
}

int run_partition_function(const std::string& model_path) {
  fc::LoadedModel model = fc::load_model_file(model_path);
  print_warnings(model);
  double xi = fc::partition_function(model.spec);
  std::cout << "{\"meta\": " << meta_json(model, model.spec.n_max, model.spec.n_max_moments)
            << ", \"xi\": " << fc::format_double(xi) << "}\n";
  return 0;
}

int run_ds_check(const std::string& model_path, int order, double tol, unsigned threads) {
  fc::LoadedModel model = fc::load_model_file(model_path);
  print_warnings(model);
  int needed = order + 1 + model.spec.interaction.max_degree();
  int big_n = std::max(model.spec.n_max_moments, needed);
  fc::SymmetricSeries g = fc::interacting_moments(model.spec, big_n, threads);
  double worst = fc::max_ds_residual(model.spec, g, order);
  bool pass = worst <= tol;
  std::cout << "{\"meta\": " << meta_json(model, model.spec.n_max, big_n) << ", \"order\": " << order
            << ", \"tol\": " << fc::format_double(tol) << ", \"max_residual\": " << fc::format_double(worst)
            << ", \"pass\": " << (pass ? "true" : "false") << "}\n";
  return pass ? 0 : 1;
}

int run_tree(const std::string& model_path, const std::string& j_path, int leaves, double max_work) {
  fc::LoadedModel model = fc::load_model_file(model_path);
  print_warnings(model);
  fc::BigInt total = 0;
  for (int n = 1; n <= leaves; ++n) total += fc::count_hierarchies(n);
  guard_enumeration_size(total, max_work, "hierarchies");
  fc::Source j = fc::parse_vector_file(j_path, model.spec.base.size());

  fc::ClassicalField psi = fc::tree_expand(model.spec, j, leaves);
  fc::StationaryLogZ st = fc::stationary_log_z(model.spec, j);

  std::ostringstream os;
  os << "{\"meta\": " << meta_json(model, model.spec.n_max, leaves) << ", \"psi\": [";
  for (std::size_t i = 0; i < psi.size(); ++i) os << (i ? ", " : "") << fc::format_double(psi[i]);
  os << "], \"logZ\": " << fc::format_double(st.log_z)
     << ", \"residual\": " << fc::format_double(st.stationarity_residual) << "}\n";
  std::cout << os.str();
  return 0;
}

struct CompareLine {
  std::string name;
  double lib;
  double ref;
  double tol;
};

int report_comparisons(const std::vector<CompareLine>& lines) {
  bool all_ok = true;
  for (const auto& c : lines) {
    double diff = std::abs(c.lib - c.ref);
    bool ok = diff <= c.tol;
    all_ok = all_ok && ok;
    std::cout << c.name << ": lib=" << fc::format_double(c.lib) << " oracle=" << fc::format_double(c.ref)
              << " diff=" << fc::format_double(diff) << " tol=" << fc::format_double(c.tol)
              << (ok ? " PASS" : " FAIL") << "\n";
  }
  std::cout << (all_ok ? "OK" : "TOLERANCE BREACH") << "\n";
  return all_ok ? 0 : 1;
}

// Truncation-error scale: the change from retaining one more vertex order,
// with a factor-10 slack and an absolute floor.
double truncation_tolerance(double next, double current) { return 10.0 * std::abs(next - current) + 1e-10; }

int run_oracle_compare(const std::string& model_path, const std::string& check, int gh_order, std::uint64_t seed) {
  fc::LoadedModel model = fc::load_model_file(model_path);
  print_warnings(model);
  const fc::ModelSpec& spec = model.spec;
  std::vector<CompareLine> lines;

  if (check == "xi") {
    double xi = fc::partition_function(spec);
    fc::ModelSpec next = spec;
    next.n_max += 1;
    double xi_next = fc::partition_function(next);
    double lambda = spec.interaction.coupling;
    auto v_of_phi = [&](const std::vector<double>& phi) {
      double v = 0.0;
      for (const auto& [u, val] : spec.interaction.v.entries())
        v += lambda * val * fc::guichardet_weight(u, spec.base) * [&] {
          double p = 1.0;
          for (int pt : u) p *= phi[static_cast<std::size_t>(pt)];
          return p;
        }();
      return v;
    };
    double ref = fc::oracle::gh_expectation_fn(
        spec.metric, [&](const std::vector<double>& phi) { return std::exp(v_of_phi(phi)); }, gh_order);
    lines.push_back({"xi", xi, ref, truncation_tolerance(xi_next, xi)});
  } else if (check == "moments") {
    int cap = std::min(2, spec.n_max_moments);
    fc::SymmetricSeries g = fc::interacting_moments(spec, cap);
    fc::ModelSpec nx = spec;
    nx.n_max += 1;
    fc::SymmetricSeries g_next = fc::interacting_moments(nx, cap);
    double lambda = spec.interaction.coupling;
    auto v_of_phi = [&](const std::vector<double>& phi) {
      double v = 0.0;
      for (const auto& [u, val] : spec.interaction.v.entries()) {
        double p = 1.0;
        for (int pt : u) p *= phi[static_cast<std::size_t>(pt)];
        v += lambda * val * fc::guichardet_weight(u, spec.base) * p;
      }
      return v;
    };
    double z = fc::oracle::gh_expectation_fn(
        spec.metric, [&](const std::vector<double>& phi) { return std::exp(v_of_phi(phi)); }, gh_order);
    fc::for_each_multi_index(spec.base.size(), cap, [&](const fc::MultiIndex& x) {
      if (x.order() == 0) return;
      double ref = fc::oracle::gh_expectation_fn(
                       spec.metric,
                       [&](const std::vector<double>& phi) {
                         double p = 1.0;
                         for (int pt : x) p *= phi[static_cast<std::size_t>(pt)];
                         return p * std::exp(v_of_phi(phi));
                       },
                       gh_order) /
                   z;
      std::ostringstream name;
      name << "G[";
      for (int i = 0; i < x.order(); ++i) name << (i ? " " : "") << x[i];
      name << "]";
      lines.push_back({name.str(), g.at(x), ref, truncation_tolerance(g_next.at(x), g.at(x))});
    });
  } else if (check == "isserlis") {
    fc::for_each_multi_index(spec.base.size(), 8, [&](const fc::MultiIndex& x) {
      if (x.order() % 2 != 0 || x.order() == 0) return;
      double lib = fc::isserlis_moment(spec.metric, x);
      double ref = fc::oracle::gh_moment(spec.metric, x, gh_order);
      std::ostringstream name;
      name << "E[";
      for (int i = 0; i < x.order(); ++i) name << (i ? " " : "") << x[i];
      name << "]";
      lines.push_back({name.str(), lib, ref, 1e-10});
    });
  } else if (check == "compose") {
    // m = 1 slice with a seeded series; weights folded into the scalar
    // coefficients a_n = F_n w^n / n!.
    std::mt19937_64 rng(seed);
    auto u = [&] { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); };
    const int n = 8;
    fc::BaseSpace base1({spec.base.weight(0)});
    double w = base1.weight(0);
    fc::SymmetricSeries f(n);
    for (int k = 1; k <= n; ++k) {
      std::vector<int> idx(static_cast<std::size_t>(k), 0);
      f.set(fc::MultiIndex::from_sorted(idx), u());
    }
    f.set(fc::MultiIndex{}, 1.0);
    auto to_scalar = [&](const fc::SymmetricSeries& s) {
      fc::oracle::ScalarSeries a(static_cast<std::size_t>(n) + 1, 0.0);
      double wp = 1.0;
      for (int k = 0; k <= n; ++k) {
        std::vector<int> idx(static_cast<std::size_t>(k), 0);
        a[static_cast<std::size_t>(k)] = s.at(fc::MultiIndex::from_sorted(idx)) * wp / fc::factorial(k);
        wp *= w;
      }
      return a;
    };
    fc::oracle::ScalarSeries fs = to_scalar(f);
    fc::oracle::ScalarSeries log_ref = fc::oracle::scalar_log(fs);
    fc::oracle::ScalarSeries inv_ref = fc::oracle::scalar_inverse(fs);
    fc::oracle::ScalarSeries log_lib = to_scalar(fc::log_series(f));
    fc::oracle::ScalarSeries inv_lib = to_scalar(fc::inverse_series(f));
    double dlog = 0.0, dinv = 0.0;
    for (int k = 0; k <= n; ++k) {
      dlog = std::max(dlog, std::abs(log_lib[static_cast<std::size_t>(k)] - log_ref[static_cast<std::size_t>(k)]));
      dinv = std::max(dinv, std::abs(inv_lib[static_cast<std::size_t>(k)] - inv_ref[static_cast<std::size_t>(k)]));
    }
    lines.push_back({"log_coeff_max_dev", dlog, 0.0, 1e-12});
    lines.push_back({"inverse_coeff_max_dev", dinv, 0.0, 1e-12});
  } else {
    throw fc::InvalidInput("unknown check: " + check);
  }

  return report_comparisons(lines);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete field calculus: symmetric-series algebra, Gaussian and interacting moments,\n"
               "Dyson-Schwinger checks and tree expansions over finite weighted base spaces."};
  app.require_subcommand(1);

  unsigned threads = fc::default_thread_count();
  app.add_option("--threads", threads, "worker threads for data-parallel paths (default FIELDCALC_THREADS or 1)");
  double max_work = 5e6;
  app.add_option("--max-work", max_work, "refuse enumerations larger than this many structures");

  auto* enumerate = app.add_subcommand("enumerate", "enumerate partition-type structures");
  std::string family;
  int en_n = 0;
  bool count_only = false;
  enumerate->add_option("--family", family, "partitions|pairs|apportionments|hierarchies")->required();
  enumerate->add_option("--n", en_n, "ground-set size")->required();
  enumerate->add_flag("--count-only", count_only, "print only the count");

  auto* moments = app.add_subcommand("moments", "interacting moments of a model");
  std::string model_path, out_path, csv_path;
  int n_override = -1;
  moments->add_option("--model", model_path, "model JSON file")->required();
  moments->add_option("--out", out_path, "output series JSON path")->required();
  moments->add_option("--csv", csv_path, "optional CSV flattening path");
  moments->add_option("--n-max-moments", n_override, "override the model's N_max");

  auto* cumulants = app.add_subcommand("cumulants", "interacting cumulants of a model");
  std::string cmodel_path, cout_path;
  int cn_override = -1;
  cumulants->add_option("--model", cmodel_path, "model JSON file")->required();
  cumulants->add_option("--out", cout_path, "output series JSON path")->required();
  cumulants->add_option("--n-max-moments", cn_override, "override the model's N_max");

  auto* partition = app.add_subcommand("partition-function", "truncated partition function");
  std::string pmodel_path;
  partition->add_option("--model", pmodel_path, "model JSON file")->required();

  auto* ds = app.add_subcommand("ds-check", "max Dyson-Schwinger residual");
  std::string dmodel_path;
  int ds_order = 2;
  double ds_tol = 1e-8;
  ds->add_option("--model", dmodel_path, "model JSON file")->required();
  ds->add_option("--order", ds_order, "check all X up to this order");
  ds->add_option("--tol", ds_tol, "failure threshold on the max residual");

  auto* tree = app.add_subcommand("tree", "tree-level classical field and stationary log Z");
  std::string tmodel_path, j_path;
  int leaves = 3;
  tree->add_option("--model", tmodel_path, "model JSON file")->required();
  tree->add_option("--j", j_path, "source vector JSON file (plain array)")->required();
  tree->add_option("--leaves", leaves, "max hierarchy leaves");

  auto* oc = app.add_subcommand("oracle-compare", "library vs brute-force oracle");
  std::string omodel_path, check;
  int gh_order = fc::oracle::kDefaultGhOrder;
  std::uint64_t seed = 20240809;
  oc->add_option("--model", omodel_path, "model JSON file")->required();
  oc->add_option("--check", check, "xi|moments|isserlis|compose")->required();
  oc->add_option("--gh-order", gh_order, "Gauss-Hermite order per dimension");
  oc->add_option("--seed", seed, "seed for the seeded checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*enumerate) return run_enumerate(family, en_n, count_only, max_work);
    if (*moments) return run_moments(model_path, n_override, out_path, csv_path, threads, false);
    if (*cumulants) return run_moments(cmodel_path, cn_override, cout_path, "", threads, true);
    if (*partition) return run_partition_function(pmodel_path);
    if (*ds) return run_ds_check(dmodel_path, ds_order, ds_tol, threads);
    if (*tree) return run_tree(tmodel_path, j_path, leaves, max_work);
    if (*oc) return run_oracle_compare(omodel_path, check, gh_order, seed);
  } catch (const fc::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fc::SizeLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fc::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
