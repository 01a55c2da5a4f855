#include "eigmdp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigmdp/diagnostics.hpp"
#include "eigmdp/dpp.hpp"
#include "eigmdp/ensembles.hpp"
#include "eigmdp/errors.hpp"
#include "eigmdp/laws.hpp"
#include "eigmdp/mdpstats.hpp"
#include "eigmdp/montecarlo.hpp"
#include "eigmdp/parallel.hpp"

#ifndef EIGMDP_VERSION
#define EIGMDP_VERSION "unknown"
#endif

namespace eigmdp {
namespace {

using json = nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 20240611;

// Malformed flag values (exit 2) and failed writes (exit 4).
struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::string suffix;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Outcome {
  json parameters = json::object();
  json payload = json::object();
  json uncertainty = json::object();
  std::vector<CsvTable> tables;
  std::vector<std::string> summary;
};

struct Common {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  std::string output_dir;
  std::string tag;
};

double parse_number(const std::string& token) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (token.empty() || end != begin + token.size() || std::isnan(value)) {
    throw ParseFailure("not a number: '" + token + "'");
  }
  return value;
}

Interval parse_interval(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParseFailure("interval must be given as a,b: '" + text + "'");
  const double lower = parse_number(text.substr(0, comma));
  const double upper = parse_number(text.substr(comma + 1));
  if (lower > upper) throw ParseFailure("interval lower end exceeds upper end: '" + text + "'");
  return Interval(lower, upper);
}

json interval_json(const Interval& interval) {
  const auto endpoint = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  return json::array({endpoint(interval.lower()), endpoint(interval.upper())});
}

AtomDistribution make_atom(const std::string& name, double variance) {
  if (name == "gaussian") return AtomDistribution::gaussian(variance);
  if (name == "rademacher") return AtomDistribution::rademacher(variance);
  if (name == "matched") return make_matched_atom(variance);
  throw ParseFailure("unknown atom '" + name + "' (gaussian, rademacher, matched)");
}

EnsembleKind parse_kind(const std::string& name) {
  try {
    return parse_ensemble_kind(name);
  } catch (const std::invalid_argument&) {
    throw ParseFailure("unknown ensemble kind '" + name + "'");
  }
}

std::size_t covariance_rows(double p_over_n, std::size_t n) {
  if (!(p_over_n >= 1.0)) throw std::invalid_argument("--p-over-n must be >= 1");
  return static_cast<std::size_t>(std::llround(p_over_n * static_cast<double>(n)));
}

EnsembleSpec make_spec(EnsembleKind kind, std::size_t n, double p_over_n, const std::string& atom,
                       std::uint64_t seed) {
  switch (kind) {
    case EnsembleKind::gue: return EnsembleSpec::gue(n, seed);
    case EnsembleKind::goe: return EnsembleSpec::goe(n, seed);
    case EnsembleKind::gse: return EnsembleSpec::gse(n, seed);
    case EnsembleKind::lue: return EnsembleSpec::lue(covariance_rows(p_over_n, n), n, seed);
    case EnsembleKind::wigner_hermitian:
      return EnsembleSpec::wigner_hermitian(n, make_atom(atom, 0.5), make_atom(atom, 1.0), seed);
    case EnsembleKind::wigner_symmetric:
      return EnsembleSpec::wigner_symmetric(n, make_atom(atom, 1.0), make_atom(atom, 2.0), seed);
    case EnsembleKind::covariance:
      return EnsembleSpec::covariance(covariance_rows(p_over_n, n), n, make_atom(atom, 0.5), seed);
  }
  throw std::logic_error("make_spec: unhandled kind");
}

GueSampler parse_sampler(const std::string& name) {
  return name == "interlaced" ? GueSampler::interlaced : GueSampler::direct;
}

json moments_json(const SampleMoments& m) {
  return {{"mean", m.mean},
          {"variance", m.variance},
          {"mean_standard_error", m.mean_standard_error},
          {"variance_standard_error", m.variance_standard_error}};
}

std::string format_row(const std::vector<double>& values) {
  std::string line;
  char buffer[32];
  for (double v : values) {
    std::snprintf(buffer, sizeof buffer, "%16.8g", v);
    line += buffer;
  }
  return line;
}

std::string format_header(const std::vector<std::string>& names) {
  std::string line;
  char buffer[64];
  for (const auto& name : names) {
    std::snprintf(buffer, sizeof buffer, "%16s", name.c_str());
    line += buffer;
  }
  return line;
}

void add_table_summary(Outcome& outcome, const CsvTable& table) {
  outcome.summary.push_back(format_header(table.columns));
  for (const auto& row : table.rows) outcome.summary.push_back(format_row(row));
}

json rate_curve_json(const RateCurve& curve) {
  json flagged = json::array();
  for (bool f : curve.flagged) flagged.push_back(f);
  return {{"method", std::string(to_string(curve.method))},
          {"a", curve.a},
          {"sample_count", curve.sample_count},
          {"xi", curve.xi},
          {"empirical_rate", curve.empirical_rate},
          {"target_rate", curve.target_rate},
          {"ci_low", curve.ci_low},
          {"ci_high", curve.ci_high},
          {"tail_count", curve.tail_count},
          {"flagged", flagged}};
}

CsvTable rate_curve_table(const RateCurve& curve) {
  CsvTable table{"", {"xi", "empirical_rate", "target_rate", "ci_low", "ci_high"}, {}};
  for (std::size_t j = 0; j < curve.xi.size(); ++j) {
    table.rows.push_back(
        {curve.xi[j], curve.empirical_rate[j], curve.target_rate[j], curve.ci_low[j], curve.ci_high[j]});
  }
  return table;
}

std::vector<std::size_t> parse_sizes(const std::vector<double>& raw) {
  std::vector<std::size_t> sizes;
  for (double v : raw) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ParseFailure("sizes must be positive integers");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  return sizes;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw IoFailure("cannot open " + path.string() + " for writing");
  file << text;
  file.close();
  if (!file) throw IoFailure("failed writing " + path.string());
}

std::string csv_text(const CsvTable& table) {
  std::ostringstream text;
  text << "# columns:";
  for (std::size_t k = 0; k < table.columns.size(); ++k) text << (k ? ", " : " ") << table.columns[k];
  text << '\n';
  for (std::size_t k = 0; k < table.columns.size(); ++k) text << (k ? "," : "") << table.columns[k];
  text << '\n';
  char buffer[40];
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buffer, sizeof buffer, "%.17g", row[k]);
      text << (k ? "," : "") << buffer;
    }
    text << '\n';
  }
  return text.str();
}

// Interlaced versus direct GUE medians plus the deterministic counting gap.
Outcome interlace_test(std::size_t n, std::size_t replicas, double level, const Common& common) {
  if (n < 2) throw std::invalid_argument("interlace-test: --n must be >= 2");
  const std::size_t median = n / 2;
  const double scale = std::sqrt(static_cast<double>(n));
  const std::vector<Interval> raw_intervals{Interval::at_least(0.0), Interval(-scale, scale),
                                            Interval::below(0.5 * scale)};
  struct Draw {
    double direct = 0.0;
    double interlaced = 0.0;
    long worst_gap = 0;
  };
  const std::uint64_t direct_seed = derive_seed(common.seed, 1);
  const std::uint64_t interlaced_seed = derive_seed(common.seed, 2);
  const auto draws = run_replicas(replicas, common.threads, [&](std::size_t r) {
    Draw d;
    auto direct_rng = RngStream::substream(direct_seed, r);
    d.direct = eigenvalues(sample_matrix(EnsembleSpec::gue(n), direct_rng)).normalized().eigenvalue(median);
    auto rng = RngStream::substream(interlaced_seed, r);
    const auto a = eigenvalues(sample_matrix(EnsembleSpec::goe(n), rng));
    const auto b = eigenvalues(sample_matrix(EnsembleSpec::goe(n + 1), rng));
    const auto even = interlace_even(a.values(), b.values());
    d.interlaced = even[median - 1] / scale;
    for (const auto& interval : raw_intervals) {
      const long gap = interlacing_count_gap(a.values(), b.values(), interval);
      if (std::abs(gap) > std::abs(d.worst_gap)) d.worst_gap = gap;
    }
    return d;
  });
  std::vector<double> direct, interlaced;
  std::size_t violations = 0;
  for (const auto& d : draws) {
    direct.push_back(d.direct);
    interlaced.push_back(d.interlaced);
    violations += std::abs(d.worst_gap) > 1;
  }
  const auto ks = ks_two_sample(direct, interlaced);
  Outcome outcome;
  outcome.parameters = {{"n", n}, {"replicas", replicas}, {"level", level}, {"median_index", median}};
  outcome.payload = {
      {"median_ks", {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"pass", ks.p_value >= level}}},
      {"counting_bound",
       {{"instances", replicas * raw_intervals.size()}, {"violations", violations}, {"pass", violations == 0}}},
      {"direct_median", moments_json(sample_moments(direct))},
      {"interlaced_median", moments_json(sample_moments(interlaced))}};
  outcome.uncertainty = {{"ks_p_value", ks.p_value}};
  char line[160];
  std::snprintf(line, sizeof line, "median KS  D = %.4f  p = %.4g  %s", ks.statistic, ks.p_value,
                ks.p_value >= level ? "pass" : "FAIL");
  outcome.summary.push_back(line);
  std::snprintf(line, sizeof line, "counting bound |2N_even - N_a - N_b| <= 1: %zu violations  %s",
                violations, violations == 0 ? "pass" : "FAIL");
  outcome.summary.push_back(line);
  return outcome;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenvalue counting statistics: exact kernel laws, Monte Carlo and rate diagnostics", "eigmdp"};
  app.require_subcommand(1);

  Common common;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    common.output_dir = env;
  } else {
    common.output_dir = kDefaultOutputDir;
  }

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Master seed")->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--output-dir", common.output_dir, "Directory for JSON/CSV output")->capture_default_str();
    sub->add_option("--tag", common.tag, "Suffix for output file names");
  };

  // Shared flag storage; each subcommand binds the ones it uses.
  std::string kind_name = "gue";
  std::string atom_name = "gaussian";
  std::string sampler_name = "direct";
  std::string method_name = "exact";
  std::string interval_text = "0,inf";
  std::size_t n = 64;
  std::size_t replicas = 1000;
  double p_over_n = 1.0;
  double a = 1.0;
  double eta = 0.5;
  std::uint64_t binomial_k = 0;
  double level = 0.5;
  std::vector<double> xi_grid{-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> theta_grid{-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> sizes_raw{64, 128, 256, 512};
  std::vector<std::size_t> indices;
  std::string variance_text = "1";
  double guard_lower = BulkGuard{}.lower;
  double guard_upper = BulkGuard{}.upper;

  const auto kinds = CLI::IsMember({"gue", "goe", "gse", "wigner-hermitian", "wigner-symmetric", "lue", "covariance"});
  const auto atoms = CLI::IsMember({"gaussian", "rademacher", "matched"});
  const auto samplers = CLI::IsMember({"direct", "interlaced"});

  const auto add_kind = [&](CLI::App* sub) {
    sub->add_option("--kind", kind_name, "Ensemble")->check(kinds)->capture_default_str();
    sub->add_option("--atom", atom_name, "Entry law for Wigner/covariance kinds")->check(atoms)->capture_default_str();
    sub->add_option("--p-over-n", p_over_n, "Aspect ratio p/n for covariance kinds")->capture_default_str();
  };

  std::map<std::string, std::function<Outcome()>> runners;

  auto* sample = app.add_subcommand("sample", "Draw normalized spectra");
  add_common(sample);
  add_kind(sample);
  sample->add_option("--n", n, "Matrix size")->capture_default_str();
  sample->add_option("--replicas", replicas, "Number of matrices")->capture_default_str();
  sample->add_option("--sampler", sampler_name, "GUE sampler")->check(samplers)->capture_default_str();
  runners["sample"] = [&] {
    const auto spec = make_spec(parse_kind(kind_name), n, p_over_n, atom_name, common.seed);
    const auto spectra = map_spectra(spec, replicas, common.threads, parse_sampler(sampler_name),
                                     [](const Spectrum& s) {
                                       return std::vector<double>(s.values().begin(), s.values().end());
                                     });
    Outcome o;
    o.parameters = {{"kind", kind_name}, {"n", n}, {"p", spec.p}, {"atom", atom_name},
                    {"replicas", replicas}, {"sampler", sampler_name}};
    o.payload = {{"scale", "normalized"}, {"eigenvalues", spectra}};
    if (is_wigner_kind(spec.kind)) {
      std::vector<double> ks;
      for (const auto& s : spectra) ks.push_back(ks_one_sample(s, semicircle_cdf).statistic);
      o.payload["semicircle_ks"] = ks;
    }
    char line[120];
    std::snprintf(line, sizeof line, "%zu spectra of size %zu (%s)", spectra.size(), n, kind_name.c_str());
    o.summary.push_back(line);
    return o;
  };

  auto* kernel = app.add_subcommand("kernel-dist", "Exact GUE counting law on an interval");
  add_common(kernel);
  kernel->add_option("--n", n, "Matrix size")->capture_default_str();
  kernel->add_option("--interval", interval_text, "Interval a,b on the normalized scale")->capture_default_str();
  runners["kernel-dist"] = [&] {
    const Interval interval = parse_interval(interval_text);
    const auto restriction = restrict_kernel(n, interval.scaled(std::sqrt(static_cast<double>(n))));
    const auto law = poisson_binomial(restriction.etas);
    Outcome o;
    o.parameters = {{"n", n}, {"interval", interval_json(interval)}};
    const std::vector<double> pmf(law.pmf().begin(), law.pmf().end());
    o.payload = {{"etas", restriction.etas}, {"pmf", pmf}, {"mean", law.mean()}, {"variance", law.variance()}};
    const auto& q = restriction.quadrature;
    o.uncertainty = {{"quadrature",
                      {{"nodes", q.nodes}, {"box", {q.box_lower, q.box_upper}}, {"refinements", q.refinements},
                       {"stabilization_residual", q.stabilization_residual},
                       {"complement_used", q.complement_used}}}};
    CsvTable table{"", {"k", "probability"}, {}};
    for (std::size_t k = 0; k < pmf.size(); ++k) table.rows.push_back({static_cast<double>(k), pmf[k]});
    o.tables.push_back(table);
    char line[160];
    std::snprintf(line, sizeof line, "n = %zu  I = %s  mean = %.10g  variance = %.10g", n,
                  interval.to_string().c_str(), law.mean(), law.variance());
    o.summary.push_back(line);
    return o;
  };

  auto* rate = app.add_subcommand("rate-curve", "Deviation rates against xi^2/2");
  add_common(rate);
  add_kind(rate);
  rate->add_option("--method", method_name, "exact or mc")->check(CLI::IsMember({"exact", "mc"}))->capture_default_str();
  rate->add_option("--n", n, "Matrix size")->capture_default_str();
  rate->add_option("--interval", interval_text, "Interval a,b on the normalized scale")->capture_default_str();
  rate->add_option("--replicas", replicas, "Monte Carlo replicas")->capture_default_str();
  rate->add_option("--a", a, "Deviation scale a_n")->capture_default_str();
  rate->add_option("--xi", xi_grid, "Grid of deviation levels")->delimiter(',')->capture_default_str();
  rate->add_option("--binomial-k", binomial_k, "Exact method: K identical Bernoulli trials instead of GUE");
  rate->add_option("--eta", eta, "Success probability for --binomial-k")->capture_default_str();
  rate->add_option("--sampler", sampler_name, "GUE sampler")->check(samplers)->capture_default_str();
  runners["rate-curve"] = [&] {
    const Interval interval = parse_interval(interval_text);
    Outcome o;
    RateCurve curve;
    if (method_name == "exact") {
      if (binomial_k > 0) {
        const IdenticalBernoulli profile{binomial_k, eta};
        curve = rate_curve_exact(profile, MdpScaling::for_variance(a, profile.variance()), xi_grid);
        o.parameters = {{"method", "exact"}, {"binomial_k", binomial_k}, {"eta", eta}};
        o.payload["regime"] = {{"variance", profile.variance()}};
      } else {
        if (parse_kind(kind_name) != EnsembleKind::gue) {
          throw std::invalid_argument("rate-curve: the exact method is available for GUE only");
        }
        const auto law = counting_law_gue(n, interval);
        curve = rate_curve_exact(law, MdpScaling::for_variance(a, law.variance()), xi_grid);
        o.parameters = {{"method", "exact"}, {"kind", "gue"}, {"n", n}, {"interval", interval_json(interval)}};
        o.payload["regime"] = {{"variance", law.variance()}};
      }
    } else {
      if (binomial_k > 0) throw std::invalid_argument("rate-curve: --binomial-k needs --method exact");
      const auto spec = make_spec(parse_kind(kind_name), n, p_over_n, atom_name, common.seed);
      const auto counts = sample_counts(spec, interval, replicas, common.threads, parse_sampler(sampler_name));
      std::vector<double> values(counts.begin(), counts.end());
      double mean = 0.0, variance = 0.0;
      std::string centering;
      if (spec.kind == EnsembleKind::gue) {
        const auto law = counting_law_gue(n, interval);
        mean = law.mean();
        variance = law.variance();
        centering = "exact-kernel";
      } else {
        const auto m = sample_moments(values);
        mean = m.mean;
        variance = m.variance;
        centering = "sample";
      }
      if (!(variance > 0.0)) throw NumericalError("rate-curve: counts have zero variance");
      const auto scaling = MdpScaling::for_variance(a, variance);
      std::vector<double> standardized;
      for (double c : values) standardized.push_back(standardized_counting(c, mean, variance, MdpScaling(1.0)));
      curve = rate_curve_mc(standardized, scaling, xi_grid);
      o.parameters = {{"method", "mc"}, {"kind", kind_name}, {"atom", atom_name}, {"n", n},
                      {"p", spec.p}, {"interval", interval_json(interval)}, {"replicas", replicas},
                      {"sampler", sampler_name}};
      o.payload["regime"] = {{"variance", variance}, {"centering", centering}};
    }
    o.parameters["a"] = a;
    o.parameters["xi"] = xi_grid;
    const auto scaling_note = MdpScaling::for_variance(a, o.payload["regime"]["variance"].get<double>());
    o.payload["regime"]["satisfiable"] = scaling_note.regime_satisfiable;
    o.payload["regime"]["within_regime"] = scaling_note.within_regime;
    o.payload["curve"] = rate_curve_json(curve);
    o.uncertainty = {{"ci_low", curve.ci_low}, {"ci_high", curve.ci_high}};
    const auto table = rate_curve_table(curve);
    o.tables.push_back(table);
    add_table_summary(o, table);
    if (!scaling_note.regime_satisfiable) {
      o.summary.push_back("note: sqrt(variance) < 10, so 1 << a << sqrt(variance) is not reachable here");
    }
    return o;
  };

  auto* cgf = app.add_subcommand("cgf", "Exact scaled cumulant generating function");
  add_common(cgf);
  cgf->add_option("--n", n, "Matrix size")->capture_default_str();
  cgf->add_option("--interval", interval_text, "Interval a,b on the normalized scale")->capture_default_str();
  cgf->add_option("--a", a, "Deviation scale a_n")->capture_default_str();
  cgf->add_option("--theta", theta_grid, "Grid of theta values")->delimiter(',')->capture_default_str();
  cgf->add_option("--binomial-k", binomial_k, "Use K identical Bernoulli trials instead of GUE");
  cgf->add_option("--eta", eta, "Success probability for --binomial-k")->capture_default_str();
  runners["cgf"] = [&] {
    Outcome o;
    std::vector<double> values;
    if (binomial_k > 0) {
      const IdenticalBernoulli profile{binomial_k, eta};
      for (double theta : theta_grid) values.push_back(exact_cgf(profile, theta, a));
      o.parameters = {{"binomial_k", binomial_k}, {"eta", eta}};
    } else {
      const Interval interval = parse_interval(interval_text);
      const auto law = counting_law_gue(n, interval);
      for (double theta : theta_grid) values.push_back(exact_cgf(law, theta, a));
      o.parameters = {{"n", n}, {"interval", interval_json(interval)}};
    }
    o.parameters["a"] = a;
    o.parameters["theta"] = theta_grid;
    CsvTable table{"", {"theta", "cgf", "target"}, {}};
    std::vector<double> target;
    for (std::size_t j = 0; j < theta_grid.size(); ++j) {
      target.push_back(0.5 * theta_grid[j] * theta_grid[j]);
      table.rows.push_back({theta_grid[j], values[j], target.back()});
    }
    o.payload = {{"theta", theta_grid}, {"cgf", values}, {"target", target}};
    o.tables.push_back(table);
    add_table_summary(o, table);
    return o;
  };

  auto* scan = app.add_subcommand("variance-scan", "Counting variance against log n");
  add_common(scan);
  add_kind(scan);
  scan->add_option("--method", method_name, "exact or mc")->check(CLI::IsMember({"exact", "mc"}))->capture_default_str();
  scan->add_option("--ns", sizes_raw, "Matrix sizes, ascending")->delimiter(',')->capture_default_str();
  scan->add_option("--interval", interval_text, "Interval a,b on the normalized scale")->capture_default_str();
  scan->add_option("--replicas", replicas, "Monte Carlo replicas per size")->capture_default_str();
  scan->add_option("--sampler", sampler_name, "GUE sampler")->check(samplers)->capture_default_str();
  runners["variance-scan"] = [&] {
    VarianceScanConfig config;
    config.ensemble = make_spec(parse_kind(kind_name), 1, p_over_n, atom_name, common.seed);
    config.p_over_n = p_over_n;
    config.sizes = parse_sizes(sizes_raw);
    config.interval = parse_interval(interval_text);
    config.method = method_name == "exact" ? ScanMethod::exact : ScanMethod::monte_carlo;
    config.replicas = replicas;
    config.threads = common.threads;
    config.gue_sampler = parse_sampler(sampler_name);
    const auto result = variance_scan(config);
    Outcome o;
    o.parameters = {{"kind", kind_name}, {"atom", atom_name}, {"method", method_name},
                    {"ns", config.sizes}, {"interval", interval_json(config.interval)},
                    {"p_over_n", p_over_n}};
    if (config.method == ScanMethod::monte_carlo) {
      o.parameters["replicas"] = replicas;
      o.parameters["sampler"] = sampler_name;
    }
    CsvTable table{"", {"n", "mean", "variance"}, {}};
    json rows = json::array();
    json errors = json::array();
    for (const auto& row : result.rows) {
      table.rows.push_back({static_cast<double>(row.n), row.mean, row.variance});
      rows.push_back({{"n", row.n}, {"p", row.p}, {"mean", row.mean}, {"variance", row.variance}});
      errors.push_back({{"n", row.n},
                        {"mean_standard_error", row.mean_standard_error},
                        {"variance_standard_error", row.variance_standard_error}});
    }
    const double target = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
    o.payload = {{"rows", rows}, {"slope", result.slope}, {"intercept", result.intercept},
                 {"reference_slope", target}};
    o.uncertainty = {{"rows", errors}, {"slope_standard_error", result.slope_standard_error}};
    o.tables.push_back(table);
    add_table_summary(o, table);
    char line[160];
    std::snprintf(line, sizeof line, "slope dVar/dlog n = %.6g (+- %.2g), 1/(2 pi^2) = %.6g", result.slope,
                  result.slope_standard_error, target);
    o.summary.push_back(line);
    return o;
  };

  auto* clt = app.add_subcommand("clt-compare", "Z (exact centering) versus Z-hat (semicircle numerics)");
  add_common(clt);
  clt->add_option("--n", n, "Matrix size")->capture_default_str();
  clt->add_option("--interval", interval_text, "Interval a,b on the normalized scale")->capture_default_str();
  clt->add_option("--replicas", replicas, "Monte Carlo replicas")->capture_default_str();
  clt->add_option("--a", a, "Deviation scale a_n")->capture_default_str();
  runners["clt-compare"] = [&] {
    const Interval interval = parse_interval(interval_text);
    const auto c = clt_compare(n, interval, replicas, common.seed, common.threads, MdpScaling(a));
    Outcome o;
    o.parameters = {{"n", n}, {"interval", interval_json(interval)}, {"replicas", replicas}, {"a", a}};
    o.payload = {{"exact_mean", c.exact_mean},
                 {"exact_variance", c.exact_variance},
                 {"numerics_mean", c.numerics_mean},
                 {"numerics_variance", c.numerics_variance},
                 {"z", moments_json(c.z)},
                 {"z_hat", moments_json(c.z_hat)},
                 {"max_difference_within_two_sd", c.max_difference_within_two_sd},
                 {"total_variation", c.total_variation}};
    o.uncertainty = {{"z_mean_standard_error", c.z.mean_standard_error},
                     {"z_hat_mean_standard_error", c.z_hat.mean_standard_error}};
    char line[200];
    std::snprintf(line, sizeof line, "exact mean %.6g var %.6g | numerics mean %.6g var %.6g", c.exact_mean,
                  c.exact_variance, c.numerics_mean, c.numerics_variance);
    o.summary.push_back(line);
    std::snprintf(line, sizeof line, "Z: mean %.4f sd %.4f | Z-hat: mean %.4f sd %.4f | TV %.4f", c.z.mean,
                  std::sqrt(c.z.variance), c.z_hat.mean, std::sqrt(c.z_hat.variance), c.total_variation);
    o.summary.push_back(line);
    return o;
  };

  auto* interlace = app.add_subcommand("interlace-test", "Interlaced versus direct GUE, counting bound");
  add_common(interlace);
  interlace->add_option("--n", n, "Matrix size")->capture_default_str();
  interlace->add_option("--replicas", replicas, "Replicas per sampler")->capture_default_str();
  double ks_level = 0.001;
  interlace->add_option("--level", ks_level, "KS rejection level")->capture_default_str();
  runners["interlace-test"] = [&] { return interlace_test(n, replicas, ks_level, common); };

  auto* eigstat = app.add_subcommand("eigstat", "Bulk eigenvalue statistic sweep");
  add_common(eigstat);
  add_kind(eigstat);
  eigstat->add_option("--n", n, "Matrix size")->capture_default_str();
  eigstat->add_option("--indices", indices, "Eigenvalue indices (default n/2)")->delimiter(',');
  eigstat->add_option("--replicas", replicas, "Monte Carlo replicas")->capture_default_str();
  eigstat->add_option("--a", a, "Deviation scale a_n")->capture_default_str();
  eigstat->add_option("--sampler", sampler_name, "GUE sampler")->check(samplers)->capture_default_str();
  eigstat->add_option("--guard-lower", guard_lower, "Smallest admissible i/n")->capture_default_str();
  eigstat->add_option("--guard-upper", guard_upper, "Largest admissible i/n")->capture_default_str();
  runners["eigstat"] = [&] {
    if (indices.empty()) indices.push_back(n / 2);
    const auto spec = make_spec(parse_kind(kind_name), n, p_over_n, atom_name, common.seed);
    const auto rows = bulk_statistic_sweep(spec, indices, replicas, common.threads, MdpScaling(a),
                                           parse_sampler(sampler_name), BulkGuard{guard_lower, guard_upper});
    Outcome o;
    o.parameters = {{"kind", kind_name}, {"atom", atom_name}, {"n", n}, {"indices", indices},
                    {"replicas", replicas}, {"a", a}, {"sampler", sampler_name},
                    {"guard", {guard_lower, guard_upper}}};
    CsvTable table{"", {"index", "location", "mean", "sd"}, {}};
    json payload_rows = json::array();
    json errors = json::array();
    for (const auto& row : rows) {
      table.rows.push_back({static_cast<double>(row.index), row.location, row.statistic.mean,
                            std::sqrt(row.statistic.variance)});
      payload_rows.push_back({{"index", row.index}, {"location", row.location},
                              {"mean", row.statistic.mean}, {"variance", row.statistic.variance}});
      errors.push_back({{"index", row.index},
                        {"mean_standard_error", row.statistic.mean_standard_error},
                        {"variance_standard_error", row.statistic.variance_standard_error}});
    }
    o.payload = {{"rows", payload_rows}};
    o.uncertainty = {{"rows", errors}};
    o.tables.push_back(table);
    add_table_summary(o, table);
    return o;
  };

  auto* mp = app.add_subcommand("mp-scan", "Covariance counting variance and bulk statistic");
  add_common(mp);
  mp->add_option("--atom", atom_name, "Entry law (gaussian gives LUE)")->check(atoms)->capture_default_str();
  mp->add_option("--p-over-n", p_over_n, "Aspect ratio p/n")->capture_default_str();
  mp->add_option("--ns", sizes_raw, "Matrix sizes, ascending")->delimiter(',')->capture_default_str();
  mp->add_option("--level", level, "Marchenko-Pastur quantile level of the threshold")->capture_default_str();
  mp->add_option("--replicas", replicas, "Monte Carlo replicas per size")->capture_default_str();
  mp->add_option("--a", a, "Deviation scale a_n")->capture_default_str();
  runners["mp-scan"] = [&] {
    const auto kind = atom_name == "gaussian" ? EnsembleKind::lue : EnsembleKind::covariance;
    const auto sizes = parse_sizes(sizes_raw);
    const auto spec = make_spec(kind, sizes.front(), p_over_n, atom_name, common.seed);
    const auto result = covariance_scan(spec, p_over_n, sizes, level, replicas, common.threads, MdpScaling(a));
    Outcome o;
    o.parameters = {{"kind", std::string(to_string(kind))}, {"atom", atom_name}, {"p_over_n", p_over_n},
                    {"ns", sizes}, {"level", level}, {"replicas", replicas}, {"a", a}};
    CsvTable table{"", {"n", "mean", "variance"}, {}};
    json rows = json::array();
    json errors = json::array();
    for (const auto& row : result.rows) {
      table.rows.push_back({static_cast<double>(row.n), row.count.mean, row.count.variance});
      rows.push_back({{"n", row.n}, {"p", row.p}, {"threshold", row.threshold},
                      {"numerics_mean", row.numerics_mean}, {"mean", row.count.mean},
                      {"variance", row.count.variance}, {"index", row.index}, {"location", row.location},
                      {"statistic_mean", row.statistic.mean}, {"statistic_variance", row.statistic.variance}});
      errors.push_back({{"n", row.n},
                        {"mean_standard_error", row.count.mean_standard_error},
                        {"variance_standard_error", row.count.variance_standard_error},
                        {"statistic_mean_standard_error", row.statistic.mean_standard_error}});
    }
    const double target = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
    o.payload = {{"rows", rows}, {"slope", result.slope}, {"intercept", result.intercept},
                 {"reference_slope", target}};
    o.uncertainty = {{"rows", errors}, {"slope_standard_error", result.slope_standard_error}};
    o.tables.push_back(table);
    add_table_summary(o, table);
    char line[160];
    std::snprintf(line, sizeof line, "slope dVar/dlog n = %.6g (+- %.2g), 1/(2 pi^2) = %.6g", result.slope,
                  result.slope_standard_error, target);
    o.summary.push_back(line);
    return o;
  };

  auto* moments = app.add_subcommand("moments", "Exact moment comparison with a Gaussian");
  add_common(moments);
  moments->add_option("--atom", atom_name, "Atom law")->check(atoms)->capture_default_str();
  moments->add_option("--variance", variance_text, "Target variance as an exact rational, e.g. 1/2")
      ->capture_default_str();
  runners["moments"] = [&] {
    Rational target;
    try {
      target = Rational(variance_text);
    } catch (const std::exception&) {
      throw ParseFailure("--variance must be a rational such as 1/2: '" + variance_text + "'");
    }
    if (target <= 0) throw std::invalid_argument("--variance must be positive");
    const auto atom = make_atom(atom_name, static_cast<double>(target));
    const auto report = moment_match_report(atom, target);
    Outcome o;
    o.parameters = {{"atom", atom_name}, {"variance", variance_text}};
    json orders = json::array();
    for (std::size_t k = 0; k < 4; ++k) {
      orders.push_back({{"order", k + 1}, {"atom", report.atom[k].str()},
                        {"gaussian", report.gaussian[k].str()}, {"match", report.matches[k]}});
      char line[160];
      std::snprintf(line, sizeof line, "E X^%zu  atom %-12s gaussian %-12s %s", k + 1,
                    report.atom[k].str().c_str(), report.gaussian[k].str().c_str(),
                    report.matches[k] ? "match" : "DIFFER");
      o.summary.push_back(line);
    }
    o.payload = {{"moments", orders}, {"pass", report.pass}};
    o.summary.push_back(report.pass ? "matched through order 4" : "not matched through order 4");
    return o;
  };

  std::string command;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    command = app.get_subcommands().front()->get_name();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParse;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    Outcome outcome = runners.at(command)();
    const double wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    outcome.parameters["threads"] = common.threads;

    const json record = {{"schema", 1},
                         {"command", command},
                         {"parameters", outcome.parameters},
                         {"seed", common.seed},
                         {"version", EIGMDP_VERSION},
                         {"wall_time", wall_time},
                         {"payload", outcome.payload},
                         {"uncertainty", outcome.uncertainty}};

    const std::filesystem::path dir(common.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create output directory " + dir.string() + ": " + ec.message());
    const std::string stem = command + (common.tag.empty() ? "" : "-" + common.tag);
    const auto json_path = dir / (stem + ".json");
    write_text(json_path, record.dump(2) + "\n");

    for (const auto& line : outcome.summary) out << line << '\n';
    out << "wrote " << json_path.string() << '\n';
    for (const auto& table : outcome.tables) {
      const auto csv_path = dir / (stem + table.suffix + ".csv");
      write_text(csv_path, csv_text(table));
      out << "wrote " << csv_path.string() << '\n';
    }
    return kExitOk;
  } catch (const ParseFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const IoFailure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace eigmdp
