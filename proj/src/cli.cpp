#include "adiabatic/cli.hpp"

#include "adiabatic/bounds.hpp"
#include "adiabatic/engine.hpp"
#include "adiabatic/errors.hpp"
#include "adiabatic/glauber.hpp"
#include "adiabatic/io.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>

namespace adiabatic::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

const std::vector<std::string> kCommands = {"mixing-time", "adiabatic-time", "glauber-run",
                                            "verify-bounds", "fit-scaling", "trajectory"};

std::string git_blob_sha1(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 0xf];
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

long parse_long(const std::string& s) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

Eigen::MatrixXd shift_initial(long n, bool continuous) {
  const auto dim = n + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (long i = 0; i < dim; ++i) {
    if (!continuous) {
      m(i, 0) = 1.0;
    } else if (i > 0) {
      m(i, 0) = 1.0;
      m(i, i) = -1.0;
    }
  }
  return m;
}

Eigen::MatrixXd shift_final(long n, bool continuous) {
  const auto dim = n + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (long i = 0; i < n; ++i) {
    m(i, i + 1) = 1.0;
    if (continuous) m(i, i) = -1.0;
  }
  if (!continuous) m(n, n) = 1.0;
  return m;
}

}  // namespace

std::optional<long> example_size(const std::string& name) {
  static const std::regex pattern(R"(^\s*([a-z-]+)\s*\(([^)]*)\)\s*$)");
  std::smatch m;
  if (!std::regex_match(name, m, pattern)) return std::nullopt;
  const auto args = split_args(m[2]);
  if (args.empty() || args[0].empty()) return std::nullopt;
  return parse_long(args[0]);
}

AdiabaticSpec builtin_example(const std::string& name, const std::optional<Schedule>& schedule) {
  static const std::regex pattern(R"(^\s*([a-z-]+)\s*\(([^)]*)\)\s*$)");
  std::smatch m;
  if (!std::regex_match(name, m, pattern)) throw ConfigError("unknown example '" + name + "'");
  const std::string kind = m[1];
  const auto args = split_args(m[2]);
  const ScheduleFamily family(schedule.value_or(Schedule::linear()));
  if (kind == "shift-discrete" || kind == "shift-continuous") {
    if (args.size() != 1) throw ConfigError(kind + " takes one argument n");
    const long n = parse_long(args[0]);
    if (n < 1 || n > 4095) throw ConfigError(kind + ": n must be in [1, 4095]");
    if (kind == "shift-discrete") {
      return AdiabaticSpec::discrete(StochasticMatrix(shift_initial(n, false)),
                                     StochasticMatrix(shift_final(n, false)), family);
    }
    return AdiabaticSpec::continuous(Generator(shift_initial(n, true)),
                                     Generator(shift_final(n, true)), family, RateBound(1.0));
  }
  if (kind == "glauber-torus") {
    if (args.size() != 4) throw ConfigError("glauber-torus takes (n, d, beta1, beta2)");
    const TorusLattice lattice(static_cast<int>(parse_long(args[0])),
                               static_cast<int>(parse_long(args[1])));
    return build_adiabatic_glauber_spec(lattice, parse_double(args[2]), parse_double(args[3])).spec;
  }
  throw ConfigError("unknown example '" + name + "'");
}

namespace {

struct Context {
  std::string command;
  fs::path config_path;
  json config;
  fs::path out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<fs::path> inputs;
  std::vector<std::string> artifacts;
  std::string status = "ok";
  std::ostream* out = nullptr;

  fs::path artifact(const std::string& name) {
    artifacts.push_back(name);
    return out_dir / name;
  }
};

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

void check_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ConfigError("epsilon must lie in (0,1), got " + io::format_double(eps));
  }
}

std::vector<double> epsilons(const json& config) {
  std::vector<double> out;
  if (config.contains("epsilons")) {
    out = require<std::vector<double>>(config, "epsilons");
  } else if (config.contains("epsilon") && config.at("epsilon").is_array()) {
    out = require<std::vector<double>>(config, "epsilon");
  } else {
    out.push_back(require<double>(config, "epsilon"));
  }
  if (out.empty()) throw ConfigError("no epsilon given");
  for (double e : out) check_epsilon(e);
  return out;
}

json matrix_source(Context& ctx, const json& value) {
  if (value.is_string()) {
    fs::path p = value.get<std::string>();
    if (p.is_relative()) p = ctx.config_path.parent_path() / p;
    ctx.inputs.push_back(p);
    return io::load_json_file(p);
  }
  return value;
}

std::optional<Schedule> schedule_option(const json& config) {
  if (!config.contains("schedule")) return std::nullopt;
  return io::schedule_from_json(config.at("schedule"));
}

struct LoadedSpec {
  AdiabaticSpec spec;
  long size;
};

LoadedSpec load_spec(Context& ctx) {
  const json& c = ctx.config;
  if (c.contains("example")) {
    const auto name = require<std::string>(c, "example");
    auto spec = builtin_example(name, schedule_option(c));
    return {spec, example_size(name).value_or(static_cast<long>(spec.dim()))};
  }
  if (c.contains("torus")) {
    const auto t = io::torus_from_json(c.at("torus"));
    const TorusLattice lattice(t.n, t.d);
    auto g = build_adiabatic_glauber_spec(lattice, t.beta1, t.beta2, t.per_site_rate);
    return {g.spec, t.n};
  }
  const auto mode = require<std::string>(c, "mode");
  if (!c.contains("initial") || !c.contains("final")) {
    throw ConfigError("spec needs 'example', 'torus', or 'initial' and 'final'");
  }
  const json a = matrix_source(ctx, c.at("initial"));
  const json b = matrix_source(ctx, c.at("final"));
  const ScheduleFamily family(schedule_option(c).value_or(Schedule::linear()));
  if (mode == "discrete") {
    auto spec = AdiabaticSpec::discrete(io::kernel_from_json(a), io::kernel_from_json(b), family);
    return {spec, static_cast<long>(spec.dim())};
  }
  if (mode == "continuous") {
    Generator qa = io::generator_from_json(a);
    Generator qb = io::generator_from_json(b);
    auto spec = c.contains("lambda")
                    ? AdiabaticSpec::continuous(qa, qb, family, RateBound(require<double>(c, "lambda")))
                    : AdiabaticSpec::continuous(qa, qb, family);
    return {spec, static_cast<long>(spec.dim())};
  }
  throw ConfigError("mode must be 'discrete' or 'continuous'");
}

SearchOptions search_options(const json& config) {
  SearchOptions o;
  const json s = config.value("search", json::object());
  o.tol = get_or<double>(s, "tol", o.tol);
  o.max_horizon = get_or<double>(s, "max_horizon", o.max_horizon);
  o.max_evaluations = get_or<std::size_t>(s, "max_evaluations", o.max_evaluations);
  o.rel_precision = get_or<double>(s, "rel_precision", o.rel_precision);
  if (!(o.tol > 0.0) || !(o.rel_precision > 0.0) || o.max_evaluations == 0) {
    throw ConfigError("search options must be positive");
  }
  return o;
}

const std::vector<std::string> kSearchHeader = {"n", "epsilon", "T", "worst_case_tv", "flag"};

std::vector<std::string> search_row(long n, const SearchReport& r) {
  return {std::to_string(n), io::format_double(r.epsilon), io::format_double(r.measured_time),
          io::format_double(r.worst_case_tv), r.monotonicity_flag ? "1" : "0"};
}

using Runner = std::function<void(Context&)>;

Runner plan_mixing_time(Context& ctx) {
  const json& c = ctx.config;
  const auto eps = epsilons(c);
  std::optional<StochasticMatrix> kernel;
  std::optional<Generator> generator;
  MixingOptions opts;
  if (c.contains("example")) {
    const auto spec = builtin_example(require<std::string>(c, "example"));
    if (spec.mode() == Mode::discrete) {
      kernel = spec.final_kernel();
    } else {
      generator = spec.final_generator();
      opts.lambda = spec.rate_bound();
    }
  } else {
    const auto mode = require<std::string>(c, "mode");
    const json k = matrix_source(ctx, c.contains("kernel") ? c.at("kernel") : json());
    if (mode == "discrete") {
      kernel = io::kernel_from_json(k);
    } else if (mode == "continuous") {
      generator = io::generator_from_json(k);
    } else {
      throw ConfigError("mode must be 'discrete' or 'continuous'");
    }
  }
  if (c.contains("lambda")) opts.lambda = RateBound(require<double>(c, "lambda"));
  if (c.contains("time_grid")) opts.time_grid = require<double>(c, "time_grid");
  return [=](Context& run) {
    io::CsvWriter csv(run.artifact("mixing.csv"), {"epsilon", "t_mix"});
    for (double e : eps) {
      const double t = kernel ? static_cast<double>(mixing_time(*kernel, e, opts))
                              : mixing_time(*generator, e, opts);
      csv.row({io::format_double(e), io::format_double(t)});
      *run.out << "epsilon " << e << ": t_mix = " << t << '\n';
    }
  };
}

Runner plan_adiabatic_time(Context& ctx) {
  const auto eps = epsilons(ctx.config);
  const auto loaded = load_spec(ctx);
  const auto opts = search_options(ctx.config);
  return [=](Context& run) {
    io::CsvWriter csv(run.artifact("searches.csv"), kSearchHeader);
    io::CsvWriter probes(run.artifact("probes.csv"), {"epsilon", "T", "worst_case_tv"});
    for (double e : eps) {
      SearchReport r;
      try {
        r = adiabatic_time(loaded.spec, e, opts);
      } catch (const SearchTimeoutError&) {
        run.status = "partial";
        throw;
      }
      csv.row(search_row(loaded.size, r));
      for (const auto& p : r.probes) {
        probes.row({io::format_double(e), io::format_double(p.horizon),
                    io::format_double(p.worst_case_tv)});
      }
      *run.out << "epsilon " << e << ": T = " << r.measured_time
               << " (worst-case TV " << r.worst_case_tv << ", " << r.evaluations
               << " evaluations" << (r.monotonicity_flag ? ", non-monotone" : "") << ")\n";
    }
  };
}

Runner plan_glauber_run(Context& ctx) {
  const json& c = ctx.config;
  if (!c.contains("torus")) throw ConfigError("glauber-run needs a 'torus' object");
  const auto t = io::torus_from_json(c.at("torus"));
  const double eps = require<double>(c, "epsilon");
  check_epsilon(eps);
  const auto paths = get_or<std::size_t>(c, "paths", 0);
  const auto opts = search_options(c);
  const TorusLattice lattice(t.n, t.d);
  const auto built = build_adiabatic_glauber_spec(lattice, t.beta1, t.beta2, t.per_site_rate);
  return [=](Context& run) {
    const auto& spec = built.spec;
    const SearchReport r = adiabatic_time(spec, eps, opts);
    io::CsvWriter csv(run.artifact("searches.csv"), kSearchHeader);
    csv.row(search_row(t.n, r));
    const EvolutionResult ev = worst_case_evolution(spec, r.measured_time, opts.tol);
    std::vector<std::uint64_t> counts;
    if (paths > 0) {
      counts = sample_final_counts(spec, r.measured_time, paths, run.seed, ev.worst_start,
                                   run.threads);
    }
    io::CsvWriter dist(run.artifact("distribution.csv"),
                       {"state", "bitstring", "exact", "empirical", "stationary"});
    double mc_tv = 0.0;
    for (std::size_t x = 0; x < spec.dim(); ++x) {
      const double exact = ev.final_distribution[x];
      const double emp = paths > 0 ? static_cast<double>(counts[x]) / static_cast<double>(paths) : 0.0;
      mc_tv += 0.5 * std::abs(exact - emp);
      dist.row({std::to_string(x), SpinConfig::from_index(x, lattice.sites()).bitstring(),
                io::format_double(exact), paths > 0 ? io::format_double(emp) : "",
                io::format_double(spec.final_stationary()[x])});
    }
    *run.out << "T = " << r.measured_time << ", worst-case TV " << r.worst_case_tv
             << " from state " << ev.worst_start << '\n';
    if (paths > 0) {
      io::CsvWriter mc(run.artifact("monte_carlo.csv"),
                       {"paths", "start", "T", "tv_to_exact", "threshold"});
      const double threshold = 4.0 / std::sqrt(static_cast<double>(paths));
      mc.row({std::to_string(paths), std::to_string(ev.worst_start),
              io::format_double(r.measured_time), io::format_double(mc_tv),
              io::format_double(threshold)});
      *run.out << "Monte Carlo TV to exact: " << mc_tv << " (4/sqrt(N) = " << threshold << ")\n";
    }
  };
}

Runner plan_verify_bounds(Context& ctx) {
  const json& c = ctx.config;
  const double eps = require<double>(c, "epsilon");
  check_epsilon(eps);
  const double t_mix = get_or<double>(c, "t_mix", 10.0);
  const int m = get_or<int>(c, "m", 1);
  const double lambda = get_or<double>(c, "lambda", 1.0);
  const double prefactor = get_or<double>(c, "prefactor", 1.0);
  const auto n = c.contains("n") ? std::optional<long>(require<long>(c, "n")) : std::nullopt;
  const auto T = c.contains("T") ? std::optional<long>(require<long>(c, "T")) : std::nullopt;
  std::optional<io::TorusConfig> torus;
  if (c.contains("torus")) torus = io::torus_from_json(c.at("torus"));
  if (!(t_mix > 0.0) || m < 1 || !(lambda > 0.0) || !(prefactor > 0.0)) {
    throw ConfigError("t_mix, m, lambda and prefactor must be positive");
  }
  return [=](Context& run) {
    std::vector<BoundReport> reports = {
        discrete_adiabatic_bound(t_mix, eps, m, prefactor),
        continuous_adiabatic_bound(t_mix, eps, m, lambda, prefactor),
        kovchegov_continuous_explicit(t_mix, eps, lambda),
    };
    if (n && T) {
      const double nd = static_cast<double>(*n);
      const double Td = static_cast<double>(*T);
      reports.push_back({"shift_lower_exact", shift_example_lower_bound(*n, *T, true),
                         BoundKind::lower, {{"n", nd}, {"T", Td}}, ""});
      reports.push_back({"shift_lower_relaxed", shift_example_lower_bound(*n, *T, false),
                         BoundKind::lower, {{"n", nd}, {"T", Td}}, ""});
    }
    if (n) {
      reports.push_back({"shift_horizon", shift_example_horizon(*n, eps), BoundKind::lower,
                         {{"n", static_cast<double>(*n)}, {"epsilon", eps}},
                         eps > 0.3 ? "epsilon > 0.3: the approximation epsilon ~ -log(1-epsilon) "
                                     "is not valid here"
                                   : ""});
    }
    if (torus) {
      reports.push_back(torus_adiabatic_bound(torus->n, torus->d, eps, torus->beta1, torus->beta2,
                                              false, prefactor));
      reports.push_back(torus_adiabatic_bound(torus->n, torus->d, eps, torus->beta1, torus->beta2,
                                              true, prefactor));
    }
    io::CsvWriter csv(run.artifact("bounds.csv"),
                      {"bound_name", "parameters", "value", "kind", "notes"});
    for (const auto& r : reports) {
      csv.row({r.name, r.parameter_string(), io::format_double(r.value), to_string(r.kind), r.notes});
      *run.out << r.name << " = " << r.value << '\n';
    }
  };
}

Runner plan_fit_scaling(Context& ctx) {
  const json& c = ctx.config;
  const auto base = require<std::string>(c, "example");
  if (base != "shift-discrete" && base != "shift-continuous") {
    throw ConfigError("fit-scaling supports 'shift-discrete' and 'shift-continuous'");
  }
  const auto schedule = schedule_option(c);
  const auto opts = search_options(c);
  std::vector<long> sizes;
  std::vector<double> eps;
  bool versus_epsilon = false;
  if (c.contains("sizes")) {
    sizes = require<std::vector<long>>(c, "sizes");
    eps = {require<double>(c, "epsilon")};
  } else {
    sizes = {require<long>(c, "n")};
    eps = require<std::vector<double>>(c, "epsilons");
    versus_epsilon = true;
  }
  for (double e : eps) check_epsilon(e);
  if (sizes.size() * eps.size() < 3) throw ConfigError("fit-scaling needs at least 3 samples");
  std::vector<std::pair<long, AdiabaticSpec>> specs;
  for (long n : sizes) {
    specs.emplace_back(n, builtin_example(base + "(" + std::to_string(n) + ")", schedule));
  }
  return [=](Context& run) {
    io::CsvWriter csv(run.artifact("searches.csv"), kSearchHeader);
    std::vector<std::array<double, 2>> samples;
    for (const auto& [n, spec] : specs) {
      for (double e : eps) {
        const SearchReport r = adiabatic_time(spec, e, opts);
        csv.row(search_row(n, r));
        samples.push_back({versus_epsilon ? e : static_cast<double>(n), r.measured_time});
      }
    }
    const ScalingFit fit = fit_scaling_exponent(samples);
    io::CsvWriter out(run.artifact("fit.csv"), {"variable", "exponent", "log_prefactor", "r_squared"});
    out.row({versus_epsilon ? "epsilon" : "n", io::format_double(fit.exponent),
             io::format_double(fit.log_prefactor), io::format_double(fit.r_squared)});
    *run.out << "exponent " << fit.exponent << " (r^2 " << fit.r_squared << ")\n";
  };
}

Runner plan_trajectory(Context& ctx) {
  const auto loaded = load_spec(ctx);
  const double T = require<double>(ctx.config, "T");
  const auto grid = get_or<std::size_t>(ctx.config, "grid_points", 101);
  const double tol = get_or<double>(ctx.config, "tol", 1e-8);
  if (!(T > 0.0) || grid < 2 || !(tol > 0.0)) throw ConfigError("need T > 0, grid_points >= 2, tol > 0");
  return [=](Context& run) {
    const auto profile = trajectory_deviation(loaded.spec, T, grid, tol);
    io::CsvWriter csv(run.artifact("profile.csv"), {"t", "deviation"});
    for (std::size_t k = 0; k < profile.times.size(); ++k) {
      csv.row({io::format_double(profile.times[k]), io::format_double(profile.deviation[k])});
    }
    *run.out << "sup deviation " << profile.sup_deviation << '\n';
  };
}

Runner plan(Context& ctx) {
  if (ctx.command == "mixing-time") return plan_mixing_time(ctx);
  if (ctx.command == "adiabatic-time") return plan_adiabatic_time(ctx);
  if (ctx.command == "glauber-run") return plan_glauber_run(ctx);
  if (ctx.command == "verify-bounds") return plan_verify_bounds(ctx);
  if (ctx.command == "fit-scaling") return plan_fit_scaling(ctx);
  if (ctx.command == "trajectory") return plan_trajectory(ctx);
  throw ConfigError("unknown command '" + ctx.command + "'");
}

void write_manifest(Context& ctx, double seconds) {
  json inputs = json::array();
  inputs.push_back({{"path", ctx.config_path.string()},
                    {"sha1", git_blob_sha1(read_file(ctx.config_path))}});
  for (const auto& p : ctx.inputs) {
    inputs.push_back({{"path", p.string()}, {"sha1", git_blob_sha1(read_file(p))}});
  }
  std::string combined;
  for (const auto& i : inputs) combined += i["sha1"].get<std::string>() + "\n";
  json manifest = {{"command", ctx.command},
                   {"config", ctx.config},
                   {"seed", ctx.seed},
                   {"inputs", inputs},
                   {"input_hash", git_blob_sha1(combined)},
                   {"duration_seconds", seconds},
                   {"artifacts", ctx.artifacts},
                   {"status", ctx.status}};
  std::ofstream out(ctx.out_dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

std::string usage() {
  std::string s = "usage: adiabatic <command> --config <path.json> [--out <dir>] [--seed <int>]\n"
                  "commands:";
  for (const auto& c : kCommands) s += " " + c;
  return s + "\n";
}

unsigned thread_count() {
  if (const char* env = std::getenv("ADIABATIC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return kExitConfig;
  }
  if (args[0] == "--help" || args[0] == "-h") {
    out << usage();
    return kExitOk;
  }
  Context ctx;
  ctx.out = &out;
  ctx.command = args[0];
  if (std::find(kCommands.begin(), kCommands.end(), ctx.command) == kCommands.end()) {
    err << "unknown command '" << ctx.command << "'\n" << usage();
    return kExitConfig;
  }

  CLI::App app{"adiabatic " + ctx.command};
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "experiment configuration (JSON)")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  try {
    std::vector<std::string> rest(args.begin() + 1, args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help() << usage();
      return kExitOk;
    }
    err << e.what() << '\n' << usage();
    return kExitConfig;
  }

  const auto started = std::chrono::steady_clock::now();
  Runner runner;
  try {
    ctx.config_path = config_path;
    ctx.config = io::load_json_file(ctx.config_path);
    if (!ctx.config.is_object()) throw ConfigError("configuration must be a JSON object");
    ctx.seed = seed.value_or(get_or<std::uint64_t>(ctx.config, "seed", 0));
    ctx.out_dir = out_dir;
    ctx.threads = thread_count();
    runner = plan(ctx);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionMismatch& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }

  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) {
    err << "cannot create output directory " << ctx.out_dir << ": " << ec.message() << '\n';
    return kExitConfig;
  }
  int code = kExitOk;
  try {
    runner(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (ctx.status == "ok") ctx.status = "failed";
    code = kExitDomain;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  ctx.artifacts.push_back("manifest.json");
  write_manifest(ctx, seconds);
  return code;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace adiabatic::cli
