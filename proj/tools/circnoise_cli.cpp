#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/version.hpp>

#include "circnoise/circnoise.hpp"

namespace fs = std::filesystem;
using namespace circnoise;
using io::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit : int { kOk = 0, kError = 1, kNegative = 2 };

struct Globals {
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string config;
  std::size_t grid = 0;
  std::size_t trunc = 0;
  std::size_t quad = 0;
  double tol = 0.0;
  unsigned threads = 0;
};

/// Collects written files and the outcome for manifest.json.
struct Run {
  std::string command;
  json config = json::object();
  json outputs = json::array();
  fs::path dir;

  std::string file(const std::string& name) {
    outputs.push_back(name);
    return (dir / name).string();
  }
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& cell : io::csv::split(text)) {
    if (cell.empty()) continue;
    out.push_back(io::csv::parse_double(cell, what));
  }
  detail::require(!out.empty(), Errc::InvalidArgument, what + " is empty");
  return out;
}

/// Shortest decimal that round-trips, used in file names.
std::string tag(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

json option_values(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name == "version") continue;
    if (opt->get_expected_min() == 0) {
      j[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    if (!value.empty()) j[name] = value;
  }
  return j;
}

std::vector<std::string> config_to_args(const json& cfg) {
  std::vector<std::string> args;
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
    } else if (value.is_string()) {
      args.push_back("--" + key + "=" + value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      args.push_back("--" + key + "=" + joined);
    } else if (!value.is_null()) {
      args.push_back("--" + key + "=" + value.dump());
    }
  }
  return args;
}

SpectralSequence load_spectrum(const std::string& file) {
  return io::spectrum_from_json(io::read_json(file));
}

void write_json(Run& run, const std::string& name, const json& j) {
  io::write_json(run.file(name), j);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct SynthOpts {
  std::string spectrum;
  double a = 1.0;
  double p = 1.0;
  std::size_t n = 0;
  std::size_t paths = 1;
  bool conditioned = false;
  std::string sweep_p;
  bool fixed_draws = false;
};

int cmd_synth(const Globals& g, const SynthOpts& o, Run& run) {
  if (!o.sweep_p.empty()) {
    detail::require(o.n >= 2, Errc::InvalidArgument, "--sweep-p needs --n >= 2");
    const auto ps = parse_list(o.sweep_p, "--sweep-p");
    const GaussianDraw shared = GaussianDraw::generate(o.n, g.seed);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const PowerLawModel m{o.a, ps[i], o.n};
      const SamplePath path = o.fixed_draws ? sample_model(m, shared)
                                            : sample_model(m, derive_seed(g.seed, i));
      io::write_path_csv(run.file("path_p" + tag(ps[i]) + ".csv"), path);
    }
    return kOk;
  }
  detail::require(o.paths >= 1, Errc::InvalidArgument, "--paths must be >= 1");
  if (!o.spectrum.empty()) {
    const auto seq = load_spectrum(o.spectrum);
    const std::size_t N = g.grid ? g.grid : std::max<std::size_t>(1024, 2 * seq.coeffs.size());
    for (std::size_t r = 0; r < o.paths; ++r) {
      const std::uint64_t s = derive_seed(g.seed, r);
      const SamplePath path = o.conditioned ? sample_H0(seq, N, s) : sample_H(seq, N, s);
      io::write_path_csv(run.file("path_" + std::to_string(r) + ".csv"), path);
    }
    return kOk;
  }
  detail::require(o.n >= 2, Errc::InvalidArgument, "synth needs --spectrum or --n >= 2");
  const PowerLawModel m{o.a, o.p, o.n};
  for (std::size_t r = 0; r < o.paths; ++r) {
    io::write_path_csv(run.file("path_" + std::to_string(r) + ".csv"),
                       sample_model(m, derive_seed(g.seed, r)));
  }
  return kOk;
}

struct ConditionOpts {
  std::string spectrum;
};

int cmd_condition(const Globals& g, const ConditionOpts& o, Run& run) {
  const auto seq = load_spectrum(o.spectrum);
  const auto kernel = condition_at_zero(covariogram_from_coeffs(seq));
  const std::size_t M = g.grid ? g.grid : 64;
  write_json(run, "kernel.json", io::kernel_to_json(kernel, M));
  io::write_text(run.file("kernel.csv"), io::matrix_to_csv(tabulate(kernel, M)));
  return kOk;
}

struct CheckOpts {
  std::string kernel;
  std::string table;
  std::string kernel_json;
  std::string spectrum;
  double length = 1.0;
  bool extension = false;
};

CovarianceKernel load_kernel(const CheckOpts& o) {
  const int given = int(!o.kernel.empty()) + int(!o.table.empty()) + int(!o.kernel_json.empty()) +
                    int(!o.spectrum.empty());
  detail::require(given == 1, Errc::InvalidArgument,
                  "give exactly one of --kernel, --table, --kernel-json, --spectrum");
  if (!o.kernel.empty()) {
    if (o.kernel == "brownian-bridge") return brownian_bridge_kernel();
    if (o.kernel == "zero") return zero_kernel(o.length);
    if (o.kernel == "sin-sin") {
      return CovarianceKernel::conditioned([](double s, double t) {
        return std::sin(2 * std::numbers::pi * s) * std::sin(2 * std::numbers::pi * t);
      });
    }
    throw Error(Errc::InvalidArgument, "unknown kernel '" + o.kernel + "'");
  }
  if (!o.table.empty()) return io::kernel_from_table(io::read_matrix_csv(o.table), o.length);
  if (!o.kernel_json.empty()) return io::kernel_from_json(io::read_json(o.kernel_json));
  return condition_at_zero(covariogram_from_coeffs(load_spectrum(o.spectrum)));
}

int cmd_check(const Globals& g, const CheckOpts& o, Run& run) {
  const auto kernel = load_kernel(o);
  const std::size_t K = g.trunc ? g.trunc : 10;
  if (o.extension) {
    const auto ext = extension_dichotomy(kernel, K, g.quad, g.tol);
    write_json(run, "extension.json", io::to_json(ext));
    std::cout << "extension: " << to_string(ext.kind) << "\n";
    return ext.kind == ExtensionKind::None ? kNegative : kOk;
  }
  const auto verdict = check_generator(fourier_matrices(kernel, K, g.quad), g.tol);
  write_json(run, "verdict.json", io::to_json(verdict));
  std::cout << "verdict: " << to_string(verdict.decision);
  if (verdict.decision == GeneratorDecision::NoGenerator) {
    std::cout << " (" << to_string(verdict.failed) << ")";
  }
  std::cout << "\n";
  return verdict.decision == GeneratorDecision::NoGenerator ? kNegative : kOk;
}

struct SpectrumOpts {
  std::string spectrum;
  double cluster_tol = 0.0;
  std::size_t oracle = 0;
};

int cmd_spectrum(const Globals&, const SpectrumOpts& o, Run& run) {
  const auto seq = load_spectrum(o.spectrum);
  const auto sys = conditioned_spectrum(seq, o.cluster_tol);
  const auto rep = verify_interlacing(sys, seq);
  json j{{"eigensystem", io::to_json(sys)}, {"interlacing", io::to_json(rep)}};
  if (o.oracle > 0) {
    const auto ev = operator_oracle(condition_at_zero(covariogram_from_coeffs(seq)), o.oracle);
    j["oracle"] = ev;
  }
  write_json(run, "spectrum.json", j);
  std::cout << "interlacing: " << (rep.pass ? "pass" : "fail") << "\n";
  detail::require(rep.pass, Errc::NotConverged, "interlacing check failed");
  return kOk;
}

struct RegularityOpts {
  std::string spectrum;
  double a = 1.0;
  double p = 1.0;
  std::size_t paths = 0;
  std::size_t lag_min = 8;
  std::size_t lag_max = 512;
};

int cmd_regularity(const Globals& g, const RegularityOpts& o, Run& run) {
  SpectralSequence seq = [&] {
    if (!o.spectrum.empty()) return load_spectrum(o.spectrum);
    const std::size_t K = g.trunc ? g.trunc : 4095;
    std::vector<double> c(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) c[k] = o.a / std::pow(double(k), o.p);
    return SpectralSequence(std::move(c), 1.0);
  }();
  json j{{"prediction", io::to_json(predict_regularity(seq))}};
  if (o.paths > 0) {
    const std::size_t N = g.grid ? g.grid : 8192;
    std::vector<SamplePath> paths;
    for (std::size_t r = 0; r < o.paths; ++r) paths.push_back(sample_H(seq, N, derive_seed(g.seed, r)));
    const auto lags = dyadic_lags(o.lag_min, o.lag_max);
    const auto est = empirical_holder(paths, lags);
    j["empirical"] = io::to_json(est);
    const auto cov = covariogram_from_coeffs(seq);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < est.lags.size(); ++i) {
      const double h = double(est.lags[i]) / double(N);
      rows.push_back({double(est.lags[i]), h, est.structure[i], structure_function_theory(cov, h)});
    }
    io::write_text(run.file("structure.csv"),
                   io::table_to_csv({"lag", "h", "empirical", "theory"}, rows));
  }
  write_json(run, "regularity.json", j);
  return kOk;
}

struct FitOpts {
  std::string path;
  std::string energies;
  double known_a = 0.0;
  double known_p = NAN;
};

FrequencyEnergies read_energies(const std::string& file) {
  std::istringstream in(io::read_text(file));
  std::string line;
  detail::require(static_cast<bool>(std::getline(in, line)) && io::csv::strip_cr(line) == "k,o",
                  Errc::Io, file + ": expected header 'k,o'");
  std::vector<double> o;
  while (std::getline(in, line)) {
    line = io::csv::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = io::csv::split(line);
    detail::require(cells.size() == 2, Errc::Io, file + ": expected two columns");
    const double k = io::csv::parse_double(cells[0], file);
    detail::require(k == double(o.size() + 1), Errc::Io, file + ": frequencies must run 1..n");
    o.push_back(io::csv::parse_double(cells[1], file));
  }
  return FrequencyEnergies::from_energies(std::move(o));
}

int cmd_fit(const Globals&, const FitOpts& o, Run& run) {
  detail::require(o.path.empty() != o.energies.empty(), Errc::InvalidArgument,
                  "give exactly one of --path, --energies");
  FrequencyEnergies e;
  if (!o.path.empty()) {
    const SamplePath path = io::read_path_csv(o.path, 1.0);
    const std::size_t N = path.grid_points();
    detail::require(N % 2 == 1 && N >= 5, Errc::LengthMismatch,
                    "path must have an odd number (>= 5) of samples");
    e = energies(path, (N - 1) / 2);
  } else {
    e = read_energies(o.energies);
  }
  json j;
  if (!std::isnan(o.known_p)) {
    const double a = fit_known_p(e, o.known_p);
    j = {{"mode", "known_p"}, {"p", o.known_p}, {"a_hat", a},
         {"asymptotics", io::to_json(asymptotics(a, o.known_p, e.n()))}};
  } else if (o.known_a > 0.0) {
    const double p = fit_known_a(e, o.known_a);
    j = {{"mode", "known_a"}, {"a", o.known_a}, {"p_hat", p},
         {"asymptotics", io::to_json(asymptotics(o.known_a, p, e.n()))}};
  } else {
    j = io::to_json(fit_joint(e));
    j["mode"] = "joint";
  }
  j["n"] = e.n();
  write_json(run, "fit.json", j);
  return kOk;
}

struct StudyOpts {
  std::string a = "1";
  std::string p = "1";
  std::size_t n = 40;
  std::size_t replicates = 200;
};

int cmd_study(const Globals& g, const StudyOpts& o, Run& run) {
  const auto as = parse_list(o.a, "--a");
  const auto ps = parse_list(o.p, "--p");
  json cells = json::array();
  std::size_t cell = 0;
  for (double a0 : as) {
    for (double p0 : ps) {
      const PowerLawModel model{a0, p0, o.n};
      const auto fits = simulate_joint_fits(model, o.replicates, derive_seed(g.seed, cell), g.threads);
      std::vector<double> ah, ph;
      for (const auto& f : fits) {
        if (!f.ok) continue;
        ah.push_back(f.a_hat);
        ph.push_back(f.p_hat);
      }
      const std::string table = "study_a" + tag(a0) + "_p" + tag(p0) + ".csv";
      std::string text = "seed,a_hat,p_hat\n";
      for (const auto& f : fits) {
        if (!f.ok) continue;
        text += std::to_string(f.seed) + "," + io::format_double(f.a_hat) + "," +
                io::format_double(f.p_hat) + "\n";
      }
      io::write_text(run.file(table), text);

      const auto asym = asymptotics(model);
      const double psi_n = detail::sum_log(o.n) / double(o.n);
      const double sd_a = a0 * std::sqrt(psi_n * psi_n * asym.scale_p_joint * asym.scale_p_joint +
                                         1.0 / (4.0 * double(o.n)));
      std::size_t cover_a = 0, cover_p = 0;
      for (std::size_t i = 0; i < ah.size(); ++i) {
        cover_a += std::abs(ah[i] - a0) <= 1.959963984540054 * sd_a ? 1 : 0;
        cover_p += std::abs(ph[i] - p0) <= 1.959963984540054 * asym.scale_p_joint ? 1 : 0;
      }
      const double m = double(ah.size());
      json c{{"a", a0},
             {"p", p0},
             {"n", o.n},
             {"seed", derive_seed(g.seed, cell)},
             {"replicates", o.replicates},
             {"succeeded", ah.size()},
             {"failed", o.replicates - ah.size()},
             {"table", table},
             {"predicted_correlation", asym.predicted_correlation},
             {"asymptotic_sd_a", sd_a},
             {"asymptotic_sd_p", asym.scale_p_joint}};
      if (ah.size() >= 2) {
        c["mean_a"] = stats::mean(ah);
        c["mean_p"] = stats::mean(ph);
        c["sd_a"] = std::sqrt(stats::variance(ah));
        c["sd_p"] = std::sqrt(stats::variance(ph));
        c["correlation"] = stats::correlation(ah, ph);
        c["coverage_a"] = double(cover_a) / m;
        c["coverage_p"] = double(cover_p) / m;
      }
      cells.push_back(std::move(c));
      ++cell;
    }
  }
  write_json(run, "summary.json", json{{"nominal_coverage", 0.95}, {"cells", cells}});
  for (const auto& c : cells) {
    if (c.contains("correlation")) {
      std::cout << "a=" << c["a"].get<double>() << " p=" << c["p"].get<double>()
                << " rho=" << c["correlation"].get<double>() << "\n";
    }
  }
  return kOk;
}

int cmd_bridge_demo(const Globals& g, Run& run) {
  const std::size_t K = g.trunc ? g.trunc : 10;
  json rejections = json::array();
  for (std::size_t M : {512u, 1024u, 2048u}) {
    auto v = io::to_json(check_generator(fourier_matrices(brownian_bridge_kernel(), K, M), g.tol));
    v["quadrature_points"] = M;
    rejections.push_back(std::move(v));
  }
  const std::size_t Kext = std::max<std::size_t>(2 * K + 2, 32);
  const std::size_t M = g.quad ? g.quad : 4096;
  const auto ext = extension_dichotomy(brownian_bridge_kernel(), Kext, M, g.tol);
  json coeffs = json::array();
  const auto& c = ext.generator().coeffs;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double expected = k % 2 == 1 ? 1.0 / (std::numbers::pi * double(k)) : 0.0;
    coeffs.push_back({{"k", k}, {"recovered", c[k]}, {"closed_form", expected}});
  }
  write_json(run, "bridge.json",
             json{{"direct_checks", rejections}, {"extension", io::to_json(ext)}, {"coefficients", coeffs}});
  std::cout << "direct: " << rejections[0]["decision"].get<std::string>()
            << ", extension: " << to_string(ext.kind) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

/// Rewrites argv so that values from a --config JSON (a flat object of option
/// names, or a manifest with "command" and "config") come before the user's
/// own arguments; TakeLast then lets the command line win.
std::vector<std::string> expand_config(int argc, char** argv, const std::vector<std::string>& commands) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_file = args[i + 1];
      args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_file = args[i].substr(9);
      args.erase(args.begin() + long(i));
      break;
    }
  }
  if (config_file.empty()) return args;

  json cfg = io::read_json(config_file);
  std::string command;
  if (cfg.contains("command") && cfg.contains("config")) {
    command = cfg["command"].get<std::string>();
    cfg = cfg["config"];
  }
  detail::require(cfg.is_object(), Errc::Io, config_file + ": config must be a JSON object");
  auto pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
    return std::find(commands.begin(), commands.end(), a) != commands.end();
  });
  if (pos != args.end()) {
    command = *pos;
    args.erase(pos);
  }
  detail::require(!command.empty(), Errc::InvalidArgument, "no subcommand given");
  std::vector<std::string> out{command};
  for (auto& a : config_to_args(cfg)) out.push_back(std::move(a));
  out.insert(out.end(), args.begin(), args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian periodic noise on the circle: synthesis, conditioning, generator tests, "
               "conditioned spectra, regularity and power-law fitting."};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Globals g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file or a previous manifest.json");
  app.add_option("--grid", g.grid, "grid points N (0 = command default)")->capture_default_str();
  app.add_option("--trunc", g.trunc, "truncation K (0 = command default)")->capture_default_str();
  app.add_option("--quad", g.quad, "quadrature points M (0 = automatic)")->capture_default_str();
  app.add_option("--tol", g.tol, "decision tolerance (0 = automatic)")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for study (0 = all cores)")
      ->capture_default_str();

  SynthOpts so;
  auto* synth = app.add_subcommand("synth", "sample paths from a spectrum or the power-law model");
  synth->add_option("--spectrum", so.spectrum, "spectrum JSON {domain_length, coeffs}");
  synth->add_option("--a", so.a, "model amplitude")->capture_default_str();
  synth->add_option("--p", so.p, "model exponent")->capture_default_str();
  synth->add_option("--n", so.n, "model frequencies")->capture_default_str();
  synth->add_option("--paths", so.paths, "number of paths")->capture_default_str();
  synth->add_flag("--conditioned", so.conditioned, "condition paths at t = 0");
  synth->add_option("--sweep-p", so.sweep_p, "comma separated exponents");
  synth->add_flag("--fixed-draws", so.fixed_draws, "share one Gaussian draw across the sweep");

  ConditionOpts co;
  auto* condition = app.add_subcommand("condition", "tabulate the kernel conditioned at t = 0");
  condition->add_option("--spectrum", co.spectrum, "spectrum JSON")->required();

  CheckOpts ko;
  auto* check = app.add_subcommand("check", "generator test or extension dichotomy");
  check->add_option("--kernel", ko.kernel, "brownian-bridge | sin-sin | zero");
  check->add_option("--table", ko.table, "square CSV kernel table on t_i = i L / M");
  check->add_option("--kernel-json", ko.kernel_json, "kernel JSON written by condition");
  check->add_option("--spectrum", ko.spectrum, "spectrum JSON; conditioned kernel is checked");
  check->add_option("--length", ko.length, "domain length for --table / zero")->capture_default_str();
  check->add_flag("--extension", ko.extension, "run the double-domain extension dichotomy");

  SpectrumOpts po;
  auto* spectrum = app.add_subcommand("spectrum", "eigenpairs of the conditioned operator");
  spectrum->add_option("--spectrum", po.spectrum, "spectrum JSON")->required();
  spectrum->add_option("--cluster-tol", po.cluster_tol, "variance clustering tolerance")
      ->capture_default_str();
  spectrum->add_option("--oracle", po.oracle, "also discretize the operator on this many points")
      ->capture_default_str();

  RegularityOpts ro;
  auto* regularity = app.add_subcommand("regularity", "Hoelder prediction and empirical check");
  regularity->add_option("--spectrum", ro.spectrum, "spectrum JSON (default: power law)");
  regularity->add_option("--a", ro.a, "power-law amplitude")->capture_default_str();
  regularity->add_option("--p", ro.p, "power-law exponent")->capture_default_str();
  regularity->add_option("--paths", ro.paths, "paths for the empirical estimate")->capture_default_str();
  regularity->add_option("--lag-min", ro.lag_min, "smallest lag")->capture_default_str();
  regularity->add_option("--lag-max", ro.lag_max, "largest lag")->capture_default_str();

  FitOpts fo;
  auto* fit = app.add_subcommand("fit", "maximum likelihood fit of the power-law model");
  fit->add_option("--path", fo.path, "path CSV with header t,value and 2n+1 rows");
  fit->add_option("--energies", fo.energies, "energies CSV with header k,o");
  fit->add_option("--known-a", fo.known_a, "fit p with this amplitude");
  fit->add_option("--known-p", fo.known_p, "fit a with this exponent");

  StudyOpts to;
  auto* study = app.add_subcommand("study", "Monte Carlo study of the joint fit");
  study->add_option("--a", to.a, "comma separated amplitudes")->capture_default_str();
  study->add_option("--p", to.p, "comma separated exponents")->capture_default_str();
  study->add_option("--n", to.n, "model frequencies")->capture_default_str();
  study->add_option("--replicates", to.replicates, "replicates per cell")->capture_default_str();

  auto* bridge = app.add_subcommand("bridge-demo", "Brownian bridge: direct rejection and extension");

  std::vector<std::string> names;
  for (const auto* sc : app.get_subcommands({})) names.push_back(sc->get_name());

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv, names);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run;
  run.command = sub->get_name();
  run.config = option_values(app);
  const json sub_config = option_values(*sub);
  for (const auto& [k, v] : sub_config.items()) run.config[k] = v;
  run.dir = g.out;

  int code = kOk;
  std::string error;
  try {
    fs::create_directories(run.dir);
    if (sub == synth) code = cmd_synth(g, so, run);
    else if (sub == condition) code = cmd_condition(g, co, run);
    else if (sub == check) code = cmd_check(g, ko, run);
    else if (sub == spectrum) code = cmd_spectrum(g, po, run);
    else if (sub == regularity) code = cmd_regularity(g, ro, run);
    else if (sub == fit) code = cmd_fit(g, fo, run);
    else if (sub == study) code = cmd_study(g, to, run);
    else if (sub == bridge) code = cmd_bridge_demo(g, run);
  } catch (const Error& e) {
    code = kError;
    error = e.what();
  } catch (const std::exception& e) {
    code = kError;
    error = e.what();
  }

  json manifest{{"command", run.command},
                {"config", run.config},
                {"seed", g.seed},
                {"rng", std::string(kRngName)},
                {"versions",
                 {{"circnoise", kVersion},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"boost", BOOST_LIB_VERSION},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                  {"cli11", CLI11_VERSION}}},
                {"status", code == kError ? "failed" : "ok"},
                {"exit_code", code},
                {"outputs", run.outputs}};
  if (!error.empty()) manifest["error"] = error;
  try {
    fs::create_directories(run.dir);
    io::write_json((run.dir / "manifest.json").string(), manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: could not write manifest: " << e.what() << "\n";
    return kError;
  }
  if (!error.empty()) std::cerr << "error: " << error << "\n";
  return code;
}
