#pragma once
// File formats: JSON for structured results, CSV for paths and tables. Floats
// are written with 17 significant digits unless stated otherwise.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "circnoise/error.hpp"
#include "circnoise/generator_inverse.hpp"
#include "circnoise/mle.hpp"
#include "circnoise/regularity.hpp"
#include "circnoise/spectral_core.hpp"
#include "circnoise/spectrum.hpp"
#include "circnoise/synthesis.hpp"

namespace circnoise::io {

using json = nlohmann::json;

inline std::string format_double(double x, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// x rounded to `digits` significant decimal digits.
inline double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  return std::strtod(format_double(x, digits).c_str(), nullptr);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), Errc::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), Errc::Io, "cannot write " + path);
  out << text;
  detail::require(static_cast<bool>(out), Errc::Io, "write failed for " + path);
}

inline json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(Errc::Io, path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// spectra and kernels
// ---------------------------------------------------------------------------

inline json to_json(const SpectralSequence& seq) {
  return json{{"domain_length", seq.domain_length}, {"coeffs", seq.coeffs}};
}

inline SpectralSequence spectrum_from_json(const json& j) {
  try {
    return SpectralSequence(j.at("coeffs").get<std::vector<double>>(),
                            j.value("domain_length", 1.0));
  } catch (const json::exception& e) {
    throw Error(Errc::Io, std::string("bad spectrum JSON: ") + e.what());
  }
}

/// Kernel from an M x M table on the grid t_i = i L / M, evaluated between grid
/// points by periodic bilinear interpolation.
inline CovarianceKernel kernel_from_table(Eigen::MatrixXd values, double length,
                                          KernelKind kind = KernelKind::Conditioned) {
  const auto M = values.rows();
  detail::require(M >= 2 && values.cols() == M, Errc::InvalidArgument,
                  "kernel table must be square with at least 2 points");
  detail::require(values.allFinite(), Errc::InvalidArgument, "kernel table has non-finite entries");
  const auto table = std::make_shared<const Eigen::MatrixXd>(std::move(values));
  const auto locate = [M, length](double u, Eigen::Index& i0, double& w) {
    double x = u / length;
    x -= std::floor(x);
    x *= static_cast<double>(M);
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-9) x = nearest;
    i0 = static_cast<Eigen::Index>(std::floor(x));
    w = x - static_cast<double>(i0);
    if (i0 >= M) {
      i0 = 0;
      w = 0.0;
    }
  };
  auto interp = [table, locate, M](double s, double t) {
    Eigen::Index i, j;
    double ws, wt;
    locate(s, i, ws);
    locate(t, j, wt);
    const Eigen::Index i1 = (i + 1) % M, j1 = (j + 1) % M;
    const auto& R = *table;
    double v = (1 - ws) * (1 - wt) * R(i, j);
    if (ws != 0.0) v += ws * (1 - wt) * R(i1, j);
    if (wt != 0.0) v += (1 - ws) * wt * R(i, j1);
    if (ws != 0.0 && wt != 0.0) v += ws * wt * R(i1, j1);
    return v;
  };
  if (kind == KernelKind::Stationary) {
    return CovarianceKernel::stationary([interp](double tau) { return interp(0.0, tau); }, length,
                                        Parity::Periodic, static_cast<std::size_t>(M));
  }
  return CovarianceKernel::conditioned(interp, length, Parity::Unspecified,
                                       static_cast<std::size_t>(M));
}

inline json kernel_to_json(const CovarianceKernel& kernel, std::size_t M) {
  const Eigen::MatrixXd R = tabulate(kernel, M);
  json grid = json::array();
  for (std::size_t i = 0; i < M; ++i) {
    grid.push_back(kernel.domain_length() * static_cast<double>(i) / static_cast<double>(M));
  }
  json values = json::array();
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < R.cols(); ++j) row.push_back(R(i, j));
    values.push_back(std::move(row));
  }
  return json{{"kind", kernel.kind() == KernelKind::Stationary ? "stationary" : "conditioned"},
              {"domain_length", kernel.domain_length()},
              {"grid", std::move(grid)},
              {"values", std::move(values)}};
}

inline CovarianceKernel kernel_from_json(const json& j) {
  try {
    const auto rows = j.at("values").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd R(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail::require(rows[i].size() == rows.size(), Errc::InvalidArgument,
                      "kernel table must be square");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
      }
    }
    const KernelKind kind =
        j.value("kind", std::string("conditioned")) == "stationary" ? KernelKind::Stationary
                                                                     : KernelKind::Conditioned;
    return kernel_from_table(std::move(R), j.value("domain_length", 1.0), kind);
  } catch (const json::exception& e) {
    throw Error(Errc::Io, std::string("bad kernel JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace csv {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    detail::require(used == s.size(), Errc::Io, "bad number '" + s + "' in " + where);
    return v;
  } catch (const std::logic_error&) {
    throw Error(Errc::Io, "bad number '" + s + "' in " + where);
  }
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace csv

inline std::string path_to_csv(const SamplePath& path) {
  std::string out = "t,value\n";
  for (std::size_t i = 0; i < path.grid_points(); ++i) {
    out += format_double(path.t(i));
    out += ',';
    out += format_double(path.values[i]);
    out += '\n';
  }
  return out;
}

inline void write_path_csv(const std::string& file, const SamplePath& path) {
  write_text(file, path_to_csv(path));
}

/// Reads a "t,value" CSV. The domain length is N times the grid step unless
/// given explicitly.
inline SamplePath read_path_csv(const std::string& file, double domain_length = 0.0) {
  std::istringstream in(read_text(file));
  std::string line;
  detail::require(static_cast<bool>(std::getline(in, line)), Errc::Io, file + " is empty");
  detail::require(csv::strip_cr(line) == "t,value", Errc::Io,
                             file + ": expected header 't,value'");
  std::vector<double> t, v;
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    detail::require(cells.size() == 2, Errc::Io, file + ": expected two columns");
    t.push_back(csv::parse_double(cells[0], file));
    v.push_back(csv::parse_double(cells[1], file));
  }
  detail::require(v.size() >= 2, Errc::Io, file + ": need at least two samples");
  SamplePath p;
  p.values = std::move(v);
  p.domain_length = domain_length > 0.0 ? domain_length
                                        : (t[1] - t[0]) * static_cast<double>(p.values.size());
  p.model_tag = "csv";
  return p;
}

inline std::string table_to_csv(const std::vector<std::string>& header,
                                const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_double(r[i]);
    }
    out += '\n';
  }
  return out;
}

/// Square numeric CSV (no header) holding a kernel table.
inline Eigen::MatrixXd read_matrix_csv(const std::string& file) {
  std::istringstream in(read_text(file));
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& c : csv::split(line)) row.push_back(csv::parse_double(c, file));
    rows.push_back(std::move(row));
  }
  detail::require(!rows.empty(), Errc::Io, file + " is empty");
  Eigen::MatrixXd R(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail::require(rows[i].size() == rows.front().size(), Errc::Io,
                               file + ": ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return R;
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& R) {
  std::string out;
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    for (Eigen::Index j = 0; j < R.cols(); ++j) {
      if (j) out += ',';
      out += format_double(R(i, j));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// results
// ---------------------------------------------------------------------------

inline json to_json(const GeneratorVerdict& v) {
  const auto& d = v.diagnostics;
  json j{{"decision", to_string(v.decision)},
         {"failed_condition", to_string(v.failed)},
         {"reason", v.reason},
         {"total_variance", v.total_variance},
         {"weights", v.weights},
         {"diagnostics",
          {{"tol", d.tol},
           {"mixed_max", d.mixed_max},
           {"ss_offdiag_max", d.ss_offdiag_max},
           {"ss_min_diag", d.ss_min_diag},
           {"sine_trace", d.sine_trace},
           {"sine_trace_truncated", d.sine_trace_truncated},
           {"trace_margin", d.trace_margin},
           {"cc_residual", d.cc_residual}}}};
  if (v.unique()) j["generator"] = to_json(v.generator);
  return j;
}

inline json to_json(const ExtensionResult& r) {
  json j{{"kind", to_string(r.kind)},
         {"endpoint_residual", r.endpoint_residual},
         {"antiperiodic", to_json(r.antiperiodic)},
         {"periodic", to_json(r.periodic)}};
  if (r.kind != ExtensionKind::None) j["generator"] = to_json(r.generator());
  return j;
}

inline json to_json(const EigenSystem& sys) {
  constexpr int kDigits = 15;
  const auto r = [](double x) { return round_significant(x, kDigits); };
  json sine = json::array(), even = json::array(), multi = json::array();
  for (const auto& p : sys.sine_pairs) sine.push_back({{"value", r(p.value)}, {"frequency", p.frequency}});
  for (const auto& p : sys.even_pairs) {
    json c = json::array();
    for (double x : p.coeffs) c.push_back(r(x));
    even.push_back({{"value", r(p.value)},
                    {"normalized_value", r(p.normalized_value)},
                    {"coeffs", std::move(c)},
                    {"secular_residual", p.secular_residual}});
  }
  for (const auto& p : sys.multiplicity_pairs) {
    json basis = json::array();
    for (const auto& b : p.basis) {
      json c = json::array();
      for (double x : b) c.push_back(r(x));
      basis.push_back(std::move(c));
    }
    multi.push_back({{"value", r(p.value)},
                     {"normalized_value", r(p.normalized_value)},
                     {"support", p.support},
                     {"basis", std::move(basis)}});
  }
  json all = json::array();
  for (double x : sys.eigenvalues()) all.push_back(r(x));
  return json{{"domain_length", sys.domain_length},
              {"variance_scale", sys.variance_scale},
              {"cluster_tol", sys.cluster_tol},
              {"eigenvalues", std::move(all)},
              {"sine_pairs", std::move(sine)},
              {"even_pairs", std::move(even)},
              {"multiplicity_pairs", std::move(multi)}};
}

inline json to_json(const InterlacingReport& rep) {
  return json{{"pass", rep.pass},
              {"multiplicity_branch", rep.multiplicity_branch},
              {"violations", rep.violations}};
}

inline json to_json(const RegularityReport& r) {
  return json{{"decay_exponent", r.decay_exponent},
              {"alpha", r.alpha},
              {"smoothness_order", r.smoothness_order},
              {"beta_sup", r.beta_sup},
              {"r_squared", r.r_squared},
              {"window", {r.window_lo, r.window_hi}},
              {"window_points", r.window_points},
              {"boundary", r.boundary},
              {"no_guarantee", r.no_guarantee},
              {"non_monotone_tail", r.non_monotone_tail}};
}

inline json to_json(const HolderEstimate& h) {
  return json{{"exponent", h.exponent},
              {"r_squared", h.r_squared},
              {"lags", h.lags},
              {"structure", h.structure}};
}

inline json to_json(const AsymptoticScales& s) {
  return json{{"fisher_p", s.fisher_p},
              {"scale_p", s.scale_p},
              {"scale_a", s.scale_a},
              {"efficient_fisher_p", s.efficient_fisher_p},
              {"scale_p_joint", s.scale_p_joint},
              {"predicted_correlation", s.predicted_correlation},
              {"degenerate", s.degenerate}};
}

inline json to_json(const FitResult& f) {
  return json{{"a_hat", f.a_hat},
              {"p_hat", f.p_hat},
              {"score", {f.score_a, f.score_p}},
              {"iterations", f.iterations},
              {"converged", f.converged},
              {"asymptotics", to_json(f.asymptotic)}};
}

}  // namespace circnoise::io
