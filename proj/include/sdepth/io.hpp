#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdepth/approx.hpp"
#include "sdepth/core.hpp"
#include "sdepth/exact2d.hpp"
#include "sdepth/exactnd.hpp"
#include "sdepth/oracle.hpp"

namespace sdepth {

// ===== Dataset and matrix ingestion =====
//
// Text format: one point per row, fields separated by commas and/or
// whitespace, '#' starts a comment, and a non-numeric first row is treated as
// a header. Numbers parse locale-independently.

namespace io_detail {

inline bool parse_double(const std::string& token, double& out) {
  const char* first = token.data();
  const char* last = first + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!current.empty()) {
        fields.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) {
    fields.push_back(std::move(current));
  }
  return fields;
}

}  // namespace io_detail

inline std::vector<Vector> read_dataset(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw IoError("cannot open '" + path + "'");
  }
  std::vector<Vector> rows;
  std::string line;
  int line_no = 0;
  bool saw_candidate = false;
  while (std::getline(file, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    const std::vector<std::string> fields = io_detail::split_fields(line);
    if (fields.empty()) {
      continue;
    }
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!io_detail::parse_double(fields[j], values[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (!saw_candidate) {
        // Header row.
        saw_candidate = true;
        continue;
      }
      throw ParseError("line " + std::to_string(line_no) + " of '" + path +
                       "': non-numeric field");
    }
    saw_candidate = true;
    if (!rows.empty() && static_cast<std::size_t>(rows.front().size()) != values.size()) {
      throw RaggedRowsError("line " + std::to_string(line_no) + " of '" + path + "': expected " +
                            std::to_string(rows.front().size()) + " fields, found " +
                            std::to_string(values.size()));
    }
    rows.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  if (rows.empty()) {
    throw EmptyDatasetError("'" + path + "' contains no data rows");
  }
  return rows;
}

// Writes rows at full round-trip precision.
inline void write_dataset(const std::string& path, const std::vector<Vector>& rows) {
  std::ofstream file(path);
  if (!file) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  file << std::setprecision(17);
  for (const Vector& r : rows) {
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      file << (j ? "," : "") << r(j);
    }
    file << "\n";
  }
  if (!file) {
    throw IoError("failed writing '" + path + "'");
  }
}

inline Matrix read_matrix(const std::string& path) {
  const std::vector<Vector> rows = read_dataset(path);
  const Eigen::Index d = rows.front().size();
  if (static_cast<Eigen::Index>(rows.size()) != d) {
    throw ValidationError("matrix file '" + path + "' must be square (found " +
                          std::to_string(rows.size()) + " rows of " + std::to_string(d) +
                          " fields)");
  }
  Matrix mat(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    mat.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  }
  return mat;
}

// ===== Specs for mu and sigma =====
//
// mu: "zero" (default), "mean" (column means), an inline vector like
// "0.5,1", or a file path. sigma: "identity" (default), an inline matrix with
// ';' between rows like "2,1;1,2", or a file path. Inline parsing is tried
// first; anything non-numeric is treated as a path.

namespace io_detail {

inline std::optional<Vector> try_inline_vector(const std::string& spec) {
  const std::vector<std::string> fields = split_fields(spec);
  if (fields.empty()) {
    return std::nullopt;
  }
  Vector v(static_cast<Eigen::Index>(fields.size()));
  for (std::size_t j = 0; j < fields.size(); ++j) {
    double value = 0.0;
    if (!parse_double(fields[j], value)) {
      return std::nullopt;
    }
    v(static_cast<Eigen::Index>(j)) = value;
  }
  return v;
}

inline std::optional<Matrix> try_inline_matrix(const std::string& spec) {
  std::vector<Vector> rows;
  std::string chunk;
  std::stringstream ss(spec);
  while (std::getline(ss, chunk, ';')) {
    const std::optional<Vector> row = try_inline_vector(chunk);
    if (!row) {
      return std::nullopt;
    }
    rows.push_back(*row);
  }
  if (rows.empty()) {
    return std::nullopt;
  }
  const Eigen::Index d = rows.front().size();
  if (static_cast<Eigen::Index>(rows.size()) != d) {
    return std::nullopt;
  }
  Matrix mat(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != d) {
      return std::nullopt;
    }
    mat.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  }
  return mat;
}

}  // namespace io_detail

inline Vector resolve_mu(const std::string& spec, const std::vector<Vector>& data) {
  const Eigen::Index d = data.front().size();
  if (spec.empty() || spec == "zero") {
    return Vector::Zero(d);
  }
  if (spec == "mean") {
    Vector mean = Vector::Zero(d);
    for (const Vector& xi : data) {
      mean += xi;
    }
    return mean / static_cast<double>(data.size());
  }
  Vector mu;
  if (const auto inline_v = io_detail::try_inline_vector(spec)) {
    mu = *inline_v;
  } else {
    const std::vector<Vector> rows = read_dataset(spec);
    if (rows.size() == 1) {
      mu = rows.front();
    } else if (rows.front().size() == 1) {
      mu.resize(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        mu(static_cast<Eigen::Index>(i)) = rows[i](0);
      }
    } else {
      throw ValidationError("mu file '" + spec + "' must hold a single vector");
    }
  }
  if (mu.size() != d) {
    throw DimensionMismatchError("mu has dimension " + std::to_string(mu.size()) +
                                 ", data has dimension " + std::to_string(d));
  }
  return mu;
}

inline Matrix resolve_sigma(const std::string& spec, Eigen::Index d) {
  if (spec.empty() || spec == "identity") {
    return Matrix::Identity(d, d);
  }
  Matrix sigma;
  if (const auto inline_m = io_detail::try_inline_matrix(spec)) {
    sigma = *inline_m;
  } else {
    sigma = read_matrix(spec);
  }
  if (sigma.rows() != d) {
    throw DimensionMismatchError("sigma is " + std::to_string(sigma.rows()) + "x" +
                                 std::to_string(sigma.cols()) + ", data has dimension " +
                                 std::to_string(d));
  }
  return sigma;
}

// ===== Depth runs =====

enum class Method { exact, exact2d, rdirections, rpoints, oracle };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::exact:
      return "exact";
    case Method::exact2d:
      return "exact2d";
    case Method::rdirections:
      return "rdirections";
    case Method::rpoints:
      return "rpoints";
    case Method::oracle:
      return "oracle";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  for (const Method m : {Method::exact, Method::exact2d, Method::rdirections, Method::rpoints,
                         Method::oracle}) {
    if (name == to_string(m)) {
      return m;
    }
  }
  throw ValidationError("unknown method '" + name +
                        "' (expected exact, exact2d, rdirections, rpoints, or oracle)");
}

inline bool is_approx(Method m) { return m == Method::rdirections || m == Method::rpoints; }

enum class OutputFormat { plain, json };

struct RunConfig {
  std::string data_path;
  std::string mu_spec = "zero";
  std::string sigma_spec = "identity";
  Method method = Method::exact;
  std::optional<long long> N;
  std::optional<std::uint64_t> seed;
  double eps = 1e-14;
  int threads = 1;
  OutputFormat output = OutputFormat::plain;
};

struct RunOutput {
  int depth = 0;
  double depth_normalized = 0.0;
  std::string method;
  int n = 0;
  int d = 0;
  double elapsed_s = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<long long> N;
  std::uint64_t evaluations = 0;
};

inline void validate_run_config(const RunConfig& cfg) {
  if (cfg.eps <= 0.0) {
    throw ValidationError("eps must be positive");
  }
  if (cfg.threads < 1) {
    throw ValidationError("threads must be at least 1");
  }
  if (is_approx(cfg.method)) {
    if (!cfg.N) {
      throw ValidationError("method " + to_string(cfg.method) + " requires --N");
    }
    if (*cfg.N < 1) {
      throw ValidationError("N must be at least 1");
    }
    if (!cfg.seed) {
      throw ValidationError("method " + to_string(cfg.method) + " requires --seed");
    }
  }
}

// Validates the configuration, loads the data, and computes the requested
// depth. elapsed_s covers the depth computation (standardization included),
// not file ingestion.
inline RunOutput run(const RunConfig& cfg) {
  validate_run_config(cfg);
  const std::vector<Vector> data = read_dataset(cfg.data_path);
  const Vector mu = resolve_mu(cfg.mu_spec, data);
  const Matrix sigma = resolve_sigma(cfg.sigma_spec, mu.size());

  RunOutput out;
  out.method = to_string(cfg.method);
  out.n = static_cast<int>(data.size());
  out.d = static_cast<int>(mu.size());
  if (cfg.method == Method::exact2d && out.d != 2) {
    throw ValidationError("method exact2d requires 2-dimensional data");
  }

  const auto t0 = std::chrono::steady_clock::now();
  DepthResult res;
  switch (cfg.method) {
    case Method::exact: {
      ExactNDOptions opt;
      opt.eps = cfg.eps;
      opt.threads = cfg.threads;
      res = exact_depth_nd(data, mu, sigma, opt);
      break;
    }
    case Method::exact2d:
      res = exact_depth_2d(data, mu, sigma);
      break;
    case Method::rdirections:
    case Method::rpoints: {
      ApproxConfig acfg;
      acfg.N = *cfg.N;
      acfg.seed = *cfg.seed;
      acfg.eps = cfg.eps;
      acfg.threads = cfg.threads;
      res = cfg.method == Method::rdirections ? approx_rdirections(data, mu, sigma, acfg)
                                              : approx_rpoints(data, mu, sigma, acfg);
      out.seed = cfg.seed;
      out.N = cfg.N;
      break;
    }
    case Method::oracle: {
      const std::vector<Vector> y = standardize(data, mu, sigma);
      const OracleReport rep = enumerate_all_tangents(y, cfg.eps);
      res.depth = rep.depth;
      res.evaluations = rep.directions_scored;
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();

  out.depth = res.depth;
  out.depth_normalized = static_cast<double>(res.depth) / static_cast<double>(out.n);
  out.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
  out.evaluations = res.evaluations;
  return out;
}

inline std::string format_run_plain(const RunOutput& out) {
  std::ostringstream os;
  os << "sHD = " << out.depth << " (" << out.depth << "/" << out.n << ")\n";
  os << "elapsed: " << std::setprecision(6) << out.elapsed_s << " s\n";
  return os.str();
}

inline std::string format_run(const RunOutput& out, OutputFormat fmt);

inline std::string format_run_json(const RunOutput& out) {
  nlohmann::json j;
  j["depth"] = out.depth;
  j["depth_normalized"] = out.depth_normalized;
  j["method"] = out.method;
  j["n"] = out.n;
  j["d"] = out.d;
  j["elapsed_s"] = out.elapsed_s;
  if (out.seed) {
    j["seed"] = *out.seed;
  }
  if (out.N) {
    j["N"] = *out.N;
  }
  j["evaluations"] = out.evaluations;
  return j.dump() + "\n";
}

inline std::string format_run(const RunOutput& out, OutputFormat fmt) {
  return fmt == OutputFormat::json ? format_run_json(out) : format_run_plain(out);
}

}  // namespace sdepth
