#include "chain_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace bkmcmc {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

// JSON has no representation for inf/nan.
nlohmann::json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_chain_csv(const std::filesystem::path& path, const ChainRecord& chain) {
  std::ofstream out = open_out(path);
  for (std::size_t k = 0; k < chain.dim; ++k) out << "u_" << k << ',';
  out << "accept\n";
  const std::size_t n = chain.n_samples();
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t k = 0; k < chain.dim; ++k) {
      line += format_double(chain.samples[i * chain.dim + k]);
      line += ',';
    }
    line += chain.stored_accept[i] ? '1' : '0';
    line += '\n';
    out << line;
  }
  finish(out, path);
}

ChainCsv read_chain_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open chain file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  ChainCsv csv;
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.back() != "accept") {
    throw IoError(path.string() + ": last header column must be 'accept'");
  }
  csv.columns.assign(header.begin(), header.end() - 1);
  const std::size_t dim = csv.columns.size();
  csv.data.assign(dim, {});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      if (col < dim) {
        csv.data[col].push_back(v);
      } else if (col == dim) {
        csv.accept.push_back(v != 0.0 ? 1 : 0);
      }
      ++col;
    }
    if (col != dim + 1) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(dim + 1) + " fields, got " + std::to_string(col));
    }
  }
  return csv;
}

nlohmann::json chain_json(const ChainRecord& chain) {
  nlohmann::json j;
  j["algorithm"] = chain.algorithm;
  j["dim"] = chain.dim;
  j["n_samples"] = chain.n_samples();
  j["n_post_burnin_steps"] = chain.accept.size();
  j["n_accepted"] = chain.n_accepted;
  const auto rate = chain.acceptance_rate();
  j["acceptance_rate"] = rate ? nlohmann::json(*rate) : nlohmann::json(nullptr);
  j["acceptance_rate_defined"] = rate.has_value();
  j["config"] = {{"n_steps", chain.config.n_steps}, {"burnin", chain.config.burnin},
                 {"thin", chain.config.thin},       {"beta", chain.config.beta},
                 {"seed", chain.config.seed},       {"stream_id", chain.config.stream_id}};
  if (chain.prior) {
    j["prior"] = {{"kind", chain.prior->kind == PriorKind::BesselK ? "bessel-k" : "gamma"},
                  {"p", chain.prior->shape},
                  {"lambda", chain.prior->lambda},
                  {"gamma", chain.prior->gamma}};
  }
  return j;
}

nlohmann::json diagnostics_json(const DiagnosticsReport& report) {
  nlohmann::json j;
  std::vector<nlohmann::json> iacf;
  std::vector<nlohmann::json> ess;
  for (double x : report.iacf) iacf.push_back(number_or_null(x));
  for (double x : report.ess_per_10k) ess.push_back(number_or_null(x));
  j["iacf"] = iacf;
  j["ess_per_10k"] = ess;
  j["min_ess"] = number_or_null(report.min_ess);
  j["mean_ess"] = number_or_null(report.mean_ess);
  j["max_ess"] = number_or_null(report.max_ess);
  j["max_iacf"] = number_or_null(report.max_iacf);
  j["acceptance_rate"] =
      report.acceptance_rate ? nlohmann::json(*report.acceptance_rate) : nlohmann::json(nullptr);
  j["n_samples"] = report.n_samples;
  j["thin"] = report.thin;
  j["acf_max_lag"] = report.acf.empty() ? 0 : report.acf.front().size() - 1;
  return j;
}

void write_acf_csv(const std::filesystem::path& path, const DiagnosticsReport& report) {
  std::ofstream out = open_out(path);
  out << "lag";
  for (std::size_t k = 0; k < report.acf.size(); ++k) out << ",u_" << k;
  out << '\n';
  const std::size_t lags = report.acf.empty() ? 0 : report.acf.front().size();
  for (std::size_t l = 0; l < lags; ++l) {
    out << l;
    for (const auto& curve : report.acf) out << ',' << format_double(curve[l]);
    out << '\n';
  }
  finish(out, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ShapeError("table row width does not match header");
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
  finish(out, path);
}

}  // namespace bkmcmc
