#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagnostics.hpp"
#include "mh.hpp"

namespace bkmcmc {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

/// Chain CSV: header u_0..u_{N-1},accept; one row per stored sample.
void write_chain_csv(const std::filesystem::path& path, const ChainRecord& chain);

struct ChainCsv {
  std::vector<std::string> columns;       // coefficient column names
  std::vector<std::vector<double>> data;  // column-major
  std::vector<std::uint8_t> accept;
  std::size_t n_rows() const { return accept.size(); }
};

ChainCsv read_chain_csv(const std::filesystem::path& path);

nlohmann::json chain_json(const ChainRecord& chain);
nlohmann::json diagnostics_json(const DiagnosticsReport& report);

/// Lag in the first column, one ACF column per component.
void write_acf_csv(const std::filesystem::path& path, const DiagnosticsReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Generic numeric table with a header row.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace bkmcmc
