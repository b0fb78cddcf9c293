#pragma once

#include "stofv/config.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace stofv {

/// Round-trip decimal form: 17 significant digits, '.' separator, independent of the locale.
std::string format_double(double x);

using CsvCell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// CSV with '#' provenance lines (config hash, master seed) above the header; LF endings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
              const std::vector<std::string>& columns);
    void row(const std::vector<CsvCell>& cells);
    void close();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::string path_;
};

/// Writes a JSON document with "config_hash" and "master_seed" merged in at the top.
void write_json(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                nlohmann::ordered_json body);

void write_convergence_csv(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                           const ConvergenceTable& table);
/// Per-step energy ledger: n, t_n, half_energy_pre, half_energy_post, dissipation, noise_input, residual.
void write_ledger_csv(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                      const DiagnosticsReport& report);
/// Cell values with their multi-index: i[,j],value.
void write_snapshot_csv(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                        const TorusGrid& grid, std::span<const double> values);

nlohmann::ordered_json diagnostics_json(const DiagnosticsReport& report, bool with_steps);
nlohmann::ordered_json convergence_json(const ConvergenceTable& table);
nlohmann::ordered_json ensemble_json(const EnsembleResult& result);

}  // namespace stofv
