#include "stofv/io.hpp"

#include "stofv/errors.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>

namespace stofv {

using nlohmann::ordered_json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("output: cannot write '" + path + "'");
    }
    return out;
}

std::string cell_text(const CsvCell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_double(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else {
                return std::to_string(v);
            }
        },
        c);
}

/// Replaces NaN and infinities by null, which JSON cannot represent otherwise.
void scrub(ordered_json& j) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        j = nullptr;
    } else if (j.is_structured()) {
        for (auto& v : j) scrub(v);
    }
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                     const std::vector<std::string>& columns)
    : out_(open_output(path)), columns_(columns.size()), path_(path) {
    out_ << "# config_hash=" << config_hash << '\n' << "# master_seed=" << master_seed << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << (i ? "," : "") << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_) {
        throw std::logic_error("csv: row width does not match the header of " + path_);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out_ << (i ? "," : "") << cell_text(cells[i]);
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) {
        throw ConfigError("output: failed writing '" + path_ + "'");
    }
}

void write_json(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                ordered_json body) {
    ordered_json doc;
    doc["config_hash"] = config_hash;
    doc["master_seed"] = master_seed;
    for (auto it = body.begin(); it != body.end(); ++it) {
        doc[it.key()] = it.value();
    }
    scrub(doc);
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw ConfigError("output: failed writing '" + path + "'");
    }
}

void write_convergence_csv(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                           const ConvergenceTable& table) {
    CsvWriter w(path, config_hash, master_seed,
                {"level", "m", "h", "dt", "M", "p", "error", "stderr", "order", "l2_error", "l2_order"});
    for (const auto& r : table.rows) {
        w.row({static_cast<std::uint64_t>(r.level), static_cast<std::uint64_t>(r.m), r.h, r.dt,
               static_cast<std::uint64_t>(r.M), r.p, r.error, r.stderr_, r.order, r.l2_error, r.l2_order});
    }
    w.close();
}

void write_ledger_csv(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                      const DiagnosticsReport& report) {
    CsvWriter w(path, config_hash, master_seed,
                {"n", "t_n", "half_energy_pre", "half_energy_post", "dissipation", "noise_input", "residual"});
    for (const auto& s : report.steps) {
        w.row({static_cast<std::uint64_t>(s.n), s.t, s.half_energy_pre, s.half_energy_half, s.dissipation,
               s.noise_input, s.energy_residual});
    }
    w.close();
}

void write_snapshot_csv(const std::string& path, const std::string& config_hash, std::uint64_t master_seed,
                        const TorusGrid& grid, std::span<const double> values) {
    std::vector<std::string> cols{"i"};
    if (grid.dim() == 2) cols.push_back("j");
    cols.push_back("value");
    CsvWriter w(path, config_hash, master_seed, cols);
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        const auto idx = grid.index(c);
        if (grid.dim() == 2) {
            w.row({static_cast<std::uint64_t>(idx[0]), static_cast<std::uint64_t>(idx[1]), values[c]});
        } else {
            w.row({static_cast<std::uint64_t>(idx[0]), values[c]});
        }
    }
    w.close();
}

ordered_json diagnostics_json(const DiagnosticsReport& report, bool with_steps) {
    return ordered_json::parse(report_json(report, with_steps));
}

ordered_json convergence_json(const ConvergenceTable& table) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"level", r.level},
                        {"m", r.m},
                        {"h", r.h},
                        {"dt", r.dt},
                        {"M", r.M},
                        {"p", r.p},
                        {"error", r.error},
                        {"stderr", r.stderr_},
                        {"order", r.order},
                        {"l2_error", r.l2_error},
                        {"l2_order", r.l2_order}});
    }
    ordered_json j;
    j["rows"] = rows;
    j["strictly_decreasing"] = table.strictly_decreasing();
    return j;
}

namespace {

ordered_json estimate_json(const Estimate& e) {
    return {{"mean", e.mean}, {"stderr", e.stderr_}, {"count", e.count}};
}

ordered_json identity_json(const IdentityCheck& c) {
    return {{"lhs", estimate_json(c.lhs)},
            {"rhs", estimate_json(c.rhs)},
            {"difference", estimate_json(c.difference)},
            {"within_3se", c.within()}};
}

}  // namespace

ordered_json ensemble_json(const EnsembleResult& r) {
    ordered_json j;
    j["M"] = r.paths.size();
    ordered_json lp = ordered_json::array();
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        lp.push_back({{"p", kMomentPowers[i]},
                      {"lp_final", estimate_json(r.lp_final[i])},
                      {"sup_nu_moment", estimate_json(r.tightness.sup_nu_moment[i])},
                      {"m_moment_sq", estimate_json(r.tightness.m_moment_sq[i])}});
    }
    j["moments"] = lp;
    j["energy_identity"] = identity_json(r.energy.total);
    j["noise_energy_identity"] = identity_json(r.energy.noise_energy);
    j["weak_bv"] = {{"space", estimate_json(r.space)},
                    {"space_bound", r.space_bound},
                    {"time_flat", estimate_json(r.time_flat)},
                    {"time_flat_bound", r.time_flat_bound},
                    {"time_full", estimate_json(r.time_full)},
                    {"time_full_bound", r.time_full_bound},
                    {"closeness", estimate_json(r.closeness)},
                    {"closeness_bound", r.closeness_bound},
                    {"control_failures", r.control_failures}};
    j["max_energy_residual"] = estimate_json(r.max_energy_residual);
    return j;
}

}  // namespace stofv
