#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hankelbands/symbol.hpp"

namespace hankelbands::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kToleranceBreach = 2, kDomainError = 3 };

struct SymbolSource {
    enum class Kind { None, InlineJson, File, Builtin };
    Kind kind = Kind::None;
    std::string text;  // JSON text, path, or builtin name ("carleman", "mathieu:0.5")
};

struct RunConfig {
    SymbolSource source;
    std::optional<double> omega;
    std::optional<double> period;
    int grid = 101;
    std::optional<int> n;
    std::optional<double> tol;
    int m_top = 6;
    std::string out = ".";
    double tol_flat = 1e-8;
    bool truncate_at_floor = false;  // drop ranks that fall below the value floor

    // Resolved symbol (period or omega flags rescale the period).
    PeriodicSymbol symbol() const;
    double resolved_omega() const;
    bool is_builtin_mathieu() const;
    double mathieu_A() const;  // only for mathieu builtins
    // Explicit N, or the largest tail-selected N over k in {0, omega/4, omega/2}.
    int truncation(const PeriodicSymbol& sym) const;
    void validate() const;
};

// Applies the keys of a JSON config document onto cfg (file values sit below CLI flags).
void apply_config_json(RunConfig& cfg, const nlohmann::json& doc);

int cmd_bands(const RunConfig& cfg, std::ostream& log, std::optional<double> dump_k = std::nullopt);
int cmd_secdet(const RunConfig& cfg, std::span<const Complex> s_list, std::span<const Complex> lambda_list,
               std::ostream& log);
int cmd_mathieu_sweep(const RunConfig& cfg, double A_lo, double A_hi, int count, std::ostream& log);
int cmd_mathieu_flat(const RunConfig& cfg, double A_lo, double A_hi, double tol_A, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_dump_matrix(const RunConfig& cfg, Complex s, std::ostream& log);

// Full command line: parses, dispatches and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

Complex parse_complex(const std::string& text);

}  // namespace hankelbands::cli
