#pragma once

// Scenario layer: text configuration, the derivation-cascade command, the
// named figure-reproduction protocols, parameter sweeps, and the CLI entry
// point.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinmag/dynamics.hpp"
#include "spinmag/params.hpp"

namespace spinmag::scenarios {

// Key = value configuration with '#' comments. Keys are validated against a
// fixed registry; unknown keys are rejected. Frequencies and rates are given
// in ordinary Hz and converted to rad/s internally; times are in seconds.
class ScenarioConfig {
public:
    static ScenarioConfig defaults();
    static ScenarioConfig from_file(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    void apply_line(const std::string& line);   // "key = value"

    bool is_set(const std::string& key) const;  // set to a non-empty value
    double angular(const std::string& key) const;        // Hz -> rad/s
    std::optional<double> angular_opt(const std::string& key) const;
    double number(const std::string& key) const;         // dimensionless
    std::optional<double> number_opt(const std::string& key) const;
    double seconds(const std::string& key) const;
    int integer(const std::string& key) const;
    std::string text(const std::string& key) const;

    // Full resolved key/value list in registry order, for CSV metadata.
    std::vector<std::pair<std::string, std::string>> resolved() const;

private:
    std::vector<std::pair<std::string, std::string>> values_;   // registry order
    int index_of(const std::string& key) const;
};

struct SweepColumn {
    std::string name;
    std::vector<double> num;
    std::vector<std::string> txt;   // used when is_text
    bool is_text{false};
};

struct SweepSeries {
    std::string x_name;
    std::vector<double> x;          // strictly monotone
    std::vector<SweepColumn> columns;
    std::vector<std::pair<std::string, std::string>> metadata;
};

// Sweep CSV: '#' metadata lines, "x,<col1>,..." header, 17-digit floats.
void write_csv(const SweepSeries& series, const std::string& path);

struct DeriveResult {
    params::DerivedParams d;
    params::RegimeReport regime;
};

// Resolves the configured parameter set through the cascade.
DeriveResult resolve_cascade(const ScenarioConfig& cfg);

// Full cascade with printed tables; writes derived.csv and regime.csv.
DeriveResult cmd_derive(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

struct Fig2Result {
    dynamics::TimeSeries hl;   // full linearized model
    dynamics::TimeSeries ht;   // mechanically eliminated model
    dynamics::DeviationReport deviation;
    double convergence_delta{0.0};   // max series change under cutoff doubling
    bool convergence_checked{false};
};

// Photon exchange between the cavities under the full and the eliminated
// Hamiltonian, one initial excitation in cavity a. Writes fig2_HL.csv and
// fig2_HT.csv.
Fig2Result cmd_fig2(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

// Polariton branch squares and stability versus the squeezed-frame coupling.
SweepSeries cmd_fig3(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

// Relative coupling enhancement versus the lower-branch frequency for a set
// of squeezing parameters.
SweepSeries cmd_fig4(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

struct Fig5Result {
    dynamics::TimeSeries polariton;   // near-critical polariton model
    dynamics::TimeSeries smp;         // effective spin-magnon-polariton model
    dynamics::TimeSeries lindblad;    // effective spin-magnon model with decay
    double max_lbp_occupation{0.0};
};

// Spin-magnon state exchange: two closed effective levels plus the open-
// system run. Refuses to run on a mandatory regime failure unless forced.
Fig5Result cmd_fig5(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                    bool force = false);

// Decay-dressed transformation magnitudes at the ideal critical point
// versus W/K.
SweepSeries cmd_appendix_c(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

// Cascade and spectrum for a swept configuration key; per-point failures are
// recorded in-row and the run continues.
SweepSeries cmd_sweep(const ScenarioConfig& cfg, const std::string& variable, double from,
                      double to, int points, const std::filesystem::path& out_dir);

// CLI entry point (subcommands derive|fig2|fig3|fig4|fig5|appendix-c|sweep).
// Returns the process exit code: 0 success, 2 config error, 3 regime abort,
// 4 numerical failure.
int run_cli(const std::vector<std::string>& args);

} // namespace spinmag::scenarios
