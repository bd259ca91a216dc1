#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "faraday/analytic_model.hpp"
#include "faraday/cavity_io.hpp"
#include "faraday/state_builder.hpp"

namespace faraday {

enum class AtomPreset { gaussian, spin_coherent };
enum class FieldPreset { gaussian, dual_coherent };

/// `count` points from start to stop inclusive (a single point at start
/// when count == 1).
struct TauGrid {
    double start = 0.0;
    double stop = 0.1;
    int count = 41;

    void validate() const;
    std::vector<double> values() const;
};

struct CavityBlock {
    std::vector<double> kappa_over_g{10.0, 20.0, 30.0, 50.0, 100.0, 200.0, 1000.0};
    double omega_c = 0.0;
    /// Input frequency; unset means on resonance with the shifted cavity
    /// (delta = 0).
    std::optional<double> omega;
    KConvention convention = KConvention::tau_substitution;
};

struct Tolerances {
    /// Relative band for numeric vs analytic entropy.
    double relative = 0.05;
    /// Relative band for deciding which Schmidt-number convention a numeric
    /// cavity result matches.
    double convention = 0.02;
};

/// Flat key=value configuration, keys prefixed by section (`atom.sigma`,
/// `field.n0`, `tau.count`, ...). Lines starting with '#' are comments.
struct ScenarioConfig {
    std::string name = "custom";
    AtomPreset atom_preset = AtomPreset::gaussian;
    FieldPreset field_preset = FieldPreset::gaussian;
    double m0 = 0.0;
    double sigma_A = 3.0;
    /// Gaussian: defaults to 2 sigma_A^2 rounded to even.
    /// Spin coherent: defaults to sigma_A^2 rounded to even.
    std::optional<int> N_A;
    double n0 = 0.0;
    double sigma_F = 24.0;
    /// Dual coherent means; derived from (n0, sigma_F) when unset.
    std::optional<double> mean_plus;
    std::optional<double> mean_minus;
    double g = 1.0;
    TauGrid taus;
    std::optional<CavityBlock> cavity;
    std::filesystem::path output_dir = ".";
    double window_mult = kDefaultWindowMult;
    int modes = 3;
    unsigned threads = 0;
    Tolerances tolerances;

    /// Throws InvalidInput for any inconsistent or unresolvable setting.
    void validate() const;
    int atom_number() const;
    /// sigma_A for gaussian atoms, sqrt(N_A) for spin coherent ones.
    double analytic_sigma_A() const;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Key=value rendering that parse_config reads back to an equal config.
std::string format_config(const ScenarioConfig& config);

std::optional<ScenarioConfig> builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();

/// Amplitudes for a config plus the Gaussian parameters the analytic model
/// is evaluated with.
struct ResolvedInputs {
    AmplitudeVector atoms;
    AmplitudeVector field;
    GaussianSpec analytic_spec;
    std::vector<std::string> notes;
};

ResolvedInputs resolve_inputs(const ScenarioConfig& config);

std::string format_number(double value);

/// Header: tau,S_numeric,S_analytic,K_numeric,K_analytic,lambda0_numeric,
/// lambda0_analytic,inside_break_window
std::string sweep_csv(const std::vector<ComparisonRow>& rows);
/// Header: tau,k,atomic_overlap,field_overlap
std::string overlap_csv(const std::vector<ComparisonRow>& rows);

struct CavityRow {
    double kappa_over_g = 0.0;
    double tau_eff = 0.0;
    double K_doubled = 1.0;
    double K_tau_substitution = 1.0;
    double K_numeric = 1.0;
    bool matches_doubled = false;
    bool matches_tau_substitution = false;
    double bad_cavity_phase_error = 0.0;
    bool inside_break_window = true;

    /// "doubled", "tau_substitution", "both" or "neither".
    std::string matching_convention() const;
};

std::vector<CavityRow> cavity_report(const ScenarioConfig& config);

/// Header: kappa_over_g,tau_eff,K_doubled,K_tau_substitution,K_numeric_svd,
/// matching_convention,bad_cavity_phase_error,inside_break_window
std::string cavity_csv(const std::vector<CavityRow>& rows);

struct RunOutput {
    std::vector<std::filesystem::path> files;
};

/// Sweep + analytic comparison; writes <name>_sweep.csv, <name>_overlaps.csv
/// and <name>_manifest.txt under config.output_dir. Nothing is written
/// unless every computation succeeded. Renormalization notes go to `log`.
RunOutput run_scenario(const ScenarioConfig& config, std::ostream& log);

/// Writes <name>_cavity.csv and <name>_cavity_manifest.txt.
RunOutput run_cavity_report(const ScenarioConfig& config, std::ostream& log);

} // namespace faraday
