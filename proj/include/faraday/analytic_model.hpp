#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "faraday/schmidt_numeric.hpp"
#include "faraday/state_builder.hpp"

namespace faraday {

/// Time-law parameters of the Mehler factorization at dimensionless time
/// tau = g t / 2, with x = sigma_A sigma_F tau:
///   mu = (sqrt(1 + x^2) - 1) / x,   xi = sqrt(2) (1 + x^2)^(1/4).
/// one_minus_mu_sq is carried separately because 1 - mu^2 = 2 / (1 + sqrt(1 + x^2))
/// stays accurate as mu -> 1.
struct MehlerParams {
    double tau = 0.0;
    double x = 0.0;
    double mu = 0.0;
    double xi = 1.4142135623730951;
    double one_minus_mu_sq = 1.0;
};

MehlerParams mehler_params(double sigma_A, double sigma_F, double tau);

/// Geometric eigenvalues lambda_k = (1 - mu^2) mu^(2k), truncated at the
/// smallest k_max with mu^(2(k_max + 1)) below `tail_tolerance`.
struct AnalyticSpectrum {
    MehlerParams params;
    std::vector<double> eigenvalues;
    /// Exact mass beyond the truncation, mu^(2(k_max + 1)).
    double tail_mass = 0.0;
};

AnalyticSpectrum analytic_spectrum(const MehlerParams& params, double tail_tolerance = 1e-12);

double analytic_entropy(const MehlerParams& params);

/// sqrt(1 + x^2). Cross-checked against (1 + mu^2) / (1 - mu^2); throws
/// NumericalFailure if the two forms differ by more than 1e-12 (relative).
double analytic_schmidt_number(const MehlerParams& params);

/// (1 + mu^2) / (1 - mu^2), the spectral form of the Schmidt number.
double schmidt_number_from_mu(const MehlerParams& params);

/// tau_B = 1 / max(sigma_A, sigma_F).
double break_time(double sigma_A, double sigma_F);

/// Normalized Hermite function h_k(z) = H_k(z) exp(-z^2/2) / sqrt(sqrt(pi) 2^k k!),
/// evaluated by three-term recurrence with exponent tracking.
double hermite_function(int k, double z);

/// Largest mode index whose node spacing, pi width / (xi sqrt(2k + 1)),
/// still spans at least one grid step.
int max_representable_mode(double width, double scale_xi);

/// Oscillator mode sqrt(xi/width) e^{-i pi k/4} h_k(xi (z - center) / width)
/// sampled at the integers of `grid`. Continuum-normalized: the discrete
/// sum of |.|^2 over an unbounded grid is close to, not exactly, 1.
/// Throws InvalidInput if k exceeds max_representable_mode.
Eigen::VectorXcd hermite_mode(int k, double width, double scale_xi, double center, IndexRange grid);

struct ModePair {
    Eigen::VectorXcd atomic;
    Eigen::VectorXcd field;
};

/// Analytic Schmidt modes u_k over m_grid and v_k over n_grid. With
/// apply_twists the atomic mode carries exp(i n0 (m0 - 2m) tau) and the
/// field mode exp(i m0 (n0 - 2n) tau).
ModePair analytic_schmidt_modes(const GaussianSpec& spec, double tau, int k, IndexRange m_grid,
                                IndexRange n_grid, bool apply_twists = true);

/// Left-hand side of the Mehler factorization,
/// sqrt(2/(pi sA sF)) exp(-x^2/sA^2 - y^2/sF^2) exp(-2 i tau x y).
std::complex<double> mehler_kernel(double x, double y, double tau, double sigma_A, double sigma_F);

/// |kernel - sqrt(1 - mu^2) sum_{k<terms} mu^k U_k(x) V_k(y)| at one point.
double mehler_identity_check(double x, double y, double tau, double sigma_A, double sigma_F, int terms);

/// Smallest term count whose geometric tail bound
/// sqrt(1 - mu^2) xi / sqrt(pi sA sF) mu^terms / (1 - mu) is below tolerance.
int mehler_terms_for(const MehlerParams& params, double sigma_A, double sigma_F, double tolerance);

/// Modulus of the overlap between a (discretely normalized) analytic mode
/// and numeric mode k. If numeric eigenvalues near lambda_k are degenerate
/// within `degeneracy_tol`, the analytic mode is projected onto the whole
/// degenerate subspace instead.
double mode_overlap(const Eigen::MatrixXcd& numeric_modes, std::span<const double> eigenvalues, int k,
                    const Eigen::VectorXcd& analytic_mode, double degeneracy_tol = 1e-10);

struct CompareOptions {
    double window_mult = kDefaultWindowMult;
    int modes = 3;
    bool apply_twists = true;
    unsigned threads = 0;
};

struct ComparisonRow {
    double tau = 0.0;
    double S_numeric = 0.0;
    double S_analytic = 0.0;
    double K_numeric = 1.0;
    double K_analytic = 1.0;
    double lambda0_numeric = 1.0;
    double lambda0_analytic = 1.0;
    bool inside_break_window = true;
    /// Per mode k; NaN where the analytic mode is not representable.
    std::vector<double> atomic_overlap;
    std::vector<double> field_overlap;
};

/// Numeric vs analytic report on Gaussian amplitudes built from `spec`.
std::vector<ComparisonRow> compare(const GaussianSpec& spec, std::span<const double> taus,
                                   const CompareOptions& options = {});

/// Same, with caller-supplied amplitudes; `spec` supplies the analytic widths
/// and peaks.
std::vector<ComparisonRow> compare(const GaussianSpec& spec, const AmplitudeVector& atoms,
                                   const AmplitudeVector& field, std::span<const double> taus,
                                   const CompareOptions& options = {});

} // namespace faraday
