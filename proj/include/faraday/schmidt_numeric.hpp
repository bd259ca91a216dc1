#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "faraday/state_builder.hpp"

namespace faraday {

/// Eigenvalues below this floor are treated as zero in entropy sums and
/// excluded from rank_kept.
inline constexpr double kEigenvalueFloor = 1e-14;

/// Schmidt decomposition |psi> = sum_k sqrt(lambda_k) |u_k>|v_k>.
///
/// Column k of atomic_modes holds u_k over m_grid, column k of field_modes
/// holds v_k over n_grid (already conjugated, so that
/// C = sum_k sqrt(lambda_k) u_k v_k^T).
struct SchmidtSpectrum {
    std::vector<double> eigenvalues;
    Eigen::MatrixXcd atomic_modes;
    Eigen::MatrixXcd field_modes;
    IndexRange m_grid;
    IndexRange n_grid;
    int rank_kept = 0;

    /// sum_k sqrt(lambda_k) u_k v_k^T over the stored modes.
    Eigen::MatrixXcd reconstruct() const;
};

/// Singular-value factorization of the joint coefficient matrix.
/// rank_cut keeps only the leading modes; eigenvalues are always complete.
/// Throws NumericalFailure if the factorization does not converge.
SchmidtSpectrum schmidt_decompose(const JointState& state, std::optional<int> rank_cut = std::nullopt);

/// -sum lambda ln lambda, skipping eigenvalues below kEigenvalueFloor.
double entropy(std::span<const double> eigenvalues);
inline double entropy(const SchmidtSpectrum& s) { return entropy(s.eigenvalues); }

/// (sum lambda^2)^-1.
double schmidt_number(std::span<const double> eigenvalues);
inline double schmidt_number(const SchmidtSpectrum& s) { return schmidt_number(s.eigenvalues); }

struct SweepPoint {
    double tau = 0.0;
    double entropy = 0.0;
    double schmidt_number = 0.0;
    SchmidtSpectrum spectrum;
};

/// Decomposes the joint state at every tau. Results come back in input
/// order; a failure at one point is rethrown as NumericalFailure naming
/// that tau. Work is spread over `threads` workers (0 = hardware default).
std::vector<SweepPoint> time_sweep(const AmplitudeVector& atoms, const AmplitudeVector& field,
                                   std::span<const double> taus, std::optional<int> rank_cut = std::nullopt,
                                   unsigned threads = 0);

} // namespace faraday
