#pragma once

#include <complex>
#include <optional>
#include <string_view>

#include "faraday/state_builder.hpp"

namespace faraday {

enum class Polarization { plus, minus };

/// Leaky single-sided cavity. Rates share the time unit of g.
struct CavityParams {
    double kappa_c = 1.0;
    double omega_c = 0.0;
    double g = 1.0;
    int N_A = 2;

    void validate() const;
    /// delta = omega - omega_c - g N_A / 2.
    double detuning(double omega) const { return omega - omega_c - g * N_A / 2.0; }
};

/// e^{2 i theta} = (kappa + i delta -/+ i g m) / (kappa - i delta +/- i g m).
std::complex<double> exact_reflection(const CavityParams& params, double omega, int m, Polarization pol);

/// theta_{+/-} = atan((delta -/+ g m) / kappa), the half-argument of
/// exact_reflection on the branch through 0 at delta = g m = 0. Continuous
/// in delta for any m because kappa > 0.
double exact_phase(const CavityParams& params, double omega, int m, Polarization pol);

/// theta_{+/-} ~ atan(delta / kappa) -/+ g m / kappa.
double bad_cavity_phase(const CavityParams& params, double omega, int m, Polarization pol);

/// atan(delta / kappa), the m-independent part of the phase.
double common_phase(const CavityParams& params, double omega);

/// exp(2 i theta_0 s - 2 i g m n / kappa) picked up by |N_+, N_-> |m> with
/// n = N_+ - N_-, s = N_+ + N_-. Requires |n| <= s and s - n even.
std::complex<double> output_phase_map(const CavityParams& params, double omega, int m, int n, int s);

/// The entangling part exp(-2 i g m n / kappa).
std::complex<double> correlated_phase(const CavityParams& params, int m, int n);

/// Effective dimensionless interaction time g / kappa (tau at t = 2/kappa).
double effective_tau(const CavityParams& params);

/// Output joint state C[m, n] = A_m F_n exp(-2 i g m n / kappa). The
/// field-local factor exp(2 i theta_0 s) is dropped.
JointState output_joint_state(const CavityParams& params, const AmplitudeVector& atoms,
                              const AmplitudeVector& field);

enum class KConvention {
    doubled,           ///< sqrt(1 + (2 sA sF g / kappa)^2)
    tau_substitution,  ///< sqrt(1 + (sA sF g / kappa)^2), i.e. tau = g / kappa
};

std::string_view to_string(KConvention convention);
std::optional<KConvention> parse_convention(std::string_view text);

double output_schmidt_number(double sigma_A, double sigma_F, double g, double kappa_c, KConvention convention);

struct FreeSpaceEstimate {
    double schmidt_number = 1.0;
    /// (g t) / (g_f t_f) against the reference cavity; empty without one.
    std::optional<double> enhancement_ratio;
};

struct CavityReference {
    double g = 1.0;
    double interaction_time = 2.0;  ///< 2 / kappa_c for a cavity
};

/// Schmidt number with g -> g_f and 2/kappa -> t_f under `convention`.
FreeSpaceEstimate free_space_estimate(double sigma_A, double sigma_F, double g_f, double t_f,
                                      KConvention convention,
                                      std::optional<CavityReference> cavity = std::nullopt);

} // namespace faraday
