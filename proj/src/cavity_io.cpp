#include "faraday/cavity_io.hpp"

#include <cmath>
#include <sstream>

#include "faraday/error.hpp"

namespace faraday {

namespace {

double sign_of(Polarization pol) { return pol == Polarization::plus ? 1.0 : -1.0; }

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << name << " must be finite and > 0, got " << value;
        throw InvalidInput(msg.str());
    }
}

} // namespace

void CavityParams::validate() const
{
    require_positive(kappa_c, "kappa_c");
    require_positive(g, "g");
    if (!std::isfinite(omega_c))
        throw InvalidInput("omega_c must be finite");
    if (N_A < 2 || N_A % 2 != 0)
        throw InvalidInput("N_A must be a positive even integer");
}

std::complex<double> exact_reflection(const CavityParams& params, double omega, int m, Polarization pol)
{
    params.validate();
    const double shift = params.detuning(omega) - sign_of(pol) * params.g * m;
    const std::complex<double> num(params.kappa_c, shift);
    return num / std::conj(num);
}

double exact_phase(const CavityParams& params, double omega, int m, Polarization pol)
{
    params.validate();
    return std::atan2(params.detuning(omega) - sign_of(pol) * params.g * m, params.kappa_c);
}

double common_phase(const CavityParams& params, double omega)
{
    params.validate();
    return std::atan(params.detuning(omega) / params.kappa_c);
}

double bad_cavity_phase(const CavityParams& params, double omega, int m, Polarization pol)
{
    return common_phase(params, omega) - sign_of(pol) * params.g * m / params.kappa_c;
}

std::complex<double> correlated_phase(const CavityParams& params, int m, int n)
{
    params.validate();
    return std::polar(1.0, -2.0 * params.g * static_cast<double>(static_cast<long long>(m) * n) / params.kappa_c);
}

std::complex<double> output_phase_map(const CavityParams& params, double omega, int m, int n, int s)
{
    if (s < 0 || std::abs(n) > s || (s - n) % 2 != 0) {
        std::ostringstream msg;
        msg << "photon numbers (s=" << s << ", n=" << n << ") violate s >= |n|, s - n even";
        throw InvalidInput(msg.str());
    }
    return std::polar(1.0, 2.0 * common_phase(params, omega) * s) * correlated_phase(params, m, n);
}

double effective_tau(const CavityParams& params)
{
    params.validate();
    return params.g / params.kappa_c;
}

JointState output_joint_state(const CavityParams& params, const AmplitudeVector& atoms,
                              const AmplitudeVector& field)
{
    return assemble_joint(atoms, field, effective_tau(params));
}

std::string_view to_string(KConvention convention)
{
    return convention == KConvention::doubled ? "doubled" : "tau_substitution";
}

std::optional<KConvention> parse_convention(std::string_view text)
{
    if (text == "doubled")
        return KConvention::doubled;
    if (text == "tau_substitution")
        return KConvention::tau_substitution;
    return std::nullopt;
}

double output_schmidt_number(double sigma_A, double sigma_F, double g, double kappa_c, KConvention convention)
{
    require_positive(sigma_A, "sigma_A");
    require_positive(sigma_F, "sigma_F");
    require_positive(g, "g");
    require_positive(kappa_c, "kappa_c");
    const double factor = convention == KConvention::doubled ? 2.0 : 1.0;
    return std::hypot(1.0, factor * sigma_A * sigma_F * g / kappa_c);
}

FreeSpaceEstimate free_space_estimate(double sigma_A, double sigma_F, double g_f, double t_f,
                                      KConvention convention, std::optional<CavityReference> cavity)
{
    require_positive(t_f, "t_f");
    FreeSpaceEstimate out;
    // t_f plays the role of 2 / kappa_c.
    out.schmidt_number = output_schmidt_number(sigma_A, sigma_F, g_f, 2.0 / t_f, convention);
    if (cavity) {
        require_positive(cavity->g, "cavity g");
        require_positive(cavity->interaction_time, "cavity interaction time");
        out.enhancement_ratio = (cavity->g * cavity->interaction_time) / (g_f * t_f);
    }
    return out;
}

} // namespace faraday
