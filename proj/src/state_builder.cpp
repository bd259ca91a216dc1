#include "faraday/state_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "faraday/error.hpp"

namespace faraday {

namespace {

constexpr double kNormTolerance = 1e-10;

void require_finite(double value, const char* name)
{
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << name << " must be finite, got " << value;
        throw InvalidInput(msg.str());
    }
}

void validate_field_params(double n0, double sigma_F, double window_mult)
{
    require_finite(n0, "n0");
    require_finite(sigma_F, "sigma_F");
    require_finite(window_mult, "window_mult");
    if (sigma_F <= 0.0)
        throw InvalidInput("sigma_F must be > 0");
    if (window_mult < 3.0)
        throw InvalidInput("window_mult must be >= 3");
}

// Normalizes `weights` (squared amplitudes) given the mass of the full,
// untruncated distribution and returns the amplitude vector.
AmplitudeVector from_probabilities(int offset, const std::vector<double>& weights, double full_mass)
{
    double kept = 0.0;
    for (double w : weights)
        kept += w;
    if (!(kept > 0.0) || !std::isfinite(kept))
        throw NumericalFailure("amplitude window carries no probability mass");

    AmplitudeVector out;
    out.offset = offset;
    out.values.reserve(weights.size());
    for (double w : weights)
        out.values.push_back(std::sqrt(w / kept));
    out.discarded_mass = std::max(0.0, 1.0 - kept / full_mass);
    return out;
}

// Squared Gaussian amplitude exp(-2 (z - c)^2 / sigma^2) summed over a
// window wide enough that the remainder is below double precision.
double full_line_gaussian_mass(double center, double sigma)
{
    const int lo = static_cast<int>(std::floor(center - 12.0 * sigma)) - 1;
    const int hi = static_cast<int>(std::ceil(center + 12.0 * sigma)) + 1;
    double sum = 0.0;
    for (int z = lo; z <= hi; ++z) {
        const double d = (z - center) / sigma;
        sum += std::exp(-2.0 * d * d);
    }
    return sum;
}

AmplitudeVector gaussian_window(IndexRange window, double center, double sigma)
{
    std::vector<double> weights;
    weights.reserve(window.size());
    for (int z = window.first; z <= window.last; ++z) {
        const double d = (z - center) / sigma;
        weights.push_back(std::exp(-2.0 * d * d));
    }
    return from_probabilities(window.first, weights, full_line_gaussian_mass(center, sigma));
}

double log_poisson(long k, double mean)
{
    if (mean == 0.0)
        return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0);
}

// P(N_+ - N_- = n) accumulated along the anti-diagonal in log space.
double skellam_pmf(int n, double mean_plus, double mean_minus)
{
    const long k_min = std::max(0, -n);
    const double tail = std::max(mean_plus, mean_minus);
    const long k_max = std::max(k_min, static_cast<long>(std::ceil(tail + 20.0 * std::sqrt(tail) + 40.0)));

    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    double peak = -std::numeric_limits<double>::infinity();
    for (long k = k_min; k <= k_max; ++k) {
        const double t = log_poisson(k + n, mean_plus) + log_poisson(k, mean_minus);
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    if (!std::isfinite(peak))
        return 0.0;
    double sum = 0.0;
    for (double t : terms)
        sum += std::exp(t - peak);
    return std::exp(peak) * sum;
}

} // namespace

void GaussianSpec::validate() const
{
    require_finite(m0, "m0");
    require_finite(n0, "n0");
    require_finite(sigma_A, "sigma_A");
    require_finite(sigma_F, "sigma_F");
    require_finite(g, "g");
    if (sigma_A <= 0.0)
        throw InvalidInput("sigma_A must be > 0");
    if (sigma_F <= 0.0)
        throw InvalidInput("sigma_F must be > 0");
    if (g <= 0.0)
        throw InvalidInput("coupling g must be > 0");
    if (N_A < 2)
        throw InvalidInput("N_A must be a positive even integer");
    if (N_A % 2 != 0)
        throw InvalidInput("N_A must be even (odd N_A gives half-integer m and period 4*pi/g)");
    if (!(N_A / 2.0 > 2.0 * sigma_A + std::abs(m0))) {
        std::ostringstream msg;
        msg << "atomic Gaussian does not fit the m grid: need N_A/2 > 2*sigma_A + |m0|, got N_A/2="
            << N_A / 2 << ", 2*sigma_A + |m0|=" << 2.0 * sigma_A + std::abs(m0);
        throw InvalidInput(msg.str());
    }
}

double AmplitudeVector::at(int i) const
{
    const IndexRange r = range();
    return r.contains(i) ? values[static_cast<std::size_t>(i - offset)] : 0.0;
}

double AmplitudeVector::squared_norm() const
{
    double s = 0.0;
    for (double v : values)
        s += v * v;
    return s;
}

double AmplitudeVector::mean() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += (offset + static_cast<double>(i)) * values[i] * values[i];
    return s / squared_norm();
}

double AmplitudeVector::variance() const
{
    const double mu = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = offset + static_cast<double>(i) - mu;
        s += d * d * values[i] * values[i];
    }
    return s / squared_norm();
}

void TwoIndexFieldAmplitudes::set(int s, int n, std::complex<double> amplitude)
{
    if (s < 0 || std::abs(n) > s || (s - n) % 2 != 0) {
        std::ostringstream msg;
        msg << "field key (s=" << s << ", n=" << n << ") violates s >= |n|, s - n even";
        throw InvalidInput(msg.str());
    }
    entries_[{s, n}] = amplitude;
}

double TwoIndexFieldAmplitudes::squared_norm() const
{
    double sum = 0.0;
    for (const auto& [key, amp] : entries_)
        sum += std::norm(amp);
    return sum;
}

AmplitudeVector build_atomic_gaussian(const GaussianSpec& spec)
{
    spec.validate();
    return gaussian_window(spec.atomic_grid(), spec.m0, spec.sigma_A);
}

AmplitudeVector build_field_gaussian(const GaussianSpec& spec, double window_mult)
{
    validate_field_params(spec.n0, spec.sigma_F, window_mult);
    const int center = static_cast<int>(std::lround(spec.n0));
    const int half = static_cast<int>(std::ceil(window_mult * spec.sigma_F));
    return gaussian_window({center - half, center + half}, spec.n0, spec.sigma_F);
}

AmplitudeVector collapse_field_amplitudes(const TwoIndexFieldAmplitudes& amplitudes)
{
    const auto& entries = amplitudes.entries();
    if (entries.empty())
        throw InvalidInput("field amplitudes are empty");
    for (const auto& [key, amp] : entries) {
        const auto [s, n] = key;
        if (s < 0 || std::abs(n) > s || (s - n) % 2 != 0)
            throw InvalidInput("field amplitudes contain a parity-violating key");
    }
    const double norm = amplitudes.squared_norm();
    if (std::abs(norm - 1.0) > 1e-12)
        throw InvalidInput("field amplitudes must be normalized");

    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (const auto& [key, amp] : entries) {
        lo = std::min(lo, key.second);
        hi = std::max(hi, key.second);
    }
    std::vector<double> mass(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto& [key, amp] : entries)
        mass[static_cast<std::size_t>(key.second - lo)] += std::norm(amp);

    AmplitudeVector out;
    out.offset = lo;
    out.values.reserve(mass.size());
    for (double w : mass)
        out.values.push_back(std::sqrt(w));
    return out;
}

AmplitudeVector preset_dual_coherent(double mean_plus, double mean_minus, double window_mult)
{
    require_finite(mean_plus, "mean_plus");
    require_finite(mean_minus, "mean_minus");
    require_finite(window_mult, "window_mult");
    if (mean_plus < 0.0 || mean_minus < 0.0)
        throw InvalidInput("coherent-state mean photon numbers must be >= 0");
    if (window_mult < 3.0)
        throw InvalidInput("window_mult must be >= 3");

    const int center = static_cast<int>(std::lround(mean_plus - mean_minus));
    const int half = static_cast<int>(std::ceil(window_mult * coherent_sigma_F(mean_plus, mean_minus)));
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(2 * half + 1));
    for (int n = center - half; n <= center + half; ++n)
        weights.push_back(skellam_pmf(n, mean_plus, mean_minus));
    return from_probabilities(center - half, weights, 1.0);
}

AmplitudeVector preset_spin_coherent(int N_A)
{
    if (N_A < 2 || N_A % 2 != 0)
        throw InvalidInput("spin coherent preset needs an even N_A >= 2");
    const int j = N_A / 2;
    const double log_total = std::lgamma(N_A + 1.0) - N_A * std::log(2.0);
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(N_A + 1));
    for (int m = -j; m <= j; ++m) {
        const int k = j + m;
        weights.push_back(std::exp(log_total - std::lgamma(k + 1.0) - std::lgamma(N_A - k + 1.0)));
    }
    return from_probabilities(-j, weights, 1.0);
}

JointState assemble_joint(const AmplitudeVector& atoms, const AmplitudeVector& field, double tau)
{
    require_finite(tau, "tau");
    if (std::abs(atoms.squared_norm() - 1.0) > kNormTolerance)
        throw InvalidInput("atomic amplitudes must be normalized");
    if (std::abs(field.squared_norm() - 1.0) > kNormTolerance)
        throw InvalidInput("field amplitudes must be normalized");

    JointState state;
    state.m_grid = atoms.range();
    state.n_grid = field.range();
    state.tau = tau;
    state.coeffs.resize(state.m_grid.size(), state.n_grid.size());
    for (int i = 0; i < state.m_grid.size(); ++i) {
        const long long m = state.m_grid.first + i;
        for (int k = 0; k < state.n_grid.size(); ++k) {
            const long long n = state.n_grid.first + k;
            const double amplitude = atoms.values[static_cast<std::size_t>(i)] * field.values[static_cast<std::size_t>(k)];
            state.coeffs(i, k) = std::polar(amplitude, -2.0 * tau * static_cast<double>(m * n));
        }
    }
    return state;
}

double coherent_sigma_F(double mean_plus, double mean_minus)
{
    return 2.0 * std::sqrt(mean_plus + mean_minus);
}

double spin_coherent_sigma_A(int N_A)
{
    return std::sqrt(static_cast<double>(N_A));
}

int gaussian_atom_number(double sigma_A)
{
    return 2 * static_cast<int>(std::lround(sigma_A * sigma_A));
}

} // namespace faraday
