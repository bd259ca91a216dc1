#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace faraday {

/// Closed integer interval [first, last].
struct IndexRange {
    int first = 0;
    int last = -1;

    int size() const { return last >= first ? last - first + 1 : 0; }
    bool contains(int i) const { return i >= first && i <= last; }
    bool operator==(const IndexRange&) const = default;
};

/// Gaussian amplitude parameters for atoms (m) and field (n).
///
/// Amplitudes follow A_m ~ exp(-(m - m0)^2 / sigma_A^2) and
/// F_n ~ exp(-(n - n0)^2 / sigma_F^2). The atomic index runs over
/// [-N_A/2, N_A/2]; g sets the time unit, tau = g t / 2.
struct GaussianSpec {
    double m0 = 0.0;
    double sigma_A = 1.0;
    double n0 = 0.0;
    double sigma_F = 1.0;
    int N_A = 2;
    double g = 1.0;

    /// Throws InvalidInput naming the first violated condition.
    void validate() const;

    IndexRange atomic_grid() const { return {-N_A / 2, N_A / 2}; }
};

/// Real non-negative amplitudes over a contiguous integer window.
struct AmplitudeVector {
    int offset = 0;
    std::vector<double> values;
    /// Probability mass that fell outside the window and was removed by
    /// renormalization (0 when nothing was truncated).
    double discarded_mass = 0.0;

    IndexRange range() const { return {offset, offset + static_cast<int>(values.size()) - 1}; }
    std::size_t size() const { return values.size(); }
    /// Amplitude at quantum number i; zero outside the window.
    double at(int i) const;
    double squared_norm() const;
    double mean() const;
    double variance() const;
};

/// Field amplitudes P_{s,n} in the (photon-number sum, difference) basis.
/// Keys must satisfy s >= 0, |n| <= s and s - n even.
class TwoIndexFieldAmplitudes {
public:
    using Key = std::pair<int, int>;  // (s, n)

    void set(int s, int n, std::complex<double> amplitude);
    const std::map<Key, std::complex<double>>& entries() const { return entries_; }
    double squared_norm() const;

private:
    std::map<Key, std::complex<double>> entries_;
};

/// Joint coefficients C[m, n] = A_m F_n exp(-2 i tau m n).
struct JointState {
    IndexRange m_grid;
    IndexRange n_grid;
    Eigen::MatrixXcd coeffs;
    double tau = 0.0;
};

/// Default half-width of the field window in units of sigma_F.
inline constexpr double kDefaultWindowMult = 5.0;

AmplitudeVector build_atomic_gaussian(const GaussianSpec& spec);
AmplitudeVector build_field_gaussian(const GaussianSpec& spec, double window_mult = kDefaultWindowMult);

/// F_n = sqrt(sum_s |P_{s,n}|^2), over the smallest window holding every n.
AmplitudeVector collapse_field_amplitudes(const TwoIndexFieldAmplitudes& amplitudes);

/// Two coherent polarization modes: |F_n|^2 is the Skellam distribution of
/// N_+ - N_-. The window is centred on round(mean_plus - mean_minus) with
/// half-width ceil(window_mult * 2 sqrt(mean_plus + mean_minus)).
AmplitudeVector preset_dual_coherent(double mean_plus, double mean_minus,
                                     double window_mult = kDefaultWindowMult);

/// Equatorial spin coherent state: A_m^2 = C(N_A, N_A/2 + m) / 2^N_A.
AmplitudeVector preset_spin_coherent(int N_A);

JointState assemble_joint(const AmplitudeVector& atoms, const AmplitudeVector& field, double tau);

/// Field width matching a dual coherent state: |F_n|^2 variance is
/// sigma_F^2 / 4, so sigma_F = 2 sqrt(mean_plus + mean_minus).
double coherent_sigma_F(double mean_plus, double mean_minus);

/// Gaussian width whose amplitude profile matches an equatorial spin
/// coherent state of N_A atoms (sigma_A^2 = N_A).
double spin_coherent_sigma_A(int N_A);

/// Atom number used for a spin coherent preset of nominal width sigma_A:
/// 2 sigma_A^2 rounded to the nearest even integer.
int gaussian_atom_number(double sigma_A);

} // namespace faraday
