#include "faraday/analytic_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "faraday/error.hpp"
#include "parallel.hpp"

namespace faraday {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << name << " must be finite and > 0, got " << value;
        throw InvalidInput(msg.str());
    }
}

// h_0..h_kmax at z. The recurrence runs on a rescaled mantissa so that the
// Gaussian factor exp(-z^2/2) is applied only at the end, in log space.
std::vector<double> hermite_functions(int k_max, double z)
{
    constexpr double kRescale = 1e150;
    const double log_rescale = std::log(kRescale);

    std::vector<double> out(static_cast<std::size_t>(k_max + 1));
    double log_scale = -0.5 * z * z;
    double prev = 0.0;
    double cur = std::pow(kPi, -0.25);
    out[0] = cur * std::exp(log_scale);
    for (int k = 0; k < k_max; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * z * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += log_rescale;
        }
        out[static_cast<std::size_t>(k + 1)] = cur * std::exp(log_scale);
    }
    return out;
}

std::complex<double> quarter_turn_phase(int k)
{
    // (-i)^(k/2) on the principal branch.
    return std::polar(1.0, -kPi * k / 4.0);
}

} // namespace

MehlerParams mehler_params(double sigma_A, double sigma_F, double tau)
{
    require_positive(sigma_A, "sigma_A");
    require_positive(sigma_F, "sigma_F");
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw InvalidInput("tau must be finite and >= 0");

    MehlerParams p;
    p.tau = tau;
    p.x = sigma_A * sigma_F * tau;
    const double r = std::hypot(1.0, p.x);
    // mu = (r - 1)/x rewritten as x/(r + 1): no 0/0 at x = 0 and no
    // cancellation at small x.
    p.mu = p.x / (r + 1.0);
    p.one_minus_mu_sq = 2.0 / (r + 1.0);
    p.xi = std::numbers::sqrt2 * std::sqrt(r);
    return p;
}

AnalyticSpectrum analytic_spectrum(const MehlerParams& params, double tail_tolerance)
{
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
        throw InvalidInput("tail_tolerance must lie in (0, 1)");

    AnalyticSpectrum out;
    out.params = params;
    const double ratio = params.mu * params.mu;
    if (ratio == 0.0) {
        out.eigenvalues = {1.0};
        return out;
    }

    constexpr std::size_t kMaxTerms = 10'000'000;
    double weight = params.one_minus_mu_sq;
    double tail = ratio;  // mu^(2(k+1)) for the current last index k
    out.eigenvalues.push_back(weight);
    while (tail >= tail_tolerance) {
        if (out.eigenvalues.size() >= kMaxTerms)
            throw InvalidInput("analytic spectrum needs too many terms; mu too close to 1");
        weight *= ratio;
        tail *= ratio;
        out.eigenvalues.push_back(weight);
    }
    out.tail_mass = tail;
    return out;
}

double analytic_entropy(const MehlerParams& params)
{
    const double mu_sq = params.mu * params.mu;
    if (mu_sq == 0.0)
        return 0.0;
    const double q = params.one_minus_mu_sq;
    const double log_mu_sq = params.mu < 0.5 ? 2.0 * std::log(params.mu) : std::log1p(-q);
    return -(mu_sq / q * log_mu_sq + std::log(q));
}

double schmidt_number_from_mu(const MehlerParams& params)
{
    return (1.0 + params.mu * params.mu) / params.one_minus_mu_sq;
}

double analytic_schmidt_number(const MehlerParams& params)
{
    const double direct = std::hypot(1.0, params.x);
    const double spectral = schmidt_number_from_mu(params);
    if (std::abs(direct - spectral) > 1e-12 * direct) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "Schmidt number forms disagree at x=" << params.x << ": " << direct << " vs " << spectral;
        throw NumericalFailure(msg.str());
    }
    return direct;
}

double break_time(double sigma_A, double sigma_F)
{
    require_positive(sigma_A, "sigma_A");
    require_positive(sigma_F, "sigma_F");
    return 1.0 / std::max(sigma_A, sigma_F);
}

double hermite_function(int k, double z)
{
    if (k < 0)
        throw InvalidInput("Hermite index must be >= 0");
    return hermite_functions(k, z).back();
}

int max_representable_mode(double width, double scale_xi)
{
    require_positive(width, "width");
    require_positive(scale_xi, "scale_xi");
    const double span = kPi * width / scale_xi;
    return static_cast<int>(std::floor((span * span - 1.0) / 2.0));
}

Eigen::VectorXcd hermite_mode(int k, double width, double scale_xi, double center, IndexRange grid)
{
    if (k < 0)
        throw InvalidInput("mode index must be >= 0");
    if (grid.size() == 0)
        throw InvalidInput("mode grid is empty");
    const int k_limit = max_representable_mode(width, scale_xi);
    if (k > k_limit) {
        std::ostringstream msg;
        msg << "mode k=" << k << " oscillates faster than the integer grid (width=" << width
            << ", xi=" << scale_xi << ", max k=" << k_limit << ")";
        throw InvalidInput(msg.str());
    }

    const std::complex<double> prefactor = std::sqrt(scale_xi / width) * quarter_turn_phase(k);
    Eigen::VectorXcd out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double z = scale_xi * (grid.first + i - center) / width;
        out(i) = prefactor * hermite_function(k, z);
    }
    return out;
}

ModePair analytic_schmidt_modes(const GaussianSpec& spec, double tau, int k, IndexRange m_grid,
                                IndexRange n_grid, bool apply_twists)
{
    spec.validate();
    const MehlerParams p = mehler_params(spec.sigma_A, spec.sigma_F, tau);
    ModePair out{hermite_mode(k, spec.sigma_A, p.xi, spec.m0, m_grid),
                 hermite_mode(k, spec.sigma_F, p.xi, spec.n0, n_grid)};
    if (apply_twists) {
        for (int i = 0; i < m_grid.size(); ++i) {
            const double m = m_grid.first + i;
            out.atomic(i) *= std::polar(1.0, spec.n0 * (spec.m0 - 2.0 * m) * tau);
        }
        for (int i = 0; i < n_grid.size(); ++i) {
            const double n = n_grid.first + i;
            out.field(i) *= std::polar(1.0, spec.m0 * (spec.n0 - 2.0 * n) * tau);
        }
    }
    return out;
}

std::complex<double> mehler_kernel(double x, double y, double tau, double sigma_A, double sigma_F)
{
    require_positive(sigma_A, "sigma_A");
    require_positive(sigma_F, "sigma_F");
    const double envelope = std::sqrt(2.0 / (kPi * sigma_A * sigma_F))
        * std::exp(-x * x / (sigma_A * sigma_A) - y * y / (sigma_F * sigma_F));
    return std::polar(envelope, -2.0 * tau * x * y);
}

double mehler_identity_check(double x, double y, double tau, double sigma_A, double sigma_F, int terms)
{
    if (terms < 1)
        throw InvalidInput("terms must be >= 1");
    const MehlerParams p = mehler_params(sigma_A, sigma_F, tau);
    const auto h_x = hermite_functions(terms - 1, p.xi * x / sigma_A);
    const auto h_y = hermite_functions(terms - 1, p.xi * y / sigma_F);
    const double scale = p.xi / std::sqrt(sigma_A * sigma_F);

    std::complex<double> sum = 0.0;
    double weight = 1.0;
    for (int k = 0; k < terms; ++k) {
        // U_k V_k carries (-i)^(k/2) twice, i.e. (-i)^k.
        const std::complex<double> phase = quarter_turn_phase(k) * quarter_turn_phase(k);
        sum += weight * scale * phase * h_x[static_cast<std::size_t>(k)] * h_y[static_cast<std::size_t>(k)];
        weight *= p.mu;
        if (weight == 0.0)
            break;
    }
    sum *= std::sqrt(p.one_minus_mu_sq);
    return std::abs(mehler_kernel(x, y, tau, sigma_A, sigma_F) - sum);
}

int mehler_terms_for(const MehlerParams& params, double sigma_A, double sigma_F, double tolerance)
{
    require_positive(tolerance, "tolerance");
    if (params.mu == 0.0)
        return 1;
    // |h_k| <= pi^(-1/4) bounds every product U_k V_k.
    const double bound = std::sqrt(params.one_minus_mu_sq) * params.xi / std::sqrt(kPi * sigma_A * sigma_F)
        / (1.0 - params.mu);
    int terms = 1;
    double tail = bound * params.mu;
    while (tail >= tolerance) {
        ++terms;
        tail *= params.mu;
        if (terms > 100'000)
            throw InvalidInput("Mehler series converges too slowly; mu too close to 1");
    }
    return terms;
}

double mode_overlap(const Eigen::MatrixXcd& numeric_modes, std::span<const double> eigenvalues, int k,
                    const Eigen::VectorXcd& analytic_mode, double degeneracy_tol)
{
    if (k < 0 || k >= numeric_modes.cols())
        throw InvalidInput("mode index outside the numeric spectrum");
    if (analytic_mode.size() != numeric_modes.rows())
        throw InvalidInput("analytic mode and numeric modes live on different grids");
    const double norm = analytic_mode.norm();
    if (!(norm > 0.0))
        return 0.0;

    const double lambda_k = eigenvalues[static_cast<std::size_t>(k)];
    double projected = 0.0;
    for (Eigen::Index j = 0; j < numeric_modes.cols(); ++j) {
        if (std::abs(eigenvalues[static_cast<std::size_t>(j)] - lambda_k) > degeneracy_tol)
            continue;
        projected += std::norm(numeric_modes.col(j).dot(analytic_mode) / norm);
    }
    return std::sqrt(projected);
}

std::vector<ComparisonRow> compare(const GaussianSpec& spec, std::span<const double> taus,
                                   const CompareOptions& options)
{
    return compare(spec, build_atomic_gaussian(spec), build_field_gaussian(spec, options.window_mult), taus,
                   options);
}

std::vector<ComparisonRow> compare(const GaussianSpec& spec, const AmplitudeVector& atoms,
                                   const AmplitudeVector& field, std::span<const double> taus,
                                   const CompareOptions& options)
{
    spec.validate();
    if (options.modes < 0)
        throw InvalidInput("mode count must be >= 0");
    for (double t : taus)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw InvalidInput("tau values must be finite and >= 0");

    const double tau_break = break_time(spec.sigma_A, spec.sigma_F);
    std::vector<ComparisonRow> rows(taus.size());
    const auto failure = detail::parallel_for(taus.size(), options.threads, [&](std::size_t i) {
        const double tau = taus[i];
        const SchmidtSpectrum numeric = schmidt_decompose(assemble_joint(atoms, field, tau));
        const MehlerParams p = mehler_params(spec.sigma_A, spec.sigma_F, tau);

        ComparisonRow& row = rows[i];
        row.tau = tau;
        row.S_numeric = entropy(numeric);
        row.S_analytic = analytic_entropy(p);
        row.K_numeric = schmidt_number(numeric);
        row.K_analytic = analytic_schmidt_number(p);
        row.lambda0_numeric = numeric.eigenvalues.front();
        row.lambda0_analytic = p.one_minus_mu_sq;
        row.inside_break_window = tau <= tau_break;

        const int available = static_cast<int>(numeric.atomic_modes.cols());
        for (int k = 0; k < options.modes; ++k) {
            double atomic = std::numeric_limits<double>::quiet_NaN();
            double fld = atomic;
            if (k < available) {
                try {
                    const ModePair modes
                        = analytic_schmidt_modes(spec, tau, k, numeric.m_grid, numeric.n_grid, options.apply_twists);
                    atomic = mode_overlap(numeric.atomic_modes, numeric.eigenvalues, k, modes.atomic);
                    fld = mode_overlap(numeric.field_modes, numeric.eigenvalues, k, modes.field);
                } catch (const InvalidInput&) {
                    // mode not representable on the integer grid at this tau
                }
            }
            row.atomic_overlap.push_back(atomic);
            row.field_overlap.push_back(fld);
        }
    });
    detail::rethrow_at_tau(failure, taus);
    return rows;
}

} // namespace faraday
