#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "faraday/error.hpp"
#include "faraday/state_builder.hpp"
#include "oracles.hpp"

using namespace faraday;

namespace {

GaussianSpec fig2a_spec() { return {0.0, 3.0, 0.0, 24.0, 18, 1.0}; }

} // namespace

TEST_CASE("atomic Gaussian for sigma_A=3, N_A=18")
{
    const auto a = build_atomic_gaussian(fig2a_spec());
    CHECK(a.offset == -9);
    CHECK(a.size() == 19);
    CHECK(std::abs(a.squared_norm() - 1.0) < 1e-12);
    for (int m = -9; m <= 9; ++m) {
        CHECK(a.at(m) >= 0.0);
        CHECK(a.at(m) <= a.at(0));
        CHECK(a.at(m) == doctest::Approx(a.at(-m)).epsilon(1e-15));
    }
    // exp(-1/9): ratios do not depend on normalization.
    CHECK(a.at(1) / a.at(0) == doctest::Approx(0.894839316814).epsilon(1e-12));
    // tail beyond |m| = 9 was cut and reported
    double inside = 0.0;
    double total = 0.0;
    for (int m = -60; m <= 60; ++m) {
        const double w = std::exp(-2.0 * m * m / 9.0);
        total += w;
        if (std::abs(m) <= 9)
            inside += w;
    }
    CHECK(a.discarded_mass == doctest::Approx(1.0 - inside / total).epsilon(1e-4));
    CHECK(a.discarded_mass > 0.0);
}

TEST_CASE("atomic Gaussian collapses to a delta for tiny sigma_A")
{
    const auto a = build_atomic_gaussian({0.0, 0.01, 0.0, 24.0, 2, 1.0});
    CHECK(a.at(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.at(1) < 1e-100);
    CHECK(a.at(-1) < 1e-100);
}

TEST_CASE("atomic Gaussian validation")
{
    SUBCASE("Gaussian must fit inside the m grid")
    {
        try {
            build_atomic_gaussian({1.0, 3.0, 0.0, 24.0, 14, 1.0});
            FAIL("expected InvalidInput");
        } catch (const InvalidInput& e) {
            CHECK(std::string(e.what()).find("N_A/2 > 2*sigma_A + |m0|") != std::string::npos);
        }
    }
    SUBCASE("odd atom number") { CHECK_THROWS_AS(build_atomic_gaussian({0.0, 3.0, 0.0, 24.0, 19, 1.0}), InvalidInput); }
    SUBCASE("non-positive width") { CHECK_THROWS_AS(build_atomic_gaussian({0.0, 0.0, 0.0, 24.0, 18, 1.0}), InvalidInput); }
    SUBCASE("non-positive coupling") { CHECK_THROWS_AS(build_atomic_gaussian({0.0, 3.0, 0.0, 24.0, 18, 0.0}), InvalidInput); }
    SUBCASE("non-finite peak")
    {
        CHECK_THROWS_AS(build_atomic_gaussian({std::nan(""), 3.0, 0.0, 24.0, 18, 1.0}), InvalidInput);
    }
}

TEST_CASE("field Gaussian windows")
{
    auto spec = fig2a_spec();
    const auto f = build_field_gaussian(spec, 5.0);
    CHECK(f.size() == 241);
    CHECK(f.range() == IndexRange{-120, 120});
    CHECK(std::abs(f.squared_norm() - 1.0) < 1e-12);
    CHECK(f.at(7) == doctest::Approx(f.at(-7)).epsilon(1e-15));

    spec.n0 = 12.0;
    const auto shifted = build_field_gaussian(spec, 5.0);
    CHECK(shifted.range() == IndexRange{-108, 132});
    for (int n = -108; n <= 132; ++n)
        CHECK(shifted.at(n) <= shifted.at(12));

    CHECK_THROWS_AS(build_field_gaussian(spec, 2.5), InvalidInput);
    spec.sigma_F = -1.0;
    CHECK_THROWS_AS(build_field_gaussian(spec, 5.0), InvalidInput);
}

TEST_CASE("field truncation at window_mult=5 loses < 1e-10 of the full-line mass")
{
    // Oracle: the same Gaussian summed over +-10 sigma_F.
    const double sigma = 24.0;
    auto mass = [&](int half) {
        double s = 0.0;
        for (int n = -half; n <= half; ++n)
            s += std::exp(-2.0 * n * n / (sigma * sigma));
        return s;
    };
    const double deficit = 1.0 - mass(120) / mass(240);
    CHECK(deficit < 1e-10);

    const auto f = build_field_gaussian(fig2a_spec(), 5.0);
    CHECK(f.discarded_mass == doctest::Approx(deficit).epsilon(1e-3));
}

TEST_CASE("collapse of two-index field amplitudes")
{
    SUBCASE("single basis state")
    {
        TwoIndexFieldAmplitudes p;
        p.set(2, 0, 1.0);
        const auto f = collapse_field_amplitudes(p);
        CHECK(f.range() == IndexRange{0, 0});
        CHECK(f.at(0) == 1.0);
    }
    SUBCASE("symmetric pair")
    {
        TwoIndexFieldAmplitudes p;
        p.set(1, 1, 1.0 / std::numbers::sqrt2);
        p.set(1, -1, 1.0 / std::numbers::sqrt2);
        const auto f = collapse_field_amplitudes(p);
        CHECK(f.range() == IndexRange{-1, 1});
        CHECK(f.at(1) == doctest::Approx(1.0 / std::numbers::sqrt2));
        CHECK(f.at(-1) == doctest::Approx(1.0 / std::numbers::sqrt2));
        CHECK(f.at(0) == 0.0);
    }
    SUBCASE("parity violations are rejected")
    {
        TwoIndexFieldAmplitudes p;
        CHECK_THROWS_AS(p.set(2, 1, 1.0), InvalidInput);
        CHECK_THROWS_AS(p.set(1, 3, 1.0), InvalidInput);
        CHECK_THROWS_AS(p.set(-2, 0, 1.0), InvalidInput);
    }
    SUBCASE("unnormalized or empty input is rejected")
    {
        TwoIndexFieldAmplitudes p;
        CHECK_THROWS_AS(collapse_field_amplitudes(p), InvalidInput);
        p.set(0, 0, 0.5);
        CHECK_THROWS_AS(collapse_field_amplitudes(p), InvalidInput);
    }
    SUBCASE("any single (s, n) state collapses to a unit vector at n")
    {
        for (int s = 0; s <= 8; ++s)
            for (int n = -s; n <= s; n += 2) {
                TwoIndexFieldAmplitudes p;
                p.set(s, n, std::polar(1.0, 0.3 * s));
                const auto f = collapse_field_amplitudes(p);
                CHECK(f.at(n) == doctest::Approx(1.0).epsilon(1e-15));
                CHECK(std::abs(f.squared_norm() - 1.0) < 1e-15);
            }
    }
    SUBCASE("random states keep per-n mass")
    {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 20; ++trial) {
            std::map<std::pair<int, int>, std::complex<double>> raw;
            double norm = 0.0;
            for (int s = 0; s <= 10; ++s)
                for (int n = -s; n <= s; n += 2) {
                    const std::complex<double> z(normal(rng), normal(rng));
                    raw[{s, n}] = z;
                    norm += std::norm(z);
                }
            TwoIndexFieldAmplitudes p;
            std::map<int, double> mass;
            for (const auto& [key, z] : raw) {
                p.set(key.first, key.second, z / std::sqrt(norm));
                mass[key.second] += std::norm(z) / norm;
            }
            const auto f = collapse_field_amplitudes(p);
            CHECK(std::abs(f.squared_norm() - 1.0) < 1e-12);
            for (const auto& [n, w] : mass)
                CHECK(f.at(n) * f.at(n) == doctest::Approx(w).epsilon(1e-12));
        }
    }
}

TEST_CASE("dual coherent preset")
{
    SUBCASE("vacuum")
    {
        const auto f = preset_dual_coherent(0.0, 0.0, 5.0);
        CHECK(f.range() == IndexRange{0, 0});
        CHECK(f.at(0) == 1.0);
    }
    SUBCASE("matches the brute-force double Poisson sum")
    {
        for (auto [a, b] : {std::pair{3.0, 3.0}, std::pair{5.0, 1.5}, std::pair{0.0, 4.0}, std::pair{12.0, 20.0}}) {
            const auto f = preset_dual_coherent(a, b, 5.0);
            const auto pairs = oracle::skellam_by_pairs(a, b, 160);
            for (int n = f.range().first; n <= f.range().last; ++n) {
                const auto it = pairs.find(n);
                const double expected = it == pairs.end() ? 0.0 : it->second;
                CHECK(f.at(n) * f.at(n) == doctest::Approx(expected / (1.0 - f.discarded_mass)).epsilon(1e-10));
            }
        }
    }
    SUBCASE("matches the Bessel closed form")
    {
        const auto f = preset_dual_coherent(72.0, 72.0, 5.0);
        for (int n : {-60, -24, -1, 0, 5, 33, 100})
            CHECK(f.at(n) * f.at(n) == doctest::Approx(oracle::skellam_bessel(n, 72.0, 72.0)).epsilon(1e-9));
    }
    SUBCASE("equal means: symmetric with variance 2 mean")
    {
        for (double mean : {0.5, 4.0, 18.0}) {
            const auto f = preset_dual_coherent(mean, mean, 8.0);
            CHECK(f.mean() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(f.variance() == doctest::Approx(2.0 * mean).epsilon(1e-9));
            for (int n = 1; n <= f.range().last; ++n)
                CHECK(f.at(n) == doctest::Approx(f.at(-n)).epsilon(1e-12));
        }
    }
    SUBCASE("72 + 72 photons moment-match sigma_F = 24")
    {
        const auto f = preset_dual_coherent(72.0, 72.0, 5.0);
        CHECK(f.variance() == doctest::Approx(144.0).epsilon(1e-9));
        CHECK(coherent_sigma_F(72.0, 72.0) == doctest::Approx(24.0));
        // Gaussian preset with sigma_F = 24 has the same |F_n|^2 variance.
        const auto g = build_field_gaussian({0.0, 3.0, 0.0, 24.0, 18, 1.0}, 5.0);
        CHECK(g.variance() == doctest::Approx(144.0).epsilon(1e-6));
    }
    SUBCASE("collapsing coherent P_{s,n} reproduces the preset")
    {
        const double a = 2.0;
        const double b = 3.0;
        const int cutoff = 60;
        TwoIndexFieldAmplitudes p;
        double norm = 0.0;
        for (int np = 0; np <= cutoff; ++np)
            for (int nm = 0; nm <= cutoff; ++nm)
                norm += oracle::poisson(np, a) * oracle::poisson(nm, b);
        for (int np = 0; np <= cutoff; ++np)
            for (int nm = 0; nm <= cutoff; ++nm)
                p.set(np + nm, np - nm, std::sqrt(oracle::poisson(np, a) * oracle::poisson(nm, b) / norm));
        const auto collapsed = collapse_field_amplitudes(p);
        const auto preset = preset_dual_coherent(a, b, 5.0);
        for (int n = preset.range().first; n <= preset.range().last; ++n)
            CHECK(collapsed.at(n) * collapsed.at(n)
                  == doctest::Approx(preset.at(n) * preset.at(n) * (1.0 - preset.discarded_mass)).epsilon(1e-10));
    }
    SUBCASE("negative means rejected") { CHECK_THROWS_AS(preset_dual_coherent(-1.0, 2.0, 5.0), InvalidInput); }
}

TEST_CASE("spin coherent preset")
{
    SUBCASE("two atoms")
    {
        const auto a = preset_spin_coherent(2);
        CHECK(a.range() == IndexRange{-1, 1});
        CHECK(a.at(-1) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(a.at(0) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));
        CHECK(a.at(1) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("binomial variance N_A / 4")
    {
        for (int n : {18, 72, 200})
            CHECK(preset_spin_coherent(n).variance() == doctest::Approx(n / 4.0).epsilon(1e-12));
    }
    SUBCASE("large N_A stays finite")
    {
        const auto a = preset_spin_coherent(20000);
        CHECK(std::abs(a.squared_norm() - 1.0) < 1e-12);
        for (double v : a.values)
            CHECK(std::isfinite(v));
        CHECK(a.variance() == doctest::Approx(5000.0).epsilon(1e-9));
    }
    SUBCASE("overlap with the best-fit Gaussian >= 0.99")
    {
        for (int n_atoms : {18, 50, 200, 648}) {
            const auto a = preset_spin_coherent(n_atoms);
            double best = 0.0;
            double best_sigma = 0.0;
            for (double sigma = 0.5; sigma < 3.0 * std::sqrt(n_atoms); sigma += 0.01) {
                double dot = 0.0;
                double norm = 0.0;
                for (int m = -n_atoms / 2; m <= n_atoms / 2; ++m) {
                    const double gauss = std::exp(-static_cast<double>(m) * m / (sigma * sigma));
                    dot += gauss * a.at(m);
                    norm += gauss * gauss;
                }
                if (dot / std::sqrt(norm) > best) {
                    best = dot / std::sqrt(norm);
                    best_sigma = sigma;
                }
            }
            CHECK(best >= 0.99);
            // Best-fit width follows sigma_A^2 = N_A.
            CHECK(best_sigma == doctest::Approx(spin_coherent_sigma_A(n_atoms)).epsilon(0.05));
        }
    }
    SUBCASE("invalid atom numbers")
    {
        CHECK_THROWS_AS(preset_spin_coherent(3), InvalidInput);
        CHECK_THROWS_AS(preset_spin_coherent(0), InvalidInput);
    }
}

TEST_CASE("caption atom number convention")
{
    CHECK(gaussian_atom_number(3.0) == 18);
    CHECK(gaussian_atom_number(6.0) == 72);
    CHECK(gaussian_atom_number(10.0) == 200);
    CHECK(gaussian_atom_number(18.0) == 648);
    CHECK(gaussian_atom_number(2.2) % 2 == 0);
}

TEST_CASE("joint state assembly")
{
    const auto spec = fig2a_spec();
    const auto a = build_atomic_gaussian(spec);
    const auto f = build_field_gaussian(spec, 5.0);

    SUBCASE("tau = 0 is the outer product")
    {
        const auto s = assemble_joint(a, f, 0.0);
        CHECK(s.m_grid == a.range());
        CHECK(s.n_grid == f.range());
        const Eigen::VectorXd av = Eigen::Map<const Eigen::VectorXd>(a.values.data(), a.values.size());
        const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.values.data(), f.values.size());
        const Eigen::MatrixXcd outer = (av * fv.transpose()).cast<std::complex<double>>();
        CHECK((s.coeffs - outer).norm() == 0.0);
    }

    SUBCASE("tau + pi reproduces tau for even N_A")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> tau_dist(0.0, 1.0);
        for (double tau : {0.0, tau_dist(rng), tau_dist(rng)}) {
            const auto s0 = assemble_joint(a, f, tau);
            const auto s1 = assemble_joint(a, f, tau + std::numbers::pi);
            CHECK((s0.coeffs - s1.coeffs).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    SUBCASE("unit Frobenius norm and tau-independent moduli")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> tau_dist(-3.0, 3.0);
        const auto ref = assemble_joint(a, f, 0.0);
        for (int i = 0; i < 25; ++i) {
            const auto s = assemble_joint(a, f, tau_dist(rng));
            CHECK(std::abs(s.coeffs.norm() - 1.0) < 1e-10);
            CHECK((s.coeffs.cwiseAbs() - ref.coeffs.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-15);
        }
    }

    SUBCASE("phase convention exp(-2 i tau m n)")
    {
        const double tau = 0.013;
        const auto s = assemble_joint(a, f, tau);
        const int m = 4;
        const int n = -17;
        const std::complex<double> expected = a.at(m) * f.at(n) * std::exp(std::complex<double>(0.0, -2.0 * tau * m * n));
        CHECK(std::abs(s.coeffs(m - s.m_grid.first, n - s.n_grid.first) - expected) < 1e-16);
    }

    SUBCASE("unnormalized inputs are rejected")
    {
        auto bad = a;
        bad.values[0] += 0.1;
        CHECK_THROWS_AS(assemble_joint(bad, f, 0.1), InvalidInput);
    }
}
