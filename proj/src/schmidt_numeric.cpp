#include "faraday/schmidt_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "faraday/error.hpp"
#include "parallel.hpp"

namespace faraday {

Eigen::MatrixXcd SchmidtSpectrum::reconstruct() const
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(atomic_modes.rows(), field_modes.rows());
    for (Eigen::Index k = 0; k < atomic_modes.cols(); ++k)
        out += std::sqrt(eigenvalues[static_cast<std::size_t>(k)]) * atomic_modes.col(k) * field_modes.col(k).transpose();
    return out;
}

SchmidtSpectrum schmidt_decompose(const JointState& state, std::optional<int> rank_cut)
{
    if (state.coeffs.size() == 0)
        throw InvalidInput("joint state is empty");
    if (rank_cut && *rank_cut < 1)
        throw InvalidInput("rank_cut must be >= 1");
    if (!state.coeffs.allFinite())
        throw InvalidInput("joint state has non-finite coefficients");

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(state.coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
        std::ostringstream msg;
        msg << "singular value decomposition failed at tau=" << state.tau;
        throw NumericalFailure(msg.str());
    }

    // BDCSVD returns singular values in non-increasing order; the stable
    // sort keeps that order for exact ties.
    const auto& sv = svd.singularValues();
    const Eigen::Index total = sv.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < total; ++i)
        order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return sv(a) > sv(b); });

    const Eigen::Index kept = rank_cut ? std::min<Eigen::Index>(*rank_cut, total) : total;

    SchmidtSpectrum out;
    out.m_grid = state.m_grid;
    out.n_grid = state.n_grid;
    out.eigenvalues.reserve(static_cast<std::size_t>(total));
    for (Eigen::Index i : order)
        out.eigenvalues.push_back(sv(i) * sv(i));
    out.atomic_modes.resize(state.coeffs.rows(), kept);
    out.field_modes.resize(state.coeffs.cols(), kept);
    for (Eigen::Index k = 0; k < kept; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.atomic_modes.col(k) = svd.matrixU().col(src);
        out.field_modes.col(k) = svd.matrixV().col(src).conjugate();
    }
    out.rank_kept = static_cast<int>(std::count_if(out.eigenvalues.begin(), out.eigenvalues.end(),
                                                   [](double l) { return l >= kEigenvalueFloor; }));
    return out;
}

double entropy(std::span<const double> eigenvalues)
{
    double s = 0.0;
    for (double l : eigenvalues)
        if (l >= kEigenvalueFloor)
            s -= l * std::log(l);
    return std::max(0.0, s);
}

double schmidt_number(std::span<const double> eigenvalues)
{
    double sum_sq = 0.0;
    for (double l : eigenvalues)
        sum_sq += l * l;
    return 1.0 / sum_sq;
}

std::vector<SweepPoint> time_sweep(const AmplitudeVector& atoms, const AmplitudeVector& field,
                                   std::span<const double> taus, std::optional<int> rank_cut, unsigned threads)
{
    for (double t : taus)
        if (!std::isfinite(t))
            throw InvalidInput("tau values must be finite");

    std::vector<SweepPoint> results(taus.size());
    const auto failure = detail::parallel_for(taus.size(), threads, [&](std::size_t i) {
        SweepPoint& p = results[i];
        p.tau = taus[i];
        p.spectrum = schmidt_decompose(assemble_joint(atoms, field, taus[i]), rank_cut);
        p.entropy = entropy(p.spectrum);
        p.schmidt_number = schmidt_number(p.spectrum);
    });
    detail::rethrow_at_tau(failure, taus);
    return results;
}

} // namespace faraday
