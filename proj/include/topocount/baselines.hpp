#pragma once

// Information-theoretic source enumeration (MDL and AIC) from the eigenvalues of the
// sample autocorrelation matrix.
//
// For m sensors, N snapshots and descending eigenvalues l_1 >= ... >= l_m, the
// log-likelihood term for k signals is
//
//     L(k) = -N (m - k) log( g(k) / a(k) )
//
// where g(k) and a(k) are the geometric and arithmetic means of l_{k+1} .. l_m.
// A model with k signals has k (2m - k) free real parameters, giving
//
//     MDL(k) = L(k) + 1/2 k (2m - k) log N
//     AIC(k) = 2 L(k) + 2 k (2m - k)
//
// Both estimators return the minimising k in [0, m-1]. These are the forms of
// M. Wax and T. Kailath, "Detection of signals by information theoretic criteria",
// IEEE Trans. ASSP 33(2), 1985.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "topocount/error.hpp"
#include "topocount/mixing.hpp"
#include "topocount/signals.hpp"

namespace topocount {

struct EigenSpectrum {
    std::vector<double> eigenvalues; // descending, non-negative
    std::size_t n_snapshots = 0;
};

struct Autocorrelation {
    Eigen::MatrixXcd matrix;
    EigenSpectrum spectrum;
};

/// R = (1/N) sum_k v[k] v[k]^H over the columns of an m x N snapshot matrix.
inline Autocorrelation sample_autocorrelation(const Eigen::MatrixXcd& snapshots) {
    const auto m = snapshots.rows();
    const auto n = snapshots.cols();
    detail::require(m >= 1, Errc::InvalidParam, "no channels");
    detail::require(n >= m, Errc::TooFewSnapshots,
                    std::to_string(n) + " snapshots for " + std::to_string(m) + " channels");

    Autocorrelation out;
    out.matrix = (snapshots * snapshots.adjoint()) / static_cast<double>(n);
    // Symmetrise away rounding so the solver sees an exactly Hermitian matrix.
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(out.matrix, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    out.spectrum.n_snapshots = static_cast<std::size_t>(n);
    out.spectrum.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    for (double& v : out.spectrum.eigenvalues) {
        v = std::max(v, 0.0);
    }
    std::ranges::sort(out.spectrum.eigenvalues, std::greater<>{});
    return out;
}

/// Snapshots y[k] (real) or y[k] + j y~[k] (analytic) after trimming trim_fraction
/// of the samples from each end.
inline Eigen::MatrixXcd snapshot_matrix(const ObservationSet& observations, bool use_analytic = true,
                                        double trim = 0.0) {
    const std::size_t m = observations.size();
    const std::size_t cut = trim_count(observations.length(), trim);
    detail::require(observations.length() >= 2 * cut + 1, Errc::ResultEmpty, "no samples remain after trimming");
    const std::size_t kept = observations.length() - 2 * cut;

    Eigen::MatrixXcd v(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(kept));
    for (std::size_t i = 0; i < m; ++i) {
        const auto y = observations[i].samples();
        std::vector<double> yq;
        if (use_analytic) {
            const auto q = hilbert_transform(y);
            yq.assign(q.begin(), q.end());
        }
        for (std::size_t k = 0; k < kept; ++k) {
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                use_analytic ? std::complex<double>(y[cut + k], yq[cut + k]) : std::complex<double>(y[cut + k], 0.0);
        }
    }
    return v;
}

inline Autocorrelation sample_autocorrelation(const ObservationSet& observations, bool use_analytic = true,
                                              double trim = 0.0) {
    return sample_autocorrelation(snapshot_matrix(observations, use_analytic, trim));
}

namespace detail {

/// L(k) for k = 0 .. m-1.
inline std::vector<double> log_likelihood_terms(const EigenSpectrum& spec) {
    const auto& ev = spec.eigenvalues;
    const std::size_t m = ev.size();
    require(m >= 2, Errc::InvalidParam, "need at least two eigenvalues");
    require(spec.n_snapshots >= 1, Errc::InvalidParam, "snapshot count must be positive");
    require(std::ranges::is_sorted(ev, std::greater<>{}), Errc::InvalidParam, "eigenvalues must be descending");
    const double floor = ev.front() * 1e-12;
    require(floor > 0.0, Errc::DegenerateSpectrum, "all eigenvalues are zero");

    const auto n = static_cast<double>(spec.n_snapshots);
    std::vector<double> terms(m);
    for (std::size_t k = 0; k < m; ++k) {
        const auto tail = static_cast<double>(m - k);
        double sum = 0.0;
        double log_sum = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            const double l = std::max(ev[i], floor);
            sum += l;
            log_sum += std::log(l);
        }
        const double log_geo = log_sum / tail;
        const double log_arith = std::log(sum / tail);
        terms[k] = -n * tail * (log_geo - log_arith);
    }
    return terms;
}

template <typename Penalised>
std::size_t argmin_criterion(const EigenSpectrum& spec, Penalised criterion) {
    const auto terms = log_likelihood_terms(spec);
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const double v = criterion(terms[k], static_cast<double>(k));
        if (v < best_value) {
            best_value = v;
            best = k;
        }
    }
    return best;
}

} // namespace detail

inline std::size_t mdl_estimate(const EigenSpectrum& spec) {
    const auto m = static_cast<double>(spec.eigenvalues.size());
    const double log_n = std::log(static_cast<double>(spec.n_snapshots));
    return detail::argmin_criterion(spec, [&](double l, double k) { return l + 0.5 * k * (2.0 * m - k) * log_n; });
}

inline std::size_t aic_estimate(const EigenSpectrum& spec) {
    const auto m = static_cast<double>(spec.eigenvalues.size());
    return detail::argmin_criterion(spec, [&](double l, double k) { return 2.0 * l + 2.0 * k * (2.0 * m - k); });
}

} // namespace topocount
