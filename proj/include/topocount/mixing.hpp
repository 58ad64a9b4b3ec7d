#pragma once

// Array observation model: each channel is a sum of every source with its own
// relative magnitude and phase, plus the rank diagnostics of the complex dual.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "topocount/error.hpp"
#include "topocount/signals.hpp"

namespace topocount {

/// m x n complex matrix U with U(i,j) = R(i,j) * exp(i phi(i,j)).
struct ComplexDual {
    Eigen::MatrixXcd entries;
};

/// Relative magnitudes R (m x n, positive) and phases phi (m x n, in [-pi, pi]).
class MixingSystem {
public:
    MixingSystem(Eigen::MatrixXd magnitudes, Eigen::MatrixXd phases)
        : magnitudes_(std::move(magnitudes)), phases_(std::move(phases)) {
        detail::require(magnitudes_.rows() > 0 && magnitudes_.cols() > 0, Errc::InvalidParam,
                        "mixing system needs at least one observation and one source");
        detail::require(magnitudes_.rows() == phases_.rows() && magnitudes_.cols() == phases_.cols(),
                        Errc::DimensionMismatch, "magnitude and phase matrices differ in shape");
        detail::require((magnitudes_.array() > 0.0).all() && magnitudes_.allFinite(), Errc::InvalidParam,
                        "magnitudes must be positive and finite");
        detail::require((phases_.array().abs() <= std::numbers::pi).all(), Errc::InvalidParam,
                        "phases must lie in [-pi, pi]");
    }

    [[nodiscard]] std::size_t n_sources() const noexcept { return static_cast<std::size_t>(magnitudes_.cols()); }
    [[nodiscard]] std::size_t m_observations() const noexcept {
        return static_cast<std::size_t>(magnitudes_.rows());
    }
    [[nodiscard]] const Eigen::MatrixXd& magnitudes() const noexcept { return magnitudes_; }
    [[nodiscard]] const Eigen::MatrixXd& phases() const noexcept { return phases_; }

    [[nodiscard]] ComplexDual dual() const {
        Eigen::MatrixXcd u(magnitudes_.rows(), magnitudes_.cols());
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            for (Eigen::Index j = 0; j < u.cols(); ++j) {
                u(i, j) = std::polar(magnitudes_(i, j), phases_(i, j));
            }
        }
        return {std::move(u)};
    }

private:
    Eigen::MatrixXd magnitudes_;
    Eigen::MatrixXd phases_;
};

/// The m received channels; all share length and sample rate.
class ObservationSet {
public:
    explicit ObservationSet(std::vector<SampledSignal> channels) : channels_(std::move(channels)) {
        detail::require(!channels_.empty(), Errc::InvalidParam, "observation set has no channels");
        for (const auto& c : channels_) {
            detail::require(c.size() == channels_.front().size() &&
                                c.sample_rate_hz() == channels_.front().sample_rate_hz(),
                            Errc::DimensionMismatch, "channels differ in length or sample rate");
        }
    }

    [[nodiscard]] std::span<const SampledSignal> channels() const noexcept { return channels_; }
    [[nodiscard]] std::size_t size() const noexcept { return channels_.size(); }
    [[nodiscard]] std::size_t length() const noexcept { return channels_.front().size(); }
    [[nodiscard]] double sample_rate_hz() const noexcept { return channels_.front().sample_rate_hz(); }
    [[nodiscard]] const SampledSignal& operator[](std::size_t i) const { return channels_[i]; }

private:
    std::vector<SampledSignal> channels_;
};

inline MixingSystem random_mixing(std::size_t n_sources, std::size_t m_observations, double r_lo, double r_hi,
                                  std::uint64_t rng_seed) {
    detail::require(std::isfinite(r_lo) && std::isfinite(r_hi) && r_lo > 0.0 && r_lo <= r_hi, Errc::InvalidRange,
                    "magnitude range must satisfy 0 < lo <= hi");
    detail::require(n_sources > 0 && m_observations > 0, Errc::InvalidParam, "empty mixing system requested");
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> mag(r_lo, r_hi);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);

    const auto m = static_cast<Eigen::Index>(m_observations);
    const auto n = static_cast<Eigen::Index>(n_sources);
    Eigen::MatrixXd r(m, n);
    Eigen::MatrixXd phi(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            // uniform_real_distribution may return hi for degenerate [lo, lo].
            r(i, j) = r_lo == r_hi ? r_lo : mag(rng);
            phi(i, j) = phase(rng);
        }
    }
    return {std::move(r), std::move(phi)};
}

/// Channel i = sum_j R cos(phi) x_j - R sin(phi) x~_j, the angle-sum form of
/// sum_j B cos(alpha_j + phi).
inline ObservationSet mix(const MixingSystem& system, std::span<const AnalyticPair> sources) {
    detail::require(sources.size() == system.n_sources(), Errc::DimensionMismatch,
                    "expected " + std::to_string(system.n_sources()) + " sources, got " +
                        std::to_string(sources.size()));
    const std::size_t len = sources.front().size();
    const double fs = sources.front().sample_rate_hz();
    for (const auto& s : sources) {
        detail::require(s.size() == len && s.sample_rate_hz() == fs, Errc::DimensionMismatch,
                        "sources differ in length or sample rate");
    }

    std::vector<SampledSignal> channels;
    channels.reserve(system.m_observations());
    for (std::size_t i = 0; i < system.m_observations(); ++i) {
        std::vector<double> y(len, 0.0);
        for (std::size_t j = 0; j < sources.size(); ++j) {
            const double r = system.magnitudes()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            const double phi = system.phases()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            const double c = r * std::cos(phi);
            const double s = r * std::sin(phi);
            const auto x = sources[j].in_phase().samples();
            const auto xq = sources[j].quadrature().samples();
            for (std::size_t k = 0; k < len; ++k) {
                y[k] += c * x[k] - s * xq[k];
            }
        }
        channels.emplace_back(std::move(y), fs);
    }
    return ObservationSet(std::move(channels));
}

/// 2m x 2n real matrix T mapping (x_1, x~_1, ..., x_n, x~_n) to (y_1, y~_1, ..., y_m, y~_m).
inline Eigen::MatrixXd realization_matrix(const ComplexDual& dual) {
    const auto& u = dual.entries;
    Eigen::MatrixXd t(2 * u.rows(), 2 * u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            const double re = u(i, j).real();
            const double im = u(i, j).imag();
            t.block<2, 2>(2 * i, 2 * j) << re, -im, im, re;
        }
    }
    return t;
}

inline Eigen::MatrixXd realization_matrix(const MixingSystem& system) { return realization_matrix(system.dual()); }

namespace detail {

template <typename Vector>
std::size_t numerical_rank(const Vector& singular_values, Eigen::Index max_dim) {
    if (singular_values.size() == 0) {
        return 0;
    }
    const double sigma_max = singular_values(0);
    const double threshold = static_cast<double>(max_dim) * sigma_max * 1e-10;
    std::size_t rank = 0;
    for (Eigen::Index k = 0; k < singular_values.size(); ++k) {
        if (singular_values(k) > threshold) {
            ++rank;
        }
    }
    return rank;
}

} // namespace detail

/// Singular values at most max(rows, cols) * sigma_max * 1e-10 count as zero.
inline std::size_t numerical_rank(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return detail::numerical_rank(svd.singularValues(), std::max(a.rows(), a.cols()));
}

inline std::size_t numerical_rank(const Eigen::MatrixXcd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    return detail::numerical_rank(svd.singularValues(), std::max(a.rows(), a.cols()));
}

struct IndependenceReport {
    std::size_t dual_rank = 0;
    std::size_t t_rank = 0;
    /// sigma_max / sigma_min of U; infinite when U is column-rank deficient.
    double condition_number = 0.0;
    bool full_column_rank = false;
};

inline IndependenceReport independence_report(const ComplexDual& dual) {
    const auto& u = dual.entries;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(u);
    const auto& sv = svd.singularValues();

    IndependenceReport report;
    report.dual_rank = detail::numerical_rank(sv, std::max(u.rows(), u.cols()));
    report.t_rank = numerical_rank(realization_matrix(dual));
    report.full_column_rank = report.dual_rank == static_cast<std::size_t>(u.cols());
    if (report.full_column_rank && sv.size() > 0) {
        report.condition_number = sv(0) / sv(sv.size() - 1);
    } else {
        report.condition_number = std::numeric_limits<double>::infinity();
    }
    return report;
}

inline IndependenceReport independence_report(const MixingSystem& system) {
    return independence_report(system.dual());
}

} // namespace topocount
