#pragma once

// Constant-amplitude monocomponent synthesis, discrete Hilbert transform and
// edge trimming.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "topocount/error.hpp"

namespace topocount {

/// Real discrete-time signal. Samples are finite and non-empty, the rate is positive.
class SampledSignal {
public:
    SampledSignal(std::vector<double> samples, double sample_rate_hz)
        : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
        detail::require(!samples_.empty(), Errc::InvalidParam, "signal has no samples");
        detail::require(std::isfinite(sample_rate_hz_) && sample_rate_hz_ > 0.0, Errc::InvalidParam,
                        "sample rate must be positive");
        detail::require(std::ranges::all_of(samples_, [](double v) { return std::isfinite(v); }),
                        Errc::InvalidParam, "signal contains non-finite samples");
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const { return samples_[k]; }

    /// Mean of the squared samples.
    [[nodiscard]] double power() const noexcept {
        double acc = 0.0;
        for (double v : samples_) {
            acc += v * v;
        }
        return acc / static_cast<double>(samples_.size());
    }

    friend bool operator==(const SampledSignal&, const SampledSignal&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
};

struct LinearChirp {
    double f_start_hz;
    double f_end_hz;
};

/// f(t) = f_center + f_dev * sin(2 pi sweep_rate t)
struct SinusoidalSweep {
    double f_center_hz;
    double f_dev_hz;
    double sweep_rate_hz;
};

struct ConstantTone {
    double f_hz;
};

/// Instantaneous-frequency law of a monocomponent source plus its starting phase.
struct PhaseProfile {
    std::variant<LinearChirp, SinusoidalSweep, ConstantTone> kind;
    double initial_phase_rad = 0.0;
    // Time over which a linear chirp moves from f_start to f_end; the final
    // frequency is held afterwards. Unset means "the synthesized length".
    std::optional<double> duration_s;

    [[nodiscard]] double instantaneous_frequency(double t, double span_s) const {
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, LinearChirp>) {
                    const double u = span_s > 0.0 ? std::min(t / span_s, 1.0) : 0.0;
                    return k.f_start_hz + (k.f_end_hz - k.f_start_hz) * u;
                } else if constexpr (std::is_same_v<K, SinusoidalSweep>) {
                    return k.f_center_hz + k.f_dev_hz * std::sin(2.0 * std::numbers::pi * k.sweep_rate_hz * t);
                } else {
                    return k.f_hz;
                }
            },
            kind);
    }
};

/// A signal together with its discrete Hilbert transform.
class AnalyticPair {
public:
    AnalyticPair(SampledSignal in_phase, SampledSignal quadrature)
        : in_phase_(std::move(in_phase)), quadrature_(std::move(quadrature)) {
        detail::require(in_phase_.size() == quadrature_.size() &&
                            in_phase_.sample_rate_hz() == quadrature_.sample_rate_hz(),
                        Errc::DimensionMismatch, "analytic pair components differ in length or rate");
    }

    [[nodiscard]] const SampledSignal& in_phase() const noexcept { return in_phase_; }
    [[nodiscard]] const SampledSignal& quadrature() const noexcept { return quadrature_; }
    [[nodiscard]] std::size_t size() const noexcept { return in_phase_.size(); }
    [[nodiscard]] double sample_rate_hz() const noexcept { return in_phase_.sample_rate_hz(); }

    /// in_phase[k]^2 + quadrature[k]^2
    [[nodiscard]] std::vector<double> envelope_squared() const {
        std::vector<double> out(size());
        for (std::size_t k = 0; k < size(); ++k) {
            out[k] = in_phase_[k] * in_phase_[k] + quadrature_[k] * quadrature_[k];
        }
        return out;
    }

private:
    SampledSignal in_phase_;
    SampledSignal quadrature_;
};

namespace detail {

inline void check_nyquist(double f, double sample_rate_hz) {
    if (!(f > 0.0 && f < 0.5 * sample_rate_hz)) {
        throw Error(Errc::NyquistViolation, "instantaneous frequency " + std::to_string(f) +
                                                " Hz outside (0, " + std::to_string(0.5 * sample_rate_hz) + ")");
    }
}

} // namespace detail

/// Cumulative phase alpha[k] of a profile, integrated with the trapezoidal rule.
inline std::vector<double> phase_track(const PhaseProfile& profile, double sample_rate_hz, std::size_t n_samples) {
    detail::require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, Errc::InvalidParam,
                    "sample rate must be positive");
    detail::require(n_samples > 0, Errc::InvalidParam, "n_samples must be positive");
    detail::require(std::abs(profile.initial_phase_rad) <= std::numbers::pi, Errc::InvalidParam,
                    "initial phase outside [-pi, pi]");
    const double span = profile.duration_s.value_or(static_cast<double>(n_samples) / sample_rate_hz);
    detail::require(std::isfinite(span) && span > 0.0, Errc::InvalidParam, "duration must be positive");

    // Sweep extremes and chirp endpoints are checked even if the sample grid misses them.
    if (const auto* chirp = std::get_if<LinearChirp>(&profile.kind)) {
        detail::check_nyquist(chirp->f_start_hz, sample_rate_hz);
        detail::check_nyquist(chirp->f_end_hz, sample_rate_hz);
    }
    if (const auto* sweep = std::get_if<SinusoidalSweep>(&profile.kind)) {
        detail::check_nyquist(sweep->f_center_hz - std::abs(sweep->f_dev_hz), sample_rate_hz);
        detail::check_nyquist(sweep->f_center_hz + std::abs(sweep->f_dev_hz), sample_rate_hz);
    }

    const double dt = 1.0 / sample_rate_hz;
    std::vector<double> alpha(n_samples);
    double f_prev = profile.instantaneous_frequency(0.0, span);
    detail::check_nyquist(f_prev, sample_rate_hz);
    alpha[0] = profile.initial_phase_rad;
    for (std::size_t k = 1; k < n_samples; ++k) {
        const double f = profile.instantaneous_frequency(static_cast<double>(k) * dt, span);
        detail::check_nyquist(f, sample_rate_hz);
        alpha[k] = alpha[k - 1] + std::numbers::pi * (f_prev + f) * dt;
        f_prev = f;
    }
    return alpha;
}

/// A * cos(alpha[k]).
inline SampledSignal synthesize(const PhaseProfile& profile, double amplitude, double sample_rate_hz,
                                std::size_t n_samples) {
    detail::require(std::isfinite(amplitude) && amplitude > 0.0, Errc::InvalidParam, "amplitude must be positive");
    auto alpha = phase_track(profile, sample_rate_hz, n_samples);
    for (double& a : alpha) {
        a = amplitude * std::cos(a);
    }
    return {std::move(alpha), sample_rate_hz};
}

/// Discrete Hilbert transform by one-sided spectrum doubling of the full-length DFT.
inline std::vector<double> hilbert_transform(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> time(x.begin(), x.end());
    std::vector<std::complex<double>> freq;
    Eigen::FFT<double> fft;
    fft.fwd(freq, time);

    // Analytic-signal weights: 1 at DC and Nyquist, 2 on positive bins, 0 on negative bins.
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < n; ++k) {
        if (k < (n + 1) / 2) {
            freq[k] *= 2.0;
        } else if (!(n % 2 == 0 && k == half)) {
            freq[k] = 0.0;
        }
    }
    fft.inv(time, freq);

    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = time[k].imag();
    }
    return out;
}

inline constexpr std::size_t kMinHilbertLength = 8;

inline AnalyticPair analytic_pair(const SampledSignal& x) {
    detail::require(x.size() >= kMinHilbertLength, Errc::SignalTooShort,
                    "need at least " + std::to_string(kMinHilbertLength) + " samples, got " +
                        std::to_string(x.size()));
    return {x, SampledSignal(hilbert_transform(x.samples()), x.sample_rate_hz())};
}

/// Number of samples dropped from each end for a given fraction.
inline std::size_t trim_count(std::size_t n, double fraction) {
    detail::require(std::isfinite(fraction) && fraction >= 0.0 && fraction < 0.5, Errc::InvalidFraction,
                    "trim fraction must lie in [0, 0.5)");
    // The small bias absorbs representation error such as 0.29 * 100 = 28.999...
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

inline SampledSignal trim_fraction(const SampledSignal& x, double fraction) {
    const std::size_t cut = trim_count(x.size(), fraction);
    detail::require(x.size() >= 2 * cut + 2, Errc::ResultEmpty, "fewer than 2 samples remain after trimming");
    const auto s = x.samples();
    return {std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(cut),
                                s.end() - static_cast<std::ptrdiff_t>(cut)),
            x.sample_rate_hz()};
}

inline AnalyticPair trim_fraction(const AnalyticPair& p, double fraction) {
    return {trim_fraction(p.in_phase(), fraction), trim_fraction(p.quadrature(), fraction)};
}

/// Adds zero-mean white Gaussian noise at the given SNR relative to the signal's own power.
/// An SNR of +infinity disables the noise.
inline SampledSignal add_awgn(const SampledSignal& x, double snr_db, std::uint64_t rng_seed) {
    detail::require(!std::isnan(snr_db), Errc::InvalidParam, "SNR is NaN");
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return x;
    }
    const double power = x.power();
    detail::require(power > 0.0, Errc::ZeroPowerSignal, "cannot set an SNR against a zero-power signal");
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::vector<double> out(x.samples().begin(), x.samples().end());
    for (double& v : out) {
        v += gauss(rng);
    }
    return {std::move(out), x.sample_rate_hz()};
}

} // namespace topocount
