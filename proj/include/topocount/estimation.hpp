#pragma once

// Betti numbers from a barcode and the (1+q)^n torus matching rule.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "topocount/barcode.hpp"
#include "topocount/embedding.hpp"
#include "topocount/error.hpp"
#include "topocount/persistence.hpp"

namespace topocount {

struct BettiSequence {
    std::vector<std::size_t> betti;
    double max_filtration = 0.0;

    friend bool operator==(const BettiSequence&, const BettiSequence&) = default;
};

/// Counts, per dimension, the intervals lasting at least persistence_fraction of the
/// filtration ceiling. Essential classes last until the ceiling.
inline BettiSequence extract_betti(const Barcode& barcode, double persistence_fraction = 0.5) {
    detail::require(persistence_fraction > 0.0 && persistence_fraction <= 1.0, Errc::InvalidParam,
                    "persistence fraction must lie in (0, 1]");
    const double ceiling = barcode.max_filtration;
    const double threshold = persistence_fraction * ceiling;
    // Entry times are grid multiples, so allow for rounding in death - birth.
    const double slack = 1e-9 * std::max(1.0, std::abs(ceiling));

    BettiSequence seq;
    seq.max_filtration = ceiling;
    seq.betti.resize(barcode.intervals.size(), 0);
    for (std::size_t d = 0; d < barcode.intervals.size(); ++d) {
        for (const auto& iv : barcode.intervals[d]) {
            const double death = iv.infinite ? ceiling : iv.death;
            if (death - iv.birth >= threshold - slack) {
                ++seq.betti[d];
            }
        }
    }
    return seq;
}

/// Coefficients of (1+q)^n.
inline std::vector<std::size_t> binomial_row(std::size_t n) {
    std::vector<std::size_t> row(n + 1, 1);
    for (std::size_t k = 1; k < n; ++k) {
        row[k] = row[k - 1] * (n - k + 1) / k;
    }
    return row;
}

enum class MatchStatus { Match, NoMatch, Degenerate };

constexpr std::string_view to_string(MatchStatus s) noexcept {
    switch (s) {
    case MatchStatus::Match: return "Match";
    case MatchStatus::NoMatch: return "NoMatch";
    case MatchStatus::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

struct SourceCountEstimate {
    MatchStatus status = MatchStatus::Degenerate;
    std::optional<std::size_t> n; // set on Match
    BettiSequence betti_observed;
    std::optional<std::vector<std::size_t>> betti_expected;

    [[nodiscard]] bool matched(std::size_t sources) const {
        return status == MatchStatus::Match && n == sources;
    }
};

/// Guess n = betti[1] and accept only if the trailing-zero-stripped sequence is
/// exactly row n of Pascal's triangle. {1} alone is the n = 0 (no source) case.
inline SourceCountEstimate match_binomial(const BettiSequence& seq) {
    SourceCountEstimate est;
    est.betti_observed = seq;

    std::vector<std::size_t> stripped = seq.betti;
    while (!stripped.empty() && stripped.back() == 0) {
        stripped.pop_back();
    }
    if (stripped.empty() || stripped.front() != 1) {
        est.status = MatchStatus::Degenerate;
        return est;
    }
    const std::size_t guess = stripped.size() > 1 ? stripped[1] : 0;
    // Row `guess` has guess + 1 entries; checking the length first keeps huge guesses cheap.
    if (stripped.size() == guess + 1) {
        auto expected = binomial_row(guess);
        if (expected == stripped) {
            est.status = MatchStatus::Match;
            est.n = guess;
            est.betti_expected = std::move(expected);
            return est;
        }
    }
    est.status = MatchStatus::NoMatch;
    // Rows past ~60 overflow 64 bits; no finite Betti sequence matches them anyway.
    if (guess <= 60) {
        est.betti_expected = binomial_row(guess);
    }
    return est;
}

struct TdaConfig {
    std::size_t landmarks = 150;
    std::size_t first_landmark = 0;
    std::size_t nu = 1;
    double max_filtration = 0.24;
    std::size_t divisions = 100;
    std::size_t max_dimension = 4;
    double persistence_fraction = 0.5;
};

struct EstimateDiagnostics {
    Barcode barcode;
    LandmarkSet landmarks;
    std::size_t simplex_count = 0;
    double landmark_seconds = 0.0;
    double complex_seconds = 0.0;
    double reduction_seconds = 0.0;
};

struct EstimateResult {
    SourceCountEstimate estimate;
    EstimateDiagnostics diagnostics;
};

/// landmarks -> lazy witness complex -> persistence -> Betti numbers -> binomial match.
/// NoMatch and Degenerate are outcomes, not errors.
inline EstimateResult estimate_sources(const PointCloud& cloud, const TdaConfig& config) {
    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    EstimateResult result;
    auto t0 = clock::now();
    result.diagnostics.landmarks = maxmin_landmarks(cloud, config.landmarks, config.first_landmark);
    result.diagnostics.landmark_seconds = seconds_since(t0);

    t0 = clock::now();
    const auto complex = lazy_witness_complex(
        cloud, result.diagnostics.landmarks,
        {.nu = config.nu, .max_filtration = config.max_filtration, .max_dimension = config.max_dimension,
         .divisions = config.divisions});
    result.diagnostics.complex_seconds = seconds_since(t0);
    result.diagnostics.simplex_count = complex.simplices.size();

    t0 = clock::now();
    result.diagnostics.barcode = reduce_and_extract(complex);
    result.diagnostics.reduction_seconds = seconds_since(t0);

    result.estimate = match_binomial(extract_betti(result.diagnostics.barcode, config.persistence_fraction));
    return result;
}

} // namespace topocount
