#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "topocount/estimation.hpp"

using namespace topocount;

namespace {

BettiSequence seq(std::vector<std::size_t> b) { return {std::move(b), 1.0}; }

// Pascal row by repeated addition, independent of binomial_row.
std::vector<std::size_t> pascal(std::size_t n) {
    std::vector<std::size_t> row{1};
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::size_t> next(row.size() + 1, 0);
        for (std::size_t k = 0; k < row.size(); ++k) {
            next[k] += row[k];
            next[k + 1] += row[k];
        }
        row = std::move(next);
    }
    return row;
}

bool is_pascal_row(std::vector<std::size_t> b) {
    while (!b.empty() && b.back() == 0) {
        b.pop_back();
    }
    for (std::size_t n = 0; n <= 12; ++n) {
        if (b == pascal(n)) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("match_binomial: hand examples", "[estimation]") {
    const auto three = match_binomial(seq({1, 3, 3, 1, 0, 0, 0, 0, 0}));
    CHECK(three.status == MatchStatus::Match);
    CHECK(three.n == 3u);
    CHECK(three.betti_expected == std::vector<std::size_t>{1, 3, 3, 1});
    CHECK(three.matched(3));
    CHECK_FALSE(three.matched(2));

    CHECK(match_binomial(seq({1, 2, 1})).n == 2u);
    CHECK(match_binomial(seq({1, 1})).n == 1u);

    const auto zero = match_binomial(seq({1}));
    CHECK(zero.status == MatchStatus::Match);
    CHECK(zero.n == 0u);
    CHECK(match_binomial(seq({1, 0, 0})).n == 0u);

    const auto off = match_binomial(seq({1, 3, 2, 1}));
    CHECK(off.status == MatchStatus::NoMatch);
    CHECK_FALSE(off.n.has_value());
    CHECK(off.betti_expected == std::vector<std::size_t>{1, 3, 3, 1});

    CHECK(match_binomial(seq({1, 84, 0, 0})).status == MatchStatus::NoMatch);
    CHECK(match_binomial(seq({2, 1})).status == MatchStatus::Degenerate);
    CHECK(match_binomial(seq({0, 1})).status == MatchStatus::Degenerate);
    CHECK(match_binomial(seq({})).status == MatchStatus::Degenerate);
    CHECK(match_binomial(seq({0, 0})).status == MatchStatus::Degenerate);
    CHECK(match_binomial(seq({1, 2, 1, 0, 1})).status == MatchStatus::NoMatch);
}

TEST_CASE("binomial_row", "[estimation]") {
    CHECK(binomial_row(0) == std::vector<std::size_t>{1});
    CHECK(binomial_row(4) == std::vector<std::size_t>{1, 4, 6, 4, 1});
    for (std::size_t n = 0; n <= 30; ++n) {
        REQUIRE(binomial_row(n) == pascal(n));
    }
}

TEST_CASE("matching soundness for n = 0..10, with and without trailing zeros", "[estimation][property]") {
    for (std::size_t n = 0; n <= 10; ++n) {
        auto row = pascal(n);
        CHECK(match_binomial(seq(row)).matched(n));
        row.resize(row.size() + 3, 0);
        CHECK(match_binomial(seq(row)).matched(n));
    }
}

TEST_CASE("matching completeness and uniqueness on a fuzz corpus", "[estimation][property]") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> len(0, 9);
    std::uniform_int_distribution<int> pick(0, 3);
    std::size_t matches = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        std::vector<std::size_t> b;
        // Half the corpus starts from a true row and perturbs it, so matches occur often.
        if (pick(rng) < 2) {
            b = pascal(len(rng) % 8);
            if (pick(rng) == 0 && !b.empty()) {
                std::uniform_int_distribution<std::size_t> at(0, b.size() - 1);
                b[at(rng)] += 1;
            }
            if (pick(rng) == 0) {
                b.push_back(0);
            }
        } else {
            const auto l = len(rng);
            std::uniform_int_distribution<std::size_t> v(0, 4);
            for (std::size_t i = 0; i < l; ++i) {
                b.push_back(v(rng));
            }
        }
        const auto est = match_binomial(seq(b));
        const bool want = is_pascal_row(b);
        INFO("trial " << trial);
        REQUIRE((est.status == MatchStatus::Match) == want);
        if (want) {
            ++matches;
            std::size_t hits = 0;
            for (std::size_t n = 0; n <= 12; ++n) {
                auto stripped = b;
                while (!stripped.empty() && stripped.back() == 0) {
                    stripped.pop_back();
                }
                hits += stripped == pascal(n) ? 1 : 0;
            }
            REQUIRE(hits == 1);
            REQUIRE(est.betti_expected == pascal(*est.n));
        }
    }
    CHECK(matches > 1000);
}

TEST_CASE("extract_betti: half-interval rule with essential classes", "[estimation]") {
    Barcode b(2, 0.24);
    b.intervals[0] = {{0.0, 0.24, true}, {0.0, 0.0024, false}, {0.0, 0.0, false}};
    b.intervals[1] = {{0.0, 0.12, false}, {0.0024, 0.12, false}, {0.01, 0.24, true}};
    b.intervals[2] = {{0.2, 0.24, true}};
    const auto s = extract_betti(b, 0.5);
    CHECK(s.betti == std::vector<std::size_t>{1, 2, 0});
    CHECK(s.max_filtration == 0.24);
    CHECK_THROWS_AS(extract_betti(b, 0.0), Error);
    CHECK_THROWS_AS(extract_betti(b, 1.5), Error);
}

TEST_CASE("extract_betti is non-increasing in the persistence fraction", "[estimation][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Barcode b(3, 1.0);
        for (auto& dim : b.intervals) {
            for (int k = 0; k < 8; ++k) {
                const double x = u(rng);
                const double y = u(rng);
                dim.push_back({std::min(x, y), std::max(x, y), u(rng) < 0.1});
            }
        }
        auto prev = extract_betti(b, 0.01).betti;
        for (int step = 2; step <= 100; ++step) {
            const auto cur = extract_betti(b, 0.01 * step).betti;
            for (std::size_t d = 0; d < cur.size(); ++d) {
                REQUIRE(cur[d] <= prev[d]);
            }
            prev = cur;
        }
    }
}

TEST_CASE("estimate_sources: a single circle is Match(1)", "[estimation]") {
    PointMatrix p(2000, 2);
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
        const double a = 0.01 * std::numbers::sqrt2 * static_cast<double>(k);
        p(k, 0) = std::cos(a);
        p(k, 1) = std::sin(a);
    }
    TdaConfig cfg;
    cfg.landmarks = 50;
    cfg.max_filtration = 0.5;
    cfg.max_dimension = 2;
    const auto r = estimate_sources(PointCloud(p), cfg);
    CHECK(r.estimate.matched(1));
    CHECK(r.diagnostics.landmarks.size() == 50);
    CHECK(r.diagnostics.simplex_count > 50);
    CHECK(r.diagnostics.barcode.max_dimension() == 2);
}
