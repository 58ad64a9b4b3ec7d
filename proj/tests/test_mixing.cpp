#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "topocount/mixing.hpp"

using namespace topocount;

namespace {

constexpr double kPi = std::numbers::pi;

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::IoError;
}

std::vector<AnalyticPair> random_sources(std::mt19937_64& rng, std::size_t n, std::size_t len) {
    std::uniform_real_distribution<double> f(0.05, 0.45);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    std::vector<AnalyticPair> out;
    for (std::size_t j = 0; j < n; ++j) {
        out.push_back(analytic_pair(synthesize({ConstantTone{f(rng)}, ph(rng), {}}, 1.0, 1.0, len)));
    }
    return out;
}

} // namespace

TEST_CASE("mix: single source, unit magnitude, zero phase reproduces the source", "[mixing]") {
    const auto x = synthesize({LinearChirp{0.1, 0.3}, 0.4, {}}, 1.0, 1.0, 256);
    const std::vector<AnalyticPair> src{analytic_pair(x)};
    const MixingSystem sys(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1));
    const auto obs = mix(sys, src);
    REQUIRE(obs.size() == 1);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(obs[0][k] == Catch::Approx(x[k]).margin(1e-15));
    }
}

TEST_CASE("mix: a phase of pi/2 turns cos into -sin", "[mixing]") {
    const auto x = synthesize({ConstantTone{0.123}, 0.0, {}}, 1.0, 1.0, 512);
    const std::vector<AnalyticPair> src{analytic_pair(x)};
    Eigen::MatrixXd phase(1, 1);
    phase << kPi / 2;
    const auto obs = mix(MixingSystem(Eigen::MatrixXd::Ones(1, 1), phase), src);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(obs[0][k] == Catch::Approx(-src[0].quadrature()[k]).margin(1e-12));
    }
}

TEST_CASE("mix agrees with the direct shifted-cosine sum for analytic tones", "[mixing][property]") {
    // For an exact analytic pair (cos a, sin a) the channel is sum_j R cos(a_j + phi).
    const std::size_t len = 400;
    const std::vector<double> freqs{0.07, 0.19, 0.31};
    const std::vector<double> phase0{0.2, -1.0, 2.5};
    std::vector<AnalyticPair> src;
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        std::vector<double> c(len);
        std::vector<double> s(len);
        for (std::size_t k = 0; k < len; ++k) {
            const double a = 2 * kPi * freqs[j] * static_cast<double>(k) + phase0[j];
            c[k] = std::cos(a);
            s[k] = std::sin(a);
        }
        src.emplace_back(SampledSignal(c, 1.0), SampledSignal(s, 1.0));
    }
    const auto sys = random_mixing(3, 5, 0.5, 2.0, 17);
    const auto obs = mix(sys, src);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t k = 0; k < len; ++k) {
            double direct = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                const double a = 2 * kPi * freqs[j] * static_cast<double>(k) + phase0[j];
                direct += sys.magnitudes()(i, j) * std::cos(a + sys.phases()(i, j));
            }
            REQUIRE(std::abs(obs[i][k] - direct) <= 1e-9);
        }
    }
}

TEST_CASE("mix is linear in the magnitudes", "[mixing][property]") {
    std::mt19937_64 rng(3);
    const auto src = random_sources(rng, 2, 128);
    const auto a = random_mixing(2, 3, 0.5, 1.5, 1);
    const auto b = random_mixing(2, 3, 0.5, 1.5, 1);
    const MixingSystem doubled(2.0 * a.magnitudes(), a.phases());
    const auto ya = mix(a, src);
    const auto yb = mix(b, src);
    const auto y2 = mix(doubled, src);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < 128; ++k) {
            REQUIRE(y2[i][k] == Catch::Approx(ya[i][k] + yb[i][k]).margin(1e-12));
        }
    }
}

TEST_CASE("mix: channel i, shifted by theta, equals mixing with phi + theta", "[mixing][property]") {
    // Phase-shift closure: rotating (y, y~) by theta matches a mixing row with shifted phases.
    std::mt19937_64 rng(8);
    const auto src = random_sources(rng, 2, 256);
    Eigen::MatrixXd r(1, 2);
    r << 1.3, 0.7;
    Eigen::MatrixXd phi(1, 2);
    phi << 0.4, -0.9;
    const double theta = 0.6;
    Eigen::MatrixXd phi_shift = phi.array() + theta;
    const auto base = mix(MixingSystem(r, phi), src);
    const auto shifted = mix(MixingSystem(r, phi_shift), src);

    // y~ of the base channel, built from the source quadratures: sum R (sin phi x + cos phi x~).
    for (std::size_t k = 0; k < 256; ++k) {
        double yq = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            yq += r(0, j) * (std::sin(phi(0, j)) * src[j].in_phase()[k] + std::cos(phi(0, j)) * src[j].quadrature()[k]);
        }
        const double rotated = std::cos(theta) * base[0][k] - std::sin(theta) * yq;
        REQUIRE(shifted[0][k] == Catch::Approx(rotated).margin(1e-12));
    }
}

TEST_CASE("mix and MixingSystem reject malformed input", "[mixing]") {
    std::mt19937_64 rng(1);
    const auto src = random_sources(rng, 2, 64);
    const auto sys3 = random_mixing(3, 4, 0.5, 1.0, 1);
    CHECK(code_of([&] { mix(sys3, src); }) == Errc::DimensionMismatch);

    std::vector<AnalyticPair> ragged = src;
    ragged[1] = analytic_pair(synthesize({ConstantTone{0.1}, 0.0, {}}, 1.0, 1.0, 65));
    CHECK(code_of([&] { mix(random_mixing(2, 2, 1.0, 1.0, 1), ragged); }) == Errc::DimensionMismatch);

    CHECK(code_of([] { MixingSystem(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)); }) ==
          Errc::InvalidParam);
    CHECK(code_of([] { MixingSystem(Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Constant(2, 2, 4.0)); }) ==
          Errc::InvalidParam);
    CHECK(code_of([] { MixingSystem(Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Zero(2, 3)); }) ==
          Errc::DimensionMismatch);
    CHECK(code_of([] { random_mixing(2, 2, 1.0, 0.5, 1); }) == Errc::InvalidRange);
    CHECK(code_of([] { random_mixing(2, 2, 0.0, 0.5, 1); }) == Errc::InvalidRange);
}

TEST_CASE("random_mixing: deterministic, in range, degenerate range allowed", "[mixing]") {
    const auto a = random_mixing(3, 8, 0.5, 1.5, 42);
    const auto b = random_mixing(3, 8, 0.5, 1.5, 42);
    CHECK(a.magnitudes() == b.magnitudes());
    CHECK(a.phases() == b.phases());
    CHECK((a.magnitudes().array() >= 0.5).all());
    CHECK((a.magnitudes().array() <= 1.5).all());
    CHECK((a.phases().array().abs() <= kPi).all());
    const auto c = random_mixing(2, 2, 0.7, 0.7, 9);
    CHECK((c.magnitudes().array() == 0.7).all());
}

TEST_CASE("realization_matrix: 2x2 block layout", "[mixing]") {
    Eigen::MatrixXd r(1, 1);
    r << 2.0;
    Eigen::MatrixXd phi(1, 1);
    phi << kPi / 6;
    const auto t = realization_matrix(MixingSystem(r, phi));
    REQUIRE(t.rows() == 2);
    REQUIRE(t.cols() == 2);
    CHECK(t(0, 0) == Catch::Approx(std::sqrt(3.0)));
    CHECK(t(0, 1) == Catch::Approx(-1.0));
    CHECK(t(1, 0) == Catch::Approx(1.0));
    CHECK(t(1, 1) == Catch::Approx(std::sqrt(3.0)));
}

TEST_CASE("rank(T) = 2 rank(U) for random and deficient duals", "[mixing][property]") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(1, 6);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<std::size_t>(size(rng));
        const auto m = static_cast<std::size_t>(size(rng));
        auto sys = random_mixing(n, m, 0.3, 2.0, rng());
        Eigen::MatrixXd r = sys.magnitudes();
        Eigen::MatrixXd phi = sys.phases();
        if (trial % 3 == 0 && n >= 2) {
            // Column 1 becomes a complex multiple of column 0.
            const double scale = 1.7;
            const double rot = 0.8;
            for (Eigen::Index i = 0; i < r.rows(); ++i) {
                r(i, 1) = scale * r(i, 0);
                phi(i, 1) = std::remainder(phi(i, 0) + rot, 2 * kPi);
            }
        }
        const auto rep = independence_report(MixingSystem(r, phi));
        INFO("trial " << trial << " m=" << m << " n=" << n);
        CHECK(rep.t_rank == 2 * rep.dual_rank);
        CHECK(rep.full_column_rank == (rep.dual_rank == n));
    }
}

TEST_CASE("independence_report flags duplicated channels and more sources than sensors", "[mixing]") {
    Eigen::MatrixXd r(3, 2);
    r << 1.0, 0.5, 1.0, 0.5, 0.8, 1.2;
    Eigen::MatrixXd phi(3, 2);
    phi << 0.1, 0.2, 0.1, 0.2, -0.4, 1.0;
    const auto ok = independence_report(MixingSystem(r, phi));
    CHECK(ok.full_column_rank);
    CHECK(ok.dual_rank == 2);
    CHECK(std::isfinite(ok.condition_number));
    CHECK(ok.condition_number >= 1.0);

    // Every sensor sees the same combination: rank 1.
    Eigen::MatrixXd same_r = Eigen::MatrixXd::Ones(4, 2);
    Eigen::MatrixXd same_phi = Eigen::MatrixXd::Zero(4, 2);
    const auto dup = independence_report(MixingSystem(same_r, same_phi));
    CHECK(dup.dual_rank == 1);
    CHECK(dup.t_rank == 2);
    CHECK_FALSE(dup.full_column_rank);
    CHECK(std::isinf(dup.condition_number));

    const auto wide = independence_report(random_mixing(4, 2, 0.5, 1.5, 3));
    CHECK(wide.dual_rank == 2);
    CHECK_FALSE(wide.full_column_rank);
}

TEST_CASE("numerical_rank ignores singular values below the relative threshold", "[mixing]") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1e-3;
    a(2, 2) = 1e-14;
    CHECK(numerical_rank(a) == 2);
    CHECK(numerical_rank(Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 2))) == 0);
}
