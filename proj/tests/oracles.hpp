#pragma once

// Independent reference computations used only by the tests. Nothing here calls
// into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "topocount/persistence.hpp"

namespace oracle {

/// Rank over Z/2 of a dense 0/1 matrix by Gaussian elimination.
inline std::size_t rank_z2(std::vector<std::vector<std::uint8_t>> rows) {
    if (rows.empty()) {
        return 0;
    }
    const std::size_t cols = rows.front().size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][c] == 0) {
            ++pivot;
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[pivot], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && rows[r][c] != 0) {
                for (std::size_t k = c; k < cols; ++k) {
                    rows[r][k] ^= rows[rank][k];
                }
            }
        }
        ++rank;
    }
    return rank;
}

/// Betti numbers (dimensions 0..max_dim) of the subcomplex of simplices with value <= t,
/// via beta_d = #d-simplices - rank(boundary_d) - rank(boundary_{d+1}).
inline std::vector<std::size_t> betti_at(std::span<const topocount::Simplex> simplices, double t,
                                         std::size_t max_dim) {
    std::vector<std::vector<std::vector<topocount::Vertex>>> by_dim(max_dim + 2);
    for (const auto& s : simplices) {
        if (s.value <= t && s.dimension() <= max_dim + 1) {
            by_dim[s.dimension()].push_back(s.vertices);
        }
    }
    // boundary_d : C_d -> C_{d-1}, rows indexed by (d-1)-simplices.
    auto boundary_rank = [&](std::size_t d) -> std::size_t {
        if (d == 0 || by_dim[d].empty() || by_dim[d - 1].empty()) {
            return 0;
        }
        std::map<std::vector<topocount::Vertex>, std::size_t> row_of;
        for (std::size_t i = 0; i < by_dim[d - 1].size(); ++i) {
            row_of[by_dim[d - 1][i]] = i;
        }
        std::vector<std::vector<std::uint8_t>> m(by_dim[d - 1].size(), std::vector<std::uint8_t>(by_dim[d].size(), 0));
        for (std::size_t j = 0; j < by_dim[d].size(); ++j) {
            const auto& v = by_dim[d][j];
            for (std::size_t drop = 0; drop < v.size(); ++drop) {
                auto face = v;
                face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
                m[row_of.at(face)][j] = 1;
            }
        }
        return rank_z2(std::move(m));
    };
    std::vector<std::size_t> ranks(max_dim + 2, 0);
    for (std::size_t d = 1; d <= max_dim + 1; ++d) {
        ranks[d] = boundary_rank(d);
    }
    std::vector<std::size_t> betti(max_dim + 1);
    for (std::size_t d = 0; d <= max_dim; ++d) {
        betti[d] = by_dim[d].size() - ranks[d] - ranks[d + 1];
    }
    return betti;
}

/// Random simplicial complex closed under faces, at most max_simplices simplices and
/// dimension at most max_dim, with integer filtration values monotone along faces.
inline topocount::FilteredComplex random_complex(std::mt19937_64& rng, std::size_t max_simplices, std::size_t max_dim) {
    std::uniform_int_distribution<int> vertex_count(2, 7);
    const auto n_vertices = static_cast<topocount::Vertex>(vertex_count(rng));
    std::uniform_int_distribution<std::size_t> dim_draw(0, max_dim);
    std::uniform_int_distribution<int> value_draw(0, 6);

    std::map<std::vector<topocount::Vertex>, double> values;
    auto add_closed = [&](const std::vector<topocount::Vertex>& s, auto&& self) -> double {
        if (auto it = values.find(s); it != values.end()) {
            return it->second;
        }
        double v = value_draw(rng);
        if (s.size() > 1) {
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                auto face = s;
                face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
                v = std::max(v, self(face, self));
            }
        }
        values[s] = v;
        return v;
    };

    for (int attempt = 0; attempt < 200; ++attempt) {
        const std::size_t dim = std::min<std::size_t>(dim_draw(rng), n_vertices - 1);
        std::vector<topocount::Vertex> all(n_vertices);
        for (topocount::Vertex v = 0; v < n_vertices; ++v) {
            all[v] = v;
        }
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<topocount::Vertex> s(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(dim + 1));
        std::sort(s.begin(), s.end());
        auto trial = values;
        add_closed(s, add_closed);
        if (values.size() > max_simplices) {
            values = std::move(trial);
            break;
        }
    }

    topocount::FilteredComplex complex;
    complex.max_dimension = max_dim;
    complex.max_filtration = 6.0;
    for (const auto& [verts, v] : values) {
        complex.simplices.push_back({verts, v});
    }
    complex.sort();
    return complex;
}

/// |X(f)| of a real sequence at an arbitrary frequency by direct summation, scaled so a
/// tone A cos(2 pi f k / fs) reads approximately A.
inline double dft_amplitude(std::span<const double> x, double f, double fs) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        acc += x[k] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(k) / fs);
    }
    return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

/// Frequency of the largest Hann-windowed DFT bin of x[start, start+len).
inline double windowed_peak_hz(std::span<const double> x, std::size_t start, std::size_t len, double fs) {
    std::vector<double> w(len);
    for (std::size_t k = 0; k < len; ++k) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len));
        w[k] = hann * x[start + k];
    }
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t bin = 1; bin < len / 2; ++bin) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            acc += w[k] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(bin * k) / static_cast<double>(len));
        }
        if (std::abs(acc) > best_mag) {
            best_mag = std::abs(acc);
            best = bin;
        }
    }
    return static_cast<double>(best) * fs / static_cast<double>(len);
}

} // namespace oracle
