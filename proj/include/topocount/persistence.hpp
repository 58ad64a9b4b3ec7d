#pragma once

// Persistent homology over Z/2 on a lazy witness filtration:
// max-min landmarks -> lazy witness flag complex -> twisted column reduction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "topocount/barcode.hpp"
#include "topocount/embedding.hpp"
#include "topocount/error.hpp"

namespace topocount {

using Vertex = std::uint32_t;

struct LandmarkSet {
    std::vector<std::size_t> indices;
    /// max over cloud points of the distance to the nearest landmark
    double cover_radius = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
};

/// Greedy max-min selection. Starts at first_index and repeatedly adds the point
/// farthest from the current set; ties go to the lowest point index.
inline LandmarkSet maxmin_landmarks(const PointCloud& cloud, std::size_t count, std::size_t first_index = 0) {
    const std::size_t n = cloud.size();
    detail::require(count >= 1, Errc::InvalidParam, "need at least one landmark");
    detail::require(count <= n, Errc::TooManyLandmarks,
                    std::to_string(count) + " landmarks requested from " + std::to_string(n) + " points");
    detail::require(first_index < n, Errc::InvalidParam, "first landmark index out of range");

    // Chosen points are marked with -1 so they never win the argmax again.
    constexpr double kChosen = -1.0;
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    LandmarkSet set;
    set.indices.reserve(count);

    std::size_t next = first_index;
    for (std::size_t l = 0; l < count; ++l) {
        set.indices.push_back(next);
        nearest[next] = kChosen;
        const auto anchor = cloud.point(next);
        std::size_t best = n;
        double best_dist = kChosen;
        for (std::size_t p = 0; p < n; ++p) {
            if (nearest[p] == kChosen) {
                continue;
            }
            const double d = (cloud.point(p) - anchor).norm();
            if (d < nearest[p]) {
                nearest[p] = d;
            }
            if (nearest[p] > best_dist) {
                best_dist = nearest[p];
                best = p;
            }
        }
        set.cover_radius = std::max(0.0, best_dist);
        if (best == n) {
            break;
        }
        next = best;
    }
    return set;
}

struct Simplex {
    std::vector<Vertex> vertices; // strictly increasing
    double value = 0.0;

    [[nodiscard]] std::size_t dimension() const noexcept { return vertices.size() - 1; }
};

/// Canonical filtration order: value, then dimension, then vertices lexicographically.
inline bool filtration_less(const Simplex& a, const Simplex& b) {
    if (a.value != b.value) {
        return a.value < b.value;
    }
    if (a.vertices.size() != b.vertices.size()) {
        return a.vertices.size() < b.vertices.size();
    }
    return a.vertices < b.vertices;
}

/// Simplices in filtration order. Homology is tracked up to max_dimension; simplices
/// may go one dimension higher so that the top homology dimension can die.
struct FilteredComplex {
    std::vector<Simplex> simplices;
    std::size_t max_dimension = 0;
    double max_filtration = 0.0;

    void sort() { std::ranges::sort(simplices, filtration_less); }

    [[nodiscard]] std::size_t count(std::size_t dim) const {
        return static_cast<std::size_t>(
            std::ranges::count_if(simplices, [dim](const Simplex& s) { return s.dimension() == dim; }));
    }
};

struct WitnessOptions {
    std::size_t nu = 1;
    double max_filtration = 0.24;
    std::size_t max_dimension = 2;
    /// Entry times are rounded up to multiples of max_filtration / divisions; 0 keeps exact values.
    std::size_t divisions = 100;
};

namespace detail {

inline double snap_up(double value, double ceiling, std::size_t divisions) {
    if (value <= 0.0) {
        return 0.0;
    }
    if (divisions == 0) {
        return value;
    }
    const double step = ceiling / static_cast<double>(divisions);
    auto k = static_cast<std::size_t>(std::ceil(value / step - 1e-9));
    k = std::min(k, divisions);
    return k == divisions ? ceiling : static_cast<double>(k) * step;
}

/// Dense symmetric table of edge entry values; +inf marks a missing edge.
class EdgeTable {
public:
    explicit EdgeTable(std::size_t n) : n_(n), values_(n * n, std::numeric_limits<double>::infinity()) {}

    [[nodiscard]] double operator()(std::size_t a, std::size_t b) const { return values_[a * n_ + b]; }

    void lower(std::size_t a, std::size_t b, double v) {
        if (v < values_[a * n_ + b]) {
            values_[a * n_ + b] = v;
            values_[b * n_ + a] = v;
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

/// Lazy witness edge values: for each witness x with nu-th nearest landmark distance
/// m(x), edge {a,b} is witnessed at max(d(x,a), d(x,b)) - m(x), clamped at 0.
inline EdgeTable lazy_witness_edges(const PointCloud& cloud, const LandmarkSet& landmarks, std::size_t nu,
                                    double max_filtration) {
    const std::size_t count = landmarks.size();
    EdgeTable edges(count);

    PointMatrix anchors(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(cloud.dimension()));
    for (std::size_t l = 0; l < count; ++l) {
        anchors.row(static_cast<Eigen::Index>(l)) = cloud.point(landmarks.indices[l]);
    }

    std::vector<double> dist(count);
    std::vector<Vertex> order(count);
    std::vector<double> sorted_dist(count);
    for (std::size_t w = 0; w < cloud.size(); ++w) {
        const auto x = cloud.point(w);
        for (std::size_t l = 0; l < count; ++l) {
            dist[l] = (anchors.row(static_cast<Eigen::Index>(l)) - x).norm();
        }
        double m_nu = 0.0;
        if (nu > 0) {
            sorted_dist = dist;
            std::nth_element(sorted_dist.begin(), sorted_dist.begin() + static_cast<std::ptrdiff_t>(nu - 1),
                             sorted_dist.end());
            m_nu = sorted_dist[nu - 1];
        }
        const double reach = max_filtration + m_nu;
        std::size_t within = 0;
        for (std::size_t l = 0; l < count; ++l) {
            if (dist[l] <= reach) {
                order[within++] = static_cast<Vertex>(l);
            }
        }
        std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(within), [&](Vertex a, Vertex b) {
            return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
        });
        for (std::size_t j = 1; j < within; ++j) {
            const double v = std::max(0.0, dist[order[j]] - m_nu);
            for (std::size_t i = 0; i < j; ++i) {
                edges.lower(order[i], order[j], v);
            }
        }
    }
    return edges;
}

/// Flag (clique) expansion of a weighted graph: every clique up to top_dimension
/// enters at the largest value among its edges.
inline std::vector<Simplex> flag_expansion(const EdgeTable& edges, double max_filtration, std::size_t top_dimension,
                                           std::size_t divisions) {
    const std::size_t n = edges.size();
    std::vector<std::vector<Vertex>> upper(n);
    std::vector<Simplex> out;
    for (std::size_t v = 0; v < n; ++v) {
        out.push_back({{static_cast<Vertex>(v)}, 0.0});
        for (std::size_t u = v + 1; u < n; ++u) {
            if (edges(v, u) <= max_filtration) {
                upper[v].push_back(static_cast<Vertex>(u));
            }
        }
    }
    if (top_dimension == 0) {
        return out;
    }

    struct Frame {
        std::vector<Vertex> vertices;
        double value;
        std::vector<Vertex> candidates;
    };
    std::vector<Frame> stack;
    for (std::size_t v = 0; v < n; ++v) {
        stack.push_back({{static_cast<Vertex>(v)}, 0.0, upper[v]});
        while (!stack.empty()) {
            Frame frame = std::move(stack.back());
            stack.pop_back();
            for (std::size_t c = 0; c < frame.candidates.size(); ++c) {
                const Vertex next = frame.candidates[c];
                double value = frame.value;
                for (Vertex u : frame.vertices) {
                    value = std::max(value, edges(u, next));
                }
                std::vector<Vertex> verts = frame.vertices;
                verts.push_back(next);
                out.push_back({verts, snap_up(value, max_filtration, divisions)});
                if (verts.size() <= top_dimension) {
                    std::vector<Vertex> common;
                    const auto& nb = upper[next];
                    std::set_intersection(frame.candidates.begin() + static_cast<std::ptrdiff_t>(c) + 1,
                                          frame.candidates.end(), nb.begin(), nb.end(), std::back_inserter(common));
                    if (!common.empty()) {
                        stack.push_back({std::move(verts), value, std::move(common)});
                    }
                }
            }
        }
    }
    return out;
}

struct VertexListHash {
    std::size_t operator()(const std::vector<Vertex>& v) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (Vertex x : v) {
            h ^= x;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace detail

/// Lazy witness filtration on the landmarks, witnessed by every cloud point.
/// Simplices up to dimension max_dimension + 1 are built so that homology in
/// dimensions 0..max_dimension is exact for the filtration.
inline FilteredComplex lazy_witness_complex(const PointCloud& cloud, const LandmarkSet& landmarks,
                                            const WitnessOptions& options) {
    detail::require(options.max_filtration > 0.0 && std::isfinite(options.max_filtration), Errc::InvalidParam,
                    "max_filtration must be positive");
    detail::require(!landmarks.indices.empty(), Errc::InvalidParam, "empty landmark set");
    detail::require(options.nu <= landmarks.size(), Errc::InvalidParam, "nu exceeds the number of landmarks");
    for (auto idx : landmarks.indices) {
        detail::require(idx < cloud.size(), Errc::InvalidParam, "landmark index outside the cloud");
    }

    const auto edges = detail::lazy_witness_edges(cloud, landmarks, options.nu, options.max_filtration);
    FilteredComplex complex;
    complex.max_dimension = options.max_dimension;
    complex.max_filtration = options.max_filtration;
    complex.simplices =
        detail::flag_expansion(edges, options.max_filtration, options.max_dimension + 1, options.divisions);
    complex.sort();
    return complex;
}

/// Standard persistence over Z/2 with the clearing optimisation, processed from the
/// top dimension down. Reports every pair (zero-length ones included) and every
/// essential class in dimensions 0..max_dimension.
inline Barcode reduce_and_extract(const FilteredComplex& complex) {
    const auto& simplices = complex.simplices;
    const std::size_t count = simplices.size();
    Barcode barcode(complex.max_dimension, complex.max_filtration);

    std::unordered_map<std::vector<Vertex>, std::size_t, detail::VertexListHash> position;
    position.reserve(count * 2);
    std::size_t top = 0;
    for (std::size_t p = 0; p < count; ++p) {
        const auto& s = simplices[p];
        detail::require(!s.vertices.empty(), Errc::InvalidParam, "simplex without vertices");
        detail::require(std::ranges::adjacent_find(s.vertices, std::greater_equal<>{}) == s.vertices.end(),
                        Errc::InvalidParam, "simplex vertices must be strictly increasing");
        detail::require(s.dimension() <= complex.max_dimension + 1, Errc::InvalidParam,
                        "simplex dimension exceeds max_dimension + 1");
        if (p > 0 && simplices[p].value < simplices[p - 1].value) {
            throw Error(Errc::NonmonotoneFiltration, "filtration values decrease at position " + std::to_string(p));
        }
        detail::require(position.emplace(s.vertices, p).second, Errc::InvalidParam, "duplicate simplex");
        top = std::max(top, s.dimension());
    }

    // Boundary columns as ascending row positions.
    std::vector<std::vector<std::size_t>> columns(count);
    std::vector<std::vector<std::size_t>> by_dimension(top + 1);
    for (std::size_t p = 0; p < count; ++p) {
        const auto& s = simplices[p];
        by_dimension[s.dimension()].push_back(p);
        if (s.dimension() == 0) {
            continue;
        }
        std::vector<Vertex> facet(s.vertices.size() - 1);
        for (std::size_t drop = 0; drop < s.vertices.size(); ++drop) {
            std::copy(s.vertices.begin(), s.vertices.begin() + static_cast<std::ptrdiff_t>(drop), facet.begin());
            std::copy(s.vertices.begin() + static_cast<std::ptrdiff_t>(drop) + 1, s.vertices.end(),
                      facet.begin() + static_cast<std::ptrdiff_t>(drop));
            const auto it = position.find(facet);
            if (it == position.end() || it->second >= p || simplices[it->second].value > s.value) {
                throw Error(Errc::NonmonotoneFiltration,
                            "a face of the simplex at position " + std::to_string(p) + " is missing or enters later");
            }
            columns[p].push_back(it->second);
        }
        std::ranges::sort(columns[p]);
    }

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> pivot_owner(count, kNone); // row -> column whose lowest one it is
    std::vector<bool> cleared(count, false);
    std::vector<std::size_t> scratch;

    for (std::size_t dim = top; dim >= 1; --dim) {
        for (std::size_t j : by_dimension[dim]) {
            if (cleared[j]) {
                columns[j].clear();
                continue;
            }
            auto& col = columns[j];
            while (!col.empty()) {
                const std::size_t owner = pivot_owner[col.back()];
                if (owner == kNone) {
                    break;
                }
                const auto& other = columns[owner];
                scratch.clear();
                std::ranges::set_symmetric_difference(col, other, std::back_inserter(scratch));
                col.swap(scratch);
            }
            if (!col.empty()) {
                pivot_owner[col.back()] = j;
                cleared[col.back()] = true;
            }
        }
    }

    for (std::size_t p = 0; p < count; ++p) {
        const auto& s = simplices[p];
        const std::size_t dim = s.dimension();
        if (dim > complex.max_dimension) {
            continue;
        }
        if (pivot_owner[p] != kNone) {
            barcode.intervals[dim].push_back({s.value, simplices[pivot_owner[p]].value, false});
        } else if (columns[p].empty()) {
            barcode.intervals[dim].push_back({s.value, complex.max_filtration, true});
        }
    }
    barcode.sort();
    return barcode;
}

} // namespace topocount
