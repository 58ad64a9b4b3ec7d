#pragma once

// Phase-portrait point cloud: every observation next to its Hilbert transform.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topocount/error.hpp"
#include "topocount/mixing.hpp"
#include "topocount/signals.hpp"

namespace topocount {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CloudProvenance {
    std::size_t channels = 0;
    double trim_fraction = 0.0;
    std::size_t stride = 1;
    bool normalized = false;
};

/// N points in R^D, one per row. D is even (pairs of in-phase/quadrature coordinates).
class PointCloud {
public:
    explicit PointCloud(PointMatrix points, CloudProvenance provenance = {})
        : points_(std::move(points)), provenance_(provenance) {
        detail::require(points_.rows() >= 1, Errc::ResultEmpty, "point cloud has no points");
        detail::require(points_.cols() >= 2 && points_.cols() % 2 == 0, Errc::DimensionMismatch,
                        "point dimension must be even and at least 2");
        detail::require(points_.allFinite(), Errc::InvalidParam, "point cloud has non-finite coordinates");
        if (provenance_.channels == 0) {
            provenance_.channels = static_cast<std::size_t>(points_.cols() / 2);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    [[nodiscard]] const PointMatrix& points() const noexcept { return points_; }
    [[nodiscard]] const CloudProvenance& provenance() const noexcept { return provenance_; }

    [[nodiscard]] auto point(std::size_t k) const { return points_.row(static_cast<Eigen::Index>(k)); }

    [[nodiscard]] double distance(std::size_t a, std::size_t b) const {
        return (point(a) - point(b)).norm();
    }

private:
    PointMatrix points_;
    CloudProvenance provenance_;
};

/// Point k = (y_1[k], y~_1[k], ..., y_m[k], y~_m[k]) after trimming each analytic pair.
/// With `normalize`, each (y_i, y~_i) pair is scaled to unit RMS radius.
inline PointCloud embed(const ObservationSet& observations, double trim_fraction, bool normalize = false) {
    const std::size_t m = observations.size();
    const std::size_t n = observations.length();
    const std::size_t cut = trim_count(n, trim_fraction);
    detail::require(n >= 2 * cut + 2, Errc::ResultEmpty, "fewer than 2 samples remain after trimming");
    const std::size_t kept = n - 2 * cut;

    PointMatrix points(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(2 * m));
    for (std::size_t i = 0; i < m; ++i) {
        const AnalyticPair pair = topocount::trim_fraction(analytic_pair(observations[i]), trim_fraction);
        double scale = 1.0;
        if (normalize) {
            double acc = 0.0;
            for (double e : pair.envelope_squared()) {
                acc += e;
            }
            const double rms = std::sqrt(acc / static_cast<double>(kept));
            detail::require(rms > 0.0, Errc::ZeroPowerSignal, "cannot normalize a silent channel");
            scale = 1.0 / rms;
        }
        const auto col = static_cast<Eigen::Index>(2 * i);
        for (std::size_t k = 0; k < kept; ++k) {
            points(static_cast<Eigen::Index>(k), col) = scale * pair.in_phase()[k];
            points(static_cast<Eigen::Index>(k), col + 1) = scale * pair.quadrature()[k];
        }
    }
    return PointCloud(std::move(points), {m, trim_fraction, 1, normalize});
}

/// Keeps points 0, stride, 2*stride, ...
inline PointCloud decimate(const PointCloud& cloud, std::size_t stride) {
    detail::require(stride >= 1, Errc::InvalidStride, "stride must be at least 1");
    const std::size_t kept = (cloud.size() + stride - 1) / stride;
    PointMatrix out(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(cloud.dimension()));
    for (std::size_t k = 0; k < kept; ++k) {
        out.row(static_cast<Eigen::Index>(k)) = cloud.point(k * stride);
    }
    auto prov = cloud.provenance();
    prov.stride *= stride;
    return PointCloud(std::move(out), prov);
}

namespace detail {

inline void append_double(std::string& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

inline double parse_double(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    while (!field.empty() && field.front() == ' ') {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (field == "inf" || field == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
    }
    return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return fields;
}

} // namespace detail

/// One point per row, D columns, shortest round-trip decimal representation.
inline void write_csv(std::ostream& os, const PointCloud& cloud) {
    std::string line;
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        line.clear();
        for (std::size_t d = 0; d < cloud.dimension(); ++d) {
            if (d > 0) {
                line.push_back(',');
            }
            detail::append_double(line, cloud.points()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)));
        }
        line.push_back('\n');
        os << line;
    }
}

inline PointCloud read_point_cloud_csv(std::istream& is) {
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = detail::split_commas(line);
        if (cols == 0) {
            cols = fields.size();
        } else if (fields.size() != cols) {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                                              " columns, got " + std::to_string(fields.size()));
        }
        for (auto f : fields) {
            values.push_back(detail::parse_double(f, line_no));
        }
        ++rows;
    }
    detail::require(rows > 0, Errc::ParseError, "point cloud CSV has no rows");
    PointMatrix points = Eigen::Map<PointMatrix>(values.data(), static_cast<Eigen::Index>(rows),
                                                 static_cast<Eigen::Index>(cols));
    return PointCloud(std::move(points));
}

} // namespace topocount
