#pragma once

// Persistence barcodes, their CSV interchange format and SVG rendering.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "topocount/embedding.hpp"
#include "topocount/error.hpp"

namespace topocount {

/// Half-open persistence interval [birth, death). Intervals that never die carry
/// death == ceiling of the filtration and infinite == true.
struct Interval {
    double birth = 0.0;
    double death = 0.0;
    bool infinite = false;

    [[nodiscard]] double length() const noexcept { return death - birth; }

    friend auto operator<=>(const Interval& a, const Interval& b) {
        return std::tie(a.birth, a.death, a.infinite) <=> std::tie(b.birth, b.death, b.infinite);
    }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Barcode {
    /// intervals[d] holds the dimension-d intervals, sorted.
    std::vector<std::vector<Interval>> intervals;
    double max_filtration = 0.0;

    Barcode() = default;
    Barcode(std::size_t max_dimension, double ceiling) : intervals(max_dimension + 1), max_filtration(ceiling) {}

    [[nodiscard]] std::size_t max_dimension() const noexcept {
        return intervals.empty() ? 0 : intervals.size() - 1;
    }

    void sort() {
        for (auto& dim : intervals) {
            std::ranges::sort(dim);
        }
    }

    [[nodiscard]] std::size_t total() const noexcept {
        std::size_t n = 0;
        for (const auto& dim : intervals) {
            n += dim.size();
        }
        return n;
    }

    /// Number of dimension-d classes alive at filtration value t.
    [[nodiscard]] std::size_t betti_at(std::size_t d, double t) const {
        if (d >= intervals.size()) {
            return 0;
        }
        return static_cast<std::size_t>(std::ranges::count_if(
            intervals[d], [t](const Interval& iv) { return iv.birth <= t && (iv.infinite || iv.death > t); }));
    }

    friend bool operator==(const Barcode&, const Barcode&) = default;
};

inline constexpr int kBarcodeSchemaVersion = 1;
inline constexpr std::string_view kBarcodeCsvHeader = "dimension,birth,death,is_infinite";

/// Rows (dimension, birth, death, is_infinite) ordered by dimension, birth, death.
/// A leading comment line carries the schema version and the filtration ceiling.
inline std::string barcode_to_csv(const Barcode& barcode) {
    std::string out = "# schema_version=" + std::to_string(kBarcodeSchemaVersion) + ",max_filtration=";
    detail::append_double(out, barcode.max_filtration);
    out += ",max_dimension=" + std::to_string(barcode.max_dimension()) + "\n";
    out += kBarcodeCsvHeader;
    out += '\n';
    for (std::size_t d = 0; d < barcode.intervals.size(); ++d) {
        auto sorted = barcode.intervals[d];
        std::ranges::sort(sorted);
        for (const auto& iv : sorted) {
            out += std::to_string(d);
            out += ',';
            detail::append_double(out, iv.birth);
            out += ',';
            detail::append_double(out, iv.death);
            out += iv.infinite ? ",true\n" : ",false\n";
        }
    }
    return out;
}

inline Barcode barcode_from_csv(std::istream& is) {
    Barcode barcode;
    bool saw_header = false;
    bool saw_ceiling = false;
    std::size_t declared_dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            std::string_view meta(line);
            meta.remove_prefix(1);
            for (auto field : detail::split_commas(meta)) {
                while (!field.empty() && field.front() == ' ') {
                    field.remove_prefix(1);
                }
                const auto eq = field.find('=');
                if (eq == std::string_view::npos) {
                    continue;
                }
                const auto key = field.substr(0, eq);
                const auto value = field.substr(eq + 1);
                if (key == "schema_version") {
                    const auto v = detail::parse_double(value, line_no);
                    if (v != kBarcodeSchemaVersion) {
                        throw Error(Errc::ParseError,
                                    "line " + std::to_string(line_no) + ": unsupported schema_version " +
                                        std::string(value));
                    }
                } else if (key == "max_filtration") {
                    barcode.max_filtration = detail::parse_double(value, line_no);
                    saw_ceiling = true;
                } else if (key == "max_dimension") {
                    declared_dim = static_cast<std::size_t>(detail::parse_double(value, line_no));
                }
            }
            continue;
        }
        if (!saw_header) {
            if (line != kBarcodeCsvHeader) {
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected header '" +
                                                  std::string(kBarcodeCsvHeader) + "'");
            }
            saw_header = true;
            continue;
        }
        const auto fields = detail::split_commas(line);
        if (fields.size() != 4) {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                              std::to_string(fields.size()));
        }
        const double dim_value = detail::parse_double(fields[0], line_no);
        if (dim_value < 0 || dim_value != std::floor(dim_value)) {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad dimension");
        }
        Interval iv;
        iv.birth = detail::parse_double(fields[1], line_no);
        iv.death = detail::parse_double(fields[2], line_no);
        if (fields[3] == "true") {
            iv.infinite = true;
        } else if (fields[3] != "false") {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": is_infinite must be true or false");
        }
        if (!(iv.birth <= iv.death)) {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": birth exceeds death");
        }
        const auto d = static_cast<std::size_t>(dim_value);
        if (barcode.intervals.size() <= d) {
            barcode.intervals.resize(d + 1);
        }
        barcode.intervals[d].push_back(iv);
    }
    if (!saw_header) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no + 1) + ": missing header");
    }
    if (barcode.intervals.size() <= declared_dim) {
        barcode.intervals.resize(declared_dim + 1);
    }
    if (!saw_ceiling) {
        for (const auto& dim : barcode.intervals) {
            for (const auto& iv : dim) {
                barcode.max_filtration = std::max(barcode.max_filtration, iv.death);
            }
        }
    }
    barcode.sort();
    return barcode;
}

inline Barcode barcode_from_csv(const std::string& text) {
    std::istringstream is(text);
    return barcode_from_csv(is);
}

/// One panel per dimension, one bar per positive-length interval, dashed ceiling
/// line at max_filtration and a dotted marker at threshold_fraction * max_filtration.
inline std::string barcode_to_svg(const Barcode& barcode, double threshold_fraction = 0.5) {
    constexpr double kWidth = 720.0;
    constexpr double kLeft = 60.0;
    constexpr double kRight = 20.0;
    constexpr double kBarPitch = 6.0;
    constexpr double kPanelPad = 28.0;
    constexpr double kMinPanel = 40.0;

    const double ceiling = barcode.max_filtration > 0.0 ? barcode.max_filtration : 1.0;
    const double plot_w = kWidth - kLeft - kRight;
    auto x_of = [&](double v) { return kLeft + plot_w * std::clamp(v / ceiling, 0.0, 1.0); };

    std::vector<std::vector<Interval>> shown(barcode.intervals.size());
    double height = 30.0;
    for (std::size_t d = 0; d < barcode.intervals.size(); ++d) {
        for (const auto& iv : barcode.intervals[d]) {
            if (iv.length() > 0.0) {
                shown[d].push_back(iv);
            }
        }
        // Longest bars on top, like the usual barcode plots.
        std::ranges::stable_sort(shown[d], [](const Interval& a, const Interval& b) { return a.length() > b.length(); });
        height += std::max(kMinPanel, kPanelPad + kBarPitch * static_cast<double>(shown[d].size()));
    }
    height += 30.0;

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    double y = 30.0;
    for (std::size_t d = 0; d < shown.size(); ++d) {
        const double panel_h = std::max(kMinPanel, kPanelPad + kBarPitch * static_cast<double>(shown[d].size()));
        svg << "<g class=\"panel\" data-dimension=\"" << d << "\">\n";
        svg << "<text x=\"8\" y=\"" << y + 14 << "\">H" << d << "</text>\n";
        svg << "<rect x=\"" << kLeft << "\" y=\"" << y << "\" width=\"" << plot_w << "\" height=\"" << panel_h - 8
            << "\" fill=\"none\" stroke=\"#999\"/>\n";
        double bar_y = y + 10.0;
        for (const auto& iv : shown[d]) {
            svg << "<line class=\"bar\" x1=\"" << x_of(iv.birth) << "\" x2=\"" << x_of(iv.death) << "\" y1=\"" << bar_y
                << "\" y2=\"" << bar_y << "\" stroke=\"" << (iv.infinite ? "#b22" : "#225") << "\" stroke-width=\"3\"/>\n";
            bar_y += kBarPitch;
        }
        svg << "</g>\n";
        y += panel_h;
    }

    const double x_ceiling = x_of(ceiling);
    const double x_threshold = x_of(threshold_fraction * ceiling);
    svg << "<line class=\"ceiling\" x1=\"" << x_ceiling << "\" x2=\"" << x_ceiling << "\" y1=\"24\" y2=\"" << y
        << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    svg << "<line class=\"threshold\" x1=\"" << x_threshold << "\" x2=\"" << x_threshold << "\" y1=\"24\" y2=\"" << y
        << "\" stroke=\"#888\" stroke-dasharray=\"2,3\"/>\n";
    svg << "<text x=\"" << kLeft << "\" y=\"" << y + 16 << "\">0</text>\n";
    svg.precision(4);
    svg << "<text x=\"" << x_ceiling - 30 << "\" y=\"" << y + 16 << "\">" << ceiling << "</text>\n";
    svg << "<text x=\"" << x_threshold - 20 << "\" y=\"18\">" << threshold_fraction << " x ceiling</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace topocount
