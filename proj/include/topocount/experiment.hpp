#pragma once

// End-to-end experiment runner: synthesize -> mix -> noise -> embed -> decimate ->
// topological estimate -> MDL/AIC baselines -> report files.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "topocount/baselines.hpp"
#include "topocount/barcode.hpp"
#include "topocount/embedding.hpp"
#include "topocount/error.hpp"
#include "topocount/estimation.hpp"
#include "topocount/mixing.hpp"
#include "topocount/persistence.hpp"
#include "topocount/signals.hpp"

namespace topocount {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kSweepSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "TOPOCOUNT_OUTPUT_DIR";

struct SourceSpec {
    PhaseProfile profile;
    double amplitude = 1.0;
};

struct ExperimentConfig {
    std::vector<SourceSpec> sources;
    std::size_t m_observations = 8;
    double r_lo = 0.75;
    double r_hi = 1.25;
    std::optional<std::pair<double, double>> snr_db_range = std::pair{15.0, 25.0}; // unset: no noise
    double sample_rate_hz = 1e6;
    std::size_t n_samples = 30000;
    double trim_fraction = 0.1;
    std::size_t decimation_stride = 6;
    bool normalize = false;
    TdaConfig tda;
    bool baseline_analytic = true;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    // Fixed mixing system; when absent a random one is drawn from r_lo..r_hi.
    std::optional<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> mixing;
};

namespace detail {

inline json matrix_to_json(const Eigen::MatrixXd& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            row.push_back(a(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw Error(Errc::ConfigError, std::string(what) + " must be a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(Errc::ConfigError, std::string(what) + " rows must all have the same length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            a(i, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return a;
}

inline json source_to_json(const SourceSpec& s) {
    json j;
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, LinearChirp>) {
                j["kind"] = "linear_chirp";
                j["f_start_hz"] = k.f_start_hz;
                j["f_end_hz"] = k.f_end_hz;
            } else if constexpr (std::is_same_v<K, SinusoidalSweep>) {
                j["kind"] = "sinusoidal_sweep";
                j["f_center_hz"] = k.f_center_hz;
                j["f_dev_hz"] = k.f_dev_hz;
                j["sweep_rate_hz"] = k.sweep_rate_hz;
            } else {
                j["kind"] = "constant_tone";
                j["f_hz"] = k.f_hz;
            }
        },
        s.profile.kind);
    j["initial_phase_rad"] = s.profile.initial_phase_rad;
    j["amplitude"] = s.amplitude;
    if (s.profile.duration_s) {
        j["duration_s"] = *s.profile.duration_s;
    }
    return j;
}

inline SourceSpec source_from_json(const json& j) {
    SourceSpec s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear_chirp") {
        s.profile.kind = LinearChirp{j.at("f_start_hz").get<double>(), j.at("f_end_hz").get<double>()};
    } else if (kind == "sinusoidal_sweep") {
        s.profile.kind = SinusoidalSweep{j.at("f_center_hz").get<double>(), j.at("f_dev_hz").get<double>(),
                                         j.at("sweep_rate_hz").get<double>()};
    } else if (kind == "constant_tone") {
        s.profile.kind = ConstantTone{j.at("f_hz").get<double>()};
    } else {
        throw Error(Errc::ConfigError, "unknown source kind '" + kind + "'");
    }
    s.profile.initial_phase_rad = j.value("initial_phase_rad", 0.0);
    s.amplitude = j.value("amplitude", 1.0);
    if (j.contains("duration_s")) {
        s.profile.duration_s = j.at("duration_s").get<double>();
    }
    return s;
}

} // namespace detail

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["sources"] = json::array();
    for (const auto& s : c.sources) {
        j["sources"].push_back(detail::source_to_json(s));
    }
    j["m_observations"] = c.m_observations;
    j["r_range"] = {c.r_lo, c.r_hi};
    j["snr_db_range"] = c.snr_db_range ? json{c.snr_db_range->first, c.snr_db_range->second} : json(nullptr);
    j["sample_rate_hz"] = c.sample_rate_hz;
    j["n_samples"] = c.n_samples;
    j["trim_fraction"] = c.trim_fraction;
    j["decimation_stride"] = c.decimation_stride;
    j["normalize"] = c.normalize;
    j["landmarks"] = c.tda.landmarks;
    j["first_landmark"] = c.tda.first_landmark;
    j["nu"] = c.tda.nu;
    j["max_filtration"] = c.tda.max_filtration;
    j["filtration_divisions"] = c.tda.divisions;
    j["max_dimension"] = c.tda.max_dimension;
    j["persistence_fraction"] = c.tda.persistence_fraction;
    j["baseline_analytic"] = c.baseline_analytic;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    if (c.mixing) {
        j["mixing"] = {{"magnitudes", detail::matrix_to_json(c.mixing->first)},
                       {"phases", detail::matrix_to_json(c.mixing->second)}};
    }
    return j;
}

/// Checks the numeric domains each field feeds; throws ConfigError.
inline void validate(const ExperimentConfig& c) {
    auto check = [](bool ok, const std::string& what) {
        if (!ok) {
            throw Error(Errc::ConfigError, what);
        }
    };
    check(!c.sources.empty(), "at least one source is required");
    for (const auto& s : c.sources) {
        check(std::isfinite(s.amplitude) && s.amplitude > 0.0, "source amplitude must be positive");
    }
    check(c.m_observations >= 1, "m_observations must be at least 1");
    check(c.r_lo > 0.0 && c.r_lo <= c.r_hi, "r_range must satisfy 0 < lo <= hi");
    if (c.snr_db_range) {
        check(std::isfinite(c.snr_db_range->first) && c.snr_db_range->first <= c.snr_db_range->second &&
                  !std::isnan(c.snr_db_range->second),
              "snr_db_range must satisfy lo <= hi");
    }
    check(std::isfinite(c.sample_rate_hz) && c.sample_rate_hz > 0.0, "sample_rate_hz must be positive");
    check(c.n_samples >= kMinHilbertLength, "n_samples must be at least 8");
    check(c.trim_fraction >= 0.0 && c.trim_fraction < 0.5, "trim_fraction must lie in [0, 0.5)");
    check(c.decimation_stride >= 1, "decimation_stride must be at least 1");
    check(c.tda.landmarks >= 1, "landmarks must be at least 1");
    check(c.tda.max_filtration > 0.0 && std::isfinite(c.tda.max_filtration), "max_filtration must be positive");
    check(c.tda.persistence_fraction > 0.0 && c.tda.persistence_fraction <= 1.0,
          "persistence_fraction must lie in (0, 1]");
    check(c.tda.nu <= c.tda.landmarks, "nu cannot exceed the number of landmarks");
    if (c.mixing) {
        check(static_cast<std::size_t>(c.mixing->first.rows()) == c.m_observations &&
                  static_cast<std::size_t>(c.mixing->first.cols()) == c.sources.size(),
              "mixing matrices must be m_observations x sources");
    }
}

inline ExperimentConfig config_from_json(const json& j) {
    try {
        if (!j.is_object()) {
            throw Error(Errc::ConfigError, "config must be a JSON object");
        }
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion) {
            throw Error(Errc::ConfigError, "unsupported schema_version");
        }
        static const std::vector<std::string> known = {
            "schema_version", "sources",       "m_observations", "r_range",   "snr_db_range",
            "sample_rate_hz", "n_samples",     "trim_fraction",  "decimation_stride",
            "normalize",      "landmarks",     "first_landmark", "nu",        "max_filtration",
            "filtration_divisions", "max_dimension", "persistence_fraction", "baseline_analytic",
            "seed",           "output_dir",    "mixing"};
        for (const auto& [key, value] : j.items()) {
            if (std::ranges::find(known, key) == known.end()) {
                throw Error(Errc::ConfigError, "unknown config key '" + key + "'");
            }
        }

        ExperimentConfig c;
        for (const auto& s : j.at("sources")) {
            c.sources.push_back(detail::source_from_json(s));
        }
        c.m_observations = j.value("m_observations", c.m_observations);
        if (j.contains("r_range")) {
            c.r_lo = j.at("r_range").at(0).get<double>();
            c.r_hi = j.at("r_range").at(1).get<double>();
        }
        if (j.contains("snr_db_range")) {
            const auto& snr = j.at("snr_db_range");
            if (snr.is_null()) {
                c.snr_db_range.reset();
            } else {
                c.snr_db_range = std::pair{snr.at(0).get<double>(), snr.at(1).get<double>()};
            }
        }
        c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
        c.n_samples = j.value("n_samples", c.n_samples);
        c.trim_fraction = j.value("trim_fraction", c.trim_fraction);
        c.decimation_stride = j.value("decimation_stride", c.decimation_stride);
        c.normalize = j.value("normalize", c.normalize);
        c.tda.landmarks = j.value("landmarks", c.tda.landmarks);
        c.tda.first_landmark = j.value("first_landmark", c.tda.first_landmark);
        c.tda.nu = j.value("nu", c.tda.nu);
        c.tda.max_filtration = j.value("max_filtration", c.tda.max_filtration);
        c.tda.divisions = j.value("filtration_divisions", c.tda.divisions);
        // Homology up to the number of observations unless told otherwise.
        c.tda.max_dimension = j.value("max_dimension", c.m_observations);
        c.tda.persistence_fraction = j.value("persistence_fraction", c.tda.persistence_fraction);
        c.baseline_analytic = j.value("baseline_analytic", c.baseline_analytic);
        c.seed = j.value("seed", c.seed);
        c.output_dir = j.value("output_dir", c.output_dir);
        if (j.contains("mixing")) {
            c.mixing = std::pair{detail::matrix_from_json(j.at("mixing").at("magnitudes"), "mixing.magnitudes"),
                                 detail::matrix_from_json(j.at("mixing").at("phases"), "mixing.phases")};
        }
        validate(c);
        return c;
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigError, e.what());
    }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::ConfigError, "cannot open config " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigError, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

struct StageTimings {
    double synthesize = 0.0;
    double mix = 0.0;
    double noise = 0.0;
    double embed = 0.0;
    double landmarks = 0.0;
    double complex = 0.0;
    double reduction = 0.0;
    double baselines = 0.0;
};

/// Everything an experiment produces, before anything is written to disk.
struct RunResult {
    ExperimentConfig config;
    MixingSystem system;
    IndependenceReport independence;
    EstimateResult topological;
    std::size_t mdl = 0;
    std::size_t aic = 0;
    EigenSpectrum spectrum;
    std::vector<double> channel_snr_db;
    std::size_t cloud_points = 0;
    std::size_t cloud_dimension = 0;
    StageTimings timings;
};

namespace detail {

template <typename F>
auto stage(const char* name, double& seconds, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        } else {
            auto out = body();
            seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return out;
        }
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage '") + name + "': " + e.what());
    }
}

} // namespace detail

/// Runs the whole pipeline in memory. Fully determined by the config, seed included.
inline RunResult run_pipeline(const ExperimentConfig& config) {
    validate(config);
    StageTimings timings;

    // Every random draw descends from one generator in a fixed order.
    std::mt19937_64 master(config.seed);
    const std::uint64_t mixing_seed = master();

    const auto sources = detail::stage("synthesize", timings.synthesize, [&] {
        std::vector<AnalyticPair> out;
        for (const auto& s : config.sources) {
            out.push_back(analytic_pair(synthesize(s.profile, s.amplitude, config.sample_rate_hz, config.n_samples)));
        }
        return out;
    });

    MixingSystem system = config.mixing ? MixingSystem(config.mixing->first, config.mixing->second)
                                        : random_mixing(config.sources.size(), config.m_observations, config.r_lo,
                                                        config.r_hi, mixing_seed);
    const auto clean = detail::stage("mix", timings.mix, [&] { return mix(system, sources); });

    std::vector<double> snrs;
    const auto observed = detail::stage("noise", timings.noise, [&] {
        std::vector<SampledSignal> channels;
        std::uniform_real_distribution<double> snr_draw(0.0, 1.0);
        for (std::size_t i = 0; i < clean.size(); ++i) {
            const double u = snr_draw(master);
            const std::uint64_t noise_seed = master();
            if (!config.snr_db_range) {
                snrs.push_back(std::numeric_limits<double>::infinity());
                channels.push_back(clean[i]);
                continue;
            }
            const auto [lo, hi] = *config.snr_db_range;
            const double snr = lo + (hi - lo) * u;
            snrs.push_back(snr);
            channels.push_back(add_awgn(clean[i], snr, noise_seed));
        }
        return ObservationSet(std::move(channels));
    });

    const auto cloud = detail::stage("embed", timings.embed, [&] {
        return decimate(embed(observed, config.trim_fraction, config.normalize), config.decimation_stride);
    });

    double estimate_seconds = 0.0;
    auto topological = detail::stage("estimate", estimate_seconds, [&] { return estimate_sources(cloud, config.tda); });
    timings.landmarks = topological.diagnostics.landmark_seconds;
    timings.complex = topological.diagnostics.complex_seconds;
    timings.reduction = topological.diagnostics.reduction_seconds;

    std::size_t mdl = 0;
    std::size_t aic = 0;
    EigenSpectrum spectrum;
    detail::stage("baselines", timings.baselines, [&] {
        spectrum = sample_autocorrelation(observed, config.baseline_analytic, config.trim_fraction).spectrum;
        if (spectrum.eigenvalues.size() >= 2) {
            mdl = mdl_estimate(spectrum);
            aic = aic_estimate(spectrum);
        }
    });

    return RunResult{config,
                     system,
                     independence_report(system),
                     std::move(topological),
                     mdl,
                     aic,
                     std::move(spectrum),
                     std::move(snrs),
                     cloud.size(),
                     cloud.dimension(),
                     timings};
}

inline json estimate_to_json(const SourceCountEstimate& est, const ExperimentConfig& config) {
    json j;
    j["status"] = std::string(to_string(est.status));
    j["n"] = est.n ? json(*est.n) : json(nullptr);
    j["betti_observed"] = est.betti_observed.betti;
    j["betti_expected"] = est.betti_expected ? json(*est.betti_expected) : json(nullptr);
    j["persistence_fraction"] = config.tda.persistence_fraction;
    j["landmarks"] = config.tda.landmarks;
    j["max_filtration"] = config.tda.max_filtration;
    j["seed"] = config.seed;
    return j;
}

inline constexpr const char* kBarcodeCsvName = "barcode.csv";
inline constexpr const char* kBarcodeSvgName = "barcode.svg";
inline constexpr const char* kReportName = "report.json";
inline constexpr const char* kTimingsName = "timings.json";

/// Deterministic report: no timings, artifact paths relative to the output directory.
inline json report_to_json(const RunResult& r) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = config_to_json(r.config);
    j["topological"] = estimate_to_json(r.topological.estimate, r.config);
    j["topological"]["cover_radius"] = r.topological.diagnostics.landmarks.cover_radius;
    j["topological"]["simplices"] = r.topological.diagnostics.simplex_count;
    j["mdl"] = r.mdl;
    j["aic"] = r.aic;
    j["eigenvalues"] = r.spectrum.eigenvalues;
    j["channel_snr_db"] = json::array();
    for (double s : r.channel_snr_db) {
        j["channel_snr_db"].push_back(std::isinf(s) ? json(nullptr) : json(s));
    }
    j["point_cloud"] = {{"points", r.cloud_points}, {"dimension", r.cloud_dimension}};
    j["mixing"] = {{"magnitudes", detail::matrix_to_json(r.system.magnitudes())},
                   {"phases", detail::matrix_to_json(r.system.phases())}};
    j["independence_report"] = {{"dual_rank", r.independence.dual_rank},
                                {"t_rank", r.independence.t_rank},
                                {"condition_number", std::isinf(r.independence.condition_number)
                                                         ? json(nullptr)
                                                         : json(r.independence.condition_number)},
                                {"full_column_rank", r.independence.full_column_rank}};
    j["artifacts"] = {{"barcode_csv", kBarcodeCsvName}, {"barcode_svg", kBarcodeSvgName}, {"timings", kTimingsName}};
    return j;
}

inline json timings_to_json(const StageTimings& t) {
    return {{"schema_version", kReportSchemaVersion},
            {"seconds",
             {{"synthesize", t.synthesize},
              {"mix", t.mix},
              {"noise", t.noise},
              {"embed", t.embed},
              {"landmarks", t.landmarks},
              {"complex", t.complex},
              {"reduction", t.reduction},
              {"baselines", t.baselines}}}};
}

struct RunReport {
    RunResult result;
    json report;
    std::filesystem::path output_dir;
    std::filesystem::path report_path;
    std::filesystem::path barcode_csv_path;
    std::filesystem::path barcode_svg_path;
    std::filesystem::path timings_path;
};

/// The output directory: $TOPOCOUNT_OUTPUT_DIR if set, else the config's.
inline std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return config.output_dir;
}

namespace detail {
inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error(Errc::IoError, "cannot write " + path.string());
    }
}
} // namespace detail

inline RunReport run_experiment(const ExperimentConfig& config) {
    RunReport out{run_pipeline(config), {}, resolve_output_dir(config), {}, {}, {}, {}};
    std::error_code ec;
    std::filesystem::create_directories(out.output_dir, ec);
    if (ec) {
        throw Error(Errc::IoError, "cannot create " + out.output_dir.string() + ": " + ec.message());
    }
    out.report = report_to_json(out.result);
    out.report_path = out.output_dir / kReportName;
    out.barcode_csv_path = out.output_dir / kBarcodeCsvName;
    out.barcode_svg_path = out.output_dir / kBarcodeSvgName;
    out.timings_path = out.output_dir / kTimingsName;

    const auto& barcode = out.result.topological.diagnostics.barcode;
    detail::write_text(out.barcode_csv_path, barcode_to_csv(barcode));
    detail::write_text(out.barcode_svg_path, barcode_to_svg(barcode, config.tda.persistence_fraction));
    detail::write_text(out.timings_path, timings_to_json(out.result.timings).dump(2) + "\n");
    detail::write_text(out.report_path, out.report.dump(2) + "\n");
    return out;
}

inline const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes = {
        "snr_db",         "amplitude",         "m_observations", "n_samples",       "trim_fraction",
        "decimation_stride", "landmarks",      "nu",             "max_filtration",  "filtration_divisions",
        "max_dimension",  "persistence_fraction", "r_lo",        "r_hi",            "sample_rate_hz"};
    return axes;
}

/// Sets one numeric field; "snr_db" pins both ends of the SNR range, "amplitude" all sources.
inline void apply_axis(ExperimentConfig& c, const std::string& axis, double v) {
    auto as_count = [&](std::size_t& field) {
        if (v < 0 || v != std::floor(v)) {
            throw Error(Errc::ConfigError, "axis '" + axis + "' needs non-negative integer values");
        }
        field = static_cast<std::size_t>(v);
    };
    if (axis == "snr_db") {
        c.snr_db_range = std::pair{v, v};
    } else if (axis == "amplitude") {
        for (auto& s : c.sources) {
            s.amplitude = v;
        }
    } else if (axis == "m_observations") {
        as_count(c.m_observations);
    } else if (axis == "n_samples") {
        as_count(c.n_samples);
    } else if (axis == "trim_fraction") {
        c.trim_fraction = v;
    } else if (axis == "decimation_stride") {
        as_count(c.decimation_stride);
    } else if (axis == "landmarks") {
        as_count(c.tda.landmarks);
    } else if (axis == "nu") {
        as_count(c.tda.nu);
    } else if (axis == "max_filtration") {
        c.tda.max_filtration = v;
    } else if (axis == "filtration_divisions") {
        as_count(c.tda.divisions);
    } else if (axis == "max_dimension") {
        as_count(c.tda.max_dimension);
    } else if (axis == "persistence_fraction") {
        c.tda.persistence_fraction = v;
    } else if (axis == "r_lo") {
        c.r_lo = v;
    } else if (axis == "r_hi") {
        c.r_hi = v;
    } else if (axis == "sample_rate_hz") {
        c.sample_rate_hz = v;
    } else {
        throw Error(Errc::UnknownAxis, "unknown sweep axis '" + axis + "'");
    }
}

struct SweepCell {
    double value = 0.0;
    std::size_t repetitions = 0;
    std::size_t topological_hits = 0;
    std::size_t mdl_hits = 0;
    std::size_t aic_hits = 0;
    std::size_t failures = 0; // runs that raised an error

    [[nodiscard]] double rate(std::size_t hits) const {
        return repetitions == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(repetitions);
    }
};

/// Repetition r of every cell uses seed config.seed + r. A hit means the estimate
/// equals the configured number of sources. Cells run concurrently; output order is
/// (value, repetition).
inline std::vector<SweepCell> sweep(const ExperimentConfig& base, const std::string& axis,
                                    const std::vector<double>& values, std::size_t repetitions,
                                    std::size_t max_threads = 0) {
    if (std::ranges::find(sweep_axes(), axis) == sweep_axes().end()) {
        throw Error(Errc::UnknownAxis, "unknown sweep axis '" + axis + "'");
    }
    std::vector<ExperimentConfig> jobs;
    for (double v : values) {
        for (std::size_t r = 0; r < repetitions; ++r) {
            ExperimentConfig c = base;
            apply_axis(c, axis, v);
            c.seed = base.seed + r;
            validate(c);
            jobs.push_back(std::move(c));
        }
    }

    struct Outcome {
        bool ok = false;
        bool topo = false;
        bool mdl = false;
        bool aic = false;
    };
    std::vector<Outcome> outcomes(jobs.size());
    auto run_one = [&](std::size_t idx) {
        const auto& c = jobs[idx];
        try {
            const auto r = run_pipeline(c);
            const std::size_t truth = c.sources.size();
            outcomes[idx] = {true, r.topological.estimate.matched(truth), r.mdl == truth, r.aic == truth};
        } catch (const Error&) {
            outcomes[idx] = {};
        }
    };

    std::size_t threads = max_threads != 0 ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::future<void>> workers;
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < threads; ++t) {
        workers.push_back(std::async(std::launch::async, [&] {
            for (std::size_t idx = next++; idx < jobs.size(); idx = next++) {
                run_one(idx);
            }
        }));
    }
    for (auto& w : workers) {
        w.get();
    }

    std::vector<SweepCell> cells;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        SweepCell cell;
        cell.value = values[vi];
        cell.repetitions = repetitions;
        for (std::size_t r = 0; r < repetitions; ++r) {
            const auto& o = outcomes[vi * repetitions + r];
            cell.failures += o.ok ? 0 : 1;
            cell.topological_hits += o.topo ? 1 : 0;
            cell.mdl_hits += o.mdl ? 1 : 0;
            cell.aic_hits += o.aic ? 1 : 0;
        }
        cells.push_back(cell);
    }
    return cells;
}

inline std::string sweep_to_csv(const std::string& axis, const std::vector<SweepCell>& cells) {
    std::string out = "# schema_version=" + std::to_string(kSweepSchemaVersion) + ",axis=" + axis + "\n";
    out += "value,repetitions,topological_success_rate,mdl_success_rate,aic_success_rate,failures\n";
    for (const auto& c : cells) {
        detail::append_double(out, c.value);
        out += ',' + std::to_string(c.repetitions) + ',';
        detail::append_double(out, c.rate(c.topological_hits));
        out += ',';
        detail::append_double(out, c.rate(c.mdl_hits));
        out += ',';
        detail::append_double(out, c.rate(c.aic_hits));
        out += ',' + std::to_string(c.failures) + '\n';
    }
    return out;
}

/// Reads a barcode CSV and writes its SVG rendering; returns the SVG path.
inline std::filesystem::path plot_barcode(const std::filesystem::path& csv_path,
                                          std::optional<std::filesystem::path> svg_path = std::nullopt,
                                          double threshold_fraction = 0.5) {
    std::ifstream in(csv_path);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + csv_path.string());
    }
    const Barcode barcode = barcode_from_csv(in);
    auto target = svg_path.value_or(std::filesystem::path(csv_path).replace_extension(".svg"));
    detail::write_text(target, barcode_to_svg(barcode, threshold_fraction));
    return target;
}

} // namespace topocount
