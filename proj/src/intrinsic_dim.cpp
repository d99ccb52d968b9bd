#include "lowdim/intrinsic_dim.hpp"

#include "lowdim/csv.hpp"
#include "lowdim/error.hpp"

#include <algorithm>
#include <cmath>

namespace lowdim {

std::string to_string(Norm norm) { return norm == Norm::L1 ? "l1" : "l2"; }

Norm norm_from_string(const std::string& text) {
    if (text == "l1" || text == "L1") return Norm::L1;
    if (text == "l2" || text == "L2") return Norm::L2;
    throw Error("unknown norm '" + text + "' (expected l1 or l2)");
}

double distance(std::span<const double> a, std::span<const double> b, Norm norm) {
    double acc = 0.0;
    if (norm == Norm::L1) {
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
        return acc;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

std::vector<double> pairwise_distances(const Dataset& data, Norm norm) {
    const std::size_t n = data.size();
    if (n < 2) throw Error("pairwise distances need at least 2 rows");
    std::vector<double> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto xi = data.features.row(i);
        for (std::size_t j = i + 1; j < n; ++j) out.push_back(distance(xi, data.features.row(j), norm));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t pairs_within(std::span<const double> sorted, double r) {
    return static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), r) - sorted.begin());
}

namespace {

double normalized_count(std::uint64_t count, std::size_t n) {
    return 2.0 * static_cast<double>(count) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

} // namespace

double correlation_integral(std::span<const double> sorted, std::size_t n, double r) {
    if (n < 2) throw Error("correlation integral needs n >= 2");
    return normalized_count(pairs_within(sorted, r), n);
}

RadiusSchedule RadiusSchedule::log_spaced(double log_start, double log_end, std::size_t steps) {
    if (steps < 4) throw Error("radius schedule needs at least 4 steps");
    if (!std::isfinite(log_start) || !std::isfinite(log_end) || !(log_end > log_start)) {
        throw Error("radius schedule needs finite log_end > log_start");
    }
    const double step = (log_end - log_start) / static_cast<double>(steps - 1);
    std::vector<double> radii(steps);
    for (std::size_t k = 0; k < steps; ++k) radii[k] = std::exp(log_start + static_cast<double>(k) * step);
    for (std::size_t k = 1; k < steps; ++k) {
        if (!(radii[k] > radii[k - 1])) throw Error("radius schedule is not strictly increasing");
    }
    if (!(radii.front() > 0.0)) throw Error("radius schedule underflows to zero");
    return RadiusSchedule(log_start, step, std::move(radii));
}

RadiusSchedule RadiusSchedule::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw Error("schedule scale factor must be positive");
    std::vector<double> radii = radii_;
    for (auto& r : radii) r *= factor;
    return RadiusSchedule(log_start_ + std::log(factor), log_step_, std::move(radii));
}

RadiusSchedule default_schedule(std::span<const double> sorted, std::size_t steps) {
    auto first_positive = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    if (first_positive == sorted.end()) throw Error("zero diameter: all pairwise distances are 0");
    const double log_start = std::log(*first_positive);
    const double log_end = std::log(sorted.back()) + std::log(1.01);
    return RadiusSchedule::log_spaced(log_start, log_end, steps);
}

CorrelationCurve correlation_curve(std::span<const double> sorted, std::size_t n, const RadiusSchedule& schedule,
                                   Norm norm) {
    if (n < 2) throw Error("correlation curve needs n >= 2");
    CorrelationCurve curve;
    curve.radii = schedule.radii();
    curve.norm = norm;
    curve.n_points = n;
    curve.pair_counts.reserve(curve.radii.size());
    curve.c_values.reserve(curve.radii.size());
    for (double r : curve.radii) {
        const std::uint64_t count = pairs_within(sorted, r);
        curve.pair_counts.push_back(count);
        curve.c_values.push_back(normalized_count(count, n));
    }
    return curve;
}

std::uint64_t default_min_pairs(std::size_t n_points) {
    const std::uint64_t n = n_points;
    const std::uint64_t total = n < 2 ? 0 : n * (n - 1) / 2;
    return std::min<std::uint64_t>(100, std::max<std::uint64_t>(1, total / 100));
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
    if (window == 0 || window % 2 == 0) throw Error("smoothing window must be a positive odd integer");
    const std::size_t half = window / 2;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(values.size() - 1, i + half);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += values[j];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> DimensionEstimate::usable_log_radii() const {
    std::vector<double> out;
    for (std::size_t k = first_usable; k < curve.radii.size(); ++k) out.push_back(std::log(curve.radii[k]));
    return out;
}

std::vector<double> DimensionEstimate::usable_log_c() const {
    std::vector<double> out;
    for (std::size_t k = first_usable; k < curve.c_values.size(); ++k) out.push_back(std::log(curve.c_values[k]));
    return out;
}

DimensionEstimate estimate_from_distances(std::span<const double> sorted, std::size_t n,
                                          const EstimatorOptions& options) {
    if (n < 3) throw Error("need at least 3 rows to estimate intrinsic dimension (got " + std::to_string(n) + ")");
    if (options.window == 0 || options.window % 2 == 0) {
        throw Error("smoothing window must be a positive odd integer");
    }
    const RadiusSchedule schedule = options.schedule ? *options.schedule : default_schedule(sorted, options.steps);

    DimensionEstimate est;
    est.curve = correlation_curve(sorted, n, schedule, options.norm);
    est.log_step = schedule.log_step();
    est.min_pairs = std::max<std::uint64_t>(1, options.min_pairs.value_or(default_min_pairs(n)));

    const auto& counts = est.curve.pair_counts;
    est.first_usable = static_cast<std::size_t>(
        std::find_if(counts.begin(), counts.end(), [&](std::uint64_t c) { return c >= est.min_pairs; }) -
        counts.begin());
    est.usable_points = counts.size() - est.first_usable;
    if (est.usable_points < 3) {
        throw Error("curve too sparse: only " + std::to_string(est.usable_points) + " radii reach " +
                    std::to_string(est.min_pairs) + " pairs (need 3)");
    }

    std::vector<double> log_c;
    log_c.reserve(est.usable_points);
    for (std::size_t k = est.first_usable; k < counts.size(); ++k) log_c.push_back(std::log(est.curve.c_values[k]));
    est.slopes.reserve(log_c.size() - 1);
    for (std::size_t k = 0; k + 1 < log_c.size(); ++k) est.slopes.push_back((log_c[k + 1] - log_c[k]) / est.log_step);

    est.smoothed_slopes = moving_average(est.slopes, options.window);
    est.value = *std::max_element(est.smoothed_slopes.begin(), est.smoothed_slopes.end());
    return est;
}

DimensionEstimate estimate_dimension(const Dataset& data, const EstimatorOptions& options) {
    if (data.size() < 3) {
        throw Error("need at least 3 rows to estimate intrinsic dimension (got " + std::to_string(data.size()) + ")");
    }
    const std::vector<double> sorted =
        options.normalize ? pairwise_distances(min_max_normalize(data), options.norm)
                          : pairwise_distances(data, options.norm);
    return estimate_from_distances(sorted, data.size(), options);
}

void export_curve(const DimensionEstimate& estimate, const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"ln_r", "ln_C", "slope", "smoothed_slope"};
    const auto log_r = estimate.usable_log_radii();
    const auto log_c = estimate.usable_log_c();
    for (std::size_t i = 0; i < log_r.size(); ++i) {
        std::vector<std::string> rec{csv::format_double(log_r[i]), csv::format_double(log_c[i]), "", ""};
        if (i > 0) {
            rec[2] = csv::format_double(estimate.slopes[i - 1]);
            rec[3] = csv::format_double(estimate.smoothed_slopes[i - 1]);
        }
        table.rows.push_back(std::move(rec));
    }
    csv::write(path, table);
}

nlohmann::json estimate_summary(const DimensionEstimate& estimate, const std::string& dataset,
                                const EstimatorOptions& options) {
    return nlohmann::json{
        {"dataset", dataset},
        {"norm", to_string(options.norm)},
        {"steps", estimate.curve.radii.size()},
        {"window", options.window},
        {"normalize", options.normalize},
        {"min_pairs", estimate.min_pairs},
        {"value", estimate.value},
        {"usable_points", estimate.usable_points},
    };
}

} // namespace lowdim
