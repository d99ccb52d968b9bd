#ifndef LOWDIM_INTRINSIC_DIM_HPP
#define LOWDIM_INTRINSIC_DIM_HPP

#include "lowdim/dataset.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lowdim {

enum class Norm { L1, L2 };

std::string to_string(Norm norm);
Norm norm_from_string(const std::string& text);

double distance(std::span<const double> a, std::span<const double> b, Norm norm);

/// All N(N-1)/2 unordered-pair distances, sorted ascending. Exact, no sampling.
std::vector<double> pairwise_distances(const Dataset& data, Norm norm);

/// Number of entries of `sorted` strictly below r.
std::uint64_t pairs_within(std::span<const double> sorted, double r);

/// C(r) = 2 |{pairs with distance < r}| / (n (n-1)).
double correlation_integral(std::span<const double> sorted, std::size_t n, double r);

/// Log-spaced radii r_k = exp(log_start + k * log_step), k = 0..steps-1.
class RadiusSchedule {
public:
    /// steps >= 4 and log_end > log_start.
    static RadiusSchedule log_spaced(double log_start, double log_end, std::size_t steps);

    double log_start() const { return log_start_; }
    double log_end() const { return log_start_ + log_step_ * static_cast<double>(steps() - 1); }
    double log_step() const { return log_step_; }
    std::size_t steps() const { return radii_.size(); }
    const std::vector<double>& radii() const { return radii_; }

    /// Same log spacing with every radius multiplied by `factor` (> 0).
    RadiusSchedule scaled(double factor) const;

private:
    RadiusSchedule(double log_start, double log_step, std::vector<double> radii)
        : log_start_(log_start), log_step_(log_step), radii_(std::move(radii)) {}

    double log_start_ = 0.0;
    double log_step_ = 0.0;
    std::vector<double> radii_;
};

/// From the smallest positive distance to 1.01 x the largest distance.
RadiusSchedule default_schedule(std::span<const double> sorted, std::size_t steps = 50);

struct CorrelationCurve {
    std::vector<double> radii;
    std::vector<double> c_values;
    std::vector<std::uint64_t> pair_counts;
    Norm norm = Norm::L1;
    std::size_t n_points = 0;
};

CorrelationCurve correlation_curve(std::span<const double> sorted, std::size_t n,
                                   const RadiusSchedule& schedule, Norm norm);

struct EstimatorOptions {
    Norm norm = Norm::L1;
    std::size_t steps = 50;
    /// Odd width of the centred moving average applied to the slopes.
    std::size_t window = 3;
    bool normalize = false;
    /// Radii counting fewer pairs than this are dropped before taking slopes.
    /// Unset means default_min_pairs(N).
    std::optional<std::uint64_t> min_pairs;
    /// Overrides the default schedule built from `steps`.
    std::optional<RadiusSchedule> schedule;
};

/// min(100, max(1, N(N-1)/200)): the few-pair end of the curve is shot noise
/// and otherwise dominates the maximum slope.
std::uint64_t default_min_pairs(std::size_t n_points);

/// Centred moving average; windows are truncated at the ends.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

struct DimensionEstimate {
    double value = 0.0;
    std::vector<double> slopes;
    std::vector<double> smoothed_slopes;
    CorrelationCurve curve;
    /// Curve index of the first retained radius; retained radii are contiguous.
    std::size_t first_usable = 0;
    std::size_t usable_points = 0;
    std::uint64_t min_pairs = 1;
    double log_step = 0.0;

    std::vector<double> usable_log_radii() const;
    std::vector<double> usable_log_c() const;
};

/// Correlation-dimension estimate: the maximum smoothed slope of ln C(r)
/// against ln r over the retained radii.
DimensionEstimate estimate_dimension(const Dataset& data, const EstimatorOptions& options = {});

/// Same, from precomputed sorted distances of n points.
DimensionEstimate estimate_from_distances(std::span<const double> sorted, std::size_t n,
                                          const EstimatorOptions& options = {});

/// CSV with columns ln_r, ln_C, slope, smoothed_slope; one row per retained
/// radius, slope cells empty on the first row.
void export_curve(const DimensionEstimate& estimate, const std::filesystem::path& path);

nlohmann::json estimate_summary(const DimensionEstimate& estimate, const std::string& dataset,
                                const EstimatorOptions& options);

} // namespace lowdim

#endif
