#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hpcarbon {

struct TimePoint {
    double t = 0; // decimal year
    double v = 0; // strictly positive
};

struct TimeSeries {
    std::vector<TimePoint> points; // strictly increasing in t
    std::string label;
    std::string unit;

    void validate() const;
};

// Rows are decimal_year,value; optional header row; '#' comments.
TimeSeries load_series(std::istream& in, std::string label = {}, std::string unit = {});
TimeSeries load_series_file(const std::string& path, std::string label = {},
                            std::string unit = {});

struct Window {
    double start = 0;
    double end = 0;
};

// Exponential model fitted in the log2 domain. doubling_time() and
// growth_rate are exact reciprocals by construction.
struct TrendFit {
    double anchor_time = 0;   // midpoint of the fitted window
    double anchor_value = 0;  // model value at anchor_time
    double growth_rate = 0;   // log2 slope per year
    double r_squared = 1;     // of the log-domain residuals
    Window window;            // time span of the points actually used
    std::size_t n_points = 0;

    double doubling_time() const { return 1.0 / growth_rate; }
    double value_at(double t) const;
};

// Ordinary least squares of log2(value) against time over the points inside
// `window` (whole series when absent). Needs at least 3 points.
TrendFit fit_exponential(const TimeSeries& series, std::optional<Window> window = {});

// Exact exponential curve: value(t) = anchor_value * 2^((t - anchor)/doubling).
struct ReferenceLaw {
    double anchor_time = 0;
    double anchor_value = 0;
    double doubling_time = 0;

    double operator()(double t) const;
};

ReferenceLaw reference_law(double anchor_time, double anchor_value, double doubling_time);

constexpr double kMooreDoublingYears = 2.0;
constexpr double kKoomeyDoublingYears = 1.5;

// Model value at `horizon`; refuses horizons inside the fitted window.
double project(const TrendFit& fit, double horizon);

// Multiplicative growth between two times under the fitted model.
double gain_between(const TrendFit& fit, double t0, double t1);

// Allowed compute multiplier under an emissions-reduction target:
// efficiency_gain x (1 - reduction_target).
double carbon_budget(double efficiency_gain, double reduction_target);

} // namespace hpcarbon
