#include "hpcarbon/trends.hpp"

#include <cmath>
#include <fstream>

#include "hpcarbon/csv.hpp"
#include "hpcarbon/errors.hpp"
#include "hpcarbon/strings.hpp"

namespace hpcarbon {

void TimeSeries::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].v > 0))
            throw ValidationError("series '" + label + "': value at t=" +
                                  csv::format_double(points[i].t) +
                                  " is not strictly positive");
        if (i > 0 && !(points[i - 1].t < points[i].t))
            throw ValidationError("series '" + label + "': times not strictly increasing");
    }
}

TimeSeries load_series(std::istream& in, std::string label, std::string unit) {
    csv::ReadOptions opts;
    opts.allow_comments = true;
    opts.has_header = false;
    csv::Table rows = csv::read(in, opts);

    TimeSeries series;
    series.label = std::move(label);
    series.unit = std::move(unit);
    std::size_t start = 0;
    if (!rows.rows.empty() && rows.rows.front().size() >= 2) {
        try {
            (void)csv::parse_double(rows.rows.front()[1], "value");
        } catch (const NormalizationError&) {
            start = 1; // header row
        }
    }
    for (std::size_t i = start; i < rows.rows.size(); ++i) {
        const auto& row = rows.rows[i];
        if (row.size() != 2)
            throw ValidationError("series rows need decimal_year,value");
        series.points.push_back(
            {csv::parse_double(row[0], "decimal_year"), csv::parse_double(row[1], "value")});
    }
    series.validate();
    return series;
}

TimeSeries load_series_file(const std::string& path, std::string label, std::string unit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open series file", path);
    return load_series(in, std::move(label), std::move(unit));
}

double TrendFit::value_at(double t) const {
    return anchor_value * std::exp2((t - anchor_time) * growth_rate);
}

TrendFit fit_exponential(const TimeSeries& series, std::optional<Window> window) {
    series.validate();

    std::vector<TimePoint> used;
    for (const auto& p : series.points)
        if (!window || (p.t >= window->start && p.t <= window->end)) used.push_back(p);
    if (used.size() < 3)
        throw InsufficientDataError("fit_exponential: need at least 3 points in window, got " +
                                    std::to_string(used.size()));

    const auto n = static_cast<double>(used.size());
    double sum_t = 0, sum_y = 0;
    for (const auto& p : used) {
        sum_t += p.t;
        sum_y += std::log2(p.v);
    }
    const double mean_t = sum_t / n, mean_y = sum_y / n;

    double stt = 0, sty = 0, syy = 0;
    for (const auto& p : used) {
        double dt = p.t - mean_t;
        double dy = std::log2(p.v) - mean_y;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0))
        throw InsufficientDataError("fit_exponential: window has no time spread");

    TrendFit fit;
    fit.n_points = used.size();
    fit.growth_rate = sty / stt;
    fit.window = {used.front().t, used.back().t};
    fit.anchor_time = 0.5 * (fit.window.start + fit.window.end);
    fit.anchor_value = std::exp2(mean_y + fit.growth_rate * (fit.anchor_time - mean_t));

    double ss_res = 0;
    for (const auto& p : used) {
        double residual = std::log2(p.v) - (mean_y + fit.growth_rate * (p.t - mean_t));
        ss_res += residual * residual;
    }
    fit.r_squared = syy > 0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return fit;
}

double ReferenceLaw::operator()(double t) const {
    return anchor_value * std::exp2((t - anchor_time) / doubling_time);
}

ReferenceLaw reference_law(double anchor_time, double anchor_value, double doubling_time) {
    if (!(doubling_time > 0))
        throw ArgumentError("reference_law: doubling_time must be positive");
    return {anchor_time, anchor_value, doubling_time};
}

double project(const TrendFit& fit, double horizon) {
    if (horizon < fit.window.end)
        throw ArgumentError("project: horizon " + csv::format_double(horizon) +
                            " precedes the fit window end " +
                            csv::format_double(fit.window.end));
    return fit.value_at(horizon);
}

double gain_between(const TrendFit& fit, double t0, double t1) {
    if (!(t1 > t0)) throw ArgumentError("gain_between: t1 must be after t0");
    return std::exp2((t1 - t0) * fit.growth_rate);
}

double carbon_budget(double efficiency_gain, double reduction_target) {
    if (!(efficiency_gain >= 1.0))
        throw ArgumentError("carbon_budget: efficiency_gain must be >= 1");
    if (!(reduction_target >= 0.0) || reduction_target >= 1.0)
        throw ArgumentError("carbon_budget: reduction_target must lie in [0, 1)");
    return efficiency_gain * (1.0 - reduction_target);
}

} // namespace hpcarbon
