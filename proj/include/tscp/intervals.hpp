#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace tscp {

/// Closed prediction interval around a point forecast. Bounds may be infinite.
struct Interval {
    double center = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool empty = false;

    static Interval symmetric(double center, double radius) {
        if (radius < 0.0) return {center, center, center, true};
        return {center, center - radius, center + radius, false};
    }
    static Interval none(double center) { return {center, center, center, true}; }

    double width() const { return empty ? 0.0 : upper - lower; }
    bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
    bool contains(double y) const { return !empty && lower <= y && y <= upper; }
};

/**
 * @brief Per-test-step intervals produced by one method variant.
 *
 * trace carries the method's per-step state: the threshold for static
 * methods, the pool radius for EnbPI, alpha_t for ACI.
 */
struct IntervalSeries {
    std::string method;
    std::string variant;
    std::vector<Interval> steps;
    std::vector<double> trace;

    std::size_t size() const { return steps.size(); }
};

}  // namespace tscp
