#include "tscp/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tscp::calib {

namespace {

// Guards comparisons of accumulated floating-point mass against a level.
constexpr double kMassTolerance = 1e-12;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

// Ceiling that snaps products within 1e-9 of an integer, so (1-0.1)*10 yields 9.
long snapped_ceil(double x) {
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-9) return static_cast<long>(nearest);
    return static_cast<long>(std::ceil(x));
}

}  // namespace

void ScoreSet::validate() const {
    if (scores.size() != times.size()) throw std::invalid_argument("scores and times differ in length");
    for (double s : scores)
        if (!(s >= 0.0)) throw std::invalid_argument("scores must be nonnegative");
}

long conformal_rank(std::size_t n, double alpha) { return snapped_ceil((1.0 - alpha) * static_cast<double>(n + 1)); }

long empirical_rank(std::size_t n, double alpha) { return snapped_ceil((1.0 - alpha) * static_cast<double>(n)); }

double order_statistic(std::span<const double> scores, long k) {
    if (k < 1) return -kInf;
    if (static_cast<std::size_t>(k) > scores.size()) return kInf;
    std::vector<double> copy(scores.begin(), scores.end());
    auto kth = copy.begin() + (k - 1);
    std::nth_element(copy.begin(), kth, copy.end());
    return *kth;
}

double split_quantile(std::span<const double> scores, double alpha) {
    if (scores.empty()) throw std::invalid_argument("split_quantile: empty score set");
    check_alpha(alpha);
    return order_statistic(scores, conformal_rank(scores.size(), alpha));
}

double empirical_quantile(std::span<const double> scores, double alpha) {
    if (scores.empty()) throw std::invalid_argument("empirical_quantile: empty score set");
    check_alpha(alpha);
    return order_statistic(scores, empirical_rank(scores.size(), alpha));
}

double weighted_quantile(std::span<const double> scores, std::span<const double> weights, double alpha) {
    if (scores.empty()) throw std::invalid_argument("weighted_quantile: empty score set");
    if (scores.size() != weights.size()) throw std::invalid_argument("weighted_quantile: weights and scores differ in length");
    check_alpha(alpha);

    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("weighted_quantile: all weights are zero");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    const double level = 1.0 - alpha;
    double mass = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        const double value = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == value; ++i) mass += weights[order[i]] / total;
        if (mass >= level - kMassTolerance) return value;
    }
    return scores[order.back()];
}

void WeightScheme::validate() const {
    switch (kind) {
        case Kind::Exponential:
            if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("exponential weights need rho in (0, 1)");
            break;
        case Kind::Window:
            if (window < 1) throw std::invalid_argument("window weights need k >= 1");
            break;
        case Kind::Linear:
            break;
    }
}

std::vector<double> make_weights(const WeightScheme& scheme, std::span<const long> cal_times, long test_time) {
    scheme.validate();
    if (cal_times.empty()) return {};
    if (test_time <= *std::max_element(cal_times.begin(), cal_times.end()))
        throw std::invalid_argument("test time must follow every calibration time");

    const std::size_t n = cal_times.size();
    std::vector<double> w(n, 0.0);

    // Positions sorted by time, oldest first.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cal_times[a] < cal_times[b]; });

    switch (scheme.kind) {
        case WeightScheme::Kind::Exponential:
            for (std::size_t i = 0; i < n; ++i)
                w[i] = std::pow(scheme.rho, static_cast<double>(test_time - cal_times[i]));
            break;
        case WeightScheme::Kind::Linear:
            for (std::size_t rank = 0; rank < n; ++rank) w[order[rank]] = static_cast<double>(rank + 1);
            break;
        case WeightScheme::Kind::Window: {
            const std::size_t k = std::min(scheme.window, n);
            for (std::size_t rank = n - k; rank < n; ++rank) w[order[rank]] = 1.0;
            break;
        }
    }
    return w;
}

}  // namespace tscp::calib
