#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace tscp::calib {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute-residual scores in temporal order with their observation times.
struct ScoreSet {
    std::vector<double> scores;
    std::vector<long> times;

    std::size_t size() const { return scores.size(); }
    void validate() const;
};

inline double abs_residual(double y, double yhat) { return y > yhat ? y - yhat : yhat - y; }

/// k = ceil((1 - alpha)(n + 1)), snapping products within 1e-9 of an integer.
long conformal_rank(std::size_t n, double alpha);

/// k = ceil((1 - alpha) n) with the same snapping; the uncorrected empirical rank.
long empirical_rank(std::size_t n, double alpha);

/**
 * k-th smallest value (1-based) of the scores. Returns +inf when k exceeds the
 * sample size and -inf when k < 1; callers decide what those mean.
 */
double order_statistic(std::span<const double> scores, long k);

/// Split-conformal threshold: the ceil((1-alpha)(n+1))-th smallest score, +inf if that exceeds n.
double split_quantile(std::span<const double> scores, double alpha);

/// Plain empirical (1-alpha) quantile: the ceil((1-alpha) n)-th smallest score.
double empirical_quantile(std::span<const double> scores, double alpha);

/**
 * Weighted empirical quantile: the smallest observed score t whose normalised
 * weighted mass {s_i <= t} reaches 1 - alpha. Ties are accumulated together.
 */
double weighted_quantile(std::span<const double> scores, std::span<const double> weights, double alpha);

struct WeightScheme {
    enum class Kind { Exponential, Linear, Window };
    Kind kind = Kind::Exponential;
    double rho = 0.99;
    std::size_t window = 50;

    static WeightScheme exponential(double rho) { return {Kind::Exponential, rho, 0}; }
    static WeightScheme linear() { return {Kind::Linear, 0.0, 0}; }
    static WeightScheme sliding_window(std::size_t k) { return {Kind::Window, 0.0, k}; }

    void validate() const;
};

/**
 * Unnormalised calibration weights for a test point at test_time.
 *   Exponential: rho^(test_time - t_i)
 *   Linear:      temporal rank of t_i (1 = oldest)
 *   Window(k):   1 on the k most recent times, 0 elsewhere; k is clamped to the set size
 */
std::vector<double> make_weights(const WeightScheme& scheme, std::span<const long> cal_times, long test_time);

}  // namespace tscp::calib
