#pragma once

#include "tscp/dgp.hpp"
#include "tscp/forecaster.hpp"
#include "tscp/intervals.hpp"

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace tscp::methods {

/**
 * @brief Fixed-capacity FIFO of residuals with a pending buffer.
 *
 * Residuals observed during the test phase wait in the pending buffer until
 * refresh(), which appends them and evicts the oldest entries so the size
 * returns to its initial capacity.
 */
class ResidualPool {
public:
    explicit ResidualPool(std::vector<double> initial);

    void observe(double residual) { pending_.push_back(residual); }

    /// Applies the pending residuals; returns how many entries were evicted.
    std::size_t refresh();

    /// Plain ceil((1-alpha) size)-th order statistic of the current pool.
    double quantile(double alpha) const;

    const std::deque<double>& values() const { return values_; }
    const std::vector<double>& pending() const { return pending_; }
    std::size_t capacity() const { return capacity_; }

private:
    std::deque<double> values_;
    std::vector<double> pending_;
    std::size_t capacity_;
};

/// Where EnbPI's initial residual pool comes from.
enum class EnbpiPool {
    TrainingOob,  ///< out-of-bag residuals on the training block
    Calibration,  ///< ensemble-mean residuals on the calibration block
};

/**
 * EnbPI over a prepared stream: centers are the ensemble-mean predictions,
 * truth the responses revealed after each step. Every refresh_period steps the
 * newest residuals replace the oldest pool entries.
 */
IntervalSeries enbpi_stream(std::vector<double> initial_pool, std::span<const double> centers,
                            std::span<const double> truth, double alpha, std::size_t refresh_period);

IntervalSeries enbpi(const forecast::BootstrapEnsemble& ensemble, const dgp::SupervisedSplit& split, double alpha,
                     std::size_t refresh_period, EnbpiPool pool = EnbpiPool::TrainingOob);

/// alpha_{t+1} = alpha_t + gamma (alpha - err), unclamped.
double aci_update(double alpha_t, bool error, double alpha, double gamma);

struct AciStep {
    double alpha_t = 0.0;
    bool error = false;
};

struct AciState {
    double alpha_t = 0.0;
    std::vector<AciStep> trajectory;

    std::size_t errors() const;
};

struct AciResult {
    IntervalSeries intervals;
    AciState state;
};

/**
 * ACI over a prepared stream with fixed calibration scores. The threshold uses
 * rank ceil((1-alpha_t)(n+1)): above n the interval is unbounded (never an
 * error), below 1 it is empty (always an error).
 */
AciResult aci_stream(std::span<const double> cal_scores, std::span<const double> centers,
                     std::span<const double> truth, double alpha, double gamma);

AciResult aci(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha,
              double gamma);

/// Right-hand side of the finite-horizon ACI guarantee: (max{a1, 1-a1} + gamma) / (T gamma).
double aci_miscoverage_bound(double alpha_first, double gamma, std::size_t steps);

}  // namespace tscp::methods
