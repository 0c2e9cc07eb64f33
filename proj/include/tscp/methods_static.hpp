#pragma once

#include "tscp/calibration.hpp"
#include "tscp/dgp.hpp"
#include "tscp/forecaster.hpp"
#include "tscp/intervals.hpp"

#include <cstddef>
#include <span>

namespace tscp::methods {

/// Absolute residuals of the model over one block of the split, in temporal order.
calib::ScoreSet block_scores(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split,
                             dgp::IndexRange range);

/// Split conformal: one threshold from the calibration residuals, applied to every test step.
IntervalSeries scp(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha);

/// Which residuals the weighted quantile sees at test step t.
enum class WcpCalibration {
    Fixed,       ///< the calibration block only
    Sequential,  ///< the calibration block plus every test residual revealed before t
};

/// Weighted conformal prediction with weights recomputed for each test time.
IntervalSeries wcp(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha,
                   const calib::WeightScheme& scheme, WcpCalibration mode = WcpCalibration::Fixed);

/**
 * Threshold of split block conformal over cyclic block rotations.
 *
 * The calibration scores (temporal order) plus one test slot form n+1
 * positions. The oldest (n+1) mod B scores are dropped so m equal blocks of
 * size B remain, the test slot closing the last block. Each non-identity
 * rotation moves one calibration block into the last slot; its score at the
 * test slot's offset is R_r. A candidate score s is kept iff
 *   1 + #{r : R_r >= s} > alpha * m,
 * so the threshold is the c-th largest R_r with c the smallest integer such
 * that 1 + c > alpha * m; c = 0 gives +inf.
 */
double blocked_threshold(std::span<const double> cal_scores, double alpha, std::size_t block_size);

IntervalSeries blocked_scp(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha,
                           std::size_t block_size);

}  // namespace tscp::methods
