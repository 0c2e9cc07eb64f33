#include "tscp/methods_static.hpp"

#include "tscp/format.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tscp::methods {

calib::ScoreSet block_scores(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split,
                             dgp::IndexRange range) {
    calib::ScoreSet out;
    out.scores.reserve(range.size());
    out.times.reserve(range.size());
    for (std::size_t j = range.begin; j < range.end; ++j) {
        const double yhat = model.predict(split.covariate(j));
        out.scores.push_back(calib::abs_residual(split.responses(static_cast<Eigen::Index>(j)), yhat));
        out.times.push_back(split.times[j]);
    }
    return out;
}

namespace {

IntervalSeries constant_threshold(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split,
                                  double threshold) {
    IntervalSeries out;
    out.steps.reserve(split.test.size());
    for (std::size_t j = split.test.begin; j < split.test.end; ++j) {
        out.steps.push_back(Interval::symmetric(model.predict(split.covariate(j)), threshold));
        out.trace.push_back(threshold);
    }
    return out;
}

std::string scheme_label(const calib::WeightScheme& scheme) {
    switch (scheme.kind) {
        case calib::WeightScheme::Kind::Exponential: return "exp(rho=" + format_double(scheme.rho) + ")";
        case calib::WeightScheme::Kind::Linear: return "linear";
        case calib::WeightScheme::Kind::Window: return "window(k=" + std::to_string(scheme.window) + ")";
    }
    return "?";
}

}  // namespace

IntervalSeries scp(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha) {
    const auto cal = block_scores(model, split, split.cal);
    auto out = constant_threshold(model, split, calib::split_quantile(cal.scores, alpha));
    out.method = "SCP";
    out.variant = "default";
    return out;
}

IntervalSeries wcp(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha,
                   const calib::WeightScheme& scheme, WcpCalibration mode) {
    scheme.validate();
    auto pool = block_scores(model, split, split.cal);

    IntervalSeries out;
    out.method = "WCP";
    out.variant = scheme_label(scheme);
    out.steps.reserve(split.test.size());
    for (std::size_t j = split.test.begin; j < split.test.end; ++j) {
        const long t = split.times[j];
        const auto weights = calib::make_weights(scheme, pool.times, t);
        const double threshold = calib::weighted_quantile(pool.scores, weights, alpha);
        const double yhat = model.predict(split.covariate(j));
        out.steps.push_back(Interval::symmetric(yhat, threshold));
        out.trace.push_back(threshold);
        if (mode == WcpCalibration::Sequential) {
            // Y_t is revealed after the interval is issued.
            pool.scores.push_back(calib::abs_residual(split.responses(static_cast<Eigen::Index>(j)), yhat));
            pool.times.push_back(t);
        }
    }
    return out;
}

double blocked_threshold(std::span<const double> cal_scores, double alpha, std::size_t block_size) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
    const std::size_t positions = cal_scores.size() + 1;
    if (block_size > positions)
        throw std::invalid_argument("block size " + std::to_string(block_size) + " exceeds n_cal + 1 = " +
                                    std::to_string(positions));

    const std::size_t dropped = positions % block_size;
    const std::size_t blocks = (positions - dropped) / block_size;
    const std::size_t offset = block_size - 1;  // test slot closes the last block

    std::vector<double> rotated;
    rotated.reserve(blocks - 1);
    for (std::size_t b = 0; b + 1 < blocks; ++b) rotated.push_back(cal_scores[dropped + b * block_size + offset]);

    // Smallest c with 1 + c > alpha * m.
    const double scaled = alpha * static_cast<double>(blocks);
    const double nearest = std::round(scaled);
    const long needed = std::abs(scaled - nearest) < 1e-9 ? static_cast<long>(nearest)
                                                          : static_cast<long>(std::floor(scaled));
    if (needed <= 0) return calib::kInf;
    return calib::order_statistic(rotated, static_cast<long>(blocks) - needed);
}

IntervalSeries blocked_scp(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha,
                           std::size_t block_size) {
    const auto cal = block_scores(model, split, split.cal);
    auto out = constant_threshold(model, split, blocked_threshold(cal.scores, alpha, block_size));
    out.method = "SCP-block";
    out.variant = "B=" + std::to_string(block_size);
    return out;
}

}  // namespace tscp::methods
