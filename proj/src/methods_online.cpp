#include "tscp/methods_online.hpp"

#include "tscp/calibration.hpp"
#include "tscp/format.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tscp::methods {

ResidualPool::ResidualPool(std::vector<double> initial)
    : values_(initial.begin(), initial.end()), capacity_(initial.size()) {
    if (values_.empty()) throw std::invalid_argument("residual pool must start nonempty");
}

std::size_t ResidualPool::refresh() {
    for (double r : pending_) values_.push_back(r);
    pending_.clear();
    std::size_t evicted = 0;
    while (values_.size() > capacity_) {
        values_.pop_front();
        ++evicted;
    }
    return evicted;
}

double ResidualPool::quantile(double alpha) const {
    const std::vector<double> snapshot(values_.begin(), values_.end());
    return calib::empirical_quantile(snapshot, alpha);
}

IntervalSeries enbpi_stream(std::vector<double> initial_pool, std::span<const double> centers,
                            std::span<const double> truth, double alpha, std::size_t refresh_period) {
    if (refresh_period < 1) throw std::invalid_argument("refresh period must be >= 1");
    if (centers.size() != truth.size()) throw std::invalid_argument("centers and truth differ in length");

    ResidualPool pool(std::move(initial_pool));
    IntervalSeries out;
    out.method = "EnbPI";
    out.variant = "s=" + std::to_string(refresh_period);
    out.steps.reserve(centers.size());
    for (std::size_t step = 0; step < centers.size(); ++step) {
        const double radius = pool.quantile(alpha);
        out.steps.push_back(Interval::symmetric(centers[step], radius));
        out.trace.push_back(radius);
        pool.observe(calib::abs_residual(truth[step], centers[step]));
        if ((step + 1) % refresh_period == 0) pool.refresh();
    }
    return out;
}

IntervalSeries enbpi(const forecast::BootstrapEnsemble& ensemble, const dgp::SupervisedSplit& split, double alpha,
                     std::size_t refresh_period, EnbpiPool pool) {
    if (ensemble.sample_size() != split.train.size())
        throw std::invalid_argument("ensemble was not fit on this split's training block");

    std::vector<double> initial;
    if (pool == EnbpiPool::TrainingOob) {
        initial.reserve(split.train.size());
        for (std::size_t i = 0; i < split.train.size(); ++i) {
            const std::size_t row = split.train.begin + i;
            const double yhat = ensemble.oob_predict(i, split.covariate(row));
            initial.push_back(calib::abs_residual(split.responses(static_cast<Eigen::Index>(row)), yhat));
        }
    } else {
        initial.reserve(split.cal.size());
        for (std::size_t row = split.cal.begin; row < split.cal.end; ++row)
            initial.push_back(calib::abs_residual(split.responses(static_cast<Eigen::Index>(row)),
                                                  ensemble.predict(split.covariate(row))));
    }

    std::vector<double> centers, truth;
    centers.reserve(split.test.size());
    truth.reserve(split.test.size());
    for (std::size_t row = split.test.begin; row < split.test.end; ++row) {
        centers.push_back(ensemble.predict(split.covariate(row)));
        truth.push_back(split.responses(static_cast<Eigen::Index>(row)));
    }
    return enbpi_stream(std::move(initial), centers, truth, alpha, refresh_period);
}

double aci_update(double alpha_t, bool error, double alpha, double gamma) {
    return alpha_t + gamma * (alpha - (error ? 1.0 : 0.0));
}

std::size_t AciState::errors() const {
    return static_cast<std::size_t>(
        std::count_if(trajectory.begin(), trajectory.end(), [](const AciStep& s) { return s.error; }));
}

AciResult aci_stream(std::span<const double> cal_scores, std::span<const double> centers,
                     std::span<const double> truth, double alpha, double gamma) {
    if (cal_scores.empty()) throw std::invalid_argument("ACI needs calibration scores");
    if (!(gamma > 0.0)) throw std::invalid_argument("ACI step size must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (centers.size() != truth.size()) throw std::invalid_argument("centers and truth differ in length");

    AciResult result;
    auto& out = result.intervals;
    out.method = "ACI";
    out.variant = "gamma=" + format_double(gamma);
    out.steps.reserve(centers.size());

    auto& state = result.state;
    state.alpha_t = alpha;
    state.trajectory.reserve(centers.size());
    for (std::size_t step = 0; step < centers.size(); ++step) {
        const long rank = calib::conformal_rank(cal_scores.size(), state.alpha_t);
        const double threshold = calib::order_statistic(cal_scores, rank);
        const Interval interval = Interval::symmetric(centers[step], threshold);
        out.steps.push_back(interval);
        out.trace.push_back(state.alpha_t);

        const bool error = !interval.contains(truth[step]);
        state.trajectory.push_back({state.alpha_t, error});
        state.alpha_t = aci_update(state.alpha_t, error, alpha, gamma);
    }
    return result;
}

AciResult aci(const forecast::LinearForecaster& model, const dgp::SupervisedSplit& split, double alpha,
              double gamma) {
    std::vector<double> cal;
    cal.reserve(split.cal.size());
    for (std::size_t row = split.cal.begin; row < split.cal.end; ++row)
        cal.push_back(calib::abs_residual(split.responses(static_cast<Eigen::Index>(row)),
                                          model.predict(split.covariate(row))));

    std::vector<double> centers, truth;
    for (std::size_t row = split.test.begin; row < split.test.end; ++row) {
        centers.push_back(model.predict(split.covariate(row)));
        truth.push_back(split.responses(static_cast<Eigen::Index>(row)));
    }
    return aci_stream(cal, centers, truth, alpha, gamma);
}

double aci_miscoverage_bound(double alpha_first, double gamma, std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("ACI bound needs at least one step");
    return (std::max(alpha_first, 1.0 - alpha_first) + gamma) / (static_cast<double>(steps) * gamma);
}

}  // namespace tscp::methods
