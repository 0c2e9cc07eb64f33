#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tscp::forecast {

/**
 * @brief Linear autoregressive predictor fit once by least squares.
 *
 * Rank-deficient designs resolve to the minimum-norm solution (the intercept,
 * when enabled, is part of the norm). Instances are immutable after fitting.
 */
class LinearForecaster {
public:
    static LinearForecaster fit(const Eigen::Ref<const Eigen::MatrixXd>& covariates,
                                const Eigen::Ref<const Eigen::VectorXd>& responses, bool intercept = true);

    /// Builds a forecaster from known coefficients (no fitting).
    LinearForecaster(Eigen::VectorXd coefficients, double intercept, bool intercept_enabled);

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& covariates) const;

    const Eigen::VectorXd& coefficients() const { return coefficients_; }
    double intercept() const { return intercept_; }
    bool intercept_enabled() const { return intercept_enabled_; }
    Eigen::Index dimension() const { return coefficients_.size(); }

private:
    Eigen::VectorXd coefficients_;
    double intercept_ = 0.0;
    bool intercept_enabled_ = false;
};

/// Relative threshold below which singular directions are treated as null.
inline constexpr double kRankTolerance = 1e-10;

/**
 * @brief M least-squares models fit on bootstrap resamples of a training block.
 *
 * Each member keeps its index multiset (positions 0..n-1 into the training
 * block) so out-of-bag membership can be queried.
 */
class BootstrapEnsemble {
public:
    static BootstrapEnsemble fit(const Eigen::Ref<const Eigen::MatrixXd>& covariates,
                                 const Eigen::Ref<const Eigen::VectorXd>& responses, std::size_t ensemble_size,
                                 bool intercept, std::uint64_t seed);

    /// Builds an ensemble from explicit members and multisets (used for inspection and tests).
    BootstrapEnsemble(std::vector<LinearForecaster> models, std::vector<std::vector<std::size_t>> multisets,
                      std::size_t sample_size);

    std::size_t size() const { return models_.size(); }
    std::size_t sample_size() const { return sample_size_; }
    const std::vector<LinearForecaster>& models() const { return models_; }
    const std::vector<std::vector<std::size_t>>& multisets() const { return multisets_; }

    bool in_bag(std::size_t member, std::size_t position) const;

    /// Members whose multiset excludes the position; may be empty.
    std::vector<std::size_t> out_of_bag_members(std::size_t position) const;

    /// Mean of all member predictions.
    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// Mean over out-of-bag members, or over all members when none is out of bag.
    double oob_predict(std::size_t position, const Eigen::Ref<const Eigen::VectorXd>& x) const;

private:
    std::vector<LinearForecaster> models_;
    std::vector<std::vector<std::size_t>> multisets_;
    std::vector<std::vector<bool>> membership_;
    std::size_t sample_size_ = 0;
};

}  // namespace tscp::forecast
