#include "tscp/forecaster.hpp"

#include "tscp/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace tscp::forecast {

LinearForecaster::LinearForecaster(Eigen::VectorXd coefficients, double intercept, bool intercept_enabled)
    : coefficients_(std::move(coefficients)),
      intercept_(intercept_enabled ? intercept : 0.0),
      intercept_enabled_(intercept_enabled) {
    if (!coefficients_.allFinite() || !std::isfinite(intercept_))
        throw std::invalid_argument("forecaster coefficients must be finite");
}

LinearForecaster LinearForecaster::fit(const Eigen::Ref<const Eigen::MatrixXd>& covariates,
                                       const Eigen::Ref<const Eigen::VectorXd>& responses, bool intercept) {
    if (covariates.rows() == 0) throw std::invalid_argument("least squares needs at least one pair");
    if (covariates.rows() != responses.size())
        throw std::invalid_argument("covariate rows (" + std::to_string(covariates.rows()) +
                                    ") do not match responses (" + std::to_string(responses.size()) + ")");
    if (!covariates.allFinite() || !responses.allFinite())
        throw std::invalid_argument("least squares inputs must be finite");

    const Eigen::Index p = covariates.cols();
    Eigen::MatrixXd design(covariates.rows(), p + (intercept ? 1 : 0));
    if (intercept) {
        design.col(0).setOnes();
        design.rightCols(p) = covariates;
    } else {
        design = covariates;
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(design);
    const Eigen::VectorXd beta = cod.solve(responses);

    if (intercept) return {beta.tail(p), beta(0), true};
    return {beta, 0.0, false};
}

double LinearForecaster::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != coefficients_.size())
        throw std::invalid_argument("covariate dimension " + std::to_string(x.size()) + " does not match model " +
                                    std::to_string(coefficients_.size()));
    return intercept_ + coefficients_.dot(x);
}

Eigen::VectorXd LinearForecaster::predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& covariates) const {
    if (covariates.cols() != coefficients_.size())
        throw std::invalid_argument("covariate dimension " + std::to_string(covariates.cols()) +
                                    " does not match model " + std::to_string(coefficients_.size()));
    Eigen::VectorXd out = covariates * coefficients_;
    out.array() += intercept_;
    return out;
}

BootstrapEnsemble::BootstrapEnsemble(std::vector<LinearForecaster> models,
                                     std::vector<std::vector<std::size_t>> multisets, std::size_t sample_size)
    : models_(std::move(models)), multisets_(std::move(multisets)), sample_size_(sample_size) {
    if (models_.empty()) throw std::invalid_argument("ensemble needs at least one member");
    if (models_.size() != multisets_.size())
        throw std::invalid_argument("ensemble members and multisets differ in count");
    membership_.assign(models_.size(), std::vector<bool>(sample_size_, false));
    for (std::size_t m = 0; m < multisets_.size(); ++m) {
        for (std::size_t i : multisets_[m]) {
            if (i >= sample_size_) throw std::out_of_range("multiset index beyond the training sample");
            membership_[m][i] = true;
        }
    }
}

BootstrapEnsemble BootstrapEnsemble::fit(const Eigen::Ref<const Eigen::MatrixXd>& covariates,
                                         const Eigen::Ref<const Eigen::VectorXd>& responses,
                                         std::size_t ensemble_size, bool intercept, std::uint64_t seed) {
    if (ensemble_size == 0) throw std::invalid_argument("ensemble size must be >= 1");
    const auto n = static_cast<std::size_t>(covariates.rows());
    if (n == 0) throw std::invalid_argument("least squares needs at least one pair");

    std::vector<LinearForecaster> models;
    std::vector<std::vector<std::size_t>> multisets;
    models.reserve(ensemble_size);
    multisets.reserve(ensemble_size);

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), covariates.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < ensemble_size; ++m) {
        std::mt19937_64 engine(derive_seed(seed, m));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> sample(n);
        for (auto& i : sample) i = pick(engine);
        std::sort(sample.begin(), sample.end());
        for (std::size_t r = 0; r < n; ++r) {
            x.row(static_cast<Eigen::Index>(r)) = covariates.row(static_cast<Eigen::Index>(sample[r]));
            y(static_cast<Eigen::Index>(r)) = responses(static_cast<Eigen::Index>(sample[r]));
        }
        models.push_back(LinearForecaster::fit(x, y, intercept));
        multisets.push_back(std::move(sample));
    }
    return {std::move(models), std::move(multisets), n};
}

bool BootstrapEnsemble::in_bag(std::size_t member, std::size_t position) const {
    if (position >= sample_size_) throw std::out_of_range("position outside the training sample");
    return membership_.at(member)[position];
}

std::vector<std::size_t> BootstrapEnsemble::out_of_bag_members(std::size_t position) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < models_.size(); ++m)
        if (!in_bag(m, position)) out.push_back(m);
    return out;
}

double BootstrapEnsemble::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double sum = 0.0;
    for (const auto& model : models_) sum += model.predict(x);
    return sum / static_cast<double>(models_.size());
}

double BootstrapEnsemble::oob_predict(std::size_t position, const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const auto members = out_of_bag_members(position);
    if (members.empty()) return predict(x);
    double sum = 0.0;
    for (std::size_t m : members) sum += models_[m].predict(x);
    return sum / static_cast<double>(members.size());
}

}  // namespace tscp::forecast
