#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tscp::dgp {

enum class ProcessKind { AR1, ARMA11, MeanShift, ARCH };

std::string to_string(ProcessKind kind);
ProcessKind process_kind_from_string(const std::string& name);

/**
 * @brief Parametric description of a simulated process.
 *
 * Recognised parameters per kind (missing entries take the defaults below):
 *   AR1       phi=0.8, sigma=1, y0=0
 *   ARMA11    phi=0.5, theta=0.4, sigma=1, y0=0
 *   MeanShift mu0=0, shift=1, t_star=601, sigma=1
 *   ARCH      omega=0.4, a1=0.5, y0=0
 *
 * Recursive processes emit their initial state y0 as the first value, then one
 * value per innovation. MeanShift has no state: value i (1-based) is time t=i,
 * and the shift applies from t_star onwards.
 */
struct ProcessSpec {
    ProcessKind kind = ProcessKind::AR1;
    std::map<std::string, double> params;
    std::size_t burn_in = 0;
    std::string label;

    /// Parameter value, falling back to the kind's default.
    double param(const std::string& name) const;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    static ProcessSpec ar1(double phi = 0.8, double sigma = 1.0);
    static ProcessSpec arma11(double phi = 0.5, double theta = 0.4, double sigma = 1.0);
    static ProcessSpec mean_shift(double mu0 = 0.0, double shift = 1.0, double t_star = 601,
                                  double sigma = 1.0);
    static ProcessSpec arch(double omega = 0.4, double a1 = 0.5);
};

struct TimeSeries {
    std::vector<double> values;
    ProcessSpec spec;
    std::uint64_t seed = 0;
};

/// Simulates n values (after discarding spec.burn_in) with seeded Gaussian innovations.
TimeSeries generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

/**
 * Runs the recursion on caller-supplied innovations. innovations[i] drives
 * output value i; for recursive processes innovations[0] is unused because the
 * first value is the initial state. The result has innovations.size() values
 * minus burn_in.
 */
std::vector<double> simulate(const ProcessSpec& spec, std::span<const double> innovations);

/// Contiguous half-open range of pair indices.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

/**
 * @brief Lagged regression pairs partitioned into train/calibration/test blocks.
 *
 * Row j of covariates is (Y_{t-1}, ..., Y_{t-p}) for response Y_t, where
 * t = times[j] is the 1-based position of the response in the source series.
 */
struct SupervisedSplit {
    Eigen::MatrixXd covariates;
    Eigen::VectorXd responses;
    std::vector<long> times;
    int lag_order = 0;
    IndexRange train;
    IndexRange cal;
    IndexRange test;

    std::size_t size() const { return static_cast<std::size_t>(responses.size()); }
    Eigen::VectorXd covariate(std::size_t row) const { return covariates.row(static_cast<Eigen::Index>(row)).transpose(); }
};

struct SplitSizes {
    std::size_t train = 300;
    std::size_t cal = 300;
    std::size_t test = 300;
};

/// The first p observations seed the lags; the three blocks follow in order.
SupervisedSplit make_split(std::span<const double> series, int lag_order, SplitSizes sizes);

}  // namespace tscp::dgp
