#include "tscp/dgp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace tscp::dgp {

namespace {

double default_param(ProcessKind kind, const std::string& name) {
    switch (kind) {
        case ProcessKind::AR1:
            if (name == "phi") return 0.8;
            if (name == "sigma") return 1.0;
            if (name == "y0") return 0.0;
            break;
        case ProcessKind::ARMA11:
            if (name == "phi") return 0.5;
            if (name == "theta") return 0.4;
            if (name == "sigma") return 1.0;
            if (name == "y0") return 0.0;
            break;
        case ProcessKind::MeanShift:
            if (name == "mu0") return 0.0;
            if (name == "shift") return 1.0;
            if (name == "t_star") return 601.0;
            if (name == "sigma") return 1.0;
            break;
        case ProcessKind::ARCH:
            if (name == "omega") return 0.4;
            if (name == "a1") return 0.5;
            if (name == "y0") return 0.0;
            break;
    }
    throw std::invalid_argument("unknown parameter '" + name + "' for process " + to_string(kind));
}

}  // namespace

std::string to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::AR1: return "AR1";
        case ProcessKind::ARMA11: return "ARMA11";
        case ProcessKind::MeanShift: return "MEANSHIFT";
        case ProcessKind::ARCH: return "ARCH";
    }
    return "?";
}

ProcessKind process_kind_from_string(const std::string& name) {
    if (name == "AR1") return ProcessKind::AR1;
    if (name == "ARMA11") return ProcessKind::ARMA11;
    if (name == "MEANSHIFT") return ProcessKind::MeanShift;
    if (name == "ARCH") return ProcessKind::ARCH;
    throw std::invalid_argument("unknown process kind '" + name + "'");
}

double ProcessSpec::param(const std::string& name) const {
    if (auto it = params.find(name); it != params.end()) return it->second;
    return default_param(kind, name);
}

void ProcessSpec::validate() const {
    for (const auto& [name, value] : params) {
        default_param(kind, name);  // rejects unknown names
        if (!std::isfinite(value)) throw std::invalid_argument("parameter '" + name + "' is not finite");
    }
    if (kind != ProcessKind::ARCH && param("sigma") < 0.0)
        throw std::invalid_argument("sigma must be nonnegative");
    switch (kind) {
        case ProcessKind::AR1:
        case ProcessKind::ARMA11:
            if (std::abs(param("phi")) >= 1.0)
                throw std::invalid_argument("stationarity violated: |phi| must be < 1, got " +
                                            std::to_string(param("phi")));
            break;
        case ProcessKind::ARCH:
            if (param("omega") <= 0.0) throw std::invalid_argument("ARCH requires omega > 0");
            if (param("a1") < 0.0) throw std::invalid_argument("ARCH requires a1 >= 0");
            break;
        case ProcessKind::MeanShift:
            if (param("t_star") < 1.0) throw std::invalid_argument("t_star must be >= 1");
            break;
    }
}

ProcessSpec ProcessSpec::ar1(double phi, double sigma) {
    return {ProcessKind::AR1, {{"phi", phi}, {"sigma", sigma}}, 200, "AR(1)"};
}

ProcessSpec ProcessSpec::arma11(double phi, double theta, double sigma) {
    return {ProcessKind::ARMA11, {{"phi", phi}, {"theta", theta}, {"sigma", sigma}}, 200, "ARMA(1,1)"};
}

ProcessSpec ProcessSpec::mean_shift(double mu0, double shift, double t_star, double sigma) {
    return {ProcessKind::MeanShift,
            {{"mu0", mu0}, {"shift", shift}, {"t_star", t_star}, {"sigma", sigma}},
            0,
            "MeanShift"};
}

ProcessSpec ProcessSpec::arch(double omega, double a1) {
    return {ProcessKind::ARCH, {{"omega", omega}, {"a1", a1}}, 200, "ARCH"};
}

std::vector<double> simulate(const ProcessSpec& spec, std::span<const double> innovations) {
    spec.validate();
    const std::size_t total = innovations.size();
    if (total <= spec.burn_in) throw std::invalid_argument("empty request: no values remain after burn-in");

    std::vector<double> y(total);
    switch (spec.kind) {
        case ProcessKind::AR1: {
            const double phi = spec.param("phi"), sigma = spec.param("sigma");
            y[0] = spec.param("y0");
            for (std::size_t t = 1; t < total; ++t) y[t] = phi * y[t - 1] + sigma * innovations[t];
            break;
        }
        case ProcessKind::ARMA11: {
            const double phi = spec.param("phi"), theta = spec.param("theta"), sigma = spec.param("sigma");
            y[0] = spec.param("y0");
            double prev_eps = 0.0;
            for (std::size_t t = 1; t < total; ++t) {
                const double eps = sigma * innovations[t];
                y[t] = phi * y[t - 1] + eps + theta * prev_eps;
                prev_eps = eps;
            }
            break;
        }
        case ProcessKind::ARCH: {
            const double omega = spec.param("omega"), a1 = spec.param("a1");
            y[0] = spec.param("y0");
            for (std::size_t t = 1; t < total; ++t)
                y[t] = innovations[t] * std::sqrt(omega + a1 * y[t - 1] * y[t - 1]);
            break;
        }
        case ProcessKind::MeanShift: {
            const double mu0 = spec.param("mu0"), shift = spec.param("shift"), sigma = spec.param("sigma");
            const double t_star = spec.param("t_star");
            for (std::size_t i = 0; i < total; ++i) {
                const double t = static_cast<double>(i + 1);
                y[i] = mu0 + (t >= t_star ? shift : 0.0) + sigma * innovations[i];
            }
            break;
        }
    }
    return {y.begin() + static_cast<std::ptrdiff_t>(spec.burn_in), y.end()};
}

TimeSeries generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("empty request: n must be >= 1");
    spec.validate();
    if (spec.kind == ProcessKind::MeanShift && spec.param("t_star") > static_cast<double>(n))
        throw std::invalid_argument("t_star lies beyond the requested series length");

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> innovations(n + spec.burn_in);
    for (auto& e : innovations) e = normal(engine);
    return {simulate(spec, innovations), spec, seed};
}

SupervisedSplit make_split(std::span<const double> series, int lag_order, SplitSizes sizes) {
    if (lag_order < 1) throw std::invalid_argument("lag order must be >= 1");
    const std::size_t p = static_cast<std::size_t>(lag_order);
    const std::size_t pairs = sizes.train + sizes.cal + sizes.test;
    const std::size_t needed = p + pairs;
    if (needed > series.size())
        throw std::invalid_argument("series too short: need " + std::to_string(needed) + " observations, have " +
                                    std::to_string(series.size()) + " (deficit " +
                                    std::to_string(needed - series.size()) + ")");

    SupervisedSplit split;
    split.lag_order = lag_order;
    split.covariates.resize(static_cast<Eigen::Index>(pairs), lag_order);
    split.responses.resize(static_cast<Eigen::Index>(pairs));
    split.times.resize(pairs);
    for (std::size_t j = 0; j < pairs; ++j) {
        const std::size_t t = p + j;  // 0-based position of the response
        split.responses(static_cast<Eigen::Index>(j)) = series[t];
        for (std::size_t lag = 1; lag <= p; ++lag)
            split.covariates(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(lag - 1)) = series[t - lag];
        split.times[j] = static_cast<long>(t + 1);
    }
    split.train = {0, sizes.train};
    split.cal = {sizes.train, sizes.train + sizes.cal};
    split.test = {sizes.train + sizes.cal, pairs};
    return split;
}

}  // namespace tscp::dgp
