#include "tscp/mixing_bounds.hpp"

#include "tscp/format.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tscp::bounds {

MixingModel MixingModel::iid() { return {}; }

MixingModel MixingModel::geometric(double c, double rho) {
    if (!(c >= 0.0) || !(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("geometric mixing needs c >= 0 and rho in [0, 1)");
    MixingModel m;
    m.kind_ = Kind::Geometric;
    m.scale_ = c;
    m.rate_ = rho;
    return m;
}

MixingModel MixingModel::polynomial(double c, double kappa) {
    if (!(c >= 0.0) || !(kappa > 0.0)) throw std::invalid_argument("polynomial mixing needs c >= 0 and kappa > 0");
    MixingModel m;
    m.kind_ = Kind::Polynomial;
    m.scale_ = c;
    m.rate_ = kappa;
    return m;
}

MixingModel MixingModel::table(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("mixing table must be nonempty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0 && values[i] <= 1.0)) throw std::invalid_argument("mixing table entries must lie in [0, 1]");
        if (i > 0 && values[i] > values[i - 1]) throw std::invalid_argument("mixing table must be nonincreasing");
    }
    MixingModel m;
    m.kind_ = Kind::Table;
    m.table_ = std::move(values);
    return m;
}

MixingModel MixingModel::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream rest(text.substr(colon + 1));
        for (std::string item; std::getline(rest, item, ',');) args.push_back(parse_double(item));
    }
    auto expect = [&](std::size_t n) {
        if (args.size() != n) throw std::invalid_argument("mixing model '" + head + "' takes " + std::to_string(n) + " arguments");
    };
    if (head == "iid") {
        expect(0);
        return iid();
    }
    if (head == "geometric") {
        expect(2);
        return geometric(args[0], args[1]);
    }
    if (head == "polynomial") {
        expect(2);
        return polynomial(args[0], args[1]);
    }
    if (head == "table") return table(std::move(args));
    throw std::invalid_argument("unknown mixing model '" + text + "'");
}

std::string MixingModel::describe() const {
    switch (kind_) {
        case Kind::IID: return "iid";
        case Kind::Geometric: return "geometric:" + format_double(scale_) + "," + format_double(rate_);
        case Kind::Polynomial: return "polynomial:" + format_double(scale_) + "," + format_double(rate_);
        case Kind::Table: {
            std::string out = "table:";
            for (std::size_t i = 0; i < table_.size(); ++i) out += (i ? "," : "") + format_double(table_[i]);
            return out;
        }
    }
    return "?";
}

double MixingModel::beta(long lag) const {
    if (lag < 1) throw std::invalid_argument("mixing lag must be >= 1, got " + std::to_string(lag));
    switch (kind_) {
        case Kind::IID: return 0.0;
        case Kind::Geometric: return std::min(1.0, scale_ * std::pow(rate_, static_cast<double>(lag)));
        case Kind::Polynomial: return std::min(1.0, scale_ * std::pow(static_cast<double>(lag), -rate_));
        case Kind::Table: {
            const auto i = std::min(static_cast<std::size_t>(lag - 1), table_.size() - 1);
            return table_[i];
        }
    }
    return 1.0;
}

double sigma_tilde(const MixingModel& model, long block_length, double variance_bound) {
    if (block_length < 1) throw std::invalid_argument("block length must be >= 1");
    double sum = 0.0;
    for (long k = 1; k < block_length; ++k) sum += static_cast<double>(block_length - k) * model.beta(k);
    return std::sqrt(variance_bound + 2.0 / static_cast<double>(block_length) * sum);
}

namespace {

void check_delta(double delta, const char* name) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument(std::string(name) + " must lie in (0, 1), got " + format_double(delta));
}

// sigma * sqrt(4/len * log(4/D)) + log(4/D) / (3m) + extra
double concentration(double sigma, double effective_length, double slack_prob, long m, double extra) {
    const double log_term = std::log(4.0 / slack_prob);
    return sigma * std::sqrt(4.0 / effective_length * log_term) + log_term / (3.0 * static_cast<double>(m)) + extra;
}

bool lex_less(const Triple& x, const Triple& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.m != y.m) return x.m < y.m;
    return x.shift < y.shift;
}

void consider(std::optional<SlackTerm>& best, double eps, Triple t) {
    if (!best || eps < best->epsilon || (eps == best->epsilon && lex_less(t, best->argmin))) best = SlackTerm{eps, t};
}

}  // namespace

double epsilon_cal_at(long n_cal, double delta_cal, const MixingModel& model, Triple t, double variance_bound) {
    const long length = n_cal - t.shift + 1;
    if (t.a < 1 || t.m < 1 || t.shift < 1 || 2 * t.m * t.a != length)
        throw std::invalid_argument("triple violates 2ma = n_cal - r + 1");
    const double slack = delta_cal - 4.0 * static_cast<double>(t.m - 1) * model.beta(t.a) - model.beta(t.shift);
    if (!(slack > 0.0)) throw std::invalid_argument("triple violates the calibration feasibility constraint");
    return concentration(sigma_tilde(model, t.a, variance_bound), static_cast<double>(length), slack, t.m,
                         static_cast<double>(t.shift - 1) / static_cast<double>(n_cal));
}

std::optional<SlackTerm> epsilon_cal(long n_cal, double delta_cal, const MixingModel& model, double variance_bound) {
    if (n_cal < 4) throw std::invalid_argument("epsilon_cal needs n_cal >= 4");
    check_delta(delta_cal, "delta_cal");

    std::vector<double> sigma(static_cast<std::size_t>(n_cal / 2 + 1), 0.0);
    for (long a = 1; a <= n_cal / 2; ++a) sigma[static_cast<std::size_t>(a)] = sigma_tilde(model, a, variance_bound);

    std::optional<SlackTerm> best;
    for (long r = 1; r <= n_cal - 1; ++r) {
        const long length = n_cal - r + 1;
        if (length % 2 != 0) continue;
        const long half = length / 2;
        const double beta_r = model.beta(r);
        for (long a = 1; a <= half; ++a) {
            if (half % a != 0) continue;
            const long m = half / a;
            const double slack = delta_cal - 4.0 * static_cast<double>(m - 1) * model.beta(a) - beta_r;
            if (!(slack > 0.0)) continue;
            const double eps = concentration(sigma[static_cast<std::size_t>(a)], static_cast<double>(length), slack, m,
                                             static_cast<double>(r - 1) / static_cast<double>(n_cal));
            consider(best, eps, {a, m, r});
        }
    }
    return best;
}

double epsilon_test_at(long n_test, long n_cal, double delta_test, const MixingModel& model, Triple t,
                       double variance_bound) {
    if (t.a < 1 || t.m < 1 || t.shift < 0 || t.shift + 2 * t.m * t.a != n_test)
        throw std::invalid_argument("triple violates s + 2ma = n_test");
    const double slack = delta_test - 4.0 * static_cast<double>(t.m - 1) * model.beta(t.a) - model.beta(n_cal);
    if (!(slack > 0.0)) throw std::invalid_argument("triple violates the test feasibility constraint");
    return concentration(sigma_tilde(model, t.a, variance_bound), static_cast<double>(n_test), slack, t.m,
                         static_cast<double>(t.shift) / static_cast<double>(n_test));
}

std::optional<SlackTerm> epsilon_test(long n_test, long n_cal, double delta_test, const MixingModel& model,
                                      double variance_bound) {
    if (n_test < 2) throw std::invalid_argument("epsilon_test needs n_test >= 2");
    if (n_cal < 1) throw std::invalid_argument("epsilon_test needs n_cal >= 1");
    check_delta(delta_test, "delta_test");

    const double beta_gap = model.beta(n_cal);
    std::vector<double> sigma(static_cast<std::size_t>(n_test / 2 + 1), 0.0);
    for (long a = 1; a <= n_test / 2; ++a) sigma[static_cast<std::size_t>(a)] = sigma_tilde(model, a, variance_bound);

    std::optional<SlackTerm> best;
    for (long s = 0; s <= n_test - 2; ++s) {
        const long length = n_test - s;
        if (length % 2 != 0) continue;
        const long half = length / 2;
        for (long a = 1; a <= half; ++a) {
            if (half % a != 0) continue;
            const long m = half / a;
            const double slack = delta_test - 4.0 * static_cast<double>(m - 1) * model.beta(a) - beta_gap;
            if (!(slack > 0.0)) continue;
            const double eps = concentration(sigma[static_cast<std::size_t>(a)], static_cast<double>(n_test), slack, m,
                                             static_cast<double>(s) / static_cast<double>(n_test));
            consider(best, eps, {a, m, s});
        }
    }
    return best;
}

double epsilon_train(long test_index, long n_train, const MixingModel& model) {
    const long gap = test_index - n_train;
    if (gap <= 0)
        throw std::invalid_argument("test index " + std::to_string(test_index) + " must exceed n_train " +
                                    std::to_string(n_train));
    return model.beta(gap);
}

SlackReport slack_report(long n_train, long n_cal, long n_test, double alpha, double delta_cal, double delta_test,
                         const MixingModel& model, long first_test_index) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    check_delta(delta_cal, "delta_cal");
    check_delta(delta_test, "delta_test");

    SlackReport report;
    report.n_train = n_train;
    report.n_cal = n_cal;
    report.n_test = n_test;
    report.alpha = alpha;
    report.delta_cal = delta_cal;
    report.delta_test = delta_test;
    report.first_test_index = first_test_index;
    report.model = model.describe();

    report.cal = epsilon_cal(n_cal, delta_cal, model);
    report.test = epsilon_test(n_test, n_cal, delta_test, model);
    report.epsilon_train = epsilon_train(first_test_index, n_train, model);

    if (!report.cal) {
        report.infeasible_reason = "no (a,m,r) with 2ma = n_cal - r + 1 satisfies delta_cal > 4(m-1)beta(a) + beta(r)";
    } else if (!report.test) {
        report.infeasible_reason = "no (a,m,s) with s + 2ma = n_test satisfies delta_test > 4(m-1)beta(a) + beta(n_cal)";
    }
    report.feasible = report.cal && report.test;
    if (report.cal) {
        report.marginal_eta = delta_cal + report.epsilon_train + report.cal->epsilon;
        report.marginal_lower_bound = 1.0 - alpha - report.marginal_eta;
    }
    if (report.feasible) {
        report.empirical_eta = report.cal->epsilon + report.test->epsilon;
        report.empirical_lower_bound = 1.0 - alpha - report.empirical_eta;
        report.empirical_confidence = 1.0 - delta_cal - delta_test;
    }
    return report;
}

}  // namespace tscp::bounds
