#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tscp::bounds {

/**
 * @brief Parametric decay curve for the beta-mixing coefficient beta(a), a >= 1.
 *
 * Geometric is c * rho^a and polynomial c * a^-kappa, both clipped to [0, 1].
 * A table lists beta(1), beta(2), ...; lags past its end reuse the last entry.
 */
class MixingModel {
public:
    enum class Kind { IID, Geometric, Polynomial, Table };

    static MixingModel iid();
    static MixingModel geometric(double c, double rho);
    static MixingModel polynomial(double c, double kappa);
    static MixingModel table(std::vector<double> values);

    /// Parses "iid", "geometric:C,RHO", "polynomial:C,KAPPA" or "table:B1,B2,...".
    static MixingModel parse(const std::string& text);
    std::string describe() const;

    double beta(long lag) const;
    Kind kind() const { return kind_; }

private:
    Kind kind_ = Kind::IID;
    double scale_ = 0.0;
    double rate_ = 0.0;
    std::vector<double> table_;
};

/// sqrt(v + (2/a) sum_{k=1}^{a-1} (a-k) beta(k)).
double sigma_tilde(const MixingModel& model, long block_length, double variance_bound = 0.25);

/// Integer triple realising a slack term: block length a, block pairs m, and the gap r (cal) or remainder s (test).
struct Triple {
    long a = 0;
    long m = 0;
    long shift = 0;
    bool operator==(const Triple&) const = default;
};

struct SlackTerm {
    double epsilon = 0.0;
    Triple argmin;
};

/**
 * Calibration concentration slack, minimised over every (a, m, r) with
 * 2ma = n_cal - r + 1 and delta_cal > 4(m-1)beta(a) + beta(r). Empty when no
 * triple is feasible. Ties go to the lexicographically smallest triple.
 */
std::optional<SlackTerm> epsilon_cal(long n_cal, double delta_cal, const MixingModel& model,
                                     double variance_bound = 0.25);

/// Closed-form calibration slack at one triple; requires the triple to be feasible.
double epsilon_cal_at(long n_cal, double delta_cal, const MixingModel& model, Triple triple,
                      double variance_bound = 0.25);

/**
 * Test-block concentration slack over (a, m, s) with s + 2ma = n_test and
 * delta_test > 4(m-1)beta(a) + beta(n_cal).
 */
std::optional<SlackTerm> epsilon_test(long n_test, long n_cal, double delta_test, const MixingModel& model,
                                      double variance_bound = 0.25);

double epsilon_test_at(long n_test, long n_cal, double delta_test, const MixingModel& model, Triple triple,
                       double variance_bound = 0.25);

/// Decoupling slack beta(k - n_train) for the test point at index k.
double epsilon_train(long test_index, long n_train, const MixingModel& model);

struct SlackReport {
    long n_train = 0, n_cal = 0, n_test = 0;
    double alpha = 0.0, delta_cal = 0.0, delta_test = 0.0;
    long first_test_index = 0;
    std::string model;

    std::optional<SlackTerm> cal;
    std::optional<SlackTerm> test;
    double epsilon_train = 0.0;

    bool feasible = false;
    std::string infeasible_reason;

    /// Marginal guarantee: eta = delta_cal + eps_train + eps_cal, bound 1 - alpha - eta.
    double marginal_eta = 0.0;
    double marginal_lower_bound = 0.0;
    /// Empirical guarantee: eta = eps_cal + eps_test, holding with probability >= 1 - delta_cal - delta_test.
    double empirical_eta = 0.0;
    double empirical_lower_bound = 0.0;
    double empirical_confidence = 0.0;
};

SlackReport slack_report(long n_train, long n_cal, long n_test, double alpha, double delta_cal, double delta_test,
                         const MixingModel& model, long first_test_index);

}  // namespace tscp::bounds
