#include "tscp/methods_online.hpp"
#include "tscp/methods_static.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <deque>
#include <random>

using namespace tscp;
using namespace tscp::methods;

namespace {

// Split with a single all-zero covariate, so a zero model predicts 0 and scores are |y|.
dgp::SupervisedSplit zero_split(const std::vector<double>& train, const std::vector<double>& cal,
                                const std::vector<double>& test) {
    dgp::SupervisedSplit s;
    const std::size_t n = train.size() + cal.size() + test.size();
    s.covariates = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 1);
    s.responses.resize(static_cast<Eigen::Index>(n));
    std::size_t j = 0;
    for (const auto* block : {&train, &cal, &test})
        for (double y : *block) s.responses(static_cast<Eigen::Index>(j++)) = y;
    for (std::size_t i = 0; i < n; ++i) s.times.push_back(static_cast<long>(i) + 2);
    s.lag_order = 1;
    s.train = {0, train.size()};
    s.cal = {train.size(), train.size() + cal.size()};
    s.test = {s.cal.end, n};
    return s;
}

const forecast::LinearForecaster zero_model(Eigen::VectorXd::Zero(1), 0.0, false);

dgp::SupervisedSplit ar_split(std::uint64_t seed) {
    const auto y = dgp::generate(dgp::ProcessSpec::ar1(), 902, seed).values;
    return dgp::make_split(y, 2, {300, 300, 300});
}

forecast::LinearForecaster fit_train(const dgp::SupervisedSplit& s) {
    const auto n = static_cast<Eigen::Index>(s.train.size());
    return forecast::LinearForecaster::fit(s.covariates.topRows(n), s.responses.head(n), true);
}

}  // namespace

TEST_CASE("SCP from calibration residuals 1..10") {
    std::vector<double> cal(10);
    for (int i = 0; i < 10; ++i) cal[static_cast<std::size_t>(i)] = i + 1.0;
    const auto s = zero_split({0.0}, cal, {5, -20, 10});
    const auto out = scp(zero_model, s, 0.1);
    REQUIRE(out.size() == 3);
    for (const auto& iv : out.steps) {
        CHECK(iv.lower == -10);
        CHECK(iv.upper == 10);
    }
    CHECK(out.method == "SCP");
}

TEST_CASE("SCP with zero calibration residuals gives zero width") {
    const auto s = zero_split({0.0}, std::vector<double>(8, 0.0), {1, 2});
    for (const auto& iv : scp(zero_model, s, 0.2).steps) CHECK(iv.width() == 0.0);
}

TEST_CASE("blocked threshold worked examples") {
    const std::vector<double> cal{1, 2, 3, 4, 5};
    CHECK(blocked_threshold(cal, 0.4, 2) == 4);
    CHECK(blocked_threshold(cal, 0.3, 2) == calib::kInf);
    CHECK_THROWS_AS(blocked_threshold(cal, 0.1, 7), std::invalid_argument);
}

TEST_CASE("blocked threshold with unit blocks is the split-conformal threshold") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0, 5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> cal(5 + rng() % 60);
        for (auto& x : cal) x = u(rng);
        const double alpha = 0.02 * static_cast<double>(1 + rng() % 40);
        CHECK(blocked_threshold(cal, alpha, 1) == calib::split_quantile(cal, alpha));
    }
}

TEST_CASE("blocked threshold agrees with explicit rotations") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> cal(3 + rng() % 40);
        for (auto& x : cal) x = rng() % 3 == 0 ? std::floor(u(rng)) : u(rng);
        const std::size_t block = 1 + rng() % 4;
        if (block > cal.size() + 1) continue;
        const double alpha = 0.01 * static_cast<double>(1 + rng() % 99);
        CHECK(blocked_threshold(cal, alpha, block) == oracle::blocked_threshold(cal, alpha, block));
    }
}

TEST_CASE("blocked SCP labels and constant threshold") {
    const auto s = ar_split(4);
    const auto model = fit_train(s);
    const auto out = blocked_scp(model, s, 0.1, 3);
    CHECK(out.method == "SCP-block");
    CHECK(out.variant == "B=3");
    for (double t : out.trace) CHECK(t == out.trace.front());
}

TEST_CASE("WCP with uniform-like weights and fixed calibration") {
    std::vector<double> cal(10);
    for (int i = 0; i < 10; ++i) cal[static_cast<std::size_t>(i)] = i + 1.0;
    const auto s = zero_split({0.0}, cal, {0, 0});
    // Window covering everything is the plain empirical quantile.
    const auto out = wcp(zero_model, s, 0.1, calib::WeightScheme::sliding_window(100));
    for (double t : out.trace) CHECK(t == 9);
    // Window of the last 3 scores {8, 9, 10}: mass 0.9 first reached at 10.
    const auto last3 = wcp(zero_model, s, 0.1, calib::WeightScheme::sliding_window(3));
    for (double t : last3.trace) CHECK(t == 10);
    CHECK(last3.variant == "window(k=3)");
}

TEST_CASE("sequential WCP absorbs revealed test residuals") {
    const auto s = zero_split({0.0}, std::vector<double>(10, 1.0), {50, 50, 50, 50, 50, 50});
    const auto fixed = wcp(zero_model, s, 0.1, calib::WeightScheme::exponential(0.5), WcpCalibration::Fixed);
    const auto seq = wcp(zero_model, s, 0.1, calib::WeightScheme::exponential(0.5), WcpCalibration::Sequential);
    CHECK(seq.trace.front() == fixed.trace.front());
    for (double t : fixed.trace) CHECK(t == 1.0);
    CHECK(seq.trace.back() == 50.0);
    CHECK(seq.variant == "exp(rho=0.5)");
}

TEST_CASE("residual pool FIFO") {
    ResidualPool pool({1, 2, 3, 4, 5});
    pool.observe(6);
    CHECK(pool.refresh() == 1);
    CHECK(std::vector<double>(pool.values().begin(), pool.values().end()) == std::vector<double>{2, 3, 4, 5, 6});
    CHECK(pool.quantile(0.1) == 6);  // ceil(4.5) = 5th smallest
    CHECK_THROWS_AS(ResidualPool({}), std::invalid_argument);
}

TEST_CASE("EnbPI step-through on a toy stream") {
    const std::vector<double> initial{3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
    const std::vector<double> truth{2, 8, -1, 7, 0, 12, 3, 3, -6, 4};
    const std::vector<double> centers(10, 1.0);
    for (std::size_t s : {1u, 3u}) {
        const auto out = enbpi_stream(initial, centers, truth, 0.1, s);
        std::deque<double> pool(initial.begin(), initial.end());
        std::vector<double> pending;
        for (std::size_t t = 0; t < 10; ++t) {
            std::vector<double> sorted(pool.begin(), pool.end());
            std::sort(sorted.begin(), sorted.end());
            const double radius = sorted[8];  // ceil(0.9 * 10) = 9th smallest
            CHECK(out.trace[t] == radius);
            CHECK(out.steps[t].lower == 1.0 - radius);
            CHECK(out.steps[t].upper == 1.0 + radius);
            pending.push_back(std::abs(truth[t] - 1.0));
            if ((t + 1) % s == 0) {
                for (double r : pending) {
                    pool.push_back(r);
                    pool.pop_front();
                }
                pending.clear();
            }
        }
    }
}

TEST_CASE("EnbPI end to end on an AR(1) split") {
    const auto s = ar_split(9);
    const auto n = static_cast<Eigen::Index>(s.train.size());
    const auto ens = forecast::BootstrapEnsemble::fit(s.covariates.topRows(n), s.responses.head(n), 25, true, 1);
    for (auto pool : {EnbpiPool::TrainingOob, EnbpiPool::Calibration}) {
        const auto out = enbpi(ens, s, 0.1, 10, pool);
        CHECK(out.size() == 300);
        CHECK(out.variant == "s=10");
        std::size_t covered = 0;
        for (std::size_t t = 0; t < 300; ++t)
            covered += out.steps[t].contains(s.responses(static_cast<Eigen::Index>(s.test.begin + t))) ? 1 : 0;
        CHECK(covered > 240);
    }
}

TEST_CASE("ACI update arithmetic") {
    CHECK(aci_update(0.1, true, 0.1, 0.005) == doctest::Approx(0.0955).epsilon(1e-14));
    CHECK(aci_update(0.1, false, 0.1, 0.005) == doctest::Approx(0.1005).epsilon(1e-14));
    CHECK(aci_update(0.1, true, 0.1, 0.01) == doctest::Approx(0.091).epsilon(1e-14));
}

TEST_CASE("ACI on an always-missing stream") {
    std::vector<double> cal(300);
    for (std::size_t i = 0; i < 300; ++i) cal[i] = static_cast<double>(i) / 100.0;
    const std::vector<double> centers(60, 0.0), truth(60, 1e9);
    const auto r = aci_stream(cal, centers, truth, 0.1, 0.005);
    std::size_t t = 1;
    for (; t < 60 && r.state.trajectory[t - 1].error; ++t) {
        const double w0 = r.intervals.steps[t - 1].upper - r.intervals.steps[t - 1].center;
        const double w1 = r.intervals.steps[t].upper - r.intervals.steps[t].center;
        CHECK(w1 >= w0);
        CHECK(r.intervals.trace[t] == doctest::Approx(r.intervals.trace[t - 1] - 0.005 * 0.9));
    }
    // The run of misses ends exactly when alpha_t drops below 1/(n+1) and the interval is the whole line.
    REQUIRE(t < 60);
    CHECK_FALSE(r.intervals.steps[t - 1].bounded());
    CHECK(r.intervals.trace[t - 1] < 1.0 / 301);
    CHECK(r.intervals.trace[t - 2] >= 1.0 / 301);
}

TEST_CASE("ACI empty interval when alpha_t exceeds one") {
    const std::vector<double> cal{1, 2, 3};
    const std::vector<double> centers(200, 0.0), truth(200, 0.0);
    // Every step covers, so alpha_t grows by gamma*alpha per step.
    const auto r = aci_stream(cal, centers, truth, 0.5, 0.5);
    bool saw_empty = false;
    for (std::size_t t = 0; t < r.intervals.size(); ++t) {
        if (r.intervals.trace[t] * 4.0 - 1.0 >= 3.0) {  // rank (1 - alpha_t) * 4 below 1
            CHECK(r.intervals.steps[t].empty);
            CHECK(r.state.trajectory[t].error);
            saw_empty = true;
        }
    }
    CHECK(saw_empty);
}

TEST_CASE("ACI telescoping identity and finite-horizon guarantee") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> z;
    for (double gamma : {0.001, 0.005, 0.01, 0.1}) {
        std::vector<double> cal(300), centers(300, 0.0), truth(300);
        for (auto& c : cal) c = std::abs(z(rng));
        for (std::size_t t = 0; t < 300; ++t) truth[t] = (t < 150 ? 1.0 : 3.0) * z(rng);
        const auto r = aci_stream(cal, centers, truth, 0.1, gamma);
        const double errors = static_cast<double>(r.state.errors());
        CHECK(r.state.alpha_t == doctest::Approx(0.1 + gamma * (300 * 0.1 - errors)).epsilon(1e-12));
        CHECK(std::abs(errors / 300.0 - 0.1) <= aci_miscoverage_bound(0.1, gamma, 300));
    }
}

TEST_CASE("ACI with vanishing step size reproduces SCP") {
    const auto s = ar_split(13);
    const auto model = fit_train(s);
    const auto a = aci(model, s, 0.1, 1e-13);
    const auto b = scp(model, s, 0.1);
    for (std::size_t t = 0; t < b.size(); ++t) {
        CHECK(a.intervals.steps[t].lower == b.steps[t].lower);
        CHECK(a.intervals.steps[t].upper == b.steps[t].upper);
    }
}

TEST_CASE("SCP widths shrink as alpha grows") {
    const auto s = ar_split(14);
    const auto model = fit_train(s);
    double prev = calib::kInf;
    for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.4}) {
        const double w = scp(model, s, alpha).steps.front().width();
        CHECK(w <= prev);
        prev = w;
    }
}

TEST_CASE("ACI bound arithmetic") {
    CHECK(aci_miscoverage_bound(0.1, 0.005, 300) == doctest::Approx((0.9 + 0.005) / (300 * 0.005)));
    CHECK_THROWS_AS(aci_miscoverage_bound(0.1, 0.005, 0), std::invalid_argument);
    CHECK_THROWS_AS(aci_stream(std::vector<double>{1}, std::vector<double>{0}, std::vector<double>{0}, 0.1, 0.0),
                    std::invalid_argument);
}
