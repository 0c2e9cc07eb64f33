// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [--out DIR] [--jobs N]

#include "tscp/bench.hpp"
#include "tscp/calibration.hpp"
#include "tscp/format.hpp"
#include "tscp/methods_online.hpp"
#include "tscp/mixing_bounds.hpp"

#include "../support/oracles.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace tscp;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

const std::vector<std::string> kStationary{"AR(1)", "ARMA(1,1)", "ARCH"};

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

// Checks every cell of the given methods against [lo, hi]; returns the offenders.
std::vector<std::string> out_of_band(const bench::Summary& s, const std::vector<std::string>& processes,
                                     const std::vector<std::string>& methods, double lo, double hi,
                                     const std::string& skip_variant = "") {
    std::vector<std::string> bad;
    for (const auto& p : processes)
        for (const auto& m : methods)
            for (const auto* c : s.find(p, m)) {
                if (c->variant == skip_variant) continue;
                if (!within(c->mean_coverage, lo, hi))
                    bad.push_back(p + " " + m + " " + c->variant + "=" + fmt(c->mean_coverage));
            }
    return bad;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
    return out;
}

double pooled(const bench::Summary& s, const std::string& process, const std::string& method,
              double bench::CellSummary::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto* c : s.find(process, method)) {
        sum += c->*field;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : std::nan("");
}

double pooled_all(const bench::Summary& s, const std::string& method, double bench::CellSummary::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& c : s.cells)
        if (c.method == method) {
            sum += c.*field;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : std::nan("");
}

// ---------------------------------------------------------------------------

void stationary_coverage(const bench::Summary& s) {
    const auto bad = out_of_band(s, kStationary, {"SCP", "WCP", "ACI", "EnbPI"}, 0.87, 0.93);
    double lo = 1, hi = 0;
    for (const auto& p : kStationary)
        for (const auto& m : {"SCP", "WCP", "ACI", "EnbPI"})
            for (const auto* c : s.find(p, m)) {
                lo = std::min(lo, c->mean_coverage);
                hi = std::max(hi, c->mean_coverage);
            }
    report(1, bad.empty(), "stationary coverage within 0.9 +/- 0.03",
           bad.empty() ? "30 cells in [" + fmt(lo) + ", " + fmt(hi) + "]" : "out of band: " + join(bad));
}

void mean_shift_failures(const bench::Summary& s) {
    std::vector<std::string> bad;
    const double scp = s.at("MeanShift", "SCP", "default").mean_coverage;
    if (!within(scp, 0.80, 0.87)) bad.push_back("MeanShift SCP=" + fmt(scp) + " not in [0.80, 0.87]");
    const double window = s.at("MeanShift", "WCP", "window(k=50)").mean_coverage;
    if (!within(window, 0.77, 0.85)) bad.push_back("MeanShift WCP window=" + fmt(window) + " not in [0.77, 0.85]");
    std::string blocks;
    for (const auto& c : s.cells) {
        if (c.method != "SCP-block") continue;
        blocks += " " + c.process + " " + c.variant + "=" + fmt(c.mean_coverage);
        if (!(c.mean_coverage < 0.88)) bad.push_back(c.process + " SCP-block " + c.variant + "=" + fmt(c.mean_coverage) + " not < 0.88");
    }
    report(2, bad.empty(), "mean-shift failure modes and blocked under-coverage",
           bad.empty() ? "SCP=" + fmt(scp) + " window=" + fmt(window) + blocks : join(bad));
}

void mean_shift_recoveries(const bench::Summary& s) {
    auto bad = out_of_band(s, {"MeanShift"}, {"ACI", "EnbPI"}, 0.87, 0.93);
    for (const char* v : {"exp(rho=0.99)", "linear"}) {
        const double c = s.at("MeanShift", "WCP", v).mean_coverage;
        if (!within(c, 0.87, 0.93)) bad.push_back(std::string("MeanShift WCP ") + v + "=" + fmt(c));
    }
    report(3, bad.empty(), "mean-shift recoveries within 0.9 +/- 0.03",
           bad.empty() ? "ACI, EnbPI, WCP exp/linear all in band" : "out of band: " + join(bad));
}

void width_ordering(const bench::Summary& s) {
    std::vector<std::string> detail;
    bool pass = true;
    for (const auto& p : kStationary) {
        const double enb = pooled(s, p, "EnbPI", &bench::CellSummary::mean_width);
        const double scp = s.at(p, "SCP", "default").mean_width;
        pass = pass && enb > scp;
        detail.push_back(p + " EnbPI=" + fmt(enb) + (enb > scp ? " > " : " <= ") + "SCP=" + fmt(scp));
    }
    report(4, pass, "EnbPI wider than SCP on stationary processes", join(detail));
}

void runtime_ordering(const bench::Summary& s) {
    const double enb = pooled_all(s, "EnbPI", &bench::CellSummary::mean_runtime_ms);
    const double aci = pooled_all(s, "ACI", &bench::CellSummary::mean_runtime_ms);
    const double scp = pooled_all(s, "SCP", &bench::CellSummary::mean_runtime_ms);
    report(5, enb > aci && aci > scp, "runtime ordering EnbPI > ACI > SCP",
           "EnbPI=" + fmt(enb) + "ms ACI=" + fmt(aci) + "ms SCP=" + fmt(scp) + "ms");
}

void aci_guarantee(const std::vector<bench::RunRecord>& records, double alpha) {
    std::size_t checked = 0, violations = 0;
    double worst_ratio = 0.0;
    auto check = [&](std::size_t errors, std::size_t steps, double gamma) {
        const double gap = std::abs(static_cast<double>(errors) / static_cast<double>(steps) - alpha);
        const double bound = methods::aci_miscoverage_bound(alpha, gamma, steps);
        ++checked;
        if (!(gap <= bound)) ++violations;
        worst_ratio = std::max(worst_ratio, gap / bound);
    };

    for (const auto& r : records) {
        if (r.method != "ACI" || r.failure) continue;
        check(r.n_test - r.covered, r.n_test, parse_double(r.variant.substr(r.variant.find('=') + 1)));
    }

    std::mt19937_64 rng(606);
    std::normal_distribution<double> z;
    std::vector<double> cal(300);
    for (auto& c : cal) c = std::abs(z(rng));
    const std::size_t T = 300;
    for (double gamma : {0.001, 0.005, 0.01, 0.05, 0.2}) {
        const std::vector<double> centers(T, 0.0);
        std::vector<std::vector<double>> streams;
        streams.emplace_back(T, 1e12);  // always outside any bounded interval
        streams.emplace_back(T, 0.0);   // always at the center
        std::vector<double> alt(T), burst(T), noisy(T);
        for (std::size_t t = 0; t < T; ++t) {
            alt[t] = t % 2 ? 1e12 : 0.0;
            burst[t] = (t / 25) % 2 ? 1e12 : 0.0;
            noisy[t] = 4.0 * z(rng);
        }
        streams.push_back(alt);
        streams.push_back(burst);
        streams.push_back(noisy);
        for (const auto& truth : streams) {
            const auto res = methods::aci_stream(cal, centers, truth, alpha, gamma);
            check(res.state.errors(), T, gamma);
        }
        // Adaptive adversary: land just outside the current interval whenever it is bounded.
        methods::AciState state;
        state.alpha_t = alpha;
        std::size_t errors = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const double q = calib::order_statistic(cal, calib::conformal_rank(cal.size(), state.alpha_t));
            const Interval iv = Interval::symmetric(0.0, q);
            const double y = iv.bounded() ? (iv.empty ? 0.0 : q + 1e-9) : 0.0;
            const bool err = !iv.contains(y);
            errors += err ? 1 : 0;
            state.alpha_t = methods::aci_update(state.alpha_t, err, alpha, gamma);
        }
        check(errors, T, gamma);
    }
    report(6, violations == 0, "ACI finite-horizon miscoverage guarantee",
           std::to_string(checked) + " runs, " + std::to_string(violations) + " violations, max gap/bound " +
               fmt(worst_ratio));
}

void quantile_oracle() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 50;
        const bool discrete = trial % 2 == 0;
        std::vector<double> scores(n);
        for (auto& s : scores) s = discrete ? static_cast<double>(rng() % 8) : u(rng);
        const int pct = 1 + static_cast<int>(rng() % 99);
        const double alpha = pct / 100.0;

        if (calib::split_quantile(scores, alpha) != oracle::split_quantile_percent(scores, pct)) ++mismatches;

        if (trial % 4 < 2) {
            std::vector<long> w(n);
            for (auto& x : w) x = static_cast<long>(rng() % 10);
            w[rng() % n] += 1;  // never all zero
            const std::vector<double> wd(w.begin(), w.end());
            if (calib::weighted_quantile(scores, wd, alpha) != oracle::weighted_quantile_percent(scores, w, pct))
                ++mismatches;
        } else {
            std::vector<double> w(n);
            for (auto& x : w) x = u(rng) + 1e-3;
            if (calib::weighted_quantile(scores, w, alpha) != oracle::weighted_quantile_real(scores, w, alpha))
                ++mismatches;
        }
    }
    report(7, mismatches == 0, "quantiles equal the enumeration oracle",
           "1000 sets, " + std::to_string(mismatches) + " mismatches");
}

void bounds_calculator(const bench::Summary& s) {
    struct Instance {
        long n;
        double delta;
        bounds::MixingModel model;
        oracle::Beta beta;
    };
    using B = oracle::Beta;
    const std::vector<Instance> instances{
        {300, 0.1, bounds::MixingModel::iid(), {}},
        {300, 0.05, bounds::MixingModel::iid(), {}},
        {50, 0.2, bounds::MixingModel::iid(), {}},
        {301, 0.1, bounds::MixingModel::iid(), {}},
        {300, 0.1, bounds::MixingModel::geometric(1, 0.5), {B::Geometric, 1, 0.5, {}}},
        {300, 0.1, bounds::MixingModel::geometric(1, 0.8), {B::Geometric, 1, 0.8, {}}},
        {200, 0.3, bounds::MixingModel::geometric(2, 0.7), {B::Geometric, 2, 0.7, {}}},
        {150, 0.1, bounds::MixingModel::geometric(0.5, 0.9), {B::Geometric, 0.5, 0.9, {}}},
        {300, 0.1, bounds::MixingModel::geometric(1, 0.999), {B::Geometric, 1, 0.999, {}}},
        {120, 0.01, bounds::MixingModel::geometric(1, 0.3), {B::Geometric, 1, 0.3, {}}},
        {300, 0.1, bounds::MixingModel::polynomial(1, 2), {B::Polynomial, 1, 2, {}}},
        {250, 0.2, bounds::MixingModel::polynomial(0.5, 3), {B::Polynomial, 0.5, 3, {}}},
        {100, 0.1, bounds::MixingModel::polynomial(1, 1), {B::Polynomial, 1, 1, {}}},
        {300, 0.05, bounds::MixingModel::polynomial(2, 1.5), {B::Polynomial, 2, 1.5, {}}},
        {300, 0.1, bounds::MixingModel::table({1.0}), {B::Table, 0, 0, {1.0}}},
        {300, 0.1, bounds::MixingModel::table({0.5, 0.1, 0.01, 0.001, 0.0}), {B::Table, 0, 0, {0.5, 0.1, 0.01, 0.001, 0.0}}},
        {80, 0.15, bounds::MixingModel::table({0.2, 0.05}), {B::Table, 0, 0, {0.2, 0.05}}},
        {64, 0.5, bounds::MixingModel::table({0.3, 0.3, 0.02}), {B::Table, 0, 0, {0.3, 0.3, 0.02}}},
        {17, 0.1, bounds::MixingModel::iid(), {}},
        {299, 0.1, bounds::MixingModel::geometric(1, 0.6), {B::Geometric, 1, 0.6, {}}},
    };

    std::size_t mismatches = 0, feasible = 0;
    double max_diff = 0.0;
    auto compare = [&](const std::optional<bounds::SlackTerm>& got, const std::optional<oracle::Found>& want) {
        if (got.has_value() != want.has_value()) {
            ++mismatches;
            return;
        }
        if (!got) return;
        ++feasible;
        const double d = std::abs(got->epsilon - want->eps);
        max_diff = std::max(max_diff, d);
        if (d > 1e-12) ++mismatches;
    };
    for (const auto& inst : instances) {
        compare(bounds::epsilon_cal(inst.n, inst.delta, inst.model), oracle::epsilon_cal(inst.n, inst.delta, inst.beta));
        compare(bounds::epsilon_test(inst.n, inst.n, inst.delta, inst.model),
                oracle::epsilon_test(inst.n, inst.n, inst.delta, inst.beta));
    }

    // Conservative decay for the phi = 0.8 Gaussian AR(1): beta(a) <= 0.8^a.
    const auto model = bounds::MixingModel::geometric(1.0, 0.8);
    const auto r = bounds::slack_report(300, 300, 300, 0.1, 0.1, 0.1, model, 300 + 300 + 1);
    const double coverage = s.at("AR(1)", "SCP", "default").mean_coverage;
    const bool bound_ok = r.cal && r.marginal_lower_bound <= coverage;

    report(8, mismatches == 0 && bound_ok, "slack search equals brute force; composed bound below AR(1) coverage",
           std::to_string(instances.size()) + " instances (" + std::to_string(feasible) + " feasible terms), " +
               std::to_string(mismatches) + " mismatches, max diff " + format_double(max_diff) + "; bound " +
               fmt(r.marginal_lower_bound) + " (" + model.describe() + ") vs SCP coverage " + fmt(coverage));
}

void determinism(const bench::ExperimentConfig& base, const std::vector<bench::RunRecord>& timed, std::size_t jobs) {
    auto config = base;
    config.measure_time = false;
    const auto a = bench::records_to_csv(bench::run_experiment(config, jobs));
    const auto b = bench::records_to_csv(bench::run_experiment(config, jobs == 1 ? 2 : 1));

    auto strip = [](std::vector<bench::RunRecord> rs) {
        for (auto& r : rs) r.runtime_ms = 0.0;
        return bench::records_to_csv(rs);
    };
    const bool columns_match = strip(timed) == a;
    report(9, a == b && columns_match, "byte-identical records across runs",
           std::to_string(a.size()) + " bytes; untimed runs " + (a == b ? "identical" : "DIFFER") +
               "; timed run non-runtime columns " + (columns_match ? "identical" : "DIFFER"));
}

}  // namespace

int main(int argc, char** argv) {
    std::string out_dir;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--out") && i + 1 < argc) out_dir = argv[++i];
        else if (!std::strcmp(argv[i], "--jobs") && i + 1 < argc) jobs = std::stoul(argv[++i]);
    }

    auto config = bench::ExperimentConfig::default_grid();
    const auto records = bench::run_experiment(config, jobs);
    for (const auto& r : records)
        if (r.failure) std::printf("# failed record %s %s %s rep %zu: %s\n", r.process.c_str(), r.method.c_str(),
                                   r.variant.c_str(), r.rep, r.failure->c_str());
    const auto summary = bench::aggregate(records);
    std::printf("# %zu records, R=%zu\n", records.size(), config.replicates);
    for (const auto& c : summary.cells)
        std::printf("# %-10s %-10s %-14s cov %.4f +/- %.4f  width %.4f +/- %.4f (inf %zu)  %.4f ms\n",
                    c.process.c_str(), c.method.c_str(), c.variant.c_str(), c.mean_coverage, c.coverage_half_width,
                    c.mean_width, c.width_half_width, c.infinite_width_runs, c.mean_runtime_ms);
    if (!out_dir.empty()) {
        config.records_path = std::filesystem::path(out_dir) / "records.csv";
        config.summary_path = std::filesystem::path(out_dir) / "summary.json";
        bench::persist(config, records, summary);
    }

    stationary_coverage(summary);
    mean_shift_failures(summary);
    mean_shift_recoveries(summary);
    width_ordering(summary);
    runtime_ordering(summary);
    aci_guarantee(records, config.alpha);
    quantile_oracle();
    bounds_calculator(summary);
    determinism(config, records, jobs);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
