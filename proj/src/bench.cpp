#include "tscp/bench.hpp"

#include "tscp/format.hpp"
#include "tscp/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace tscp::bench {

std::string MethodVariant::method_label() const {
    switch (kind) {
        case MethodKind::SCP: return "SCP";
        case MethodKind::SCPBlock: return "SCP-block";
        case MethodKind::WCP: return "WCP";
        case MethodKind::EnbPI: return "EnbPI";
        case MethodKind::ACI: return "ACI";
    }
    return "?";
}

std::string MethodVariant::variant_label() const {
    switch (kind) {
        case MethodKind::SCP: return "default";
        case MethodKind::SCPBlock: return "B=" + std::to_string(block_size);
        case MethodKind::WCP:
            switch (scheme.kind) {
                case calib::WeightScheme::Kind::Exponential: return "exp(rho=" + format_double(scheme.rho) + ")";
                case calib::WeightScheme::Kind::Linear: return "linear";
                case calib::WeightScheme::Kind::Window: return "window(k=" + std::to_string(scheme.window) + ")";
            }
            break;
        case MethodKind::EnbPI: return "s=" + std::to_string(refresh_period);
        case MethodKind::ACI: return "gamma=" + format_double(gamma);
    }
    return "?";
}

std::vector<MethodVariant> MethodGrid::expand() const {
    std::vector<MethodVariant> out;
    MethodVariant base;
    base.kind = kind;
    switch (kind) {
        case MethodKind::SCP:
            out.push_back(base);
            break;
        case MethodKind::SCPBlock:
            for (std::size_t b : block_sizes) {
                base.block_size = b;
                out.push_back(base);
            }
            break;
        case MethodKind::WCP:
            for (const auto& s : schemes) {
                base.scheme = s.scheme;
                base.wcp_calibration = s.calibration;
                out.push_back(base);
            }
            break;
        case MethodKind::EnbPI:
            base.ensemble_size = ensemble_size;
            base.pool = pool;
            for (std::size_t s : refresh_periods) {
                base.refresh_period = s;
                out.push_back(base);
            }
            break;
        case MethodKind::ACI:
            for (double g : gammas) {
                base.gamma = g;
                out.push_back(base);
            }
            break;
    }
    return out;
}

ExperimentConfig ExperimentConfig::default_grid() {
    ExperimentConfig config;
    const auto break_point = static_cast<double>(static_cast<std::size_t>(config.lag_order) + config.sizes.train +
                                                 config.sizes.cal + 1);
    config.processes = {dgp::ProcessSpec::ar1(), dgp::ProcessSpec::arma11(),
                        dgp::ProcessSpec::mean_shift(0.0, 1.0, break_point), dgp::ProcessSpec::arch()};

    MethodGrid scp;
    scp.kind = MethodKind::SCP;

    MethodGrid block;
    block.kind = MethodKind::SCPBlock;
    block.block_sizes = {2, 3};

    MethodGrid wcp;
    wcp.kind = MethodKind::WCP;
    wcp.schemes = {{calib::WeightScheme::exponential(0.99), methods::WcpCalibration::Sequential},
                   {calib::WeightScheme::linear(), methods::WcpCalibration::Sequential},
                   {calib::WeightScheme::sliding_window(50), methods::WcpCalibration::Fixed}};

    MethodGrid enbpi;
    enbpi.kind = MethodKind::EnbPI;
    enbpi.ensemble_size = 25;
    enbpi.refresh_periods = {1, 10, 100};

    MethodGrid aci;
    aci.kind = MethodKind::ACI;
    aci.gammas = {0.001, 0.005, 0.01};

    config.methods = {scp, block, wcp, enbpi, aci};
    return config;
}

std::vector<MethodVariant> ExperimentConfig::variants() const {
    std::vector<MethodVariant> out;
    for (const auto& grid : methods) {
        auto expanded = grid.expand();
        out.insert(out.end(), expanded.begin(), expanded.end());
    }
    return out;
}

std::size_t ExperimentConfig::series_length() const {
    return static_cast<std::size_t>(lag_order) + sizes.train + sizes.cal + sizes.test;
}

void ExperimentConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must lie in (0, 1)");
    if (processes.empty()) throw std::invalid_argument("config: no processes");
    if (lag_order < 1) throw std::invalid_argument("config: lag_order must be >= 1");
    if (sizes.train == 0 || sizes.cal == 0 || sizes.test == 0) throw std::invalid_argument("config: block sizes must be positive");
    for (const auto& p : processes) {
        p.validate();
        if (p.label.empty()) throw std::invalid_argument("config: every process needs a label");
    }
    const auto all = variants();
    if (all.empty()) throw std::invalid_argument("config: method grids are empty");
    for (const auto& grid : methods)
        if (grid.expand().empty()) throw std::invalid_argument("config: empty grid for a method");
    for (const auto& v : all) {
        if (v.kind == MethodKind::WCP) v.scheme.validate();
        if (v.kind == MethodKind::ACI && !(v.gamma > 0.0)) throw std::invalid_argument("config: gamma must be > 0");
        if (v.kind == MethodKind::EnbPI && (v.refresh_period < 1 || v.ensemble_size < 1))
            throw std::invalid_argument("config: EnbPI needs s >= 1 and M >= 1");
        if (v.kind == MethodKind::SCPBlock && v.block_size < 1) throw std::invalid_argument("config: block size must be >= 1");
    }
}

Evaluation evaluate(const IntervalSeries& intervals, std::span<const double> truth) {
    if (intervals.size() != truth.size())
        throw std::invalid_argument("evaluate: " + std::to_string(intervals.size()) + " intervals but " +
                                    std::to_string(truth.size()) + " responses");
    if (truth.empty()) throw std::invalid_argument("evaluate: empty test block");
    Evaluation ev;
    double width = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& iv = intervals.steps[i];
        if (iv.contains(truth[i])) ++ev.covered;
        if (!iv.bounded() && !iv.empty) ++ev.unbounded;
        width += iv.width();
    }
    const auto n = static_cast<double>(truth.size());
    ev.coverage = static_cast<double>(ev.covered) / n;
    ev.mean_width = ev.unbounded > 0 ? calib::kInf : width / n;
    return ev;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, const std::string& process_label, std::size_t rep) {
    return derive_seed(base_seed ^ hash_label(process_label), rep);
}

ReplicateData prepare_replicate(const ExperimentConfig& config, const dgp::ProcessSpec& process, std::size_t rep) {
    auto series = dgp::generate(process, config.series_length(), replicate_seed(config.base_seed, process.label, rep));
    auto split = dgp::make_split(series.values, config.lag_order, config.sizes);
    const auto train = static_cast<Eigen::Index>(split.train.size());
    auto model = forecast::LinearForecaster::fit(split.covariates.topRows(train), split.responses.head(train),
                                                 config.intercept);
    return {std::move(series), std::move(split), std::move(model)};
}

namespace {

IntervalSeries build_intervals(const ExperimentConfig& config, const ReplicateData& data, const MethodVariant& v,
                               std::uint64_t seed) {
    switch (v.kind) {
        case MethodKind::SCP: return methods::scp(data.model, data.split, config.alpha);
        case MethodKind::SCPBlock: return methods::blocked_scp(data.model, data.split, config.alpha, v.block_size);
        case MethodKind::WCP: return methods::wcp(data.model, data.split, config.alpha, v.scheme, v.wcp_calibration);
        case MethodKind::EnbPI: {
            const auto train = static_cast<Eigen::Index>(data.split.train.size());
            const auto ensemble =
                forecast::BootstrapEnsemble::fit(data.split.covariates.topRows(train), data.split.responses.head(train),
                                                 v.ensemble_size, config.intercept, derive_seed(seed, 0xe9b1ULL));
            return methods::enbpi(ensemble, data.split, config.alpha, v.refresh_period, v.pool);
        }
        case MethodKind::ACI: return methods::aci(data.model, data.split, config.alpha, v.gamma).intervals;
    }
    throw std::logic_error("unhandled method kind");
}

}  // namespace

CellRun run_variant(const ExperimentConfig& config, const ReplicateData& data, const dgp::ProcessSpec& process,
                    const MethodVariant& variant, std::size_t rep) {
    CellRun run;
    auto& rec = run.record;
    rec.process = process.label;
    rec.method = variant.method_label();
    rec.variant = variant.variant_label();
    rec.rep = rep;
    rec.seed = data.series.seed;
    rec.n_test = data.split.test.size();
    for (std::size_t row = data.split.test.begin; row < data.split.test.end; ++row) {
        run.truth.push_back(data.split.responses(static_cast<Eigen::Index>(row)));
        run.times.push_back(data.split.times[row]);
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        run.intervals = build_intervals(config, data, variant, data.series.seed);
        const auto stop = std::chrono::steady_clock::now();
        const auto ev = evaluate(run.intervals, run.truth);
        rec.coverage = ev.coverage;
        rec.avg_width = ev.mean_width;
        rec.covered = ev.covered;
        rec.runtime_ms =
            config.measure_time ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
    } catch (const std::exception& e) {
        rec.coverage = std::nan("");
        rec.avg_width = std::nan("");
        rec.failure = e.what();
    }
    return run;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, std::size_t jobs) {
    config.validate();
    const auto variants = config.variants();
    const std::size_t reps = config.replicates;
    const std::size_t tasks = config.processes.size() * reps;

    // records[(process * variants + variant) * reps + rep]: already canonical order.
    std::vector<RunRecord> records(tasks * variants.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (std::size_t task = next++; task < tasks; task = next++) {
            const std::size_t p = task / reps;
            const std::size_t rep = task % reps;
            const auto& process = config.processes[p];
            try {
                try {
                    const auto data = prepare_replicate(config, process, rep);
                    for (std::size_t v = 0; v < variants.size(); ++v)
                        records[(p * variants.size() + v) * reps + rep] =
                            run_variant(config, data, process, variants[v], rep).record;
                } catch (const std::exception& e) {
                    // Data or base-model failure: every method of this replicate fails with the same reason.
                    for (std::size_t v = 0; v < variants.size(); ++v) {
                        auto& rec = records[(p * variants.size() + v) * reps + rep];
                        rec = RunRecord{};
                        rec.process = process.label;
                        rec.method = variants[v].method_label();
                        rec.variant = variants[v].variant_label();
                        rec.rep = rep;
                        rec.coverage = rec.avg_width = std::nan("");
                        rec.seed = replicate_seed(config.base_seed, process.label, rep);
                        rec.failure = e.what();
                    }
                }
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
            }
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, tasks);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);
    return records;
}

std::pair<double, double> mean_and_half_width(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean of an empty sample");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sd / std::sqrt(n)};
}

Summary aggregate(std::span<const RunRecord> records) {
    Summary summary;
    // Cells keep the order in which they first appear.
    std::vector<std::vector<const RunRecord*>> groups;
    for (const auto& r : records) {
        auto it = std::find_if(summary.cells.begin(), summary.cells.end(), [&](const CellSummary& c) {
            return c.process == r.process && c.method == r.method && c.variant == r.variant;
        });
        if (it == summary.cells.end()) {
            summary.cells.push_back({r.process, r.method, r.variant});
            groups.emplace_back();
            it = summary.cells.end() - 1;
        }
        groups[static_cast<std::size_t>(it - summary.cells.begin())].push_back(&r);
    }

    for (std::size_t i = 0; i < summary.cells.size(); ++i) {
        auto& cell = summary.cells[i];
        std::vector<double> coverage, width, runtime;
        for (const auto* r : groups[i]) {
            ++cell.replicates;
            if (r->failure) {
                ++cell.failed;
                continue;
            }
            coverage.push_back(r->coverage);
            runtime.push_back(r->runtime_ms);
            if (r->width_infinite())
                ++cell.infinite_width_runs;
            else
                width.push_back(r->avg_width);
        }
        if (coverage.empty())
            throw std::invalid_argument("aggregate: cell " + cell.process + "/" + cell.method + "/" + cell.variant +
                                        " has no successful records");
        std::tie(cell.mean_coverage, cell.coverage_half_width) = mean_and_half_width(coverage);
        std::tie(cell.mean_runtime_ms, cell.runtime_half_width) = mean_and_half_width(runtime);
        if (width.empty()) {
            cell.mean_width = calib::kInf;
            cell.width_half_width = 0.0;
        } else {
            std::tie(cell.mean_width, cell.width_half_width) = mean_and_half_width(width);
        }
    }
    return summary;
}

const CellSummary& Summary::at(const std::string& process, const std::string& method,
                               const std::string& variant) const {
    for (const auto& c : cells)
        if (c.process == process && c.method == method && c.variant == variant) return c;
    throw std::out_of_range("no summary cell " + process + "/" + method + "/" + variant);
}

std::vector<const CellSummary*> Summary::find(const std::string& process, const std::string& method) const {
    std::vector<const CellSummary*> out;
    for (const auto& c : cells)
        if (c.process == process && c.method == method) out.push_back(&c);
    return out;
}

}  // namespace tscp::bench
