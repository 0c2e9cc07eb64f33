// Command-line front end: benchmark runs, mixing slack reports, single-cell demos.

#include "tscp/bench.hpp"
#include "tscp/format.hpp"
#include "tscp/mixing_bounds.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

using namespace tscp;

std::size_t default_jobs() {
    if (const char* env = std::getenv("TSCP_JOBS")) {
        try {
            const auto n = std::stoul(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("TSCP_JOBS is not a positive integer: '") + env + "'");
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void print_summary_table(const bench::Summary& summary) {
    std::printf("%-12s %-10s %-16s %9s %8s %9s %8s %11s\n", "process", "method", "variant", "coverage", "+/-",
                "width", "+/-", "runtime_ms");
    for (const auto& c : summary.cells) {
        std::printf("%-12s %-10s %-16s %9.4f %8.4f %9.4f %8.4f %11.4f%s\n", c.process.c_str(), c.method.c_str(),
                    c.variant.c_str(), c.mean_coverage, c.coverage_half_width, c.mean_width, c.width_half_width,
                    c.mean_runtime_ms, c.failed ? "  (failures)" : "");
    }
}

nlohmann::ordered_json slack_json(const std::optional<bounds::SlackTerm>& term, const char* shift_name) {
    if (!term) return "INFEASIBLE";
    return {{"epsilon", term->epsilon},
            {"a", term->argmin.a},
            {"m", term->argmin.m},
            {shift_name, term->argmin.shift}};
}

std::string report_to_json(const bounds::SlackReport& r) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["n_train"] = r.n_train;
    j["n_cal"] = r.n_cal;
    j["n_test"] = r.n_test;
    j["alpha"] = r.alpha;
    j["delta_cal"] = r.delta_cal;
    j["delta_test"] = r.delta_test;
    j["first_test_index"] = r.first_test_index;
    j["epsilon_cal"] = slack_json(r.cal, "r");
    j["epsilon_test"] = slack_json(r.test, "s");
    j["epsilon_train"] = r.epsilon_train;
    j["feasible"] = r.feasible;
    if (!r.feasible) j["infeasible_reason"] = r.infeasible_reason;
    if (r.cal) {
        j["marginal"] = {{"eta", r.marginal_eta}, {"lower_bound", r.marginal_lower_bound}};
    }
    if (r.feasible) {
        j["empirical"] = {{"eta", r.empirical_eta},
                          {"lower_bound", r.empirical_lower_bound},
                          {"confidence", r.empirical_confidence}};
    }
    return j.dump(2);
}

void print_report_text(const bounds::SlackReport& r) {
    std::cout << "beta model       " << r.model << "\n";
    auto line = [](const char* name, const std::optional<bounds::SlackTerm>& t, const char* shift) {
        std::cout << name;
        if (!t) {
            std::cout << "INFEASIBLE\n";
            return;
        }
        std::cout << format_double(t->epsilon) << "  (a=" << t->argmin.a << ", m=" << t->argmin.m << ", " << shift
                  << "=" << t->argmin.shift << ")\n";
    };
    line("epsilon_cal      ", r.cal, "r");
    line("epsilon_test     ", r.test, "s");
    std::cout << "epsilon_train    " << format_double(r.epsilon_train) << "\n";
    if (r.cal)
        std::cout << "marginal         eta=" << format_double(r.marginal_eta)
                  << "  coverage >= " << format_double(r.marginal_lower_bound) << "\n";
    if (r.feasible)
        std::cout << "empirical        eta=" << format_double(r.empirical_eta) << "  coverage >= "
                  << format_double(r.empirical_lower_bound) << " with probability >= "
                  << format_double(r.empirical_confidence) << "\n";
    else
        std::cout << "infeasible       " << r.infeasible_reason << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal prediction intervals for time series: benchmark harness and mixing bounds"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run the benchmark grid and write records CSV and summary JSON");
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs, replicates;
    bool no_timing = false;
    run->add_option("--config", config_path, "JSON experiment config (default: built-in grid)")->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory for records.csv and summary.json");
    run->add_option("--seed", seed, "Base seed override");
    run->add_option("--jobs", jobs, "Worker threads (default: $TSCP_JOBS or hardware concurrency)");
    run->add_option("--replicates", replicates, "Replicate count override");
    run->add_flag("--no-timing", no_timing, "Write runtime_ms as 0 so output is byte-reproducible");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Finite-sample slack terms for a beta-mixing model");
    long n_train = 300, n_cal = 300, n_test = 300;
    std::optional<long> first_test;
    double alpha = 0.1, delta_cal = 0.1, delta_test = 0.1;
    std::string beta = "iid", format = "json";
    bnd->add_option("--n-train", n_train)->capture_default_str();
    bnd->add_option("--n-cal", n_cal)->capture_default_str();
    bnd->add_option("--n-test", n_test)->capture_default_str();
    bnd->add_option("--alpha", alpha)->capture_default_str();
    bnd->add_option("--delta-cal", delta_cal)->capture_default_str();
    bnd->add_option("--delta-test", delta_test)->capture_default_str();
    bnd->add_option("--beta", beta, "iid | geometric:C,RHO | polynomial:C,KAPPA | table:B1,B2,...")->capture_default_str();
    bnd->add_option("--first-test-index", first_test, "Index of the first test point (default n_train+n_cal+1)");
    bnd->add_option("--format", format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();

    // demo
    auto* demo = app.add_subcommand("demo", "Run one cell and dump the per-step trajectory as CSV");
    std::string demo_config, process_label = "MeanShift", method = "ACI", variant, demo_out;
    std::size_t rep = 0;
    demo->add_option("--config", demo_config, "JSON experiment config")->check(CLI::ExistingFile);
    demo->add_option("--process", process_label, "Process label")->capture_default_str();
    demo->add_option("--method", method, "Method label (SCP, SCP-block, WCP, EnbPI, ACI)")->capture_default_str();
    demo->add_option("--variant", variant, "Variant label, e.g. gamma=0.005 (default: first of the method)");
    demo->add_option("--rep", rep, "Replicate index")->capture_default_str();
    demo->add_option("--out", demo_out, "Trajectory CSV path (default: stdout)");

    auto* print_config = app.add_subcommand("print-config", "Print the built-in experiment config as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << nlohmann::json{{"error", e.what()}, {"command", "parse"}}.dump() << "\n";
        return e.get_exit_code();
    }

    const char* command = app.get_subcommands().front()->get_name().c_str();
    try {
        if (run->parsed()) {
            auto config = config_path.empty() ? bench::ExperimentConfig::default_grid() : bench::load_config(config_path);
            if (seed) config.base_seed = *seed;
            if (replicates) config.replicates = *replicates;
            if (no_timing) config.measure_time = false;
            if (!out_dir.empty()) {
                config.records_path = std::filesystem::path(out_dir) / "records.csv";
                config.summary_path = std::filesystem::path(out_dir) / "summary.json";
            }
            const auto records = bench::run_experiment(config, jobs.value_or(default_jobs()));
            for (const auto& r : records)
                if (r.failure)
                    std::cerr << "failed: " << r.process << "/" << r.method << "/" << r.variant << " rep " << r.rep
                              << ": " << *r.failure << "\n";
            const auto summary = bench::aggregate(records);
            bench::persist(config, records, summary);
            print_summary_table(summary);
            std::cout << "records: " << config.records_path.string() << "\nsummary: " << config.summary_path.string()
                      << "\n";
        } else if (bnd->parsed()) {
            const auto model = bounds::MixingModel::parse(beta);
            const auto report = bounds::slack_report(n_train, n_cal, n_test, alpha, delta_cal, delta_test, model,
                                                     first_test.value_or(n_train + n_cal + 1));
            if (format == "json")
                std::cout << report_to_json(report) << "\n";
            else
                print_report_text(report);
            if (!report.feasible) return 3;
        } else if (demo->parsed()) {
            const auto config =
                demo_config.empty() ? bench::ExperimentConfig::default_grid() : bench::load_config(demo_config);
            const dgp::ProcessSpec* process = nullptr;
            for (const auto& p : config.processes)
                if (p.label == process_label) process = &p;
            if (!process) throw std::invalid_argument("no process labelled '" + process_label + "' in the config");
            std::optional<bench::MethodVariant> chosen;
            for (const auto& v : config.variants())
                if (v.method_label() == method && (variant.empty() || v.variant_label() == variant)) {
                    chosen = v;
                    break;
                }
            if (!chosen) throw std::invalid_argument("no variant '" + method + " " + variant + "' in the config");

            const auto data = bench::prepare_replicate(config, *process, rep);
            const auto cell = bench::run_variant(config, data, *process, *chosen, rep);
            if (cell.record.failure) throw std::runtime_error(*cell.record.failure);

            std::ofstream file;
            if (!demo_out.empty()) {
                file.open(demo_out);
                if (!file) throw std::runtime_error("cannot open '" + demo_out + "' for writing");
            }
            std::ostream& out = demo_out.empty() ? std::cout : file;
            out << "step,time,y,center,lower,upper,covered,state\n";
            for (std::size_t i = 0; i < cell.intervals.size(); ++i) {
                const auto& iv = cell.intervals.steps[i];
                out << i + 1 << ',' << cell.times[i] << ',' << format_double(cell.truth[i]) << ','
                    << format_double(iv.center) << ',' << format_double(iv.empty ? NAN : iv.lower) << ','
                    << format_double(iv.empty ? NAN : iv.upper) << ',' << (iv.contains(cell.truth[i]) ? 1 : 0) << ','
                    << format_double(cell.intervals.trace[i]) << '\n';
            }
            std::cerr << cell.record.process << " " << cell.record.method << " " << cell.record.variant
                      << ": coverage " << format_double(cell.record.coverage) << ", mean width "
                      << format_double(cell.record.avg_width) << "\n";
        } else if (print_config->parsed()) {
            std::cout << bench::config_to_json(bench::ExperimentConfig::default_grid());
        }
    } catch (const std::exception& e) {
        nlohmann::json err = {{"error", e.what()}, {"command", command}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
