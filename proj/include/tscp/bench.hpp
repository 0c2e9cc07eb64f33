#pragma once

#include "tscp/calibration.hpp"
#include "tscp/dgp.hpp"
#include "tscp/intervals.hpp"
#include "tscp/methods_online.hpp"
#include "tscp/methods_static.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tscp::bench {

enum class MethodKind { SCP, SCPBlock, WCP, EnbPI, ACI };

/// One concrete method configuration, i.e. a single point of a method grid.
struct MethodVariant {
    MethodKind kind = MethodKind::SCP;
    std::size_t block_size = 2;
    calib::WeightScheme scheme;
    methods::WcpCalibration wcp_calibration = methods::WcpCalibration::Fixed;
    std::size_t ensemble_size = 25;
    std::size_t refresh_period = 1;
    methods::EnbpiPool pool = methods::EnbpiPool::TrainingOob;
    double gamma = 0.005;

    std::string method_label() const;
    std::string variant_label() const;
};

/// A method together with its parameter grid, as written in the config file.
struct MethodGrid {
    MethodKind kind = MethodKind::SCP;
    std::vector<std::size_t> block_sizes;
    struct Scheme {
        calib::WeightScheme scheme;
        methods::WcpCalibration calibration = methods::WcpCalibration::Fixed;
    };
    std::vector<Scheme> schemes;
    std::size_t ensemble_size = 25;
    std::vector<std::size_t> refresh_periods;
    methods::EnbpiPool pool = methods::EnbpiPool::TrainingOob;
    std::vector<double> gammas;

    std::vector<MethodVariant> expand() const;
};

struct ExperimentConfig {
    std::vector<dgp::ProcessSpec> processes;
    std::vector<MethodGrid> methods;
    double alpha = 0.1;
    dgp::SplitSizes sizes;
    int lag_order = 2;
    bool intercept = true;
    std::size_t replicates = 50;
    std::uint64_t base_seed = 20251015;
    bool measure_time = true;
    std::filesystem::path records_path = "records.csv";
    std::filesystem::path summary_path = "summary.json";

    /// The standard benchmark grid: four processes, twelve method variants.
    static ExperimentConfig default_grid();

    std::vector<MethodVariant> variants() const;
    std::size_t series_length() const;
    void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

struct RunRecord {
    std::string process;
    std::string method;
    std::string variant;
    std::size_t rep = 0;
    double coverage = 0.0;
    double avg_width = 0.0;
    double runtime_ms = 0.0;
    std::uint64_t seed = 0;
    std::size_t covered = 0;
    std::size_t n_test = 0;
    std::optional<std::string> failure;

    bool width_infinite() const { return !std::isfinite(avg_width); }
};

struct Evaluation {
    double coverage = 0.0;
    double mean_width = 0.0;
    std::size_t covered = 0;
    std::size_t unbounded = 0;
};

/// Closed-interval coverage and mean width; any unbounded interval makes the mean width +inf.
Evaluation evaluate(const IntervalSeries& intervals, std::span<const double> truth);

/// Seed of replicate rep of a process: base_seed mixed with a stable hash of (label, rep).
std::uint64_t replicate_seed(std::uint64_t base_seed, const std::string& process_label, std::size_t rep);

/// Everything computed for one (process, variant, replicate) cell.
struct CellRun {
    RunRecord record;
    IntervalSeries intervals;
    std::vector<double> truth;
    std::vector<long> times;
};

/// Shared inputs for every method in one (process, replicate) cell.
struct ReplicateData {
    dgp::TimeSeries series;
    dgp::SupervisedSplit split;
    forecast::LinearForecaster model;
};

ReplicateData prepare_replicate(const ExperimentConfig& config, const dgp::ProcessSpec& process, std::size_t rep);

CellRun run_variant(const ExperimentConfig& config, const ReplicateData& data, const dgp::ProcessSpec& process,
                    const MethodVariant& variant, std::size_t rep);

/**
 * Runs every (process, variant, replicate). Replicates run on `jobs` threads;
 * records come back in canonical order (process, variant in grid order, rep)
 * regardless of scheduling.
 */
std::vector<RunRecord> run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

struct CellSummary {
    std::string process;
    std::string method;
    std::string variant;
    std::size_t replicates = 0;
    std::size_t failed = 0;
    double mean_coverage = 0.0;
    double coverage_half_width = 0.0;
    double mean_width = 0.0;
    double width_half_width = 0.0;
    std::size_t infinite_width_runs = 0;
    double mean_runtime_ms = 0.0;
    double runtime_half_width = 0.0;
};

struct Summary {
    std::vector<CellSummary> cells;

    const CellSummary& at(const std::string& process, const std::string& method, const std::string& variant) const;
    std::vector<const CellSummary*> find(const std::string& process, const std::string& method) const;
};

/// Mean and 1.96 sd / sqrt(R) half-width (sample sd, zero when R = 1).
std::pair<double, double> mean_and_half_width(std::span<const double> values);

Summary aggregate(std::span<const RunRecord> records);

inline constexpr const char* kCsvHeader = "process,method,variant,rep,coverage,avg_width,runtime_ms,seed";

std::string records_to_csv(std::span<const RunRecord> records);
std::vector<RunRecord> records_from_csv(const std::string& text);
std::string summary_to_json(const Summary& summary, int indent = 2);

void write_records(const std::filesystem::path& path, std::span<const RunRecord> records);
std::vector<RunRecord> read_records(const std::filesystem::path& path);
void write_summary(const std::filesystem::path& path, const Summary& summary);

/// Writes both files named in the config, creating parent directories.
void persist(const ExperimentConfig& config, std::span<const RunRecord> records, const Summary& summary);

}  // namespace tscp::bench
