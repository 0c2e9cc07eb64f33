#include "tscp/bench.hpp"

#include "tscp/format.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tscp::bench {

using nlohmann::json;

namespace {

json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

std::string method_name(MethodKind kind) {
    MethodVariant v;
    v.kind = kind;
    return v.method_label();
}

MethodKind method_from_name(const std::string& name) {
    for (auto kind : {MethodKind::SCP, MethodKind::SCPBlock, MethodKind::WCP, MethodKind::EnbPI, MethodKind::ACI})
        if (method_name(kind) == name) return kind;
    throw std::invalid_argument("config: unknown method '" + name + "'");
}

methods::WcpCalibration calibration_from_name(const std::string& name) {
    if (name == "fixed") return methods::WcpCalibration::Fixed;
    if (name == "sequential") return methods::WcpCalibration::Sequential;
    throw std::invalid_argument("config: unknown WCP calibration '" + name + "'");
}

methods::EnbpiPool pool_from_name(const std::string& name) {
    if (name == "training_oob") return methods::EnbpiPool::TrainingOob;
    if (name == "calibration") return methods::EnbpiPool::Calibration;
    throw std::invalid_argument("config: unknown EnbPI pool '" + name + "'");
}

json scheme_to_json(const MethodGrid::Scheme& s) {
    json j;
    switch (s.scheme.kind) {
        case calib::WeightScheme::Kind::Exponential:
            j["kind"] = "exponential";
            j["rho"] = s.scheme.rho;
            break;
        case calib::WeightScheme::Kind::Linear: j["kind"] = "linear"; break;
        case calib::WeightScheme::Kind::Window:
            j["kind"] = "window";
            j["k"] = s.scheme.window;
            break;
    }
    j["calibration"] = s.calibration == methods::WcpCalibration::Fixed ? "fixed" : "sequential";
    return j;
}

MethodGrid::Scheme scheme_from_json(const json& j) {
    MethodGrid::Scheme s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "exponential")
        s.scheme = calib::WeightScheme::exponential(j.at("rho").get<double>());
    else if (kind == "linear")
        s.scheme = calib::WeightScheme::linear();
    else if (kind == "window")
        s.scheme = calib::WeightScheme::sliding_window(j.at("k").get<std::size_t>());
    else
        throw std::invalid_argument("config: unknown weight scheme '" + kind + "'");
    s.calibration = calibration_from_name(j.value("calibration", std::string("fixed")));
    return s;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
    return fields;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << contents;
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }

    ExperimentConfig config;
    try {
        config.alpha = j.value("alpha", config.alpha);
        config.lag_order = j.value("lag_order", config.lag_order);
        config.intercept = j.value("intercept", config.intercept);
        config.replicates = j.value("replicates", config.replicates);
        config.base_seed = j.value("base_seed", config.base_seed);
        config.measure_time = j.value("measure_time", config.measure_time);
        if (j.contains("sizes")) {
            const auto& s = j.at("sizes");
            config.sizes = {s.at("train").get<std::size_t>(), s.at("cal").get<std::size_t>(),
                            s.at("test").get<std::size_t>()};
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            config.records_path = o.value("records", config.records_path.string());
            config.summary_path = o.value("summary", config.summary_path.string());
        }
        for (const auto& p : j.at("processes")) {
            dgp::ProcessSpec spec;
            spec.kind = dgp::process_kind_from_string(p.at("kind").get<std::string>());
            spec.label = p.value("label", dgp::to_string(spec.kind));
            spec.burn_in = p.value("burn_in", std::size_t{0});
            if (p.contains("params"))
                for (const auto& [name, value] : p.at("params").items()) spec.params[name] = value.get<double>();
            config.processes.push_back(std::move(spec));
        }
        for (const auto& m : j.at("methods")) {
            MethodGrid grid;
            grid.kind = method_from_name(m.at("method").get<std::string>());
            grid.block_sizes = m.value("block_sizes", std::vector<std::size_t>{});
            if (m.contains("schemes"))
                for (const auto& s : m.at("schemes")) grid.schemes.push_back(scheme_from_json(s));
            grid.ensemble_size = m.value("ensemble_size", grid.ensemble_size);
            grid.refresh_periods = m.value("refresh_periods", std::vector<std::size_t>{});
            grid.pool = pool_from_name(m.value("pool", std::string("training_oob")));
            grid.gammas = m.value("gammas", std::vector<double>{});
            config.methods.push_back(std::move(grid));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(read_file(path));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string config_to_json(const ExperimentConfig& config) {
    json j;
    j["alpha"] = config.alpha;
    j["lag_order"] = config.lag_order;
    j["intercept"] = config.intercept;
    j["replicates"] = config.replicates;
    j["base_seed"] = config.base_seed;
    j["measure_time"] = config.measure_time;
    j["sizes"] = {{"train", config.sizes.train}, {"cal", config.sizes.cal}, {"test", config.sizes.test}};
    j["output"] = {{"records", config.records_path.string()}, {"summary", config.summary_path.string()}};
    j["processes"] = json::array();
    for (const auto& p : config.processes) {
        json pj = {{"kind", dgp::to_string(p.kind)}, {"label", p.label}, {"burn_in", p.burn_in}};
        pj["params"] = json::object();
        for (const auto& [name, value] : p.params) pj["params"][name] = value;
        j["processes"].push_back(pj);
    }
    j["methods"] = json::array();
    for (const auto& g : config.methods) {
        json mj = {{"method", method_name(g.kind)}};
        switch (g.kind) {
            case MethodKind::SCP: break;
            case MethodKind::SCPBlock: mj["block_sizes"] = g.block_sizes; break;
            case MethodKind::WCP:
                mj["schemes"] = json::array();
                for (const auto& s : g.schemes) mj["schemes"].push_back(scheme_to_json(s));
                break;
            case MethodKind::EnbPI:
                mj["ensemble_size"] = g.ensemble_size;
                mj["refresh_periods"] = g.refresh_periods;
                mj["pool"] = g.pool == methods::EnbpiPool::TrainingOob ? "training_oob" : "calibration";
                break;
            case MethodKind::ACI: mj["gammas"] = g.gammas; break;
        }
        j["methods"].push_back(mj);
    }
    return j.dump(2) + "\n";
}

std::string records_to_csv(std::span<const RunRecord> records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : records) {
        out += csv_field(r.process) + ',' + csv_field(r.method) + ',' + csv_field(r.variant) + ',' +
               std::to_string(r.rep) + ',' + format_double(r.coverage) + ',' + format_double(r.avg_width) + ',' +
               format_double(r.runtime_ms) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("csv: missing or unexpected header");
    std::vector<RunRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 8 fields");
        RunRecord r;
        r.process = f[0];
        r.method = f[1];
        r.variant = f[2];
        r.rep = std::stoull(f[3]);
        r.coverage = parse_double(f[4]);
        r.avg_width = parse_double(f[5]);
        r.runtime_ms = parse_double(f[6]);
        r.seed = std::stoull(f[7]);
        if (std::isnan(r.coverage)) r.failure = "failed run";
        out.push_back(std::move(r));
    }
    return out;
}

std::string summary_to_json(const Summary& summary, int indent) {
    // Keyed process -> method -> variant; key order follows the grid, not the alphabet.
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    for (const auto& c : summary.cells) {
        root[c.process][c.method][c.variant] = {
            {"replicates", c.replicates},
            {"failed", c.failed},
            {"mean_coverage", number_or_string(c.mean_coverage)},
            {"coverage_half_width", number_or_string(c.coverage_half_width)},
            {"mean_width", number_or_string(c.mean_width)},
            {"width_half_width", number_or_string(c.width_half_width)},
            {"infinite_width_runs", c.infinite_width_runs},
            {"mean_runtime_ms", number_or_string(c.mean_runtime_ms)},
            {"runtime_half_width", number_or_string(c.runtime_half_width)},
        };
    }
    return root.dump(indent) + "\n";
}

void write_records(const std::filesystem::path& path, std::span<const RunRecord> records) {
    write_file(path, records_to_csv(records));
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
    try {
        return records_from_csv(read_file(path));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_summary(const std::filesystem::path& path, const Summary& summary) {
    write_file(path, summary_to_json(summary));
}

void persist(const ExperimentConfig& config, std::span<const RunRecord> records, const Summary& summary) {
    write_records(config.records_path, records);
    write_summary(config.summary_path, summary);
}

}  // namespace tscp::bench
