/*
   Copyright 2026 The mcaoi Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// mcaoi: closed-form and simulated average age of information for K-of-N
// multicast status updates under a hard deadline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mcaoi/mcaoi.hpp"

namespace {

using namespace mcaoi;

enum Exit : int { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::int64_t n = 10;
    std::int64_t k = 7;
    std::string rate = "1/3";
    double shift = 0.1;
    std::string deadline = "3";
    std::string format = "json";
    std::string output;
    unsigned threads = 1;
    std::uint64_t updates = 1'000'000;
    std::uint32_t trials = 10;
    std::uint64_t seed = 12345;
    std::uint64_t warmup = 1000;
    bool compare = false;
    std::string trace;
    std::string sweep_var = "deadline";
    std::vector<double> range{0.2, 10.0};
    double step = 0.05;
    bool with_sim = false;
    std::size_t scan_points = 200;
    double tol = 1e-4;
};

unsigned default_threads()
{
    if (const char* env = std::getenv("MCAOI_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double parse_number(const std::string& s, const char* what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw Error(ErrorCode::InvalidConfig, std::string("cannot parse ") + what + " '" + s + "'");
    }
    return v;
}

/// Decimal or simple fraction "a/b".
double parse_rate(const std::string& s)
{
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        return parse_number(s, "rate");
    }
    const double num = parse_number(s.substr(0, slash), "rate numerator");
    const double den = parse_number(s.substr(slash + 1), "rate denominator");
    if (den == 0.0) {
        throw Error(ErrorCode::NonPositiveRate, "zero denominator in rate");
    }
    return num / den;
}

Deadline parse_deadline(const std::string& s)
{
    if (s == "inf" || s == "infinity" || s == "Inf" || s == "INF") {
        return Deadline::infinite();
    }
    return Deadline::from_double(parse_number(s, "deadline"));
}

SystemParams resolve_params(const Options& o)
{
    return validate(RawParams{o.n, o.k, parse_rate(o.rate), o.shift, parse_deadline(o.deadline)});
}

SimConfig resolve_sim(const Options& o, const SystemParams& p)
{
    SimConfig cfg{p, o.updates, o.trials, o.seed, o.warmup};
    validate(cfg);
    return cfg;
}

std::string toml_string(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch;
    }
    return out + '"';
}

/// Fully resolved configuration as a TOML file that `--config` accepts.
std::string manifest_toml(const std::string& command, const Options& o, const SystemParams& p)
{
    std::ostringstream m;
    m << "# mcaoi run manifest; replay with: mcaoi replay <this file>\n";
    m << "command = " << toml_string(command) << '\n';
    m << "tool_version = " << toml_string(kVersion) << '\n';
    m << "formula_variants = [";
    for (std::size_t i = 0; i < std::size(kFormulaVariants); ++i) {
        m << (i ? ", " : "") << toml_string(kFormulaVariants[i]);
    }
    m << "]\n";
    m << "n = " << p.n_devices() << '\n';
    m << "k = " << p.k_quorum() << '\n';
    m << "rate = " << toml_string(format_double(p.rate())) << '\n';
    m << "shift = " << format_double(p.shift()) << '\n';
    m << "deadline = " << toml_string(format_double(p.deadline().value())) << '\n';
    m << "format = " << toml_string(o.format) << '\n';
    m << "updates = " << o.updates << '\n';
    m << "trials = " << o.trials << '\n';
    m << "seed = " << o.seed << '\n';
    m << "warmup = " << o.warmup << '\n';
    m << "compare = " << (o.compare ? "true" : "false") << '\n';
    m << "sweep-var = " << toml_string(o.sweep_var) << '\n';
    m << "range = [" << format_double(o.range.at(0)) << ", " << format_double(o.range.at(1)) << "]\n";
    m << "step = " << format_double(o.step) << '\n';
    m << "with-sim = " << (o.with_sim ? "true" : "false") << '\n';
    m << "scan-points = " << o.scan_points << '\n';
    m << "tol = " << format_double(o.tol) << '\n';
    return m.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f << content;
    if (!f) {
        throw IoError("failed writing '" + path + "'");
    }
}

/// Sends `content` to --output (plus its manifest) or to standard output.
void emit(const std::string& command, const Options& o, const SystemParams& p, const std::string& content)
{
    if (o.output.empty()) {
        std::cout << content;
        return;
    }
    write_file(o.output, content);
    write_file(o.output + ".manifest.toml", manifest_toml(command, o, p));
}

std::string cmd_analytic(const Options& o, const SystemParams& p)
{
    const auto b = average_aoi(p);
    std::ostringstream os;
    if (o.format == "csv") {
        write_analytic_csv(os, b);
    } else {
        os << to_json(b).dump(2) << '\n';
    }
    return os.str();
}

std::string cmd_simulate(const Options& o, const SystemParams& p)
{
    const auto cfg = resolve_sim(o, p);
    std::optional<std::ofstream> trace;
    CycleSink sink;
    if (!o.trace.empty()) {
        trace.emplace(o.trace, std::ios::binary);
        if (!*trace) {
            throw IoError("cannot open trace file '" + o.trace + "'");
        }
        sink = [&trace](const CycleRecord& c) { *trace << to_json(c).dump() << '\n'; };
    }
    const auto est = estimate(cfg, o.threads, sink);
    if (trace && !*trace) {
        throw IoError("failed writing trace file '" + o.trace + "'");
    }
    std::optional<AnalyticBreakdown> analytic;
    if (o.compare) {
        analytic = average_aoi(p);
    }
    const AnalyticBreakdown* cmp = analytic ? &*analytic : nullptr;
    std::ostringstream os;
    if (o.format == "csv") {
        write_simulate_csv(os, cfg, est, cmp);
    } else {
        os << to_json(cfg, est, cmp).dump(2) << '\n';
    }
    return os.str();
}

SweepOptions sweep_options(const Options& o)
{
    SweepOptions so;
    so.threads = o.threads;
    if (o.with_sim) {
        so.sim = SimPlan{o.updates, o.trials, o.seed, o.warmup};
    }
    return so;
}

std::string cmd_sweep(const Options& o, const SystemParams& p)
{
    std::ostringstream os;
    if (o.sweep_var == "quorum") {
        write_sweep_csv(os, sweep_quorum(p, sweep_options(o)).records);
    } else {
        write_sweep_csv(os, sweep_deadline(p, o.range.at(0), o.range.at(1), o.step, sweep_options(o)));
    }
    return os.str();
}

std::string cmd_optimize(const Options& o, const SystemParams& p)
{
    json j = to_json(p.raw());
    j["variable"] = o.sweep_var;
    if (o.sweep_var == "quorum") {
        const auto q = sweep_quorum(p, sweep_options(o));
        j["k_star"] = q.k_star;
        j["aoi_star"] = json_number(q.aoi_star);
        json curve = json::array();
        for (const auto& r : q.records) {
            curve.push_back(json_number(r.aoi()));
        }
        j["avg_aoi_by_k"] = curve;
    } else {
        const auto opt = minimize_deadline(p, o.range.at(0), o.range.at(1), o.tol, o.scan_points, o.threads);
        j["t_d_star"] = opt.t_d_star;
        j["aoi_star"] = opt.aoi_star;
        j["boundary_minimum"] = opt.boundary_minimum;
        j["bracket"] = {opt.bracket_lo, opt.bracket_hi};
        j["scan_points"] = o.scan_points;
        j["tol"] = o.tol;
    }
    return j.dump(2) + '\n';
}

int run(int argc, const char* const* argv);

int replay(const std::string& manifest, const std::string& output)
{
    std::string command;
    try {
        for (const auto& item : CLI::ConfigTOML().from_file(manifest)) {
            if (item.name == "command" && !item.inputs.empty()) {
                command = item.inputs.front();
            }
        }
    } catch (const CLI::Error& e) {
        std::cerr << "mcaoi: " << e.what() << '\n';
        return kIo;
    }
    if (command.empty() || command == "replay") {
        std::cerr << "mcaoi: manifest '" << manifest << "' names no command\n";
        return kValidation;
    }
    std::vector<std::string> args{"mcaoi", command, "--config", manifest};
    if (!output.empty()) {
        args.insert(args.end(), {"--output", output});
    }
    std::vector<const char*> cargs;
    for (const auto& a : args) {
        cargs.push_back(a.c_str());
    }
    return run(static_cast<int>(cargs.size()), cargs.data());
}

int run(int argc, const char* const* argv)
{
    Options o;
    o.threads = default_threads();

    CLI::App app{"Average age of information for K-of-N multicast with a hard deadline", "mcaoi"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "TOML file with the same keys as the flags; flags win");
    app.allow_config_extras(CLI::config_extras_mode::ignore);

    app.add_option("--n", o.n, "number of devices N")->capture_default_str();
    app.add_option("--k", o.k, "devices required to serve an update K")->capture_default_str();
    app.add_option("--rate", o.rate, "service rate, decimal or fraction like 1/3")->capture_default_str();
    app.add_option("--shift", o.shift, "service time shift c")->capture_default_str();
    app.add_option("--deadline", o.deadline, "hard deadline T_D, or inf")->capture_default_str();
    app.add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--output", o.output, "write here (and a .manifest.toml beside it) instead of stdout");
    app.add_option("--threads", o.threads, "worker threads (default: $MCAOI_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("--updates", o.updates, "status updates per trial")->capture_default_str();
    app.add_option("--trials", o.trials, "independent trials")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", o.seed, "master seed; trial i uses seed xor i")->capture_default_str();
    app.add_option("--warmup", o.warmup, "updates discarded before accounting")->capture_default_str();
    app.add_flag("--compare", o.compare, "report analytic values and within-CI verdicts");
    app.add_option("--trace", o.trace, "stream per-cycle records as NDJSON");
    app.add_option("--sweep-var,--var", o.sweep_var, "deadline or quorum")
        ->check(CLI::IsMember({"deadline", "quorum"}))
        ->capture_default_str();
    app.add_option("--range", o.range, "deadline range lo hi")->expected(2)->capture_default_str();
    app.add_option("--step", o.step, "deadline grid step")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--with-sim", o.with_sim, "simulate every sweep point as well");
    app.add_option("--scan-points", o.scan_points, "coarse scan size before refinement")->capture_default_str();
    app.add_option("--tol", o.tol, "golden-section interval tolerance")->capture_default_str();

    auto* analytic = app.add_subcommand("analytic", "closed-form breakdown")->fallthrough();
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate")->fallthrough();
    auto* sweep = app.add_subcommand("sweep", "analytic (and optionally simulated) sweep as CSV")->fallthrough();
    auto* optimize = app.add_subcommand("optimize", "optimal deadline or quorum")->fallthrough();
    auto* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in a manifest (accepts --output)")->fallthrough();
    std::string manifest;
    replay_cmd->add_option("manifest", manifest, "manifest file")->required();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    if (replay_cmd->parsed()) {
        return replay(manifest, o.output);
    }

    try {
        const auto p = resolve_params(o);
        std::string command;
        std::string content;
        if (analytic->parsed()) {
            command = "analytic";
            content = cmd_analytic(o, p);
        } else if (simulate->parsed()) {
            command = "simulate";
            content = cmd_simulate(o, p);
        } else if (sweep->parsed()) {
            command = "sweep";
            content = cmd_sweep(o, p);
        } else if (optimize->parsed()) {
            command = "optimize";
            content = cmd_optimize(o, p);
        }
        emit(command, o, p, content);
    } catch (const Error& e) {
        std::cerr << "mcaoi: " << e.what() << '\n';
        return is_validation_error(e.code()) ? kValidation : kNumerical;
    } catch (const IoError& e) {
        std::cerr << "mcaoi: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    return run(argc, argv);
}
