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

#pragma once

// JSON, CSV and NDJSON writers. Column and key order is part of the
// contract; bump the schema constants when it changes.

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcaoi/optimize.hpp"
#include "mcaoi/renewal.hpp"
#include "mcaoi/simulator.hpp"

namespace mcaoi {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kAnalyticCsvSchema = "# schema: mcaoi-analytic-csv/1";
inline constexpr std::string_view kSimulateCsvSchema = "# schema: mcaoi-simulate-csv/1";
inline constexpr std::string_view kSweepCsvSchema = "# schema: mcaoi-sweep-csv/1";

/// Field order of a serialized breakdown.
inline const std::vector<std::string_view>& breakdown_fields()
{
    static const std::vector<std::string_view> f{
        "N",       "K",         "lambda_s", "c",         "T_D",    "p_success", "p_f2",       "p_s1",
        "xf_mean", "xf_second", "xs_mean",  "xs_second", "w_mean", "w_second",  "t_hat_mean", "avg_aoi"};
    return f;
}

/// Round-trip text form; "inf" and "nan" spelled out.
inline std::string format_double(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// NaN becomes null, the infinite deadline the string "inf".
inline json json_number(double x)
{
    if (std::isnan(x)) {
        return nullptr;
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return x;
}

inline json to_json(const RawParams& p)
{
    json j;
    j["N"] = p.n_devices;
    j["K"] = p.k_quorum;
    j["lambda_s"] = p.rate;
    j["c"] = p.shift;
    j["T_D"] = json_number(p.deadline.value());
    return j;
}

inline std::vector<double> breakdown_values(const AnalyticBreakdown& b)
{
    return {b.p_success, b.p_f2,     b.p_s1,   b.xf_mean,  b.xf_second,  b.xs_mean,
            b.xs_second, b.w_mean,   b.w_second, b.t_hat_mean, b.avg_aoi};
}

inline json to_json(const AnalyticBreakdown& b)
{
    json j = to_json(b.params);
    const auto values = breakdown_values(b);
    const auto& names = breakdown_fields();
    for (std::size_t i = 0; i < values.size(); ++i) {
        j[std::string(names[i + 5])] = json_number(values[i]);
    }
    return j;
}

inline std::string params_csv(const RawParams& p)
{
    return std::to_string(p.n_devices) + "," + std::to_string(p.k_quorum) + "," + format_double(p.rate) +
           "," + format_double(p.shift) + "," + format_double(p.deadline.value());
}

inline std::string breakdown_csv_header()
{
    std::string s;
    for (const auto& f : breakdown_fields()) {
        if (!s.empty()) {
            s += ',';
        }
        s += f;
    }
    return s;
}

inline std::string breakdown_csv_row(const AnalyticBreakdown& b)
{
    std::string s = params_csv(b.params);
    for (double v : breakdown_values(b)) {
        s += ',';
        s += format_double(v);
    }
    return s;
}

inline void write_analytic_csv(std::ostream& os, const AnalyticBreakdown& b)
{
    os << kAnalyticCsvSchema << '\n' << breakdown_csv_header() << '\n' << breakdown_csv_row(b) << '\n';
}

struct NamedInterval {
    std::string_view name;
    const Interval* simulated;
    double analytic;
};

/// Simulated fields paired with their analytic counterparts.
inline std::vector<NamedInterval> paired_fields(const SimEstimate& e, const AnalyticBreakdown& a)
{
    return {{"p_success", &e.p_success, a.p_success},   {"p_f2", &e.p_f2, a.p_f2},
            {"p_s1", &e.p_s1, a.p_s1},                  {"xf_mean", &e.xf_mean, a.xf_mean},
            {"xf_second", &e.xf_second, a.xf_second},   {"xs_mean", &e.xs_mean, a.xs_mean},
            {"xs_second", &e.xs_second, a.xs_second},   {"w_mean", &e.w_mean, a.w_mean},
            {"w_second", &e.w_second, a.w_second},      {"t_hat_mean", &e.t_hat_mean, a.t_hat_mean},
            {"avg_aoi", &e.avg_aoi, a.avg_aoi}};
}

inline json to_json(const Interval& i)
{
    json j;
    j["point"] = json_number(i.point);
    j["half_width_95"] = json_number(i.half_width_95);
    j["std_error"] = json_number(i.std_error);
    return j;
}

/// Analytic value against the simulated 95% interval. NaN on both sides
/// (quantity undefined in this regime) counts as agreement.
inline bool within_ci(const Interval& sim, double analytic)
{
    if (std::isnan(analytic) && std::isnan(sim.point)) {
        return true;
    }
    return std::abs(analytic - sim.point) <= sim.half_width_95;
}

inline json to_json(const SimConfig& cfg, const SimEstimate& e, const AnalyticBreakdown* compare = nullptr)
{
    json j = to_json(cfg.params.raw());
    j["updates"] = cfg.n_updates;
    j["trials"] = cfg.n_trials;
    j["seed"] = cfg.seed;
    j["warmup"] = cfg.warmup_updates;
    // Field set mirrors the analytic breakdown; pair against a dummy when not comparing.
    const AnalyticBreakdown none{};
    json fields;
    for (const auto& f : paired_fields(e, compare ? *compare : none)) {
        json entry = to_json(*f.simulated);
        if (compare) {
            entry["analytic"] = json_number(f.analytic);
            entry["within_ci"] = within_ci(*f.simulated, f.analytic);
        }
        fields[std::string(f.name)] = entry;
    }
    j["estimates"] = fields;
    j["n_effective_cycles"] = e.n_effective_cycles;
    j["max_area_rel_dev"] = e.max_area_rel_dev;
    j["max_length_rel_dev"] = e.max_length_rel_dev;
    return j;
}

inline void write_simulate_csv(std::ostream& os, const SimConfig& cfg, const SimEstimate& e,
                               const AnalyticBreakdown* compare = nullptr)
{
    os << kSimulateCsvSchema << '\n';
    os << "N,K,lambda_s,c,T_D,updates,trials,seed,warmup,field,point,half_width_95,std_error";
    if (compare) {
        os << ",analytic,within_ci";
    }
    os << '\n';
    const std::string prefix = params_csv(cfg.params.raw()) + "," + std::to_string(cfg.n_updates) + "," +
                               std::to_string(cfg.n_trials) + "," + std::to_string(cfg.seed) + "," +
                               std::to_string(cfg.warmup_updates);
    const AnalyticBreakdown none{};
    for (const auto& f : paired_fields(e, compare ? *compare : none)) {
        os << prefix << ',' << f.name << ',' << format_double(f.simulated->point) << ','
           << format_double(f.simulated->half_width_95) << ',' << format_double(f.simulated->std_error);
        if (compare) {
            os << ',' << format_double(f.analytic) << ',' << (within_ci(*f.simulated, f.analytic) ? 1 : 0);
        }
        os << '\n';
    }
}

inline std::string sweep_csv_header()
{
    return "variable,value," + breakdown_csv_header() + ",sim_avg_aoi,sim_half_width_95,error";
}

inline std::string csv_quote(std::string_view s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    return out + '"';
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records)
{
    os << kSweepCsvSchema << '\n' << sweep_csv_header() << '\n';
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : records) {
        os << r.variable << ',' << format_double(r.value) << ',';
        if (r.analytic) {
            os << breakdown_csv_row(*r.analytic);
        } else {
            os << params_csv(r.params);
            for (std::size_t i = 0; i < breakdown_fields().size() - 5; ++i) {
                os << ",nan";
            }
        }
        os << ',' << format_double(r.simulated_aoi ? r.simulated_aoi->point : nan) << ','
           << format_double(r.simulated_aoi ? r.simulated_aoi->half_width_95 : nan) << ','
           << (r.error.empty() ? "" : csv_quote(r.error)) << '\n';
    }
}

inline json to_json(const CycleRecord& c)
{
    json j;
    j["trial"] = c.trial;
    j["device"] = c.device;
    j["M"] = c.m;
    j["W"] = c.w;
    j["XS_prev"] = c.xs_prev;
    j["XS"] = c.xs;
    j["T_hat"] = c.t_hat;
    j["A"] = c.area;
    j["Y"] = c.length;
    return j;
}

} // namespace mcaoi
