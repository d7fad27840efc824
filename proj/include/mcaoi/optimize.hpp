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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mcaoi/error.hpp"
#include "mcaoi/params.hpp"
#include "mcaoi/renewal.hpp"
#include "mcaoi/simulator.hpp"

namespace mcaoi {

/// Simulation settings attached to a sweep; params come from each grid point.
struct SimPlan {
    std::uint64_t n_updates = 1'000'000;
    std::uint32_t n_trials = 10;
    std::uint64_t seed = 0;
    std::uint64_t warmup_updates = 1000;
};

struct SweepOptions {
    unsigned threads = 1;
    std::optional<SimPlan> sim;
};

struct SweepRecord {
    std::string variable; ///< "deadline" or "quorum"
    double value = 0.0;
    RawParams params;
    std::optional<AnalyticBreakdown> analytic;
    std::optional<Interval> simulated_aoi;
    std::string error; ///< set when the analytic evaluation failed at this point

    double aoi() const
    {
        return analytic ? analytic->avg_aoi : std::numeric_limits<double>::infinity();
    }
};

namespace detail {

inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body)
{
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(threads, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                body(i);
            }
        });
    }
}

inline SweepRecord evaluate_point(std::string variable, double value, const RawParams& raw,
                                  const std::optional<SimPlan>& sim)
{
    SweepRecord rec;
    rec.variable = std::move(variable);
    rec.value = value;
    rec.params = raw;
    try {
        const auto p = validate(raw);
        rec.analytic = average_aoi(p);
        if (sim) {
            const SimConfig cfg{p, sim->n_updates, sim->n_trials, sim->seed, sim->warmup_updates};
            rec.simulated_aoi = estimate(cfg).avg_aoi;
        }
    } catch (const Error& e) {
        rec.error = e.what();
    }
    return rec;
}

/// lo, lo + step, ... up to hi (hi included when it lands on the grid).
inline std::vector<double> grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo)) {
        throw Error(ErrorCode::InvalidConfig, "grid needs step > 0 and hi >= lo");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) {
        xs[i] = lo + static_cast<double>(i) * step;
    }
    return xs;
}

} // namespace detail

/// Average age over the deadline grid [lo, hi] with spacing `step`.
/// `base` supplies N, K, rate and shift; its deadline is ignored.
inline std::vector<SweepRecord> sweep_deadline(const SystemParams& base, double lo, double hi, double step,
                                               const SweepOptions& opt = {})
{
    if (!(lo > base.shift())) {
        throw Error(ErrorCode::DeadlineNotAboveShift, "sweep range must start above the shift");
    }
    const auto xs = detail::grid(lo, hi, step);
    std::vector<SweepRecord> out(xs.size());
    detail::parallel_for(xs.size(), opt.threads, [&](std::size_t i) {
        auto raw = base.raw();
        raw.deadline = Deadline::at(xs[i]);
        out[i] = detail::evaluate_point("deadline", xs[i], raw, opt.sim);
    });
    return out;
}

struct QuorumSweep {
    std::vector<SweepRecord> records;
    int k_star = 0;
    double aoi_star = 0.0;
};

/// Exhaustive sweep of K = 1..N at the base deadline.
inline QuorumSweep sweep_quorum(const SystemParams& base, const SweepOptions& opt = {})
{
    const int n = base.n_devices();
    QuorumSweep out;
    out.records.resize(static_cast<std::size_t>(n));
    detail::parallel_for(out.records.size(), opt.threads, [&](std::size_t i) {
        auto raw = base.raw();
        raw.k_quorum = static_cast<std::int64_t>(i) + 1;
        out.records[i] = detail::evaluate_point("quorum", static_cast<double>(i + 1), raw, opt.sim);
    });
    out.aoi_star = std::numeric_limits<double>::infinity();
    for (const auto& r : out.records) {
        if (r.aoi() < out.aoi_star) {
            out.aoi_star = r.aoi();
            out.k_star = static_cast<int>(r.value);
        }
    }
    return out;
}

struct DeadlineOptimum {
    double t_d_star = 0.0;
    double aoi_star = 0.0;
    bool boundary_minimum = false; ///< the scan minimum sat on lo or hi
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double scan_best_aoi = 0.0;
};

/// Dense scan of [lo, hi] to bracket the minimum, then golden-section
/// refinement inside the bracket down to width `tol`. Unimodality is only
/// trusted inside the bracket.
inline DeadlineOptimum minimize_deadline(const SystemParams& base, double lo, double hi, double tol = 1e-4,
                                         std::size_t scan_points = 200, unsigned threads = 1)
{
    if (!(lo > base.shift()) || !(hi > lo) || !(tol > 0.0) || scan_points < 3) {
        throw Error(ErrorCode::InvalidConfig, "need shift < lo < hi, tol > 0 and at least 3 scan points");
    }
    auto objective = [&](double td) {
        try {
            return average_aoi(base.with_deadline(Deadline::at(td))).avg_aoi;
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> xs(scan_points);
    std::vector<double> ys(scan_points);
    const double h = (hi - lo) / static_cast<double>(scan_points - 1);
    for (std::size_t i = 0; i < scan_points; ++i) {
        xs[i] = i + 1 == scan_points ? hi : lo + static_cast<double>(i) * h;
    }
    detail::parallel_for(scan_points, threads, [&](std::size_t i) { ys[i] = objective(xs[i]); });

    std::size_t best = 0;
    for (std::size_t i = 1; i < scan_points; ++i) {
        if (ys[i] < ys[best]) {
            best = i;
        }
    }
    DeadlineOptimum out;
    out.scan_best_aoi = ys[best];
    if (best == 0 || best + 1 == scan_points) {
        out.t_d_star = xs[best];
        out.aoi_star = ys[best];
        out.boundary_minimum = true;
        out.bracket_lo = out.bracket_hi = xs[best];
        return out;
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = xs[best - 1];
    double b = xs[best + 1];
    out.bracket_lo = a;
    out.bracket_hi = b;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fmid = objective(mid);
    out.t_d_star = mid;
    out.aoi_star = fmid;
    if (ys[best] < fmid) {
        out.t_d_star = xs[best];
        out.aoi_star = ys[best];
    }
    return out;
}

} // namespace mcaoi
