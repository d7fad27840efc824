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

// Monte Carlo of the generate-at-will multicast server. Each update draws N
// i.i.d. shifted-exponential service times, terminates at
// min(T_D, K-th smallest draw), and the next update starts immediately.
// Every device's age sawtooth is integrated directly.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "mcaoi/error.hpp"
#include "mcaoi/numeric.hpp"
#include "mcaoi/params.hpp"
#include "mcaoi/philox.hpp"

namespace mcaoi {

struct SimConfig {
    SystemParams params;
    std::uint64_t n_updates = 1'000'000;
    std::uint32_t n_trials = 10;
    std::uint64_t seed = 0;
    std::uint64_t warmup_updates = 1000;
};

inline void validate(const SimConfig& cfg)
{
    if (cfg.n_trials < 1) {
        throw Error(ErrorCode::InvalidConfig, "need at least one trial");
    }
    if (cfg.n_updates <= cfg.warmup_updates) {
        throw Error(ErrorCode::InvalidConfig, "n_updates must exceed warmup_updates");
    }
}

/// Inverse-CDF draw c - ln(u)/rate for u in (0, 1].
constexpr double sample_service(double u, double rate, double shift) noexcept
{
    return shift - std::log(u) / rate;
}

/// Service-time draws for one trial. Trial i is keyed by seed ^ i and the
/// draw for (update j, device d) is the Philox output at counter (j, d), so
/// any draw is reproducible on its own.
class ServiceStream {
public:
    ServiceStream(std::uint64_t seed, std::uint64_t trial_index, double rate, double shift) noexcept
        : gen_(seed ^ trial_index), rate_(rate), shift_(shift)
    {
    }

    double draw(std::uint64_t update, std::uint32_t device) const noexcept
    {
        return sample_service(to_unit_interval(gen_.bits(update, device)), rate_, shift_);
    }

private:
    Philox4x32 gen_;
    double rate_;
    double shift_;
};

struct UpdateOutcome {
    double kth = 0.0;         ///< K-th smallest draw, T_N(K)
    double termination = 0.0; ///< min(T_D, T_N(K))
    bool served = false;      ///< quorum reached no later than the deadline
    std::vector<bool> received;
};

namespace detail {

struct Resolved {
    double kth;
    double termination;
    bool served;
};

/// `scratch` must have the size of `draws`; its contents are clobbered.
inline Resolved resolve_update(const SystemParams& p, std::span<const double> draws, std::span<double> scratch)
{
    std::copy(draws.begin(), draws.end(), scratch.begin());
    const auto kth_it = scratch.begin() + (p.k_quorum() - 1);
    std::nth_element(scratch.begin(), kth_it, scratch.end());
    const double kth = *kth_it;
    const double td = p.deadline().value();
    return {kth, std::min(td, kth), kth <= td};
}

/// Absolute time as an unevaluated double-double, so cycle lengths taken as
/// clock differences stay accurate after millions of updates.
class Clock {
public:
    void advance(double dt) noexcept
    {
        const double s = hi_ + dt;
        const double bp = s - hi_;
        lo_ += (hi_ - (s - bp)) + (dt - bp);
        hi_ = s;
    }

    friend double operator-(const Clock& a, const Clock& b) noexcept
    {
        return (a.hi_ - b.hi_) + (a.lo_ - b.lo_);
    }

private:
    double hi_ = 0.0;
    double lo_ = 0.0;
};

} // namespace detail

/// Devices whose draw equals the termination time count as received.
inline UpdateOutcome run_update(const SystemParams& p, std::span<const double> draws)
{
    if (draws.size() != static_cast<std::size_t>(p.n_devices())) {
        throw Error(ErrorCode::InvalidConfig, "need exactly N service draws");
    }
    std::vector<double> scratch(draws.size());
    const auto r = detail::resolve_update(p, draws, scratch);
    UpdateOutcome out{r.kth, r.termination, r.served, std::vector<bool>(draws.size())};
    for (std::size_t d = 0; d < draws.size(); ++d) {
        out.received[d] = draws[d] <= r.termination;
    }
    return out;
}

/// One renewal cycle at one device: from the termination of a received
/// update to the termination of the next received one.
struct CycleRecord {
    std::uint32_t trial = 0;
    int device = 0;
    std::uint64_t m = 0;  ///< updates sent during the cycle, the last one received
    double w = 0.0;       ///< total inter-generation time of the M-1 missed updates
    double xs_prev = 0.0; ///< inter-generation time of the received update that opened the cycle
    double xs = 0.0;      ///< inter-generation time of the received update that closes it
    double t_hat = 0.0;   ///< service time of the closing update at this device
    double area = 0.0;    ///< integral of the age over the cycle
    double length = 0.0;  ///< cycle duration, measured on the clock
};

using CycleSink = std::function<void(const CycleRecord&)>;

/// Raw sums of one trial, pooled over devices.
struct TrialStats {
    // (update, device) pairs after warm-up
    std::uint64_t pairs = 0;
    std::uint64_t successes = 0;
    std::uint64_t successes_quorum = 0; ///< received, and the quorum fired first
    std::uint64_t failures = 0;
    std::uint64_t failures_deadline = 0; ///< missed, and the deadline fired first
    double sum_xs = 0.0;
    double sum_xs2 = 0.0;
    double sum_xf = 0.0;
    double sum_xf2 = 0.0;
    double sum_t_hat = 0.0;

    // renewal cycles
    std::uint64_t cycles = 0;
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    double sum_area = 0.0;
    double sum_length = 0.0;
    double max_area_rel_dev = 0.0;   ///< direct integral vs. cycle-decomposition area
    double max_length_rel_dev = 0.0; ///< clock difference vs. W + X^S
    std::vector<std::uint64_t> m_histogram; ///< device 0 only; index m

    double avg_aoi() const { return ratio(sum_area, sum_length); }
    double p_success() const { return ratio(successes, pairs); }
    double p_f2() const { return ratio(failures_deadline, failures); }
    double p_s1() const { return ratio(successes_quorum, successes); }
    double xf_mean() const { return ratio(sum_xf, failures); }
    double xf_second() const { return ratio(sum_xf2, failures); }
    double xs_mean() const { return ratio(sum_xs, successes); }
    double xs_second() const { return ratio(sum_xs2, successes); }
    double w_mean() const { return ratio(sum_w, cycles); }
    double w_second() const { return ratio(sum_w2, cycles); }
    double t_hat_mean() const { return ratio(sum_t_hat, successes); }

private:
    template <class A, class B>
    static double ratio(A a, B b)
    {
        return b == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : static_cast<double>(a) / static_cast<double>(b);
    }
};

/// Simulates one trial. Age accounting at each device opens at the first
/// update it receives after warm-up; only complete cycles are counted.
inline TrialStats run_trial(const SimConfig& cfg, std::uint32_t trial_index, const CycleSink& sink = {})
{
    validate(cfg);
    const SystemParams& p = cfg.params;
    const int n = p.n_devices();
    const ServiceStream stream(cfg.seed, trial_index, p.rate(), p.shift());

    struct Device {
        bool open = false;
        detail::Clock last_generation; ///< generation time of the freshest held update
        detail::Clock cycle_start;
        double xs_prev = 0.0;
        double w = 0.0;
        std::uint64_t m = 0;
        double area = 0.0;
    };
    std::vector<Device> dev(static_cast<std::size_t>(n));
    std::vector<double> draws(static_cast<std::size_t>(n));
    std::vector<double> scratch(static_cast<std::size_t>(n));

    CompensatedSum<double> xs, xs2, xf, xf2, t_hat, w, w2, area, length;
    TrialStats st;
    detail::Clock now; // generation time of the current update

    for (std::uint64_t j = 0; j < cfg.n_updates; ++j) {
        for (int d = 0; d < n; ++d) {
            draws[static_cast<std::size_t>(d)] = stream.draw(j, static_cast<std::uint32_t>(d));
        }
        const auto r = detail::resolve_update(p, draws, scratch);
        const double tau = r.termination;
        detail::Clock end = now;
        end.advance(tau);

        if (j < cfg.warmup_updates) {
            now = end;
            continue;
        }

        for (int d = 0; d < n; ++d) {
            Device& s = dev[static_cast<std::size_t>(d)];
            const double t = draws[static_cast<std::size_t>(d)];
            const bool got = t <= tau;
            ++st.pairs;
            if (got) {
                ++st.successes;
                st.successes_quorum += r.served ? 1 : 0;
                xs += tau;
                xs2 += tau * tau;
                t_hat += t;
            } else {
                ++st.failures;
                st.failures_deadline += r.served ? 0 : 1;
                xf += tau;
                xf2 += tau * tau;
            }

            if (!s.open) {
                if (got) {
                    s.open = true;
                    s.last_generation = now;
                    s.cycle_start = end;
                    s.xs_prev = tau;
                }
                continue;
            }

            const double age = now - s.last_generation; // age when this update starts
            ++s.m;
            if (!got) {
                s.area += age * tau + 0.5 * tau * tau;
                s.w += tau;
                continue;
            }

            // Age climbs from `age` until reception at t, then from t up to tau.
            s.area += (age * t + 0.5 * t * t) + 0.5 * (tau * tau - t * t);
            const double cycle_len = end - s.cycle_start;
            const double decomposed = (s.xs_prev + s.w) * t + (2.0 * s.xs_prev + s.w) * s.w / 2.0 +
                                      0.5 * tau * tau;
            st.max_area_rel_dev =
                std::max(st.max_area_rel_dev, std::abs(s.area - decomposed) / decomposed);
            st.max_length_rel_dev =
                std::max(st.max_length_rel_dev, std::abs(cycle_len - (s.w + tau)) / cycle_len);

            ++st.cycles;
            w += s.w;
            w2 += s.w * s.w;
            area += s.area;
            length += cycle_len;
            if (d == 0) {
                if (st.m_histogram.size() <= s.m) {
                    st.m_histogram.resize(s.m + 1, 0);
                }
                ++st.m_histogram[s.m];
            }
            if (sink) {
                sink(CycleRecord{trial_index, d, s.m, s.w, s.xs_prev, tau, t, s.area, cycle_len});
            }

            s.last_generation = now;
            s.cycle_start = end;
            s.xs_prev = tau;
            s.w = 0.0;
            s.m = 0;
            s.area = 0.0;
        }
        now = end;
    }

    st.sum_xs = xs.value();
    st.sum_xs2 = xs2.value();
    st.sum_xf = xf.value();
    st.sum_xf2 = xf2.value();
    st.sum_t_hat = t_hat.value();
    st.sum_w = w.value();
    st.sum_w2 = w2.value();
    st.sum_area = area.value();
    st.sum_length = length.value();
    return st;
}

/// Point estimate with a normal-approximation 95% interval across trials.
/// With a single trial the spread is unknown and both widths are NaN.
struct Interval {
    double point = 0.0;
    double half_width_95 = 0.0;
    double std_error = 0.0;

    bool contains(double x) const { return std::abs(x - point) <= half_width_95; }
};

struct SimEstimate {
    Interval avg_aoi;
    Interval p_success;
    Interval p_f2;
    Interval p_s1;
    Interval xf_mean;
    Interval xf_second;
    Interval xs_mean;
    Interval xs_second;
    Interval w_mean;
    Interval w_second;
    Interval t_hat_mean;
    std::uint64_t n_effective_cycles = 0; ///< cycles per device, summed over trials
    std::uint32_t n_trials = 0;
    double max_area_rel_dev = 0.0;
    double max_length_rel_dev = 0.0;
    std::vector<std::uint64_t> m_histogram; ///< device 0, merged over trials
};

inline Interval summarize(std::span<const double> values)
{
    const auto n = values.size();
    CompensatedSum<double> sum;
    for (double v : values) {
        sum += v;
    }
    Interval out;
    out.point = sum.value() / static_cast<double>(n);
    if (n < 2) {
        out.half_width_95 = out.std_error = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    CompensatedSum<double> sq;
    for (double v : values) {
        sq += (v - out.point) * (v - out.point);
    }
    const double sd = std::sqrt(sq.value() / static_cast<double>(n - 1));
    out.std_error = sd / std::sqrt(static_cast<double>(n));
    out.half_width_95 = 1.96 * out.std_error;
    return out;
}

/// Runs every trial and reduces them in trial order. Results depend only on
/// the config, never on `threads`. Trials run sequentially when a sink is set
/// so that records arrive in (trial, time) order.
inline SimEstimate estimate(const SimConfig& cfg, unsigned threads = 1, const CycleSink& sink = {})
{
    validate(cfg);
    std::vector<TrialStats> trials(cfg.n_trials);
    if (sink || threads <= 1 || cfg.n_trials == 1) {
        for (std::uint32_t i = 0; i < cfg.n_trials; ++i) {
            trials[i] = run_trial(cfg, i, sink);
        }
    } else {
        std::atomic<std::uint32_t> next{0};
        std::vector<std::jthread> pool;
        const unsigned workers = std::min<unsigned>(threads, cfg.n_trials);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint32_t i = next++; i < cfg.n_trials; i = next++) {
                    trials[i] = run_trial(cfg, i);
                }
            });
        }
    }

    SimEstimate est;
    est.n_trials = cfg.n_trials;
    std::vector<double> v(cfg.n_trials);
    auto field = [&](double (TrialStats::*get)() const) {
        for (std::size_t i = 0; i < trials.size(); ++i) {
            v[i] = (trials[i].*get)();
        }
        return summarize(v);
    };
    est.avg_aoi = field(&TrialStats::avg_aoi);
    est.p_success = field(&TrialStats::p_success);
    est.p_f2 = field(&TrialStats::p_f2);
    est.p_s1 = field(&TrialStats::p_s1);
    est.xf_mean = field(&TrialStats::xf_mean);
    est.xf_second = field(&TrialStats::xf_second);
    est.xs_mean = field(&TrialStats::xs_mean);
    est.xs_second = field(&TrialStats::xs_second);
    est.w_mean = field(&TrialStats::w_mean);
    est.w_second = field(&TrialStats::w_second);
    est.t_hat_mean = field(&TrialStats::t_hat_mean);

    std::uint64_t cycles = 0;
    for (const auto& t : trials) {
        cycles += t.cycles;
        est.max_area_rel_dev = std::max(est.max_area_rel_dev, t.max_area_rel_dev);
        est.max_length_rel_dev = std::max(est.max_length_rel_dev, t.max_length_rel_dev);
        if (est.m_histogram.size() < t.m_histogram.size()) {
            est.m_histogram.resize(t.m_histogram.size(), 0);
        }
        for (std::size_t m = 0; m < t.m_histogram.size(); ++m) {
            est.m_histogram[m] += t.m_histogram[m];
        }
    }
    est.n_effective_cycles = cycles / static_cast<std::uint64_t>(cfg.params.n_devices());
    return est;
}

} // namespace mcaoi
