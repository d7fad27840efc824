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

#include <cmath>
#include <limits>

#include "mcaoi/error.hpp"
#include "mcaoi/numeric.hpp"
#include "mcaoi/orderstats.hpp"
#include "mcaoi/params.hpp"

namespace mcaoi {

/// When 1 - P(C_S) falls below this, the tagged device never fails: W is
/// identically zero and the failure-conditioned quantities are undefined.
inline constexpr double kFailureFree = 1e-12;

/// Every expectation feeding the average age, for one parameter point.
/// Quantities whose conditioning event has vanishing probability are NaN.
struct AnalyticBreakdown {
    RawParams params;
    double p_success = 0.0;  ///< P(C_S)
    double p_f2 = 0.0;       ///< P(deadline fired | device failed)
    double p_s1 = 0.0;       ///< P(quorum fired | device received)
    double xf_mean = 0.0;
    double xf_second = 0.0;
    double xs_mean = 0.0;
    double xs_second = 0.0;
    double w_mean = 0.0;
    double w_second = 0.0;
    double m_mean = 0.0;     ///< E[M] = 1/P(C_S)
    double t_hat_mean = 0.0; ///< mean service time of received updates
    double avg_aoi = 0.0;
    double cond_mean = 0.0;  ///< E[T_N(K) | T_N(K) < T_D]
    double cond_second = 0.0;
    bool failure_free = false;
};

namespace detail {

template <class Real>
Real nan()
{
    return std::numeric_limits<Real>::quiet_NaN();
}

template <class Real>
void require_table(const SystemParams& p, const CoeffTable<Real>& t, int h_max)
{
    if (t.n() != p.n_devices() || t.h_max() < h_max) {
        throw Error(ErrorCode::InvalidConfig, "coefficient table does not match the parameters");
    }
}

} // namespace detail

/// P(C_S) = (1/N) Σ_{h<=K} (1 - Z_h).
template <class Real>
Real prob_success(const SystemParams& p, const CoeffTable<Real>& t)
{
    detail::require_table(p, t, p.k_quorum());
    CompensatedSum<Real> s;
    for (int h = 1; h <= p.k_quorum(); ++h) {
        s += Real(1) - t.z(h);
    }
    return s.value() / Real(p.n_devices());
}

/// P(C_{F,2}): the deadline fired, given that the tagged device failed.
///
/// Numerator  N P(T_N(K) > T_D, T_n > T_D) = (N-K) Z_K + Σ_{h<=K} Z_h
/// Denominator N P(T_n > min(T_D, T_N(K))) = N e^{-rate (T_D-c)} + (N-K) - Σ_{h>K} Z_h
template <class Real>
Real prob_f2(const SystemParams& p, const CoeffTable<Real>& t)
{
    const int n = p.n_devices();
    const int k = p.k_quorum();
    detail::require_table(p, t, n);
    if (!p.has_deadline()) {
        if (n == k) {
            throw Error(ErrorCode::DegenerateConditioning, "no deadline and K = N: a device never fails");
        }
        return Real(0);
    }
    using std::exp;
    CompensatedSum<Real> num(Real(n - k) * t.z(k));
    for (int h = 1; h <= k; ++h) {
        num += t.z(h);
    }
    const Real tail = exp(-Real(p.rate()) * (Real(p.deadline().value()) - Real(p.shift())));
    CompensatedSum<Real> den(Real(n) * tail);
    den += Real(n - k);
    for (int h = k + 1; h <= n; ++h) {
        den += -t.z(h);
    }
    if (!(den.value() > Real(n) * Real(kFailureFree))) {
        throw Error(ErrorCode::DegenerateConditioning, "failure probability underflows");
    }
    return num.value() / den.value();
}

/// P(C_{S,1}) = K (1 - Z_K) / (N P(C_S)).
template <class Real>
Real prob_s1(const SystemParams& p, const CoeffTable<Real>& t)
{
    const Real ps = prob_success(p, t);
    if (!(ps > Real(0))) {
        throw Error(ErrorCode::DegenerateConditioning, "success probability is zero");
    }
    return Real(p.k_quorum()) * (Real(1) - t.z(p.k_quorum())) / (Real(p.n_devices()) * ps);
}

/// Moments of the inter-generation time after an update the device missed:
/// T_N(K) when the quorum fired first, T_D when the deadline did.
template <class Real>
Moments<Real> xf_moments(const SystemParams& p, const CoeffTable<Real>& t)
{
    const Real pf2 = prob_f2(p, t);
    const auto partial = partial_moments_tnk(p, t);
    const int n = p.n_devices();
    const int k = p.k_quorum();
    // P(C_{F,1}) / (1 - Z_K) = (N - K) / (N P(fail)), which no longer needs 1 - Z_K > 0.
    const Real fail = Real(1) - prob_success(p, t);
    const Real weight = Real(n - k) / (Real(n) * fail);
    Moments<Real> m{weight * partial.mean, weight * partial.second};
    if (p.has_deadline()) {
        const Real td(p.deadline().value());
        m.mean += pf2 * td;
        m.second += pf2 * td * td;
    }
    return m;
}

/// Moments of the inter-generation time after an update the device received.
template <class Real>
Moments<Real> xs_moments(const SystemParams& p, const CoeffTable<Real>& t)
{
    const Real ps = prob_success(p, t);
    if (!(ps > Real(0))) {
        throw Error(ErrorCode::DegenerateConditioning, "success probability is zero");
    }
    const auto partial = partial_moments_tnk(p, t);
    // P(C_{S,1}) / (1 - Z_K) = K / (N P(C_S)).
    const Real weight = Real(p.k_quorum()) / (Real(p.n_devices()) * ps);
    Moments<Real> m{weight * partial.mean, weight * partial.second};
    if (p.has_deadline()) {
        const Real ps2 = Real(1) - prob_s1(p, t);
        const Real td(p.deadline().value());
        m.mean += ps2 * td;
        m.second += ps2 * td * td;
    }
    return m;
}

/// Moments of W, the sum of M-1 failed inter-generation times, with M
/// geometric on {1, 2, ...} of parameter P(C_S).
template <class Real>
Moments<Real> w_moments(Real p_success, const Moments<Real>& xf)
{
    if (!(p_success > Real(0)) || p_success > Real(1)) {
        throw Error(ErrorCode::InvalidConfig, "success probability must lie in (0, 1]");
    }
    if (Real(1) - p_success < Real(kFailureFree)) {
        return {Real(0), Real(0)};
    }
    const Real m_mean = Real(1) / p_success;
    const Real m_var = (Real(1) - p_success) / (p_success * p_success);
    const Real xf_var = xf.second - xf.mean * xf.mean;
    const Real w_mean = (m_mean - Real(1)) * xf.mean;
    const Real w_var = xf.mean * xf.mean * m_var + xf_var * (m_mean - Real(1));
    return {w_mean, w_mean * w_mean + w_var};
}

/// Mean service time of the updates the tagged device receives.
template <class Real>
Real t_hat_mean(const SystemParams& p, const CoeffTable<Real>& t)
{
    const Real ps = prob_success(p, t);
    if (!(ps > Real(0))) {
        throw Error(ErrorCode::DegenerateConditioning, "success probability is zero");
    }
    const Real rate(p.rate());
    const Real c(p.shift());
    CompensatedSum<Real> s;
    for (int h = 1; h <= p.k_quorum(); ++h) {
        for (int j = 0; j < h; ++j) {
            const Real a = rate * Real(t.u(h, j));
            Real term = c * a + Real(1);
            if (p.has_deadline()) {
                term -= t.v(h, j) * (a * Real(p.deadline().value()) + Real(1));
            }
            s += t.b(h, j) * term / (a * Real(t.u(h, j)));
        }
    }
    return s.value() / (Real(p.n_devices()) * ps);
}

/// Renewal-reward ratio E[A]/E[Y] from its parts.
template <class Real>
Real aoi_from_parts(const Moments<Real>& w, const Moments<Real>& xs, Real t_hat)
{
    const Real num =
        w.second + Real(2) * (t_hat + xs.mean) * w.mean + Real(2) * xs.mean * t_hat + xs.second;
    return num / (Real(2) * w.mean + Real(2) * xs.mean);
}

/// Closed-form average age of information with every intermediate quantity.
template <class Real = quad>
AnalyticBreakdown average_aoi(const SystemParams& p)
{
    const auto t = build_coeffs<Real>(p, p.n_devices());
    AnalyticBreakdown out;
    out.params = p.raw();

    const Real ps = prob_success(p, t);
    if (!(ps > Real(0))) {
        throw Error(ErrorCode::DegenerateConditioning, "success probability is zero");
    }
    const Real ps1 = prob_s1(p, t);
    const auto xs = xs_moments(p, t);
    const Real th = t_hat_mean(p, t);

    out.failure_free = Real(1) - ps < Real(kFailureFree);
    Moments<Real> w{Real(0), Real(0)};
    Real pf2 = detail::nan<Real>();
    Moments<Real> xf{detail::nan<Real>(), detail::nan<Real>()};
    if (!out.failure_free) {
        pf2 = prob_f2(p, t);
        xf = xf_moments(p, t);
        w = w_moments(ps, xf);
    }

    const Real mass = Real(1) - t.z(p.k_quorum());
    if (mass >= Real(kDegenerateConditioning)) {
        const auto cond = cond_moments_tnk(p, t);
        out.cond_mean = static_cast<double>(cond.mean);
        out.cond_second = static_cast<double>(cond.second);
    } else {
        out.cond_mean = out.cond_second = std::numeric_limits<double>::quiet_NaN();
    }

    out.p_success = static_cast<double>(ps);
    out.p_f2 = static_cast<double>(pf2);
    out.p_s1 = static_cast<double>(ps1);
    out.xf_mean = static_cast<double>(xf.mean);
    out.xf_second = static_cast<double>(xf.second);
    out.xs_mean = static_cast<double>(xs.mean);
    out.xs_second = static_cast<double>(xs.second);
    out.w_mean = static_cast<double>(w.mean);
    out.w_second = static_cast<double>(w.second);
    out.m_mean = static_cast<double>(Real(1) / ps);
    out.t_hat_mean = static_cast<double>(th);
    out.avg_aoi = static_cast<double>(aoi_from_parts(w, xs, th));
    return out;
}

} // namespace mcaoi
