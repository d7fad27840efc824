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

// Numerical-integration oracle for the closed forms. Every density here is
// built from the non-alternating product form of the order-statistic law,
// so nothing in this file shares arithmetic with the coefficient series.

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mcaoi/error.hpp"
#include "mcaoi/orderstats.hpp"
#include "mcaoi/params.hpp"

namespace mcaoi {

inline constexpr double kQuadratureTolerance = 1e-12;

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (61 points) over [a, b]; b may be +inf.
/// Throws QuadratureNonConvergence unless the error estimate is within
/// kQuadratureTolerance of the integral's L1 norm.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, unsigned max_depth = 15)
{
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, max_depth, kQuadratureTolerance, &error, &l1);
    if (!std::isfinite(value) || error > kQuadratureTolerance * std::max(l1, 1e-300)) {
        throw Error(ErrorCode::QuadratureNonConvergence,
                    "error estimate " + std::to_string(error) + " against L1 " + std::to_string(l1));
    }
    return {value, error};
}

namespace detail {

inline double log_binomial(int n, int k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// log F_T(t), log(1 - F_T(t)) for t > c.
inline std::pair<double, double> log_cdf_sf(const SystemParams& p, double t)
{
    const double x = p.rate() * (t - p.shift());
    return {std::log(-std::expm1(-x)), -x};
}

} // namespace detail

inline double service_density(const SystemParams& p, double t)
{
    return t > p.shift() ? p.rate() * std::exp(-p.rate() * (t - p.shift())) : 0.0;
}

/// k C(N,k) F^{k-1} (1-F)^{N-k} f_T(t).
inline double order_stat_density(const SystemParams& p, int k, double t)
{
    if (!(t > p.shift())) {
        return (k == 1 && t == p.shift()) ? p.n_devices() * p.rate() : 0.0;
    }
    const int n = p.n_devices();
    const auto [log_f, log_sf] = detail::log_cdf_sf(p, t);
    const double log_pdf = std::log(static_cast<double>(k)) + detail::log_binomial(n, k) +
                           (k - 1) * log_f + (n - k) * log_sf + std::log(p.rate()) + log_sf;
    return std::exp(log_pdf);
}

/// f_T(t) times the probability that at most K-1 of the other N-1 devices
/// finish before t: the joint density of (T_n = t, tagged device ranks <= K).
inline double rank_conditioned_density(const SystemParams& p, double t)
{
    if (!(t > p.shift())) {
        return 0.0;
    }
    const int n = p.n_devices();
    const int k = p.k_quorum();
    const auto [log_f, log_sf] = detail::log_cdf_sf(p, t);
    CompensatedSum<double> lower_tail;
    for (int i = 0; i < k && i <= n - 1; ++i) {
        lower_tail += std::exp(detail::log_binomial(n - 1, i) + i * log_f + (n - 1 - i) * log_sf);
    }
    return service_density(p, t) * std::min(1.0, lower_tail.value());
}

/// Moments of T_N(K) restricted to [c, T_D], normalized by the integrated mass.
inline Moments<double> quadrature_moments_tnk(const SystemParams& p)
{
    if (!p.has_deadline()) {
        throw Error(ErrorCode::InvalidConfig, "quadrature oracle needs a finite deadline");
    }
    const int k = p.k_quorum();
    const double lo = p.shift();
    const double hi = p.deadline().value();
    const auto mass = integrate([&](double t) { return order_stat_density(p, k, t); }, lo, hi);
    if (!(mass.value >= kDegenerateConditioning)) {
        throw Error(ErrorCode::DegenerateConditioning, "integrated mass below threshold");
    }
    const auto first = integrate([&](double t) { return t * order_stat_density(p, k, t); }, lo, hi);
    const auto second =
        integrate([&](double t) { return t * t * order_stat_density(p, k, t); }, lo, hi);
    return {first.value / mass.value, second.value / mass.value};
}

/// P(C_S) by integrating the rank-conditioned density over [c, T_D].
inline double quadrature_prob_success(const SystemParams& p)
{
    return integrate([&](double t) { return rank_conditioned_density(p, t); }, p.shift(),
                     p.deadline().value())
        .value;
}

/// E[T_n | device n receives], by direct integration.
inline double quadrature_t_hat_mean(const SystemParams& p)
{
    const double lo = p.shift();
    const double hi = p.deadline().value();
    const auto mass = integrate([&](double t) { return rank_conditioned_density(p, t); }, lo, hi);
    const auto first =
        integrate([&](double t) { return t * rank_conditioned_density(p, t); }, lo, hi);
    return first.value / mass.value;
}

} // namespace mcaoi
