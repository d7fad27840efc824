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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mcaoi/error.hpp"
#include "mcaoi/numeric.hpp"
#include "mcaoi/params.hpp"

namespace mcaoi {

/// Largest N for which the alternating coefficient series are evaluated.
/// Coefficients stay exact in 64-bit integers and the quad-precision series
/// keep Σ_j B_{h,j}/U_{h,j} = 1 well inside 1e-10 up to this size.
inline constexpr int kStabilityLimit = 30;

/// Below this, P(T_N(K) < T_D) is treated as zero and conditioning on it fails.
inline constexpr double kDegenerateConditioning = 1e-14;

template <class Real>
struct Moments {
    Real mean{};
    Real second{};
};

/// Order-statistic coefficients for h = 1..h_max, j = 0..h-1:
///   B_{h,j} = h C(N,h) C(h-1,j) (-1)^j
///   U_{h,j} = N - h + 1 + j
///   V_{h,j} = exp(-rate U_{h,j} (T_D - c))   (zero without a deadline)
///   Z_h     = Σ_j B_{h,j} V_{h,j} / U_{h,j} = P(T_N(h) > T_D)
template <class Real>
class CoeffTable {
public:
    CoeffTable(int n, int h_max)
        : n_(n), h_max_(h_max), b_(tri(h_max + 1)), u_(tri(h_max + 1)), v_(tri(h_max + 1)),
          z_(static_cast<std::size_t>(h_max) + 1)
    {
    }

    int n() const noexcept { return n_; }
    int h_max() const noexcept { return h_max_; }

    const Real& b(int h, int j) const { return b_[index(h, j)]; }
    int u(int h, int j) const { return u_[index(h, j)]; }
    const Real& v(int h, int j) const { return v_[index(h, j)]; }
    const Real& z(int h) const { return z_[static_cast<std::size_t>(h)]; }

    Real& b(int h, int j) { return b_[index(h, j)]; }
    int& u(int h, int j) { return u_[index(h, j)]; }
    Real& v(int h, int j) { return v_[index(h, j)]; }
    Real& z(int h) { return z_[static_cast<std::size_t>(h)]; }

private:
    static std::size_t tri(int h) { return static_cast<std::size_t>(h) * (h - 1) / 2; }
    static std::size_t index(int h, int j) { return tri(h) + static_cast<std::size_t>(j); }

    int n_;
    int h_max_;
    std::vector<Real> b_;
    std::vector<int> u_;
    std::vector<Real> v_;
    std::vector<Real> z_;
};

namespace detail {

/// Signed B_{h,j}, exact for N <= kStabilityLimit.
inline std::int64_t b_coefficient(int n, int h, int j)
{
    const auto mag = static_cast<std::int64_t>(h) *
                     static_cast<std::int64_t>(binomial(static_cast<unsigned>(n), static_cast<unsigned>(h))) *
                     static_cast<std::int64_t>(binomial(static_cast<unsigned>(h - 1), static_cast<unsigned>(j)));
    return (j % 2 == 0) ? mag : -mag;
}

inline void check_stability(int n)
{
    if (n > kStabilityLimit) {
        throw Error(ErrorCode::OverflowRisk, "N=" + std::to_string(n) +
                                                 " exceeds the validated stability limit of " +
                                                 std::to_string(kStabilityLimit));
    }
}

} // namespace detail

template <class Real = quad>
CoeffTable<Real> build_coeffs(const SystemParams& p, int h_max)
{
    const int n = p.n_devices();
    detail::check_stability(n);
    if (h_max < 1 || h_max > n) {
        throw Error(ErrorCode::InvalidConfig, "h_max must lie in 1..N");
    }
    CoeffTable<Real> t(n, h_max);
    const Real rate(p.rate());
    const Real window = p.has_deadline() ? Real(p.deadline().value()) - Real(p.shift()) : Real(0);
    for (int h = 1; h <= h_max; ++h) {
        CompensatedSum<Real> z;
        for (int j = 0; j < h; ++j) {
            t.b(h, j) = Real(detail::b_coefficient(n, h, j));
            t.u(h, j) = n - h + 1 + j;
            if (p.has_deadline()) {
                using std::exp;
                t.v(h, j) = exp(-rate * Real(t.u(h, j)) * window);
            } else {
                t.v(h, j) = Real(0);
            }
            z += t.b(h, j) * t.v(h, j) / Real(t.u(h, j));
        }
        t.z(h) = z.value();
    }
    return t;
}

/// Σ_j B_{h,j}/U_{h,j}; equals one for every h.
template <class Real>
Real alternating_identity(const CoeffTable<Real>& t, int h)
{
    CompensatedSum<Real> s;
    for (int j = 0; j < h; ++j) {
        s += t.b(h, j) / Real(t.u(h, j));
    }
    return s.value();
}

/// P(T_N(k) <= t) from the binomial tail Σ_{i>=k} C(N,i) F^i (1-F)^{N-i}.
inline double order_stat_cdf(const SystemParams& p, int k, double t)
{
    if (k < 1 || k > p.n_devices()) {
        throw Error(ErrorCode::QuorumOutOfRange, "order statistic index out of 1..N");
    }
    if (!(t > p.shift())) {
        return 0.0;
    }
    if (std::isinf(t)) {
        return 1.0;
    }
    const int n = p.n_devices();
    const double x = p.rate() * (t - p.shift());
    const double log_f = std::log(-std::expm1(-x)); // log F_T(t)
    const double log_sf = -x;                       // log (1 - F_T(t))
    CompensatedSum<double> lower, upper;
    for (int i = 0; i <= n; ++i) {
        const double log_c = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
        const double term = std::exp(log_c + i * log_f + (n - i) * log_sf);
        (i < k ? lower : upper) += term;
    }
    // Near 1 the complement of the small lower tail keeps the CDF monotone to the last bit.
    const double up = upper.value();
    return up < 0.5 ? up : std::clamp(1.0 - lower.value(), 0.0, 1.0);
}

/// P(T_N(k) <= t) from the integrated density series 1 - Σ_j B_{k,j} e^{-rate U (t-c)} / U.
template <class Real = quad>
Real order_stat_cdf_series(const SystemParams& p, int k, double t)
{
    if (k < 1 || k > p.n_devices()) {
        throw Error(ErrorCode::QuorumOutOfRange, "order statistic index out of 1..N");
    }
    detail::check_stability(p.n_devices());
    if (!(t > p.shift())) {
        return Real(0);
    }
    if (std::isinf(t)) {
        return Real(1);
    }
    using std::exp;
    const int n = p.n_devices();
    const Real x = Real(p.rate()) * (Real(t) - Real(p.shift()));
    CompensatedSum<Real> s;
    for (int j = 0; j < k; ++j) {
        const int u = n - k + 1 + j;
        s += Real(detail::b_coefficient(n, k, j)) * exp(-x * Real(u)) / Real(u);
    }
    return Real(1) - s.value();
}

/// E[T_N(K); T_N(K) < T_D] and E[T_N(K)^2; T_N(K) < T_D], i.e. the moments
/// over the truncated support without dividing by its mass 1 - Z_K.
template <class Real>
Moments<Real> partial_moments_tnk(const SystemParams& p, const CoeffTable<Real>& t)
{
    const int k = p.k_quorum();
    if (t.h_max() < k) {
        throw Error(ErrorCode::InvalidConfig, "coefficient table does not reach K");
    }
    const Real rate(p.rate());
    const Real c(p.shift());
    CompensatedSum<Real> first;
    CompensatedSum<Real> second;
    for (int j = 0; j < k; ++j) {
        const Real a = rate * Real(t.u(k, j)); // rate * U_{K,j}
        const Real lead = Real(1) + c * a;
        Real first_term = lead;
        Real second_term = lead * lead + Real(1);
        if (p.has_deadline()) {
            const Real tail = Real(1) + Real(p.deadline().value()) * a;
            first_term -= tail * t.v(k, j);
            second_term -= (tail * tail + Real(1)) * t.v(k, j);
        }
        first += t.b(k, j) * first_term / (a * Real(t.u(k, j)));
        second += t.b(k, j) * second_term / (a * a * Real(t.u(k, j)));
    }
    return {first.value(), second.value()};
}

/// E[T_N(K) | T_N(K) < T_D] and E[T_N(K)^2 | T_N(K) < T_D].
///
/// The device's rank is independent of the order-statistic values, so the
/// same moments hold whether the tagged device failed (rank > K) or
/// succeeded (rank <= K) while the quorum beat the deadline. Without a
/// deadline the conditioning event is sure and the unconditional moments
/// come back.
template <class Real>
Moments<Real> cond_moments_tnk(const SystemParams& p, const CoeffTable<Real>& t)
{
    const auto partial = partial_moments_tnk(p, t);
    const Real mass = Real(1) - t.z(p.k_quorum());
    if (!(mass >= Real(kDegenerateConditioning))) {
        throw Error(ErrorCode::DegenerateConditioning,
                    "P(T_N(K) < T_D) underflows; K receptions before the deadline are essentially impossible");
    }
    return {partial.mean / mass, partial.second / mass};
}

template <class Real = quad>
Moments<Real> cond_moments_tnk(const SystemParams& p)
{
    return cond_moments_tnk(p, build_coeffs<Real>(p, p.k_quorum()));
}

} // namespace mcaoi
