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
#include <cstdint>

#include <boost/multiprecision/float128.hpp>

namespace mcaoi {

/// Scalar used for the alternating closed-form series.
using quad = boost::multiprecision::float128;

/// Neumaier-compensated running sum.
template <class Real>
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(Real init) : sum_(init) {}

    CompensatedSum& operator+=(const Real& x)
    {
        using std::abs;
        const Real t = sum_ + x;
        if (abs(sum_) >= abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    CompensatedSum& operator+=(const CompensatedSum& other)
    {
        *this += other.sum_;
        *this += other.comp_;
        return *this;
    }

    Real value() const { return sum_ + comp_; }

private:
    Real sum_{0};
    Real comp_{0};
};

/// Exact binomial coefficient; callers keep n small enough that it fits.
constexpr std::uint64_t binomial(unsigned n, unsigned k) noexcept
{
    if (k > n) {
        return 0;
    }
    if (k > n - k) {
        k = n - k;
    }
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        // r * (n - k + i) is divisible by i at every step.
        r = r * (n - k + i) / i;
    }
    return r;
}

} // namespace mcaoi
