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

// Test-only reference computations. Nothing here touches the library's
// coefficient series or its Philox streams: draws come from std::mt19937_64
// and probabilities from plain counting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

struct Counts {
    std::uint64_t n = 0;
    std::uint64_t hits = 0;

    double p() const { return static_cast<double>(hits) / static_cast<double>(n); }
    double se() const { return std::sqrt(p() * (1.0 - p()) / static_cast<double>(n)); }
};

struct Mean {
    std::uint64_t n = 0;
    double sum = 0.0;
    double sum2 = 0.0;

    void add(double x)
    {
        ++n;
        sum += x;
        sum2 += x * x;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double se() const
    {
        const double m = mean();
        return std::sqrt((sum2 / static_cast<double>(n) - m * m) / static_cast<double>(n));
    }
};

/// Brute-force replay of independent updates, tallying device 0's view.
struct UpdateTally {
    Counts kth_after_deadline; ///< T_N(K) > T_D
    Counts kth_before_t;       ///< T_N(K) <= t_probe
    Counts device_received;    ///< T_0 <= min(T_D, T_N(K))
    Counts failed_by_deadline; ///< among failures at device 0: T_D < T_N(K)
    Mean t_hat;                ///< T_0 among receptions
    Mean kth;                  ///< T_N(K), unconditional
};

inline UpdateTally tally_updates(int n, int k, double rate, double shift, double deadline, double t_probe,
                                 std::uint64_t updates, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::exponential_distribution<double> expo(rate);
    std::vector<double> t(static_cast<std::size_t>(n));
    std::vector<double> sorted(t.size());
    UpdateTally out;
    for (std::uint64_t u = 0; u < updates; ++u) {
        for (auto& x : t) {
            x = shift + expo(gen);
        }
        sorted = t;
        std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
        const double kth = sorted[static_cast<std::size_t>(k - 1)];
        const double stop = std::min(deadline, kth);
        const bool received = t[0] <= stop;

        ++out.kth_after_deadline.n;
        out.kth_after_deadline.hits += kth > deadline;
        ++out.kth_before_t.n;
        out.kth_before_t.hits += kth <= t_probe;
        ++out.device_received.n;
        out.device_received.hits += received;
        if (received) {
            out.t_hat.add(t[0]);
        } else {
            ++out.failed_by_deadline.n;
            out.failed_by_deadline.hits += deadline < kth;
        }
        out.kth.add(kth);
    }
    return out;
}

} // namespace oracle
