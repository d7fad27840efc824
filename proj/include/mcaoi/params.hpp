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
#include <limits>
#include <optional>
#include <string>

#include "mcaoi/error.hpp"

namespace mcaoi {

/// Hard service deadline. Infinite means no deadline at all.
class Deadline {
public:
    static constexpr Deadline infinite() noexcept { return Deadline{}; }
    static constexpr Deadline at(double t) noexcept { return Deadline{t}; }

    /// Maps +inf onto the infinite deadline; NaN stays finite-and-invalid.
    static constexpr Deadline from_double(double t) noexcept
    {
        return t == std::numeric_limits<double>::infinity() ? infinite() : at(t);
    }

    constexpr bool is_finite() const noexcept { return value_.has_value(); }

    /// +inf for the infinite deadline.
    constexpr double value() const noexcept
    {
        return value_ ? *value_ : std::numeric_limits<double>::infinity();
    }

    friend constexpr bool operator==(const Deadline&, const Deadline&) = default;

private:
    constexpr Deadline() = default;
    constexpr explicit Deadline(double t) : value_(t) {}

    std::optional<double> value_;
};

/// Unchecked parameter tuple as it arrives from flags or config files.
struct RawParams {
    std::int64_t n_devices = 0;
    std::int64_t k_quorum = 0;
    double rate = 0.0;
    double shift = 0.0;
    Deadline deadline = Deadline::infinite();
};

/// Validated (N, K, rate, shift, deadline). Immutable once built.
class SystemParams {
public:
    int n_devices() const noexcept { return n_; }
    int k_quorum() const noexcept { return k_; }
    double rate() const noexcept { return rate_; }
    double shift() const noexcept { return shift_; }
    Deadline deadline() const noexcept { return deadline_; }
    bool has_deadline() const noexcept { return deadline_.is_finite(); }

    RawParams raw() const noexcept { return {n_, k_, rate_, shift_, deadline_}; }

    /// Copies with one field replaced, re-validated.
    SystemParams with_deadline(Deadline d) const;
    SystemParams with_quorum(std::int64_t k) const;
    SystemParams with_rate(double rate) const;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;

private:
    friend SystemParams validate(const RawParams& raw);

    SystemParams(int n, int k, double rate, double shift, Deadline d)
        : n_(n), k_(k), rate_(rate), shift_(shift), deadline_(d)
    {
    }

    int n_;
    int k_;
    double rate_;
    double shift_;
    Deadline deadline_;
};

inline SystemParams validate(const RawParams& raw)
{
    if (raw.n_devices < 1 || raw.k_quorum < 1 || raw.k_quorum > raw.n_devices ||
        raw.n_devices > std::numeric_limits<int>::max()) {
        throw Error(ErrorCode::QuorumOutOfRange,
                    "need 1 <= K <= N, got N=" + std::to_string(raw.n_devices) +
                        " K=" + std::to_string(raw.k_quorum));
    }
    if (!(raw.rate > 0.0) || !std::isfinite(raw.rate)) {
        throw Error(ErrorCode::NonPositiveRate, "rate must be positive and finite");
    }
    if (!(raw.shift > 0.0) || !std::isfinite(raw.shift)) {
        throw Error(ErrorCode::NonPositiveShift, "shift must be positive and finite");
    }
    if (raw.deadline.is_finite() && !(raw.deadline.value() > raw.shift)) {
        throw Error(ErrorCode::DeadlineNotAboveShift,
                    "finite deadline must exceed the shift, otherwise no device can receive");
    }
    return SystemParams(static_cast<int>(raw.n_devices), static_cast<int>(raw.k_quorum), raw.rate,
                        raw.shift, raw.deadline);
}

inline SystemParams SystemParams::with_deadline(Deadline d) const
{
    auto r = raw();
    r.deadline = d;
    return validate(r);
}

inline SystemParams SystemParams::with_quorum(std::int64_t k) const
{
    auto r = raw();
    r.k_quorum = k;
    return validate(r);
}

inline SystemParams SystemParams::with_rate(double rate) const
{
    auto r = raw();
    r.rate = rate;
    return validate(r);
}

} // namespace mcaoi
