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

#include <random>

#include <gtest/gtest.h>

#include "mcaoi/params.hpp"

using namespace mcaoi;

namespace {

ErrorCode code_of(const RawParams& r)
{
    try {
        validate(r);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a validation error";
    return ErrorCode::InvalidConfig;
}

} // namespace

TEST(Params, ReferenceSetupIsValid)
{
    const auto p = validate({10, 7, 1.0 / 3.0, 0.1, Deadline::at(3.0)});
    EXPECT_EQ(p.n_devices(), 10);
    EXPECT_EQ(p.k_quorum(), 7);
    EXPECT_TRUE(p.has_deadline());
    EXPECT_DOUBLE_EQ(p.deadline().value(), 3.0);
}

TEST(Params, UnicastWithoutDeadlineIsValid)
{
    const auto p = validate({1, 1, 1.0, 0.1, Deadline::infinite()});
    EXPECT_FALSE(p.has_deadline());
    EXPECT_TRUE(std::isinf(p.deadline().value()));
}

TEST(Params, Errors)
{
    EXPECT_EQ(code_of({10, 7, 1.0 / 3.0, 0.1, Deadline::at(0.05)}), ErrorCode::DeadlineNotAboveShift);
    EXPECT_EQ(code_of({10, 7, 1.0 / 3.0, 0.1, Deadline::at(0.1)}), ErrorCode::DeadlineNotAboveShift);
    EXPECT_EQ(code_of({10, 11, 1.0, 0.1, Deadline::at(3)}), ErrorCode::QuorumOutOfRange);
    EXPECT_EQ(code_of({10, 0, 1.0, 0.1, Deadline::at(3)}), ErrorCode::QuorumOutOfRange);
    EXPECT_EQ(code_of({0, 0, 1.0, 0.1, Deadline::at(3)}), ErrorCode::QuorumOutOfRange);
    EXPECT_EQ(code_of({10, 7, 0.0, 0.1, Deadline::at(3)}), ErrorCode::NonPositiveRate);
    EXPECT_EQ(code_of({10, 7, -1.0, 0.1, Deadline::at(3)}), ErrorCode::NonPositiveRate);
    EXPECT_EQ(code_of({10, 7, std::nan(""), 0.1, Deadline::at(3)}), ErrorCode::NonPositiveRate);
    EXPECT_EQ(code_of({10, 7, 1.0, 0.0, Deadline::at(3)}), ErrorCode::NonPositiveShift);
    EXPECT_EQ(code_of({10, 7, 1.0, 0.1, Deadline::at(std::nan(""))}), ErrorCode::DeadlineNotAboveShift);
}

TEST(Params, DeadlineFromDoubleMapsInfinity)
{
    EXPECT_EQ(Deadline::from_double(std::numeric_limits<double>::infinity()), Deadline::infinite());
    EXPECT_TRUE(Deadline::from_double(2.0).is_finite());
}

TEST(Params, ValidateIsIdempotent)
{
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> n_dist(1, 30);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const int n = n_dist(gen);
        const int k = std::uniform_int_distribution<int>(1, n)(gen);
        const double c = 0.01 + unit(gen);
        const auto d = unit(gen) < 0.2 ? Deadline::infinite() : Deadline::at(c + 0.01 + 10 * unit(gen));
        const auto p = validate({n, k, 0.1 + 5 * unit(gen), c, d});
        EXPECT_EQ(validate(p.raw()), p);
    }
}

// Random points in a box straddling the valid region: validate accepts a
// point if and only if it satisfies every invariant.
TEST(Params, RejectsExactlyTheInvalidComplement)
{
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> int_dist(-2, 12);
    std::uniform_real_distribution<double> real_dist(-1.0, 3.0);
    int accepted = 0;
    int rejected = 0;
    for (int i = 0; i < 20000; ++i) {
        const RawParams r{int_dist(gen), int_dist(gen), real_dist(gen), real_dist(gen),
                          real_dist(gen) < 0.0 ? Deadline::infinite() : Deadline::at(real_dist(gen))};
        const bool ok = r.n_devices >= 1 && r.k_quorum >= 1 && r.k_quorum <= r.n_devices && r.rate > 0 &&
                        r.shift > 0 && (!r.deadline.is_finite() || r.deadline.value() > r.shift);
        bool threw = false;
        try {
            validate(r);
        } catch (const Error& e) {
            threw = true;
            EXPECT_TRUE(is_validation_error(e.code()));
        }
        EXPECT_EQ(ok, !threw);
        (ok ? accepted : rejected) += 1;
    }
    EXPECT_GT(accepted, 100);
    EXPECT_GT(rejected, 100);
}

TEST(Params, WithersRevalidate)
{
    const auto p = validate({10, 7, 0.5, 0.1, Deadline::at(3.0)});
    EXPECT_EQ(p.with_quorum(3).k_quorum(), 3);
    EXPECT_FALSE(p.with_deadline(Deadline::infinite()).has_deadline());
    EXPECT_THROW(p.with_deadline(Deadline::at(0.1)), Error);
    EXPECT_THROW(p.with_quorum(11), Error);
}
