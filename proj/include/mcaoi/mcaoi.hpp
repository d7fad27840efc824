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

#include "mcaoi/error.hpp"
#include "mcaoi/params.hpp"
#include "mcaoi/numeric.hpp"
#include "mcaoi/orderstats.hpp"
#include "mcaoi/quadrature.hpp"
#include "mcaoi/renewal.hpp"
#include "mcaoi/philox.hpp"
#include "mcaoi/simulator.hpp"
#include "mcaoi/optimize.hpp"
#include "mcaoi/serialize.hpp"

namespace mcaoi {

inline constexpr const char* kVersion = "1.0.0";

/// Identifiers of the formula variants the closed forms implement, recorded
/// in run manifests.
inline constexpr const char* kFormulaVariants[] = {
    "tnk-second-moment:with-plus-one",
    "service-cdf-tail:V_hj-shifted-exponent",
    "p_f2-numerator:sum-Z_h-unscaled",
};

} // namespace mcaoi
