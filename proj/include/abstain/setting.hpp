// Copyright 2026 The abstain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "abstain/half_int.hpp"

namespace abstain {

/// Raised when an iterative method fails to converge or a computation leaves
/// the representable range.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// N copies of a qubit depolarized to Bloch-vector length r.
class EstimationSetting {
   public:
    EstimationSetting(std::int64_t copies, double purity) : copies_(copies), purity_(purity) {
        if (copies < 1) {
            throw std::domain_error("number of copies must be positive, got " + std::to_string(copies));
        }
        if (!(purity >= 0.0 && purity <= 1.0)) {
            throw std::domain_error("purity must lie in [0, 1], got " + std::to_string(purity));
        }
    }

    static EstimationSetting from_error_probability(std::int64_t copies, double eta) {
        return EstimationSetting(copies, 1.0 - 4.0 * eta / 3.0);
    }

    std::int64_t copies() const { return copies_; }
    double purity() const { return purity_; }
    HalfInt top_block() const { return j_max(copies_); }
    HalfInt bottom_block() const { return j_min(copies_); }
    std::int64_t block_count() const { return abstain::block_count(copies_); }

    bool is_pure() const { return purity_ == 1.0; }
    bool is_fully_mixed() const { return purity_ == 0.0; }

    /// R = (1 + r)/(1 - r); infinite for r = 1.
    double ratio() const {
        if (is_pure()) {
            return std::numeric_limits<double>::infinity();
        }
        return (1.0 + purity_) / (1.0 - purity_);
    }

    /// atanh(r) = (log R)/2, the natural variable for the block sums.
    double rapidity() const { return std::atanh(purity_); }

    /// Depolarizing error probability eta = (3/4)(1 - r).
    double error_probability() const { return 0.75 * (1.0 - purity_); }

   private:
    std::int64_t copies_;
    double purity_;
};

}  // namespace abstain
