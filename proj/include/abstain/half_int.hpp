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

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace abstain {

/// An angular-momentum quantum number (j or m) stored as twice its value, so
/// half-integers are exact.
class HalfInt {
   public:
    constexpr HalfInt() = default;

    static constexpr HalfInt from_twice(std::int64_t twice) { return HalfInt(twice); }
    static constexpr HalfInt from_int(std::int64_t value) { return HalfInt(2 * value); }

    constexpr std::int64_t twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double value() const { return 0.5 * static_cast<double>(twice_); }

    /// 2j + 1, the dimension of a spin-j irrep.
    constexpr std::int64_t dimension() const { return twice_ + 1; }

    constexpr HalfInt operator+(HalfInt other) const { return HalfInt(twice_ + other.twice_); }
    constexpr HalfInt operator-(HalfInt other) const { return HalfInt(twice_ - other.twice_); }
    constexpr HalfInt operator-() const { return HalfInt(-twice_); }
    constexpr HalfInt &operator+=(HalfInt other) {
        twice_ += other.twice_;
        return *this;
    }

    constexpr auto operator<=>(const HalfInt &) const = default;

    std::string str() const {
        if (is_integer()) {
            return std::to_string(twice_ / 2);
        }
        return std::to_string(twice_) + "/2";
    }

   private:
    constexpr explicit HalfInt(std::int64_t twice) : twice_(twice) {}

    std::int64_t twice_ = 0;
};

inline std::ostream &operator<<(std::ostream &out, HalfInt h) { return out << h.str(); }

/// Smallest total angular momentum of N spin-1/2 systems: 0 for even N, 1/2 for odd N.
constexpr HalfInt j_min(std::int64_t copies) { return HalfInt::from_twice(copies % 2); }

/// Largest total angular momentum J = N/2.
constexpr HalfInt j_max(std::int64_t copies) { return HalfInt::from_twice(copies); }

/// Number of blocks j_min, j_min + 1, ..., J.
constexpr std::int64_t block_count(std::int64_t copies) { return copies / 2 + 1; }

/// Block j at position `index` counted from j_min.
constexpr HalfInt block_at(std::int64_t copies, std::int64_t index) {
    return HalfInt::from_twice(copies % 2 + 2 * index);
}

/// Position of block j counted from j_min. Throws std::domain_error when j is not
/// a valid block of N copies.
inline std::int64_t block_index(std::int64_t copies, HalfInt j) {
    if (j < j_min(copies) || j > j_max(copies) || (j.twice() - copies) % 2 != 0) {
        throw std::domain_error("j = " + j.str() + " is not a block of N = " + std::to_string(copies) + " qubits");
    }
    return (j.twice() - copies % 2) / 2;
}

}  // namespace abstain
