// Copyright 2026 The qhl Authors
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

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace boost {

// Boost's mixed rational/integer equality recurses forever under C++20 rewritten comparisons;
// exact overloads win overload resolution and compare through rational == rational.
#define QHL_RATIONAL_EQ(T)                                                                     \
    inline bool operator==(const rational<long long> &a, T b) {                                \
        return a.operator==(rational<long long>(b));                                           \
    }                                                                                          \
    inline bool operator==(T a, const rational<long long> &b) {                                \
        return b.operator==(rational<long long>(a));                                           \
    }                                                                                          \
    inline bool operator!=(const rational<long long> &a, T b) {                                \
        return !(a == b);                                                                      \
    }                                                                                          \
    inline bool operator!=(T a, const rational<long long> &b) {                                \
        return !(b == a);                                                                      \
    }
QHL_RATIONAL_EQ(int)
QHL_RATIONAL_EQ(long long)
#undef QHL_RATIONAL_EQ

}  // namespace boost

namespace qhl {

typedef boost::rational<long long> Rational;

/// Raised by partial integer operations: division by zero, overflow, bad modulus.
struct ArithError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Total map from classical variables to integers; unmentioned variables read as 0.
class ClassicalState {
   public:
    ClassicalState() = default;
    ClassicalState(std::initializer_list<std::pair<const std::string, int64_t>> init);

    int64_t get(const std::string &x) const;
    /// Zero values are erased so equal states compare equal.
    void set(const std::string &x, int64_t v);
    ClassicalState with(const std::string &x, int64_t v) const;
    const std::map<std::string, int64_t> &entries() const {
        return vals_;
    }
    bool operator==(const ClassicalState &o) const {
        return vals_ == o.vals_;
    }
    bool operator<(const ClassicalState &o) const {
        return vals_ < o.vals_;
    }
    std::string str() const;

   private:
    std::map<std::string, int64_t> vals_;
};

namespace arith {

int64_t add(int64_t a, int64_t b);
int64_t sub(int64_t a, int64_t b);
int64_t mul(int64_t a, int64_t b);
int64_t neg(int64_t a);
/// Floor division.
int64_t div(int64_t a, int64_t b);
/// Floor modulus: result has the sign of b, in [0, b) for b > 0.
int64_t mod(int64_t a, int64_t b);
/// a^e mod m for e >= 0, m >= 1; result in [0, m).
int64_t pow_mod(int64_t a, int64_t e, int64_t m);
/// Nonnegative gcd; gcd(0, 0) = 0.
int64_t gcd(int64_t a, int64_t b);
/// Denominator recovered from z/two_t by continued fractions, bounded by `bound`.
int64_t cf_denom(int64_t z, int64_t two_t, int64_t bound);
/// Least r >= 1 with x^r = 1 (mod n).
int64_t ord(int64_t x, int64_t n);
bool divides(int64_t a, int64_t b);

}  // namespace arith

}  // namespace qhl
