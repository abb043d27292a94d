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

#include "qhl/classical.hpp"

#include <cstdlib>
#include <numeric>
#include <vector>

namespace qhl {

ClassicalState::ClassicalState(std::initializer_list<std::pair<const std::string, int64_t>> init) {
    for (const auto &[k, v] : init) {
        set(k, v);
    }
}

int64_t ClassicalState::get(const std::string &x) const {
    auto it = vals_.find(x);
    return it == vals_.end() ? 0 : it->second;
}

void ClassicalState::set(const std::string &x, int64_t v) {
    if (v == 0) {
        vals_.erase(x);
    } else {
        vals_[x] = v;
    }
}

ClassicalState ClassicalState::with(const std::string &x, int64_t v) const {
    ClassicalState s = *this;
    s.set(x, v);
    return s;
}

std::string ClassicalState::str() const {
    std::string s = "{";
    bool first = true;
    for (const auto &[k, v] : vals_) {
        if (!first) {
            s += ", ";
        }
        first = false;
        s += k + "=" + std::to_string(v);
    }
    return s + "}";
}

namespace arith {

int64_t add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw ArithError("integer overflow in +");
    }
    return r;
}

int64_t sub(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) {
        throw ArithError("integer overflow in -");
    }
    return r;
}

int64_t mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw ArithError("integer overflow in *");
    }
    return r;
}

int64_t neg(int64_t a) {
    return sub(0, a);
}

int64_t div(int64_t a, int64_t b) {
    if (b == 0) {
        throw ArithError("division by zero");
    }
    if (a == INT64_MIN && b == -1) {
        throw ArithError("integer overflow in div");
    }
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        q -= 1;
    }
    return q;
}

int64_t mod(int64_t a, int64_t b) {
    if (b == 0) {
        throw ArithError("modulus by zero");
    }
    if (b == -1) {
        return 0;
    }
    int64_t r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) {
        r += b;
    }
    return r;
}

int64_t pow_mod(int64_t a, int64_t e, int64_t m) {
    if (m < 1) {
        throw ArithError("pow_mod: modulus must be positive");
    }
    if (e < 0) {
        throw ArithError("pow_mod: negative exponent");
    }
    __int128 base = mod(a, m);
    __int128 r = 1 % m;
    while (e > 0) {
        if (e & 1) {
            r = (r * base) % m;
        }
        base = (base * base) % m;
        e >>= 1;
    }
    return (int64_t)r;
}

int64_t gcd(int64_t a, int64_t b) {
    if (a == INT64_MIN || b == INT64_MIN) {
        throw ArithError("gcd: operand out of range");
    }
    return std::gcd(std::llabs(a), std::llabs(b));
}

int64_t cf_denom(int64_t z, int64_t two_t, int64_t bound) {
    if (two_t <= 0) {
        throw ArithError("cf_denom: denominator must be positive");
    }
    if (z == 0) {
        return 1;
    }
    const Rational x(z, two_t);
    // Convergents h/k of the expansion of x; keep the last one that passes the 1/(2k^2) test.
    long long h_prev = 1, h = x.numerator() / x.denominator();
    long long k_prev = 0, k = 1;
    if (x.numerator() < 0 && x.numerator() % x.denominator() != 0) {
        h -= 1;
    }
    Rational rest = x - Rational(h);
    int64_t best = 1;
    auto qualifies = [&](long long hh, long long kk) {
        if (kk > bound) {
            return false;
        }
        Rational diff = Rational(hh, kk) - x;
        if (diff < 0) {
            diff = -diff;
        }
        return diff < Rational(1, 2 * kk * kk);
    };
    bool any = false;
    if (qualifies(h, k)) {
        best = k;
        any = true;
    }
    while (rest != 0) {
        Rational inv = 1 / rest;
        long long a = inv.numerator() / inv.denominator();
        rest = inv - Rational(a);
        long long h_next = a * h + h_prev;
        long long k_next = a * k + k_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        if (k > bound) {
            break;
        }
        if (qualifies(h, k)) {
            best = k;
            any = true;
        }
    }
    return any ? best : 1;
}

int64_t ord(int64_t x, int64_t n) {
    if (n < 2) {
        throw ArithError("ord: modulus must be at least 2");
    }
    if (gcd(x, n) != 1) {
        throw ArithError("ord: arguments are not coprime");
    }
    const int64_t xm = mod(x, n);
    int64_t acc = xm;
    for (int64_t r = 1; r <= n; r++) {
        if (acc == 1) {
            return r;
        }
        acc = (int64_t)(((__int128)acc * xm) % n);
    }
    throw ArithError("ord: no order found");
}

bool divides(int64_t a, int64_t b) {
    if (a == 0) {
        return b == 0;
    }
    return mod(b, a) == 0;
}

}  // namespace arith

}  // namespace qhl
