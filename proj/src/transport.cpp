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

#include "qhl/transport.hpp"

#include <cmath>

namespace qhl {

std::optional<BigRational> recover_rational(double x, long long max_den, double tol) {
    if (!std::isfinite(x)) {
        return std::nullopt;
    }
    // Continued-fraction convergents of x until one lands within tol.
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; it++) {
        const double a = std::floor(r);
        if (std::abs(a) > 1e15) {
            break;
        }
        const long long ai = (long long)a;
        const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs((double)h1 / (double)k1 - x) <= tol) {
            return BigRational(h1, k1);
        }
        const double frac = r - a;
        if (frac < 1e-15) {
            break;
        }
        r = 1.0 / frac;
    }
    return std::nullopt;
}

template <typename T>
static std::vector<std::vector<double>> solve(const std::vector<T> &supply, const std::vector<T> &demand,
                                              const std::vector<std::vector<bool>> &allowed, const T &eps, T &shipped) {
    const int ng = (int)supply.size(), ni = (int)demand.size();
    const int s = ng + ni, t = s + 1;
    MaxFlow<T> mf(ng + ni + 2);
    T total(0);
    for (const auto &x : supply) {
        total += x;
    }
    for (int g = 0; g < ng; g++) {
        mf.add_edge(s, g, supply[g]);
    }
    std::vector<std::vector<int>> ids(ng, std::vector<int>(ni, -1));
    for (int g = 0; g < ng; g++) {
        for (int i = 0; i < ni; i++) {
            if (allowed[g][i]) {
                ids[g][i] = mf.add_edge(g, ng + i, total);
            }
        }
    }
    for (int i = 0; i < ni; i++) {
        mf.add_edge(ng + i, t, demand[i]);
    }
    shipped = mf.run(s, t, eps);
    std::vector<std::vector<double>> flow(ng, std::vector<double>(ni, 0.0));
    for (int g = 0; g < ng; g++) {
        for (int i = 0; i < ni; i++) {
            if (ids[g][i] >= 0) {
                flow[g][i] = static_cast<double>(mf.flow(ids[g][i]));
            }
        }
    }
    return flow;
}

TransportResult solve_transport(const std::vector<double> &supply, const std::vector<double> &demand,
                                const std::vector<std::vector<bool>> &allowed, double tol) {
    TransportResult res;
    std::vector<BigRational> sq, dq;
    bool exact = true;
    for (double x : supply) {
        auto r = recover_rational(x);
        if (!r) {
            exact = false;
            break;
        }
        sq.push_back(*r);
    }
    for (double x : demand) {
        if (!exact) {
            break;
        }
        auto r = recover_rational(x);
        if (!r) {
            exact = false;
            break;
        }
        dq.push_back(*r);
    }
    if (exact) {
        BigRational ts(0), td(0);
        for (const auto &x : sq) {
            ts += x;
        }
        for (const auto &x : dq) {
            td += x;
        }
        exact = ts == td;
        if (exact) {
            BigRational shipped;
            res.flow = solve<BigRational>(sq, dq, allowed, BigRational(0), shipped);
            res.exact = true;
            res.feasible = shipped == ts;
            return res;
        }
    }
    double total = 0, want = 0;
    for (double x : supply) {
        total += x;
    }
    for (double x : demand) {
        want += x;
    }
    double shipped = 0;
    res.flow = solve<double>(supply, demand, allowed, 1e-15, shipped);
    res.feasible = std::abs(total - want) <= tol * (1 + total) && total - shipped <= tol * (1 + total);
    return res;
}

}  // namespace qhl
