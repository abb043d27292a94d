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

#include <random>

#include <gtest/gtest.h>

#include "qhl/assert.hpp"
#include "qhl/parse.hpp"
#include "qhl/transport.hpp"
#include "support.hpp"

using namespace qhl;

namespace {

Povd addm_output() {
    const Program p = load_program(oracle::source_path("cases/addm.qimp"));
    return eval(p, point_povd(p.layout(), {})).out;
}

/// Classical distribution over x = 0..k-1 with integer weights w_j / W.
Povd classical_povd(const std::vector<int> &w) {
    int total = 0;
    for (int x : w) {
        total += x;
    }
    Povd mu;
    mu.layout = QubitLayout{"a"};
    for (size_t j = 0; j < w.size(); j++) {
        mu.branches.push_back({ClassicalState{{"x", (int64_t)j}}, double(w[j]) / total, zero_state(mu.layout)});
    }
    coalesce(mu);
    return mu;
}

/// Gale's condition: every set of components demands no more than the mass of the states allowed to feed it.
bool hall_feasible(const std::vector<double> &supply, const std::vector<double> &demand,
                   const std::vector<std::vector<bool>> &allowed) {
    const size_t m = demand.size();
    for (size_t s = 1; s < (size_t{1} << m); s++) {
        double need = 0, have = 0;
        for (size_t i = 0; i < m; i++) {
            if (s >> i & 1) {
                need += demand[i];
            }
        }
        for (size_t g = 0; g < supply.size(); g++) {
            bool reach = false;
            for (size_t i = 0; i < m; i++) {
                reach = reach || ((s >> i & 1) && allowed[g][i]);
            }
            if (reach) {
                have += supply[g];
            }
        }
        if (need > have + 1e-12) {
            return false;
        }
    }
    // Every state must also ship all of its mass somewhere.
    for (size_t g = 0; g < supply.size(); g++) {
        bool any = false;
        for (size_t i = 0; i < m; i++) {
            any = any || allowed[g][i];
        }
        if (!any && supply[g] > 0) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(Assert, AddmHalfSplitSatisfied) {
    const Verdict v = satisfies(addm_output(), parse_dist("1/2 (v = 1) (+) 1/2 (v /= 1)"));
    EXPECT_EQ(v.status, Verdict::Status::Satisfied);
    EXPECT_TRUE(v.exact);
}

TEST(Assert, AddmThreeQuarterSplitRefuted) {
    const Verdict v = satisfies(addm_output(), parse_dist("3/4 (v = 1) (+) 1/4 (v /= 1)"));
    EXPECT_EQ(v.status, Verdict::Status::Refuted);
}

TEST(Assert, AddmProbabilities) {
    const Povd mu = addm_output();
    EXPECT_NEAR(probability_of(mu, parse_formula("v = 1")).value, 0.5, 1e-9);
    EXPECT_NEAR(probability_of(mu, parse_formula("v = 0")).value, 0.25, 1e-9);
    EXPECT_NEAR(probability_of(mu, parse_formula("v = 2 /\\ v0 = 1")).value, 0.25, 1e-9);
}

TEST(Assert, ComplementProbabilities) {
    const Povd mu = addm_output();
    for (const char *f : {"v = 1", "v0 = v1", "|1>_{q0}", "|0>_{q0} /\\ v = 0", "v >= 1 -> v1 = 1"}) {
        const FormulaPtr a = parse_formula(f);
        const Probability p = probability_of(mu, a), q = probability_of(mu, fx::negate(a));
        EXPECT_EQ(p.decisive, q.decisive) << f;
        EXPECT_NEAR(p.value + q.value, 1.0, 1e-9) << f;
    }
}

TEST(Assert, WitnessIsValid) {
    const Povd mu = addm_output();
    const Dist d = parse_dist("1/4 (v0 = 0) (+) 1/2 (v = 1 \\/ v = 2) (+) 1/4 (v = 0)");
    const Verdict v = satisfies(mu, d);
    ASSERT_EQ(v.status, Verdict::Status::Satisfied);
    const auto support = mu.support();
    ASSERT_EQ(v.assignment.size(), support.size());
    std::vector<double> col(d.comps.size(), 0);
    for (size_t g = 0; g < support.size(); g++) {
        double row = 0;
        for (size_t i = 0; i < d.comps.size(); i++) {
            const double f = v.assignment[g][i];
            EXPECT_GE(f, -1e-12);
            row += f;
            col[i] += f;
            if (f > 1e-12) {
                EXPECT_TRUE(sat_state(d.comps[i], support[g], povd_density(mu, support[g])))
                    << support[g].str() << " sent to " << to_string(d.comps[i]);
            }
        }
        EXPECT_NEAR(row, v.piece_mass[g], 1e-9);
    }
    for (size_t i = 0; i < d.comps.size(); i++) {
        EXPECT_NEAR(col[i], boost::rational_cast<double>(d.weights[i]) * mu.mass(), 1e-9);
    }
}

TEST(Assert, OplusMonotone) {
    const Povd mu = addm_output();
    std::mt19937_64 rng(31);
    const char *atoms[] = {"v = 0", "v = 1", "v = 2", "v0 = 1", "v1 = 0", "v >= 1", "true"};
    std::uniform_int_distribution<int> pick(0, 6), num(1, 3);
    int satisfied = 0;
    for (int trial = 0; trial < 300; trial++) {
        const int a = pick(rng), b = pick(rng), wa = num(rng), wb = num(rng);
        const std::string w = std::to_string(wa) + "/" + std::to_string(wa + wb);
        const std::string w2 = std::to_string(wb) + "/" + std::to_string(wa + wb);
        const Dist weighted = parse_dist(w + " (" + atoms[a] + ") (+) " + w2 + " (" + atoms[b] + ")");
        const Dist plain = parse_dist(std::string("(") + atoms[a] + ") (+) (" + atoms[b] + ")");
        if (satisfies(mu, weighted).status == Verdict::Status::Satisfied) {
            satisfied++;
            EXPECT_EQ(satisfies(mu, plain).status, Verdict::Status::Satisfied) << to_string(weighted);
        }
    }
    EXPECT_GT(satisfied, 0);
}

TEST(Assert, TransportMatchesHallOracle) {
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<int> nb(1, 8), nc(1, 3), w(1, 6), val(0, 7), op(0, 3);
    const char *ops[] = {"<=", ">=", "=", "/="};
    int agree = 0, refuted = 0;
    for (int trial = 0; trial < 400; trial++) {
        std::vector<int> ws(nb(rng));
        for (auto &x : ws) {
            x = w(rng);
        }
        const Povd mu = classical_povd(ws);
        const int m = nc(rng);
        std::vector<int> cw(m);
        int ctotal = 0;
        for (auto &x : cw) {
            x = w(rng);
            ctotal += x;
        }
        std::vector<FormulaPtr> comps;
        std::vector<Rational> weights;
        for (int i = 0; i < m; i++) {
            comps.push_back(parse_formula("x " + std::string(ops[op(rng)]) + " " + std::to_string(val(rng))));
            weights.push_back(Rational(cw[i], ctotal));
        }
        const Dist d = Dist::weighted(weights, comps);

        std::vector<double> supply, demand;
        std::vector<std::vector<bool>> allowed;
        const auto support = mu.support();
        for (const auto &s : support) {
            supply.push_back(povd_density(mu, s).mat.trace().real());
            std::vector<bool> row;
            for (const auto &c : comps) {
                row.push_back(eval_pure(c->pure, s));
            }
            allowed.push_back(row);
        }
        for (int i = 0; i < m; i++) {
            demand.push_back(double(cw[i]) / ctotal);
        }
        const bool oracle = hall_feasible(supply, demand, allowed);
        const Verdict v = satisfies(mu, d);
        ASSERT_NE(v.status, Verdict::Status::NotProven) << to_string(d);
        EXPECT_EQ(v.status == Verdict::Status::Satisfied, oracle) << to_string(d);
        agree += (v.status == Verdict::Status::Satisfied) == oracle;
        refuted += !oracle;
    }
    EXPECT_GT(refuted, 0);
    EXPECT_GT(agree, 0);
}

TEST(Assert, TransportSolverExactOnRationalData) {
    const TransportResult t = solve_transport({0.25, 0.75}, {0.5, 0.5}, {{true, true}, {true, true}});
    EXPECT_TRUE(t.feasible);
    EXPECT_TRUE(t.exact);
    const TransportResult u = solve_transport({0.25, 0.75}, {0.5, 0.5}, {{true, false}, {true, false}});
    EXPECT_FALSE(u.feasible);
}

TEST(Assert, RecoverRational) {
    const auto r = recover_rational(0.375);
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(*r, BigRational(3, 8));
    EXPECT_FALSE(recover_rational(M_PI / 10, 1000).has_value());
}

TEST(Assert, QuantumComponentOnMixedStateIsNotRefuted) {
    // Two branches at the same classical state: |0> and |1>. No single ket describes the mixture.
    Povd mu;
    mu.layout = QubitLayout{"a"};
    mu.branches.push_back({{}, 0.5, basis_state(mu.layout, 0)});
    mu.branches.push_back({{}, 0.5, basis_state(mu.layout, 1)});
    coalesce(mu);
    EXPECT_EQ(satisfies(mu, parse_dist("1/2 (|0>_{a}) (+) 1/2 (|1>_{a})")).status, Verdict::Status::Satisfied);
    EXPECT_NE(satisfies(mu, parse_dist("|+>_{a}")).status, Verdict::Status::Refuted);
}

TEST(Assert, EmptyDistributionSatisfiesEverything) {
    Povd mu;
    mu.layout = QubitLayout{"a"};
    EXPECT_EQ(satisfies(mu, parse_dist("false")).status, Verdict::Status::Satisfied);
}
