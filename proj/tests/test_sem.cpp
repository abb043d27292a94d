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

#include <map>
#include <random>

#include <gtest/gtest.h>

#include "qhl/classical.hpp"
#include "qhl/parse.hpp"
#include "qhl/sem.hpp"
#include "support.hpp"

using namespace qhl;

TEST(Sem, AddmTable) {
    const Program p = load_program(oracle::source_path("cases/addm.qimp"));
    const EvalResult r = eval(p, point_povd(p.layout(), {}));
    ASSERT_EQ(r.out.branches.size(), 4u);
    std::map<std::pair<int64_t, int64_t>, double> w;
    for (const auto &b : r.out.branches) {
        EXPECT_EQ(b.sigma.get("v"), b.sigma.get("v0") + b.sigma.get("v1"));
        w[{b.sigma.get("v0"), b.sigma.get("v1")}] += b.weight;
        // Post-measurement state is the measured basis state.
        const uint64_t idx = (uint64_t)(b.sigma.get("v0") * 2 + b.sigma.get("v1"));
        EXPECT_NEAR(std::abs(b.psi.amp(idx)), 1.0, 1e-12);
    }
    for (const auto &[k, v] : w) {
        EXPECT_NEAR(v, 0.25, 1e-9);
    }
    EXPECT_NEAR(r.out.mass(), 1.0, 1e-12);
}

TEST(Sem, SampleFrequenciesMatchExhaustiveWeights) {
    // Chi-square over the three values of v with 2 degrees of freedom; 3σ corresponds to 13.8.
    const Program p = load_program(oracle::source_path("cases/addm.qimp"));
    const int trials = 10000;
    std::map<int64_t, int> counts;
    for (int s = 0; s < trials; s++) {
        EvalConfig cfg;
        cfg.mode = EvalMode::Sample;
        cfg.seed = (uint64_t)s;
        const SampleResult r = sample_run(p, p.body, {}, zero_state(p.layout()), cfg);
        ASSERT_EQ(r.status, RunStatus::Terminated);
        counts[r.sigma.get("v")]++;
    }
    const std::map<int64_t, double> expect{{0, 0.25}, {1, 0.5}, {2, 0.25}};
    double chi2 = 0;
    for (const auto &[v, pr] : expect) {
        const double e = pr * trials;
        chi2 += (counts[v] - e) * (counts[v] - e) / e;
    }
    EXPECT_LT(chi2, 13.8);
}

TEST(Sem, SampleRunIsSeedDeterministic) {
    const Program p = load_program(oracle::source_path("cases/shor.qimp"));
    EvalConfig cfg;
    cfg.mode = EvalMode::Sample;
    cfg.seed = 17;
    const SampleResult a = sample_run(p, p.body, ClassicalState{{"N", 15}}, zero_state(p.layout()), cfg);
    const SampleResult b = sample_run(p, p.body, ClassicalState{{"N", 15}}, zero_state(p.layout()), cfg);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_EQ(a.psi.amp, b.psi.amp);
}

TEST(Sem, LinearityOnRandomPrograms) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 100; i++) {
        const std::string text = oracle::random_program(rng);
        const Program p = parse_program(text);
        const Povd m0 = oracle::random_povd(p.layout(), rng), m1 = oracle::random_povd(p.layout(), rng);
        const double w = unit(rng);
        const Povd lhs = eval(p, povd_mix({{w, m0}, {1 - w, m1}})).out;
        const Povd rhs = povd_mix({{w, eval(p, m0).out}, {1 - w, eval(p, m1).out}});
        EXPECT_LE(oracle::density_distance(lhs, oracle::to_density_map(rhs), (int)p.qubits.size()), 1e-9) << text;
    }
}

TEST(Sem, MeasurementMatchesDensityOracle) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 150; i++) {
        const std::string text = oracle::random_program(rng);
        const Program p = parse_program(text);
        const Povd mu = oracle::random_povd(p.layout(), rng);
        const Povd out = eval(p, mu).out;
        const auto ref = oracle::oracle_run(p, p.body, oracle::to_density_map(mu));
        EXPECT_LE(oracle::density_distance(out, ref, (int)p.qubits.size()), 1e-9) << text;
        EXPECT_LE(out.mass(), mu.mass() + 1e-9);
    }
}

TEST(Sem, TwoQubitMeasurementOracle) {
    // Bell state measured jointly: outcomes 0 and 3 with weight 1/2.
    const Program p = parse_program("qubit a, b\nmeasurement M = std(2)\nH[a];\nCNOT[a, b];\nx := M[a, b]\n");
    const Povd out = eval(p, point_povd(p.layout(), {})).out;
    ASSERT_EQ(out.branches.size(), 2u);
    EXPECT_EQ(out.branches[0].sigma.get("x"), 0);
    EXPECT_EQ(out.branches[1].sigma.get("x"), 3);
    EXPECT_NEAR(out.branches[0].weight, 0.5, 1e-12);
}

TEST(Sem, MassMonotoneWithLoopsAndAbort) {
    const char *programs[] = {
        "qubit a\nmeasurement M = std(1)\nx := 1;\nwhile x = 1 do H[a]; x := M[a] od\n",
        "qubit a\nmeasurement M = std(1)\nH[a];\nx := M[a];\nif x = 1 then abort else skip fi\n",
        "qubit a\nx := 1 div 0\n",
    };
    std::mt19937_64 rng(23);
    for (const char *text : programs) {
        const Program p = parse_program(text);
        for (int i = 0; i < 20; i++) {
            const Povd mu = oracle::random_povd(p.layout(), rng);
            EXPECT_LE(eval(p, mu).out.mass(), mu.mass() + 1e-9) << text;
        }
    }
}

TEST(Sem, LoopApproximationMonotone) {
    const Program p = parse_program("qubit a\nmeasurement M = std(1)\nx := 1;\nwhile x = 1 do H[a]; x := M[a] od\n");
    double prev = -1;
    for (int n = 1; n <= 30; n++) {
        EvalConfig cfg;
        cfg.max_iter = n;
        const EvalResult r = eval(p, point_povd(p.layout(), {}), cfg);
        EXPECT_GE(r.out.mass() + 1e-15, prev) << n;
        EXPECT_NEAR(r.out.mass() + r.stats.residual, 1.0, 1e-9);
        prev = r.out.mass();
    }
}

TEST(Sem, DivergingLoopReportsResidual) {
    const Program p = load_program(oracle::source_path("cases/diverge.qimp"));
    EvalConfig cfg;
    cfg.max_iter = 50;
    const EvalResult r = eval(p, point_povd(p.layout(), {}), cfg);
    EXPECT_NEAR(r.out.mass(), 0.0, 1e-12);
    EXPECT_NEAR(r.stats.residual, 1.0, 1e-12);
    EXPECT_FALSE(r.stats.warnings.empty());
}

TEST(Sem, RandomSplitsUniformly) {
    const Program p = parse_program("qubit a\nx := random(2, 5)\n");
    const Povd out = eval(p, point_povd(p.layout(), {})).out;
    ASSERT_EQ(out.branches.size(), 4u);
    for (const auto &b : out.branches) {
        EXPECT_NEAR(b.weight, 0.25, 1e-12);
    }
}

TEST(Sem, ArithmeticErrorAborts) {
    const Program p = parse_program("qubit a\nx := 1 div 0\n");
    const EvalResult r = eval(p, point_povd(p.layout(), {}));
    EXPECT_NEAR(r.out.mass(), 0.0, 1e-12);
    EXPECT_NEAR(r.stats.aborted, 1.0, 1e-12);
}

TEST(Sem, ExhaustiveEvalIsDeterministic) {
    const Program p = load_program(oracle::source_path("cases/of.qimp"));
    const Povd in = point_povd(p.layout(), ClassicalState{{"N", 15}, {"x", 7}});
    const EvalResult a = eval(p, in), b = eval(p, in);
    ASSERT_EQ(a.out.branches.size(), b.out.branches.size());
    for (size_t i = 0; i < a.out.branches.size(); i++) {
        EXPECT_EQ(a.out.branches[i].sigma, b.out.branches[i].sigma);
        EXPECT_EQ(a.out.branches[i].weight, b.out.branches[i].weight);
    }
}

TEST(Sem, ForallIsWindowed) {
    bool windowed = false;
    EXPECT_TRUE(eval_pure(parse_pure("forall k. k * k >= 0"), {}, {}, &windowed));
    EXPECT_TRUE(windowed);
}

TEST(Arith, Values) {
    EXPECT_EQ(arith::pow_mod(7, 4, 15), 1);
    EXPECT_EQ(arith::pow_mod(7, 0, 1), 0);
    EXPECT_EQ(arith::gcd(-12, 18), 6);
    EXPECT_EQ(arith::gcd(0, 0), 0);
    EXPECT_EQ(arith::ord(7, 15), 4);
    EXPECT_EQ(arith::ord(2, 15), 4);
    EXPECT_EQ(arith::mod(-7, 3), 2);
    EXPECT_EQ(arith::div(-7, 2), -4);
    EXPECT_THROW(arith::div(1, 0), ArithError);
    EXPECT_THROW(arith::mul(INT64_MAX, 2), ArithError);
    EXPECT_TRUE(arith::divides(3, 15));
}

TEST(Arith, ContinuedFractionDenominator) {
    EXPECT_EQ(arith::cf_denom(12, 16, 15), 4);
    EXPECT_EQ(arith::cf_denom(4, 16, 15), 4);
    EXPECT_EQ(arith::cf_denom(8, 16, 15), 2);
    EXPECT_EQ(arith::cf_denom(0, 16, 15), 1);
    // Agrees with the test oracle on every outcome of an 8-bit register.
    for (int64_t z = 0; z < 256; z++) {
        EXPECT_EQ(arith::cf_denom(z, 256, 21), oracle::oracle_cf(z, 256, 21)) << z;
    }
}
