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

#include <gtest/gtest.h>

#include "qhl/harness.hpp"
#include "qhl/parse.hpp"
#include "support.hpp"

using namespace qhl;

namespace {

GenSpec spec_for(const std::string &d, uint64_t seed, int count) {
    GenSpec s;
    s.formula = parse_dist(d);
    s.layout = QubitLayout{"q", "p"};
    s.vars = {"x", "y"};
    s.seed = seed;
    s.count = count;
    return s;
}

}  // namespace

TEST(Harness, HaarStatesAreNormalized) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 20; i++) {
        EXPECT_NEAR(haar_state(QubitLayout{"a", "b", "c"}, rng).amp.norm(), 1.0, 1e-12);
    }
}

TEST(Harness, GeneratedStatesSatisfyTheirSpec) {
    for (const char *d : {"x = 1 /\\ y > x", "|+>_{q}", "(0.6|01> + 0.8|10>)_{q p} /\\ x = 2",
                          "1/3 (x = 0) (+) 2/3 (|1>_{p} /\\ x = 1)", "(x = 0) (+) (|0>_{q})",
                          "|0>_{q} (.) x >= 3"}) {
        const GenSpec s = spec_for(d, 3, 50);
        const auto states = generate_states(s);
        ASSERT_EQ(states.size(), 50u) << d;
        for (const auto &mu : states) {
            EXPECT_EQ(satisfies(mu, s.formula).status, Verdict::Status::Satisfied) << d;
            EXPECT_NEAR(mu.mass(), 1.0, 1e-9);
        }
    }
}

TEST(Harness, SeedDeterminism) {
    const GenSpec s = spec_for("1/2 (|+>_{q}) (+) 1/2 (x = 3)", 99, 10);
    const auto a = generate_states(s), b = generate_states(s);
    ASSERT_EQ(a.size(), b.size());
    for (size_t i = 0; i < a.size(); i++) {
        ASSERT_EQ(a[i].branches.size(), b[i].branches.size());
        for (size_t k = 0; k < a[i].branches.size(); k++) {
            EXPECT_EQ(a[i].branches[k].sigma, b[i].branches[k].sigma);
            EXPECT_EQ(a[i].branches[k].weight, b[i].branches[k].weight);
            EXPECT_EQ(a[i].branches[k].psi.amp, b[i].branches[k].psi.amp);
        }
    }
    GenSpec t = s;
    t.seed = 100;
    EXPECT_NE(generate_states(t)[0].branches[0].psi.amp, a[0].branches[0].psi.amp);
}

TEST(Harness, UnsupportedFragmentReported) {
    EXPECT_THROW(generate_states(spec_for("~|0>_{q}", 1, 1)), Unsupported);
    // No integer in the window satisfies the constraint.
    GenSpec s = spec_for("x * x = 2", 1, 1);
    s.max_attempts = 1000;
    EXPECT_THROW(generate_states(s), Unsupported);
}

TEST(Harness, ValidateTripleAcceptsSoundAndRefutesUnsound) {
    const Program p = parse_program("qubit q\nmeasurement M = std(1)\nx := M[q]\n");
    const Dist pre = parse_dist("|+>_{q}");
    const TripleReport good = validate_triple(p, pre, p.body, parse_dist("1/2 (x = 0) (+) 1/2 (x = 1)"), 30);
    EXPECT_EQ(good.trials, 30);
    EXPECT_TRUE(good.valid());
    const TripleReport bad = validate_triple(p, pre, p.body, parse_dist("x = 0"), 30);
    EXPECT_EQ(bad.refuted, 30);
    EXPECT_TRUE(bad.counterexample.has_value());
}

TEST(Harness, ProgramVarsFollowMacros) {
    const Program p = load_program(oracle::source_path("cases/shor.qimp"));
    const NameSet v = program_vars(p.body, p);
    EXPECT_TRUE(v.count("y"));
    EXPECT_TRUE(v.count("b"));
}

TEST(Harness, CorpusFuzz) {
    const FuzzSummary f = fuzz_soundness(oracle::source_path("corpus"), 100);
    EXPECT_TRUE(f.ok());
    EXPECT_EQ(f.failures, 0);
    EXPECT_GE(f.controls, 1);
    EXPECT_EQ(f.controls_caught, f.controls);
    int positives = 0;
    for (const auto &e : f.entries) {
        if (!e.negative) {
            positives++;
            EXPECT_EQ(e.empirical.refuted, 0) << e.name;
            EXPECT_EQ(e.empirical.trials, 100) << e.name;
        } else {
            EXPECT_GE(e.empirical.refuted, 1) << e.name;
        }
    }
    EXPECT_GE(positives, 14);
}
