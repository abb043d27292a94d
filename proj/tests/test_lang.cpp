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

#include "qhl/analysis.hpp"
#include "qhl/parse.hpp"
#include "qhl/prover.hpp"
#include "support.hpp"

using namespace qhl;

namespace {

const char *kFormulas[] = {
    "true",
    "x = 1 /\\ y /= 2",
    "~(x < 3) \\/ y >= 0",
    "x = 1 -> y | 15",
    "forall k. (k <= 0 \\/ k > 0)",
    "|0>_{q}",
    "|+->_{q p}",
    "(0.6|0> + 0.8|1>)_{q}",
    "(0.6|00> + 0.8j|11>)_{q p}",
    "|0>_{q} |1>_{p}",
    "|0>_{q} (.) (x = 1 /\\ |1>_{p})",
    "~|0>_{q}",
    "x = pow_mod(7, z, 15) /\\ gcd(x, 15) = 1 /\\ cf_denom(z, 16, 15) = 4",
    "x = -3 + y * 2 - z div 4 mod 5",
};

const char *kDists[] = {
    "x = 1",
    "1/2 (x = 1) (+) 1/2 (x = 0)",
    "1/3 (|0>_{q}) (+) 2/3 (|1>_{q} /\\ x = 1)",
    "(v = 0) (+) (|1>_{r} /\\ v = 1)",
    "1/1 (x = 1)",
};

}  // namespace

TEST(Lang, FormulaRoundTrip) {
    for (const char *text : kFormulas) {
        const FormulaPtr f = parse_formula(text);
        const FormulaPtr back = parse_formula(to_string(f));
        EXPECT_TRUE(equal(f, back)) << text << " printed as " << to_string(f);
    }
}

TEST(Lang, DistRoundTrip) {
    for (const char *text : kDists) {
        const Dist d = parse_dist(text);
        EXPECT_TRUE(equal(d, parse_dist(to_string(d)))) << text << " printed as " << to_string(d);
    }
}

TEST(Lang, CaseProgramsRoundTrip) {
    for (const char *f : {"cases/addm.qimp", "cases/diverge.qimp", "cases/hhl.qimp", "cases/of.qimp",
                          "cases/shor.qimp"}) {
        const Program p = load_program(oracle::source_path(f));
        const Program back = parse_program(to_string(p));
        EXPECT_TRUE(equal(p, back)) << f;
    }
}

TEST(Lang, RandomProgramsRoundTrip) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; i++) {
        const std::string text = oracle::random_program(rng);
        const Program p = parse_program(text);
        EXPECT_TRUE(equal(p, parse_program(to_string(p)))) << text;
    }
}

TEST(Lang, OutlinesParse) {
    for (const char *f : {"cases/addm.qhl", "cases/hhl.qhl", "cases/hhl_body.qhl", "cases/of.qhl", "cases/shor.qhl",
                          "corpus/cond.qhl", "corpus/while.qhl", "corpus/qframe.qhl"}) {
        EXPECT_NO_THROW(load_outline(oracle::source_path(f))) << f;
    }
}

TEST(Lang, CommentsAndOptionalSemicolons) {
    const Program a = parse_program("# header\nqubit q;\nmeasurement M = std(1);\nx := M[q] # trailing\n");
    const Program b = parse_program("qubit q\nmeasurement M = std(1)\nx := M[q]\n");
    EXPECT_TRUE(equal(a, b));
}

TEST(Lang, ParseErrorsCarryPositions) {
    struct Case {
        const char *text;
        int line;
    };
    const Case programs[] = {
        {"qubit a\nH[a, a]\n", 2},
        {"qubit a\nx := M[a]\n", 2},
        {"qubit a\nCNOT[a]\n", 2},
        {"qubit a\nx := \n", 3},
        {"qubit a\nif x = 1 then skip else skip\n", 3},
    };
    for (const auto &c : programs) {
        try {
            parse_program(c.text);
            ADD_FAILURE() << "accepted: " << c.text;
        } catch (const ParseError &e) {
            EXPECT_EQ(e.line, c.line) << c.text << ": " << e.what();
        }
    }
}

TEST(Lang, WellFormednessRejected) {
    EXPECT_THROW(parse_dist("1/2 (x = 1) (+) 1/3 (x = 2)"), ParseError);
    EXPECT_THROW(parse_formula("|0>_{q} (.) |1>_{q}"), ParseError);
    EXPECT_THROW(parse_formula("(0.5|0> + 0.5|1>)_{q}"), ParseError);
    EXPECT_THROW(parse_formula("|0>_{q q}"), ParseError);
    EXPECT_THROW(parse_formula("|0>_{q p}"), ParseError);
    EXPECT_THROW(parse_program("qubit a\nmacro F(x) returns z { z := F(x) }\ny := F(1)\n"), ParseError);
    EXPECT_THROW(parse_aexp("gcd(1)"), ParseError);
}

TEST(Lang, FreeVarsOfOdotAreDisjointUnion) {
    const FormulaPtr a = parse_formula("|0>_{q} /\\ x = 1"), b = parse_formula("|1>_{p} /\\ y = 2");
    const FormulaPtr f = fx::odot(a, b);
    NameSet qa = free_qvars(a), qb = free_qvars(b), qf = free_qvars(f);
    for (const auto &q : qa) {
        EXPECT_FALSE(qb.count(q));
    }
    NameSet both = qa;
    both.insert(qb.begin(), qb.end());
    EXPECT_EQ(qf, both);
    NameSet cv = free_vars(a);
    const NameSet cb = free_vars(b);
    cv.insert(cb.begin(), cb.end());
    EXPECT_EQ(free_vars(f), cv);
}

TEST(Lang, SubstitutionIdentityOnNonFreeVariable) {
    for (const char *text : kDists) {
        const Dist d = parse_dist(text);
        ASSERT_FALSE(free_vars(d).count("w"));
        EXPECT_TRUE(equal(substitute(d, "w", ax::num(5)), d)) << text;
    }
}

TEST(Lang, SubstitutionAvoidsCapture) {
    const PurePtr p = parse_pure("forall k. k + x >= k");
    const PurePtr s = substitute(p, "x", ax::var("k"));
    // The bound variable is renamed, so k from outside stays free.
    EXPECT_TRUE(free_vars(s).count("k"));
    EXPECT_TRUE(equal(substitute(parse_pure("x = 1"), "x", ax::num(1)), parse_pure("1 = 1")));
}

TEST(Lang, SubstitutionSyntaxInOutlines) {
    const FormulaPtr f = parse_formula("(x = 1)[0/x]");
    EXPECT_TRUE(equal(f, parse_formula("0 = 1")));
}

TEST(Lang, ModVarsOfSequenceIsUnion) {
    const Program p = parse_program("qubit a, b\nmeasurement M = std(1)\nx := 1;\nH[a];\ny := M[b]\n");
    ASSERT_EQ(p.body->kind, Com::Kind::Seq);
    NameSet expect;
    for (const auto &k : p.body->kids) {
        const NameSet m = mod_vars(k);
        expect.insert(m.begin(), m.end());
    }
    EXPECT_EQ(mod_vars(p.body), expect);
    EXPECT_EQ(mod_vars(p.body), (NameSet{"a", "b", "x", "y"}));
}

TEST(Lang, MacroInlining) {
    const Program p = parse_program("qubit a\nmacro Inc(u) returns w { w := u + 1 }\ny := Inc(4)\n");
    const ComPtr c = inline_macros(p, p.body);
    const EvalResult r = eval(p, c, point_povd(p.layout(), {}));
    ASSERT_EQ(r.out.branches.size(), 1u);
    EXPECT_EQ(r.out.branches[0].sigma.get("y"), 5);
}
