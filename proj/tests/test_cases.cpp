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

#include "qhl/cases.hpp"
#include "qhl/parse.hpp"
#include "qhl/prover.hpp"
#include "qhl/sem.hpp"
#include "support.hpp"

using namespace qhl;

TEST(Cases, CheckedInFilesMatchBuilders) {
    const HHLInstance h = default_hhl();
    const OFInstance o;
    EXPECT_EQ(read_file(oracle::source_path("cases/hhl.qimp")), build_hhl(h).text);
    EXPECT_EQ(read_file(oracle::source_path("cases/hhl.qhl")), hhl_outline(h, "hhl.qimp"));
    EXPECT_EQ(read_file(oracle::source_path("cases/hhl_body.qhl")), hhl_body_outline(h));
    EXPECT_EQ(read_file(oracle::source_path("cases/of.qimp")), build_of(o).text);
    EXPECT_EQ(read_file(oracle::source_path("cases/of.qhl")), of_outline(o, "of.qimp"));
    EXPECT_EQ(read_file(oracle::source_path("cases/shor.qimp")), build_shor(o));
}

TEST(Cases, EmittedProgramsRoundTrip) {
    const OFInstance o;
    for (const std::string &text : {build_hhl(default_hhl()).text, build_of(o).text, build_shor(o)}) {
        const Program p = parse_program(text);
        EXPECT_TRUE(equal(p, parse_program(to_string(p))));
    }
}

TEST(Cases, HhlFidelityAgainstDenseSolve) {
    const HHLInstance inst = default_hhl();
    const HHLBuild b = build_hhl(inst);
    const VectorXc x = inst.A.fullPivLu().solve(inst.b).normalized();
    EXPECT_TRUE(equal_up_to_phase(b.x, x, 1e-12));
    const Program p = parse_program(b.text);
    const EvalResult r = eval(p, point_povd(p.layout(), {}));
    const QubitLayout q(b.q);
    MatrixXc rho = MatrixXc::Zero(q.dim(), q.dim());
    for (const auto &br : r.out.branches) {
        ASSERT_EQ(br.sigma.get("v"), 1);
        rho += br.weight * reduced(br.psi, q);
    }
    rho /= rho.trace();
    EXPECT_GE((x.adjoint() * rho * x)(0, 0).real(), 1 - 1e-6);
}

TEST(Cases, HhlGates) {
    const HHLBuild b = build_hhl(default_hhl());
    // U_f acts as the identity when the phase register holds 0.
    EXPECT_LT((b.uf.topLeftCorner(2, 2) - MatrixXc::Identity(2, 2)).norm(), 1e-12);
    // U_c |1>|0>_r = |1>|1>_r at C = 1; |2>|0>_r gets amplitude C/2 on |1>_r.
    EXPECT_NEAR(std::abs(b.uc(3, 2)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(b.uc(5, 4)), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(b.uc(0, 0)), 1.0, 1e-12);
    for (const MatrixXc *m : {&b.ub, &b.uf, &b.uc}) {
        EXPECT_TRUE(is_unitary(*m));
    }
}

TEST(Cases, HhlBuildErrors) {
    HHLInstance a = default_hhl();
    a.A(0, 1) = 0.3;
    EXPECT_THROW(build_hhl(a), BuildError);
    HHLInstance c = default_hhl();
    c.C = 2;
    EXPECT_THROW(build_hhl(c), BuildError);
    HHLInstance e = default_hhl();
    e.A(1, 1) = 1.0;  // phase 1 leaves (0, 1)
    EXPECT_THROW(build_hhl(e), BuildError);
}

TEST(Cases, HhlInexactPhaseWarns) {
    HHLInstance a = default_hhl();
    a.A(0, 0) = 0.3;
    const HHLBuild b = build_hhl(a);
    EXPECT_FALSE(b.warnings.empty());
}

TEST(Cases, OrderFinding) {
    const OFBuild b = build_of(OFInstance{});
    EXPECT_EQ(b.order, 4);
    EXPECT_EQ(arith::cf_denom(12, 16, 15), 4);
    EXPECT_EQ(of_t_bound(4, 0.25), 11);
    EXPECT_THROW(build_of(OFInstance{15, 5}), BuildError);
    EXPECT_THROW(build_of(OFInstance{15, 1}), BuildError);
    EXPECT_THROW(build_of(OFInstance{15, 7, 4, 3}), BuildError);
    EXPECT_NEAR(oracle::oracle_of_success(7, 15, 4), 0.5, 1e-12);
}

TEST(Cases, OrderFindingOtherBase) {
    // x = 2 also has order 4 modulo 15.
    OFInstance inst;
    inst.x = 2;
    const OFBuild b = build_of(inst);
    const Program p = parse_program(b.text);
    const EvalResult r = eval(p, point_povd(p.layout(), ClassicalState{{"N", 15}, {"x", 2}}));
    EXPECT_LT(r.stats.residual, 1e-6);
    for (const auto &br : r.out.branches) {
        EXPECT_EQ(br.sigma.get("z"), 4);
    }
}

TEST(Cases, GeneratedOutlinesCheck) {
    const HHLInstance h = default_hhl();
    const CheckReport body = check_outline(parse_outline(hhl_body_outline(h)));
    EXPECT_NE(body.overall, CheckReport::Overall::Failed);
    for (const auto &c : body.conditionals) {
        EXPECT_NE(c.find("numerically"), std::string::npos) << c;
    }
    const CheckReport of = check_outline(load_outline(oracle::source_path("cases/of.qhl")));
    EXPECT_EQ(of.overall, CheckReport::Overall::Ok);
}
