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

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "qhl/entail.hpp"
#include "qhl/parse.hpp"
#include "qhl/prover.hpp"
#include "support.hpp"

using namespace qhl;

namespace {

ReportNode node(const std::string &rules, const std::string &pre, const std::string &cmd, const std::string &post) {
    std::vector<Justification> by;
    std::string rest = rules;
    while (!rest.empty()) {
        const size_t k = rest.find(',');
        std::string r = rest.substr(0, k);
        r.erase(0, r.find_first_not_of(' '));
        by.push_back({r, {}});
        rest = k == std::string::npos ? "" : rest.substr(k + 1);
    }
    Program prog = parse_program("qubit q, p\nmeasurement M = std(1)\ngate S on 1 = [1 0; 0 1j]\n" + cmd + "\n");
    return check_node(by, parse_dist(pre), prog.body, parse_dist(post), prog);
}

CheckReport check_text(const std::string &text) {
    return check_outline(parse_outline(text));
}

}  // namespace

TEST(Entail, AxiomsDeriveWithTheirNames) {
    struct Case {
        const char *rule, *lhs, *rhs;
    };
    const Case cases[] = {
        {"PT", "|0>_{q} |1>_{p} /\\ x = 1", "|0>_{q}"},
        {"OdotE", "|+0>_{q p} (.) true", "|+0>_{q p}"},
        {"OdotC", "|0>_{q} (.) |1>_{p}", "|1>_{p} (.) |0>_{q}"},
        {"ReArr", "|01>_{q p}", "|10>_{p q}"},
        {"Separ", "|0>_{q} |+>_{p}", "|0+>_{q p}"},
        {"OdotT", "|0>_{q} |+>_{p}", "|0>_{q} (.) |+>_{p}"},
        {"OMerg", "1/4 (x = 1) (+) 1/4 (x = 1) (+) 1/2 (|0>_{q})", "1/2 (x = 1) (+) 1/2 (|0>_{q})"},
        {"Oplus", "1/2 (|0>_{q}) (+) 1/2 (|1>_{q})", "(|0>_{q}) (+) (|1>_{q})"},
    };
    for (const auto &c : cases) {
        const EntailResult e = entails(parse_dist(c.lhs), parse_dist(c.rhs));
        EXPECT_TRUE(e.proved()) << c.rule << ": " << e.reason;
        EXPECT_NE(std::find(e.trace.begin(), e.trace.end(), c.rule), e.trace.end()) << c.rule;
    }
}

TEST(Entail, InvalidEntailmentsStayUnknown) {
    const char *pairs[][2] = {
        {"|0>_{q}", "|1>_{q}"},
        {"|0>_{q}", "|+>_{q}"},
        {"x = 1", "x = 2"},
        {"(|0>_{q}) (+) (|1>_{q})", "1/2 (|0>_{q}) (+) 1/2 (|1>_{q})"},
        {"1/3 (x = 1) (+) 2/3 (x = 2)", "1/2 (x = 1) (+) 1/2 (x = 2)"},
        {"true", "|0>_{q}"},
    };
    for (const auto &p : pairs) {
        EXPECT_FALSE(entails(parse_dist(p[0]), parse_dist(p[1])).proved()) << p[0] << " |- " << p[1];
    }
}

TEST(Entail, PureImplication) {
    EXPECT_TRUE(entails(parse_dist("x = 2 /\\ y = x + 1"), parse_dist("y = 3")).proved());
    EXPECT_TRUE(entails(parse_dist("false"), parse_dist("|0>_{q}")).proved());
    EXPECT_TRUE(entails(parse_dist("|0>_{q} /\\ x = 1"), parse_dist("x >= 0")).proved());
}

TEST(Entail, EntangledKetSurvivesReordering) {
    const FormulaPtr a = parse_formula("(0.6|01> + 0.8|10>)_{q p}");
    const FormulaPtr b = parse_formula("(0.8|01> + 0.6|10>)_{p q}");
    EXPECT_TRUE(equivalent(a, b).proved());
    EXPECT_FALSE(entails(a, parse_formula("|0>_{q}")).proved());
}

TEST(Prover, QUnitHadamard) {
    EXPECT_EQ(node("QUnit", "|0>_{q}", "H[q]", "|+>_{q}").status, NodeStatus::Ok);
    EXPECT_EQ(node("QUnit", "|0>_{q} /\\ x = 1", "S[q]", "|0>_{q} /\\ x = 1").status, NodeStatus::Ok);
    EXPECT_NE(node("QUnit", "|0>_{q}", "H[q]", "|->_{q}").status, NodeStatus::Ok);
}

TEST(Prover, QUnitInvolution) {
    std::mt19937_64 rng(41);
    const MatrixXc h = builtin_gate("H", QubitLayout{"q"}).mat;
    const MatrixXc c = builtin_gate("CNOT", QubitLayout{"q", "p"}).mat;
    for (int trial = 0; trial < 30; trial++) {
        const VectorXc v = oracle::random_state(4, rng);
        const FormulaPtr f = fx::ket(ket_from_state(PureState{QubitLayout{"q", "p"}, v}));
        const FormulaPtr g = adjoint_pre(adjoint_pre(f, c, {"q", "p"}), c.adjoint(), {"q", "p"});
        EXPECT_TRUE(equal_up_to_phase(ket_state(g->ket).amp, v, 1e-9));
        const FormulaPtr k = adjoint_pre(adjoint_pre(f, h, {"q"}), h.adjoint(), {"q"});
        EXPECT_TRUE(equivalent(k, f).proved());
    }
}

TEST(Prover, QMeasWeights) {
    EXPECT_EQ(node("QMeas", "|+>_{q} /\\ (x = 0)[0/x] /\\ (x = 1)[1/x]", "x := M[q]",
                   "1/2 (|0>_{q} /\\ x = 0) (+) 1/2 (|1>_{q} /\\ x = 1)")
                  .status,
              NodeStatus::Ok);
    const ReportNode bad = node("QMeas", "|+>_{q} /\\ (x = 0)[0/x] /\\ (x = 1)[1/x]", "x := M[q]",
                                "1/3 (|0>_{q} /\\ x = 0) (+) 2/3 (|1>_{q} /\\ x = 1)");
    EXPECT_EQ(bad.status, NodeStatus::SideConditionFailure) << bad.detail;
}

TEST(Prover, QMeasDropsImpossibleOutcome) {
    // Outcome 1 has probability zero, so its component must be absent.
    EXPECT_EQ(node("QMeas", "|0>_{q} /\\ (x = 0)[0/x]", "x := M[q]", "1/1 (|0>_{q} /\\ x = 0)").status, NodeStatus::Ok);
    EXPECT_NE(node("QMeas", "|0>_{q} /\\ (x = 0)[0/x] /\\ (x = 1)[1/x]", "x := M[q]",
                   "1/1 (|0>_{q} /\\ x = 0) (+) 0/1 (|1>_{q} /\\ x = 1)")
                  .status,
              NodeStatus::Ok);
}

TEST(Prover, QMeasOnEntangledPrecondition) {
    // Measuring q of (|00> + |11>)/sqrt(2) leaves p correlated with the outcome.
    EXPECT_EQ(node("QMeas", "(1/sqrt(2)|00> + 1/sqrt(2)|11>)_{q p} /\\ (x = 0)[0/x] /\\ (x = 1)[1/x]", "x := M[q]",
                   "1/2 (|00>_{q p} /\\ x = 0) (+) 1/2 (|11>_{q p} /\\ x = 1)")
                  .status,
              NodeStatus::Ok);
}

TEST(Prover, SumWeightsMustMatch) {
    EXPECT_EQ(node("QUnit, Sum", "1/2 (|0>_{q} /\\ x = 0) (+) 1/2 (|1>_{q} /\\ x = 1)", "X[q]",
                   "1/2 (|1>_{q} /\\ x = 0) (+) 1/2 (|0>_{q} /\\ x = 1)")
                  .status,
              NodeStatus::Ok);
    const ReportNode bad = node("QUnit, Sum", "1/2 (|0>_{q} /\\ x = 0) (+) 1/2 (|1>_{q} /\\ x = 1)", "X[q]",
                                "1/4 (|1>_{q} /\\ x = 0) (+) 3/4 (|0>_{q} /\\ x = 1)");
    EXPECT_EQ(bad.status, NodeStatus::SideConditionFailure) << bad.detail;
}

TEST(Prover, AssignAndInit) {
    EXPECT_EQ(node("Assgn", "(x = 2)[1 + 1/x]", "x := 1 + 1", "x = 2").status, NodeStatus::Ok);
    EXPECT_EQ(node("Assgn", "x + 1 = 2", "x := x + 1", "x = 2").status, NodeStatus::Ok);
    EXPECT_NE(node("Assgn", "x = 1", "x := x + 1", "x = 1").status, NodeStatus::Ok);
    EXPECT_EQ(node("QInit", "true", "q := |0>", "|0>_{q}").status, NodeStatus::Ok);
}

TEST(Prover, CheckNodeIsDeterministic) {
    const ReportNode a = node("QUnit", "|0>_{q}", "H[q]", "|+>_{q}");
    const ReportNode b = node("QUnit", "|0>_{q}", "H[q]", "|+>_{q}");
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.detail, b.detail);
    EXPECT_EQ(a.trace, b.trace);
}

TEST(Prover, FrameMustAvoidModifiedVariables) {
    const CheckReport ok = check_text(
        "qubit q, p\n{|0>_{q} (.) |1>_{p}}\n<=> {|0>_{q}} H[q] {|+>_{q}} by QUnit\n{|+1>_{q p}} by OdotT\n");
    EXPECT_EQ(ok.overall, CheckReport::Overall::Ok) << (ok.failures.empty() ? "" : ok.failures[0]);
    // The frame |1>_{p} mentions the qubit the command modifies.
    const CheckReport bad = check_text(
        "qubit q, p\n{|0>_{q} (.) |1>_{p}}\n<=> {|0>_{q}} CNOT[q, p] {|0>_{q}} by QUnit\n{|0>_{q} (.) |1>_{p}}\n");
    EXPECT_EQ(bad.overall, CheckReport::Overall::Failed);
}

TEST(Prover, CondWeightMustLieInUnitInterval) {
    const std::string body =
        "qubit q\n{1/3 (x = 0) (+) 2/3 (x = 1)}\nif x = 0 then\n  {x = 0}\n  {(y = 0)[0/y]} by Conseq\n  y := 0\n"
        "  {y = 0} by Assgn\nelse\n  {x = 1}\n  {(y = 1)[1/y]} by Conseq\n  y := 1\n  {y = 1} by Assgn\nfi\n"
        "{1/3 (y = 0) (+) 2/3 (y = 1)} by Cond(";
    const CheckReport good = check_text(body + "1/3)\n");
    EXPECT_EQ(good.overall, CheckReport::Overall::Ok) << (good.failures.empty() ? "" : good.failures[0]);
    EXPECT_EQ(check_text(body + "4/3)\n").overall, CheckReport::Overall::Failed);
    EXPECT_EQ(check_text(body + "2/3)\n").overall, CheckReport::Overall::Failed);
}

TEST(Prover, WhileNeedsInvariantShape) {
    const CheckReport bad = check_text(
        "qubit q\n{x = 0}\nwhile x = 0 do\n  x := 1\n  {x = 1} by Assgn\nod {x = 1} by While\n");
    EXPECT_EQ(bad.overall, CheckReport::Overall::Failed);
}

TEST(Prover, CorpusOutlinesCheck) {
    for (const auto &e : std::filesystem::directory_iterator(oracle::source_path("corpus"))) {
        const CheckReport r = check_outline(load_outline(e.path().string()));
        const std::string name = e.path().filename().string();
        if (name.rfind("neg_", 0) == 0) {
            EXPECT_NE(r.overall, CheckReport::Overall::Ok) << name;
        } else {
            EXPECT_EQ(r.overall, CheckReport::Overall::Ok) << name << ": "
                                                           << (r.failures.empty() ? "" : r.failures[0]);
        }
    }
}

TEST(Prover, CaseStudyOutlines) {
    const CheckReport addm = check_outline(load_outline(oracle::source_path("cases/addm.qhl")));
    EXPECT_EQ(addm.overall, CheckReport::Overall::Ok);
    const CheckReport of = check_outline(load_outline(oracle::source_path("cases/of.qhl")));
    EXPECT_EQ(of.overall, CheckReport::Overall::Ok);
    const CheckReport shor = check_outline(load_outline(oracle::source_path("cases/shor.qhl")));
    EXPECT_EQ(shor.overall, CheckReport::Overall::Conditional);
    ASSERT_EQ(shor.conditionals.size(), 1u);
    EXPECT_NE(shor.conditionals[0].find("contract of macro OF"), std::string::npos);
}

TEST(Prover, OutlineProgramMustMatchFile) {
    // The outline's commands differ from the referenced program.
    const std::string text = "program \"" + oracle::source_path("cases/addm.qimp") +
                             "\"\n{true}\nskip\n{true} by Skip\n";
    bool rejected = false;
    try {
        rejected = check_text(text).overall == CheckReport::Overall::Failed;
    } catch (const std::exception &) {
        rejected = true;
    }
    EXPECT_TRUE(rejected);
}
