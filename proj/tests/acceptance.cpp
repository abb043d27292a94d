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

// One PASS/FAIL line per acceptance criterion. Tolerances and time budgets are fixed here.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qhl/assert.hpp"
#include "qhl/cases.hpp"
#include "qhl/entail.hpp"
#include "qhl/harness.hpp"
#include "qhl/parse.hpp"
#include "qhl/prover.hpp"
#include "qhl/sem.hpp"
#include "support.hpp"

using namespace qhl;
using qhl::oracle::source_path;

namespace {

constexpr double kWeightTol = 1e-9;
constexpr double kResidualTol = 1e-6;
constexpr double kFidelityTol = 1e-6;
constexpr double kSemTol = 1e-9;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

bool run_criterion(int id, const std::string &name, double budget_s, const std::function<void(Outcome &)> &body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception &e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= budget_s) {
        o.pass = false;
        o.detail << " [over budget " << budget_s << " s]";
    }
    std::printf("%s %d %s (%.3f s)%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
    return o.pass;
}

bool all_conditionals_numeric(const CheckReport &r) {
    return std::all_of(r.conditionals.begin(), r.conditionals.end(), [](const std::string &c) {
        return c.find("verified numerically (equal_up_to_phase)") != std::string::npos;
    });
}

void criterion_addm(Outcome &o) {
    const Program prog = load_program(source_path("cases/addm.qimp"));
    const EvalResult r = eval(prog, point_povd(prog.layout(), {}));
    o.require(r.out.branches.size() == 4, "four branches");
    const std::vector<std::vector<int64_t>> table{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 2}};
    for (const auto &row : table) {
        const ClassicalState s{{"v0", row[0]}, {"v1", row[1]}, {"v", row[2]}};
        double w = 0;
        for (const auto &b : r.out.branches) {
            if (b.sigma.get("v0") == s.get("v0") && b.sigma.get("v1") == s.get("v1") && b.sigma.get("v") == s.get("v")) {
                w += b.weight;
            }
        }
        o.require(std::abs(w - 0.25) <= kWeightTol, "weight of " + s.str());
    }
    const Probability p = probability_of(r.out, parse_formula("v = 1"));
    o.require(p.decisive && std::abs(p.value - 0.5) <= kWeightTol, "P(v = 1) = 1/2");
    const Verdict v = satisfies(r.out, parse_dist("1/2 (v = 1) (+) 1/2 (v /= 1)"));
    o.require(v.status == Verdict::Status::Satisfied, "1/2 (v = 1) (+) 1/2 (v /= 1) satisfied");
    o.detail << " branches=" << r.out.branches.size() << " P(v=1)=" << p.value;
}

void criterion_addm_proof(Outcome &o) {
    const CheckReport r = check_outline(load_outline(source_path("cases/addm.qhl")));
    o.require(r.overall == CheckReport::Overall::Ok, "overall ok");
    o.require(r.conditionals.empty(), "no conditional entailments");
    o.detail << " nodes=" << r.nodes;
}

void criterion_hhl(Outcome &o) {
    const HHLInstance inst = default_hhl();
    const HHLBuild b = build_hhl(inst);
    const Program prog = parse_program(b.text);
    EvalConfig cfg;
    cfg.max_iter = 200;
    const EvalResult r = eval(prog, point_povd(prog.layout(), {}), cfg);
    o.require(r.stats.residual < kResidualTol, "residual < 1e-6");
    o.require(r.stats.iterations <= 200, "within 200 iterations");

    // Dense solve, independent of the builder's eigendecomposition.
    const VectorXc x = inst.A.fullPivLu().solve(inst.b).normalized();
    const QubitLayout qs(b.q);
    MatrixXc rho = MatrixXc::Zero(qs.dim(), qs.dim());
    double mass = 0;
    for (const auto &br : r.out.branches) {
        if (br.sigma.get("v") == 1) {
            rho += br.weight * reduced(br.psi, qs);
            mass += br.weight;
        }
    }
    const double fidelity = mass > 0 ? (x.adjoint() * (rho / mass) * x)(0, 0).real() : 0;
    o.require(fidelity >= 1 - kFidelityTol, "fidelity >= 1 - 1e-6");

    const CheckReport body = check_outline(parse_outline(hhl_body_outline(inst)));
    const CheckReport top = check_outline(load_outline(source_path("cases/hhl.qhl")));
    for (const auto *rep : {&body, &top}) {
        o.require(rep->overall != CheckReport::Overall::Failed && rep->failures.empty(), "outline checks");
        o.require(!rep->conditionals.empty() && all_conditionals_numeric(*rep),
                  "conditionals are exactly the numeric Conseq steps");
    }
    o.detail << " residual=" << r.stats.residual << " iterations=" << r.stats.iterations << " fidelity=" << fidelity
             << " body=" << overall_name(body.overall) << "(" << body.conditionals.size() << " numeric)"
             << " top=" << overall_name(top.overall) << "(" << top.conditionals.size() << " numeric)";
}

void criterion_of(Outcome &o) {
    const OFInstance inst;
    const OFBuild b = build_of(inst);
    const Program prog = parse_program(b.text);
    EvalConfig cfg;
    cfg.max_iter = 60;
    const EvalResult r = eval(prog, point_povd(prog.layout(), ClassicalState{{"N", inst.N}, {"x", inst.x}}), cfg);
    o.require(r.stats.residual < kResidualTol, "residual < 1e-6");
    o.require(r.stats.iterations <= 60, "within 60 iterations");
    bool all = !r.out.branches.empty();
    for (const auto &br : r.out.branches) {
        all = all && br.sigma.get("z") == 4 && br.sigma.get("b") == 1;
    }
    o.require(all, "every branch has z = 4 and b = 1");
    const double oracle = qhl::oracle::oracle_of_success(inst.x, inst.N, inst.t);
    o.require(std::abs(oracle - 0.5) <= kWeightTol, "oracle success 1/2");
    double worst = 0;
    int rounds = 0;
    for (const auto &loop : r.stats.loops) {
        for (double f : loop.exit_fraction) {
            worst = std::max(worst, std::abs(f - oracle));
            rounds++;
        }
    }
    o.require(rounds > 0 && worst <= kWeightTol, "per-iteration success matches oracle");
    o.detail << " residual=" << r.stats.residual << " iterations=" << r.stats.iterations << " oracle=" << oracle
             << " max|success-oracle|=" << worst;
}

void criterion_shor(Outcome &o) {
    const Program prog = load_program(source_path("cases/shor.qimp"));
    const Dist post = parse_dist("y | N /\\ y /= 1 /\\ y /= N");
    int terminated = 0, good = 0, satisfied = 0;
    for (uint64_t seed = 0; seed < 100; seed++) {
        EvalConfig cfg;
        cfg.mode = EvalMode::Sample;
        cfg.seed = seed;
        const SampleResult s = sample_run(prog, prog.body, ClassicalState{{"N", 15}}, zero_state(prog.layout()), cfg);
        if (s.status != RunStatus::Terminated) {
            continue;
        }
        terminated++;
        const int64_t y = s.sigma.get("y");
        good += (y == 3 || y == 5);
        satisfied += satisfies(point_povd(s.sigma, s.psi), post).status == Verdict::Status::Satisfied;
    }
    o.require(terminated > 0, "some run terminates");
    o.require(good == terminated, "y in {3, 5}");
    o.require(satisfied == terminated, "postcondition satisfied");
    o.detail << " terminated=" << terminated << "/100 y_ok=" << good << " post_ok=" << satisfied;
}

void criterion_fuzz(Outcome &o) {
    const FuzzSummary f = fuzz_soundness(source_path("corpus"), 100);
    int positives = 0;
    for (const auto &e : f.entries) {
        if (e.negative) {
            continue;
        }
        positives++;
        o.require(e.empirical.trials == 100 && e.empirical.valid(), e.name + " has zero Refuted");
        o.require(e.check.overall != CheckReport::Overall::Failed, e.name + " proof checks");
    }
    o.require(positives >= 14, "at least 14 rule instances");
    o.require(f.controls >= 1 && f.controls_caught == f.controls, "negative control refuted");
    o.detail << " instances=" << positives << " refuted=" << f.refuted << " controls=" << f.controls_caught << "/"
             << f.controls;
}

struct Axiom {
    std::string rule, lhs, rhs;
};

const std::vector<Axiom> &axioms() {
    static const std::vector<Axiom> a{
        {"PT", "|0>_{q} |1>_{p} /\\ x = 1", "|0>_{q}"},
        {"OdotE", "|+0>_{q p} (.) true", "|+0>_{q p}"},
        {"OdotC", "|0>_{q} (.) |1>_{p}", "|1>_{p} (.) |0>_{q}"},
        {"OdotA", "|0>_{q} (.) (|1>_{p} (.) x = 1)", "(|0>_{q} (.) |1>_{p}) (.) x = 1"},
        {"OdotO", "x = 1 (.) y = 2", "x = 1 /\\ y = 2"},
        {"OdotOP", "x = 1 (.) |+0>_{q p}", "x = 1 /\\ |+0>_{q p}"},
        {"OdotOA", "x = 1 /\\ (|0>_{q} (.) |1>_{p})", "(x = 1 /\\ |0>_{q}) (.) |1>_{p}"},
        {"OdotOC", "|0>_{q} (.) (|1>_{p} /\\ x = 1)", "(|0>_{q} (.) |1>_{p}) /\\ (|0>_{q} (.) x = 1)"},
        {"ReArr", "|01>_{q p}", "|10>_{p q}"},
        {"Separ", "|0>_{q} |+>_{p}", "|0+>_{q p}"},
        {"OdotT", "|0>_{q} |+>_{p}", "|0>_{q} (.) |+>_{p}"},
        {"OMerg", "1/4 (x = 1) (+) 1/4 (x = 1) (+) 1/2 (|0>_{q})", "1/2 (x = 1) (+) 1/2 (|0>_{q})"},
        {"Oplus", "1/2 (|0>_{q}) (+) 1/2 (|1>_{q})", "(|0>_{q}) (+) (|1>_{q})"},
        {"OCon", "1/2 (|0>_{q} /\\ x = 1) (+) 1/2 (|1>_{p})", "1/2 (|0>_{q}) (+) 1/2 (true)"},
    };
    return a;
}

void criterion_axioms(Outcome &o) {
    int checked = 0, not_proven = 0;
    for (const auto &ax : axioms()) {
        const Dist lhs = parse_dist(ax.lhs), rhs = parse_dist(ax.rhs);
        const EntailResult e = entails(lhs, rhs);
        o.require(e.proved(), ax.rule + " derives");
        o.require(std::find(e.trace.begin(), e.trace.end(), ax.rule) != e.trace.end(), ax.rule + " named in trace");
        GenSpec spec;
        spec.formula = lhs;
        spec.layout = QubitLayout{"q", "p"};
        spec.vars = {"x", "y"};
        spec.seed = 7;
        spec.count = 1000;
        const std::vector<Povd> states = generate_states(spec);
        o.require(states.size() == 1000, ax.rule + " generated 1000 states");
        int refuted = 0;
        for (const auto &mu : states) {
            const Verdict v = satisfies(mu, rhs);
            refuted += v.status == Verdict::Status::Refuted;
            not_proven += v.status == Verdict::Status::NotProven;
            checked++;
        }
        o.require(refuted == 0, ax.rule + " rhs never refuted");
    }
    o.detail << " axioms=" << axioms().size() << " states=" << checked << " not_proven=" << not_proven;
}

void criterion_semantics(Outcome &o) {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_lin = 0, worst_oracle = 0, worst_mass = -1;
    int linear_cases = 0, oracle_cases = 0;
    for (int i = 0; i < 200; i++) {
        const Program prog = parse_program(qhl::oracle::random_program(rng));
        const Povd m0 = qhl::oracle::random_povd(prog.layout(), rng);
        const Povd m1 = qhl::oracle::random_povd(prog.layout(), rng);
        const double p = unit(rng);
        const Povd lhs = eval(prog, povd_mix({{p, m0}, {1 - p, m1}})).out;
        const Povd r0 = eval(prog, m0).out, r1 = eval(prog, m1).out;
        const Povd rhs = povd_mix({{p, r0}, {1 - p, r1}});
        worst_lin = std::max(worst_lin, qhl::oracle::density_distance(lhs, qhl::oracle::to_density_map(rhs),
                                                                        (int)prog.qubits.size()));
        linear_cases++;
        for (const auto *pair : {&m0, &m1}) {
            const Povd out = pair == &m0 ? r0 : r1;
            const auto ref = qhl::oracle::oracle_run(prog, prog.body, qhl::oracle::to_density_map(*pair));
            worst_oracle = std::max(worst_oracle, qhl::oracle::density_distance(out, ref, (int)prog.qubits.size()));
            worst_mass = std::max(worst_mass, out.mass() - pair->mass());
            oracle_cases++;
        }
    }
    o.require(worst_lin <= kSemTol, "linearity within 1e-9");
    o.require(worst_oracle <= kSemTol, "density-matrix oracle within 1e-9");
    o.require(worst_mass <= kSemTol, "mass nonincreasing");
    o.detail << " linear=" << linear_cases << " max_dev=" << worst_lin << " oracle=" << oracle_cases
             << " max_dev=" << worst_oracle << " max_mass_gain=" << worst_mass;
}

}  // namespace

int main() {
    bool ok = true;
    ok &= run_criterion(1, "addM distribution", 1, criterion_addm);
    ok &= run_criterion(2, "addM proof", 1, criterion_addm_proof);
    ok &= run_criterion(3, "HHL exact-phase instance", 10, criterion_hhl);
    ok &= run_criterion(4, "order finding N=15 x=7 t=4", 30, criterion_of);
    ok &= run_criterion(5, "Shor N=15 over 100 seeds", 60, criterion_shor);
    ok &= run_criterion(6, "soundness fuzz over the rule corpus", 120, criterion_fuzz);
    ok &= run_criterion(7, "entailment axioms", 60, criterion_axioms);
    ok &= run_criterion(8, "semantics properties", 120, criterion_semantics);
    return ok ? 0 : 1;
}
