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

// qhl: run, check and prove classical-quantum programs.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or parse error, 3 unsupported input.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "qhl/analysis.hpp"
#include "qhl/cases.hpp"
#include "qhl/entail.hpp"
#include "qhl/parse.hpp"
#include "qhl/report.hpp"

namespace {

using namespace qhl;
using nlohmann::json;

constexpr int kExitOk = 0, kExitFail = 1, kExitUsage = 2, kExitUnsupported = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Globals {
    double tol = 1e-9;
    int max_iter = 10000;
    std::string mode = "exhaustive";
    uint64_t seed = 0;
    bool json = false;
    std::string forall_range = "-64..64";
    std::vector<std::string> sets;

    EvalConfig config() const {
        EvalConfig c;
        c.loop_tol = tol;
        c.max_iter = max_iter;
        c.seed = seed;
        if (mode == "exhaustive") {
            c.mode = EvalMode::Exhaustive;
        } else if (mode == "sample") {
            c.mode = EvalMode::Sample;
        } else {
            throw UsageError("--mode must be exhaustive or sample");
        }
        const auto dots = forall_range.find("..");
        if (dots == std::string::npos) {
            throw UsageError("--forall-range must look like lo..hi");
        }
        try {
            c.forall_lo = std::stoll(forall_range.substr(0, dots));
            c.forall_hi = std::stoll(forall_range.substr(dots + 2));
        } catch (const std::exception &) {
            throw UsageError("--forall-range must look like lo..hi");
        }
        if (c.forall_lo > c.forall_hi) {
            throw UsageError("--forall-range is empty");
        }
        return c;
    }

    ClassicalState sigma() const {
        ClassicalState s;
        for (const auto &a : sets) {
            const auto eq = a.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw UsageError("--set expects NAME=VALUE, got " + a);
            }
            try {
                s.set(a.substr(0, eq), std::stoll(a.substr(eq + 1)));
            } catch (const std::exception &) {
                throw UsageError("--set expects an integer value, got " + a);
            }
        }
        return s;
    }
};

void emit(const Globals &g, const json &j, const std::string &text) {
    if (g.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write " + path);
    }
    out << text;
}

std::string povd_text(const Povd &mu) {
    std::map<std::string, double> by_sigma;
    for (const auto &b : mu.branches) {
        by_sigma[b.sigma.str()] += b.weight;
    }
    std::ostringstream o;
    o << "mass " << mu.mass() << " over " << mu.layout.str() << "\n";
    for (const auto &[s, w] : by_sigma) {
        o << "  " << w << "  " << s << "\n";
    }
    return o.str();
}

Povd initial(const Program &prog, const Globals &g) {
    return point_povd(QubitLayout(prog.qubits), g.sigma());
}

int cmd_run(const Globals &g, const std::string &path, int runs) {
    const Program prog = load_program(path);
    EvalConfig cfg = g.config();
    if (cfg.mode == EvalMode::Sample) {
        std::map<std::string, int> hist;
        std::map<std::string, int> statuses;
        const Povd in = initial(prog, g);
        for (int i = 0; i < runs; i++) {
            cfg.seed = g.seed + i;
            const SampleResult r = sample_run(prog, prog.body, in.branches[0].sigma, in.branches[0].psi, cfg);
            statuses[status_name(r.status)]++;
            if (r.status == RunStatus::Terminated) {
                hist[r.sigma.str()]++;
            }
        }
        json j{{"schema", kSchema}, {"runs", runs}, {"status", statuses}, {"final", hist}};
        std::ostringstream o;
        for (const auto &[s, n] : statuses) {
            o << s << " " << n << "\n";
        }
        for (const auto &[s, n] : hist) {
            o << "  " << n << "  " << s << "\n";
        }
        emit(g, j, o.str());
        return kExitOk;
    }
    const EvalResult r = eval(prog, initial(prog, g), cfg);
    json j{{"schema", kSchema}, {"result", to_json(r.out)}, {"stats", to_json(r.stats)}};
    std::ostringstream o;
    o << povd_text(r.out);
    o << "residual " << r.stats.residual << ", iterations " << r.stats.iterations << "\n";
    for (const auto &w : r.stats.warnings) {
        o << "warning: " << w << "\n";
    }
    emit(g, j, o.str());
    return kExitOk;
}

int cmd_check(const Globals &g, const std::string &path, const std::string &assertion, const std::string &prob) {
    if (assertion.empty() == prob.empty()) {
        throw UsageError("check needs exactly one of --assert and --prob");
    }
    const Program prog = load_program(path);
    const EvalConfig cfg = g.config();
    const EvalResult r = eval(prog, initial(prog, g), cfg);
    if (!prob.empty()) {
        const Probability p = probability_of(r.out, parse_formula(prob), cfg);
        json j{{"schema", kSchema}, {"formula", prob}, {"probability", p.value}, {"decisive", p.decisive},
               {"notes", p.notes}, {"residual", r.stats.residual}};
        std::ostringstream o;
        o << "P(" << prob << ") = " << p.value << (p.decisive ? "" : " (not decisive)") << "\n";
        emit(g, j, o.str());
        return p.decisive ? kExitOk : kExitFail;
    }
    const Verdict v = satisfies(r.out, parse_dist(assertion), cfg);
    json j{{"schema", kSchema}, {"assertion", assertion}, {"verdict", to_json(v)}, {"residual", r.stats.residual}};
    emit(g, j, status_name(v.status) + (v.reason.empty() ? "" : ": " + v.reason) + "\n");
    return v.status == Verdict::Status::Satisfied ? kExitOk : kExitFail;
}

int cmd_prove(const Globals &g, const std::string &path, const std::string &program, bool allow_conditional,
              int validate) {
    Outline o = load_outline(path);
    if (!program.empty()) {
        o.program = load_program(program);
        o.external_program = true;
    }
    const EvalConfig cfg = g.config();
    const CheckReport r = check_outline(o, cfg);
    json j = to_json(r);
    std::ostringstream text;
    text << overall_name(r.overall) << ": {" << to_string(r.pre) << "} ... {" << to_string(r.post) << "}\n";
    for (const auto &c : r.conditionals) {
        text << "conditional: " << c << "\n";
    }
    for (const auto &f : r.failures) {
        text << "failure: " << f << "\n";
    }
    bool ok = r.overall == CheckReport::Overall::Ok ||
              (allow_conditional && r.overall == CheckReport::Overall::Conditional);
    if (validate > 0 && r.overall != CheckReport::Overall::Failed) {
        const TripleReport t = validate_triple(o.program, r.pre, o.program.body, r.post, validate, cfg, g.seed);
        j["validation"] = to_json(t);
        text << "validation: " << t.satisfied << " satisfied, " << t.not_proven << " not proven, " << t.refuted
             << " refuted" << (t.unsupported ? " (unsupported: " + t.error + ")" : "") << "\n";
        ok = ok && t.valid();
    }
    emit(g, j, text.str());
    return ok ? kExitOk : kExitFail;
}

int cmd_entail(const Globals &g, const std::string &lhs, const std::string &rhs) {
    const EntailResult r = entails(parse_dist(lhs), parse_dist(rhs), g.config());
    json j{{"schema", kSchema},
           {"status", r.proved() ? "Proved" : "Unknown"},
           {"trace", r.trace},
           {"approximate", r.approximate},
           {"reason", r.reason}};
    std::string text = std::string(r.proved() ? "Proved" : "Unknown");
    if (!r.trace.empty()) {
        std::string t;
        for (const auto &s : r.trace) {
            t += (t.empty() ? "" : ", ") + s;
        }
        text += " by " + t;
    }
    emit(g, j, text + (r.reason.empty() ? "" : ": " + r.reason) + "\n");
    return r.proved() ? kExitOk : kExitFail;
}

int cmd_fuzz(const Globals &g, const std::string &dir, int trials) {
    const FuzzSummary s = fuzz_soundness(dir, trials, g.config(), g.seed);
    std::ostringstream o;
    for (const auto &e : s.entries) {
        o << e.name << ": proof " << overall_name(e.check.overall) << ", " << e.empirical.satisfied << " satisfied, "
          << e.empirical.not_proven << " not proven, " << e.empirical.refuted << " refuted"
          << (e.empirical.unsupported ? " (unsupported: " + e.empirical.error + ")" : "") << "\n";
    }
    o << "controls caught " << s.controls_caught << "/" << s.controls << ", failures " << s.failures << "\n";
    emit(g, to_json(s), o.str());
    if (s.ok()) {
        return kExitOk;
    }
    // Unsupported entries alone are a fragment limitation, not a refutation.
    bool only_unsupported = s.controls_caught == s.controls;
    for (const auto &e : s.entries) {
        const bool failed = e.empirical.refuted > 0 || e.check.overall == CheckReport::Overall::Failed;
        if (!e.negative && failed && !e.empirical.unsupported) {
            only_unsupported = false;
        }
    }
    return only_unsupported ? kExitUnsupported : kExitFail;
}

MatrixXc matrix_option(const std::string &text) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ';', '\n');
    return parse_matrix_text(t);
}

int cmd_build_hhl(const Globals &g, const std::string &a, const std::string &b, int n, double t, double c,
                  const std::string &out, const std::string &outline, const std::string &body_outline) {
    HHLInstance inst = default_hhl();
    inst.n = n;
    inst.t_evo = t;
    inst.C = c;
    if (!a.empty()) {
        inst.A = matrix_option(a);
        int m = 0;
        while ((Eigen::Index{1} << m) < inst.A.rows()) {
            m++;
        }
        inst.m = m;
    }
    if (!b.empty()) {
        const MatrixXc row = matrix_option(b);
        inst.b = row.rows() == 1 ? VectorXc(row.row(0).transpose()) : VectorXc(row.col(0));
    }
    const HHLBuild hb = build_hhl(inst);
    if (!out.empty()) {
        write_file(out, hb.text);
    }
    if (!outline.empty()) {
        write_file(outline, hhl_outline(inst, out.empty() ? "hhl.qimp" : out.substr(out.find_last_of('/') + 1)));
    }
    if (!body_outline.empty()) {
        write_file(body_outline, hhl_body_outline(inst));
    }
    json x = json::array();
    for (Eigen::Index i = 0; i < hb.x.size(); i++) {
        x.push_back({hb.x[i].real(), hb.x[i].imag()});
    }
    json j{{"schema", kSchema}, {"warnings", hb.warnings}, {"x", x}};
    std::string text;
    for (const auto &w : hb.warnings) {
        text += "warning: " + w + "\n";
    }
    if (out.empty()) {
        text += hb.text;
        j["program"] = hb.text;
    }
    emit(g, j, text);
    return kExitOk;
}

int cmd_build_of(const Globals &g, const OFInstance &inst, bool shor, const std::string &out,
                 const std::string &outline) {
    const OFBuild ob = build_of(inst);
    const std::string program = shor ? build_shor(inst) : ob.text;
    if (!out.empty()) {
        write_file(out, program);
    }
    if (!outline.empty()) {
        write_file(outline, of_outline(inst, out.empty() ? "of.qimp" : out.substr(out.find_last_of('/') + 1)));
    }
    json j{{"schema", kSchema}, {"warnings", ob.warnings}, {"order", ob.order}, {"t", inst.t},
           {"t_bound", of_t_bound(inst.L, inst.eps)}};
    std::string text;
    for (const auto &w : ob.warnings) {
        text += "warning: " + w + "\n";
    }
    if (out.empty()) {
        text += program;
        j["program"] = program;
    }
    emit(g, j, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Verifier for classical-quantum programs with distribution assertions"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--tol", g.tol, "Loop cut-off mass")->capture_default_str();
    app.add_option("--max-iter", g.max_iter, "Loop iteration bound")->capture_default_str();
    app.add_option("--mode", g.mode, "exhaustive or sample")->capture_default_str();
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_flag("--json", g.json, "Write JSON");
    app.add_option("--forall-range", g.forall_range, "Window lo..hi for universal quantifiers")->capture_default_str();
    app.add_option("--set", g.sets, "Initial classical value NAME=VALUE")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    std::string path, assertion, prob, program, lhs, rhs, out, outline, body_outline, a, b;
    int runs = 100, validate = 0, trials = 100, n = 2;
    double t_evo = 2 * M_PI, c = 1.0;
    bool allow_conditional = false, shor = false;
    OFInstance of;

    auto *run = app.add_subcommand("run", "Evaluate a program from |0..0> and the --set values");
    run->add_option("program", path)->required();
    run->add_option("--runs", runs, "Trajectories in sample mode")->capture_default_str();

    auto *check = app.add_subcommand("check", "Evaluate a program and check an assertion or a probability");
    check->add_option("program", path)->required();
    check->add_option("--assert", assertion, "Distribution formula the output must satisfy");
    check->add_option("--prob", prob, "Formula whose probability is reported");

    auto *prove = app.add_subcommand("prove", "Check a proof outline");
    prove->add_option("outline", path)->required();
    prove->add_option("--program", program, "Program the outline must match");
    prove->add_flag("--allow-conditional", allow_conditional, "Accept conditional steps");
    prove->add_option("--validate", validate, "Also run the triple on N generated states");

    auto *entail = app.add_subcommand("entail", "Decide an entailment between distribution formulas");
    entail->add_option("lhs", lhs)->required();
    entail->add_option("rhs", rhs)->required();

    auto *fuzz = app.add_subcommand("fuzz", "Check every outline in a directory and validate it on random states");
    fuzz->add_option("dir", path)->required();
    fuzz->add_option("--trials", trials, "Generated initial states per outline")->capture_default_str();

    auto *hhl = app.add_subcommand("build-hhl", "Emit the linear-system solver program and its outlines");
    hhl->add_option("--A", a, "Hermitian matrix, rows separated by ';'");
    hhl->add_option("--b", b, "Unit vector");
    hhl->add_option("--n", n, "Phase qubits")->capture_default_str();
    hhl->add_option("--t", t_evo, "Evolution time")->capture_default_str();
    hhl->add_option("--C", c, "Rotation constant")->capture_default_str();
    hhl->add_option("--out", out, "Program file");
    hhl->add_option("--outline", outline, "Outline of the whole program");
    hhl->add_option("--body-outline", body_outline, "Standalone outline of the loop body");

    auto *ofc = app.add_subcommand("build-of", "Emit the order-finding program and its outline");
    ofc->add_option("--N", of.N, "Modulus")->capture_default_str();
    ofc->add_option("--x", of.x, "Base, coprime to N")->capture_default_str();
    ofc->add_option("--t", of.t, "Phase qubits")->capture_default_str();
    ofc->add_option("--L", of.L, "Work qubits")->capture_default_str();
    ofc->add_option("--eps", of.eps, "Error bound for the suggested phase-register size")->capture_default_str();
    ofc->add_flag("--shor", shor, "Emit the factoring program instead");
    ofc->add_option("--out", out, "Program file");
    ofc->add_option("--outline", outline, "Outline of the order-finding program");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(g, path, runs);
        }
        if (check->parsed()) {
            return cmd_check(g, path, assertion, prob);
        }
        if (prove->parsed()) {
            return cmd_prove(g, path, program, allow_conditional, validate);
        }
        if (entail->parsed()) {
            return cmd_entail(g, lhs, rhs);
        }
        if (fuzz->parsed()) {
            return cmd_fuzz(g, path, trials);
        }
        if (hhl->parsed()) {
            return cmd_build_hhl(g, a, b, n, t_evo, c, out, outline, body_outline);
        }
        if (ofc->parsed()) {
            return cmd_build_of(g, of, shor, out, outline);
        }
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError &e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BuildError &e) {
        std::cerr << "invalid instance: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Unsupported &e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnsupported;
    }
    return kExitUsage;
}
