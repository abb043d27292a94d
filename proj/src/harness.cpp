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

#include "qhl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "qhl/analysis.hpp"
#include "qhl/entail.hpp"
#include "qhl/parse.hpp"

namespace qhl {

PureState haar_state(const QubitLayout &layout, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXc v(layout.dim());
    for (Eigen::Index i = 0; i < v.size(); i++) {
        const double re = g(rng);
        v[i] = cplx(re, g(rng));
    }
    v /= v.norm();
    return PureState{layout, v};
}

namespace {

class Generator {
   public:
    Generator(const GenSpec &spec, const EvalConfig &cfg) : spec_(spec), cfg_(cfg), rng_(spec.seed) {
    }

    Povd state() {
        std::string last;
        for (int attempt = 0; attempt < 20; attempt++) {
            Povd mu = dist(spec_.formula);
            const Verdict v = satisfies(mu, spec_.formula, cfg_);
            if (v.status == Verdict::Status::Satisfied) {
                return mu;
            }
            last = v.reason;
        }
        throw Unsupported("generated states for " + to_string(spec_.formula) + " could not be verified: " + last);
    }

   private:
    const GenSpec &spec_;
    const EvalConfig &cfg_;
    std::mt19937_64 rng_;

    double uniform() {
        return std::uniform_real_distribution<double>(0.05, 1.0)(rng_);
    }

    std::vector<double> random_weights(size_t k) {
        std::vector<double> w(k);
        double total = 0;
        for (auto &x : w) {
            x = uniform();
            total += x;
        }
        for (auto &x : w) {
            x /= total;
        }
        return w;
    }

    Povd dist(const Dist &d) {
        if (d.kind == Dist::Kind::Single) {
            return formula(d.comps[0]);
        }
        std::vector<double> w;
        if (d.kind == Dist::Kind::Weighted) {
            for (const auto &r : d.weights) {
                w.push_back(boost::rational_cast<double>(r));
            }
        } else {
            w = random_weights(d.comps.size());
        }
        std::vector<std::pair<double, Povd>> parts;
        for (size_t i = 0; i < d.comps.size(); i++) {
            if (w[i] > 0) {
                parts.emplace_back(w[i], formula(d.comps[i]));
            }
        }
        if (parts.empty()) {
            return Povd{spec_.layout, {}};
        }
        return povd_mix(parts);
    }

    /// One to three branches, each a model of f on its own.
    Povd formula(const FormulaPtr &f) {
        const Atoms a = flatten_atoms(f);
        if (a.contradiction) {
            return Povd{spec_.layout, {}};
        }
        if (!a.other.empty()) {
            throw Unsupported("generator cannot sample " + to_string(a.other[0]));
        }
        const int k = std::uniform_int_distribution<int>(1, 3)(rng_);
        const std::vector<double> w = random_weights(k);
        Povd mu{spec_.layout, {}};
        for (int i = 0; i < k; i++) {
            mu.branches.push_back(Branch{classical(a.pure), w[i], quantum(a)});
        }
        coalesce(mu, 0.0);
        return mu;
    }

    PureState quantum(const Atoms &a) {
        PureState joint{QubitLayout(std::vector<std::string>{}), VectorXc::Ones(1)};
        for (const auto &k : a.kets) {
            const QubitLayout l(k.factor.qvars);
            if (!joint.layout.disjoint(l)) {
                throw Unsupported("generator needs disjoint kets, got overlap on " + l.str());
            }
            for (const auto &q : k.factor.qvars) {
                if (!spec_.layout.contains(q)) {
                    throw Unsupported("layout " + spec_.layout.str() + " does not contain " + q);
                }
            }
            joint = tensor(joint, PureState{l, factor_vector(k.factor)});
        }
        std::vector<std::string> rest;
        for (const auto &q : spec_.layout.names()) {
            if (!joint.layout.contains(q)) {
                rest.push_back(q);
            }
        }
        if (!rest.empty()) {
            joint = tensor(joint, haar_state(QubitLayout(rest), rng_));
        }
        return PureState{spec_.layout, kernel::permute(joint.amp, joint.layout, spec_.layout)};
    }

    /// Rejection sampling with propagation of equalities whose other side is already bound.
    ClassicalState classical(const std::vector<PurePtr> &atoms) {
        NameSet vars(spec_.vars.begin(), spec_.vars.end());
        for (const auto &p : atoms) {
            const NameSet fv = free_vars(p);
            vars.insert(fv.begin(), fv.end());
        }
        std::uniform_int_distribution<int64_t> pick(spec_.lo, spec_.hi);
        for (int attempt = 0; attempt < spec_.max_attempts; attempt++) {
            ClassicalState s;
            NameSet bound;
            while (bound.size() < vars.size()) {
                bool progress = false;
                for (const auto &p : atoms) {
                    if (p->kind != Pure::Kind::Cmp || p->op != "=") {
                        continue;
                    }
                    for (int side = 0; side < 2; side++) {
                        const AexpPtr &x = side ? p->rhs : p->lhs, &e = side ? p->lhs : p->rhs;
                        if (x->kind != Aexp::Kind::Var || bound.count(x->name)) {
                            continue;
                        }
                        const NameSet fe = free_vars(e);
                        if (!std::all_of(fe.begin(), fe.end(), [&](const std::string &v) { return bound.count(v) > 0; })) {
                            continue;
                        }
                        try {
                            s.set(x->name, eval_aexp(e, s));
                            bound.insert(x->name);
                            progress = true;
                        } catch (const std::exception &) {
                        }
                    }
                }
                if (!progress) {
                    for (const auto &v : vars) {
                        if (!bound.count(v)) {
                            s.set(v, pick(rng_));
                            bound.insert(v);
                            break;
                        }
                    }
                }
            }
            bool ok = true;
            for (const auto &p : atoms) {
                try {
                    ok = eval_pure(p, s, cfg_);
                } catch (const std::exception &) {
                    ok = false;
                }
                if (!ok) {
                    break;
                }
            }
            if (ok) {
                return s;
            }
        }
        std::string what;
        for (const auto &p : atoms) {
            what += (what.empty() ? "" : " /\\ ") + to_string(p);
        }
        throw Unsupported("no classical state satisfies " + what + " within " + std::to_string(spec_.max_attempts) +
                          " attempts");
    }
};

void collect_vars(const ComPtr &c, const Program &prog, NameSet &out, std::vector<std::string> &seen_macros) {
    if (!c) {
        return;
    }
    auto add = [&](const NameSet &s) { out.insert(s.begin(), s.end()); };
    if (!c->var.empty() && c->kind != Com::Kind::Unitary) {
        out.insert(c->var);
    }
    for (const AexpPtr *e : {&c->expr, &c->lo, &c->hi}) {
        if (*e) {
            add(free_vars(*e));
        }
    }
    if (c->guard) {
        add(free_vars(c->guard));
    }
    for (const auto &a : c->args) {
        add(free_vars(a));
    }
    for (const auto &k : c->kids) {
        collect_vars(k, prog, out, seen_macros);
    }
    if (c->kind == Com::Kind::Call) {
        const MacroDecl *m = prog.find_macro(c->name);
        if (m && std::find(seen_macros.begin(), seen_macros.end(), m->name) == seen_macros.end()) {
            seen_macros.push_back(m->name);
            NameSet inner;
            collect_vars(m->body, prog, inner, seen_macros);
            // Parameters are renamed by expansion; the body's other variables are shared.
            for (const auto &v : inner) {
                if (std::find(m->params.begin(), m->params.end(), v) == m->params.end()) {
                    out.insert(v);
                }
            }
        }
    }
}

}  // namespace

std::vector<Povd> generate_states(const GenSpec &spec, const EvalConfig &cfg) {
    for (const auto &q : free_qvars(spec.formula)) {
        if (!spec.layout.contains(q)) {
            throw Unsupported("layout " + spec.layout.str() + " does not contain " + q);
        }
    }
    Generator g(spec, cfg);
    std::vector<Povd> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; i++) {
        out.push_back(g.state());
    }
    return out;
}

NameSet program_vars(const ComPtr &c, const Program &prog) {
    NameSet out;
    std::vector<std::string> seen;
    collect_vars(c, prog, out, seen);
    return out;
}

TripleReport validate_triple(const Program &prog, const Dist &pre, const ComPtr &c, const Dist &post, int trials,
                             const EvalConfig &cfg, uint64_t seed) {
    TripleReport r;
    r.trials = trials;
    std::vector<std::string> qs = prog.qubits;
    for (const Dist *d : {&pre, &post}) {
        for (const auto &q : free_qvars(*d)) {
            if (std::find(qs.begin(), qs.end(), q) == qs.end()) {
                qs.push_back(q);
            }
        }
    }
    GenSpec spec;
    spec.formula = pre;
    spec.layout = QubitLayout(qs);
    const NameSet vars = program_vars(c, prog);
    spec.vars.assign(vars.begin(), vars.end());
    spec.seed = seed;
    spec.count = trials;
    std::vector<Povd> states;
    try {
        states = generate_states(spec, cfg);
    } catch (const Unsupported &e) {
        r.unsupported = true;
        r.error = e.what();
        return r;
    }
    for (const auto &mu : states) {
        Verdict v;
        try {
            v = satisfies(eval(prog, c, mu, cfg).out, post, cfg);
        } catch (const std::exception &e) {
            v.status = Verdict::Status::NotProven;
            v.reason = e.what();
        }
        switch (v.status) {
        case Verdict::Status::Satisfied:
            r.satisfied++;
            break;
        case Verdict::Status::NotProven:
            r.not_proven++;
            break;
        case Verdict::Status::Refuted:
            r.refuted++;
            if (!r.counterexample) {
                std::string init;
                for (const auto &b : mu.branches) {
                    init += (init.empty() ? "" : " + ") + std::to_string(b.weight) + "*" + b.sigma.str();
                }
                r.counterexample = init + ": " + v.reason;
            }
            break;
        }
    }
    return r;
}

FuzzSummary fuzz_soundness(const std::string &dir, int trials, const EvalConfig &cfg, uint64_t seed) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".qhl") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    FuzzSummary s;
    for (const auto &p : files) {
        CorpusEntry e;
        e.name = p.stem().string();
        e.path = p.string();
        e.negative = e.name.rfind("neg_", 0) == 0;
        try {
            const Outline o = load_outline(e.path);
            e.check = check_outline(o, cfg);
            e.empirical = validate_triple(o.program, e.check.pre, o.program.body, e.check.post, trials, cfg, seed);
        } catch (const std::exception &ex) {
            e.check.overall = CheckReport::Overall::Failed;
            e.check.failures.push_back(ex.what());
            e.empirical.unsupported = true;
            e.empirical.error = ex.what();
        }
        s.satisfied += e.empirical.satisfied;
        s.not_proven += e.empirical.not_proven;
        s.refuted += e.empirical.refuted;
        if (e.negative) {
            s.controls++;
            if (e.empirical.refuted > 0) {
                s.controls_caught++;
            }
        } else if (e.check.overall == CheckReport::Overall::Failed || !e.empirical.valid()) {
            s.failures++;
        }
        s.entries.push_back(std::move(e));
    }
    return s;
}

}  // namespace qhl
