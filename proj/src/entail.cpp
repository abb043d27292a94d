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

#include "qhl/entail.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "qhl/analysis.hpp"
#include "qhl/assert.hpp"
#include "qhl/transport.hpp"

namespace qhl {

namespace {

void note(std::vector<std::string> &trace, const std::string &rule) {
    if (std::find(trace.begin(), trace.end(), rule) == trace.end()) {
        trace.push_back(rule);
    }
}

void merge_trace(std::vector<std::string> &into, const std::vector<std::string> &from) {
    for (const auto &r : from) {
        note(into, r);
    }
}

bool is_true(const FormulaPtr &f) {
    return f->is_pure() && f->pure->kind == Pure::Kind::True;
}

bool ket_only(const FormulaPtr &f) {
    if (f->kind == Formula::Kind::Ket) {
        return true;
    }
    if (f->kind == Formula::Kind::Odot) {
        return ket_only(f->kids[0]) && ket_only(f->kids[1]);
    }
    return false;
}

bool has_pure_conjunct(const FormulaPtr &f) {
    if (f->is_pure()) {
        return true;
    }
    if (f->kind == Formula::Kind::And) {
        return has_pure_conjunct(f->kids[0]) || has_pure_conjunct(f->kids[1]);
    }
    return false;
}

/// Rules needed to bring f into flat conjunctive form.
void scan_rules(const FormulaPtr &f, std::vector<std::string> &trace) {
    if (f->kind == Formula::Kind::Odot) {
        const FormulaPtr &a = f->kids[0], &b = f->kids[1];
        if (is_true(a) || is_true(b)) {
            note(trace, "OdotE");
        }
        if (a->is_pure() && b->is_pure()) {
            note(trace, "OdotO");
        } else if (a->is_pure() || b->is_pure()) {
            note(trace, "OdotOP");
        }
        if (ket_only(a) && ket_only(b)) {
            note(trace, "OdotT");
        }
        if (b->kind == Formula::Kind::Odot) {
            note(trace, "OdotA");
        }
        for (const auto &k : f->kids) {
            if (k->kind == Formula::Kind::And) {
                note(trace, has_pure_conjunct(k) ? "OdotOA" : "OdotOC");
            }
        }
    } else if (f->kind == Formula::Kind::And) {
        const FormulaPtr &a = f->kids[0], &b = f->kids[1];
        if ((a->is_pure() && b->kind == Formula::Kind::Odot) || (b->is_pure() && a->kind == Formula::Kind::Odot)) {
            note(trace, "OdotOA");
        }
        if (a->kind == Formula::Kind::Odot && b->kind == Formula::Kind::Odot) {
            note(trace, "OdotOC");
        }
    }
    if (f->kind == Formula::Kind::Odot || f->kind == Formula::Kind::And) {
        for (const auto &k : f->kids) {
            scan_rules(k, trace);
        }
    }
}

void odot_operands(const FormulaPtr &f, std::vector<std::string> &out) {
    if (f->kind == Formula::Kind::Odot) {
        odot_operands(f->kids[0], out);
        odot_operands(f->kids[1], out);
    } else {
        out.push_back(to_string(f));
    }
}

/// OdotC is needed when operands shared by both ⊙-chains appear in a different order.
bool reordered(const FormulaPtr &a, const FormulaPtr &b) {
    if (a->kind != Formula::Kind::Odot || b->kind != Formula::Kind::Odot) {
        return false;
    }
    std::vector<std::string> oa, ob;
    odot_operands(a, oa);
    odot_operands(b, ob);
    std::vector<std::string> ca, cb;
    for (const auto &s : oa) {
        if (std::find(ob.begin(), ob.end(), s) != ob.end()) {
            ca.push_back(s);
        }
    }
    for (const auto &s : ob) {
        if (std::find(oa.begin(), oa.end(), s) != oa.end()) {
            cb.push_back(s);
        }
    }
    return ca.size() >= 2 && ca != cb;
}

void flatten_pure(const PurePtr &p, Atoms &a) {
    switch (p->kind) {
    case Pure::Kind::True:
        a.saw_true = true;
        return;
    case Pure::Kind::False:
        a.contradiction = true;
        a.pure.push_back(p);
        return;
    case Pure::Kind::And:
        flatten_pure(p->kids[0], a);
        flatten_pure(p->kids[1], a);
        return;
    default:
        a.pure.push_back(p);
    }
}

void flatten(const FormulaPtr &f, Atoms &a, int &node) {
    switch (f->kind) {
    case Formula::Kind::Pure:
        flatten_pure(f->pure, a);
        return;
    case Formula::Kind::Ket: {
        const int id = node++;
        for (const auto &fac : f->ket.factors) {
            a.kets.push_back({fac, id});
        }
        return;
    }
    case Formula::Kind::Odot:
    case Formula::Kind::And:
        for (const auto &k : f->kids) {
            flatten(k, a, node);
        }
        return;
    default:
        a.other.push_back(f);
    }
}

PureState factor_state(const KetFactor &f) {
    return {QubitLayout(f.qvars), factor_vector(f)};
}

bool subset(const std::vector<std::string> &a, const std::vector<std::string> &b) {
    for (const auto &x : a) {
        if (std::find(b.begin(), b.end(), x) == b.end()) {
            return false;
        }
    }
    return true;
}

bool overlaps(const std::vector<std::string> &a, const std::vector<std::string> &b) {
    for (const auto &x : a) {
        if (std::find(b.begin(), b.end(), x) != b.end()) {
            return true;
        }
    }
    return false;
}

/// Binds x when a hypothesis reads x = e or e = x with e closed.
std::vector<std::pair<std::string, AexpPtr>> closed_bindings(const std::vector<PurePtr> &hyps) {
    std::vector<std::pair<std::string, AexpPtr>> out;
    for (const auto &h : hyps) {
        if (h->kind != Pure::Kind::Cmp || h->op != "=") {
            continue;
        }
        if (h->lhs->kind == Aexp::Kind::Var && free_vars(h->rhs).empty()) {
            out.emplace_back(h->lhs->name, h->rhs);
        } else if (h->rhs->kind == Aexp::Kind::Var && free_vars(h->lhs).empty()) {
            out.emplace_back(h->rhs->name, h->lhs);
        }
    }
    return out;
}

int window_for(size_t nvars, const EvalConfig &cfg, int64_t &lo, int64_t &hi) {
    lo = cfg.forall_lo;
    hi = cfg.forall_hi;
    const int64_t caps[] = {0, 1 << 20, 1 << 10, 16, 8};
    if (nvars >= 5) {
        return -1;
    }
    if (nvars >= 1) {
        lo = std::max(lo, -caps[nvars]);
        hi = std::min(hi, caps[nvars]);
    }
    return 0;
}

bool enumerate_all(const std::vector<std::string> &vars, size_t k, ClassicalState &sigma, int64_t lo, int64_t hi,
                   const std::function<bool(const ClassicalState &)> &body) {
    if (k == vars.size()) {
        return body(sigma);
    }
    for (int64_t v = lo; v <= hi; v++) {
        sigma.set(vars[k], v);
        if (!enumerate_all(vars, k + 1, sigma, lo, hi, body)) {
            return false;
        }
    }
    sigma.set(vars[k], 0);
    return true;
}

/// For every valuation on the window where all hyps hold, test returns true.
bool for_all_models(const std::vector<PurePtr> &hyps, const NameSet &seed_vars, const EvalConfig &cfg,
                    const std::function<bool(const ClassicalState &)> &test) {
    NameSet vars = seed_vars;
    std::vector<PurePtr> rel;
    std::vector<bool> taken(hyps.size(), false);
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t i = 0; i < hyps.size(); i++) {
            if (taken[i]) {
                continue;
            }
            const NameSet fv = free_vars(hyps[i]);
            bool touch = false;
            for (const auto &x : fv) {
                touch = touch || vars.count(x);
            }
            if (touch || fv.empty()) {
                taken[i] = true;
                rel.push_back(hyps[i]);
                vars.insert(fv.begin(), fv.end());
                grew = true;
            }
        }
    }
    int64_t lo, hi;
    if (window_for(vars.size(), cfg, lo, hi) < 0) {
        return false;
    }
    const std::vector<std::string> vs(vars.begin(), vars.end());
    ClassicalState sigma;
    return enumerate_all(vs, 0, sigma, lo, hi, [&](const ClassicalState &s) {
        for (const auto &h : rel) {
            try {
                if (!eval_pure(h, s, cfg)) {
                    return true;
                }
            } catch (const ArithError &) {
                return true;
            }
        }
        try {
            return test(s);
        } catch (const ArithError &) {
            return false;
        }
    });
}

struct KetMatch {
    bool ok = false;
    std::string reason;
};

/// Decides the goal kets from the hypothesis kets by joining, reducing and comparing.
KetMatch match_kets(const Atoms &lhs, const Atoms &rhs, std::vector<std::string> &trace) {
    KetMatch m;
    std::set<size_t> used;
    std::map<size_t, std::set<int>> goal_nodes_per_lhs;
    std::map<size_t, int> goals_per_lhs;
    std::vector<std::string> goal_qubits;
    for (const auto &g : rhs.kets) {
        goal_qubits.insert(goal_qubits.end(), g.factor.qvars.begin(), g.factor.qvars.end());
    }
    for (const auto &g : rhs.kets) {
        const auto &q = g.factor.qvars;
        std::vector<size_t> cand;
        for (size_t i = 0; i < lhs.kets.size(); i++) {
            if (overlaps(lhs.kets[i].factor.qvars, q)) {
                cand.push_back(i);
            }
        }
        // Drop hypotheses subsumed by a larger overlapping one.
        std::vector<size_t> keep;
        for (size_t i : cand) {
            bool dominated = false;
            for (size_t j : cand) {
                if (j == i) {
                    continue;
                }
                const auto &qi = lhs.kets[i].factor.qvars, &qj = lhs.kets[j].factor.qvars;
                if (subset(qi, qj) && (qi.size() < qj.size() || j < i)) {
                    dominated = true;
                }
            }
            if (!dominated) {
                keep.push_back(i);
            }
        }
        for (size_t a = 0; a < keep.size(); a++) {
            for (size_t b = a + 1; b < keep.size(); b++) {
                if (overlaps(lhs.kets[keep[a]].factor.qvars, lhs.kets[keep[b]].factor.qvars)) {
                    m.reason = "overlapping ket hypotheses on " + QubitLayout(q).str();
                    return m;
                }
            }
        }
        std::vector<std::string> joint_q;
        for (size_t i : keep) {
            const auto &qi = lhs.kets[i].factor.qvars;
            joint_q.insert(joint_q.end(), qi.begin(), qi.end());
        }
        if (!subset(q, joint_q)) {
            m.reason = "no ket hypothesis describes all of " + QubitLayout(q).str();
            return m;
        }
        PureState joint{QubitLayout(std::vector<std::string>{}), VectorXc::Ones(1)};
        std::set<int> nodes;
        for (size_t i : keep) {
            joint = tensor(joint, factor_state(lhs.kets[i].factor));
            nodes.insert(lhs.kets[i].node);
            used.insert(i);
            goal_nodes_per_lhs[i].insert(g.node);
            goals_per_lhs[i]++;
        }
        const MatrixXc rho = reduced(joint, QubitLayout(q));
        const VectorXc v = factor_vector(g.factor);
        if ((rho - v * v.adjoint()).norm() > kKetTol) {
            m.reason = "ket on " + QubitLayout(q).str() + " does not follow from the hypotheses";
            return m;
        }
        if (keep.size() > 1) {
            note(trace, nodes.size() > 1 ? "OdotT" : "Separ");
            if (nodes.size() > 1 && !subset(q, lhs.kets[keep[0]].factor.qvars)) {
                note(trace, "Separ");
            }
        }
        std::vector<std::string> restricted;
        for (const auto &x : joint_q) {
            if (std::find(q.begin(), q.end(), x) != q.end()) {
                restricted.push_back(x);
            }
        }
        if (restricted != q) {
            note(trace, "ReArr");
        }
        if (joint_q.size() > q.size()) {
            note(trace, "Separ");
        }
    }
    for (size_t i = 0; i < lhs.kets.size(); i++) {
        const bool dropped = !used.count(i) || !subset(lhs.kets[i].factor.qvars, goal_qubits);
        if (dropped) {
            note(trace, "PT");
            note(trace, "OdotE");
        }
        if (goal_nodes_per_lhs[i].size() > 1) {
            note(trace, "OdotT");
        }
        if (goals_per_lhs[i] > 1) {
            note(trace, "Separ");
        }
    }
    m.ok = true;
    return m;
}

EntailResult unknown(const std::string &why) {
    EntailResult r;
    r.status = EntailResult::Status::Unknown;
    r.reason = why;
    return r;
}

EntailResult proved(std::vector<std::string> trace = {}) {
    EntailResult r;
    r.status = EntailResult::Status::Proved;
    r.trace = std::move(trace);
    return r;
}

}  // namespace

Atoms flatten_atoms(const FormulaPtr &f) {
    Atoms a;
    int node = 0;
    flatten(f, a, node);
    return a;
}

FormulaPtr rebuild(const Atoms &a) {
    PurePtr p;
    for (const auto &x : a.pure) {
        p = p ? px::conj(p, x) : x;
    }
    FormulaPtr k;
    Ket ket;
    bool disjoint = true;
    std::vector<std::string> seen;
    for (const auto &x : a.kets) {
        disjoint = disjoint && !overlaps(x.factor.qvars, seen);
        seen.insert(seen.end(), x.factor.qvars.begin(), x.factor.qvars.end());
    }
    if (disjoint && !a.kets.empty()) {
        for (const auto &x : a.kets) {
            ket.factors.push_back(x.factor);
        }
        k = fx::ket(ket);
    } else {
        for (const auto &x : a.kets) {
            Ket one;
            one.factors.push_back(x.factor);
            k = k ? fx::conj(k, fx::ket(one)) : fx::ket(one);
        }
    }
    for (const auto &o : a.other) {
        k = k ? fx::conj(k, o) : o;
    }
    if (!p) {
        return k ? k : fx::truth();
    }
    return k ? fx::conj(fx::pure(p), k) : fx::pure(p);
}

bool mixing_safe(const FormulaPtr &f) {
    switch (f->kind) {
    case Formula::Kind::Pure:
    case Formula::Kind::Ket:
        return true;
    case Formula::Kind::Odot:
    case Formula::Kind::And:
        return mixing_safe(f->kids[0]) && mixing_safe(f->kids[1]);
    default:
        return !has_quantum(f);
    }
}

bool prove_pure(const std::vector<PurePtr> &hyps, const PurePtr &goal, const EvalConfig &cfg, bool *approximate) {
    if (goal->kind == Pure::Kind::True) {
        return true;
    }
    for (const auto &h : hyps) {
        if (h->kind == Pure::Kind::False || equal(h, goal)) {
            return true;
        }
    }
    if (goal->kind == Pure::Kind::And) {
        return prove_pure(hyps, goal->kids[0], cfg, approximate) && prove_pure(hyps, goal->kids[1], cfg, approximate);
    }
    if (goal->kind == Pure::Kind::Cmp && (goal->op == "=" || goal->op == "<=" || goal->op == ">=") &&
        equal(goal->lhs, goal->rhs)) {
        return true;
    }
    // Propagate closed equalities, then evaluate when nothing is left free.
    PurePtr g = goal;
    std::vector<PurePtr> hs = hyps;
    for (int round = 0; round < 8; round++) {
        const auto binds = closed_bindings(hs);
        bool changed = false;
        for (const auto &[x, e] : binds) {
            if (free_vars(g).count(x)) {
                g = substitute(g, x, e);
                changed = true;
            }
            // Closing other hypotheses lets chains like z = ord(x, N), x = 7, N = 15 bind z.
            for (auto &h : hs) {
                const bool defines = h->kind == Pure::Kind::Cmp && h->op == "=" &&
                                     ((h->lhs->kind == Aexp::Kind::Var && h->lhs->name == x) ||
                                      (h->rhs->kind == Aexp::Kind::Var && h->rhs->name == x));
                if (!defines && free_vars(h).count(x)) {
                    h = substitute(h, x, e);
                    changed = true;
                }
            }
        }
        if (!changed) {
            break;
        }
    }
    if (free_vars(g).empty()) {
        try {
            bool windowed = false;
            const bool v = eval_pure(g, ClassicalState{}, cfg, &windowed);
            if (windowed && approximate) {
                *approximate = true;
            }
            if (v) {
                return true;
            }
        } catch (const ArithError &) {
        }
    }
    bool windowed = false;
    const bool ok = for_all_models(hyps, free_vars(goal), cfg, [&](const ClassicalState &s) {
        return eval_pure(goal, s, cfg, &windowed);
    });
    if (ok && approximate) {
        *approximate = true;
    }
    return ok;
}

EntailResult entails(const FormulaPtr &lhs, const FormulaPtr &rhs, const EvalConfig &cfg) {
    if (equal(lhs, rhs)) {
        return proved();
    }
    std::vector<std::string> trace;
    scan_rules(lhs, trace);
    scan_rules(rhs, trace);
    if (reordered(lhs, rhs)) {
        note(trace, "OdotC");
    }
    const Atoms a = flatten_atoms(lhs);
    const Atoms b = flatten_atoms(rhs);
    if (a.contradiction) {
        return proved(trace);
    }
    if (b.saw_true || is_true(rhs)) {
        note(trace, "PT");
    }
    bool approximate = false;
    for (const auto &g : b.pure) {
        if (!prove_pure(a.pure, g, cfg, &approximate)) {
            return unknown("pure conjunct " + to_string(g) + " not derived");
        }
    }
    for (const auto &o : b.other) {
        bool found = false;
        for (const auto &h : a.other) {
            found = found || equal(h, o);
        }
        if (!found) {
            return unknown("no identical hypothesis for " + to_string(o));
        }
    }
    try {
        const KetMatch km = match_kets(a, b, trace);
        if (!km.ok) {
            return unknown(km.reason);
        }
    } catch (const std::exception &e) {
        return unknown(e.what());
    }
    for (const auto &h : a.pure) {
        bool kept = false;
        for (const auto &g : b.pure) {
            kept = kept || equal(h, g);
        }
        if (!kept) {
            note(trace, "AndE");
            break;
        }
    }
    if (b.pure.size() + b.kets.size() + b.other.size() > 1 && rhs->kind == Formula::Kind::And) {
        note(trace, "AndI");
    }
    if (!a.other.empty() && b.other.size() < a.other.size()) {
        note(trace, "AndE");
    }
    EntailResult r = proved(trace);
    r.approximate = approximate;
    return r;
}

EntailResult equivalent(const FormulaPtr &a, const FormulaPtr &b, const EvalConfig &cfg) {
    EntailResult r1 = entails(a, b, cfg);
    if (!r1.proved()) {
        return r1;
    }
    EntailResult r2 = entails(b, a, cfg);
    if (!r2.proved()) {
        r2.reason = "converse: " + r2.reason;
        return r2;
    }
    merge_trace(r1.trace, r2.trace);
    r1.approximate = r1.approximate || r2.approximate;
    return r1;
}

namespace {

struct Comp {
    BigRational weight;
    FormulaPtr f;
};

std::vector<Comp> positive_comps(const Dist &d) {
    std::vector<Comp> out;
    for (size_t i = 0; i < d.comps.size(); i++) {
        if (d.kind == Dist::Kind::Weighted) {
            if (d.weights[i] == 0) {
                continue;
            }
            out.push_back({BigRational(d.weights[i].numerator(), d.weights[i].denominator()), d.comps[i]});
        } else {
            out.push_back({BigRational(d.kind == Dist::Kind::Single ? 1 : 0), d.comps[i]});
        }
    }
    return out;
}

/// Memoized component entailments with merged traces.
class EdgeCache {
   public:
    EdgeCache(const std::vector<Comp> &l, const std::vector<Comp> &r, const EvalConfig &cfg)
        : l_(l), r_(r), cfg_(cfg), done_(l.size(), std::vector<int>(r.size(), -1)),
          res_(l.size(), std::vector<EntailResult>(r.size())) {
    }
    bool ok(size_t i, size_t j) {
        if (done_[i][j] < 0) {
            res_[i][j] = entails(l_[i].f, r_[j].f, cfg_);
            done_[i][j] = res_[i][j].proved() ? 1 : 0;
        }
        return done_[i][j] == 1;
    }
    const EntailResult &result(size_t i, size_t j) const {
        return res_[i][j];
    }
    /// Adds the traces of the chosen edges; OCon when an edge is not an identity.
    void collect(const std::vector<std::pair<size_t, size_t>> &edges, EntailResult &out) const {
        for (const auto &[i, j] : edges) {
            if (!equal(l_[i].f, r_[j].f)) {
                note(out.trace, "OCon");
            }
            merge_trace(out.trace, res_[i][j].trace);
            out.approximate = out.approximate || res_[i][j].approximate;
        }
    }

   private:
    const std::vector<Comp> &l_, &r_;
    const EvalConfig &cfg_;
    std::vector<std::vector<int>> done_;
    std::vector<std::vector<EntailResult>> res_;
};

EntailResult to_unweighted(const Dist &lhs, const Dist &rhs, const EvalConfig &cfg) {
    const auto l = positive_comps(lhs), r = positive_comps(rhs);
    EdgeCache cache(l, r, cfg);
    std::vector<int> sources(r.size(), 0);
    std::vector<std::pair<size_t, size_t>> edges;
    bool all = true;
    for (size_t i = 0; i < l.size() && all; i++) {
        // Prefer a target that tolerates merging or is still free.
        int pick = -1;
        for (size_t j = 0; j < r.size(); j++) {
            if (!cache.ok(i, j)) {
                continue;
            }
            if (sources[j] == 0 || mixing_safe(r[j].f)) {
                pick = (int)j;
                break;
            }
        }
        if (pick < 0) {
            all = false;
            break;
        }
        sources[pick]++;
        edges.emplace_back(i, (size_t)pick);
    }
    if (all) {
        EntailResult out = proved();
        if (lhs.kind != Dist::Kind::Unweighted) {
            note(out.trace, "Oplus");
        }
        for (int s : sources) {
            if (s > 1) {
                note(out.trace, "OMerg");
            }
        }
        cache.collect(edges, out);
        return out;
    }
    // Pure targets: every model of a component satisfies some target at each classical state.
    bool pure_targets = true;
    for (const auto &c : r) {
        pure_targets = pure_targets && c.f->is_pure();
    }
    if (!pure_targets) {
        return unknown("a component entails no target component");
    }
    for (const auto &c : l) {
        const Atoms a = flatten_atoms(c.f);
        if (a.contradiction) {
            continue;
        }
        NameSet vars;
        for (const auto &t : r) {
            const NameSet fv = free_vars(t.f);
            vars.insert(fv.begin(), fv.end());
        }
        const bool ok = for_all_models(a.pure, vars, cfg, [&](const ClassicalState &s) {
            for (const auto &t : r) {
                try {
                    if (eval_pure(t.f->pure, s, cfg)) {
                        return true;
                    }
                } catch (const ArithError &) {
                }
            }
            return false;
        });
        if (!ok) {
            return unknown("case split over " + to_string(c.f) + " leaves a classical state uncovered");
        }
    }
    EntailResult out = proved();
    note(out.trace, "Oplus");
    out.approximate = true;
    return out;
}

EntailResult to_weighted(const Dist &lhs, const Dist &rhs, const EvalConfig &cfg) {
    const auto l = positive_comps(lhs), r = positive_comps(rhs);
    EdgeCache cache(l, r, cfg);
    if (lhs.kind == Dist::Kind::Unweighted) {
        // Unknown source weights: each source must reach every target, which must tolerate mixing.
        std::vector<std::pair<size_t, size_t>> edges;
        for (size_t i = 0; i < l.size(); i++) {
            for (size_t j = 0; j < r.size(); j++) {
                if (!cache.ok(i, j)) {
                    return unknown("component " + to_string(l[i].f) + " does not entail " + to_string(r[j].f));
                }
                if (l.size() > 1 && !mixing_safe(r[j].f)) {
                    return unknown("cannot merge into " + to_string(r[j].f));
                }
                edges.emplace_back(i, j);
            }
        }
        EntailResult out = proved();
        note(out.trace, "OMerg");
        cache.collect(edges, out);
        return out;
    }
    const int nl = (int)l.size(), nr = (int)r.size();
    const int s = nl + nr, t = s + 1;
    MaxFlow<BigRational> mf(nl + nr + 2);
    std::vector<std::vector<int>> ids(nl, std::vector<int>(nr, -1));
    for (int i = 0; i < nl; i++) {
        mf.add_edge(s, i, l[i].weight);
        for (int j = 0; j < nr; j++) {
            if (cache.ok(i, j)) {
                ids[i][j] = mf.add_edge(i, nl + j, BigRational(1));
            }
        }
    }
    BigRational want(0);
    for (int j = 0; j < nr; j++) {
        mf.add_edge(nl + j, t, r[j].weight);
        want += r[j].weight;
    }
    const BigRational got = mf.run(s, t);
    if (got != want) {
        return unknown("no weight-preserving map from the components onto the targets");
    }
    std::vector<std::pair<size_t, size_t>> edges;
    std::vector<int> in(nr, 0), out_deg(nl, 0);
    for (int i = 0; i < nl; i++) {
        for (int j = 0; j < nr; j++) {
            if (ids[i][j] >= 0 && mf.flow(ids[i][j]) > 0) {
                edges.emplace_back(i, j);
                in[j]++;
                out_deg[i]++;
            }
        }
    }
    EntailResult out = proved();
    for (int j = 0; j < nr; j++) {
        if (in[j] > 1) {
            if (!mixing_safe(r[j].f)) {
                return unknown("cannot merge into " + to_string(r[j].f));
            }
            note(out.trace, "OMerg");
        }
    }
    for (int i = 0; i < nl; i++) {
        if (out_deg[i] > 1) {
            note(out.trace, "OMerg");
        }
    }
    cache.collect(edges, out);
    return out;
}

}  // namespace

EntailResult entails(const Dist &lhs, const Dist &rhs, const EvalConfig &cfg) {
    if (equal(lhs, rhs)) {
        return proved();
    }
    if (lhs.kind == Dist::Kind::Single && rhs.kind == Dist::Kind::Single) {
        return entails(lhs.comps[0], rhs.comps[0], cfg);
    }
    if (rhs.kind == Dist::Kind::Single) {
        // Collapse: every component entails the target and models may be mixed.
        const auto l = positive_comps(lhs);
        EntailResult out = proved();
        for (const auto &c : l) {
            EntailResult r = entails(c.f, rhs.comps[0], cfg);
            if (!r.proved()) {
                return r;
            }
            merge_trace(out.trace, r.trace);
            out.approximate = out.approximate || r.approximate;
        }
        if (l.size() > 1) {
            if (!mixing_safe(rhs.comps[0])) {
                return unknown("cannot merge into " + to_string(rhs.comps[0]));
            }
            note(out.trace, "OMerg");
        }
        return out;
    }
    if (rhs.kind == Dist::Kind::Unweighted) {
        return to_unweighted(lhs, rhs, cfg);
    }
    return to_weighted(lhs, rhs, cfg);
}

}  // namespace qhl
