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

#include "qhl/prover.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qhl/analysis.hpp"
#include "qhl/assert.hpp"
#include "qhl/parse.hpp"

namespace qhl {

std::string status_name(NodeStatus s) {
    switch (s) {
    case NodeStatus::Ok:
        return "ok";
    case NodeStatus::SideConditionFailure:
        return "side-condition-failure";
    case NodeStatus::RuleShapeMismatch:
        return "rule-shape-mismatch";
    case NodeStatus::DelegatedEntailmentUnknown:
        return "delegated-entailment-unknown";
    }
    return "?";
}

std::string overall_name(CheckReport::Overall o) {
    switch (o) {
    case CheckReport::Overall::Ok:
        return "ok";
    case CheckReport::Overall::Conditional:
        return "conditional";
    case CheckReport::Overall::Failed:
        return "failed";
    }
    return "?";
}

namespace {

ReportNode make_node(const std::string &rule, const Dist &pre, const ComPtr &c, const Dist &post) {
    ReportNode n;
    n.rule = rule;
    n.pre = to_string(pre);
    n.post = to_string(post);
    if (c) {
        n.command = to_string(c);
    }
    return n;
}

ReportNode &fail(ReportNode &n, NodeStatus s, const std::string &detail) {
    n.status = s;
    n.detail = detail;
    return n;
}

bool has_rule(const std::vector<Justification> &by, const std::string &r) {
    for (const auto &j : by) {
        if (j.rule == r) {
            return true;
        }
    }
    return false;
}

const Justification *find_rule(const std::vector<Justification> &by, const std::string &r) {
    for (const auto &j : by) {
        if (j.rule == r) {
            return &j;
        }
    }
    return nullptr;
}

std::string rule_for(const Com &c) {
    switch (c.kind) {
    case Com::Kind::Skip:
        return "Skip";
    case Com::Kind::Abort:
        return "Abort";
    case Com::Kind::Assign:
        return "Assgn";
    case Com::Kind::Random:
        return "Rand";
    case Com::Kind::Init:
        return "QInit";
    case Com::Kind::Unitary:
        return "QUnit";
    case Com::Kind::Measure:
        return "QMeas";
    case Com::Kind::Call:
        return "Call";
    default:
        return "";
    }
}

bool is_false(const Dist &d) {
    return d.kind == Dist::Kind::Single && d.comps[0]->is_pure() && d.comps[0]->pure->kind == Pure::Kind::False;
}

bool is_true(const Dist &d) {
    return d.kind == Dist::Kind::Single && d.comps[0]->is_pure() && d.comps[0]->pure->kind == Pure::Kind::True;
}

bool contains_pure(const std::vector<PurePtr> &atoms, const PurePtr &p) {
    for (const auto &a : atoms) {
        if (equal(a, p)) {
            return true;
        }
    }
    return false;
}

/// Values forced by closed equalities among the pure conjuncts of f.
ClassicalState forced_values(const FormulaPtr &f) {
    ClassicalState s;
    for (const auto &p : flatten_atoms(f).pure) {
        if (p->kind == Pure::Kind::Cmp && p->op == "=" && p->lhs->kind == Aexp::Kind::Var) {
            try {
                s.set(p->lhs->name, eval_aexp(p->rhs, s));
            } catch (const std::exception &) {
            }
        }
    }
    return s;
}

/// Joint state of the pairwise disjoint kets of a, over the concatenation of their qubits.
std::optional<PureState> joint_ket(const Atoms &a) {
    PureState joint{QubitLayout(std::vector<std::string>{}), VectorXc::Ones(1)};
    for (const auto &k : a.kets) {
        const QubitLayout l(k.factor.qvars);
        if (!joint.layout.disjoint(l)) {
            return std::nullopt;
        }
        joint = tensor(joint, PureState{l, factor_vector(k.factor)});
    }
    return joint;
}

ReportNode check_skip(const Dist &pre, const ComPtr &c, const Dist &post) {
    ReportNode n = make_node("Skip", pre, c, post);
    if (c->kind != Com::Kind::Skip) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Skip applies to skip only");
    }
    if (!equal(pre, post)) {
        return fail(n, NodeStatus::RuleShapeMismatch, "pre and post differ");
    }
    return n;
}

ReportNode check_abort(const Dist &pre, const ComPtr &c, const Dist &post) {
    ReportNode n = make_node("Abort", pre, c, post);
    if (c->kind != Com::Kind::Abort) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Abort applies to abort only");
    }
    if (!is_false(post)) {
        return fail(n, NodeStatus::RuleShapeMismatch, "postcondition must be false");
    }
    return n;
}

/// Equal up to associativity, commutativity and duplication of ∧ among pure atoms.
bool same_conjuncts(const FormulaPtr &a, const FormulaPtr &b) {
    if (equal(a, b)) {
        return true;
    }
    Atoms x = flatten_atoms(a), y = flatten_atoms(b);
    if (!x.other.empty() || !y.other.empty() || x.contradiction != y.contradiction) {
        return false;
    }
    for (const auto &p : x.pure) {
        if (!contains_pure(y.pure, p)) {
            return false;
        }
    }
    for (const auto &p : y.pure) {
        if (!contains_pure(x.pure, p)) {
            return false;
        }
    }
    x.pure.clear();
    y.pure.clear();
    return equal(rebuild(x), rebuild(y));
}

bool same_conjuncts(const Dist &a, const Dist &b) {
    if (a.kind != b.kind || a.comps.size() != b.comps.size() || a.weights != b.weights) {
        return false;
    }
    for (size_t i = 0; i < a.comps.size(); i++) {
        if (!same_conjuncts(a.comps[i], b.comps[i])) {
            return false;
        }
    }
    return true;
}

ReportNode check_assign(const Dist &pre, const ComPtr &c, const Dist &post) {
    ReportNode n = make_node("Assgn", pre, c, post);
    if (c->kind != Com::Kind::Assign) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Assgn applies to x := a only");
    }
    const Dist want = substitute(post, c->var, c->expr);
    if (!same_conjuncts(pre, want)) {
        return fail(n, NodeStatus::RuleShapeMismatch, "precondition should be " + to_string(want));
    }
    return n;
}

ReportNode check_random(const Dist &pre, const ComPtr &c, const Dist &post) {
    ReportNode n = make_node("Rand", pre, c, post);
    if (c->kind != Com::Kind::Random) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Rand applies to x := random(lo, hi) only");
    }
    if (post.kind != Dist::Kind::Single || !post.comps[0]->is_pure()) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Rand needs a pure postcondition");
    }
    const std::string &x = c->var;
    const PurePtr range = px::conj(px::cmp("<=", c->lo, ax::var(x)), px::cmp("<=", ax::var(x), c->hi));
    const PurePtr want = px::forall(x, px::implies(range, post.comps[0]->pure));
    if (pre.kind != Dist::Kind::Single || !pre.comps[0]->is_pure() || !equal(pre.comps[0]->pure, want)) {
        return fail(n, NodeStatus::RuleShapeMismatch, "precondition should be " + to_string(want));
    }
    return n;
}

ReportNode check_init(const Dist &pre, const ComPtr &c, const Dist &post, const EvalConfig &cfg) {
    ReportNode n = make_node("QInit", pre, c, post);
    if (c->kind != Com::Kind::Init) {
        return fail(n, NodeStatus::RuleShapeMismatch, "QInit applies to q := |0> only");
    }
    if (!is_true(pre)) {
        return fail(n, NodeStatus::RuleShapeMismatch, "precondition must be true");
    }
    if (post.kind != Dist::Kind::Single) {
        return fail(n, NodeStatus::RuleShapeMismatch, "postcondition must be a state formula");
    }
    Ket zero;
    zero.factors.push_back(pattern_factor(c->qvars, std::string(c->qvars.size(), '0')));
    const Atoms a = flatten_atoms(post.comps[0]);
    if (!a.pure.empty() || !a.other.empty()) {
        return fail(n, NodeStatus::RuleShapeMismatch, "postcondition must be |0> on the initialized qubits");
    }
    const EntailResult r = equivalent(post.comps[0], fx::ket(zero), cfg);
    if (!r.proved()) {
        return fail(n, NodeStatus::RuleShapeMismatch, "postcondition is not |0> on " + QubitLayout(c->qvars).str());
    }
    n.trace = r.trace;
    return n;
}

ReportNode check_unitary(const Dist &pre, const ComPtr &c, const Dist &post, const Program &prog,
                         const EvalConfig &cfg) {
    ReportNode n = make_node("QUnit", pre, c, post);
    if (c->kind != Com::Kind::Unitary) {
        return fail(n, NodeStatus::RuleShapeMismatch, "QUnit applies to gate applications only");
    }
    if (pre.kind != Dist::Kind::Single || post.kind != Dist::Kind::Single) {
        return fail(n, NodeStatus::RuleShapeMismatch, "QUnit relates state formulas");
    }
    Operator u;
    try {
        u = resolve_gate(prog, *c, forced_values(pre.comps[0]));
    } catch (const std::exception &e) {
        return fail(n, NodeStatus::SideConditionFailure, std::string("cannot resolve the gate: ") + e.what());
    }
    FormulaPtr want;
    try {
        want = adjoint_pre(post.comps[0], u.mat, c->qvars);
    } catch (const std::exception &e) {
        return fail(n, NodeStatus::RuleShapeMismatch, e.what());
    }
    const EntailResult r = equivalent(pre.comps[0], want, cfg);
    if (!r.proved()) {
        return fail(n, NodeStatus::RuleShapeMismatch, "precondition should be " + to_string(want) + ": " + r.reason);
    }
    n.trace = r.trace;
    n.approximate = r.approximate;
    return n;
}

ReportNode check_measure(const Dist &pre, const ComPtr &c, const Dist &post, const Program &prog) {
    ReportNode n = make_node("QMeas", pre, c, post);
    if (c->kind != Com::Kind::Measure) {
        return fail(n, NodeStatus::RuleShapeMismatch, "QMeas applies to x := M[q] only");
    }
    if (pre.kind != Dist::Kind::Single) {
        return fail(n, NodeStatus::RuleShapeMismatch, "QMeas needs a state-formula precondition (use Sum to split)");
    }
    const MeasDecl *m = prog.find_measurement(c->name);
    if (!m) {
        return fail(n, NodeStatus::SideConditionFailure, "unknown measurement " + c->name);
    }
    const Atoms a = flatten_atoms(pre.comps[0]);
    const auto joint = joint_ket(a);
    if (!joint || !a.other.empty()) {
        return fail(n, NodeStatus::RuleShapeMismatch, "precondition must be a ket with pure conjuncts");
    }
    for (const auto &q : c->qvars) {
        if (!joint->layout.contains(q)) {
            return fail(n, NodeStatus::RuleShapeMismatch, "precondition ket does not describe " + q);
        }
    }
    std::vector<Rational> weights = post.weights;
    if (post.kind == Dist::Kind::Single) {
        weights = {Rational(1)};
    } else if (post.kind != Dist::Kind::Weighted) {
        return fail(n, NodeStatus::RuleShapeMismatch, "postcondition must be a weighted sum");
    }
    std::vector<bool> used(post.comps.size(), false);
    std::vector<PurePtr> covered;
    double total = 0;
    for (size_t i = 0; i < m->ops.size(); i++) {
        const VectorXc w = apply_matrix(*joint, m->ops[i], QubitLayout(c->qvars));
        const double p = w.squaredNorm();
        total += p;
        if (p < kPrune) {
            continue;
        }
        const VectorXc v = w / std::sqrt(p);
        bool matched = false;
        std::optional<Rational> wrong_weight;
        for (size_t j = 0; j < post.comps.size() && !matched; j++) {
            if (used[j]) {
                continue;
            }
            const bool weight_ok = std::abs(boost::rational_cast<double>(weights[j]) - p) <= kTol;
            const Atoms b = flatten_atoms(post.comps[j]);
            const auto pj = joint_ket(b);
            if (!pj || !b.other.empty() || !pj->layout.same_set(joint->layout)) {
                continue;
            }
            const VectorXc pv = kernel::permute(pj->amp, pj->layout, joint->layout);
            if (!equal_up_to_phase(pv, v, kKetTol)) {
                continue;
            }
            bool inside = true;
            std::vector<PurePtr> inst;
            for (const auto &pa : b.pure) {
                inst.push_back(substitute(pa, c->var, ax::num((int64_t)i)));
                inside = inside && contains_pure(a.pure, inst.back());
            }
            if (!inside) {
                continue;
            }
            if (!weight_ok) {
                wrong_weight = weights[j];
                continue;
            }
            used[j] = true;
            matched = true;
            covered.insert(covered.end(), inst.begin(), inst.end());
        }
        if (!matched && wrong_weight) {
            return fail(n, NodeStatus::SideConditionFailure,
                        "outcome " + std::to_string(i) + " has probability " + std::to_string(p) +
                            " but its component carries " + to_string(*wrong_weight));
        }
        if (!matched) {
            return fail(n, NodeStatus::RuleShapeMismatch,
                        "no postcondition component for outcome " + std::to_string(i) + " with probability " +
                            std::to_string(p));
        }
    }
    if (std::abs(total - 1) > kTol) {
        return fail(n, NodeStatus::SideConditionFailure, "outcome probabilities sum to " + std::to_string(total));
    }
    for (size_t j = 0; j < used.size(); j++) {
        if (!used[j]) {
            return fail(n, NodeStatus::RuleShapeMismatch,
                        "postcondition component " + to_string(post.comps[j]) + " matches no outcome");
        }
    }
    for (const auto &pa : a.pure) {
        if (!contains_pure(covered, pa)) {
            return fail(n, NodeStatus::RuleShapeMismatch,
                        "precondition conjunct " + to_string(pa) + " is not among the P_i[i/x]");
        }
    }
    return n;
}

ReportNode check_call(const Dist &pre, const ComPtr &c, const Dist &post, const Program &prog) {
    ReportNode n = make_node("Call", pre, c, post);
    if (c->kind != Com::Kind::Call || !prog.find_macro(c->name)) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Call applies to macro calls only");
    }
    n.conditional = true;
    n.detail = "contract of macro " + c->name + " assumed";
    return n;
}

ReportNode check_atomic(const std::string &rule, const Dist &pre, const ComPtr &c, const Dist &post,
                        const Program &prog, const EvalConfig &cfg) {
    if (rule == "Skip") {
        return check_skip(pre, c, post);
    }
    if (rule == "Abort") {
        return check_abort(pre, c, post);
    }
    if (rule == "Assgn") {
        return check_assign(pre, c, post);
    }
    if (rule == "Rand") {
        return check_random(pre, c, post);
    }
    if (rule == "QInit") {
        return check_init(pre, c, post, cfg);
    }
    if (rule == "QUnit") {
        return check_unitary(pre, c, post, prog, cfg);
    }
    if (rule == "QMeas") {
        return check_measure(pre, c, post, prog);
    }
    if (rule == "Call") {
        return check_call(pre, c, post, prog);
    }
    ReportNode n = make_node(rule, pre, c, post);
    return fail(n, NodeStatus::RuleShapeMismatch, "rule " + rule + " does not apply to a single command");
}

std::string weight_sum_error(const Dist &d) {
    if (d.kind != Dist::Kind::Weighted) {
        return "";
    }
    Rational total = 0;
    for (const auto &w : d.weights) {
        total += w;
    }
    return total == 1 ? "" : "weights sum to " + to_string(total);
}

ReportNode check_sum(const std::string &rule, const Dist &pre, const ComPtr &c, const Dist &post,
                     const Program &prog, const EvalConfig &cfg) {
    ReportNode n = make_node(rule + ", Sum", pre, c, post);
    if (pre.kind != Dist::Kind::Weighted) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Sum needs a weighted precondition");
    }
    for (const Dist *d : {&pre, &post}) {
        const std::string e = weight_sum_error(*d);
        if (!e.empty()) {
            return fail(n, NodeStatus::SideConditionFailure, e);
        }
    }
    std::vector<Rational> pw = post.weights;
    if (post.kind == Dist::Kind::Single) {
        pw = {Rational(1)};
    } else if (post.kind != Dist::Kind::Weighted) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Sum needs a weighted postcondition");
    }
    size_t idx = 0;
    for (size_t i = 0; i < pre.comps.size(); i++) {
        const Rational p = pre.weights[i];
        std::optional<ReportNode> last;
        bool found = false;
        Rational acc = 0;
        for (size_t k = 1; idx + k <= post.comps.size(); k++) {
            acc += pw[idx + k - 1];
            if (acc != p) {
                if (acc > p) {
                    break;
                }
                continue;
            }
            Dist sub;
            if (k == 1) {
                sub = Dist::single(post.comps[idx]);
            } else {
                std::vector<Rational> ws;
                std::vector<FormulaPtr> cs;
                for (size_t j = idx; j < idx + k; j++) {
                    ws.push_back(p == 0 ? Rational(0) : pw[j] / p);
                    cs.push_back(post.comps[j]);
                }
                sub = Dist::weighted(ws, cs);
            }
            ReportNode kid = check_atomic(rule, Dist::single(pre.comps[i]), c, sub, prog, cfg);
            if (kid.status == NodeStatus::Ok) {
                n.kids.push_back(kid);
                idx += k;
                found = true;
                break;
            }
            last = kid;
        }
        if (!found) {
            if (last) {
                n.kids.push_back(*last);
                return fail(n, last->status, "component " + std::to_string(i + 1) + ": " + last->detail);
            }
            return fail(n, NodeStatus::SideConditionFailure,
                        "no postcondition components carry the weight of component " + std::to_string(i + 1));
        }
    }
    if (idx != post.comps.size()) {
        return fail(n, NodeStatus::RuleShapeMismatch, "postcondition has unmatched components");
    }
    for (const auto &k : n.kids) {
        n.conditional = n.conditional || k.conditional;
    }
    return n;
}

ReportNode check_conj(const Dist &pre, const ComPtr &c, const Dist &post, const Program &prog,
                      const EvalConfig &cfg) {
    ReportNode n = make_node("Conj", pre, c, post);
    if (pre.kind != Dist::Kind::Single || post.kind != Dist::Kind::Single) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Conj relates state formulas");
    }
    auto split = [](const FormulaPtr &f) -> std::optional<std::pair<FormulaPtr, FormulaPtr>> {
        if (f->kind == Formula::Kind::And) {
            return std::make_pair(f->kids[0], f->kids[1]);
        }
        if (f->is_pure() && f->pure->kind == Pure::Kind::And) {
            return std::make_pair(fx::pure(f->pure->kids[0]), fx::pure(f->pure->kids[1]));
        }
        return std::nullopt;
    };
    const auto a = split(pre.comps[0]), b = split(post.comps[0]);
    if (!a || !b) {
        return fail(n, NodeStatus::RuleShapeMismatch, "Conj needs conjunctions on both sides");
    }
    const std::string rule = rule_for(*c);
    n.kids.push_back(check_atomic(rule, Dist::single(a->first), c, Dist::single(b->first), prog, cfg));
    n.kids.push_back(check_atomic(rule, Dist::single(a->second), c, Dist::single(b->second), prog, cfg));
    for (const auto &k : n.kids) {
        if (k.status != NodeStatus::Ok) {
            return fail(n, k.status, "premise: " + k.detail);
        }
        n.conditional = n.conditional || k.conditional;
    }
    return n;
}

}  // namespace

FormulaPtr adjoint_pre(const FormulaPtr &f, const MatrixXc &u, const std::vector<std::string> &qs) {
    const Atoms a = flatten_atoms(f);
    for (const auto &o : a.other) {
        for (const auto &q : free_qvars(o)) {
            if (std::find(qs.begin(), qs.end(), q) != qs.end()) {
                throw std::invalid_argument("cannot push the adjoint through " + to_string(o));
            }
        }
    }
    Atoms out;
    out.pure = a.pure;
    out.other = a.other;
    PureState joint{QubitLayout(std::vector<std::string>{}), VectorXc::Ones(1)};
    int first = -1;
    for (size_t i = 0; i < a.kets.size(); i++) {
        const auto &fq = a.kets[i].factor.qvars;
        bool touches = false;
        for (const auto &q : fq) {
            touches = touches || std::find(qs.begin(), qs.end(), q) != qs.end();
        }
        if (!touches) {
            out.kets.push_back(a.kets[i]);
            continue;
        }
        const QubitLayout l(fq);
        if (!joint.layout.disjoint(l)) {
            throw std::invalid_argument("overlapping kets on " + l.str());
        }
        joint = tensor(joint, PureState{l, factor_vector(a.kets[i].factor)});
        if (first < 0) {
            first = (int)out.kets.size();
        }
    }
    for (const auto &q : qs) {
        if (!joint.layout.contains(q)) {
            throw std::invalid_argument("postcondition has no ket covering " + q);
        }
    }
    const PureState moved = apply_unitary(joint, Operator{QubitLayout(qs), u.adjoint(), OpKind::Unitary}, QubitLayout(qs));
    KetAtom k;
    k.factor = ket_from_state(moved, 1e-14).factors[0];
    out.kets.insert(out.kets.begin() + first, k);
    return rebuild(out);
}

ReportNode check_node(const std::vector<Justification> &by, const Dist &pre, const ComPtr &c, const Dist &post,
                      const Program &prog, const EvalConfig &cfg) {
    if (has_rule(by, "Absurd")) {
        ReportNode n = make_node("Absurd", pre, c, post);
        if (!is_false(pre)) {
            fail(n, NodeStatus::RuleShapeMismatch, "precondition must be false");
        }
        return n;
    }
    std::string rule;
    for (const auto &j : by) {
        if (j.rule != "Sum" && j.rule != "Conj") {
            rule = j.rule == "Assign" ? "Assgn" : j.rule;
            break;
        }
    }
    if (rule.empty()) {
        rule = rule_for(*c);
    }
    if (has_rule(by, "Sum")) {
        return check_sum(rule, pre, c, post, prog, cfg);
    }
    if (has_rule(by, "Conj")) {
        return check_conj(pre, c, post, prog, cfg);
    }
    if (pre.kind == Dist::Kind::Weighted && pre.comps.size() > 1 && rule != "Assgn" && rule != "Skip") {
        // A weighted precondition is handled componentwise even when Sum is left implicit.
        return check_sum(rule, pre, c, post, prog, cfg);
    }
    return check_atomic(rule, pre, c, post, prog, cfg);
}

ReportNode check_entailment(const std::vector<Justification> &by, const Dist &pre, const Dist &post,
                            const EvalConfig &cfg) {
    std::string rule = "Conseq";
    bool numeric = false;
    for (const auto &j : by) {
        if (j.rule == "numeric") {
            numeric = true;
        } else {
            rule = j.rule;
        }
        for (const auto &a : j.args) {
            numeric = numeric || a == "numeric";
        }
    }
    ReportNode n = make_node(rule, pre, nullptr, post);
    const std::string e = weight_sum_error(post);
    if (!e.empty()) {
        return fail(n, NodeStatus::SideConditionFailure, e);
    }
    const EntailResult r = entails(pre, post, cfg);
    n.trace = r.trace;
    n.approximate = r.approximate;
    if (!r.proved()) {
        n.conditional = true;
        return fail(n, NodeStatus::DelegatedEntailmentUnknown, r.reason);
    }
    if (numeric) {
        n.conditional = true;
        n.detail = "verified numerically (equal_up_to_phase)";
    } else if (r.approximate) {
        n.detail = "pure implication checked on the window";
    }
    return n;
}

namespace {

/// Elaborates outline items into checked nodes, threading the current assertion.
class Elaborator {
   public:
    Elaborator(const Program &prog, const EvalConfig &cfg) : prog_(prog), cfg_(cfg) {
    }

    std::optional<Dist> first;

    std::optional<Dist> run(const std::vector<OutlineItem> &items, std::optional<Dist> cur, ReportNode &parent) {
        const size_t start = parent.kids.size();
        int commands = 0;
        for (const auto &it : items) {
            commands += it.kind != OutlineItem::Kind::Assert;
        }
        const std::optional<Dist> pre = cur;
        cur = steps(items, cur, parent);
        if (commands >= 2) {
            // Composition is implicit in the outline; the Seq node groups the steps it composes.
            ReportNode seq;
            seq.rule = "Seq";
            seq.line = parent.kids.size() > start ? parent.kids[start].line : 0;
            seq.pre = pre ? to_string(*pre) : "";
            seq.post = cur ? to_string(*cur) : "";
            seq.kids.assign(std::make_move_iterator(parent.kids.begin() + start),
                            std::make_move_iterator(parent.kids.end()));
            parent.kids.resize(start);
            parent.kids.push_back(std::move(seq));
        }
        return cur;
    }

   private:
    std::optional<Dist> steps(const std::vector<OutlineItem> &items, std::optional<Dist> cur, ReportNode &parent) {
        const OutlineItem *pending = nullptr;
        for (const auto &it : items) {
            switch (it.kind) {
            case OutlineItem::Kind::Assert: {
                ReportNode n;
                if (pending) {
                    n = apply(*pending, *cur, it, parent);
                    pending = nullptr;
                } else if (!cur) {
                    n = make_node("Assume", it.dist, nullptr, it.dist);
                    const std::string e = weight_sum_error(it.dist);
                    if (!e.empty()) {
                        fail(n, NodeStatus::SideConditionFailure, e);
                    }
                    if (!first) {
                        first = it.dist;
                    }
                } else {
                    n = check_entailment(it.by, *cur, it.dist, cfg_);
                }
                n.line = it.line;
                parent.kids.push_back(n);
                cur = it.dist;
                break;
            }
            case OutlineItem::Kind::Command:
            case OutlineItem::Kind::If:
            case OutlineItem::Kind::While:
                if (pending || !cur) {
                    ReportNode n;
                    n.rule = "Outline";
                    n.line = it.line;
                    n.command = to_string(it.com);
                    fail(n, NodeStatus::RuleShapeMismatch,
                         pending ? "command without a postcondition before it" : "command before any assertion");
                    parent.kids.push_back(n);
                    if (!cur) {
                        return cur;
                    }
                }
                pending = &it;
                break;
            case OutlineItem::Kind::Frame:
                if (pending) {
                    ReportNode n;
                    n.rule = "Outline";
                    n.line = it.line;
                    fail(n, NodeStatus::RuleShapeMismatch, "command without a postcondition before a frame");
                    parent.kids.push_back(n);
                    pending = nullptr;
                }
                cur = frame(it, cur, parent);
                break;
            }
        }
        if (pending) {
            ReportNode n;
            n.rule = "Outline";
            n.line = pending->line;
            n.command = to_string(pending->com);
            fail(n, NodeStatus::RuleShapeMismatch, "command without a postcondition");
            parent.kids.push_back(n);
        }
        return cur;
    }

    const Program &prog_;
    const EvalConfig &cfg_;

    ReportNode apply(const OutlineItem &cmd, const Dist &pre, const OutlineItem &post, ReportNode &) {
        if (cmd.kind == OutlineItem::Kind::If) {
            return cond(cmd, pre, post);
        }
        if (cmd.kind == OutlineItem::Kind::While) {
            return loop(cmd, pre, post);
        }
        ReportNode n = check_node(post.by, pre, cmd.com, post.dist, prog_, cfg_);
        n.line = post.line;
        return n;
    }

    /// The guard is one of f's pure atoms, or follows from them; the latter is the implicit Conseq F ⇔ F ∧ b.
    bool holds_guard(const FormulaPtr &f, const PurePtr &b) const {
        const Atoms a = flatten_atoms(f);
        const Atoms g = flatten_atoms(fx::pure(b));
        bool syntactic = true;
        for (const auto &p : g.pure) {
            syntactic = syntactic && contains_pure(a.pure, p);
        }
        return syntactic || implied(a.pure, b);
    }

    bool holds_negated_guard(const FormulaPtr &f, const PurePtr &b) const {
        const Atoms a = flatten_atoms(f);
        if (contains_pure(a.pure, px::negate(b))) {
            return true;
        }
        if (b->kind == Pure::Kind::Not && holds_guard(f, b->kids[0])) {
            return true;
        }
        if (b->kind == Pure::Kind::Cmp) {
            const std::string op = px::complement_op(b->op);
            if (!op.empty() && contains_pure(a.pure, px::cmp(op, b->lhs, b->rhs))) {
                return true;
            }
        }
        return implied(a.pure, px::negate(b));
    }

    /// Exact implication only; a window-decided implication does not discharge a guard.
    bool implied(const std::vector<PurePtr> &hyps, const PurePtr &goal) const {
        if (hyps.empty()) {
            return false;
        }
        bool approximate = false;
        try {
            return prove_pure(hyps, goal, cfg_, &approximate) && !approximate;
        } catch (const std::exception &) {
            return false;
        }
    }

    /// p·d1 ⊕ (1−p)·d2 flattened into one sum.
    static Dist combine(const Rational &p, const Dist &d1, const Dist &d2) {
        std::vector<Rational> ws;
        std::vector<FormulaPtr> cs;
        bool unweighted = false;
        auto add = [&](const Rational &q, const Dist &d) {
            if (q == 0) {
                return;
            }
            unweighted = unweighted || d.kind == Dist::Kind::Unweighted;
            for (size_t i = 0; i < d.comps.size(); i++) {
                ws.push_back(d.kind == Dist::Kind::Weighted ? q * d.weights[i] : q);
                cs.push_back(d.comps[i]);
            }
        };
        add(p, d1);
        add(1 - p, d2);
        if (cs.size() == 1) {
            return Dist::single(cs[0]);
        }
        return unweighted ? Dist::unweighted(cs) : Dist::weighted(ws, cs);
    }

    void close_with(ReportNode &n, const Dist &got, const Dist &want, int line) {
        if (equal(got, want)) {
            return;
        }
        ReportNode e = check_entailment({{"Conseq", {}}}, got, want, cfg_);
        e.line = line;
        n.kids.push_back(e);
    }

    ReportNode cond(const OutlineItem &it, const Dist &pre, const OutlineItem &post) {
        ReportNode n = make_node("Cond", pre, it.com, post.dist);
        n.line = it.line;
        std::optional<Rational> p;
        if (const Justification *j = find_rule(post.by, "Cond"); j && !j->args.empty()) {
            try {
                const std::string &a = j->args[0];
                const size_t slash = a.find('/');
                const long long num = std::stoll(a.substr(0, slash));
                const long long den = slash == std::string::npos ? 1 : std::stoll(a.substr(slash + 1));
                p = Rational(num, den);
                if (*p < Rational(0) || *p > Rational(1)) {
                    throw std::out_of_range("weight");
                }
            } catch (const std::exception &) {
                return fail(n, NodeStatus::RuleShapeMismatch, "Cond expects a rational weight, got " + j->args[0]);
            }
        }
        FormulaPtr a1, a2;
        bool unweighted = false;
        if (pre.kind == Dist::Kind::Weighted && pre.comps.size() == 2) {
            if (p && *p != pre.weights[0]) {
                return fail(n, NodeStatus::RuleShapeMismatch, "precondition weight differs from Cond parameter");
            }
            p = pre.weights[0];
            a1 = pre.comps[0];
            a2 = pre.comps[1];
        } else if (pre.kind == Dist::Kind::Unweighted && pre.comps.size() == 2 && !p) {
            // Some split weight exists; the branch posts are then joined without weights.
            unweighted = true;
            p = Rational(1, 2);
            a1 = pre.comps[0];
            a2 = pre.comps[1];
        } else if (pre.kind == Dist::Kind::Single) {
            if (!p) {
                p = holds_guard(pre.comps[0], it.guard) ? Rational(1) : Rational(0);
            }
            if (*p == 1) {
                a1 = pre.comps[0];
            } else if (*p == 0) {
                a2 = pre.comps[0];
            } else {
                return fail(n, NodeStatus::RuleShapeMismatch, "Cond with 0 < p < 1 needs a two-component precondition");
            }
        } else {
            return fail(n, NodeStatus::RuleShapeMismatch, "Cond needs p(F1 /\\ b) (+) (1-p)(F2 /\\ ~b)");
        }
        if (a1 && !holds_guard(a1, it.guard)) {
            return fail(n, NodeStatus::RuleShapeMismatch, "then-branch precondition lacks the guard " + to_string(it.guard));
        }
        if (a2 && !holds_negated_guard(a2, it.guard)) {
            return fail(n, NodeStatus::RuleShapeMismatch, "else-branch precondition lacks the negated guard");
        }
        Dist post1 = Dist::single(fx::falsity()), post2 = Dist::single(fx::falsity());
        if (a1) {
            ReportNode b;
            b.rule = "then";
            b.line = it.line;
            post1 = *run(it.items, Dist::single(a1), b);
            n.kids.push_back(b);
        }
        if (a2) {
            ReportNode b;
            b.rule = "else";
            b.line = it.line;
            post2 = *run(it.else_items, Dist::single(a2), b);
            n.kids.push_back(b);
        }
        if (!a1 || !a2) {
            n.detail = std::string("the ") + (a1 ? "else" : "then") + " branch carries no weight";
        }
        Dist joined = combine(*p, post1, post2);
        if (unweighted && joined.kind == Dist::Kind::Weighted) {
            joined = Dist::unweighted(joined.comps);
        }
        close_with(n, joined, post.dist, post.line);
        return n;
    }

    ReportNode loop(const OutlineItem &it, const Dist &pre, const OutlineItem &post) {
        ReportNode n = make_node("While", pre, it.com, post.dist);
        n.line = it.line;
        if (pre.kind != Dist::Kind::Unweighted || pre.comps.size() != 2) {
            return fail(n, NodeStatus::RuleShapeMismatch, "While needs the invariant (F0 /\\ b) (+) (F1 /\\ ~b)");
        }
        if (!holds_guard(pre.comps[0], it.guard)) {
            return fail(n, NodeStatus::RuleShapeMismatch, "first invariant component lacks the guard");
        }
        if (!holds_negated_guard(pre.comps[1], it.guard)) {
            return fail(n, NodeStatus::RuleShapeMismatch, "second invariant component lacks the negated guard");
        }
        ReportNode body;
        body.rule = "body";
        body.line = it.line;
        const Dist got = *run(it.items, Dist::single(pre.comps[0]), body);
        close_with(body, got, pre, it.line);
        n.kids.push_back(body);
        close_with(n, Dist::single(pre.comps[1]), post.dist, post.line);
        return n;
    }

    static void odot_ops(const FormulaPtr &f, std::vector<FormulaPtr> &out) {
        if (f->kind == Formula::Kind::Odot) {
            odot_ops(f->kids[0], out);
            odot_ops(f->kids[1], out);
        } else {
            out.push_back(f);
        }
    }

    static bool covered_by(const FormulaPtr &op, const Atoms &f1, const std::vector<std::string> &q1) {
        const Atoms a = flatten_atoms(op);
        if (a.pure.empty() && a.kets.empty() && a.other.empty()) {
            return false;
        }
        for (const auto &p : a.pure) {
            if (!contains_pure(f1.pure, p)) {
                return false;
            }
        }
        for (const auto &k : a.kets) {
            for (const auto &q : k.factor.qvars) {
                if (std::find(q1.begin(), q1.end(), q) == q1.end()) {
                    return false;
                }
            }
        }
        for (const auto &o : a.other) {
            bool found = false;
            for (const auto &x : f1.other) {
                found = found || equal(x, o);
            }
            if (!found) {
                return false;
            }
        }
        return true;
    }

    static FormulaPtr fold_odot(const std::vector<FormulaPtr> &ops) {
        FormulaPtr f;
        for (const auto &o : ops) {
            f = f ? fx::odot(f, o) : o;
        }
        return f ? f : fx::truth();
    }

    std::optional<Dist> frame(const OutlineItem &it, const std::optional<Dist> &cur, ReportNode &parent) {
        const Dist f1d = Dist::single(it.local_pre);
        ReportNode n = make_node("QFrame", cur ? *cur : f1d, it.com, f1d);
        n.line = it.line;
        if (!cur || cur->kind != Dist::Kind::Single) {
            fail(n, NodeStatus::RuleShapeMismatch, "frame needs a state-formula assertion before it");
            parent.kids.push_back(n);
            return cur;
        }
        const FormulaPtr f = cur->comps[0];
        ReportNode local;
        local.rule = "local";
        local.line = it.line;
        const std::optional<Dist> lp = run(it.items, f1d, local);
        n.kids.push_back(local);
        if (!lp || lp->kind != Dist::Kind::Single) {
            fail(n, NodeStatus::RuleShapeMismatch, "local postcondition must be a state formula");
            parent.kids.push_back(n);
            return lp;
        }
        const FormulaPtr f2 = lp->comps[0];

        // ⊙-difference: drop the operands of the current formula that the local precondition describes.
        const Atoms a1 = flatten_atoms(it.local_pre);
        std::vector<std::string> q1;
        for (const auto &k : a1.kets) {
            q1.insert(q1.end(), k.factor.qvars.begin(), k.factor.qvars.end());
        }
        std::vector<FormulaPtr> ops;
        odot_ops(f, ops);
        std::vector<bool> covered(ops.size(), false);
        const bool f1_empty = a1.pure.empty() && a1.kets.empty() && a1.other.empty();
        bool any = false;
        for (size_t i = 0; i < ops.size(); i++) {
            if (f1_empty) {
                if (!any && ops[i]->is_pure() && ops[i]->pure->kind == Pure::Kind::True) {
                    covered[i] = any = true;
                }
            } else if (covered_by(ops[i], a1, q1)) {
                covered[i] = any = true;
            }
        }
        FormulaPtr f3, next;
        bool exact = false;
        if (any || f1_empty) {
            std::vector<FormulaPtr> rest, placed;
            bool put = false;
            int ncov = 0;
            for (size_t i = 0; i < ops.size(); i++) {
                if (covered[i]) {
                    ncov++;
                    exact = equal(ops[i], it.local_pre);
                    if (!put) {
                        placed.push_back(f2);
                        put = true;
                    }
                } else {
                    rest.push_back(ops[i]);
                    placed.push_back(ops[i]);
                }
            }
            if (!put) {
                placed.push_back(f2);
            }
            exact = exact && ncov == 1;
            f3 = fold_odot(rest);
            next = fold_odot(placed);
        } else {
            // Atom-level difference when no operand is described as a whole.
            const Atoms a = flatten_atoms(f);
            Atoms r;
            for (const auto &p : a.pure) {
                if (!contains_pure(a1.pure, p)) {
                    r.pure.push_back(p);
                }
            }
            for (const auto &k : a.kets) {
                bool inside = true;
                for (const auto &q : k.factor.qvars) {
                    inside = inside && std::find(q1.begin(), q1.end(), q) != q1.end();
                }
                if (!inside) {
                    r.kets.push_back(k);
                }
            }
            r.other = a.other;
            f3 = rebuild(r);
            const bool pure_rest = f3->is_pure();
            if (pure_rest && f3->pure->kind == Pure::Kind::True) {
                next = f2;
            } else {
                next = pure_rest ? fx::conj(f2, f3) : fx::odot(f2, f3);
            }
        }
        n.pre = to_string(fx::odot(it.local_pre, f3));
        n.post = to_string(fx::odot(f2, f3));

        NameSet mod = mod_vars(it.com, &prog_);
        NameSet fr = free_vars(f3);
        const NameSet fq = free_qvars(f3);
        fr.insert(fq.begin(), fq.end());
        std::string clash;
        for (const auto &v : fr) {
            if (mod.count(v)) {
                clash += (clash.empty() ? "" : ", ") + v;
            }
        }
        if (!clash.empty()) {
            fail(n, NodeStatus::SideConditionFailure, "frame mentions variables the command modifies: " + clash);
        }
        if (!exact) {
            ReportNode e = check_entailment({{"Conseq", {}}}, *cur, Dist::single(fx::odot(it.local_pre, f3)), cfg_);
            e.line = it.line;
            n.kids.push_back(e);
        }
        parent.kids.push_back(n);
        return Dist::single(next);
    }
};

void summarize(const ReportNode &n, CheckReport &r) {
    r.nodes++;
    const std::string where = "line " + std::to_string(n.line) + ": " + n.rule;
    if (n.status == NodeStatus::SideConditionFailure || n.status == NodeStatus::RuleShapeMismatch) {
        r.failures.push_back(where + ": " + status_name(n.status) + ": " + n.detail);
    } else if (n.conditional || n.status == NodeStatus::DelegatedEntailmentUnknown) {
        r.conditionals.push_back(where + ": " + n.detail);
    }
    for (const auto &k : n.kids) {
        summarize(k, r);
    }
}

}  // namespace

CheckReport check_outline(const Outline &outline, const EvalConfig &cfg) {
    CheckReport r;
    r.root.rule = "Outline";
    Elaborator el(outline.program, cfg);
    const std::optional<Dist> last = el.run(outline.items, std::nullopt, r.root);
    r.program = outline.program.body;
    if (el.first) {
        r.pre = *el.first;
        r.root.pre = to_string(r.pre);
    }
    if (last) {
        r.post = *last;
        r.root.post = to_string(r.post);
    }
    if (!el.first || !last) {
        fail(r.root, NodeStatus::RuleShapeMismatch, "outline has no assertions");
    }
    std::vector<ComPtr> cs;
    for (const auto &it : outline.items) {
        if (it.kind != OutlineItem::Kind::Assert && it.com) {
            cs.push_back(it.com);
        }
    }
    const ComPtr sp = cs.empty() ? cx::skip() : cx::seq(cs);
    if (outline.external_program && !equal(sp, outline.program.body)) {
        fail(r.root, NodeStatus::RuleShapeMismatch, "outline commands do not match the program");
    }
    r.root.command = to_string(sp);
    summarize(r.root, r);
    if (!r.failures.empty()) {
        r.overall = CheckReport::Overall::Failed;
    } else if (!r.conditionals.empty()) {
        r.overall = CheckReport::Overall::Conditional;
    } else {
        r.overall = CheckReport::Overall::Ok;
    }
    return r;
}

}  // namespace qhl
