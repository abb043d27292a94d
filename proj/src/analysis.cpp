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

#include "qhl/analysis.hpp"

#include <algorithm>

namespace qhl {

typedef std::map<std::string, AexpPtr> Subst;

static void collect(const AexpPtr &a, NameSet &out) {
    if (!a) {
        return;
    }
    if (a->kind == Aexp::Kind::Var) {
        out.insert(a->name);
    }
    for (const auto &k : a->args) {
        collect(k, out);
    }
}

NameSet free_vars(const AexpPtr &a) {
    NameSet s;
    collect(a, s);
    return s;
}

static void collect(const PurePtr &p, NameSet &out) {
    switch (p->kind) {
        case Pure::Kind::Cmp:
            collect(p->lhs, out);
            collect(p->rhs, out);
            break;
        case Pure::Kind::Forall: {
            NameSet inner;
            collect(p->kids[0], inner);
            inner.erase(p->var);
            out.insert(inner.begin(), inner.end());
            break;
        }
        default:
            for (const auto &k : p->kids) {
                collect(k, out);
            }
    }
}

NameSet free_vars(const PurePtr &p) {
    NameSet s;
    collect(p, s);
    return s;
}

static void collect(const FormulaPtr &f, NameSet &out) {
    switch (f->kind) {
        case Formula::Kind::Pure:
            collect(f->pure, out);
            break;
        case Formula::Kind::Ket:
            break;
        case Formula::Kind::Forall: {
            NameSet inner;
            collect(f->kids[0], inner);
            inner.erase(f->var);
            out.insert(inner.begin(), inner.end());
            break;
        }
        default:
            for (const auto &k : f->kids) {
                collect(k, out);
            }
    }
}

NameSet free_vars(const FormulaPtr &f) {
    NameSet s;
    collect(f, s);
    return s;
}

NameSet free_vars(const Dist &d) {
    NameSet s;
    for (const auto &c : d.comps) {
        collect(c, s);
    }
    return s;
}

static void collect_q(const FormulaPtr &f, NameSet &out) {
    if (f->kind == Formula::Kind::Ket) {
        for (const auto &q : f->ket.qvars()) {
            out.insert(q);
        }
    }
    for (const auto &k : f->kids) {
        collect_q(k, out);
    }
}

NameSet free_qvars(const FormulaPtr &f) {
    NameSet s;
    collect_q(f, s);
    return s;
}

NameSet free_qvars(const Dist &d) {
    NameSet s;
    for (const auto &c : d.comps) {
        collect_q(c, s);
    }
    return s;
}

bool has_quantum(const FormulaPtr &f) {
    if (f->kind == Formula::Kind::Ket) {
        return true;
    }
    return std::any_of(f->kids.begin(), f->kids.end(), [](const FormulaPtr &k) { return has_quantum(k); });
}

bool has_quantum(const Dist &d) {
    return std::any_of(d.comps.begin(), d.comps.end(), [](const FormulaPtr &k) { return has_quantum(k); });
}

// ---------------------------------------------------------------- substitution

static AexpPtr subst(const AexpPtr &e, const Subst &m) {
    if (!e) {
        return e;
    }
    if (e->kind == Aexp::Kind::Var) {
        auto it = m.find(e->name);
        return it == m.end() ? e : it->second;
    }
    if (e->args.empty()) {
        return e;
    }
    std::vector<AexpPtr> args;
    bool changed = false;
    for (const auto &k : e->args) {
        args.push_back(subst(k, m));
        changed |= args.back() != k;
    }
    if (!changed) {
        return e;
    }
    switch (e->kind) {
        case Aexp::Kind::Neg:
            return ax::neg(args[0]);
        case Aexp::Kind::Bin:
            return ax::bin(e->name, args[0], args[1]);
        default:
            return ax::call(e->name, args);
    }
}

/// Names that substitution may introduce: free variables of the images.
static NameSet image_vars(const Subst &m) {
    NameSet s;
    for (const auto &[k, v] : m) {
        collect(v, s);
    }
    return s;
}

static std::string fresh(const std::string &base, const NameSet &avoid) {
    for (int i = 1;; i++) {
        std::string cand = base + "_" + std::to_string(i);
        if (!avoid.count(cand)) {
            return cand;
        }
    }
}

static PurePtr subst(const PurePtr &p, const Subst &m);

/// Handles the binder of a quantifier: drops x from m and renames the bound variable on capture.
template <typename Body, typename Rebuild>
static auto subst_binder(const std::string &x, const Body &body, const Subst &m, Rebuild rebuild) {
    Subst inner = m;
    inner.erase(x);
    if (inner.empty()) {
        return rebuild(x, body);
    }
    const NameSet img = image_vars(inner);
    if (!img.count(x)) {
        return rebuild(x, subst(body, inner));
    }
    NameSet avoid = img;
    for (const auto &v : free_vars(body)) {
        avoid.insert(v);
    }
    const std::string y = fresh(x, avoid);
    inner[x] = ax::var(y);
    return rebuild(y, subst(body, inner));
}

static PurePtr subst(const PurePtr &p, const Subst &m) {
    switch (p->kind) {
        case Pure::Kind::True:
        case Pure::Kind::False:
            return p;
        case Pure::Kind::Cmp: {
            AexpPtr l = subst(p->lhs, m), r = subst(p->rhs, m);
            return (l == p->lhs && r == p->rhs) ? p : px::cmp(p->op, l, r);
        }
        case Pure::Kind::And:
            return px::conj(subst(p->kids[0], m), subst(p->kids[1], m));
        case Pure::Kind::Or:
            return px::disj(subst(p->kids[0], m), subst(p->kids[1], m));
        case Pure::Kind::Implies:
            return px::implies(subst(p->kids[0], m), subst(p->kids[1], m));
        case Pure::Kind::Not:
            return px::negate(subst(p->kids[0], m));
        case Pure::Kind::Forall:
            return subst_binder(p->var, p->kids[0], m, [](const std::string &y, const PurePtr &b) {
                return px::forall(y, b);
            });
    }
    return p;
}

static FormulaPtr subst(const FormulaPtr &f, const Subst &m) {
    switch (f->kind) {
        case Formula::Kind::Pure:
            return fx::pure(subst(f->pure, m));
        case Formula::Kind::Ket:
            return f;
        case Formula::Kind::Odot:
            return fx::odot(subst(f->kids[0], m), subst(f->kids[1], m));
        case Formula::Kind::And:
            return fx::conj(subst(f->kids[0], m), subst(f->kids[1], m));
        case Formula::Kind::Not:
            return fx::negate(subst(f->kids[0], m));
        case Formula::Kind::Forall:
            return subst_binder(f->var, f->kids[0], m, [](const std::string &y, const FormulaPtr &b) {
                return fx::forall(y, b);
            });
    }
    return f;
}

AexpPtr substitute(const AexpPtr &e, const std::string &x, const AexpPtr &a) {
    return subst(e, Subst{{x, a}});
}

PurePtr substitute(const PurePtr &p, const std::string &x, const AexpPtr &a) {
    return subst(p, Subst{{x, a}});
}

FormulaPtr substitute(const FormulaPtr &f, const std::string &x, const AexpPtr &a) {
    return subst(f, Subst{{x, a}});
}

Dist substitute(const Dist &d, const std::string &x, const AexpPtr &a) {
    Dist out = d;
    for (auto &c : out.comps) {
        c = substitute(c, x, a);
    }
    return out;
}

// ---------------------------------------------------------------- commands

static std::string rename_target(const std::string &x, const Subst &m, const std::string &macro) {
    auto it = m.find(x);
    if (it == m.end()) {
        return x;
    }
    if (it->second->kind != Aexp::Kind::Var) {
        throw MacroError("macro " + macro + " assigns parameter " + x + ", whose argument is not a variable");
    }
    return it->second->name;
}

static ComPtr subst_com(const ComPtr &c, const Subst &m, const std::string &macro) {
    auto out = std::make_shared<Com>(*c);
    out->expr = subst(c->expr, m);
    out->lo = subst(c->lo, m);
    out->hi = subst(c->hi, m);
    if (c->guard) {
        out->guard = subst(c->guard, m);
    }
    for (auto &a : out->args) {
        a = subst(a, m);
    }
    for (auto &k : out->kids) {
        k = subst_com(k, m, macro);
    }
    if (!c->var.empty()) {
        out->var = rename_target(c->var, m, macro);
    }
    return out;
}

ComPtr expand_call(const Program &prog, const ComPtr &call) {
    const MacroDecl *m = prog.find_macro(call->name);
    if (!m) {
        throw MacroError("unknown macro " + call->name);
    }
    if (m->params.size() != call->args.size()) {
        throw MacroError("macro " + m->name + " expects " + std::to_string(m->params.size()) + " arguments, got " +
                         std::to_string(call->args.size()));
    }
    Subst s;
    for (size_t i = 0; i < m->params.size(); i++) {
        s[m->params[i]] = call->args[i];
    }
    ComPtr body = subst_com(m->body, s, m->name);
    if (call->var.empty()) {
        return body;
    }
    if (m->ret.empty()) {
        throw MacroError("macro " + m->name + " returns no value");
    }
    // The result variable is read after parameter renaming, matching the textual expansion.
    const AexpPtr result = subst(ax::var(m->ret), s);
    if (result->kind == Aexp::Kind::Var && result->name == call->var) {
        return body;
    }
    return cx::seq({body, cx::assign(call->var, result)});
}

static ComPtr inline_rec(const Program &prog, const ComPtr &c, std::vector<std::string> &stack) {
    if (c->kind == Com::Kind::Call) {
        if (std::find(stack.begin(), stack.end(), c->name) != stack.end()) {
            throw MacroError("recursive macro " + c->name);
        }
        stack.push_back(c->name);
        ComPtr out = inline_rec(prog, expand_call(prog, c), stack);
        stack.pop_back();
        return out;
    }
    if (c->kids.empty()) {
        return c;
    }
    auto out = std::make_shared<Com>(*c);
    for (auto &k : out->kids) {
        k = inline_rec(prog, k, stack);
    }
    if (out->kind == Com::Kind::Seq) {
        return cx::seq(out->kids);
    }
    return out;
}

ComPtr inline_macros(const Program &prog, const ComPtr &c) {
    std::vector<std::string> stack;
    return inline_rec(prog, c, stack);
}

static void mods(const ComPtr &c, const Program *prog, NameSet &out, int depth) {
    switch (c->kind) {
        case Com::Kind::Assign:
        case Com::Kind::Random:
            out.insert(c->var);
            break;
        case Com::Kind::Measure:
            out.insert(c->var);
            out.insert(c->qvars.begin(), c->qvars.end());
            break;
        case Com::Kind::Init:
        case Com::Kind::Unitary:
            out.insert(c->qvars.begin(), c->qvars.end());
            break;
        case Com::Kind::Call:
            if (!c->var.empty()) {
                out.insert(c->var);
            }
            if (prog && depth < 32) {
                mods(expand_call(*prog, c), prog, out, depth + 1);
            }
            break;
        default:
            for (const auto &k : c->kids) {
                mods(k, prog, out, depth);
            }
    }
}

NameSet mod_vars(const ComPtr &c, const Program *prog) {
    NameSet s;
    mods(c, prog, s, 0);
    return s;
}

static void qubits_rec(const ComPtr &c, const Program *prog, std::vector<std::string> &out, int depth) {
    for (const auto &q : c->qvars) {
        if (std::find(out.begin(), out.end(), q) == out.end()) {
            out.push_back(q);
        }
    }
    if (c->kind == Com::Kind::Call && prog && depth < 32) {
        qubits_rec(expand_call(*prog, c), prog, out, depth + 1);
    }
    for (const auto &k : c->kids) {
        qubits_rec(k, prog, out, depth);
    }
}

std::vector<std::string> qubits_of(const ComPtr &c, const Program *prog) {
    std::vector<std::string> out;
    qubits_rec(c, prog, out, 0);
    return out;
}

}  // namespace qhl
