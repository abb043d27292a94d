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

#include "qhl/ast.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace qhl {

namespace ax {

AexpPtr num(int64_t v) {
    auto a = std::make_shared<Aexp>();
    a->kind = Aexp::Kind::Num;
    a->value = v;
    return a;
}

AexpPtr var(const std::string &x) {
    auto a = std::make_shared<Aexp>();
    a->kind = Aexp::Kind::Var;
    a->name = x;
    return a;
}

AexpPtr neg(AexpPtr a) {
    if (a->kind == Aexp::Kind::Num && a->value != INT64_MIN) {
        return num(-a->value);
    }
    auto n = std::make_shared<Aexp>();
    n->kind = Aexp::Kind::Neg;
    n->args = {std::move(a)};
    return n;
}

AexpPtr bin(const std::string &op, AexpPtr a, AexpPtr b) {
    auto n = std::make_shared<Aexp>();
    n->kind = Aexp::Kind::Bin;
    n->name = op;
    n->args = {std::move(a), std::move(b)};
    return n;
}

AexpPtr call(const std::string &f, std::vector<AexpPtr> args) {
    auto n = std::make_shared<Aexp>();
    n->kind = Aexp::Kind::Call;
    n->name = f;
    n->args = std::move(args);
    return n;
}

}  // namespace ax

int builtin_function_arity(const std::string &f) {
    if (f == "pow_mod" || f == "cf_denom") {
        return 3;
    }
    if (f == "gcd" || f == "ord") {
        return 2;
    }
    return -1;
}

namespace px {

static PurePtr make(Pure::Kind k) {
    auto p = std::make_shared<Pure>();
    p->kind = k;
    return p;
}

PurePtr truth() {
    static const PurePtr t = make(Pure::Kind::True);
    return t;
}

PurePtr falsity() {
    static const PurePtr f = make(Pure::Kind::False);
    return f;
}

PurePtr cmp(const std::string &op, AexpPtr a, AexpPtr b) {
    auto p = std::make_shared<Pure>();
    p->kind = Pure::Kind::Cmp;
    p->op = op;
    p->lhs = std::move(a);
    p->rhs = std::move(b);
    return p;
}

static PurePtr binary(Pure::Kind k, PurePtr a, PurePtr b) {
    auto p = std::make_shared<Pure>();
    p->kind = k;
    p->kids = {std::move(a), std::move(b)};
    return p;
}

PurePtr conj(PurePtr a, PurePtr b) {
    return binary(Pure::Kind::And, std::move(a), std::move(b));
}

PurePtr disj(PurePtr a, PurePtr b) {
    return binary(Pure::Kind::Or, std::move(a), std::move(b));
}

PurePtr implies(PurePtr a, PurePtr b) {
    return binary(Pure::Kind::Implies, std::move(a), std::move(b));
}

PurePtr negate(PurePtr a) {
    auto p = std::make_shared<Pure>();
    p->kind = Pure::Kind::Not;
    p->kids = {std::move(a)};
    return p;
}

PurePtr forall(const std::string &x, PurePtr body) {
    auto p = std::make_shared<Pure>();
    p->kind = Pure::Kind::Forall;
    p->var = x;
    p->kids = {std::move(body)};
    return p;
}

std::string complement_op(const std::string &op) {
    if (op == "=") return "/=";
    if (op == "/=") return "=";
    if (op == "<") return ">=";
    if (op == ">=") return "<";
    if (op == ">") return "<=";
    if (op == "<=") return ">";
    return "";
}

}  // namespace px

std::vector<std::string> Ket::qvars() const {
    std::vector<std::string> out;
    for (const auto &f : factors) {
        out.insert(out.end(), f.qvars.begin(), f.qvars.end());
    }
    return out;
}

VectorXc factor_vector(const KetFactor &f) {
    VectorXc v = VectorXc::Zero(Eigen::Index{1} << f.qvars.size());
    for (const auto &[c, idx] : f.terms) {
        v[(Eigen::Index)idx] += c;
    }
    return v;
}

KetFactor pattern_factor(std::vector<std::string> qvars, const std::string &pattern) {
    const size_t n = pattern.size();
    VectorXc v = VectorXc::Zero(Eigen::Index{1} << n);
    v[0] = 1.0;
    const double h = 1.0 / std::sqrt(2.0);
    // Build the product left to right: v holds the state of the first k characters.
    Eigen::Index len = 1;
    for (size_t k = 0; k < n; k++) {
        VectorXc next = VectorXc::Zero(len * 2);
        for (Eigen::Index i = 0; i < len; i++) {
            const cplx a = v[i];
            switch (pattern[k]) {
                case '0':
                    next[2 * i] = a;
                    break;
                case '1':
                    next[2 * i + 1] = a;
                    break;
                case '+':
                    next[2 * i] = a * h;
                    next[2 * i + 1] = a * h;
                    break;
                case '-':
                    next[2 * i] = a * h;
                    next[2 * i + 1] = -a * h;
                    break;
                default:
                    throw std::invalid_argument(std::string("bad ket character '") + pattern[k] + "'");
            }
        }
        len *= 2;
        v.head(len) = next;
    }
    KetFactor f;
    f.qvars = std::move(qvars);
    for (Eigen::Index i = 0; i < len; i++) {
        if (v[i] != cplx(0.0)) {
            f.terms.emplace_back(v[i], (uint64_t)i);
        }
    }
    return f;
}

PureState ket_state(const Ket &k) {
    PureState out{QubitLayout(std::vector<std::string>{}), VectorXc::Ones(1)};
    for (const auto &f : k.factors) {
        out = tensor(out, PureState{QubitLayout(f.qvars), factor_vector(f)});
    }
    return out;
}

Ket ket_from_state(const PureState &psi, double drop) {
    KetFactor f;
    f.qvars = psi.layout.names();
    for (Eigen::Index i = 0; i < psi.amp.size(); i++) {
        if (std::abs(psi.amp[i]) > drop) {
            f.terms.emplace_back(psi.amp[i], (uint64_t)i);
        }
    }
    Ket k;
    k.factors.push_back(std::move(f));
    return k;
}

namespace fx {

static std::shared_ptr<Formula> make(Formula::Kind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}

FormulaPtr pure(PurePtr p) {
    auto f = make(Formula::Kind::Pure);
    f->pure = std::move(p);
    return f;
}

FormulaPtr truth() {
    static const FormulaPtr t = pure(px::truth());
    return t;
}

FormulaPtr falsity() {
    static const FormulaPtr f = pure(px::falsity());
    return f;
}

FormulaPtr ket(Ket k) {
    auto f = make(Formula::Kind::Ket);
    f->ket = std::move(k);
    return f;
}

FormulaPtr odot(FormulaPtr a, FormulaPtr b) {
    auto f = make(Formula::Kind::Odot);
    f->kids = {std::move(a), std::move(b)};
    return f;
}

FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
    if (a->is_pure() && b->is_pure()) {
        return pure(px::conj(a->pure, b->pure));
    }
    auto f = make(Formula::Kind::And);
    f->kids = {std::move(a), std::move(b)};
    return f;
}

FormulaPtr negate(FormulaPtr a) {
    if (a->is_pure()) {
        return pure(px::negate(a->pure));
    }
    auto f = make(Formula::Kind::Not);
    f->kids = {std::move(a)};
    return f;
}

FormulaPtr forall(const std::string &x, FormulaPtr body) {
    if (body->is_pure()) {
        return pure(px::forall(x, body->pure));
    }
    auto f = make(Formula::Kind::Forall);
    f->var = x;
    f->kids = {std::move(body)};
    return f;
}

}  // namespace fx

Dist Dist::single(FormulaPtr f) {
    Dist d;
    d.kind = Kind::Single;
    d.comps = {std::move(f)};
    return d;
}

Dist Dist::weighted(std::vector<Rational> w, std::vector<FormulaPtr> comps) {
    Dist d;
    d.kind = Kind::Weighted;
    d.weights = std::move(w);
    d.comps = std::move(comps);
    return d;
}

Dist Dist::unweighted(std::vector<FormulaPtr> comps) {
    Dist d;
    d.kind = Kind::Unweighted;
    d.comps = std::move(comps);
    return d;
}

namespace cx {

static std::shared_ptr<Com> make(Com::Kind k) {
    auto c = std::make_shared<Com>();
    c->kind = k;
    return c;
}

ComPtr skip() {
    return make(Com::Kind::Skip);
}

ComPtr abort_() {
    return make(Com::Kind::Abort);
}

ComPtr assign(const std::string &x, AexpPtr a) {
    auto c = make(Com::Kind::Assign);
    c->var = x;
    c->expr = std::move(a);
    return c;
}

ComPtr random(const std::string &x, AexpPtr lo, AexpPtr hi) {
    auto c = make(Com::Kind::Random);
    c->var = x;
    c->lo = std::move(lo);
    c->hi = std::move(hi);
    return c;
}

ComPtr seq(std::vector<ComPtr> items) {
    std::vector<ComPtr> flat;
    for (auto &c : items) {
        if (c->kind == Com::Kind::Seq) {
            flat.insert(flat.end(), c->kids.begin(), c->kids.end());
        } else {
            flat.push_back(std::move(c));
        }
    }
    if (flat.size() == 1) {
        return flat[0];
    }
    auto c = make(Com::Kind::Seq);
    c->kids = std::move(flat);
    return c;
}

ComPtr cond(PurePtr b, ComPtr c1, ComPtr c2) {
    auto c = make(Com::Kind::If);
    c->guard = std::move(b);
    c->kids = {std::move(c1), std::move(c2)};
    return c;
}

ComPtr loop(PurePtr b, ComPtr body) {
    auto c = make(Com::Kind::While);
    c->guard = std::move(b);
    c->kids = {std::move(body)};
    return c;
}

ComPtr init(std::vector<std::string> qs) {
    auto c = make(Com::Kind::Init);
    c->qvars = std::move(qs);
    return c;
}

ComPtr unitary(const std::string &g, std::vector<std::string> qs, bool adjoint, std::vector<AexpPtr> params) {
    auto c = make(Com::Kind::Unitary);
    c->name = g;
    c->qvars = std::move(qs);
    c->adjoint = adjoint;
    c->args = std::move(params);
    return c;
}

ComPtr measure(const std::string &x, const std::string &m, std::vector<std::string> qs) {
    auto c = make(Com::Kind::Measure);
    c->var = x;
    c->name = m;
    c->qvars = std::move(qs);
    return c;
}

ComPtr call(const std::string &result, const std::string &macro, std::vector<AexpPtr> args) {
    auto c = make(Com::Kind::Call);
    c->var = result;
    c->name = macro;
    c->args = std::move(args);
    return c;
}

}  // namespace cx

const MeasDecl *Program::find_measurement(const std::string &name) const {
    for (const auto &m : measurements) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

const GateDecl *Program::find_gate(const std::string &name) const {
    for (const auto &g : gates) {
        if (g.name == name) {
            return &g;
        }
    }
    return nullptr;
}

const MacroDecl *Program::find_macro(const std::string &name) const {
    for (const auto &m : macros) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

// ---------------------------------------------------------------- equality

template <typename T>
static bool equal_all(const std::vector<T> &a, const std::vector<T> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (size_t i = 0; i < a.size(); i++) {
        if (!equal(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

bool equal(const AexpPtr &a, const AexpPtr &b) {
    if (a == b) {
        return true;
    }
    if (!a || !b) {
        return false;
    }
    return a->kind == b->kind && a->value == b->value && a->name == b->name && equal_all(a->args, b->args);
}

bool equal(const PurePtr &a, const PurePtr &b) {
    if (a == b) {
        return true;
    }
    if (!a || !b) {
        return false;
    }
    return a->kind == b->kind && a->op == b->op && a->var == b->var && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs) &&
           equal_all(a->kids, b->kids);
}

bool equal(const Ket &a, const Ket &b) {
    if (a.factors.size() != b.factors.size()) {
        return false;
    }
    for (size_t i = 0; i < a.factors.size(); i++) {
        if (a.factors[i].qvars != b.factors[i].qvars || a.factors[i].terms != b.factors[i].terms) {
            return false;
        }
    }
    return true;
}

bool equal(const FormulaPtr &a, const FormulaPtr &b) {
    if (a == b) {
        return true;
    }
    if (!a || !b || a->kind != b->kind || a->var != b->var) {
        return false;
    }
    switch (a->kind) {
        case Formula::Kind::Pure:
            return equal(a->pure, b->pure);
        case Formula::Kind::Ket:
            return equal(a->ket, b->ket);
        default:
            return equal_all(a->kids, b->kids);
    }
}

bool equal(const Dist &a, const Dist &b) {
    return a.kind == b.kind && a.weights == b.weights && equal_all(a.comps, b.comps);
}

bool equal(const ComPtr &a, const ComPtr &b) {
    if (a == b) {
        return true;
    }
    if (!a || !b) {
        return false;
    }
    return a->kind == b->kind && a->var == b->var && equal(a->expr, b->expr) && equal(a->lo, b->lo) &&
           equal(a->hi, b->hi) && equal(a->guard, b->guard) && equal_all(a->kids, b->kids) && a->qvars == b->qvars &&
           a->name == b->name && a->adjoint == b->adjoint && equal_all(a->args, b->args);
}

static bool same_matrix(const MatrixXc &a, const MatrixXc &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool equal(const Program &a, const Program &b) {
    if (a.qubits != b.qubits || a.measurements.size() != b.measurements.size() || a.gates.size() != b.gates.size() ||
        a.macros.size() != b.macros.size() || !equal(a.body, b.body)) {
        return false;
    }
    for (size_t i = 0; i < a.measurements.size(); i++) {
        const auto &x = a.measurements[i], &y = b.measurements[i];
        if (x.name != y.name || x.arity != y.arity || x.std_basis != y.std_basis || x.ops.size() != y.ops.size()) {
            return false;
        }
        for (size_t k = 0; k < x.ops.size(); k++) {
            if (!same_matrix(x.ops[k], y.ops[k])) {
                return false;
            }
        }
    }
    for (size_t i = 0; i < a.gates.size(); i++) {
        const auto &x = a.gates[i], &y = b.gates[i];
        if (x.name != y.name || x.arity != y.arity || x.source != y.source || x.perm != y.perm || x.path != y.path ||
            !same_matrix(x.mat, y.mat)) {
            return false;
        }
    }
    for (size_t i = 0; i < a.macros.size(); i++) {
        const auto &x = a.macros[i], &y = b.macros[i];
        if (x.name != y.name || x.params != y.params || x.ret != y.ret || !equal(x.body, y.body)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------- printing

static std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Amplitude in the assertion-language syntax: 0.5, -2*i, (0.5+0.5*i).
static std::string fmt_amp(cplx z) {
    if (z.imag() == 0.0) {
        return fmt_double(z.real());
    }
    if (z.real() == 0.0) {
        return fmt_double(z.imag()) + "*i";
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g%+.17g*i)", z.real(), z.imag());
    return buf;
}

static int aexp_level(const AexpPtr &a) {
    switch (a->kind) {
        case Aexp::Kind::Bin:
            return (a->name == "+" || a->name == "-") ? 1 : 2;
        case Aexp::Kind::Neg:
            return 3;
        case Aexp::Kind::Num:
            return a->value < 0 ? 3 : 4;
        default:
            return 4;
    }
}

static std::string print_aexp(const AexpPtr &a, int ctx) {
    std::string s;
    const int lvl = aexp_level(a);
    switch (a->kind) {
        case Aexp::Kind::Num:
            s = std::to_string(a->value);
            break;
        case Aexp::Kind::Var:
            s = a->name;
            break;
        case Aexp::Kind::Neg:
            s = "-" + print_aexp(a->args[0], 4);
            break;
        case Aexp::Kind::Bin:
            s = print_aexp(a->args[0], lvl) + " " + a->name + " " + print_aexp(a->args[1], lvl + 1);
            break;
        case Aexp::Kind::Call: {
            s = a->name + "(";
            for (size_t i = 0; i < a->args.size(); i++) {
                s += (i ? ", " : "") + print_aexp(a->args[i], 0);
            }
            s += ")";
            break;
        }
    }
    return lvl < ctx ? "(" + s + ")" : s;
}

std::string to_string(const AexpPtr &a) {
    return print_aexp(a, 0);
}

// Formula precedence: odot 0, -> 1, \/ 2, /\ 3, ~ and forall 4, atoms 5.
static int pure_level(const PurePtr &p) {
    switch (p->kind) {
        case Pure::Kind::Implies:
            return 1;
        case Pure::Kind::Or:
            return 2;
        case Pure::Kind::And:
            return 3;
        case Pure::Kind::Not:
        case Pure::Kind::Forall:
            return 4;
        default:
            return 5;
    }
}

static std::string print_pure(const PurePtr &p, int ctx) {
    std::string s;
    const int lvl = pure_level(p);
    switch (p->kind) {
        case Pure::Kind::True:
            s = "true";
            break;
        case Pure::Kind::False:
            s = "false";
            break;
        case Pure::Kind::Cmp:
            s = print_aexp(p->lhs, 0) + " " + p->op + " " + print_aexp(p->rhs, 0);
            break;
        case Pure::Kind::And:
            s = print_pure(p->kids[0], 3) + " /\\ " + print_pure(p->kids[1], 4);
            break;
        case Pure::Kind::Or:
            s = print_pure(p->kids[0], 2) + " \\/ " + print_pure(p->kids[1], 3);
            break;
        case Pure::Kind::Implies:
            s = print_pure(p->kids[0], 2) + " -> " + print_pure(p->kids[1], 1);
            break;
        case Pure::Kind::Not:
            s = "~" + print_pure(p->kids[0], 4);
            break;
        case Pure::Kind::Forall:
            s = "forall " + p->var + ". " + print_pure(p->kids[0], 4);
            break;
    }
    return lvl < ctx ? "(" + s + ")" : s;
}

std::string to_string(const PurePtr &p) {
    return print_pure(p, 0);
}

/// Recognizes product states over {0,1,+,-}; returns an empty string otherwise.
static std::string factor_pattern(const KetFactor &f) {
    const size_t n = f.qvars.size();
    if (f.terms.empty() || n > 20) {
        return "";
    }
    const VectorXc v = factor_vector(f);
    uint64_t base = UINT64_MAX;
    for (const auto &t : f.terms) {
        if (std::abs(t.first) > 0) {
            base = std::min(base, t.second);
        }
    }
    if (base == UINT64_MAX) {
        return "";
    }
    std::string pat(n, '0');
    for (size_t k = 0; k < n; k++) {
        const uint64_t bit = uint64_t{1} << (n - 1 - k);
        if (base & bit) {
            pat[k] = '1';
            continue;
        }
        const cplx other = v[(Eigen::Index)(base | bit)];
        if (std::abs(other) < 1e-14) {
            pat[k] = '0';
        } else {
            const cplx r = other / v[(Eigen::Index)base];
            if (std::abs(r - 1.0) < 1e-12) {
                pat[k] = '+';
            } else if (std::abs(r + 1.0) < 1e-12) {
                pat[k] = '-';
            } else {
                return "";
            }
        }
    }
    const VectorXc cand = factor_vector(pattern_factor(f.qvars, pat));
    if ((cand - v).cwiseAbs().maxCoeff() > 1e-14) {
        return "";
    }
    return pat;
}

static std::string bits(uint64_t idx, size_t n) {
    std::string s(n, '0');
    for (size_t k = 0; k < n; k++) {
        if (idx & (uint64_t{1} << (n - 1 - k))) {
            s[k] = '1';
        }
    }
    return s;
}

static std::string subscript(const std::vector<std::string> &qs) {
    std::string s = "_{";
    for (size_t i = 0; i < qs.size(); i++) {
        s += (i ? " " : "") + qs[i];
    }
    return s + "}";
}

std::string to_string(const Ket &k) {
    std::string out;
    for (size_t fi = 0; fi < k.factors.size(); fi++) {
        const KetFactor &f = k.factors[fi];
        if (fi) {
            out += " ";
        }
        const std::string pat = factor_pattern(f);
        if (!pat.empty()) {
            out += "|" + pat + ">" + subscript(f.qvars);
            continue;
        }
        out += "(";
        for (size_t t = 0; t < f.terms.size(); t++) {
            if (t) {
                out += " + ";
            }
            const cplx c = f.terms[t].first;
            if (c != cplx(1.0)) {
                out += fmt_amp(c);
            }
            out += "|" + bits(f.terms[t].second, f.qvars.size()) + ">";
        }
        out += ")" + subscript(f.qvars);
    }
    return out;
}

static int formula_level(const FormulaPtr &f) {
    switch (f->kind) {
        case Formula::Kind::Pure:
            return pure_level(f->pure);
        case Formula::Kind::Odot:
            return 0;
        case Formula::Kind::And:
            return 3;
        case Formula::Kind::Not:
        case Formula::Kind::Forall:
            return 4;
        default:
            return 5;
    }
}

static std::string print_formula(const FormulaPtr &f, int ctx) {
    if (f->kind == Formula::Kind::Pure) {
        return print_pure(f->pure, ctx);
    }
    std::string s;
    const int lvl = formula_level(f);
    switch (f->kind) {
        case Formula::Kind::Ket:
            s = to_string(f->ket);
            break;
        case Formula::Kind::Odot:
            s = print_formula(f->kids[0], 0) + " (.) " + print_formula(f->kids[1], 1);
            break;
        case Formula::Kind::And:
            s = print_formula(f->kids[0], 3) + " /\\ " + print_formula(f->kids[1], 4);
            break;
        case Formula::Kind::Not:
            s = "~" + print_formula(f->kids[0], 4);
            break;
        case Formula::Kind::Forall:
            s = "forall " + f->var + ". " + print_formula(f->kids[0], 4);
            break;
        default:
            break;
    }
    return lvl < ctx ? "(" + s + ")" : s;
}

std::string to_string(const FormulaPtr &f) {
    return print_formula(f, 0);
}

std::string to_string(const Rational &r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string to_string(const Dist &d) {
    if (d.kind == Dist::Kind::Single) {
        return print_formula(d.comps[0], 0);
    }
    std::string s;
    for (size_t i = 0; i < d.comps.size(); i++) {
        if (i) {
            s += " (+) ";
        }
        if (d.kind == Dist::Kind::Weighted) {
            s += to_string(d.weights[i]) + " ";
        }
        s += "(" + print_formula(d.comps[i], 0) + ")";
    }
    return s;
}

static std::string join_names(const std::vector<std::string> &qs) {
    std::string s;
    for (size_t i = 0; i < qs.size(); i++) {
        s += (i ? ", " : "") + qs[i];
    }
    return s;
}

static std::string join_args(const std::vector<AexpPtr> &as) {
    std::string s;
    for (size_t i = 0; i < as.size(); i++) {
        s += (i ? ", " : "") + print_aexp(as[i], 0);
    }
    return s;
}

std::string to_string(const ComPtr &c, int indent) {
    const std::string pad(indent, ' ');
    switch (c->kind) {
        case Com::Kind::Skip:
            return pad + "skip";
        case Com::Kind::Abort:
            return pad + "abort";
        case Com::Kind::Assign:
            return pad + c->var + " := " + to_string(c->expr);
        case Com::Kind::Random:
            return pad + c->var + " := random(" + to_string(c->lo) + ", " + to_string(c->hi) + ")";
        case Com::Kind::Seq: {
            std::string s;
            for (size_t i = 0; i < c->kids.size(); i++) {
                s += (i ? ";\n" : "") + to_string(c->kids[i], indent);
            }
            return s;
        }
        case Com::Kind::If:
            return pad + "if " + to_string(c->guard) + " then\n" + to_string(c->kids[0], indent + 2) + "\n" + pad +
                   "else\n" + to_string(c->kids[1], indent + 2) + "\n" + pad + "fi";
        case Com::Kind::While:
            return pad + "while " + to_string(c->guard) + " do\n" + to_string(c->kids[0], indent + 2) + "\n" + pad + "od";
        case Com::Kind::Init:
            return pad + join_names(c->qvars) + " := |0>";
        case Com::Kind::Unitary: {
            std::string s = pad + c->name;
            if (c->adjoint) {
                s += "^dag";
            }
            if (!c->args.empty()) {
                s += "(" + join_args(c->args) + ")";
            }
            return s + "[" + join_names(c->qvars) + "]";
        }
        case Com::Kind::Measure:
            return pad + c->var + " := " + c->name + "[" + join_names(c->qvars) + "]";
        case Com::Kind::Call:
            return pad + (c->var.empty() ? "" : c->var + " := ") + c->name + "(" + join_args(c->args) + ")";
    }
    return pad;
}

static std::string print_op(const MatrixXc &m, int arity) {
    std::string s;
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            if (m(r, c) == cplx(0.0)) {
                continue;
            }
            if (!s.empty()) {
                s += " + ";
            }
            if (m(r, c) != cplx(1.0)) {
                s += fmt_amp(m(r, c));
            }
            s += "|" + bits(r, arity) + "><" + bits(c, arity) + "|";
        }
    }
    return s.empty() ? "0|" + bits(0, arity) + "><" + bits(0, arity) + "|" : s;
}

std::string to_string(const Program &p) {
    std::string s;
    if (!p.qubits.empty()) {
        s += "qubit " + join_names(p.qubits) + "\n";
    }
    for (const auto &m : p.measurements) {
        if (m.std_basis) {
            s += "measurement " + m.name + " = std(" + std::to_string(m.arity) + ")\n";
            continue;
        }
        s += "measurement " + m.name + " on " + std::to_string(m.arity) + " = { ";
        for (size_t i = 0; i < m.ops.size(); i++) {
            s += (i ? ", " : "") + print_op(m.ops[i], m.arity);
        }
        s += " }\n";
    }
    for (const auto &g : p.gates) {
        switch (g.source) {
            case GateDecl::Source::File:
                s += "gate " + g.name + " = file \"" + g.path + "\"\n";
                break;
            case GateDecl::Source::Perm: {
                s += "gate " + g.name + " on " + std::to_string(g.arity) + " = perm [";
                for (uint64_t v : g.perm) {
                    s += " " + std::to_string(v);
                }
                s += " ]\n";
                break;
            }
            case GateDecl::Source::Inline: {
                s += "gate " + g.name + " on " + std::to_string(g.arity) + " = [";
                for (Eigen::Index r = 0; r < g.mat.rows(); r++) {
                    s += r ? " ;" : "";
                    for (Eigen::Index c = 0; c < g.mat.cols(); c++) {
                        s += " " + format_complex(g.mat(r, c));
                    }
                }
                s += " ]\n";
                break;
            }
        }
    }
    for (const auto &m : p.macros) {
        s += "macro " + m.name + "(" + join_names(m.params) + ")";
        if (!m.ret.empty()) {
            s += " returns " + m.ret;
        }
        s += " {\n" + to_string(m.body, 2) + "\n}\n";
    }
    if (p.body) {
        s += to_string(p.body, 0) + "\n";
    }
    return s;
}

}  // namespace qhl
