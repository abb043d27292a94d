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

#include <algorithm>
#include <cmath>
#include <set>

#include "qhl/analysis.hpp"
#include "qhl/parse.hpp"

namespace qhl {

namespace syntax {

static const std::set<std::string> kKeywords = {"skip", "abort", "if",   "then", "else",   "fi",   "while",
                                                "do",   "od",    "true", "false", "forall", "div", "mod"};

Parser::Parser(std::vector<Token> toks, std::string base_dir) : toks_(std::move(toks)), base_dir_(std::move(base_dir)) {
}

const Token &Parser::peek(size_t ahead) const {
    const size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
}

bool Parser::at_sym(const std::string &s, size_t ahead) const {
    const Token &t = peek(ahead);
    return t.kind == Tok::Sym && t.text == s;
}

bool Parser::at_word(const std::string &w, size_t ahead) const {
    const Token &t = peek(ahead);
    return t.kind == Tok::Ident && t.text == w;
}

const Token &Parser::next() {
    const Token &t = peek();
    if (pos_ < toks_.size() - 1) {
        pos_++;
    }
    return t;
}

void Parser::fail(const std::string &what) const {
    const Token &t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    if (t.kind == Tok::Ket) {
        got = "'|" + t.text + ">'";
    } else if (t.kind == Tok::Sub) {
        got = "subscript";
    }
    throw ParseError("expected " + what + ", got " + got, t.line, t.col);
}

void Parser::expect_sym(const std::string &s) {
    if (!at_sym(s)) {
        fail("'" + s + "'");
    }
    next();
}

void Parser::expect_word(const std::string &w) {
    if (!at_word(w)) {
        fail("'" + w + "'");
    }
    next();
}

bool Parser::is_keyword(const std::string &w) const {
    return kKeywords.count(w) > 0;
}

std::string Parser::expect_ident() {
    const Token &t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text)) {
        fail("identifier");
    }
    return next().text;
}

int64_t Parser::expect_int() {
    const Token &t = peek();
    if (t.kind != Tok::Num || t.text.find_first_not_of("0123456789") != std::string::npos) {
        fail("integer");
    }
    try {
        return std::stoll(next().text);
    } catch (const std::out_of_range &) {
        throw ParseError("integer literal out of range", t.line, t.col);
    }
}

// ---------------------------------------------------------------- arithmetic

AexpPtr Parser::aexp() {
    return sum();
}

AexpPtr Parser::sum() {
    AexpPtr a = term();
    while (at_sym("+") || at_sym("-")) {
        const std::string op = next().text;
        a = ax::bin(op, a, term());
    }
    return a;
}

AexpPtr Parser::term() {
    AexpPtr a = unary();
    while (at_sym("*") || at_word("div") || at_word("mod")) {
        const std::string op = next().text;
        a = ax::bin(op, a, unary());
    }
    return a;
}

AexpPtr Parser::unary() {
    if (at_sym("-")) {
        next();
        return ax::neg(unary());
    }
    return atom();
}

AexpPtr Parser::atom() {
    const Token &t = peek();
    if (t.kind == Tok::Num) {
        return ax::num(expect_int());
    }
    if (at_sym("(")) {
        next();
        AexpPtr a = sum();
        expect_sym(")");
        return a;
    }
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
        const Token id = next();
        if (at_sym("(")) {
            const int ar = builtin_function_arity(id.text);
            if (ar < 0) {
                throw ParseError("unknown function " + id.text, id.line, id.col);
            }
            std::vector<AexpPtr> args = arg_list();
            if ((int)args.size() != ar) {
                throw ParseError(id.text + " expects " + std::to_string(ar) + " arguments", id.line, id.col);
            }
            return ax::call(id.text, args);
        }
        return ax::var(id.text);
    }
    fail("arithmetic expression");
}

std::vector<AexpPtr> Parser::arg_list() {
    expect_sym("(");
    std::vector<AexpPtr> args;
    if (!at_sym(")")) {
        args.push_back(aexp());
        while (at_sym(",")) {
            next();
            args.push_back(aexp());
        }
    }
    expect_sym(")");
    return args;
}

// ---------------------------------------------------------------- formulas

FormulaPtr Parser::formula() {
    FormulaPtr f = f_imp();
    while (at_sym("(.)")) {
        const Token op = next();
        FormulaPtr r = f_imp();
        NameSet lv = free_vars(f), rv = free_vars(r);
        for (const auto &q : free_qvars(f)) {
            lv.insert(q);
        }
        for (const auto &q : free_qvars(r)) {
            rv.insert(q);
        }
        for (const auto &v : lv) {
            if (rv.count(v)) {
                throw ParseError("operands of (.) share free variable " + v, op.line, op.col);
            }
        }
        f = fx::odot(f, r);
    }
    return f;
}

FormulaPtr Parser::f_imp() {
    FormulaPtr l = f_or();
    if (at_sym("->")) {
        const Token op = next();
        FormulaPtr r = f_imp();
        if (!l->is_pure() || !r->is_pure()) {
            throw ParseError("'->' joins pure formulas only", op.line, op.col);
        }
        return fx::pure(px::implies(l->pure, r->pure));
    }
    return l;
}

FormulaPtr Parser::f_or() {
    FormulaPtr l = f_and();
    while (at_sym("\\/")) {
        const Token op = next();
        FormulaPtr r = f_and();
        if (!l->is_pure() || !r->is_pure()) {
            throw ParseError("'\\/' joins pure formulas only", op.line, op.col);
        }
        l = fx::pure(px::disj(l->pure, r->pure));
    }
    return l;
}

FormulaPtr Parser::f_and() {
    FormulaPtr l = f_unary();
    while (at_sym("/\\")) {
        next();
        l = fx::conj(l, f_unary());
    }
    return l;
}

FormulaPtr Parser::f_unary() {
    if (at_sym("~")) {
        next();
        return fx::negate(f_unary());
    }
    if (at_word("forall")) {
        next();
        const std::string x = expect_ident();
        expect_sym(".");
        return fx::forall(x, f_unary());
    }
    return f_postfix(f_atom());
}

FormulaPtr Parser::f_postfix(FormulaPtr f) {
    // F[a/x]: substitution is applied eagerly.
    while (at_sym("[")) {
        next();
        AexpPtr a = aexp();
        expect_sym("/");
        const std::string x = expect_ident();
        expect_sym("]");
        f = substitute(f, x, a);
    }
    return f;
}

FormulaPtr Parser::f_atom() {
    if (at_word("true")) {
        next();
        return fx::truth();
    }
    if (at_word("false")) {
        next();
        return fx::falsity();
    }
    Ket k;
    if (try_ket(k)) {
        return fx::ket(std::move(k));
    }
    static const std::set<std::string> cmps = {"=", "/=", "<=", ">=", "<", ">", "|"};
    const size_t m = mark();
    if (at_sym("(")) {
        // Either a parenthesized formula or a comparison whose left side starts with '('.
        try {
            AexpPtr l = aexp();
            if (peek().kind == Tok::Sym && cmps.count(peek().text)) {
                const std::string op = next().text;
                return fx::pure(px::cmp(op, l, aexp()));
            }
        } catch (const ParseError &) {
        }
        reset(m);
        next();
        FormulaPtr f = formula();
        expect_sym(")");
        return f;
    }
    AexpPtr l = aexp();
    if (!(peek().kind == Tok::Sym && cmps.count(peek().text))) {
        fail("comparison operator");
    }
    const std::string op = next().text;
    return fx::pure(px::cmp(op, l, aexp()));
}

PurePtr Parser::pure() {
    const Token start = peek();
    FormulaPtr f = formula();
    if (!f->is_pure()) {
        throw ParseError("expected a classical predicate", start.line, start.col);
    }
    return f->pure;
}

bool Parser::try_ket(Ket &out) {
    KetFactor f;
    if (!try_ket_factor(f)) {
        return false;
    }
    out.factors.push_back(std::move(f));
    for (;;) {
        KetFactor g;
        if (!try_ket_factor(g)) {
            break;
        }
        out.factors.push_back(std::move(g));
    }
    std::set<std::string> seen;
    for (const auto &q : out.qvars()) {
        if (!seen.insert(q).second) {
            fail("distinct qubits in ket (" + q + " repeats)");
        }
    }
    return true;
}

static uint64_t bits_value(const std::string &s) {
    uint64_t v = 0;
    for (char c : s) {
        v = (v << 1) | (c == '1' ? 1 : 0);
    }
    return v;
}

bool Parser::try_ket_factor(KetFactor &out) {
    const Token &t = peek();
    if (t.kind == Tok::Ket) {
        const Token kt = next();
        if (peek().kind != Tok::Sub) {
            throw ParseError("ket |" + kt.text + "> needs a subscript naming its qubits", kt.line, kt.col);
        }
        const Token sub = next();
        if (sub.names.size() != kt.text.size()) {
            throw ParseError("ket |" + kt.text + "> has " + std::to_string(kt.text.size()) + " qubits but subscript names " +
                                 std::to_string(sub.names.size()),
                             sub.line, sub.col);
        }
        out = pattern_factor(sub.names, kt.text);
        return true;
    }
    if (!at_sym("(")) {
        return false;
    }
    const size_t m = mark();
    next();
    // A combination must contain a ket before its closing parenthesis; otherwise this is not a ket.
    std::vector<std::pair<cplx, std::string>> terms;
    try {
        for (bool first = true;; first = false) {
            double sign = 1.0;
            if (!first) {
                if (at_sym("+")) {
                    next();
                } else if (at_sym("-")) {
                    next();
                    sign = -1.0;
                } else {
                    break;
                }
            }
            cplx c = 1.0;
            if (peek().kind != Tok::Ket) {
                c = amp_prod();
            }
            if (peek().kind != Tok::Ket) {
                reset(m);
                return false;
            }
            terms.emplace_back(sign * c, next().text);
        }
        if (!at_sym(")")) {
            reset(m);
            return false;
        }
    } catch (const ParseError &) {
        reset(m);
        return false;
    }
    next();
    if (peek().kind != Tok::Sub) {
        fail("subscript after ket combination");
    }
    const Token sub = next();
    const size_t n = sub.names.size();
    VectorXc v = VectorXc::Zero(Eigen::Index{1} << n);
    for (const auto &[c, pat] : terms) {
        if (pat.size() != n) {
            throw ParseError("ket |" + pat + "> does not match " + std::to_string(n) + " qubits", sub.line, sub.col);
        }
        v += c * factor_vector(pattern_factor(sub.names, pat));
    }
    if (std::abs(v.norm() - 1.0) > 1e-9) {
        throw ParseError("ket combination has norm " + std::to_string(v.norm()) + ", expected 1", sub.line, sub.col);
    }
    out.qvars = sub.names;
    out.terms.clear();
    for (Eigen::Index i = 0; i < v.size(); i++) {
        if (v[i] != cplx(0.0)) {
            out.terms.emplace_back(v[i], (uint64_t)i);
        }
    }
    return true;
}

cplx Parser::amp_sum() {
    cplx a = amp_prod();
    while (at_sym("+") || at_sym("-")) {
        const bool plus = next().text == "+";
        const cplx b = amp_prod();
        a = plus ? a + b : a - b;
    }
    return a;
}

cplx Parser::amp_prod() {
    cplx a = amp_unary();
    while (at_sym("*") || at_sym("/")) {
        const bool mul = next().text == "*";
        const cplx b = amp_unary();
        a = mul ? a * b : a / b;
    }
    return a;
}

cplx Parser::amp_unary() {
    if (at_sym("-")) {
        next();
        return -amp_unary();
    }
    if (at_sym("+")) {
        next();
        return amp_unary();
    }
    return amp_atom();
}

cplx Parser::amp_atom() {
    const Token &t = peek();
    if (t.kind == Tok::Num) {
        return std::stod(next().text);
    }
    if (t.kind == Tok::Imag) {
        return cplx(0.0, std::stod(next().text));
    }
    if (at_sym("(")) {
        next();
        const cplx a = amp_sum();
        expect_sym(")");
        return a;
    }
    if (at_word("i")) {
        next();
        return cplx(0.0, 1.0);
    }
    if (at_word("pi")) {
        next();
        return M_PI;
    }
    if (at_word("sqrt") || at_word("exp")) {
        const bool is_sqrt = next().text == "sqrt";
        expect_sym("(");
        const cplx a = amp_sum();
        expect_sym(")");
        return is_sqrt ? std::sqrt(a) : std::exp(a);
    }
    fail("amplitude");
}

bool Parser::at_weight() const {
    return peek().kind == Tok::Num && at_sym("/", 1) && peek(2).kind == Tok::Num;
}

Rational Parser::weight() {
    const Token &t = peek();
    const int64_t p = expect_int();
    expect_sym("/");
    const int64_t q = expect_int();
    if (q == 0) {
        throw ParseError("weight with zero denominator", t.line, t.col);
    }
    return Rational(p, q);
}

Dist Parser::dist() {
    if (at_sym("(")) {
        // (D)[a/x]: substitution over a whole distribution formula.
        const size_t m = mark();
        try {
            next();
            Dist d = dist();
            expect_sym(")");
            if (at_sym("[")) {
                while (at_sym("[")) {
                    next();
                    AexpPtr a = aexp();
                    expect_sym("/");
                    const std::string x = expect_ident();
                    expect_sym("]");
                    d = substitute(d, x, a);
                }
                if (at_sym("}") || at_end() || at_word("by")) {
                    return d;
                }
            }
        } catch (const ParseError &) {
        }
        reset(m);
    }
    const Token start = peek();
    std::vector<Rational> ws;
    std::vector<FormulaPtr> comps;
    bool weighted = at_weight();
    for (;;) {
        if (at_weight() != weighted) {
            fail(weighted ? "weight" : "formula without weight");
        }
        if (weighted) {
            ws.push_back(weight());
        }
        comps.push_back(formula());
        if (!at_sym("(+)")) {
            break;
        }
        next();
    }
    if (weighted) {
        Rational total = 0;
        for (const auto &w : ws) {
            if (w < 0) {
                throw ParseError("negative weight", start.line, start.col);
            }
            total += w;
        }
        if (total != 1 && strict_weights) {
            throw ParseError("weights sum to " + to_string(total) + ", expected 1", start.line, start.col);
        }
        return Dist::weighted(ws, comps);
    }
    if (comps.size() == 1) {
        return Dist::single(comps[0]);
    }
    return Dist::unweighted(comps);
}

// ---------------------------------------------------------------- programs

std::vector<std::string> Parser::qubit_list() {
    std::vector<std::string> qs{expect_ident()};
    while (at_sym(",")) {
        next();
        qs.push_back(expect_ident());
    }
    std::set<std::string> seen;
    for (const auto &q : qs) {
        if (!seen.insert(q).second) {
            fail("distinct qubits (" + q + " repeats)");
        }
    }
    return qs;
}

void Parser::note_qubits(Program &prog, const std::vector<std::string> &qs) {
    for (const auto &q : qs) {
        if (std::find(prog.qubits.begin(), prog.qubits.end(), q) != prog.qubits.end()) {
            continue;
        }
        if (declared_qubits) {
            fail("declared qubit (" + q + " is not declared)");
        }
        prog.qubits.push_back(q);
    }
}

cplx Parser::matrix_entry() {
    double sign = 1.0;
    if (at_sym("-")) {
        next();
        sign = -1.0;
    } else if (at_sym("+")) {
        next();
    }
    auto part = [&](double s) -> cplx {
        const Token &t = peek();
        if (t.kind == Tok::Num) {
            return s * std::stod(next().text);
        }
        if (t.kind == Tok::Imag) {
            return cplx(0.0, s * std::stod(next().text));
        }
        fail("matrix entry");
    };
    cplx z = part(sign);
    // re+imj written without spaces lexes as Num, '+', Imag.
    if ((at_sym("+") || at_sym("-")) && peek(1).kind == Tok::Imag && z.imag() == 0.0) {
        const double s2 = next().text == "+" ? 1.0 : -1.0;
        z += part(s2);
    }
    return z;
}

MatrixXc Parser::op_sum(int arity) {
    const Eigen::Index d = Eigen::Index{1} << arity;
    MatrixXc m = MatrixXc::Zero(d, d);
    for (bool first = true;; first = false) {
        double sign = 1.0;
        if (!first) {
            if (at_sym("+")) {
                next();
            } else if (at_sym("-")) {
                next();
                sign = -1.0;
            } else {
                break;
            }
        }
        cplx c = 1.0;
        if (peek().kind != Tok::Ket) {
            c = amp_prod();
        }
        if (peek().kind != Tok::Ket) {
            fail("ket in measurement operator");
        }
        const Token k = next();
        if (peek().kind != Tok::Bra) {
            fail("bra in measurement operator");
        }
        const Token b = next();
        if ((int)k.text.size() != arity || (int)b.text.size() != arity ||
            k.text.find_first_not_of("01") != std::string::npos) {
            throw ParseError("outer product does not match arity " + std::to_string(arity), k.line, k.col);
        }
        m(bits_value(k.text), bits_value(b.text)) += sign * c;
    }
    return m;
}

bool Parser::declaration(Program &prog) {
    if (!declaration_item(prog)) {
        return false;
    }
    if (at_sym(";")) {
        next();
    }
    return true;
}

bool Parser::declaration_item(Program &prog) {
    if (at_word("qubit")) {
        next();
        for (const auto &q : qubit_list()) {
            if (std::find(prog.qubits.begin(), prog.qubits.end(), q) != prog.qubits.end()) {
                fail("new qubit name (" + q + " already declared)");
            }
            prog.qubits.push_back(q);
        }
        declared_qubits = true;
        return true;
    }
    if (at_word("measurement")) {
        const Token kw = next();
        MeasDecl m;
        m.name = expect_ident();
        if (prog.find_measurement(m.name)) {
            throw ParseError("measurement " + m.name + " declared twice", kw.line, kw.col);
        }
        if (at_sym("=")) {
            next();
            expect_word("std");
            expect_sym("(");
            m.arity = (int)expect_int();
            expect_sym(")");
            if (m.arity < 1 || m.arity > 20) {
                throw ParseError("std measurement arity out of range", kw.line, kw.col);
            }
            m.std_basis = true;
            const Eigen::Index d = Eigen::Index{1} << m.arity;
            for (Eigen::Index k = 0; k < d; k++) {
                MatrixXc op = MatrixXc::Zero(d, d);
                op(k, k) = 1.0;
                m.ops.push_back(op);
            }
        } else {
            expect_word("on");
            m.arity = (int)expect_int();
            if (m.arity < 1 || m.arity > 10) {
                throw ParseError("measurement arity out of range", kw.line, kw.col);
            }
            m.std_basis = false;
            expect_sym("=");
            expect_sym("{");
            m.ops.push_back(op_sum(m.arity));
            while (at_sym(",")) {
                next();
                m.ops.push_back(op_sum(m.arity));
            }
            expect_sym("}");
            try {
                check_completeness(m.ops, 1e-9);
            } catch (const KindError &e) {
                throw ParseError("measurement " + m.name + " is not complete", kw.line, kw.col);
            }
        }
        prog.measurements.push_back(std::move(m));
        return true;
    }
    if (at_word("gate")) {
        const Token kw = next();
        GateDecl g;
        g.name = expect_ident();
        if (prog.find_gate(g.name) || is_builtin_gate(g.name) || g.name == "cmodmul") {
            throw ParseError("gate " + g.name + " already defined", kw.line, kw.col);
        }
        if (at_sym("=")) {
            next();
            expect_word("file");
            if (peek().kind != Tok::String) {
                fail("file name");
            }
            g.source = GateDecl::Source::File;
            g.path = next().text;
            const std::string full = (!g.path.empty() && g.path[0] == '/') ? g.path : base_dir_ + "/" + g.path;
            try {
                g.mat = parse_matrix_text(read_file(full));
            } catch (const std::exception &e) {
                throw ParseError("gate " + g.name + ": " + e.what(), kw.line, kw.col);
            }
            int n = 0;
            while ((Eigen::Index{1} << n) < g.mat.rows()) {
                n++;
            }
            if ((Eigen::Index{1} << n) != g.mat.rows()) {
                throw ParseError("gate " + g.name + ": dimension is not a power of two", kw.line, kw.col);
            }
            g.arity = n;
        } else {
            expect_word("on");
            g.arity = (int)expect_int();
            if (g.arity < 1 || g.arity > 12) {
                throw ParseError("gate arity out of range", kw.line, kw.col);
            }
            expect_sym("=");
            const Eigen::Index d = Eigen::Index{1} << g.arity;
            if (at_word("perm")) {
                next();
                g.source = GateDecl::Source::Perm;
                expect_sym("[");
                while (!at_sym("]")) {
                    g.perm.push_back((uint64_t)expect_int());
                }
                next();
                if ((Eigen::Index)g.perm.size() != d) {
                    throw ParseError("perm has " + std::to_string(g.perm.size()) + " entries, expected " + std::to_string(d),
                                     kw.line, kw.col);
                }
                try {
                    g.mat = permutation_matrix(g.perm);
                } catch (const std::exception &e) {
                    throw ParseError("gate " + g.name + ": " + e.what(), kw.line, kw.col);
                }
            } else {
                g.source = GateDecl::Source::Inline;
                expect_sym("[");
                std::vector<std::vector<cplx>> rows(1);
                while (!at_sym("]")) {
                    if (at_sym(";")) {
                        next();
                        rows.emplace_back();
                        continue;
                    }
                    if (at_sym(",")) {
                        next();
                        continue;
                    }
                    rows.back().push_back(matrix_entry());
                }
                next();
                if ((Eigen::Index)rows.size() != d) {
                    throw ParseError("gate " + g.name + " needs " + std::to_string(d) + " rows", kw.line, kw.col);
                }
                g.mat = MatrixXc(d, d);
                for (Eigen::Index r = 0; r < d; r++) {
                    if ((Eigen::Index)rows[r].size() != d) {
                        throw ParseError("gate " + g.name + ": row " + std::to_string(r) + " has wrong length", kw.line,
                                         kw.col);
                    }
                    for (Eigen::Index c = 0; c < d; c++) {
                        g.mat(r, c) = rows[r][c];
                    }
                }
            }
        }
        if (!is_unitary(g.mat, 1e-9)) {
            throw ParseError("gate " + g.name + " is not unitary", kw.line, kw.col);
        }
        prog.gates.push_back(std::move(g));
        return true;
    }
    if (at_word("macro")) {
        const Token kw = next();
        MacroDecl m;
        m.name = expect_ident();
        if (prog.find_macro(m.name)) {
            throw ParseError("macro " + m.name + " declared twice", kw.line, kw.col);
        }
        expect_sym("(");
        if (!at_sym(")")) {
            m.params.push_back(expect_ident());
            while (at_sym(",")) {
                next();
                m.params.push_back(expect_ident());
            }
        }
        expect_sym(")");
        if (at_word("returns")) {
            next();
            m.ret = expect_ident();
        }
        expect_sym("{");
        // Registered before the body so self-calls parse and are rejected at expansion.
        prog.macros.push_back(m);
        ComPtr body = commands(prog);
        expect_sym("}");
        prog.macros.back().body = body;
        return true;
    }
    return false;
}

ComPtr Parser::commands(Program &prog) {
    std::vector<ComPtr> items;
    ComPtr c = command(prog);
    if (!c) {
        fail("command");
    }
    items.push_back(c);
    while (at_sym(";")) {
        next();
        ComPtr d = command(prog);
        if (!d) {
            break;  // trailing ';'
        }
        items.push_back(d);
    }
    return cx::seq(items);
}

ComPtr Parser::command(Program &prog) {
    const Token t = peek();
    if (at_word("skip")) {
        next();
        return cx::skip();
    }
    if (at_word("abort")) {
        next();
        return cx::abort_();
    }
    if (at_word("if")) {
        next();
        PurePtr b = pure();
        expect_word("then");
        ComPtr c1 = commands(prog);
        expect_word("else");
        ComPtr c2 = commands(prog);
        expect_word("fi");
        return cx::cond(b, c1, c2);
    }
    if (at_word("while")) {
        next();
        PurePtr b = pure();
        expect_word("do");
        ComPtr body = commands(prog);
        expect_word("od");
        return cx::loop(b, body);
    }
    if (t.kind != Tok::Ident || is_keyword(t.text)) {
        return nullptr;
    }
    // Initialization: q1, q2 := |0>
    if (at_sym(",", 1) || (at_sym(":=", 1) && peek(2).kind == Tok::Ket)) {
        std::vector<std::string> qs = qubit_list();
        expect_sym(":=");
        const Token k = peek();
        if (k.kind != Tok::Ket || k.text.find_first_not_of('0') != std::string::npos ||
            (k.text.size() != 1 && k.text.size() != qs.size())) {
            fail("|0> on the right of a qubit initialization");
        }
        next();
        note_qubits(prog, qs);
        return cx::init(qs);
    }
    if (at_sym(":=", 1)) {
        const std::string x = expect_ident();
        next();
        if (at_word("random") && at_sym("(", 1)) {
            next();
            std::vector<AexpPtr> args = arg_list();
            if (args.size() != 2) {
                throw ParseError("random expects 2 arguments", t.line, t.col);
            }
            return cx::random(x, args[0], args[1]);
        }
        if (peek().kind == Tok::Ident && at_sym("[", 1)) {
            const Token mt = next();
            const MeasDecl *m = prog.find_measurement(mt.text);
            if (!m) {
                throw ParseError("unknown measurement " + mt.text, mt.line, mt.col);
            }
            expect_sym("[");
            std::vector<std::string> qs = qubit_list();
            expect_sym("]");
            if ((int)qs.size() != m->arity) {
                throw ParseError("measurement " + mt.text + " acts on " + std::to_string(m->arity) + " qubits", mt.line,
                                 mt.col);
            }
            note_qubits(prog, qs);
            return cx::measure(x, mt.text, qs);
        }
        if (peek().kind == Tok::Ident && at_sym("(", 1) && prog.find_macro(peek().text)) {
            const std::string f = next().text;
            return cx::call(x, f, arg_list());
        }
        return cx::assign(x, aexp());
    }
    // Gate application or macro call without a result.
    const std::string g = next().text;
    if (at_sym("(") && prog.find_macro(g)) {
        return cx::call("", g, arg_list());
    }
    bool adjoint = false;
    if (at_sym("^")) {
        next();
        expect_word("dag");
        adjoint = true;
    }
    std::vector<AexpPtr> params;
    if (at_sym("(")) {
        params = arg_list();
    }
    if (!at_sym("[")) {
        reset(mark() - 1);
        fail("':=' or gate application");
    }
    next();
    std::vector<std::string> qs = qubit_list();
    expect_sym("]");
    const GateDecl *gd = prog.find_gate(g);
    if (g == "cmodmul") {
        if (params.size() != 3) {
            throw ParseError("cmodmul expects parameters (a, N, L)", t.line, t.col);
        }
    } else if (gd) {
        if ((int)qs.size() != gd->arity) {
            throw ParseError("gate " + g + " acts on " + std::to_string(gd->arity) + " qubits", t.line, t.col);
        }
    } else if (!is_builtin_gate(g)) {
        throw ParseError("unknown gate " + g, t.line, t.col);
    } else if (g == "CNOT" && qs.size() != 2) {
        throw ParseError("CNOT acts on 2 qubits", t.line, t.col);
    }
    if (!params.empty() && g != "cmodmul") {
        throw ParseError("gate " + g + " takes no parameters", t.line, t.col);
    }
    note_qubits(prog, qs);
    return cx::unitary(g, qs, adjoint, params);
}

}  // namespace syntax

Program parse_program(const std::string &text, const std::string &base_dir) {
    syntax::Parser p(syntax::lex(text), base_dir);
    Program prog;
    while (p.declaration(prog)) {
    }
    if (!p.at_end()) {
        prog.body = p.commands(prog);
    } else {
        prog.body = cx::skip();
    }
    if (!p.at_end()) {
        p.fail("';' or end of program");
    }
    // Macro bodies may mention qubits the main body never touches.
    if (!p.declared_qubits) {
        for (const auto &m : prog.macros) {
            for (const auto &q : qubits_of(m.body)) {
                if (std::find(prog.qubits.begin(), prog.qubits.end(), q) == prog.qubits.end()) {
                    prog.qubits.push_back(q);
                }
            }
        }
    }
    for (const auto &m : prog.macros) {
        try {
            inline_macros(prog, m.body);
        } catch (const MacroError &e) {
            throw ParseError(e.what(), 1, 1);
        }
    }
    return prog;
}

Program load_program(const std::string &path) {
    return parse_program(read_file(path), dir_of(path));
}

template <typename T, typename F>
static T parse_whole(const std::string &text, F f) {
    syntax::Parser p(syntax::lex(text));
    T out = f(p);
    if (!p.at_end()) {
        p.fail("end of input");
    }
    return out;
}

Dist parse_dist(const std::string &text) {
    return parse_whole<Dist>(text, [](syntax::Parser &p) { return p.dist(); });
}

FormulaPtr parse_formula(const std::string &text) {
    return parse_whole<FormulaPtr>(text, [](syntax::Parser &p) { return p.formula(); });
}

PurePtr parse_pure(const std::string &text) {
    return parse_whole<PurePtr>(text, [](syntax::Parser &p) { return p.pure(); });
}

AexpPtr parse_aexp(const std::string &text) {
    return parse_whole<AexpPtr>(text, [](syntax::Parser &p) { return p.aexp(); });
}

}  // namespace qhl
