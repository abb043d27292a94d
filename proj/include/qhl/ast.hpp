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

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qhl/classical.hpp"
#include "qhl/qcore.hpp"

namespace qhl {

// Immutable syntax trees shared by pointer. Structural equality is `equal`; printing is `to_string`,
// and the printed form parses back to an equal tree.

struct Aexp;
typedef std::shared_ptr<const Aexp> AexpPtr;

struct Aexp {
    enum class Kind { Num, Var, Neg, Bin, Call };
    Kind kind;
    int64_t value = 0;
    /// Variable name, binary operator (+ - * div mod) or function name.
    std::string name;
    std::vector<AexpPtr> args;
};

namespace ax {
AexpPtr num(int64_t v);
AexpPtr var(const std::string &x);
AexpPtr neg(AexpPtr a);
AexpPtr bin(const std::string &op, AexpPtr a, AexpPtr b);
AexpPtr call(const std::string &f, std::vector<AexpPtr> args);
}  // namespace ax

/// Known integer functions and their arities.
int builtin_function_arity(const std::string &f);

struct Pure;
typedef std::shared_ptr<const Pure> PurePtr;

/// Classical predicates; also used as program guards.
struct Pure {
    enum class Kind { True, False, Cmp, And, Or, Not, Implies, Forall };
    Kind kind;
    /// Comparison operator: = /= <= >= < > |
    std::string op;
    AexpPtr lhs, rhs;
    std::vector<PurePtr> kids;
    /// Bound variable of Forall.
    std::string var;
};

namespace px {
PurePtr truth();
PurePtr falsity();
PurePtr cmp(const std::string &op, AexpPtr a, AexpPtr b);
PurePtr conj(PurePtr a, PurePtr b);
PurePtr disj(PurePtr a, PurePtr b);
PurePtr implies(PurePtr a, PurePtr b);
PurePtr negate(PurePtr a);
PurePtr forall(const std::string &x, PurePtr body);
/// Complementary comparison operator: = and /=, < and >=, > and <=. Empty for |.
std::string complement_op(const std::string &op);
}  // namespace px

/// One tensor factor of a ket: a normalized combination of basis kets over qvars (qvars[0] is the MSB).
struct KetFactor {
    std::vector<std::string> qvars;
    std::vector<std::pair<cplx, uint64_t>> terms;
};

/// Tensor product of factors over pairwise disjoint qubits.
struct Ket {
    std::vector<KetFactor> factors;
    std::vector<std::string> qvars() const;
};

VectorXc factor_vector(const KetFactor &f);
/// Product factor from a pattern over {0,1,+,-}, one character per qubit.
KetFactor pattern_factor(std::vector<std::string> qvars, const std::string &pattern);
/// Product state over the concatenated qvars of all factors.
PureState ket_state(const Ket &k);
/// Single-factor ket holding the given state.
Ket ket_from_state(const PureState &psi, double drop = 1e-15);

struct Formula;
typedef std::shared_ptr<const Formula> FormulaPtr;

/// State formulas. And, Not and Forall over pure operands collapse into Pure nodes.
struct Formula {
    enum class Kind { Pure, Ket, Odot, And, Not, Forall };
    Kind kind;
    PurePtr pure;
    Ket ket;
    std::vector<FormulaPtr> kids;
    std::string var;

    bool is_pure() const {
        return kind == Kind::Pure;
    }
};

namespace fx {
FormulaPtr pure(PurePtr p);
FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr ket(Ket k);
FormulaPtr odot(FormulaPtr a, FormulaPtr b);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr negate(FormulaPtr a);
FormulaPtr forall(const std::string &x, FormulaPtr body);
}  // namespace fx

/// Distribution formulas: a single state formula, a weighted or an unweighted sum.
struct Dist {
    enum class Kind { Single, Weighted, Unweighted };
    Kind kind = Kind::Single;
    std::vector<Rational> weights;
    std::vector<FormulaPtr> comps;

    static Dist single(FormulaPtr f);
    static Dist weighted(std::vector<Rational> w, std::vector<FormulaPtr> comps);
    static Dist unweighted(std::vector<FormulaPtr> comps);
};

struct Com;
typedef std::shared_ptr<const Com> ComPtr;

struct Com {
    enum class Kind { Skip, Abort, Assign, Random, Seq, If, While, Init, Unitary, Measure, Call };
    Kind kind;
    /// Target of Assign, Random and Measure; result variable of Call (may be empty).
    std::string var;
    AexpPtr expr;
    AexpPtr lo, hi;
    PurePtr guard;
    /// Seq: items. If: then, else. While: body.
    std::vector<ComPtr> kids;
    std::vector<std::string> qvars;
    /// Gate, measurement or macro name.
    std::string name;
    bool adjoint = false;
    /// Gate parameters or macro arguments.
    std::vector<AexpPtr> args;
};

namespace cx {
ComPtr skip();
ComPtr abort_();
ComPtr assign(const std::string &x, AexpPtr a);
ComPtr random(const std::string &x, AexpPtr lo, AexpPtr hi);
/// Flattens nested sequences; a single item is returned unchanged.
ComPtr seq(std::vector<ComPtr> items);
ComPtr cond(PurePtr b, ComPtr c1, ComPtr c2);
ComPtr loop(PurePtr b, ComPtr body);
ComPtr init(std::vector<std::string> qs);
ComPtr unitary(const std::string &g, std::vector<std::string> qs, bool adjoint = false, std::vector<AexpPtr> params = {});
ComPtr measure(const std::string &x, const std::string &m, std::vector<std::string> qs);
ComPtr call(const std::string &result, const std::string &macro, std::vector<AexpPtr> args);
}  // namespace cx

struct MeasDecl {
    std::string name;
    int arity = 1;
    /// Declared as std(arity).
    bool std_basis = true;
    std::vector<MatrixXc> ops;
};

struct GateDecl {
    enum class Source { Inline, File, Perm };
    std::string name;
    int arity = 1;
    Source source = Source::Inline;
    MatrixXc mat;
    std::vector<uint64_t> perm;
    std::string path;
};

struct MacroDecl {
    std::string name;
    std::vector<std::string> params;
    std::string ret;
    ComPtr body;
};

struct Program {
    /// Declared order, or first appearance when nothing is declared.
    std::vector<std::string> qubits;
    std::vector<MeasDecl> measurements;
    std::vector<GateDecl> gates;
    std::vector<MacroDecl> macros;
    ComPtr body;

    const MeasDecl *find_measurement(const std::string &name) const;
    const GateDecl *find_gate(const std::string &name) const;
    const MacroDecl *find_macro(const std::string &name) const;
    QubitLayout layout() const {
        return QubitLayout(qubits);
    }
};

bool equal(const AexpPtr &a, const AexpPtr &b);
bool equal(const PurePtr &a, const PurePtr &b);
bool equal(const Ket &a, const Ket &b);
bool equal(const FormulaPtr &a, const FormulaPtr &b);
bool equal(const Dist &a, const Dist &b);
bool equal(const ComPtr &a, const ComPtr &b);
bool equal(const Program &a, const Program &b);

std::string to_string(const AexpPtr &a);
std::string to_string(const PurePtr &p);
std::string to_string(const Ket &k);
std::string to_string(const FormulaPtr &f);
std::string to_string(const Dist &d);
std::string to_string(const Rational &r);
/// Commands one per line, nested blocks indented by `indent` spaces per level.
std::string to_string(const ComPtr &c, int indent = 0);
std::string to_string(const Program &p);

}  // namespace qhl
