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

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qhl {

typedef std::complex<double> cplx;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

typedef VectorX<cplx> VectorXc;
typedef MatrixX<cplx> MatrixXc;

constexpr double kTol = 1e-9;
constexpr double kPrune = 1e-12;

struct LayoutError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct KindError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct LookupError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Ordered qubit names. Index 0 is the most significant bit of a basis index.
class QubitLayout {
   public:
    QubitLayout() = default;
    QubitLayout(std::vector<std::string> names);
    QubitLayout(std::initializer_list<std::string> names) : QubitLayout(std::vector<std::string>(names)) {
    }

    size_t size() const {
        return names_.size();
    }
    size_t dim() const {
        return size_t{1} << names_.size();
    }
    const std::vector<std::string> &names() const {
        return names_;
    }
    const std::string &operator[](size_t k) const {
        return names_[k];
    }
    bool contains(const std::string &q) const;
    /// Position of q, or -1.
    int index_of(const std::string &q) const;
    /// Positions of every name of sub; throws LayoutError when one is missing.
    std::vector<int> positions(const QubitLayout &sub) const;
    bool disjoint(const QubitLayout &other) const;
    bool same_set(const QubitLayout &other) const;
    QubitLayout concat(const QubitLayout &other) const;
    bool operator==(const QubitLayout &other) const {
        return names_ == other.names_;
    }
    std::string str() const;

   private:
    std::vector<std::string> names_;
};

enum class OpKind { Unitary, MeasurementElement, General };

template <typename Scalar>
struct BasicPureState {
    QubitLayout layout;
    VectorX<Scalar> amp;
};

template <typename Scalar>
struct BasicOperator {
    QubitLayout layout;
    MatrixX<Scalar> mat;
    OpKind kind = OpKind::General;
};

typedef BasicPureState<cplx> PureState;
typedef BasicOperator<cplx> Operator;

namespace kernel {

/// Basis-index offsets of the 2^k sub-indices of the qubits at pos (pos[0] most significant).
std::vector<size_t> offsets(size_t n, const std::vector<int> &pos);
size_t mask_of(size_t n, const std::vector<int> &pos);

/// amp <- (m on qubits pos) amp, identity elsewhere.
template <typename Scalar>
void apply_in_place(VectorX<Scalar> &amp, size_t n, const std::vector<int> &pos, const MatrixX<Scalar> &m) {
    const std::vector<size_t> off = offsets(n, pos);
    const size_t mask = mask_of(n, pos);
    const size_t dk = off.size();
    VectorX<Scalar> in(dk), out(dk);
    const size_t d = size_t{1} << n;
    for (size_t base = 0; base < d; base++) {
        if (base & mask) {
            continue;
        }
        for (size_t j = 0; j < dk; j++) {
            in[j] = amp[base | off[j]];
        }
        out.noalias() = m * in;
        for (size_t j = 0; j < dk; j++) {
            amp[base | off[j]] = out[j];
        }
    }
}

/// Reshapes a pure state into a (kept x rest) matrix.
template <typename Scalar>
MatrixX<Scalar> split(const VectorX<Scalar> &amp, size_t n, const std::vector<int> &keep) {
    std::vector<int> rest;
    for (int k = 0; k < (int)n; k++) {
        if (std::find(keep.begin(), keep.end(), k) == keep.end()) {
            rest.push_back(k);
        }
    }
    const std::vector<size_t> ok = offsets(n, keep);
    const std::vector<size_t> orr = offsets(n, rest);
    MatrixX<Scalar> psi(ok.size(), orr.size());
    for (size_t a = 0; a < ok.size(); a++) {
        for (size_t r = 0; r < orr.size(); r++) {
            psi(a, r) = amp[ok[a] | orr[r]];
        }
    }
    return psi;
}

/// Reorders amplitudes from layout `from` into layout `to` (same qubit set).
template <typename Scalar>
VectorX<Scalar> permute(const VectorX<Scalar> &amp, const QubitLayout &from, const QubitLayout &to) {
    const std::vector<int> pos = from.positions(to);
    const std::vector<size_t> off = offsets(from.size(), pos);
    VectorX<Scalar> out(amp.size());
    for (size_t j = 0; j < off.size(); j++) {
        out[j] = amp[off[j]];
    }
    return out;
}

}  // namespace kernel

template <typename Scalar>
BasicPureState<Scalar> tensor(const BasicPureState<Scalar> &a, const BasicPureState<Scalar> &b) {
    if (!a.layout.disjoint(b.layout)) {
        throw LayoutError("tensor: layouts overlap: " + a.layout.str() + " and " + b.layout.str());
    }
    VectorX<Scalar> v(a.amp.size() * b.amp.size());
    for (Eigen::Index i = 0; i < a.amp.size(); i++) {
        v.segment(i * b.amp.size(), b.amp.size()) = a.amp[i] * b.amp;
    }
    return {a.layout.concat(b.layout), std::move(v)};
}

template <typename Scalar>
BasicOperator<Scalar> tensor(const BasicOperator<Scalar> &a, const BasicOperator<Scalar> &b) {
    if (!a.layout.disjoint(b.layout)) {
        throw LayoutError("tensor: layouts overlap: " + a.layout.str() + " and " + b.layout.str());
    }
    const Eigen::Index ra = a.mat.rows(), rb = b.mat.rows();
    MatrixX<Scalar> m(ra * rb, ra * rb);
    for (Eigen::Index i = 0; i < ra; i++) {
        for (Eigen::Index j = 0; j < ra; j++) {
            m.block(i * rb, j * rb, rb, rb) = a.mat(i, j) * b.mat;
        }
    }
    OpKind kind = (a.kind == b.kind) ? a.kind : OpKind::General;
    return {a.layout.concat(b.layout), std::move(m), kind};
}

/// tr over rho.layout minus keep, result ordered as keep.
template <typename Scalar>
BasicOperator<Scalar> partial_trace(const BasicOperator<Scalar> &rho, const QubitLayout &keep) {
    const size_t n = rho.layout.size();
    std::vector<int> kp;
    try {
        kp = rho.layout.positions(keep);
    } catch (const LayoutError &) {
        throw LayoutError("partial_trace: " + keep.str() + " is not a subset of " + rho.layout.str());
    }
    std::vector<int> rest;
    for (int k = 0; k < (int)n; k++) {
        if (std::find(kp.begin(), kp.end(), k) == kp.end()) {
            rest.push_back(k);
        }
    }
    const std::vector<size_t> ok = kernel::offsets(n, kp);
    const std::vector<size_t> orr = kernel::offsets(n, rest);
    MatrixX<Scalar> out = MatrixX<Scalar>::Zero(ok.size(), ok.size());
    for (size_t a = 0; a < ok.size(); a++) {
        for (size_t b = 0; b < ok.size(); b++) {
            Scalar s(0);
            for (size_t r : orr) {
                s += rho.mat(ok[a] | r, ok[b] | r);
            }
            out(a, b) = s;
        }
    }
    return {keep, std::move(out), OpKind::General};
}

/// Reduced density matrix of a pure state on keep.
template <typename Scalar>
MatrixX<Scalar> reduced(const BasicPureState<Scalar> &psi, const QubitLayout &keep) {
    MatrixX<Scalar> m = kernel::split(psi.amp, psi.layout.size(), psi.layout.positions(keep));
    return m * m.adjoint();
}

template <typename Scalar>
bool is_unitary(const MatrixX<Scalar> &u, double tol = kTol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    return ((u.adjoint() * u) - MatrixX<Scalar>::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

template <typename Scalar>
BasicPureState<Scalar> apply_unitary(
    const BasicPureState<Scalar> &psi, const BasicOperator<Scalar> &u, const QubitLayout &targets) {
    if (u.kind != OpKind::Unitary && !is_unitary(u.mat)) {
        throw KindError("apply_unitary: operator on " + targets.str() + " is not unitary");
    }
    if (u.mat.rows() != (Eigen::Index)targets.dim()) {
        throw LayoutError("apply_unitary: operator arity does not match " + targets.str());
    }
    BasicPureState<Scalar> out = psi;
    kernel::apply_in_place(out.amp, psi.layout.size(), psi.layout.positions(targets), u.mat);
    return out;
}

/// Applies any square matrix on targets; no unitarity check.
template <typename Scalar>
VectorX<Scalar> apply_matrix(const BasicPureState<Scalar> &psi, const MatrixX<Scalar> &m, const QubitLayout &targets) {
    VectorX<Scalar> out = psi.amp;
    kernel::apply_in_place(out, psi.layout.size(), psi.layout.positions(targets), m);
    return out;
}

struct MeasureOutcome {
    int outcome;
    double prob;
    PureState post;
};

/// Throws KindError unless sum_i M_i^dag M_i = I within tol.
void check_completeness(const std::vector<MatrixXc> &m_ops, double tol = kTol);

std::vector<MeasureOutcome> measure(
    const PureState &psi, const std::vector<MatrixXc> &m_ops, const QubitLayout &targets, double prune = kPrune);

struct WeightedState {
    double weight;
    PureState post;
};

/// Pure decomposition of the reset channel on q; components equal up to phase are merged.
std::vector<WeightedState> reset_qubit(const PureState &psi, const std::string &q, double prune = kPrune);

bool equal_up_to_phase(const PureState &a, const PureState &b, double tol = kTol);
bool equal_up_to_phase(const VectorXc &a, const VectorXc &b, double tol = kTol);

/// Builtin gate names: H, X, I, CNOT, QFT, QFTinv, Uplus. H, X, I act qubit-wise on any arity.
Operator builtin_gate(const std::string &name, const QubitLayout &targets);
bool is_builtin_gate(const std::string &name);
MatrixXc qft_matrix(size_t n, bool inverse);

/// Permutation unitary |k> -> |perm[k]>.
MatrixXc permutation_matrix(const std::vector<uint64_t> &perm);

/// Text matrix: one row per line, entries re+imj separated by whitespace; '#' comments.
MatrixXc parse_matrix_text(const std::string &text);
std::string format_matrix_text(const MatrixXc &m);
cplx parse_complex(const std::string &tok);
std::string format_complex(cplx z);

/// Computational basis state over layout.
PureState basis_state(const QubitLayout &layout, uint64_t index);
PureState zero_state(const QubitLayout &layout);

}  // namespace qhl
