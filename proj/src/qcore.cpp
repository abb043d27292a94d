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

#include "qhl/qcore.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace qhl {

QubitLayout::QubitLayout(std::vector<std::string> names) : names_(std::move(names)) {
    std::set<std::string> seen;
    for (const auto &q : names_) {
        if (!seen.insert(q).second) {
            throw LayoutError("duplicate qubit '" + q + "' in layout");
        }
    }
    if (names_.size() > 30) {
        throw LayoutError("layout exceeds 30 qubits");
    }
}

bool QubitLayout::contains(const std::string &q) const {
    return index_of(q) >= 0;
}

int QubitLayout::index_of(const std::string &q) const {
    for (size_t k = 0; k < names_.size(); k++) {
        if (names_[k] == q) {
            return (int)k;
        }
    }
    return -1;
}

std::vector<int> QubitLayout::positions(const QubitLayout &sub) const {
    std::vector<int> out;
    out.reserve(sub.size());
    for (const auto &q : sub.names()) {
        int k = index_of(q);
        if (k < 0) {
            throw LayoutError("qubit '" + q + "' is not in layout " + str());
        }
        out.push_back(k);
    }
    return out;
}

bool QubitLayout::disjoint(const QubitLayout &other) const {
    for (const auto &q : other.names()) {
        if (contains(q)) {
            return false;
        }
    }
    return true;
}

bool QubitLayout::same_set(const QubitLayout &other) const {
    if (other.size() != size()) {
        return false;
    }
    for (const auto &q : other.names()) {
        if (!contains(q)) {
            return false;
        }
    }
    return true;
}

QubitLayout QubitLayout::concat(const QubitLayout &other) const {
    std::vector<std::string> all = names_;
    all.insert(all.end(), other.names().begin(), other.names().end());
    return QubitLayout(std::move(all));
}

std::string QubitLayout::str() const {
    std::string s = "(";
    for (size_t k = 0; k < names_.size(); k++) {
        if (k) {
            s += " ";
        }
        s += names_[k];
    }
    return s + ")";
}

namespace kernel {

std::vector<size_t> offsets(size_t n, const std::vector<int> &pos) {
    const size_t k = pos.size();
    std::vector<size_t> off(size_t{1} << k, 0);
    for (size_t j = 0; j < off.size(); j++) {
        size_t o = 0;
        for (size_t b = 0; b < k; b++) {
            if ((j >> (k - 1 - b)) & 1) {
                o |= size_t{1} << (n - 1 - pos[b]);
            }
        }
        off[j] = o;
    }
    return off;
}

size_t mask_of(size_t n, const std::vector<int> &pos) {
    size_t m = 0;
    for (int p : pos) {
        m |= size_t{1} << (n - 1 - p);
    }
    return m;
}

}  // namespace kernel

void check_completeness(const std::vector<MatrixXc> &m_ops, double tol) {
    if (m_ops.empty()) {
        throw KindError("measurement has no operators");
    }
    MatrixXc acc = MatrixXc::Zero(m_ops[0].rows(), m_ops[0].cols());
    for (const auto &m : m_ops) {
        if (m.rows() != acc.rows() || m.cols() != acc.cols()) {
            throw KindError("measurement operators differ in dimension");
        }
        acc += m.adjoint() * m;
    }
    if ((acc - MatrixXc::Identity(acc.rows(), acc.cols())).cwiseAbs().maxCoeff() > tol) {
        throw KindError("measurement operators violate completeness");
    }
}

std::vector<MeasureOutcome> measure(
    const PureState &psi, const std::vector<MatrixXc> &m_ops, const QubitLayout &targets, double prune) {
    check_completeness(m_ops);
    if (m_ops[0].rows() != (Eigen::Index)targets.dim()) {
        throw LayoutError("measure: operator arity does not match " + targets.str());
    }
    std::vector<MeasureOutcome> out;
    for (size_t i = 0; i < m_ops.size(); i++) {
        VectorXc v = apply_matrix(psi, m_ops[i], targets);
        double p = v.squaredNorm();
        if (p < prune) {
            continue;
        }
        out.push_back({(int)i, p, PureState{psi.layout, v / std::sqrt(p)}});
    }
    return out;
}

std::vector<WeightedState> reset_qubit(const PureState &psi, const std::string &q, double prune) {
    int k = psi.layout.index_of(q);
    if (k < 0) {
        throw LayoutError("reset_qubit: '" + q + "' is not in layout " + psi.layout.str());
    }
    const size_t n = psi.layout.size();
    const size_t bit = size_t{1} << (n - 1 - k);
    VectorXc v0 = VectorXc::Zero(psi.amp.size());
    VectorXc v1 = VectorXc::Zero(psi.amp.size());
    for (Eigen::Index i = 0; i < psi.amp.size(); i++) {
        if (i & bit) {
            v1[i & ~bit] = psi.amp[i];
        } else {
            v0[i] = psi.amp[i];
        }
    }
    std::vector<WeightedState> out;
    for (VectorXc *v : {&v0, &v1}) {
        double w = v->squaredNorm();
        if (w < prune) {
            continue;
        }
        VectorXc u = *v / std::sqrt(w);
        if (!out.empty() && equal_up_to_phase(out[0].post.amp, u)) {
            out[0].weight += w;
            continue;
        }
        out.push_back({w, PureState{psi.layout, std::move(u)}});
    }
    return out;
}

bool equal_up_to_phase(const VectorXc &a, const VectorXc &b, double tol) {
    if (a.size() != b.size()) {
        throw LayoutError("equal_up_to_phase: dimension mismatch");
    }
    return std::abs(a.dot(b)) >= 1.0 - tol;
}

bool equal_up_to_phase(const PureState &a, const PureState &b, double tol) {
    if (!(a.layout == b.layout)) {
        throw LayoutError("equal_up_to_phase: layouts differ: " + a.layout.str() + " vs " + b.layout.str());
    }
    return equal_up_to_phase(a.amp, b.amp, tol);
}

MatrixXc qft_matrix(size_t n, bool inverse) {
    const size_t d = size_t{1} << n;
    MatrixXc m(d, d);
    const double s = inverse ? -1.0 : 1.0;
    const double norm = 1.0 / std::sqrt((double)d);
    for (size_t j = 0; j < d; j++) {
        for (size_t k = 0; k < d; k++) {
            // Reduce jk mod d before the angle so large registers keep full precision.
            double ang = s * 2.0 * M_PI * (double)((j * k) % d) / (double)d;
            m(k, j) = std::polar(norm, ang);
        }
    }
    return m;
}

static MatrixXc kron_power(const MatrixXc &g, size_t n) {
    MatrixXc m = MatrixXc::Identity(1, 1);
    for (size_t i = 0; i < n; i++) {
        MatrixXc next(m.rows() * g.rows(), m.cols() * g.cols());
        for (Eigen::Index a = 0; a < m.rows(); a++) {
            for (Eigen::Index b = 0; b < m.cols(); b++) {
                next.block(a * g.rows(), b * g.cols(), g.rows(), g.cols()) = m(a, b) * g;
            }
        }
        m = std::move(next);
    }
    return m;
}

bool is_builtin_gate(const std::string &name) {
    static const std::set<std::string> names{"H", "X", "I", "CNOT", "QFT", "QFTinv", "Uplus"};
    return names.count(name) > 0;
}

Operator builtin_gate(const std::string &name, const QubitLayout &targets) {
    const size_t n = targets.size();
    if (n == 0) {
        throw LookupError("gate " + name + " needs at least one target");
    }
    MatrixXc m;
    const double r = 1.0 / std::sqrt(2.0);
    if (name == "H") {
        MatrixXc h(2, 2);
        h << r, r, r, -r;
        m = kron_power(h, n);
    } else if (name == "X") {
        MatrixXc x(2, 2);
        x << 0, 1, 1, 0;
        m = kron_power(x, n);
    } else if (name == "I") {
        m = MatrixXc::Identity(targets.dim(), targets.dim());
    } else if (name == "CNOT") {
        if (n != 2) {
            throw LookupError("CNOT takes exactly 2 targets");
        }
        m = MatrixXc::Zero(4, 4);
        m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    } else if (name == "QFT" || name == "QFTinv") {
        m = qft_matrix(n, name == "QFTinv");
    } else if (name == "Uplus") {
        // X on the lowest qubit: |0...0> -> |0...01>.
        MatrixXc x(2, 2);
        x << 0, 1, 1, 0;
        m = kron_power(MatrixXc::Identity(2, 2), n - 1);
        MatrixXc full(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index a = 0; a < m.rows(); a++) {
            for (Eigen::Index b = 0; b < m.cols(); b++) {
                full.block(a * 2, b * 2, 2, 2) = m(a, b) * x;
            }
        }
        m = std::move(full);
    } else {
        throw LookupError("unknown gate '" + name + "'");
    }
    return {targets, std::move(m), OpKind::Unitary};
}

MatrixXc permutation_matrix(const std::vector<uint64_t> &perm) {
    const size_t d = perm.size();
    std::vector<bool> hit(d, false);
    MatrixXc m = MatrixXc::Zero(d, d);
    for (size_t k = 0; k < d; k++) {
        if (perm[k] >= d || hit[perm[k]]) {
            throw KindError("permutation is not a bijection");
        }
        hit[perm[k]] = true;
        m(perm[k], k) = 1;
    }
    return m;
}

cplx parse_complex(const std::string &tok) {
    const char *s = tok.c_str();
    char *end = nullptr;
    if (tok == "j" || tok == "+j") {
        return {0, 1};
    }
    if (tok == "-j") {
        return {0, -1};
    }
    double a = std::strtod(s, &end);
    if (end == s) {
        throw std::invalid_argument("bad complex entry '" + tok + "'");
    }
    if (*end == '\0') {
        return {a, 0};
    }
    if (*end == 'j' && end[1] == '\0') {
        return {0, a};
    }
    const char *rest = end;
    if (*rest != '+' && *rest != '-') {
        throw std::invalid_argument("bad complex entry '" + tok + "'");
    }
    double b;
    if ((rest[0] == '+' || rest[0] == '-') && rest[1] == 'j' && rest[2] == '\0') {
        b = rest[0] == '-' ? -1.0 : 1.0;
        end = const_cast<char *>(rest + 1);
    } else {
        b = std::strtod(rest, &end);
        if (end == rest) {
            throw std::invalid_argument("bad complex entry '" + tok + "'");
        }
    }
    if (*end != 'j' || end[1] != '\0') {
        throw std::invalid_argument("bad complex entry '" + tok + "'");
    }
    return {a, b};
}

std::string format_complex(cplx z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
    return buf;
}

MatrixXc parse_matrix_text(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<cplx>> rows;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream ls(line);
        std::vector<cplx> row;
        std::string tok;
        while (ls >> tok) {
            row.push_back(parse_complex(tok));
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) {
        throw std::invalid_argument("empty matrix text");
    }
    MatrixXc m(rows.size(), rows[0].size());
    for (size_t i = 0; i < rows.size(); i++) {
        if (rows[i].size() != rows[0].size()) {
            throw std::invalid_argument("matrix rows have unequal length");
        }
        for (size_t j = 0; j < rows[i].size(); j++) {
            m(i, j) = rows[i][j];
        }
    }
    return m;
}

std::string format_matrix_text(const MatrixXc &m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            if (j) {
                out += ' ';
            }
            out += format_complex(m(i, j));
        }
        out += '\n';
    }
    return out;
}

PureState basis_state(const QubitLayout &layout, uint64_t index) {
    VectorXc v = VectorXc::Zero(layout.dim());
    v[index] = 1;
    return {layout, std::move(v)};
}

PureState zero_state(const QubitLayout &layout) {
    return basis_state(layout, 0);
}

}  // namespace qhl
