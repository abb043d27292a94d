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

#include "qhl/cases.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "qhl/ast.hpp"
#include "qhl/classical.hpp"
#include "qhl/sem.hpp"
#include "qhl/transport.hpp"

namespace qhl {

namespace {

std::vector<std::string> names(const std::string &prefix, int k) {
    std::vector<std::string> out;
    for (int i = 1; i <= k; i++) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

std::string join(const std::vector<std::string> &xs, const std::string &sep = ", ") {
    std::string out;
    for (size_t i = 0; i < xs.size(); i++) {
        out += (i ? sep : "") + xs[i];
    }
    return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string> &b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

double clean(double v) {
    return std::abs(v) < 1e-14 ? 0.0 : v;
}

std::string matrix_text(const MatrixXc &m) {
    std::string out = "[";
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        out += r ? ";\n    " : "";
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            out += (c ? " " : "") + format_complex(cplx(clean(m(r, c).real()), clean(m(r, c).imag())));
        }
    }
    return out + "]";
}

/// A ket expression for psi: basis kets print as patterns, anything else as one combination.
std::string ket_text(const PureState &psi) {
    VectorXc v = psi.amp;
    for (Eigen::Index i = 0; i < v.size(); i++) {
        v[i] = cplx(clean(v[i].real()), clean(v[i].imag()));
    }
    v /= v.norm();
    return to_string(ket_from_state(PureState{psi.layout, v}, 1e-14));
}

std::string pattern(const std::vector<std::string> &qs, const std::string &bits) {
    std::string sub;
    for (const auto &q : qs) {
        sub += (sub.empty() ? "" : " ") + q;
    }
    return "|" + bits + ">_{" + sub + "}";
}

/// The four checks build_hhl applies; returns A's eigendecomposition.
Eigen::SelfAdjointEigenSolver<MatrixXc> check_hhl(const HHLInstance &inst, std::vector<std::string> &warnings) {
    const Eigen::Index dim = Eigen::Index{1} << inst.m;
    if (inst.n < 1 || inst.m < 1 || inst.n + inst.m > 10) {
        throw BuildError("HHL register sizes out of range");
    }
    if (inst.A.rows() != dim || inst.A.cols() != dim || inst.b.size() != dim) {
        throw BuildError("A must be 2^m x 2^m and b of length 2^m");
    }
    if ((inst.A - inst.A.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
        throw BuildError("A is not Hermitian");
    }
    if (std::abs(inst.b.norm() - 1) > 1e-9) {
        throw BuildError("b is not a unit vector");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(inst.A);
    const double big_n = double(int64_t{1} << inst.n);
    double min_scaled = big_n;
    for (Eigen::Index j = 0; j < dim; j++) {
        const double phi = es.eigenvalues()[j] * inst.t_evo / (2 * M_PI);
        if (!(phi > 0 && phi < 1)) {
            throw BuildError("eigenphase " + std::to_string(phi) + " is outside (0, 1)");
        }
        const double scaled = phi * big_n;
        if (std::abs(scaled - std::round(scaled)) > 1e-9) {
            warnings.push_back("eigenphase " + std::to_string(phi) + " is not a multiple of 1/2^n; the output is approximate");
        }
        min_scaled = std::min(min_scaled, scaled);
    }
    if (!(inst.C > 0) || inst.C > min_scaled + 1e-9) {
        throw BuildError("C must lie in (0, " + std::to_string(min_scaled) + "]");
    }
    return es;
}

/// Unitary whose first column is b: Gram-Schmidt on b followed by the standard basis.
MatrixXc state_prep(const VectorXc &b) {
    const Eigen::Index d = b.size();
    MatrixXc u(d, d);
    Eigen::Index cols = 0;
    u.col(cols++) = b;
    for (Eigen::Index k = 0; k < d && cols < d; k++) {
        VectorXc e = VectorXc::Zero(d);
        e[k] = 1;
        for (Eigen::Index c = 0; c < cols; c++) {
            e -= u.col(c).dot(e) * u.col(c);
        }
        if (e.norm() > 1e-8) {
            u.col(cols++) = e / e.norm();
        }
    }
    return u;
}

PureState apply(const PureState &psi, const MatrixXc &u, const std::vector<std::string> &qs) {
    return apply_unitary(psi, Operator{QubitLayout(qs), u, OpKind::General}, QubitLayout(qs));
}

Rational exact_weight(double p) {
    const auto r = recover_rational(p);
    if (!r) {
        throw BuildError("outcome probability " + std::to_string(p) + " is not a small rational");
    }
    return Rational(numerator(*r).convert_to<long long>(), denominator(*r).convert_to<long long>());
}

}  // namespace

HHLInstance default_hhl() {
    HHLInstance inst;
    inst.A = MatrixXc::Zero(2, 2);
    inst.A(0, 0) = 0.25;
    inst.A(1, 1) = 0.5;
    inst.b = VectorXc::Constant(2, 1 / std::sqrt(2.0));
    return inst;
}

HHLBuild build_hhl(const HHLInstance &inst) {
    HHLBuild out;
    const auto es = check_hhl(inst, out.warnings);
    const Eigen::Index dm = Eigen::Index{1} << inst.m, dn = Eigen::Index{1} << inst.n;
    out.p = names("p", inst.n);
    out.q = names("q", inst.m);

    VectorXc phases(dm);
    for (Eigen::Index j = 0; j < dm; j++) {
        phases[j] = std::polar(1.0, es.eigenvalues()[j] * inst.t_evo);
    }
    const MatrixXc u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    out.uf = MatrixXc::Zero(dn * dm, dn * dm);
    MatrixXc power = MatrixXc::Identity(dm, dm);
    for (Eigen::Index tau = 0; tau < dn; tau++) {
        out.uf.block(tau * dm, tau * dm, dm, dm) = power;
        power = power * u;
    }
    out.uc = MatrixXc::Zero(2 * dn, 2 * dn);
    out.uc.block(0, 0, 2, 2) = MatrixXc::Identity(2, 2);
    for (Eigen::Index j = 1; j < dn; j++) {
        // Phases below C never occur for a valid instance; they get a full rotation to stay unitary.
        const double c = std::min(1.0, inst.C / double(j)), s = std::sqrt(1 - c * c);
        out.uc(2 * j, 2 * j) = s;
        out.uc(2 * j, 2 * j + 1) = -c;
        out.uc(2 * j + 1, 2 * j) = c;
        out.uc(2 * j + 1, 2 * j + 1) = s;
    }
    out.ub = state_prep(inst.b);
    out.x = inst.A.fullPivLu().solve(inst.b);
    out.x /= out.x.norm();

    const std::vector<std::string> all = concat(concat(out.p, out.q), {"r"});
    std::ostringstream d;
    d << "qubit " << join(all) << ";\n";
    d << "measurement M = std(1);\n";
    d << "gate Ub on " << inst.m << " = " << matrix_text(out.ub) << ";\n";
    d << "gate Uf on " << inst.n + inst.m << " = " << matrix_text(out.uf) << ";\n";
    d << "gate Uc on " << inst.n + 1 << " = " << matrix_text(out.uc) << ";\n";
    out.declarations = d.str();

    const std::string ps = join(out.p), qs = join(out.q), pq = join(concat(out.p, out.q));
    std::ostringstream t;
    t << out.declarations;
    t << "v := 0;\n";
    t << "while v = 0 do\n";
    t << "    " << ps << " := |0>;\n";
    t << "    " << qs << " := |0>;\n";
    t << "    r := |0>;\n";
    t << "    Ub[" << qs << "];\n";
    t << "    H[" << ps << "];\n";
    t << "    Uf[" << pq << "];\n";
    t << "    QFTinv[" << ps << "];\n";
    t << "    Uc[" << ps << ", r];\n";
    t << "    QFT[" << ps << "];\n";
    t << "    Uf^dag[" << pq << "];\n";
    t << "    H[" << ps << "];\n";
    t << "    v := M[r]\n";
    t << "od\n";
    out.text = t.str();
    return out;
}

namespace {

/// Loop-body outline items; the final assertion is the loop invariant.
std::string hhl_body_items(const HHLInstance &inst, const HHLBuild &hb, const std::string &indent) {
    const std::vector<std::string> pq = concat(hb.p, hb.q);
    const std::string zp(inst.n, '0'), zq(inst.m, '0'), plus(inst.n, '+');
    const PureState b{QubitLayout(hb.q), hb.ub.col(0)};
    PureState j = tensor(PureState{QubitLayout(hb.p), factor_vector(pattern_factor(hb.p, plus))}, b);
    const std::string j0 = ket_text(j);
    j = apply(j, hb.uf, pq);
    const std::string j1 = ket_text(j);
    j = apply(j, qft_matrix(inst.n, true), hb.p);
    const std::string j2 = ket_text(j);
    PureState k = tensor(j, PureState{QubitLayout({"r"}), factor_vector(pattern_factor({"r"}, "0"))});
    const std::string k0 = ket_text(k);
    k = apply(k, hb.uc, concat(hb.p, {"r"}));
    const std::string k1 = ket_text(k);
    k = apply(k, qft_matrix(inst.n, false), hb.p);
    const std::string k2 = ket_text(k);
    k = apply(k, hb.uf.adjoint(), pq);
    const std::string k3 = ket_text(k);
    k = apply(k, builtin_gate("H", QubitLayout(hb.p)).mat, hb.p);
    const std::string k4 = ket_text(k);

    std::vector<std::string> comps;
    std::string success;
    for (int bit = 0; bit < 2; bit++) {
        MatrixXc proj = MatrixXc::Zero(2, 2);
        proj(bit, bit) = 1;
        const VectorXc w = apply_matrix(k, proj, QubitLayout({"r"}));
        const double prob = w.squaredNorm();
        if (prob < kPrune) {
            continue;
        }
        const std::string ket = ket_text(PureState{k.layout, w / std::sqrt(prob)});
        comps.push_back(to_string(exact_weight(prob)) + " (" + ket + " /\\ v = " + std::to_string(bit) + ")");
        if (bit == 1) {
            success = ket;
        }
    }
    if (success.empty()) {
        throw BuildError("the measurement never succeeds on this instance");
    }
    const std::string x = pattern(hb.p, zp) + " " + ket_text(PureState{QubitLayout(hb.q), hb.x}) + " " +
                          pattern({"r"}, "1");

    std::ostringstream o;
    const std::string &I = indent;
    o << I << "{v = 0}\n";
    o << I << "{true} by PT\n";
    o << I << "{true (.) true (.) true} by OdotE\n";
    o << I << "<=> {true} " << join(hb.p) << " := |0> {" << pattern(hb.p, zp) << "} by QInit\n";
    o << I << "<=> {true} " << join(hb.q) << " := |0> {" << pattern(hb.q, zq) << "} by QInit\n";
    o << I << "<=> {true} r := |0> {" << pattern({"r"}, "0") << "} by QInit\n";
    o << I << "<=> {" << pattern(hb.q, zq) << "} Ub[" << join(hb.q) << "] {" << ket_text(b) << "} by QUnit\n";
    o << I << "<=> {" << pattern(hb.p, zp) << "} H[" << join(hb.p) << "] {" << pattern(hb.p, plus) << "} by QUnit\n";
    o << I << "{" << j0 << " " << pattern({"r"}, "0") << "} by OdotT\n";
    o << I << "=> {" << j0 << "}\n";
    o << I << "Uf[" << join(pq) << "]\n";
    o << I << "{" << j1 << "} by QUnit\n";
    o << I << "QFTinv[" << join(hb.p) << "]\n";
    o << I << "<= {" << j2 << "} by QUnit\n";
    o << I << "{" << k0 << "} by OdotT, ReArr\n";
    o << I << "Uc[" << join(hb.p) << ", r]\n";
    o << I << "{" << k1 << "} by QUnit\n";
    o << I << "QFT[" << join(hb.p) << "]\n";
    o << I << "{" << k2 << "} by QUnit\n";
    o << I << "Uf^dag[" << join(pq) << "]\n";
    o << I << "{" << k3 << "} by QUnit\n";
    o << I << "H[" << join(hb.p) << "]\n";
    o << I << "{" << k4 << "} by QUnit\n";
    o << I << "{" << k4 << " /\\ (v = 0)[0/v] /\\ (v = 1)[1/v]} by Conseq\n";
    o << I << "v := M[r]\n";
    o << I << "{" << join(comps, " (+) ") << "} by QMeas\n";
    std::string unweighted;
    for (const auto &c : comps) {
        unweighted += (unweighted.empty() ? "" : " (+) ") + c.substr(c.find(' ') + 1);
    }
    o << I << "{" << unweighted << "} by Oplus\n";
    o << I << "{(v = 0) (+) (" << success << " /\\ v = 1)} by Conseq\n";
    // The rewriting into A⁻¹b holds only because the instance satisfies the normalization of x.
    o << I << "{(v = 0) (+) (" << x << " /\\ v = 1)} by Conseq, numeric\n";
    return o.str();
}

}  // namespace

std::string hhl_body_outline(const HHLInstance &inst) {
    const HHLBuild hb = build_hhl(inst);
    return hb.declarations + "\n" + hhl_body_items(inst, hb, "");
}

std::string hhl_outline(const HHLInstance &inst, const std::string &program_file) {
    const HHLBuild hb = build_hhl(inst);
    const std::string x_q = ket_text(PureState{QubitLayout(hb.q), hb.x});
    const std::string zp(inst.n, '0');
    const std::string x = pattern(hb.p, zp) + " " + x_q + " " + pattern({"r"}, "1");
    std::ostringstream o;
    o << "program \"" << program_file << "\"\n";
    o << "{true}\n";
    o << "{(v = 0)[0/v]} by Conseq\n";
    o << "v := 0\n";
    o << "{v = 0} by Assgn\n";
    o << "{(v = 0) (+) (" << x << " /\\ v = 1)} by Oplus\n";
    o << "while v = 0 do\n";
    o << hhl_body_items(inst, hb, "    ");
    o << "od\n";
    o << "{" << x << " /\\ v = 1} by While\n";
    o << "{" << x << "} by Conseq\n";
    o << "{" << pattern(hb.p, zp) << " (.) " << x_q << " (.) " << pattern({"r"}, "1") << "} by OdotT\n";
    o << "{true (.) " << x_q << " (.) true} by PT\n";
    o << "{" << x_q << "} by OdotE\n";
    return o.str();
}

int of_t_bound(int L, double eps) {
    return 2 * L + 1 + (int)std::ceil(std::log2(2 + 1 / (2 * eps)));
}

namespace {

void check_of(const OFInstance &inst) {
    if (inst.N < 3 || inst.L < 1 || inst.L > 16 || (int64_t{1} << inst.L) < inst.N) {
        throw BuildError("N = " + std::to_string(inst.N) + " does not fit in L = " + std::to_string(inst.L) + " qubits");
    }
    if (inst.x < 2 || inst.x > inst.N - 1) {
        throw BuildError("x must lie in [2, N-1]");
    }
    if (arith::gcd(inst.x, inst.N) != 1) {
        throw BuildError("x and N are not coprime");
    }
    if (inst.t < 1 || inst.t + inst.L > 20) {
        throw BuildError("t out of range");
    }
}

/// Commands of the order-finding loop, one per line, without a trailing separator.
std::string of_commands(const OFInstance &inst, const std::string &indent) {
    const auto q = names("q", inst.t), p = names("p", inst.L);
    const std::string two_t = std::to_string(int64_t{1} << inst.t);
    std::ostringstream o;
    o << indent << "z := 1;\n";
    o << indent << "b := pow_mod(x, z, N);\n";
    o << indent << "while b /= 1 do\n";
    o << indent << "    " << join(q) << " := |0>;\n";
    o << indent << "    " << join(p) << " := |0>;\n";
    o << indent << "    H[" << join(q) << "];\n";
    o << indent << "    Uplus[" << join(p) << "];\n";
    o << indent << "    cmodmul(x, N, " << inst.L << ")[" << join(concat(q, p)) << "];\n";
    o << indent << "    QFTinv[" << join(q) << "];\n";
    o << indent << "    zp := Mq[" << join(q) << "];\n";
    o << indent << "    z := cf_denom(zp, " << two_t << ", N);\n";
    o << indent << "    b := pow_mod(x, z, N)\n";
    o << indent << "od";
    return o.str();
}

std::string of_declarations(const OFInstance &inst) {
    return "qubit " + join(concat(names("q", inst.t), names("p", inst.L))) + ";\nmeasurement Mq = std(" +
           std::to_string(inst.t) + ");\n";
}

}  // namespace

OFBuild build_of(const OFInstance &inst) {
    check_of(inst);
    OFBuild out;
    out.order = arith::ord(inst.x, inst.N);
    if (((int64_t{1} << inst.t) % out.order) != 0) {
        out.warnings.push_back("the order does not divide 2^t; phases are inexact");
    }
    out.text = of_declarations(inst) + of_commands(inst, "") + "\n";
    out.macro = "macro OF(x, N) returns z {\n" + of_commands(inst, "    ") + "\n}\n";
    return out;
}

std::string of_outline(const OFInstance &inst, const std::string &program_file) {
    const OFBuild ob = build_of(inst);
    const auto q = names("q", inst.t), p = names("p", inst.L), qp = concat(q, p);
    const int64_t two_t = int64_t{1} << inst.t;
    const std::string N = std::to_string(inst.N), X = std::to_string(inst.x);
    const std::string bind = "N = " + N + " /\\ x = " + X;
    const std::string a = "z /= ord(x, N) /\\ b /= 1 /\\ " + bind;
    const std::string done = "z = ord(x, N) /\\ b = 1 /\\ " + bind;
    const std::string zq(inst.t, '0'), zl(inst.L, '0'), plus(inst.t, '+');
    const std::string one = std::string(inst.L - 1, '0') + "1";

    PureState s = tensor(PureState{QubitLayout(q), factor_vector(pattern_factor(q, plus))},
                         PureState{QubitLayout(p), factor_vector(pattern_factor(p, one))});
    const std::string j0 = ket_text(s);
    s = apply(s, permutation_matrix(cmodmul_perm(inst.x, inst.N, inst.t, inst.L)), qp);
    const std::string j1 = ket_text(s);
    s = apply(s, qft_matrix(inst.t, true), q);
    const std::string j2 = ket_text(s);

    std::vector<std::string> guards, meas, pre_z, post_z, pre_b, post_b;
    for (int64_t k = 0; k < two_t; k++) {
        MatrixXc proj = MatrixXc::Zero(two_t, two_t);
        proj(k, k) = 1;
        const VectorXc w = apply_matrix(s, proj, QubitLayout(q));
        const double prob = w.squaredNorm();
        if (prob < kPrune) {
            continue;
        }
        const std::string ks = std::to_string(k), wt = to_string(exact_weight(prob));
        const int64_t zk = arith::cf_denom(k, two_t, inst.N);
        const bool right = zk == ob.order;
        if (right != (arith::pow_mod(inst.x, zk, inst.N) == 1)) {
            throw BuildError("outcome " + ks + " gives a multiple of the order");
        }
        const std::string zv = std::to_string(zk), cf = "cf_denom(zp, " + std::to_string(two_t) + ", N)";
        const std::string label = right ? "(z = ord(x, N) /\\ b = 1)" : "(z /= ord(x, N) /\\ b /= 1)";
        guards.push_back("(zp = " + ks + ")[" + ks + "/zp]");
        meas.push_back(wt + " (" + ket_text(PureState{s.layout, w / std::sqrt(prob)}) + " /\\ zp = " + ks + " /\\ " + a +
                       ")");
        pre_z.push_back(wt + " (zp = " + ks + " /\\ " + bind + " /\\ (z = " + zv + ")[" + cf + "/z])");
        post_z.push_back(wt + " (zp = " + ks + " /\\ " + bind + " /\\ z = " + zv + ")");
        pre_b.push_back(wt + " (" + bind + " /\\ " + label + "[pow_mod(x, z, N)/b])");
        post_b.push_back(wt + " (" + bind + " /\\ " + label.substr(1, label.size() - 2) + ")");
    }
    const std::string inv = "(" + a + ") (+) (" + done + ")";
    const int64_t b0 = arith::pow_mod(inst.x, 1, inst.N);

    std::ostringstream o;
    o << "program \"" << program_file << "\"\n";
    o << "{" << bind << "}\n";
    o << "{" << bind << " /\\ (z = 1)[1/z]} by Conseq\n";
    o << "z := 1\n";
    o << "{" << bind << " /\\ z = 1} by Assgn\n";
    o << "{" << bind << " /\\ z = 1 /\\ (b = " << b0 << ")[pow_mod(x, z, N)/b]} by Conseq\n";
    o << "b := pow_mod(x, z, N)\n";
    o << "{" << bind << " /\\ z = 1 /\\ b = " << b0 << "} by Assgn\n";
    o << "{" << inv << "} by Oplus\n";
    o << "while b /= 1 do\n";
    const std::string I = "    ";
    o << I << "{" << a << "}\n";
    o << I << "{(" << a << ") (.) true (.) true} by OdotE\n";
    o << I << "<=> {true} " << join(q) << " := |0> {" << pattern(q, zq) << "} by QInit\n";
    o << I << "<=> {true} " << join(p) << " := |0> {" << pattern(p, zl) << "} by QInit\n";
    o << I << "<=> {" << pattern(q, zq) << "} H[" << join(q) << "] {" << pattern(q, plus) << "} by QUnit\n";
    o << I << "<=> {" << pattern(p, zl) << "} Uplus[" << join(p) << "] {" << pattern(p, one) << "} by QUnit\n";
    o << I << "{" << j0 << " /\\ " << a << "} by OdotT, OdotO\n";
    o << I << "cmodmul(x, N, " << inst.L << ")[" << join(qp) << "]\n";
    o << I << "{" << j1 << " /\\ " << a << "} by QUnit\n";
    o << I << "QFTinv[" << join(q) << "]\n";
    o << I << "{" << j2 << " /\\ " << a << "} by QUnit\n";
    o << I << "{" << j2 << " /\\ " << a << " /\\ " << join(guards, " /\\ ") << "} by Conseq\n";
    o << I << "zp := Mq[" << join(q) << "]\n";
    o << I << "{" << join(meas, " (+) ") << "} by QMeas\n";
    o << I << "{" << join(pre_z, " (+) ") << "} by Conseq\n";
    o << I << "z := cf_denom(zp, " << two_t << ", N)\n";
    o << I << "{" << join(post_z, " (+) ") << "} by Assgn\n";
    o << I << "{" << join(pre_b, " (+) ") << "} by Conseq\n";
    o << I << "b := pow_mod(x, z, N)\n";
    o << I << "{" << join(post_b, " (+) ") << "} by Assgn\n";
    o << I << "{" << inv << "} by OMerg, Oplus\n";
    o << "od\n";
    o << "{" << done << "} by While\n";
    o << "{z = " << ob.order << "} by Conseq\n";
    return o.str();
}

std::string build_shor(const OFInstance &inst) {
    const OFBuild ob = build_of(inst);
    std::ostringstream o;
    o << of_declarations(inst);
    o << ob.macro;
    o << "if 2 | N then\n";
    o << "    y := 2\n";
    o << "else\n";
    o << "    x := random(2, N - 1);\n";
    o << "    y := gcd(x, N);\n";
    o << "    while y = 1 do\n";
    o << "        z := OF(x, N);\n";
    o << "        if z mod 2 = 0 /\\ pow_mod(x, z div 2, N) /= N - 1 then\n";
    o << "            y1 := gcd(pow_mod(x, z div 2, N) - 1, N);\n";
    o << "            if 1 < y1 /\\ y1 < N then\n";
    o << "                y := y1\n";
    o << "            else\n";
    o << "                y := gcd(pow_mod(x, z div 2, N) + 1, N)\n";
    o << "            fi\n";
    o << "        else\n";
    o << "            x := random(2, N - 1);\n";
    o << "            y := gcd(x, N)\n";
    o << "        fi\n";
    o << "    od\n";
    o << "fi\n";
    return o.str();
}

}  // namespace qhl
