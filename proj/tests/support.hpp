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

// Test-side oracles. Everything here is computed independently of the library kernels: operators are embedded
// by explicit matrix-element loops and programs run on full density matrices.

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qhl/ast.hpp"
#include "qhl/parse.hpp"
#include "qhl/qcore.hpp"
#include "qhl/sem.hpp"

namespace qhl::oracle {

inline std::string source_path(const std::string &rel) {
    return std::string(QHL_SOURCE_DIR) + "/" + rel;
}

/// Full-register operator of g acting on the qubits at pos; position 0 is the most significant bit.
inline MatrixXc embed(const MatrixXc &g, const std::vector<int> &pos, int n) {
    const size_t dim = size_t{1} << n;
    MatrixXc full = MatrixXc::Zero(dim, dim);
    const int k = (int)pos.size();
    auto sub = [&](size_t idx) {
        size_t s = 0;
        for (int t = 0; t < k; t++) {
            s = (s << 1) | ((idx >> (n - 1 - pos[t])) & 1);
        }
        return s;
    };
    size_t mask = 0;
    for (int p : pos) {
        mask |= size_t{1} << (n - 1 - p);
    }
    for (size_t a = 0; a < dim; a++) {
        for (size_t b = 0; b < dim; b++) {
            if ((a & ~mask) == (b & ~mask)) {
                full(a, b) = g(sub(a), sub(b));
            }
        }
    }
    return full;
}

inline MatrixXc oracle_gate(const Program &prog, const std::string &name, size_t arity) {
    const double r = 1.0 / std::sqrt(2.0);
    MatrixXc m;
    if (name == "H" && arity == 1) {
        m.resize(2, 2);
        m << r, r, r, -r;
    } else if (name == "X" && arity == 1) {
        m.resize(2, 2);
        m << 0, 1, 1, 0;
    } else if (name == "CNOT") {
        m = MatrixXc::Zero(4, 4);
        m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    } else if (const GateDecl *g = prog.find_gate(name)) {
        m = g->mat;
    } else {
        throw std::invalid_argument("oracle: unsupported gate " + name);
    }
    return m;
}

typedef std::map<ClassicalState, MatrixXc> DensityMap;

/// Density-matrix semantics of loop-free programs; measurements must be std(k).
inline DensityMap oracle_run(const Program &prog, const ComPtr &c, const DensityMap &in) {
    const int n = (int)prog.qubits.size();
    const size_t dim = size_t{1} << n;
    auto pos_of = [&](const std::vector<std::string> &qs) {
        std::vector<int> pos;
        for (const auto &q : qs) {
            pos.push_back((int)(std::find(prog.qubits.begin(), prog.qubits.end(), q) - prog.qubits.begin()));
        }
        return pos;
    };
    auto add = [&](DensityMap &out, const ClassicalState &s, const MatrixXc &rho) {
        auto it = out.find(s);
        if (it == out.end()) {
            out.emplace(s, rho);
        } else {
            it->second += rho;
        }
    };
    DensityMap out;
    switch (c->kind) {
        case Com::Kind::Skip:
            return in;
        case Com::Kind::Abort:
            return {};
        case Com::Kind::Seq: {
            DensityMap cur = in;
            for (const auto &k : c->kids) {
                cur = oracle_run(prog, k, cur);
            }
            return cur;
        }
        case Com::Kind::Assign:
            for (const auto &[s, rho] : in) {
                add(out, s.with(c->var, eval_aexp(c->expr, s)), rho);
            }
            return out;
        case Com::Kind::If:
            for (const auto &[s, rho] : in) {
                const DensityMap part = oracle_run(prog, eval_pure(c->guard, s) ? c->kids[0] : c->kids[1], {{s, rho}});
                for (const auto &[s2, r2] : part) {
                    add(out, s2, r2);
                }
            }
            return out;
        case Com::Kind::Unitary: {
            MatrixXc g = oracle_gate(prog, c->name, c->qvars.size());
            if (c->adjoint) {
                g = g.adjoint().eval();
            }
            const MatrixXc u = embed(g, pos_of(c->qvars), n);
            for (const auto &[s, rho] : in) {
                add(out, s, u * rho * u.adjoint());
            }
            return out;
        }
        case Com::Kind::Init: {
            DensityMap cur = in;
            for (const auto &q : c->qvars) {
                MatrixXc k0 = MatrixXc::Zero(2, 2), k1 = MatrixXc::Zero(2, 2);
                k0(0, 0) = 1;
                k1(0, 1) = 1;
                const MatrixXc e0 = embed(k0, pos_of({q}), n), e1 = embed(k1, pos_of({q}), n);
                DensityMap next;
                for (const auto &[s, rho] : cur) {
                    add(next, s, e0 * rho * e0.adjoint() + e1 * rho * e1.adjoint());
                }
                cur = std::move(next);
            }
            return cur;
        }
        case Com::Kind::Measure: {
            const auto pos = pos_of(c->qvars);
            const size_t k = size_t{1} << pos.size();
            for (const auto &[s, rho] : in) {
                for (size_t i = 0; i < k; i++) {
                    MatrixXc proj = MatrixXc::Zero(k, k);
                    proj(i, i) = 1;
                    const MatrixXc p = embed(proj, pos, n);
                    const MatrixXc r = p * rho * p.adjoint();
                    if (r.trace().real() > 1e-12) {
                        add(out, s.with(c->var, (int64_t)i), r);
                    }
                }
            }
            return out;
        }
        default:
            throw std::invalid_argument("oracle: unsupported command");
    }
    (void)dim;
}

/// Largest Frobenius distance between povd_density(mu, σ) and the oracle over the union of supports.
inline double density_distance(const Povd &mu, const DensityMap &ref, int n) {
    const size_t dim = size_t{1} << n;
    double worst = 0;
    std::vector<ClassicalState> keys = mu.support();
    for (const auto &[s, rho] : ref) {
        keys.push_back(s);
    }
    for (const auto &s : keys) {
        const MatrixXc got = povd_density(mu, s).mat;
        auto it = ref.find(s);
        const MatrixXc want = it == ref.end() ? MatrixXc::Zero(dim, dim) : it->second;
        const MatrixXc g = got.size() == 0 ? MatrixXc::Zero(dim, dim) : got;
        worst = std::max(worst, (g - want).norm());
    }
    return worst;
}

inline VectorXc random_state(size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    VectorXc v(dim);
    for (size_t i = 0; i < dim; i++) {
        v(i) = cplx(g(rng), g(rng));
    }
    return v / v.norm();
}

/// Random partial distribution: up to three branches over x, y in {0, 1}, total mass in (0, 1].
inline Povd random_povd(const QubitLayout &layout, std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> nb(1, 3), bit(0, 1);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    Povd mu;
    mu.layout = layout;
    const int k = nb(rng);
    std::vector<double> ws;
    double total = 0;
    for (int i = 0; i < k; i++) {
        ws.push_back(w(rng));
        total += ws.back();
    }
    const double scale = w(rng) / total;
    for (int i = 0; i < k; i++) {
        ClassicalState s;
        s.set("x", bit(rng));
        s.set("y", bit(rng));
        mu.branches.push_back({s, ws[i] * scale, PureState{layout, random_state(layout.dim(), rng)}});
    }
    coalesce(mu);
    return mu;
}

inline DensityMap to_density_map(const Povd &mu) {
    DensityMap m;
    for (const auto &b : mu.branches) {
        const MatrixXc r = b.weight * b.psi.amp * b.psi.amp.adjoint();
        auto it = m.find(b.sigma);
        if (it == m.end()) {
            m.emplace(b.sigma, r);
        } else {
            it->second += r;
        }
    }
    return m;
}

/// Random loop-free program over 1..3 qubits with at most two measurements.
inline std::string random_program(std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> nq(1, 3), len(2, 6), pick(0, 7);
    const int n = nq(rng);
    std::string text = "qubit ";
    for (int i = 0; i < n; i++) {
        text += (i ? ", q" : "q") + std::to_string(i);
    }
    text += "\nmeasurement M1 = std(1)\nmeasurement M2 = std(2)\n";
    text += "gate S on 1 = [1 0; 0 1j]\n";
    text += "gate T on 1 = [1 0; 0 0.7071067811865476+0.7071067811865476j]\n";
    std::uniform_int_distribution<int> qd(0, n - 1);
    auto q = [&] { return "q" + std::to_string(qd(rng)); };
    auto two = [&](std::string &a, std::string &b) {
        const int i = qd(rng);
        int j = qd(rng);
        while (j == i) {
            j = qd(rng);
        }
        a = "q" + std::to_string(i);
        b = "q" + std::to_string(j);
    };
    std::vector<std::string> cmds;
    int meas = 0;
    const int m = len(rng);
    while ((int)cmds.size() < m) {
        const int k = pick(rng);
        std::string a, b;
        switch (k) {
            case 0:
                cmds.push_back("H[" + q() + "]");
                break;
            case 1:
                cmds.push_back("T[" + q() + "]");
                break;
            case 2:
                if (n >= 2) {
                    two(a, b);
                    cmds.push_back("CNOT[" + a + ", " + b + "]");
                } else {
                    cmds.push_back("S[q0]");
                }
                break;
            case 3:
                cmds.push_back(q() + " := |0>");
                break;
            case 4:
                if (meas < 2) {
                    meas++;
                    cmds.push_back("x := M1[" + q() + "]");
                }
                break;
            case 5:
                if (meas < 2 && n >= 2) {
                    meas++;
                    two(a, b);
                    cmds.push_back("y := M2[" + a + ", " + b + "]");
                }
                break;
            case 6:
                cmds.push_back("y := x + 1");
                break;
            default:
                cmds.push_back("if x = 1 then X[" + q() + "] else S[" + q() + "] fi");
                break;
        }
    }
    for (size_t i = 0; i < cmds.size(); i++) {
        text += cmds[i] + (i + 1 < cmds.size() ? ";\n" : "\n");
    }
    return text;
}

/// Denominator of the last convergent of z/2^t with error below 1/(2n^2) and n <= bound; 1 for z = 0.
inline int64_t oracle_cf(int64_t z, int64_t two_t, int64_t bound) {
    if (z == 0) {
        return 1;
    }
    int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0, best = 1;
    int64_t num = z, den = two_t;
    while (den != 0) {
        const int64_t a = num / den;
        const int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > bound) {
            break;
        }
        const double err = std::abs((double)p2 / (double)q2 - (double)z / (double)two_t);
        if (err < 1.0 / (2.0 * (double)q2 * (double)q2)) {
            best = q2;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const int64_t r = num - a * den;
        num = den;
        den = r;
    }
    return best;
}

inline int64_t oracle_pow_mod(int64_t a, int64_t e, int64_t m) {
    int64_t r = 1 % m;
    for (int64_t i = 0; i < e; i++) {
        r = (r * a) % m;
    }
    return r;
}

/// Success probability of one order-finding round: phase register distribution of Σ_j |j>|x^j mod N> after the
/// inverse QFT, weighted by whether the recovered denominator is the order.
inline double oracle_of_success(int64_t x, int64_t n, int t) {
    const int64_t two_t = int64_t{1} << t;
    std::map<int64_t, std::vector<int64_t>> by_value;
    for (int64_t j = 0; j < two_t; j++) {
        by_value[oracle_pow_mod(x, j, n)].push_back(j);
    }
    double success = 0;
    for (int64_t z = 0; z < two_t; z++) {
        double pz = 0;
        for (const auto &[y, js] : by_value) {
            cplx s = 0;
            for (int64_t j : js) {
                s += std::polar(1.0, -2 * M_PI * (double)(j * z) / (double)two_t);
            }
            pz += std::norm(s);
        }
        pz /= (double)(two_t * two_t);
        if (oracle_pow_mod(x, oracle_cf(z, two_t, n), n) == 1) {
            success += pz;
        }
    }
    return success;
}

}  // namespace qhl::oracle
