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

#include "qhl/assert.hpp"

#include <cmath>
#include <map>

#include "qhl/analysis.hpp"
#include "qhl/transport.hpp"

namespace qhl {

namespace {

/// Quantum part of a state seen only through its reduced densities.
class QView {
   public:
    virtual ~QView() = default;
    virtual double trace() const = 0;
    virtual MatrixXc reduced(const QubitLayout &keep) const = 0;
};

class DensityView : public QView {
   public:
    explicit DensityView(const Operator &rho) : rho_(rho) {
    }
    double trace() const override {
        return rho_.mat.trace().real();
    }
    MatrixXc reduced(const QubitLayout &keep) const override {
        return partial_trace(rho_, keep).mat;
    }

   private:
    const Operator &rho_;
};

class EnsembleView : public QView {
   public:
    explicit EnsembleView(const std::vector<const Branch *> &group) : group_(group) {
    }
    double trace() const override {
        double t = 0;
        for (const Branch *b : group_) {
            t += b->weight * b->psi.amp.squaredNorm();
        }
        return t;
    }
    MatrixXc reduced(const QubitLayout &keep) const override {
        MatrixXc r = MatrixXc::Zero(keep.dim(), keep.dim());
        for (const Branch *b : group_) {
            r += b->weight * qhl::reduced(b->psi, keep);
        }
        return r;
    }

   private:
    const std::vector<const Branch *> &group_;
};

bool ket_holds(const Ket &k, const QView &q) {
    const double t = q.trace();
    if (t <= 0) {
        return true;
    }
    const QubitLayout keep(k.qvars());
    const MatrixXc r = q.reduced(keep) / t;
    const VectorXc s = ket_state(k).amp;
    return (r - s * s.adjoint()).norm() <= kKetTol;
}

bool sat(const FormulaPtr &f, const ClassicalState &sigma, const QView &q, const EvalConfig &cfg, bool *windowed) {
    switch (f->kind) {
    case Formula::Kind::Pure:
        return eval_pure(f->pure, sigma, cfg, windowed);
    case Formula::Kind::Ket:
        return ket_holds(f->ket, q);
    case Formula::Kind::Odot:
    case Formula::Kind::And:
        for (const auto &k : f->kids) {
            if (!sat(k, sigma, q, cfg, windowed)) {
                return false;
            }
        }
        return true;
    case Formula::Kind::Not:
        return !sat(f->kids[0], sigma, q, cfg, windowed);
    case Formula::Kind::Forall:
        if (windowed) {
            *windowed = true;
        }
        for (int64_t v = cfg.forall_lo; v <= cfg.forall_hi; v++) {
            if (!sat(f->kids[0], sigma.with(f->var, v), q, cfg, windowed)) {
                return false;
            }
        }
        return true;
    }
    return false;
}

struct Piece {
    ClassicalState sigma;
    std::vector<const Branch *> branches;
    double mass = 0;
};

std::vector<Piece> by_sigma(const Povd &mu) {
    std::map<ClassicalState, Piece> m;
    for (const Branch &b : mu.branches) {
        Piece &p = m[b.sigma];
        p.sigma = b.sigma;
        p.branches.push_back(&b);
        p.mass += b.weight * b.psi.amp.squaredNorm();
    }
    std::vector<Piece> out;
    for (auto &kv : m) {
        if (kv.second.mass > 0) {
            out.push_back(std::move(kv.second));
        }
    }
    return out;
}

std::vector<Piece> by_branch(const Povd &mu) {
    std::vector<Piece> out;
    for (const Branch &b : mu.branches) {
        Piece p;
        p.sigma = b.sigma;
        p.branches.push_back(&b);
        p.mass = b.weight * b.psi.amp.squaredNorm();
        if (p.mass > 0) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

bool all_single(const std::vector<Piece> &ps) {
    for (const auto &p : ps) {
        if (p.branches.size() != 1) {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<bool>> allowed_matrix(const std::vector<Piece> &ps, const std::vector<FormulaPtr> &comps,
                                              const EvalConfig &cfg, bool *windowed) {
    std::vector<std::vector<bool>> a(ps.size(), std::vector<bool>(comps.size(), false));
    for (size_t g = 0; g < ps.size(); g++) {
        const EnsembleView q(ps[g].branches);
        for (size_t i = 0; i < comps.size(); i++) {
            a[g][i] = sat(comps[i], ps[g].sigma, q, cfg, windowed);
        }
    }
    return a;
}

void fill_witness(Verdict &v, const std::vector<Piece> &ps) {
    v.pieces.clear();
    v.piece_mass.clear();
    for (const auto &p : ps) {
        std::string label = p.sigma.str();
        if (p.branches.size() == 1 && ps.size() > 1) {
            bool shared = false;
            for (const auto &o : ps) {
                shared = shared || (&o != &p && o.sigma == p.sigma);
            }
            if (shared) {
                label += " branch";
            }
        }
        v.pieces.push_back(label);
        v.piece_mass.push_back(p.mass);
    }
}

/// Every piece must satisfy some component; mass goes to the first one allowed.
bool assign_unweighted(const std::vector<Piece> &ps, const std::vector<std::vector<bool>> &a, size_t ncomp,
                       Verdict &v) {
    v.assignment.assign(ps.size(), std::vector<double>(ncomp, 0.0));
    for (size_t g = 0; g < ps.size(); g++) {
        size_t i = 0;
        while (i < ncomp && !a[g][i]) {
            i++;
        }
        if (i == ncomp) {
            v.counterexample = ps[g].sigma;
            return false;
        }
        v.assignment[g][i] = ps[g].mass;
    }
    return true;
}

bool assign_weighted(const std::vector<Piece> &ps, const std::vector<std::vector<bool>> &a,
                     const std::vector<double> &demand, Verdict &v) {
    std::vector<double> supply;
    for (const auto &p : ps) {
        supply.push_back(p.mass);
    }
    const TransportResult t = solve_transport(supply, demand, a);
    v.exact = t.exact;
    v.assignment = t.flow;
    return t.feasible;
}

}  // namespace

std::string status_name(Verdict::Status s) {
    switch (s) {
    case Verdict::Status::Satisfied:
        return "Satisfied";
    case Verdict::Status::Refuted:
        return "Refuted";
    case Verdict::Status::NotProven:
        return "NotProven";
    }
    return "?";
}

bool sat_state(const FormulaPtr &f, const ClassicalState &sigma, const Operator &rho, const EvalConfig &cfg,
               bool *windowed) {
    const DensityView q(rho);
    return sat(f, sigma, q, cfg, windowed);
}

bool sat_group(const FormulaPtr &f, const ClassicalState &sigma, const std::vector<const Branch *> &group,
               const EvalConfig &cfg, bool *windowed) {
    const EnsembleView q(group);
    return sat(f, sigma, q, cfg, windowed);
}

Verdict satisfies(const Povd &mu, const Dist &d, const EvalConfig &cfg) {
    Verdict v;
    try {
        const std::vector<Piece> groups = by_sigma(mu);
        double total = 0;
        for (const auto &g : groups) {
            total += g.mass;
        }
        if (groups.empty()) {
            v.status = Verdict::Status::Satisfied;
            v.reason = "empty distribution";
            v.notes.push_back("the zero distribution satisfies every assertion");
            return v;
        }

        std::vector<FormulaPtr> comps;
        std::vector<double> weights;
        for (size_t i = 0; i < d.comps.size(); i++) {
            if (d.kind == Dist::Kind::Weighted && d.weights[i] == 0) {
                v.notes.push_back("zero-weight component dropped: " + to_string(d.comps[i]));
                continue;
            }
            comps.push_back(d.comps[i]);
            weights.push_back(d.kind == Dist::Kind::Weighted ? boost::rational_cast<double>(d.weights[i]) : 0.0);
        }
        bool quantum = false;
        for (const auto &c : comps) {
            quantum = quantum || has_quantum(c);
        }
        const bool complete = !quantum || all_single(groups);

        bool windowed = false;
        const auto a = allowed_matrix(groups, comps, cfg, &windowed);
        bool ok;
        if (d.kind == Dist::Kind::Weighted) {
            std::vector<double> demand;
            for (double w : weights) {
                demand.push_back(w * total);
            }
            ok = assign_weighted(groups, a, demand, v);
        } else {
            ok = assign_unweighted(groups, a, comps.size(), v);
        }
        fill_witness(v, groups);
        v.approximate = windowed;
        if (windowed) {
            v.notes.push_back("forall decided on the window [" + std::to_string(cfg.forall_lo) + ", " +
                              std::to_string(cfg.forall_hi) + "]");
        }
        if (ok) {
            v.status = Verdict::Status::Satisfied;
            v.reason = "decomposition by classical state";
        } else if (complete) {
            v.status = Verdict::Status::Refuted;
            v.reason = d.kind == Dist::Kind::Weighted ? "no split of the mass matches the weights"
                                                      : "a classical state satisfies no component";
        } else {
            // Mixed ensembles admit other decompositions; try the stored branches before giving up.
            const std::vector<Piece> branches = by_branch(mu);
            const auto ab = allowed_matrix(branches, comps, cfg, &windowed);
            Verdict w;
            bool bok;
            if (d.kind == Dist::Kind::Weighted) {
                std::vector<double> demand;
                for (double x : weights) {
                    demand.push_back(x * total);
                }
                bok = assign_weighted(branches, ab, demand, w);
            } else {
                bok = assign_unweighted(branches, ab, comps.size(), w);
            }
            if (bok) {
                v.status = Verdict::Status::Satisfied;
                v.reason = "decomposition by branch";
                v.exact = w.exact;
                v.assignment = w.assignment;
                fill_witness(v, branches);
                v.counterexample.reset();
            } else {
                v.status = Verdict::Status::NotProven;
                v.reason = "no decomposition found among the classical states or the stored branches";
            }
        }
        if (d.kind == Dist::Kind::Unweighted && v.status == Verdict::Status::Satisfied) {
            for (size_t i = 0; i < comps.size(); i++) {
                double m = 0;
                for (const auto &row : v.assignment) {
                    m += row[i];
                }
                if (m == 0) {
                    v.notes.push_back("component receives no mass: " + to_string(comps[i]));
                }
            }
        }
    } catch (const std::exception &e) {
        v.status = Verdict::Status::NotProven;
        v.reason = std::string("evaluation error: ") + e.what();
    }
    return v;
}

Probability probability_of(const Povd &mu, const FormulaPtr &f, const EvalConfig &cfg) {
    Probability p;
    const std::vector<Piece> groups = by_sigma(mu);
    double total = 0, hit = 0;
    bool windowed = false;
    for (const auto &g : groups) {
        total += g.mass;
        const EnsembleView q(g.branches);
        if (sat(f, g.sigma, q, cfg, &windowed)) {
            hit += g.mass;
        }
    }
    p.decisive = !has_quantum(f) || all_single(groups);
    if (!p.decisive) {
        p.notes.push_back("ket atoms evaluated on mixed ensembles; value is a lower bound");
    }
    if (windowed) {
        p.notes.push_back("forall decided on the window");
    }
    if (total <= 0) {
        p.notes.push_back("zero distribution");
        return p;
    }
    p.value = hit / total;
    return p;
}

}  // namespace qhl
