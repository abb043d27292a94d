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

#include "qhl/sem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "qhl/analysis.hpp"

namespace qhl {

namespace {

// Merging tolerance on 1 - |<a|b>|; far below the noise a real state difference would produce.
constexpr double kMergeTol = 1e-12;

/// Phase-normalized amplitudes rounded to a grid; only used to order branches canonically.
std::vector<double> fingerprint(const VectorXc &v) {
    Eigen::Index lead = 0;
    for (Eigen::Index i = 0; i < v.size(); i++) {
        if (std::abs(v[i]) > 1e-6) {
            lead = i;
            break;
        }
    }
    const cplx ph = std::abs(v[lead]) > 0 ? std::conj(v[lead]) / std::abs(v[lead]) : cplx(1.0);
    std::vector<double> fp;
    fp.reserve(2 * v.size());
    for (Eigen::Index i = 0; i < v.size(); i++) {
        const cplx z = v[i] * ph;
        fp.push_back(std::round(z.real() * 1e6));
        fp.push_back(std::round(z.imag() * 1e6));
    }
    return fp;
}

}  // namespace

double Povd::mass() const {
    double m = 0;
    for (const auto &b : branches) {
        m += b.weight;
    }
    return m;
}

std::vector<ClassicalState> Povd::support() const {
    std::vector<ClassicalState> out;
    for (const auto &b : branches) {
        if (out.empty() || !(out.back() == b.sigma)) {
            out.push_back(b.sigma);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Povd point_povd(const QubitLayout &layout, const ClassicalState &sigma) {
    return Povd{layout, {Branch{sigma, 1.0, zero_state(layout)}}};
}

Povd point_povd(const ClassicalState &sigma, const PureState &psi) {
    return Povd{psi.layout, {Branch{sigma, 1.0, psi}}};
}

void coalesce(Povd &mu, double prune) {
    std::vector<Branch> bs;
    bs.reserve(mu.branches.size());
    for (auto &b : mu.branches) {
        if (b.weight >= prune) {
            bs.push_back(std::move(b));
        }
    }
    std::stable_sort(bs.begin(), bs.end(), [](const Branch &a, const Branch &b) { return a.sigma < b.sigma; });
    std::vector<Branch> out;
    size_t i = 0;
    while (i < bs.size()) {
        size_t j = i;
        while (j < bs.size() && bs[j].sigma == bs[i].sigma) {
            j++;
        }
        std::vector<Branch> group;
        for (size_t k = i; k < j; k++) {
            bool merged = false;
            for (auto &g : group) {
                if (equal_up_to_phase(g.psi.amp, bs[k].psi.amp, kMergeTol)) {
                    g.weight += bs[k].weight;
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                group.push_back(std::move(bs[k]));
            }
        }
        if (group.size() > 1) {
            std::vector<std::pair<std::vector<double>, size_t>> keys;
            for (size_t k = 0; k < group.size(); k++) {
                keys.emplace_back(fingerprint(group[k].psi.amp), k);
            }
            std::sort(keys.begin(), keys.end());
            for (const auto &kv : keys) {
                out.push_back(std::move(group[kv.second]));
            }
        } else {
            for (auto &g : group) {
                out.push_back(std::move(g));
            }
        }
        i = j;
    }
    mu.branches = std::move(out);
}

Povd povd_mix(const std::vector<std::pair<double, Povd>> &parts) {
    Povd out;
    bool first = true;
    for (const auto &[w, mu] : parts) {
        if (first) {
            out.layout = mu.layout;
            first = false;
        } else if (!(out.layout == mu.layout)) {
            throw LayoutError("povd_mix: layouts differ");
        }
        for (const auto &b : mu.branches) {
            out.branches.push_back(Branch{b.sigma, w * b.weight, b.psi});
        }
    }
    coalesce(out, 0.0);
    return out;
}

Operator povd_density(const Povd &mu, const ClassicalState &sigma) {
    MatrixXc rho = MatrixXc::Zero(mu.layout.dim(), mu.layout.dim());
    for (const auto &b : mu.branches) {
        if (b.sigma == sigma) {
            rho.noalias() += b.weight * b.psi.amp * b.psi.amp.adjoint();
        }
    }
    return {mu.layout, rho, OpKind::General};
}

// ---------------------------------------------------------------- expressions

int64_t eval_aexp(const AexpPtr &a, const ClassicalState &sigma) {
    switch (a->kind) {
        case Aexp::Kind::Num:
            return a->value;
        case Aexp::Kind::Var:
            return sigma.get(a->name);
        case Aexp::Kind::Neg:
            return arith::neg(eval_aexp(a->args[0], sigma));
        case Aexp::Kind::Bin: {
            const int64_t x = eval_aexp(a->args[0], sigma), y = eval_aexp(a->args[1], sigma);
            if (a->name == "+") return arith::add(x, y);
            if (a->name == "-") return arith::sub(x, y);
            if (a->name == "*") return arith::mul(x, y);
            if (a->name == "div") return arith::div(x, y);
            if (a->name == "mod") return arith::mod(x, y);
            throw ArithError("unknown operator " + a->name);
        }
        case Aexp::Kind::Call: {
            std::vector<int64_t> v;
            for (const auto &k : a->args) {
                v.push_back(eval_aexp(k, sigma));
            }
            if (a->name == "pow_mod") return arith::pow_mod(v[0], v[1], v[2]);
            if (a->name == "gcd") return arith::gcd(v[0], v[1]);
            if (a->name == "cf_denom") return arith::cf_denom(v[0], v[1], v[2]);
            if (a->name == "ord") return arith::ord(v[0], v[1]);
            throw ArithError("unknown function " + a->name);
        }
    }
    throw ArithError("bad expression");
}

bool eval_pure(const PurePtr &p, const ClassicalState &sigma, const EvalConfig &cfg, bool *windowed) {
    switch (p->kind) {
        case Pure::Kind::True:
            return true;
        case Pure::Kind::False:
            return false;
        case Pure::Kind::Cmp: {
            const int64_t x = eval_aexp(p->lhs, sigma), y = eval_aexp(p->rhs, sigma);
            const std::string &op = p->op;
            if (op == "=") return x == y;
            if (op == "/=") return x != y;
            if (op == "<=") return x <= y;
            if (op == ">=") return x >= y;
            if (op == "<") return x < y;
            if (op == ">") return x > y;
            if (op == "|") return arith::divides(x, y);
            throw ArithError("unknown comparison " + op);
        }
        case Pure::Kind::And:
            return eval_pure(p->kids[0], sigma, cfg, windowed) && eval_pure(p->kids[1], sigma, cfg, windowed);
        case Pure::Kind::Or:
            return eval_pure(p->kids[0], sigma, cfg, windowed) || eval_pure(p->kids[1], sigma, cfg, windowed);
        case Pure::Kind::Implies:
            return !eval_pure(p->kids[0], sigma, cfg, windowed) || eval_pure(p->kids[1], sigma, cfg, windowed);
        case Pure::Kind::Not:
            return !eval_pure(p->kids[0], sigma, cfg, windowed);
        case Pure::Kind::Forall: {
            if (windowed) {
                *windowed = true;
            }
            for (int64_t v = cfg.forall_lo; v <= cfg.forall_hi; v++) {
                if (!eval_pure(p->kids[0], sigma.with(p->var, v), cfg, windowed)) {
                    return false;
                }
            }
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------- gates

std::vector<uint64_t> cmodmul_perm(int64_t a, int64_t n, int controls, int l) {
    if (n < 2 || l < 1 || (int64_t{1} << l) < n) {
        throw ArithError("cmodmul: modulus " + std::to_string(n) + " does not fit in " + std::to_string(l) + " qubits");
    }
    if (arith::gcd(a, n) != 1) {
        throw ArithError("cmodmul: multiplier " + std::to_string(a) + " is not invertible mod " + std::to_string(n));
    }
    const uint64_t dy = uint64_t{1} << l, dj = uint64_t{1} << controls;
    std::vector<uint64_t> perm(dj * dy);
    for (uint64_t j = 0; j < dj; j++) {
        const int64_t f = arith::pow_mod(a, (int64_t)j, n);
        for (uint64_t y = 0; y < dy; y++) {
            const uint64_t img = (int64_t)y < n ? (uint64_t)(((__int128)f * y) % n) : y;
            perm[j * dy + y] = j * dy + img;
        }
    }
    return perm;
}

Operator resolve_gate(const Program &prog, const Com &c, const ClassicalState &sigma) {
    const QubitLayout targets(c.qvars);
    Operator op;
    if (c.name == "cmodmul") {
        const int64_t a = eval_aexp(c.args[0], sigma), n = eval_aexp(c.args[1], sigma), l = eval_aexp(c.args[2], sigma);
        if (l < 1 || l >= (int64_t)c.qvars.size()) {
            throw ArithError("cmodmul: target width out of range");
        }
        op = Operator{targets, permutation_matrix(cmodmul_perm(a, n, (int)(c.qvars.size() - l), (int)l)), OpKind::Unitary};
    } else if (const GateDecl *g = prog.find_gate(c.name)) {
        op = Operator{targets, g->mat, OpKind::Unitary};
    } else {
        op = builtin_gate(c.name, targets);
    }
    if (c.adjoint) {
        op.mat = op.mat.adjoint().eval();
    }
    return op;
}

namespace {

/// Applies a basis permutation on the qubits at pos.
void apply_perm(VectorXc &amp, size_t n, const std::vector<int> &pos, const std::vector<uint64_t> &perm) {
    const std::vector<size_t> off = kernel::offsets(n, pos);
    const size_t mask = kernel::mask_of(n, pos);
    const size_t d = size_t{1} << n;
    VectorXc in(off.size());
    for (size_t base = 0; base < d; base++) {
        if (base & mask) {
            continue;
        }
        for (size_t j = 0; j < off.size(); j++) {
            in[j] = amp[base | off[j]];
        }
        for (size_t j = 0; j < off.size(); j++) {
            amp[base | off[perm[j]]] = in[j];
        }
    }
}

std::vector<uint64_t> inverse_perm(const std::vector<uint64_t> &p) {
    std::vector<uint64_t> inv(p.size());
    for (size_t k = 0; k < p.size(); k++) {
        inv[p[k]] = k;
    }
    return inv;
}

/// Shared evaluation machinery: gate cache, statistics, and the random source for sampling.
class Machine {
   public:
    Machine(const Program &prog, const EvalConfig &cfg) : prog_(prog), cfg_(cfg), rng_(cfg.seed) {
    }

    EvalStats stats;

    /// Applies the gate of c to psi in place.
    void apply_gate(const Com &c, const ClassicalState &sigma, PureState &psi) {
        const std::vector<int> pos = psi.layout.positions(QubitLayout(c.qvars));
        const GateDecl *g = prog_.find_gate(c.name);
        if (c.name == "cmodmul" || (g && g->source == GateDecl::Source::Perm)) {
            std::vector<uint64_t> perm;
            if (g) {
                perm = g->perm;
            } else {
                const int64_t a = eval_aexp(c.args[0], sigma), n = eval_aexp(c.args[1], sigma),
                              l = eval_aexp(c.args[2], sigma);
                if (l < 1 || l >= (int64_t)c.qvars.size()) {
                    throw ArithError("cmodmul: target width out of range");
                }
                const auto key = std::make_tuple(a, n, (int64_t)c.qvars.size(), l);
                auto it = perm_cache_.find(key);
                if (it == perm_cache_.end()) {
                    it = perm_cache_.emplace(key, cmodmul_perm(a, n, (int)(c.qvars.size() - l), (int)l)).first;
                }
                perm = it->second;
            }
            apply_perm(psi.amp, psi.layout.size(), pos, c.adjoint ? inverse_perm(perm) : perm);
            return;
        }
        const std::string key = c.name + (c.adjoint ? "^dag/" : "/") + std::to_string(c.qvars.size());
        auto it = mat_cache_.find(key);
        if (it == mat_cache_.end()) {
            it = mat_cache_.emplace(key, resolve_gate(prog_, c, sigma).mat).first;
        }
        kernel::apply_in_place(psi.amp, psi.layout.size(), pos, it->second);
    }

    const MeasDecl &measurement(const std::string &name) {
        const MeasDecl *m = prog_.find_measurement(name);
        if (!m) {
            throw LookupError("unknown measurement " + name);
        }
        return *m;
    }

    void warn(const std::string &w) {
        if (stats.warnings.size() < 64 &&
            std::find(stats.warnings.begin(), stats.warnings.end(), w) == stats.warnings.end()) {
            stats.warnings.push_back(w);
        }
    }

    // ------------------------------------------------------------ exhaustive

    Povd run(const ComPtr &c, Povd mu) {
        switch (c->kind) {
            case Com::Kind::Skip:
                return mu;
            case Com::Kind::Abort:
                stats.aborted += mu.mass();
                mu.branches.clear();
                return mu;
            case Com::Kind::Seq:
                for (const auto &k : c->kids) {
                    mu = run(k, std::move(mu));
                }
                return mu;
            case Com::Kind::Call:
                return run(expand_call(prog_, c), std::move(mu));
            case Com::Kind::While:
                return run_while(*c, std::move(mu)).out;
            case Com::Kind::If: {
                Povd yes{mu.layout, {}}, no{mu.layout, {}};
                for (auto &b : mu.branches) {
                    try {
                        (eval_pure(c->guard, b.sigma, cfg_) ? yes : no).branches.push_back(std::move(b));
                    } catch (const ArithError &e) {
                        drop(b, "guard " + to_string(c->guard), e);
                    }
                }
                Povd a = run(c->kids[0], std::move(yes));
                Povd r = run(c->kids[1], std::move(no));
                a.branches.insert(a.branches.end(), std::make_move_iterator(r.branches.begin()),
                                  std::make_move_iterator(r.branches.end()));
                coalesce(a, cfg_.prune);
                return a;
            }
            default:
                break;
        }
        Povd out{mu.layout, {}};
        for (auto &b : mu.branches) {
            try {
                step(*c, b, out.branches);
            } catch (const ArithError &e) {
                drop(b, to_string(c), e);
            }
        }
        coalesce(out, cfg_.prune);
        return out;
    }

    WhileResult run_while(const Com &c, Povd mu) {
        LoopStat stat;
        Povd out{mu.layout, {}};
        Povd active = std::move(mu);
        for (;;) {
            const double tested = active.mass();
            Povd stay{active.layout, {}};
            double exited = 0;
            for (auto &b : active.branches) {
                try {
                    if (eval_pure(c.guard, b.sigma, cfg_)) {
                        stay.branches.push_back(std::move(b));
                    } else {
                        exited += b.weight;
                        out.branches.push_back(std::move(b));
                    }
                } catch (const ArithError &e) {
                    drop(b, "guard " + to_string(c.guard), e);
                }
            }
            if (stat.iterations > 0 && tested > 0) {
                stat.exit_fraction.push_back(exited / tested);
            }
            const double running = stay.mass();
            if (running == 0) {
                break;
            }
            if (running < cfg_.loop_tol) {
                stat.residual = running;
                break;
            }
            if (stat.iterations >= cfg_.max_iter) {
                stat.residual = running;
                warn("loop 'while " + to_string(c.guard) + "' cut off after " + std::to_string(cfg_.max_iter) +
                     " iterations with running mass " + std::to_string(running));
                break;
            }
            active = run(c.kids[0], std::move(stay));
            stat.iterations++;
        }
        coalesce(out, cfg_.prune);
        stats.residual += stat.residual;
        stats.iterations = std::max(stats.iterations, stat.iterations);
        stats.loops.push_back(stat);
        return {std::move(out), stat.residual, stat.iterations};
    }

    void drop(const Branch &b, const std::string &where, const std::exception &e) {
        stats.aborted += b.weight;
        warn("branch " + b.sigma.str() + " aborted in " + where + ": " + e.what());
    }

    /// Effect of a primitive command on one branch.
    void step(const Com &c, const Branch &b0, std::vector<Branch> &out) {
        Branch b = b0;
        switch (c.kind) {
            case Com::Kind::Assign:
                b.sigma.set(c.var, eval_aexp(c.expr, b.sigma));
                out.push_back(std::move(b));
                return;
            case Com::Kind::Random: {
                const int64_t lo = eval_aexp(c.lo, b.sigma), hi = eval_aexp(c.hi, b.sigma);
                if (lo > hi) {
                    throw ArithError("random: empty range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
                }
                const double w = b.weight / (double)(hi - lo + 1);
                for (int64_t v = lo; v <= hi; v++) {
                    out.push_back(Branch{b.sigma.with(c.var, v), w, b.psi});
                }
                return;
            }
            case Com::Kind::Init: {
                std::vector<Branch> cur{std::move(b)};
                for (const auto &q : c.qvars) {
                    std::vector<Branch> nxt;
                    for (auto &x : cur) {
                        for (auto &ws : reset_qubit(x.psi, q, cfg_.prune)) {
                            nxt.push_back(Branch{x.sigma, x.weight * ws.weight, std::move(ws.post)});
                        }
                    }
                    cur = std::move(nxt);
                }
                out.insert(out.end(), std::make_move_iterator(cur.begin()), std::make_move_iterator(cur.end()));
                return;
            }
            case Com::Kind::Unitary:
                apply_gate(c, b.sigma, b.psi);
                out.push_back(std::move(b));
                return;
            case Com::Kind::Measure: {
                const MeasDecl &m = measurement(c.name);
                for (auto &o : measure(b.psi, m.ops, QubitLayout(c.qvars), cfg_.prune)) {
                    out.push_back(Branch{b.sigma.with(c.var, o.outcome), b.weight * o.prob, std::move(o.post)});
                }
                return;
            }
            default:
                throw std::logic_error("step: not a primitive command");
        }
    }

    // ------------------------------------------------------------ sampling

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    }

    template <typename W>
    size_t pick(const std::vector<W> &weights) {
        double total = 0;
        for (double w : weights) {
            total += w;
        }
        double u = uniform() * total;
        for (size_t k = 0; k < weights.size(); k++) {
            if (u < weights[k]) {
                return k;
            }
            u -= weights[k];
        }
        return weights.size() - 1;
    }

    /// Returns false when the trajectory stops; status and reason are set in r.
    bool sample(const ComPtr &c, SampleResult &r) {
        switch (c->kind) {
            case Com::Kind::Skip:
                return true;
            case Com::Kind::Abort:
                r.status = RunStatus::Aborted;
                r.reason = "abort";
                return false;
            case Com::Kind::Seq:
                for (const auto &k : c->kids) {
                    if (!sample(k, r)) {
                        return false;
                    }
                }
                return true;
            case Com::Kind::Call:
                return sample(expand_call(prog_, c), r);
            case Com::Kind::If:
                return sample(eval_pure(c->guard, r.sigma, cfg_) ? c->kids[0] : c->kids[1], r);
            case Com::Kind::While: {
                int iter = 0;
                while (eval_pure(c->guard, r.sigma, cfg_)) {
                    if (iter >= cfg_.max_iter) {
                        r.status = RunStatus::Diverged;
                        r.reason = "loop 'while " + to_string(c->guard) + "' exceeded " + std::to_string(cfg_.max_iter) +
                                   " iterations";
                        return false;
                    }
                    if (!sample(c->kids[0], r)) {
                        return false;
                    }
                    iter++;
                }
                stats.iterations = std::max(stats.iterations, iter);
                return true;
            }
            case Com::Kind::Assign:
                r.sigma.set(c->var, eval_aexp(c->expr, r.sigma));
                return true;
            case Com::Kind::Random: {
                const int64_t lo = eval_aexp(c->lo, r.sigma), hi = eval_aexp(c->hi, r.sigma);
                if (lo > hi) {
                    throw ArithError("random: empty range");
                }
                r.sigma.set(c->var, std::uniform_int_distribution<int64_t>(lo, hi)(rng_));
                return true;
            }
            case Com::Kind::Init:
                for (const auto &q : c->qvars) {
                    auto ws = reset_qubit(r.psi, q, 0.0);
                    std::vector<double> w;
                    for (const auto &x : ws) {
                        w.push_back(x.weight);
                    }
                    r.psi = ws[pick(w)].post;
                }
                return true;
            case Com::Kind::Unitary:
                apply_gate(*c, r.sigma, r.psi);
                return true;
            case Com::Kind::Measure: {
                const MeasDecl &m = measurement(c->name);
                auto outs = measure(r.psi, m.ops, QubitLayout(c->qvars), 0.0);
                std::vector<double> w;
                for (const auto &o : outs) {
                    w.push_back(o.prob);
                }
                const auto &o = outs[pick(w)];
                r.sigma.set(c->var, o.outcome);
                r.psi = o.post;
                r.measurements++;
                return true;
            }
        }
        return true;
    }

   private:
    const Program &prog_;
    EvalConfig cfg_;
    std::mt19937_64 rng_;
    std::map<std::string, MatrixXc> mat_cache_;
    std::map<std::tuple<int64_t, int64_t, int64_t, int64_t>, std::vector<uint64_t>> perm_cache_;
};

}  // namespace

EvalResult eval(const Program &prog, const ComPtr &c, const Povd &in, const EvalConfig &cfg) {
    Machine m(prog, cfg);
    Povd mu = in;
    coalesce(mu, cfg.prune);
    Povd out = m.run(c, std::move(mu));
    return {std::move(out), std::move(m.stats)};
}

EvalResult eval(const Program &prog, const Povd &in, const EvalConfig &cfg) {
    return eval(prog, prog.body, in, cfg);
}

WhileResult eval_while(const Program &prog, const ComPtr &loop, const Povd &in, const EvalConfig &cfg) {
    if (loop->kind != Com::Kind::While) {
        throw std::invalid_argument("eval_while: not a while loop");
    }
    Machine m(prog, cfg);
    Povd mu = in;
    coalesce(mu, cfg.prune);
    return m.run_while(*loop, std::move(mu));
}

SampleResult sample_run(const Program &prog, const ComPtr &c, const ClassicalState &sigma, const PureState &psi,
                        const EvalConfig &cfg) {
    Machine m(prog, cfg);
    SampleResult r{RunStatus::Terminated, sigma, psi, "", 0};
    try {
        m.sample(c, r);
    } catch (const ArithError &e) {
        r.status = RunStatus::Aborted;
        r.reason = e.what();
    }
    return r;
}

std::string status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Terminated:
            return "terminated";
        case RunStatus::Aborted:
            return "aborted";
        case RunStatus::Diverged:
            return "diverged";
    }
    return "?";
}

}  // namespace qhl
