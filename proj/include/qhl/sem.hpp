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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/classical.hpp"
#include "qhl/qcore.hpp"

namespace qhl {

enum class EvalMode { Exhaustive, Sample };

struct EvalConfig {
    /// A loop stops once its still-running mass drops below loop_tol.
    double loop_tol = 1e-9;
    int max_iter = 10000;
    /// Branches lighter than prune are dropped.
    double prune = 1e-12;
    /// Range scanned for forall.
    int64_t forall_lo = -64, forall_hi = 64;
    EvalMode mode = EvalMode::Exhaustive;
    uint64_t seed = 0;
};

/// One weighted pure branch of a partial distribution.
struct Branch {
    ClassicalState sigma;
    double weight;
    PureState psi;
};

/// Partial distribution over (classical state, quantum state), kept as a pure-state ensemble.
/// Invariant after coalesce: branches sorted by sigma; no two branches with equal sigma are equal up to phase.
struct Povd {
    QubitLayout layout;
    std::vector<Branch> branches;

    double mass() const;
    /// Distinct classical states, in order.
    std::vector<ClassicalState> support() const;
};

Povd point_povd(const QubitLayout &layout, const ClassicalState &sigma);
Povd point_povd(const ClassicalState &sigma, const PureState &psi);
/// Merges branches with equal sigma and states equal up to phase; drops weights below prune.
void coalesce(Povd &mu, double prune = kPrune);
/// sum_k w_k mu_k; all layouts must agree.
Povd povd_mix(const std::vector<std::pair<double, Povd>> &parts);
/// Unnormalized density operator of mu at sigma.
Operator povd_density(const Povd &mu, const ClassicalState &sigma);

struct LoopStat {
    int iterations = 0;
    /// Running mass dropped when the loop was cut off.
    double residual = 0;
    /// Mass leaving the loop at each guard test after a body run, relative to the mass tested.
    std::vector<double> exit_fraction;
};

struct EvalStats {
    /// Total mass dropped by loop cut-offs.
    double residual = 0;
    /// Mass lost to abort, failed guards or arithmetic errors.
    double aborted = 0;
    /// Largest iteration count of any single loop execution.
    int iterations = 0;
    std::vector<LoopStat> loops;
    std::vector<std::string> warnings;
};

struct EvalResult {
    Povd out;
    EvalStats stats;
};

int64_t eval_aexp(const AexpPtr &a, const ClassicalState &sigma);
/// Evaluates a predicate; forall scans [forall_lo, forall_hi] and sets *windowed.
bool eval_pure(const PurePtr &p, const ClassicalState &sigma, const EvalConfig &cfg = {}, bool *windowed = nullptr);

/// Unitary of a gate application; parameters are evaluated in sigma.
Operator resolve_gate(const Program &prog, const Com &c, const ClassicalState &sigma = {});
/// |j>|y> -> |j>|a^j y mod n>|, identity on y >= n; controls first, l target qubits last.
std::vector<uint64_t> cmodmul_perm(int64_t a, int64_t n, int controls, int l);

EvalResult eval(const Program &prog, const ComPtr &c, const Povd &in, const EvalConfig &cfg = {});
EvalResult eval(const Program &prog, const Povd &in, const EvalConfig &cfg = {});

struct WhileResult {
    Povd out;
    double residual;
    int iterations;
};
WhileResult eval_while(const Program &prog, const ComPtr &loop, const Povd &in, const EvalConfig &cfg = {});

enum class RunStatus { Terminated, Aborted, Diverged };

struct SampleResult {
    RunStatus status;
    ClassicalState sigma;
    PureState psi;
    std::string reason;
    int measurements = 0;
};

/// One trajectory: measurement outcomes and random draws sampled with cfg.seed.
SampleResult sample_run(const Program &prog, const ComPtr &c, const ClassicalState &sigma, const PureState &psi,
                        const EvalConfig &cfg);

std::string status_name(RunStatus s);

}  // namespace qhl
