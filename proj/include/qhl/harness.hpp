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

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhl/analysis.hpp"
#include "qhl/assert.hpp"
#include "qhl/ast.hpp"
#include "qhl/prover.hpp"
#include "qhl/sem.hpp"

namespace qhl {

/// The formula lies outside the generator fragment, or rejection sampling ran out of attempts.
struct Unsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenSpec {
    Dist formula;
    /// Must cover the formula's free quantum variables.
    QubitLayout layout;
    /// Classical variables to bind besides the formula's own.
    std::vector<std::string> vars;
    int64_t lo = -8, hi = 8;
    uint64_t seed = 0;
    int count = 1;
    /// Rejection attempts per state for the pure constraints.
    int max_attempts = 100000;
};

/// Haar-random state: normalized complex Gaussian vector.
PureState haar_state(const QubitLayout &layout, std::mt19937_64 &rng);

/// States satisfying spec.formula; every one is checked with satisfies before it is returned.
/// Throws Unsupported naming the offending subformula.
std::vector<Povd> generate_states(const GenSpec &spec, const EvalConfig &cfg = {});

/// Classical variables read or written by c, macro bodies included.
NameSet program_vars(const ComPtr &c, const Program &prog);

struct TripleReport {
    int trials = 0;
    int satisfied = 0, not_proven = 0, refuted = 0;
    bool unsupported = false;
    std::string error;
    /// Initial classical state of the first refuting trial.
    std::optional<std::string> counterexample;

    bool valid() const {
        return !unsupported && refuted == 0;
    }
};

/// Runs c from `trials` generated states satisfying pre and checks post on each result.
TripleReport validate_triple(const Program &prog, const Dist &pre, const ComPtr &c, const Dist &post, int trials,
                             const EvalConfig &cfg = {}, uint64_t seed = 0);

struct CorpusEntry {
    std::string name;
    std::string path;
    /// Entries named neg_* are mutated-rule negative controls; they are expected to be refuted.
    bool negative = false;
    CheckReport check;
    TripleReport empirical;
};

struct FuzzSummary {
    std::vector<CorpusEntry> entries;
    int satisfied = 0, not_proven = 0, refuted = 0;
    /// Positive entries with Refuted trials, unsupported entries, or rejected proofs.
    int failures = 0;
    /// Negative controls that produced at least one Refuted trial.
    int controls_caught = 0, controls = 0;

    bool ok() const {
        return failures == 0 && controls_caught == controls;
    }
};

/// Checks every outline (*.qhl) in dir and validates its triple empirically.
FuzzSummary fuzz_soundness(const std::string &dir, int trials, const EvalConfig &cfg = {}, uint64_t seed = 42);

}  // namespace qhl
