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

#include <string>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/sem.hpp"

namespace qhl {

struct EntailResult {
    enum class Status { Proved, Unknown };
    Status status = Status::Unknown;
    /// Rule names used, first use first, no repeats.
    std::vector<std::string> trace;
    /// Some pure implication was decided on a finite window only.
    bool approximate = false;
    std::string reason;

    bool proved() const {
        return status == Status::Proved;
    }
};

/// A ket factor found inside a formula; `node` identifies the ket expression it came from.
struct KetAtom {
    KetFactor factor;
    int node = 0;
};

/// A state formula read as a conjunction: ⊙ and ∧ coincide once flattened.
struct Atoms {
    std::vector<PurePtr> pure;
    std::vector<KetAtom> kets;
    /// Negated or quantified formulas that mention kets.
    std::vector<FormulaPtr> other;
    bool contradiction = false;
    bool saw_true = false;
};

Atoms flatten_atoms(const FormulaPtr &f);
/// Pure atoms joined by ∧, then kets: one ket expression when the factors are disjoint.
FormulaPtr rebuild(const Atoms &a);
/// True when every ket sits under ⊙ and ∧ only, so mixtures of models stay models.
bool mixing_safe(const FormulaPtr &f);

EntailResult entails(const FormulaPtr &lhs, const FormulaPtr &rhs, const EvalConfig &cfg = {});
EntailResult entails(const Dist &lhs, const Dist &rhs, const EvalConfig &cfg = {});
/// Entailment in both directions; traces are merged.
EntailResult equivalent(const FormulaPtr &a, const FormulaPtr &b, const EvalConfig &cfg = {});

/// Pure implication from hypotheses; may enumerate free variables on a window.
bool prove_pure(const std::vector<PurePtr> &hyps, const PurePtr &goal, const EvalConfig &cfg, bool *approximate);

}  // namespace qhl
