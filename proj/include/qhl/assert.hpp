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
#include <string>
#include <vector>

#include "qhl/ast.hpp"
#include "qhl/sem.hpp"

namespace qhl {

/// Frobenius distance allowed between a reduced density and the projector of a ket atom.
constexpr double kKetTol = 1e-7;

/// Satisfaction of a state formula by a classical state and an unnormalized density.
/// Ket atoms hold vacuously on a zero density.
bool sat_state(const FormulaPtr &f, const ClassicalState &sigma, const Operator &rho, const EvalConfig &cfg = {},
               bool *windowed = nullptr);
/// Same, for an ensemble of branches sharing sigma.
bool sat_group(const FormulaPtr &f, const ClassicalState &sigma, const std::vector<const Branch *> &group,
               const EvalConfig &cfg = {}, bool *windowed = nullptr);

struct Verdict {
    enum class Status { Satisfied, Refuted, NotProven };
    Status status = Status::NotProven;
    std::string reason;
    std::vector<std::string> notes;
    /// A forall was decided on the finite window only.
    bool approximate = false;
    /// The weight split was found in exact rational arithmetic.
    bool exact = false;
    /// Witness: the pieces of mu, their masses and the mass each sends to each component.
    std::vector<std::string> pieces;
    std::vector<double> piece_mass;
    std::vector<std::vector<double>> assignment;
    std::optional<ClassicalState> counterexample;
};

std::string status_name(Verdict::Status s);

/// Decides mu |= d. Refuted is reported only when the search over decompositions is complete.
Verdict satisfies(const Povd &mu, const Dist &d, const EvalConfig &cfg = {});

struct Probability {
    double value = 0;
    /// False when F mentions kets and some classical state carries a mixed ensemble.
    bool decisive = true;
    std::vector<std::string> notes;
};

/// Normalized mass of the classical states whose ensemble satisfies f.
Probability probability_of(const Povd &mu, const FormulaPtr &f, const EvalConfig &cfg = {});

}  // namespace qhl
