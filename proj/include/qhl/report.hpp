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

#include <json.hpp>

#include "qhl/assert.hpp"
#include "qhl/harness.hpp"
#include "qhl/prover.hpp"
#include "qhl/sem.hpp"

namespace qhl {

/// Version of every JSON document the CLI writes.
constexpr int kSchema = 1;

nlohmann::json to_json(const ClassicalState &sigma);
/// Amplitudes are listed only for layouts of at most max_qubits qubits.
nlohmann::json to_json(const Povd &mu, int max_qubits = 6);
nlohmann::json to_json(const EvalStats &s);
nlohmann::json to_json(const Verdict &v);
nlohmann::json to_json(const ReportNode &n);
nlohmann::json to_json(const CheckReport &r);
nlohmann::json to_json(const TripleReport &t);
nlohmann::json to_json(const FuzzSummary &s);

/// Indented text rendering of a proof tree, one node per line.
std::string render_tree(const ReportNode &n, int depth = 0);

}  // namespace qhl
