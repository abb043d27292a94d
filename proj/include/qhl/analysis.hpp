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

#include <map>
#include <set>
#include <string>

#include "qhl/ast.hpp"

namespace qhl {

typedef std::set<std::string> NameSet;

NameSet free_vars(const AexpPtr &a);
NameSet free_vars(const PurePtr &p);
/// Classical variables free in f.
NameSet free_vars(const FormulaPtr &f);
NameSet free_vars(const Dist &d);
/// Qubits mentioned by kets in f.
NameSet free_qvars(const FormulaPtr &f);
NameSet free_qvars(const Dist &d);
bool has_quantum(const FormulaPtr &f);
bool has_quantum(const Dist &d);

/// Classical variables assigned and qubits touched by c; macro calls are followed through prog.
NameSet mod_vars(const ComPtr &c, const Program *prog = nullptr);
/// Qubits named by c, in first-appearance order.
std::vector<std::string> qubits_of(const ComPtr &c, const Program *prog = nullptr);

/// Capture-avoiding substitution of a for x.
AexpPtr substitute(const AexpPtr &e, const std::string &x, const AexpPtr &a);
PurePtr substitute(const PurePtr &p, const std::string &x, const AexpPtr &a);
FormulaPtr substitute(const FormulaPtr &f, const std::string &x, const AexpPtr &a);
Dist substitute(const Dist &d, const std::string &x, const AexpPtr &a);

struct MacroError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Textual expansion of one macro call: parameters replaced by arguments, result copied out.
ComPtr expand_call(const Program &prog, const ComPtr &call);
/// Expands every call in c; recursive macros raise MacroError.
ComPtr inline_macros(const Program &prog, const ComPtr &c);

}  // namespace qhl
