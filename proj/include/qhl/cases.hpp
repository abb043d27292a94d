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

#include <stdexcept>
#include <string>
#include <vector>

#include "qhl/qcore.hpp"

namespace qhl {

struct BuildError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Linear system Ax = b solved by phase estimation on n control qubits.
struct HHLInstance {
    int n = 2, m = 1;
    MatrixXc A;
    VectorXc b;
    double t_evo = 2 * M_PI;
    double C = 1.0;
};

/// A = diag(1/4, 1/2), b = (1, 1)/√2, t = 2π, C = 1: eigenphases 1/4 and 1/2 on two control qubits.
HHLInstance default_hhl();

struct HHLBuild {
    /// Parseable program; gates U_b, U_f and U_c are declared inline.
    std::string text;
    /// Declarations only, shared by the generated outlines.
    std::string declarations;
    std::vector<std::string> warnings;
    /// Normalized A⁻¹b.
    VectorXc x;
    /// Qubit names: p1..pn, q1..qm, r.
    std::vector<std::string> p, q;
    MatrixXc ub, uf, uc;
};

/// Checks the instance and emits the program; throws BuildError when A is not Hermitian, an eigenphase leaves (0, 1)
/// or C exceeds the smallest scaled phase. Inexact phases only warn.
HHLBuild build_hhl(const HHLInstance &inst);

/// Proof outline of the loop body at the instance, as a standalone outline.
std::string hhl_body_outline(const HHLInstance &inst);
/// Proof outline of the whole program; refers to program_file for the commands.
std::string hhl_outline(const HHLInstance &inst, const std::string &program_file);

/// Order finding for x modulo N with t phase qubits and L work qubits.
struct OFInstance {
    int64_t N = 15, x = 7;
    int t = 4, L = 4;
    double eps = 0.25;
};

/// t = 2L + 1 + ⌈log2(2 + 1/(2 eps))⌉.
int of_t_bound(int L, double eps);

struct OFBuild {
    /// Reads N and x from the initial classical state.
    std::string text;
    /// The same commands as a macro OF(x, N) returns z.
    std::string macro;
    std::vector<std::string> warnings;
    int64_t order = 0;
};

/// Throws BuildError unless 2 <= x <= N-1, gcd(x, N) = 1 and N fits in L qubits.
OFBuild build_of(const OFInstance &inst);

/// Proof outline of the order-finding program at the instance; refers to program_file.
std::string of_outline(const OFInstance &inst, const std::string &program_file);

/// Shor's factoring loop around the order-finding macro; N comes from the initial classical state.
std::string build_shor(const OFInstance &inst);

}  // namespace qhl
