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
#include "qhl/entail.hpp"
#include "qhl/sem.hpp"

namespace qhl {

enum class NodeStatus { Ok, SideConditionFailure, RuleShapeMismatch, DelegatedEntailmentUnknown };

std::string status_name(NodeStatus s);

/// One checked rule application. Children are premises and delegated entailments.
struct ReportNode {
    std::string rule;
    std::string command;
    std::string pre, post;
    int line = 0;
    NodeStatus status = NodeStatus::Ok;
    std::string detail;
    /// Accepted subject to an entailment the engine did not close syntactically.
    bool conditional = false;
    /// Some pure implication was decided on a finite window.
    bool approximate = false;
    std::vector<std::string> trace;
    std::vector<ReportNode> kids;
};

struct CheckReport {
    enum class Overall { Ok, Conditional, Failed };
    Overall overall = Overall::Ok;
    ReportNode root;
    /// "line N: rule: detail" for every conditional node.
    std::vector<std::string> conditionals;
    std::vector<std::string> failures;
    int nodes = 0;
    /// The triple established by the outline.
    Dist pre, post;
    ComPtr program;
};

std::string overall_name(CheckReport::Overall o);

/// A rule name with optional arguments, as written after `by`.
struct Justification {
    std::string rule;
    std::vector<std::string> args;
};

/// One outline item; see parse_outline for the surface syntax.
struct OutlineItem {
    enum class Kind { Assert, Command, Frame, If, While };
    Kind kind = Kind::Assert;
    int line = 0;
    Dist dist;
    std::vector<Justification> by;
    ComPtr com;
    /// Frame: local precondition; the local items end with the local postcondition.
    FormulaPtr local_pre;
    PurePtr guard;
    std::vector<OutlineItem> items, else_items;
};

struct Outline {
    Program program;
    /// Set when the outline names a program file; its body must match the outline's commands.
    bool external_program = false;
    std::vector<OutlineItem> items;
};

/// Outline syntax:
///   [program "file"] declarations, then items separated by optional ';':
///   {D} [by R, R(args)]                      assertion; without a preceding command an entailment step
///   command {D} by R                         rule application
///   => {F1} items <= {F2} by R               local proof under the frame rule
///   <=> {F1} command {F2} by R               one-command local proof under the frame rule
///   if b then items else items fi {D} by Cond(p)
///   while b do items od {D} by While
Outline parse_outline(const std::string &text, const std::string &base_dir = ".");
Outline load_outline(const std::string &path);

/// Checks an atomic rule instance {pre} c {post}: Skip, Abort, Absurd, Assgn, Rand, QInit, QUnit, QMeas, Call,
/// and combinations with Sum or Conj.
ReportNode check_node(const std::vector<Justification> &by, const Dist &pre, const ComPtr &c, const Dist &post,
                      const Program &prog, const EvalConfig &cfg = {});

/// Delegated entailment step; `numeric` in by marks an accepted step as conditional.
ReportNode check_entailment(const std::vector<Justification> &by, const Dist &pre, const Dist &post,
                            const EvalConfig &cfg = {});

CheckReport check_outline(const Outline &outline, const EvalConfig &cfg = {});

/// U†_q̄ applied to the kets of f that cover q̄; throws std::invalid_argument when they do not.
FormulaPtr adjoint_pre(const FormulaPtr &f, const MatrixXc &u, const std::vector<std::string> &qs);

}  // namespace qhl
