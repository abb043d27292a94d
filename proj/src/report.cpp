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

#include "qhl/report.hpp"

namespace qhl {

using nlohmann::json;

json to_json(const ClassicalState &sigma) {
    json j = json::object();
    for (const auto &[x, v] : sigma.entries()) {
        j[x] = v;
    }
    return j;
}

json to_json(const Povd &mu, int max_qubits) {
    json branches = json::array();
    for (const auto &b : mu.branches) {
        json jb{{"sigma", to_json(b.sigma)}, {"weight", b.weight}};
        if ((int)mu.layout.size() <= max_qubits) {
            json amp = json::array();
            for (Eigen::Index i = 0; i < b.psi.amp.size(); i++) {
                amp.push_back({b.psi.amp[i].real(), b.psi.amp[i].imag()});
            }
            jb["amplitudes"] = amp;
        }
        branches.push_back(jb);
    }
    return json{{"layout", mu.layout.names()}, {"mass", mu.mass()}, {"branches", branches}};
}

json to_json(const EvalStats &s) {
    json loops = json::array();
    for (const auto &l : s.loops) {
        loops.push_back({{"iterations", l.iterations}, {"residual", l.residual}, {"exit_fraction", l.exit_fraction}});
    }
    return json{{"residual", s.residual},
                {"aborted", s.aborted},
                {"iterations", s.iterations},
                {"loops", loops},
                {"warnings", s.warnings}};
}

json to_json(const Verdict &v) {
    json j{{"status", status_name(v.status)},
           {"reason", v.reason},
           {"notes", v.notes},
           {"approximate", v.approximate},
           {"exact", v.exact}};
    if (!v.pieces.empty()) {
        j["witness"] = {{"pieces", v.pieces}, {"mass", v.piece_mass}, {"assignment", v.assignment}};
    }
    if (v.counterexample) {
        j["counterexample"] = to_json(*v.counterexample);
    }
    return j;
}

json to_json(const ReportNode &n) {
    json kids = json::array();
    for (const auto &k : n.kids) {
        kids.push_back(to_json(k));
    }
    return json{{"rule", n.rule},
                {"command", n.command},
                {"pre", n.pre},
                {"post", n.post},
                {"line", n.line},
                {"status", status_name(n.status)},
                {"detail", n.detail},
                {"conditional", n.conditional},
                {"approximate", n.approximate},
                {"trace", n.trace},
                {"children", kids}};
}

json to_json(const CheckReport &r) {
    return json{{"schema", kSchema},
                {"overall", overall_name(r.overall)},
                {"pre", to_string(r.pre)},
                {"post", to_string(r.post)},
                {"nodes", r.nodes},
                {"conditionals", r.conditionals},
                {"failures", r.failures},
                {"tree", to_json(r.root)}};
}

json to_json(const TripleReport &t) {
    json j{{"trials", t.trials},
           {"satisfied", t.satisfied},
           {"not_proven", t.not_proven},
           {"refuted", t.refuted},
           {"unsupported", t.unsupported},
           {"valid", t.valid()}};
    if (!t.error.empty()) {
        j["error"] = t.error;
    }
    if (t.counterexample) {
        j["counterexample"] = *t.counterexample;
    }
    return j;
}

json to_json(const FuzzSummary &s) {
    json entries = json::array();
    for (const auto &e : s.entries) {
        entries.push_back({{"name", e.name},
                           {"path", e.path},
                           {"negative", e.negative},
                           {"proof", overall_name(e.check.overall)},
                           {"failures", e.check.failures},
                           {"empirical", to_json(e.empirical)}});
    }
    return json{{"schema", kSchema},
                {"entries", entries},
                {"satisfied", s.satisfied},
                {"not_proven", s.not_proven},
                {"refuted", s.refuted},
                {"failures", s.failures},
                {"controls", s.controls},
                {"controls_caught", s.controls_caught},
                {"ok", s.ok()}};
}

std::string render_tree(const ReportNode &n, int depth) {
    std::string out(2 * depth, ' ');
    out += n.rule;
    if (!n.command.empty()) {
        out += " [" + n.command + "]";
    }
    if (n.line) {
        out += " (line " + std::to_string(n.line) + ")";
    }
    if (n.status != NodeStatus::Ok) {
        out += " " + status_name(n.status);
    } else if (n.conditional) {
        out += " conditional";
    }
    if (!n.detail.empty()) {
        out += ": " + n.detail;
    }
    out += "\n";
    for (const auto &k : n.kids) {
        out += render_tree(k, depth + 1);
    }
    return out;
}

}  // namespace qhl
