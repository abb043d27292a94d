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
#include <queue>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qhl {

typedef boost::multiprecision::cpp_rational BigRational;

/// Edmonds-Karp maximum flow over a scalar with exact or floating arithmetic.
template <typename T>
class MaxFlow {
   public:
    explicit MaxFlow(int n) : adj_(n) {
    }

    /// Returns an edge id usable with flow().
    int add_edge(int u, int v, const T &cap) {
        edges_.push_back({v, cap, T(0)});
        adj_[u].push_back((int)edges_.size() - 1);
        edges_.push_back({u, T(0), T(0)});
        adj_[v].push_back((int)edges_.size() - 1);
        return (int)edges_.size() - 2;
    }

    T run(int s, int t, const T &eps = T(0)) {
        T total(0);
        for (;;) {
            std::vector<int> via(adj_.size(), -1);
            std::queue<int> q;
            q.push(s);
            via[s] = -2;
            while (!q.empty() && via[t] == -1) {
                const int u = q.front();
                q.pop();
                for (int e : adj_[u]) {
                    const Edge &ed = edges_[e];
                    if (via[ed.to] == -1 && ed.cap - ed.flow > eps) {
                        via[ed.to] = e;
                        q.push(ed.to);
                    }
                }
            }
            if (via[t] == -1) {
                return total;
            }
            T push = edges_[via[t]].cap - edges_[via[t]].flow;
            for (int v = t; v != s; v = edges_[via[v] ^ 1].to) {
                const Edge &ed = edges_[via[v]];
                const T room = ed.cap - ed.flow;
                if (room < push) {
                    push = room;
                }
            }
            for (int v = t; v != s; v = edges_[via[v] ^ 1].to) {
                edges_[via[v]].flow += push;
                edges_[via[v] ^ 1].flow -= push;
            }
            total += push;
        }
    }

    T flow(int edge) const {
        return edges_[edge].flow;
    }

   private:
    struct Edge {
        int to;
        T cap, flow;
    };
    std::vector<std::vector<int>> adj_;
    std::vector<Edge> edges_;
};

/// Small-denominator rational within tol of x, if one exists.
std::optional<BigRational> recover_rational(double x, long long max_den = 1000000, double tol = 1e-12);

struct TransportResult {
    bool feasible = false;
    /// Solved in exact rational arithmetic.
    bool exact = false;
    /// flow[g][i]: mass of source g shipped to sink i.
    std::vector<std::vector<double>> flow;
};

/// Ships every supply to allowed sinks so each sink receives exactly its demand.
TransportResult solve_transport(const std::vector<double> &supply, const std::vector<double> &demand,
                                const std::vector<std::vector<bool>> &allowed, double tol = 1e-9);

}  // namespace qhl
