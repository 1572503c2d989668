#pragma once

// Test-only oracles, independent of the library's search and algebra paths.
// Everything here is brute force on explicitly materialized small graphs.

#include "cms/rational.hpp"
#include "cms/shift.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

using cms::Rat;
using cms::Symbol;
using cms::Word;

// An explicit finite digraph: adjacency over a literal vertex list.
struct Graph {
    std::vector<Symbol> verts;
    std::set<std::pair<Symbol, Symbol>> edges;

    bool has(Symbol a, Symbol b) const { return edges.count({a, b}) > 0; }
};

inline Graph golden_mean_graph() {
    return Graph{{1, 2}, {{1, 1}, {1, 2}, {2, 1}}};
}

// The golden-mean loop system written out as a 2-vertex graph on {0, 1}:
// a length-1 loop at the base and one length-2 loop through the midpoint.
inline Graph golden_mean_loop_graph() {
    return Graph{{0, 1}, {{0, 0}, {0, 1}, {1, 0}}};
}

inline bool walk_is_admissible(const Graph& g, const Word& w) {
    for (auto s : w)
        if (std::find(g.verts.begin(), g.verts.end(), s) == g.verts.end()) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!g.has(w[i], w[i + 1])) return false;
    return true;
}

// All admissible words of length n from `first` to `last`: filter the full
// cartesian power of the vertex list.
inline std::vector<Word> brute_enumerate(const Graph& g, std::size_t n, Symbol first, Symbol last) {
    std::vector<Word> out;
    std::vector<std::size_t> idx(n, 0);
    const std::size_t V = g.verts.size();
    for (;;) {
        Word w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = g.verts[idx[i]];
        if (w.front() == first && w.back() == last && walk_is_admissible(g, w)) out.push_back(w);
        std::size_t pos = n;
        while (pos > 0) {
            ++idx[pos - 1];
            if (idx[pos - 1] < V) break;
            idx[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Textbook BFS shortest path (vertex-inclusive word), smallest-successor-first
// so ties resolve lexicographically. Distance 0 when a == b.
inline std::optional<Word> bfs_connect(const Graph& g, Symbol a, Symbol b, std::size_t max_len) {
    if (a == b) return Word{a};
    std::map<Symbol, Symbol> parent;
    std::deque<Symbol> q{a};
    std::set<Symbol> seen{a};
    std::vector<Symbol> order = g.verts;
    std::sort(order.begin(), order.end());
    while (!q.empty()) {
        const Symbol v = q.front();
        q.pop_front();
        for (Symbol u : order) {
            if (!g.has(v, u) || seen.count(u)) continue;
            parent[u] = v;
            if (u == b) {
                Word w{u};
                Symbol cur = u;
                while (cur != a) { cur = parent[cur]; w.push_back(cur); }
                std::reverse(w.begin(), w.end());
                if (w.size() > max_len) return std::nullopt;
                return w;
            }
            seen.insert(u);
            q.push_back(u);
        }
    }
    return std::nullopt;
}

// Stationary vector of a small stochastic matrix by dense elimination on
// (P^T - I) with the normalization row.
inline std::vector<double> stationary(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) A[j][i] = P[i][j] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) A[0][i] = 1.0;  // replace first equation by sum = 1
    A[0][n] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0.0) continue;
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
    return pi;
}

// Orbit-average mass of a cylinder under the periodic point of `cycle`:
// direct rotation count against the repeated word.
inline Rat orbit_mass(const std::vector<Symbol>& cycle, const std::vector<Symbol>& cyl) {
    const std::size_t p = cycle.size();
    std::size_t hits = 0;
    for (std::size_t off = 0; off < p; ++off) {
        bool match = true;
        for (std::size_t i = 0; i < cyl.size(); ++i) {
            if (cycle[(off + i) % p] != cyl[i]) { match = false; break; }
        }
        if (match) ++hits;
    }
    return Rat(hits, p);
}

}  // namespace oracle
