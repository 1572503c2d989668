#pragma once

/**
 * @file transfer.hpp
 * @brief Weighted transfer matrices on finite symbol sets: certified leading
 *        eigenvalues and the equilibrium chains they induce.
 *
 * For a finite graph and a depth-k locally constant weight, the transfer
 * matrix lives on admissible (k-1)-blocks (plain symbols for k <= 2) with
 * edge weight e^{phi} evaluated on the k-word the edge spells. Power
 * iteration keeps the two-sided bracket
 *
 *     min_u (Wv)_u / v_u  <=  lambda  <=  max_u (Wv)_u / v_u,
 *
 * so every reported log-eigenvalue carries a certified interval. The induced
 * chain P_{uv} = W_{uv} r_v / (rowsum) is exactly stochastic for any positive
 * r, and its free energy h + integral(phi) equals sum_u pi_u log(rowsum_u /
 * r_u) by construction, which lands inside the bracket once r is converged.
 */

#include "cms/measure.hpp"
#include "cms/potential.hpp"
#include "cms/shift.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cms {

struct NotIrreducible : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Locally constant weight: value on words of length >= depth.
struct LocalWeight {
    int depth = 1;
    std::function<double(const Word&)> value;

    static LocalWeight of(const Potential& phi) {
        return {phi.depth(), [&phi](const Word& w) { return phi.value(w); }};
    }
};

struct TransferGraph {
    std::vector<Word> states;              // admissible blocks
    std::vector<std::vector<double>> W;    // edge weights (0 = no edge)
};

namespace detail {

inline void enumerate_blocks(const ShiftPresentation& shift, const std::vector<Symbol>& symbols,
                             std::size_t len, Word& cur, std::vector<Word>& out) {
    if (cur.size() == len) {
        out.push_back(cur);
        return;
    }
    for (Symbol s : symbols) {
        if (!cur.empty() && !shift.has_edge(cur.back(), s)) continue;
        cur.push_back(s);
        enumerate_blocks(shift, symbols, len, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// Transfer graph of a finite symbol restriction under a local weight.
inline TransferGraph transfer_graph(const ShiftPresentation& shift,
                                    const std::vector<Symbol>& symbols, const LocalWeight& phi) {
    const std::size_t block = std::max(1, phi.depth - 1);
    TransferGraph g;
    Word cur;
    detail::enumerate_blocks(shift, symbols, block, cur, g.states);
    const std::size_t S = g.states.size();
    g.W.assign(S, std::vector<double>(S, 0.0));
    for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t j = 0; j < S; ++j) {
            const Word& u = g.states[i];
            const Word& v = g.states[j];
            bool overlap = true;
            for (std::size_t t = 0; t + 1 < block && overlap; ++t) overlap = u[t + 1] == v[t];
            if (!overlap || !shift.has_edge(u.back(), v.back())) continue;
            Word spelled = u;
            spelled.push_back(v.back());
            g.W[i][j] = std::exp(phi.value(spelled));
        }
    }
    return g;
}

struct PerronBounds {
    double log_lo = 0, log_hi = 0;
    std::vector<double> right;  // converged right eigenvector (normalized)

    double log_mid() const { return 0.5 * (log_lo + log_hi); }
    double width() const { return log_hi - log_lo; }
};

/// Certified leading eigenvalue of an irreducible nonnegative matrix.
inline PerronBounds perron_bounds(const std::vector<std::vector<double>>& W, double tol = 1e-13,
                                  std::size_t max_iters = 200000) {
    const std::size_t S = W.size();
    if (S == 0) throw NotIrreducible("empty transfer graph");
    // primitivity insurance: a diagonal shift moves every eigenvalue by c
    double max_row = 0;
    for (auto& row : W) {
        double sum = 0;
        for (double x : row) sum += x;
        max_row = std::max(max_row, sum);
    }
    if (max_row <= 0) throw NotIrreducible("transfer graph has no edges");
    const double c = 0.05 * max_row;
    std::vector<double> v(S, 1.0), wv(S, 0.0);
    double lo = 0, hi = 0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        lo = std::numeric_limits<double>::infinity();
        hi = 0;
        for (std::size_t i = 0; i < S; ++i) {
            double acc = c * v[i];
            for (std::size_t j = 0; j < S; ++j) acc += W[i][j] * v[j];
            wv[i] = acc;
            if (v[i] > 0) {
                const double ratio = acc / v[i];
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
        }
        double norm = 0;
        for (double x : wv) norm = std::max(norm, x);
        if (norm <= 0) throw NotIrreducible("transfer graph loses every state");
        for (std::size_t i = 0; i < S; ++i) v[i] = wv[i] / norm;
        if (lo > 0 && std::log(hi - c) - std::log(lo - c) < tol) break;
    }
    if (!(lo > c))
        throw NotIrreducible("power iteration found a vanishing ratio (graph not irreducible?)");
    PerronBounds b;
    b.log_lo = std::log(lo - c);
    b.log_hi = std::log(hi - c);
    b.right = v;
    return b;
}

/// Pressure (log leading eigenvalue) of the restriction of the shift to the
/// given symbols. Non-strongly-connected restrictions are handled by taking
/// the maximum over the strongly connected pieces.
inline PerronBounds restricted_pressure(const ShiftPresentation& shift,
                                        const std::vector<Symbol>& symbols,
                                        const LocalWeight& phi, double tol = 1e-13) {
    const auto g = transfer_graph(shift, symbols, phi);
    const std::size_t S = g.states.size();
    if (S == 0) throw NotIrreducible("no admissible blocks in the restriction");
    // strongly connected components by double DFS (Kosaraju)
    std::vector<std::size_t> order;
    std::vector<bool> seen(S, false);
    std::function<void(std::size_t)> dfs1 = [&](std::size_t u) {
        seen[u] = true;
        for (std::size_t w = 0; w < S; ++w)
            if (g.W[u][w] > 0 && !seen[w]) dfs1(w);
        order.push_back(u);
    };
    for (std::size_t u = 0; u < S; ++u)
        if (!seen[u]) dfs1(u);
    std::vector<int> comp(S, -1);
    int ncomp = 0;
    std::function<void(std::size_t, int)> dfs2 = [&](std::size_t u, int cid) {
        comp[u] = cid;
        for (std::size_t w = 0; w < S; ++w)
            if (g.W[w][u] > 0 && comp[w] < 0) dfs2(w, cid);
    };
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (comp[*it] < 0) dfs2(*it, ncomp++);

    PerronBounds best;
    bool found = false;
    for (int cid = 0; cid < ncomp; ++cid) {
        std::vector<std::size_t> members;
        for (std::size_t u = 0; u < S; ++u)
            if (comp[u] == cid) members.push_back(u);
        bool has_edge = false;
        std::vector<std::vector<double>> sub(members.size(),
                                             std::vector<double>(members.size(), 0.0));
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < members.size(); ++b) {
                sub[a][b] = g.W[members[a]][members[b]];
                has_edge = has_edge || sub[a][b] > 0;
            }
        if (!has_edge) continue;
        const auto pb = perron_bounds(sub, tol);
        if (!found || pb.log_mid() > best.log_mid()) {
            best = pb;
            found = true;
        }
    }
    if (!found) throw NotIrreducible("restriction has no cycles");
    return best;
}

struct EquilibriumResult {
    Measure measure;
    PerronBounds pressure;
    double free_energy = 0;  // h + integral(phi) of the constructed chain
};

/**
 * Equilibrium chain of a depth <= 2 potential on a finite-alphabet shift:
 * the stochasticization of the transfer matrix by its right eigenvector.
 * The identity h + integral(phi) = sum_u pi_u log(rowsum_u / r_u) is exact
 * for the returned chain, so the free energy sits inside the certified
 * eigenvalue bracket.
 */
inline EquilibriumResult equilibrium_finite(const ShiftPresentation& shift,
                                            const Potential& phi, double tol = 1e-13) {
    if (shift.kind() != ShiftPresentation::Kind::FiniteMatrix)
        throw NotIrreducible("equilibrium chains need a finite alphabet");
    if (phi.depth() > 2)
        throw PotentialDomainError("equilibrium chains are built for depth <= 2 potentials");
    const auto symbols = shift.matrix().alphabet;
    const auto g = transfer_graph(shift, symbols, LocalWeight::of(phi));
    const auto pb = perron_bounds(g.W, tol);
    const std::size_t S = symbols.size();

    // stochasticize with the converged right vector
    std::vector<std::vector<Scalar>> P(S, std::vector<Scalar>(S, Scalar(Rat(0))));
    std::vector<double> rowsum(S, 0.0);
    for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t j = 0; j < S; ++j) rowsum[i] += g.W[i][j] * pb.right[j];
        if (rowsum[i] <= 0) throw NotIrreducible("state with no outgoing weight");
        for (std::size_t j = 0; j < S; ++j)
            P[i][j] = Scalar::approx(g.W[i][j] * pb.right[j] / rowsum[i]);
    }
    // stationary vector: solve pi (P - I) = 0 with sum pi = 1
    std::vector<std::vector<double>> A(S, std::vector<double>(S + 1, 0.0));
    for (std::size_t j = 0; j < S; ++j)
        for (std::size_t i = 0; i < S; ++i) A[j][i] = P[i][j].value() - (i == j ? 1.0 : 0.0);
    for (std::size_t i = 0; i < S; ++i) A[0][i] = 1.0;
    A[0][S] = 1.0;
    for (std::size_t col = 0; col < S; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col; r < S; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (std::size_t r = 0; r < S; ++r) {
            if (r == col || A[r][col] == 0.0) continue;
            const double f = A[r][col] / A[col][col];
            for (std::size_t cc = col; cc <= S; ++cc) A[r][cc] -= f * A[col][cc];
        }
    }
    std::vector<Scalar> pi(S, Scalar(Rat(0)));
    for (std::size_t i = 0; i < S; ++i) pi[i] = Scalar::approx(A[i][S] / A[i][i]);

    EquilibriumResult out{Measure::finite_markov(shift, symbols, P, pi), pb, 0.0};
    for (std::size_t i = 0; i < S; ++i)
        out.free_energy += pi[i].value() * std::log(rowsum[i] / pb.right[i]);
    return out;
}

}  // namespace cms
