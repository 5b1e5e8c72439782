#pragma once

// The canonical constellation and the structure every feasible constellation
// shares: p unit vectors with v^a . v^b = 1 - 4 d(a,b) / p, built from p/2
// mutually orthogonal difference steps of norm sqrt(2/p).

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "relq/feasibility.hpp"
#include "relq/instance.hpp"
#include "relq/solution.hpp"

namespace relq {

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kSolverTolerance = 1e-9;

struct Constellation {
    int p = 2;
    int dim = 1;
    std::vector<double> data;  ///< p rows of length dim

    std::span<const double> vec(int k) const {
        return {data.data() + static_cast<std::size_t>(k) * dim, static_cast<std::size_t>(dim)};
    }
    std::span<double> vec(int k) {
        return {data.data() + static_cast<std::size_t>(k) * dim, static_cast<std::size_t>(dim)};
    }
};

/// v^k = v_p - 2 w_k for 0 <= k <= p/2, where v_p has every entry sqrt(2/p)
/// and w_k covers the first k coordinates; v^k = -v^{k-p/2} beyond.
inline Constellation canonical_constellation(int p) {
    if (p < 2 || p % 2 != 0) throw Error("canonical_constellation: p must be even and >= 2");
    const int half = p / 2;
    const double c = std::sqrt(2.0 / p);
    Constellation out{p, half, std::vector<double>(static_cast<std::size_t>(p) * half)};
    for (int k = 0; k <= half; ++k) {
        auto v = out.vec(k);
        for (int m = 0; m < half; ++m) v[m] = m < k ? -c : c;
    }
    for (int k = half + 1; k < p; ++k) {
        auto dst = out.vec(k);
        const auto src = out.vec(k - half);
        for (int m = 0; m < half; ++m) dst[m] = -src[m];
    }
    return out;
}

/// max over (a,b) of |v^a . v^b - (1 - 4 d(a,b)/p)|.
inline double gram_residual(const Constellation& c) {
    double worst = 0.0;
    for (int a = 0; a < c.p; ++a)
        for (int b = 0; b < c.p; ++b) {
            const double expect = 1.0 - 4.0 * circular_distance(a, b, c.p) / c.p;
            worst = std::max(worst, std::abs(dot(c.vec(a), c.vec(b)) - expect));
        }
    return worst;
}

/// Steps (v^k - v^{k-1}) / 2 for k = 1..p/2.
inline std::vector<std::vector<double>> difference_vectors(const Constellation& c,
                                                           double tol = kSolverTolerance) {
    if (gram_residual(c) > tol) throw Error("difference_vectors: constellation violates the Gram law");
    std::vector<std::vector<double>> out;
    out.reserve(c.p / 2);
    for (int k = 1; k <= c.p / 2; ++k) {
        std::vector<double> step(c.dim);
        const auto cur = c.vec(k);
        const auto prev = c.vec(k - 1);
        for (int m = 0; m < c.dim; ++m) step[m] = 0.5 * (cur[m] - prev[m]);
        out.push_back(std::move(step));
    }
    return out;
}

/// Constellation of variable i inside a (P) solution.
inline Constellation constellation_of(const SdpSolutionP& sol, int i) {
    Constellation out{sol.p(), sol.dim(), {}};
    out.data.reserve(static_cast<std::size_t>(sol.p()) * sol.dim());
    for (int k = 0; k < sol.p(); ++k) {
        const auto v = sol.v(i, k);
        out.data.insert(out.data.end(), v.begin(), v.end());
    }
    return out;
}

/// Replicates one constellation for n variables (an integral (P) solution in
/// which every variable sits at the same position).
inline SdpSolutionP replicate_constellation(const Constellation& c, int n) {
    SdpSolutionP sol(c.p, n, c.dim);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < c.p; ++k) {
            const auto src = c.vec(k);
            std::copy(src.begin(), src.end(), sol.vec(i, k).begin());
        }
    return sol;
}

/// Lifts a (P) solution on domain p to domain ell*p without re-solving.
///
/// Each difference step v_ik of each variable is split into ell orthogonal
/// sub-steps v_ik (x) e_m / sqrt(ell), and the anchor becomes v_i^0 (x) 1/sqrt(ell).
/// Coordinate (c, m) of the lifted space is stored at c*ell + m.
inline SdpSolutionP lift_solution(const SdpSolutionP& sol, int ell, double tol = 1e-6) {
    if (ell < 1) throw Error("lift_solution: ell must be >= 1");
    if (feasibility_report(sol).max_residual() > tol) throw Error("lift_solution: input is not (P)-feasible");
    const long long s_long = static_cast<long long>(sol.p()) * ell;
    const long long dim_long = static_cast<long long>(sol.dim()) * ell;
    if (s_long > (1LL << 30) || dim_long > (1LL << 30)) throw Error("lift_solution: lifted size overflows");
    const int s = static_cast<int>(s_long);
    const int dim = static_cast<int>(dim_long);
    const int base_dim = sol.dim();
    const int half = sol.p() / 2;
    const double inv_root = 1.0 / std::sqrt(static_cast<double>(ell));
    SdpSolutionP out(s, sol.n(), dim);
    for (int i = 0; i < sol.n(); ++i) {
        auto anchor = out.vec(i, 0);
        const auto v0 = sol.v(i, 0);
        for (int c = 0; c < base_dim; ++c)
            for (int m = 0; m < ell; ++m) anchor[static_cast<std::size_t>(c) * ell + m] = v0[c] * inv_root;
        int label = 0;
        for (int k = 1; k <= half; ++k) {
            const auto cur = sol.v(i, k);
            const auto prev = sol.v(i, k - 1);
            for (int m = 0; m < ell; ++m) {
                const auto from = out.vec(i, label);
                auto to = out.vec(i, label + 1);
                std::copy(from.begin(), from.end(), to.begin());
                for (int c = 0; c < base_dim; ++c)
                    to[static_cast<std::size_t>(c) * ell + m] += (cur[c] - prev[c]) * inv_root;
                ++label;
            }
        }
        for (int k = s / 2 + 1; k < s; ++k) {
            const auto src = out.vec(i, k - s / 2);
            auto dst = out.vec(i, k);
            for (int c = 0; c < dim; ++c) dst[c] = -src[c];
        }
    }
    return out;
}

}  // namespace relq
