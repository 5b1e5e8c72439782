#pragma once

// Constraint residuals for both relaxations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "relq/instance.hpp"
#include "relq/solution.hpp"

namespace relq {

struct ConstraintResidual {
    std::string family;
    double max_residual = 0.0;
};

struct FeasibilityReport {
    std::vector<ConstraintResidual> residuals;
    double objective = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = true;

    double max_residual() const {
        double worst = 0.0;
        for (const auto& r : residuals) worst = std::max(worst, r.max_residual);
        return worst;
    }

    double residual(const std::string& family) const {
        for (const auto& r : residuals)
            if (r.family == family) return r.max_residual;
        throw Error("feasibility report: unknown constraint family '" + family + "'");
    }
};

/// Which anchor labels a residual scan visits. Solutions with thousands of
/// labels per variable are audited on an evenly spaced subset of anchor rows
/// (every column is still checked against each visited row).
struct AuditScope {
    int max_anchor_labels = 0;  ///< 0 visits every label

    std::vector<int> anchors(int p) const {
        std::vector<int> out;
        if (max_anchor_labels <= 0 || max_anchor_labels >= p) {
            for (int a = 0; a < p; ++a) out.push_back(a);
            return out;
        }
        for (int t = 0; t < max_anchor_labels; ++t)
            out.push_back(static_cast<int>((static_cast<long long>(t) * p) / max_anchor_labels));
        return out;
    }
};

/// (P) objective: sum over equations of (1 + v_i^0 . v_j^d) / 2.
inline double objective_p(const SdpSolutionP& sol, const Instance& inst) {
    if (sol.p() != inst.p() || sol.n() != inst.n()) throw Error("objective_p: dimension mismatch");
    double total = 0.0;
    for (const Equation& e : inst.equations()) total += 0.5 * (1.0 + dot(sol.v(e.i, 0), sol.v(e.j, e.d)));
    return total;
}

/// (P+) objective sum_E sum_k (p - 2 d(k, d_ij)) u_i0 . u_jk, which on integral
/// points equals the evaluate() total directly.
inline double objective_p_plus(const SdpSolutionPPlus& sol, const Instance& inst) {
    if (sol.p() != inst.p() || sol.n() != inst.n()) throw Error("objective_p_plus: dimension mismatch");
    const int p = sol.p();
    double total = 0.0;
    for (const Equation& e : inst.equations())
        for (int k = 0; k < p; ++k)
            total += (p - 2.0 * circular_distance(k, e.d, p)) * dot(sol.u(e.i, 0), sol.u(e.j, k));
    return total;
}

/// Residuals of constraint families (2) per-variable Gram law, (3) shift
/// covariance, and (4) unit norm.
inline FeasibilityReport feasibility_report(const SdpSolutionP& sol, const Instance* inst = nullptr,
                                            AuditScope scope = {}) {
    const int p = sol.p();
    const int n = sol.n();
    double gram_law = 0.0, shift = 0.0, unit = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < p; ++k) unit = std::max(unit, std::abs(dot(sol.v(i, k), sol.v(i, k)) - 1.0));
    for (int a : scope.anchors(p)) {
        for (int i = 0; i < n; ++i) {
            for (int b = 0; b < p; ++b) {
                const double expect = 1.0 - 4.0 * circular_distance(a, b, p) / p;
                gram_law = std::max(gram_law, std::abs(dot(sol.v(i, a), sol.v(i, b)) - expect));
            }
            for (int j = 0; j < n; ++j)
                for (int b = 0; b < p; ++b) {
                    const double here = dot(sol.v(i, a), sol.v(j, b));
                    const double base = dot(sol.v(i, 0), sol.v(j, mod(static_cast<long long>(b) - a, p)));
                    shift = std::max(shift, std::abs(here - base));
                }
        }
    }
    FeasibilityReport rep;
    rep.residuals = {{"constellation", gram_law}, {"shift", shift}, {"unit", unit}};
    if (inst != nullptr) rep.objective = objective_p(sol, *inst);
    return rep;
}

/// Residuals of the (P+) families: nonnegativity, orthogonality within a
/// variable, shift covariance, norm 1/p, and equal label sums across variables.
inline FeasibilityReport feasibility_report(const SdpSolutionPPlus& sol, const Instance* inst = nullptr) {
    const int p = sol.p();
    const int n = sol.n();
    const Matrix g = sol.gram();
    auto at = [&](int i, int h, int j, int k) { return g(sol.row_index(i, h), sol.row_index(j, k)); };
    double nonneg = 0.0, ortho = 0.0, shift = 0.0, norm = 0.0, sums = 0.0;
    for (int i = 0; i < n; ++i)
        for (int h = 0; h < p; ++h) {
            norm = std::max(norm, std::abs(at(i, h, i, h) - 1.0 / p));
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < p; ++k) {
                    const double x = at(i, h, j, k);
                    nonneg = std::max(nonneg, -x);
                    if (i == j && h != k) ortho = std::max(ortho, std::abs(x));
                    shift = std::max(shift, std::abs(x - at(i, 0, j, mod(static_cast<long long>(k) - h, p))));
                }
        }
    // |S_i - S_j|^2 from Gram block sums
    std::vector<double> block(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int h = 0; h < p; ++h)
                for (int k = 0; k < p; ++k) acc += at(i, h, j, k);
            block[static_cast<std::size_t>(i) * n + j] = acc;
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d2 = block[static_cast<std::size_t>(i) * n + i] + block[static_cast<std::size_t>(j) * n + j] -
                              2.0 * block[static_cast<std::size_t>(i) * n + j];
            sums = std::max(sums, std::abs(d2));
        }
    FeasibilityReport rep;
    rep.residuals = {{"nonneg", nonneg}, {"orthogonal", ortho}, {"shift", shift}, {"norm", norm}, {"sum", sums}};
    if (inst != nullptr) rep.objective = objective_p_plus(sol, *inst);
    return rep;
}

}  // namespace relq
