#pragma once

// The assignment-constraint relaxation (P+): integral witnesses, an iterative
// solver, and the conversion of its solutions into constellation form (P).
//
// Solver layout. Write G for the pn x pn Gram matrix of the u_ih. All linear
// constraints of (P+) together with nonnegativity say:
//   * diagonal blocks G_ii = I/p;
//   * each off-diagonal block G_ij is circulant, G_ij[h][k] = g_ij(k - h),
//     with g_ij >= 0 and sum_c g_ij(c) = 1/p (the label-sum constraint).
// Projection onto that set is closed form: average along circulant diagonals,
// then project each g_ij onto the scaled simplex. The solver alternates a
// gradient step on the linear objective plus that projection with a
// projection onto the PSD cone (eigen-clipping), coupled by a scaled dual
// variable (ADMM). Iterates of the affine side are periodically made exactly
// feasible by blending toward the uniform point g_ij = 1/p^2, which is PSD
// with slack 1/p on every non-constant Fourier mode.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "relq/feasibility.hpp"
#include "relq/instance.hpp"
#include "relq/linalg.hpp"
#include "relq/random.hpp"
#include "relq/solution.hpp"

namespace relq {

/// u_ih = e_{(x_i - h) mod p} / sqrt(p). Then u_i0 . u_jk = 1/p exactly when
/// k = x_j - x_i, which is the label the objective scores against d_ij.
inline SdpSolutionPPlus integral_embedding(const Instance& inst, const Assignment& asg) {
    check_assignment(inst, asg);
    const int p = inst.p();
    const double entry = 1.0 / std::sqrt(static_cast<double>(p));
    SdpSolutionPPlus sol(p, inst.n(), p);
    for (int i = 0; i < inst.n(); ++i)
        for (int h = 0; h < p; ++h) sol.vec(i, h)[mod(static_cast<long long>(asg.positions[i]) - h, p)] = entry;
    return sol;
}

/// v_i^k = sum_{h=k}^{k+p/2-1} u_ih - sum_{h=k+p/2}^{k+p-1} u_ih (labels mod p).
inline SdpSolutionP convert_to_p(const SdpSolutionPPlus& sol, double tol = 1e-5) {
    if (feasibility_report(sol).max_residual() > tol) throw Error("convert_to_p: input is not (P+)-feasible");
    const int p = sol.p();
    SdpSolutionP out(p, sol.n(), sol.dim());
    for (int i = 0; i < sol.n(); ++i)
        for (int k = 0; k < p; ++k) {
            auto v = out.vec(i, k);
            for (int off = 0; off < p; ++off) {
                const double sign = off < p / 2 ? 1.0 : -1.0;
                const auto u = sol.u(i, mod(static_cast<long long>(k) + off, p));
                for (int c = 0; c < sol.dim(); ++c) v[c] += sign * u[c];
            }
        }
    return out;
}

struct SolverConfig {
    int max_iterations = 20000;
    double initial_step = 1.0;         ///< gradient step on the objective (inverse ADMM penalty)
    int step_adapt_interval = 25;      ///< iterations between step rebalancing
    double step_adapt_ratio = 10.0;    ///< primal/dual residual imbalance that triggers rebalancing
    double psd_tolerance = 1e-15;      ///< relative off-diagonal tolerance of the eigensolver
    double constraint_tolerance = 1e-9;
    int polish_interval = 10;          ///< cycles between exact-feasibility checkpoints
    std::uint64_t seed = 0;            ///< 0 starts at the uniform point; otherwise a seeded perturbation of it
};

struct PPlusSolveResult {
    SdpSolutionPPlus solution;
    FeasibilityReport report;
    /// Best exactly-feasible objective known after each cycle.
    std::vector<double> objective_history;
};

namespace detail {

/// Euclidean projection of y onto {g >= 0, sum g = total}.
inline void project_simplex(std::vector<double>& y, double total) {
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0, threshold = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double t = (cumulative - total) / static_cast<double>(k + 1);
        if (sorted[k] - t > 0.0) threshold = t;
    }
    for (double& x : y) x = std::max(x - threshold, 0.0);
}

class PPlusGeometry {
public:
    PPlusGeometry(int p, int n) : p_(p), n_(n), size_(static_cast<std::size_t>(p) * n) {}

    std::size_t size() const { return size_; }

    /// Frobenius projection onto the linear constraints plus nonnegativity.
    Matrix project_affine(const Matrix& y) const {
        Matrix x(size_, size_);
        std::vector<double> g(p_);
        for (int i = 0; i < n_; ++i) {
            for (int h = 0; h < p_; ++h) x(idx(i, h), idx(i, h)) = 1.0 / p_;
            for (int j = i + 1; j < n_; ++j) {
                for (int c = 0; c < p_; ++c) {
                    double acc = 0.0;
                    for (int h = 0; h < p_; ++h) {
                        const int k = (h + c) % p_;
                        acc += y(idx(i, h), idx(j, k)) + y(idx(j, k), idx(i, h));
                    }
                    g[c] = acc / (2.0 * p_);
                }
                project_simplex(g, 1.0 / p_);
                write_block(x, i, j, g);
            }
        }
        return x;
    }

    /// g_ij(c) = 1/p^2 for every pair.
    Matrix uniform_point() const {
        Matrix x(size_, size_);
        const std::vector<double> g(p_, 1.0 / (static_cast<double>(p_) * p_));
        for (int i = 0; i < n_; ++i) {
            for (int h = 0; h < p_; ++h) x(idx(i, h), idx(i, h)) = 1.0 / p_;
            for (int j = i + 1; j < n_; ++j) write_block(x, i, j, g);
        }
        return x;
    }

    /// Objective as a Frobenius inner product <C, G>, with C spread evenly over
    /// the circulant diagonals and both triangles.
    Matrix objective_matrix(const Instance& inst) const {
        Matrix c(size_, size_);
        for (const Equation& e : inst.equations())
            for (int h = 0; h < p_; ++h)
                for (int k = 0; k < p_; ++k) {
                    const double w = 0.5 * (p_ - 2.0 * circular_distance(k, e.d, p_)) / p_;
                    const std::size_t r = idx(e.i, h);
                    const std::size_t col = idx(e.j, (h + k) % p_);
                    c(r, col) += w;
                    c(col, r) += w;
                }
        return c;
    }

private:
    std::size_t idx(int i, int h) const { return static_cast<std::size_t>(i) * p_ + h; }

    void write_block(Matrix& x, int i, int j, const std::vector<double>& g) const {
        for (int h = 0; h < p_; ++h)
            for (int c = 0; c < p_; ++c) {
                const int k = (h + c) % p_;
                x(idx(i, h), idx(j, k)) = g[c];
                x(idx(j, k), idx(i, h)) = g[c];
            }
    }

    int p_;
    int n_;
    std::size_t size_;
};

inline double frobenius_inner(const Matrix& a, const Matrix& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) acc += a.data()[k] * b.data()[k];
    return acc;
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        const double d = a.data()[k] - b.data()[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

/// Makes an affine-feasible G exactly PSD by moving toward the uniform point
/// just far enough to cancel its most negative eigenvalue.
inline Matrix blend_to_feasible(const Matrix& g, const Matrix& uniform, int p, Matrix* basis) {
    const EigenDecomposition eig = jacobi_eigen(g, basis);
    if (basis != nullptr) *basis = eig.vectors;
    const double deficit = std::max(0.0, -eig.values.front());
    if (deficit == 0.0) return g;
    const double margin = p * (deficit + 1e-13);
    const double weight = margin / (1.0 + margin);
    Matrix out = g;
    for (std::size_t k = 0; k < out.data().size(); ++k)
        out.data()[k] = (1.0 - weight) * g.data()[k] + weight * uniform.data()[k];
    return out;
}

}  // namespace detail

inline constexpr int kMaxSolverSize = 1000;

/// Approximately maximizes the (P+) objective. Non-convergence is reported in
/// the result, not thrown; the returned vectors are feasible regardless.
inline PPlusSolveResult solve_p_plus(const Instance& inst, const SolverConfig& cfg = {}) {
    const int p = inst.p();
    const int n = inst.n();
    if (static_cast<long long>(p) * n > kMaxSolverSize) throw Error("solve_p_plus: p*n exceeds 1000");
    if (cfg.initial_step <= 0.0) throw Error("solve_p_plus: step must be positive");

    const detail::PPlusGeometry geom(p, n);
    const std::size_t size = geom.size();
    const Matrix objective = geom.objective_matrix(inst);
    const Matrix uniform = geom.uniform_point();

    Matrix z = uniform;
    if (cfg.seed != 0) {
        GaussianSampler noise(cfg.seed, kStreamTrial);
        for (std::size_t r = 0; r < size; ++r)
            for (std::size_t c = r + 1; c < size; ++c) {
                const double x = 0.1 / p * noise.next();
                z(r, c) += x;
                z(c, r) += x;
            }
        z = geom.project_affine(z);
    }
    Matrix dual(size, size);
    Matrix x = z;
    Matrix basis = Matrix::identity(size);
    Matrix polish_basis = Matrix::identity(size);
    double penalty = 1.0 / cfg.initial_step;

    Matrix incumbent = uniform;
    double incumbent_value = detail::frobenius_inner(objective, uniform);
    auto checkpoint = [&](const Matrix& candidate_affine) {
        Matrix candidate = detail::blend_to_feasible(candidate_affine, uniform, p, &polish_basis);
        const double value = detail::frobenius_inner(objective, candidate);
        if (value > incumbent_value) {
            incumbent_value = value;
            incumbent = std::move(candidate);
        }
    };

    PPlusSolveResult result;
    bool converged = false;
    int iterations = 0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        iterations = it;
        Matrix step = z;
        for (std::size_t k = 0; k < step.data().size(); ++k)
            step.data()[k] += objective.data()[k] / penalty - dual.data()[k];
        x = geom.project_affine(step);

        Matrix shifted = x;
        for (std::size_t k = 0; k < shifted.data().size(); ++k) shifted.data()[k] += dual.data()[k];
        const EigenDecomposition eig = jacobi_eigen(shifted, &basis, cfg.psd_tolerance);
        basis = eig.vectors;
        Matrix z_next = reconstruct_clipped(eig);

        const double primal = detail::frobenius_distance(x, z_next);
        const double dual_res = penalty * detail::frobenius_distance(z_next, z);
        for (std::size_t k = 0; k < dual.data().size(); ++k) dual.data()[k] += x.data()[k] - z_next.data()[k];
        z = std::move(z_next);

        if (it % cfg.polish_interval == 0) checkpoint(x);
        result.objective_history.push_back(incumbent_value);

        if (primal < cfg.constraint_tolerance && dual_res < cfg.constraint_tolerance) {
            converged = true;
            break;
        }
        if (it % cfg.step_adapt_interval == 0) {
            if (primal > cfg.step_adapt_ratio * dual_res) {
                penalty *= 2.0;
                for (double& u : dual.data()) u *= 0.5;
            } else if (dual_res > cfg.step_adapt_ratio * primal) {
                penalty *= 0.5;
                for (double& u : dual.data()) u *= 2.0;
            }
        }
    }
    checkpoint(x);
    if (result.objective_history.empty() || result.objective_history.back() != incumbent_value)
        result.objective_history.push_back(incumbent_value);

    const Matrix factor = factor_gram(incumbent);
    SdpSolutionPPlus sol(p, n, static_cast<int>(factor.cols()));
    sol.data() = factor.data();
    result.report = feasibility_report(sol, &inst);
    result.report.iterations = iterations;
    result.report.converged = converged;
    result.solution = std::move(sol);
    return result;
}

}  // namespace relq
