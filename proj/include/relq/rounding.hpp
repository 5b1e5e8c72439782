#pragma once

// Threshold rounding of constellation solutions.
//
// One Gaussian vector r is shared by all variables. Each variable's
// constellation projected onto r gives a circular walk values[k] = v^k . r;
// the variable is placed where the walk makes its unique extreme sign change,
// the first index at or above +alpha after the walk left -alpha.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "relq/constellation.hpp"
#include "relq/feasibility.hpp"
#include "relq/instance.hpp"
#include "relq/random.hpp"
#include "relq/solution.hpp"

namespace relq {

struct WalkTrace {
    int s = 0;
    std::vector<double> values;

    double anchor() const { return values.front(); }
};

enum class CrossingDirection { Up, Down };

struct CrossingEvent {
    int t_minus = 0;  ///< last index of the run at or below -alpha
    int t_plus = 0;   ///< first index of the run at or above +alpha
    CrossingDirection direction = CrossingDirection::Up;
};

enum class CrossingStatus { OneCrossing, NoCrossing, ManyCrossings };

inline const char* status_name(CrossingStatus status) {
    switch (status) {
        case CrossingStatus::OneCrossing: return "one";
        case CrossingStatus::NoCrossing: return "none";
        case CrossingStatus::ManyCrossings: return "many";
    }
    return "?";
}

struct VariablePlacement {
    int position = 0;
    CrossingStatus status = CrossingStatus::NoCrossing;
    int crossings = 0;       ///< number of up-crossings found
    int crossing_index = -1; ///< t_plus of the unique crossing, else -1

    friend bool operator==(const VariablePlacement&, const VariablePlacement&) = default;
};

struct RoundingOutcome {
    std::vector<VariablePlacement> placements;

    std::vector<int> positions() const {
        std::vector<int> out;
        out.reserve(placements.size());
        for (const auto& pl : placements) out.push_back(pl.position);
        return out;
    }

    friend bool operator==(const RoundingOutcome&, const RoundingOutcome&) = default;
};

/// Direct dot products v^k . r.
inline WalkTrace compute_walk(const Constellation& c, std::span<const double> r) {
    if (r.size() != static_cast<std::size_t>(c.dim)) throw Error("compute_walk: r has the wrong dimension");
    WalkTrace out{c.p, std::vector<double>(c.p)};
    for (int k = 0; k < c.p; ++k) out.values[k] = dot(c.vec(k), r);
    return out;
}

/// The canonical constellation's walk from prefix sums in O(s): r has length
/// s/2, values[0] = sqrt(2/s) * sum(r), and each label flips one coordinate.
inline WalkTrace canonical_walk(int s, std::span<const double> r) {
    if (s < 2 || s % 2 != 0) throw Error("canonical_walk: s must be even and >= 2");
    const int half = s / 2;
    if (r.size() != static_cast<std::size_t>(half)) throw Error("canonical_walk: r must have length s/2");
    const double c = std::sqrt(2.0 / s);
    WalkTrace out{s, std::vector<double>(s)};
    double total = 0.0;
    for (double x : r) total += x;
    const double a = c * total;
    double prefix = 0.0;
    out.values[0] = a;
    for (int k = 1; k <= half; ++k) {
        prefix += r[k - 1];
        out.values[k] = a - 2.0 * c * prefix;
    }
    for (int k = half + 1; k < s; ++k) out.values[k] = -out.values[k - half];
    return out;
}

/// All extreme sign changes in both directions, in circular index order of t_plus
/// (up) or t_minus (down).
inline std::vector<CrossingEvent> detect_crossings(const WalkTrace& trace, double alpha) {
    if (!(alpha > 0.0)) throw Error("detect_crossings: alpha must be positive");
    const int s = static_cast<int>(trace.values.size());
    // labelled indices in circular order: +1 at or above alpha, -1 at or below -alpha
    std::vector<int> idx;
    std::vector<int> sign;
    for (int k = 0; k < s; ++k) {
        const double v = trace.values[k];
        if (v >= alpha) {
            idx.push_back(k);
            sign.push_back(1);
        } else if (v <= -alpha) {
            idx.push_back(k);
            sign.push_back(-1);
        }
    }
    std::vector<CrossingEvent> out;
    const std::size_t m = idx.size();
    for (std::size_t q = 0; q < m; ++q) {
        const std::size_t next = (q + 1) % m;
        if (sign[q] == sign[next]) continue;
        if (sign[q] < 0)
            out.push_back({idx[q], idx[next], CrossingDirection::Up});
        else
            out.push_back({idx[next], idx[q], CrossingDirection::Down});
    }
    return out;
}

/// Up-crossings only: a run at or below -alpha followed by a run at or above
/// +alpha with nothing labelled in between.
inline std::vector<CrossingEvent> detect_extreme_sign_changes(const WalkTrace& trace, double alpha) {
    std::vector<CrossingEvent> out;
    for (const CrossingEvent& e : detect_crossings(trace, alpha))
        if (e.direction == CrossingDirection::Up) out.push_back(e);
    return out;
}

/// Number of up-crossings without materializing events.
inline int count_extreme_sign_changes(std::span<const double> values, double alpha) {
    int first = 0, last = 0, count = 0;
    for (double v : values) {
        const int label = v >= alpha ? 1 : (v <= -alpha ? -1 : 0);
        if (label == 0) continue;
        if (first == 0) first = label;
        if (last == -1 && label == 1) ++count;
        last = label;
    }
    if (last == -1 && first == 1) ++count;
    return count;
}

inline VariablePlacement assign_position(const WalkTrace& trace, double alpha, CounterRng& fallback) {
    const auto ups = detect_extreme_sign_changes(trace, alpha);
    VariablePlacement out;
    out.crossings = static_cast<int>(ups.size());
    if (ups.size() == 1) {
        out.status = CrossingStatus::OneCrossing;
        out.position = ups.front().t_plus;
        out.crossing_index = ups.front().t_plus;
        return out;
    }
    out.status = ups.empty() ? CrossingStatus::NoCrossing : CrossingStatus::ManyCrossings;
    out.position = static_cast<int>(fallback.uniform_below(static_cast<std::uint64_t>(trace.values.size())));
    return out;
}

/// Random streams of one rounding run. `trial` separates repeated runs under
/// one seed; fallback draws use a sub-stream per variable.
struct RoundingStreams {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;

    GaussianSampler gaussian() const { return {seed, derive_stream(kStreamGaussian, trial)}; }
    CounterRng fallback(int variable) const {
        return {seed, derive_stream(derive_stream(kStreamFallback, trial), static_cast<std::uint64_t>(variable))};
    }
};

namespace detail {

inline RoundingOutcome place_all(const std::vector<WalkTrace>& traces, double alpha, const RoundingStreams& streams) {
    RoundingOutcome out;
    out.placements.reserve(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        CounterRng fallback = streams.fallback(static_cast<int>(i));
        out.placements.push_back(assign_position(traces[i], alpha, fallback));
    }
    return out;
}

}  // namespace detail

/// Walks of every variable for one shared r of length sol.dim().
inline std::vector<WalkTrace> solution_walks(const SdpSolutionP& sol, std::span<const double> r) {
    if (r.size() != static_cast<std::size_t>(sol.dim())) throw Error("solution_walks: r has the wrong dimension");
    std::vector<WalkTrace> out;
    out.reserve(sol.n());
    for (int i = 0; i < sol.n(); ++i) {
        WalkTrace t{sol.p(), std::vector<double>(sol.p())};
        for (int k = 0; k < sol.p(); ++k) t.values[k] = dot(sol.v(i, k), r);
        out.push_back(std::move(t));
    }
    return out;
}

/// Full rounding of a (P) solution. Feasibility is audited on `scope` anchors.
inline RoundingOutcome round_solution(const SdpSolutionP& sol, double alpha, const RoundingStreams& streams,
                                      AuditScope scope = {}, double tol = 1e-5) {
    if (!(alpha > 0.0)) throw Error("round_solution: alpha must be positive");
    if (feasibility_report(sol, nullptr, scope).max_residual() > tol)
        throw Error("round_solution: solution is not (P)-feasible");
    GaussianSampler g = streams.gaussian();
    const std::vector<double> r = sample_gaussian(g, static_cast<std::size_t>(sol.dim()));
    return detail::place_all(solution_walks(sol, r), alpha, streams);
}

/// Walks of lift_solution(sol, ell) for the shared r of the lifted space,
/// computed without materializing the lift: the anchor projects onto the
/// per-block sums of r, and sub-step m of difference step k adds
/// (v^k - v^{k-1}) . r[:, m] / sqrt(ell).
inline std::vector<WalkTrace> lifted_walks(const SdpSolutionP& sol, int ell, std::span<const double> r) {
    const int base_dim = sol.dim();
    const std::size_t lifted_dim = static_cast<std::size_t>(base_dim) * ell;
    if (ell < 1) throw Error("lifted_walks: ell must be >= 1");
    if (r.size() != lifted_dim) throw Error("lifted_walks: r has the wrong dimension");
    const int s = sol.p() * ell;
    const int half = sol.p() / 2;
    const double inv_root = 1.0 / std::sqrt(static_cast<double>(ell));
    std::vector<double> block_sum(base_dim, 0.0);
    for (int c = 0; c < base_dim; ++c)
        for (int m = 0; m < ell; ++m) block_sum[c] += r[static_cast<std::size_t>(c) * ell + m];

    std::vector<WalkTrace> out;
    out.reserve(sol.n());
    std::vector<double> step(base_dim);
    for (int i = 0; i < sol.n(); ++i) {
        WalkTrace t{s, std::vector<double>(s)};
        double value = dot(sol.v(i, 0), block_sum) * inv_root;
        t.values[0] = value;
        int label = 0;
        for (int k = 1; k <= half; ++k) {
            const auto cur = sol.v(i, k);
            const auto prev = sol.v(i, k - 1);
            for (int c = 0; c < base_dim; ++c) step[c] = (cur[c] - prev[c]) * inv_root;
            for (int m = 0; m < ell; ++m) {
                double inc = 0.0;
                for (int c = 0; c < base_dim; ++c) inc += step[c] * r[static_cast<std::size_t>(c) * ell + m];
                value += inc;
                t.values[++label] = value;
            }
        }
        for (int k = s / 2 + 1; k < s; ++k) t.values[k] = -t.values[k - s / 2];
        out.push_back(std::move(t));
    }
    return out;
}

/// Same distribution and streams as round_solution(lift_solution(sol, ell), ...).
inline RoundingOutcome round_lifted(const SdpSolutionP& sol, int ell, double alpha, const RoundingStreams& streams,
                                    double tol = 1e-5) {
    if (!(alpha > 0.0)) throw Error("round_lifted: alpha must be positive");
    if (feasibility_report(sol).max_residual() > tol) throw Error("round_lifted: solution is not (P)-feasible");
    GaussianSampler g = streams.gaussian();
    const std::vector<double> r = sample_gaussian(g, static_cast<std::size_t>(sol.dim()) * ell);
    return detail::place_all(lifted_walks(sol, ell, r), alpha, streams);
}

/// CSV dump of traces: variable,k,value,label with label '+', '-' or empty.
inline void write_walk_csv(std::ostream& os, const std::vector<WalkTrace>& traces, double alpha) {
    os << "variable,k,value,label\n";
    for (std::size_t i = 0; i < traces.size(); ++i)
        for (std::size_t k = 0; k < traces[i].values.size(); ++k) {
            const double v = traces[i].values[k];
            os << i << ',' << k << ',' << format_double(v) << ',' << (v >= alpha ? "+" : (v <= -alpha ? "-" : ""))
               << '\n';
        }
}

}  // namespace relq
