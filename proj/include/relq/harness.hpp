#pragma once

// Experiments and their reports.
//
// A Report is a table of named cells, each an ordered list of numeric fields,
// plus run parameters and provenance. Every experiment is single-threaded
// with one random sub-stream per trial, so output is a pure function of
// (parameters, seed).

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relq/brownian.hpp"
#include "relq/constellation.hpp"
#include "relq/feasibility.hpp"
#include "relq/instance.hpp"
#include "relq/random.hpp"
#include "relq/rounding.hpp"
#include "relq/sdp.hpp"
#include "relq/solution.hpp"

namespace relq {

inline constexpr const char* kVersion = "0.1.0";

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Mean and standard error (sample standard deviation / sqrt(count)).
class RunningStats {
public:
    void add(double x) {
        sum_.add(x);
        squares_.add(x * x);
        ++count_;
    }
    long long count() const { return count_; }
    double mean() const { return count_ ? sum_.value() / static_cast<double>(count_) : 0.0; }
    double stderr_() const {
        if (count_ < 2) return 0.0;
        const double n = static_cast<double>(count_);
        const double var = std::max(0.0, (squares_.value() - n * mean() * mean()) / (n - 1.0));
        return std::sqrt(var / n);
    }

private:
    CompensatedSum sum_;
    CompensatedSum squares_;
    long long count_ = 0;
};

struct ReportCell {
    std::string name;
    std::vector<std::pair<std::string, double>> fields;

    double get(const std::string& key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return v;
        throw Error("report cell '" + name + "' has no field '" + key + "'");
    }
};

/// Cell with mean, stderr, count and a reference value (NaN when none).
inline ReportCell stat_cell(std::string name, const RunningStats& stats,
                            double reference = std::numeric_limits<double>::quiet_NaN()) {
    return {std::move(name),
            {{"mean", stats.mean()},
             {"stderr", stats.stderr_()},
             {"count", static_cast<double>(stats.count())},
             {"reference", reference}}};
}

struct Report {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<ReportCell> cells;
    std::vector<std::string> notes;
    std::uint64_t seed = 0;
    bool passed = true;  ///< false when an experiment-level assertion failed

    const ReportCell& cell(const std::string& name) const {
        for (const auto& c : cells)
            if (c.name == name) return c;
        throw Error("report '" + experiment + "' has no cell '" + name + "'");
    }

    template <class T>
    void param(std::string key, const T& value) {
        std::ostringstream os;
        if constexpr (std::is_floating_point_v<T>)
            os << format_double(value);
        else
            os << value;
        parameters.emplace_back(std::move(key), os.str());
    }
};

/// Number text for CSV/JSON cells; NaN is written as "nan".
inline std::string format_field(double x) { return std::isnan(x) ? std::string("nan") : format_double(x); }

/// CSV with header name,<fields of the first cell>. All cells share the field list.
inline void write_csv(std::ostream& os, const Report& rep) {
    os << "name";
    if (!rep.cells.empty())
        for (const auto& [k, v] : rep.cells.front().fields) os << ',' << k;
    os << '\n';
    for (const auto& c : rep.cells) {
        if (c.fields.size() != rep.cells.front().fields.size()) throw Error("write_csv: ragged report");
        os << c.name;
        for (const auto& [k, v] : c.fields) os << ',' << format_field(v);
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const Report& rep) {
    nlohmann::ordered_json j;
    j["experiment"] = rep.experiment;
    auto& params = j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.parameters) params[k] = v;
    auto& cells = j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.cells) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        for (const auto& [k, v] : c.fields) {
            if (std::isnan(v))
                cj[k] = nullptr;
            else
                cj[k] = v;
        }
        cells.push_back(std::move(cj));
    }
    j["notes"] = rep.notes;
    j["passed"] = rep.passed;
    j["provenance"] = {{"seed", rep.seed}, {"version", kVersion}, {"generator", "philox4x32-10"}};
    return j;
}

inline void write_json(std::ostream& os, const Report& rep) { os << to_json(rep).dump(2) << '\n'; }

/// Parses write_csv output back into cells.
inline std::vector<ReportCell> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error("parse error: empty CSV");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string field;
        std::istringstream ss(s);
        while (std::getline(ss, field, ',')) out.push_back(field);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    const auto header = split(line);
    if (header.empty() || header.front() != "name") throw Error("parse error: CSV header must start with 'name'");
    std::vector<ReportCell> cells;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size()) throw Error("parse error: CSV row width mismatch");
        ReportCell c{fields.front(), {}};
        for (std::size_t k = 1; k < fields.size(); ++k)
            c.fields.emplace_back(header[k], fields[k] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                                                : parse_double(fields[k]));
        cells.push_back(std::move(c));
    }
    return cells;
}

/// Number of alternating barrier runs in values[0..s/2], the half walk that
/// maps to a Brownian path on [0, 1]. At least one run means some threshold
/// was reached; three or more is the multiple-crossing event.
inline int alternating_barrier_runs(std::span<const double> values, double alpha) {
    const std::size_t half = values.size() / 2;
    int runs = 0, last = 0;
    for (std::size_t k = 0; k <= half; ++k) {
        const double v = values[k];
        const int label = v >= alpha ? 1 : (v <= -alpha ? -1 : 0);
        if (label != 0 && label != last) {
            ++runs;
            last = label;
        }
    }
    return runs;
}

/// Extreme-sign-change statistics of the canonical constellation's walk.
inline Report mc_sign_change(int s, long long trials, std::uint64_t seed, double alpha = 1.0) {
    if (s < 100 || s % 2 != 0) throw Error("mc_sign_change: s must be even and >= 100");
    if (trials < 1) throw Error("mc_sign_change: trials must be >= 1");
    RunningStats none, one, many, reached, three;
    std::vector<double> r(s / 2);
    for (long long t = 0; t < trials; ++t) {
        GaussianSampler g = RoundingStreams{seed, static_cast<std::uint64_t>(t)}.gaussian();
        g.fill(r);
        const WalkTrace trace = canonical_walk(s, r);
        const int ups = count_extreme_sign_changes(trace.values, alpha);
        const int runs = alternating_barrier_runs(trace.values, alpha);
        none.add(ups == 0);
        one.add(ups == 1);
        many.add(ups >= 2);
        reached.add(runs >= 1);
        three.add(runs >= 3);
    }
    const double at_least_one = prob_at_least_one();
    const double three_or_more = prob_three_or_more();
    Report rep;
    rep.experiment = "mc-signchange";
    rep.seed = seed;
    rep.param("s", s);
    rep.param("trials", trials);
    rep.param("alpha", alpha);
    rep.param("seed", seed);
    rep.cells = {stat_cell("p_none", none, 1.0 - at_least_one),
                 stat_cell("p_one", one, at_least_one - three_or_more),
                 stat_cell("p_two_or_more", many),
                 stat_cell("p_threshold_reached", reached, at_least_one),
                 stat_cell("p_three_or_more_barriers", three, three_or_more)};
    rep.notes.push_back("reference of p_one is the lower bound Pr[at least one] - Pr[three or more]");
    return rep;
}

/// E|x.r - y.r| for unit x, y at angle theta against 2 sqrt(2/pi) sin(theta/2).
inline Report mc_correlation_gap(const std::vector<double>& thetas, long long trials, std::uint64_t seed) {
    if (trials < 1) throw Error("mc_correlation_gap: trials must be >= 1");
    Report rep;
    rep.experiment = "mc-correlation";
    rep.seed = seed;
    rep.param("trials", trials);
    rep.param("seed", seed);
    for (double theta : thetas) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw Error("mc_correlation_gap: theta must lie in [0, pi]");
        const double cx = 1.0 - std::cos(theta);
        const double cy = -std::sin(theta);
        RunningStats gap;
        for (long long t = 0; t < trials; ++t) {
            GaussianSampler g(seed, derive_stream(kStreamTrial, static_cast<std::uint64_t>(t)));
            const double r0 = g.next();
            const double r1 = g.next();
            gap.add(theta == 0.0 ? 0.0 : std::abs(cx * r0 + cy * r1));
        }
        const double reference = 2.0 * std::numbers::sqrt2 / std::sqrt(std::numbers::pi) * std::sin(0.5 * theta);
        ReportCell c = stat_cell("theta=" + format_double(theta), gap, reference);
        c.fields.emplace_back("theta", theta);
        rep.cells.push_back(std::move(c));
    }
    return rep;
}

/// Two variables on domain s whose constellations are the canonical one and
/// cos(theta) times it plus sin(theta) times an orthogonal copy, in dimension s.
inline SdpSolutionP correlated_pair(int s, double theta) {
    const Constellation base = canonical_constellation(s);
    const int half = s / 2;
    SdpSolutionP sol(s, 2, s);
    const double c = std::cos(theta), sn = std::sin(theta);
    for (int k = 0; k < s; ++k) {
        const auto v = base.vec(k);
        auto vi = sol.vec(0, k);
        auto vj = sol.vec(1, k);
        for (int m = 0; m < half; ++m) {
            vi[m] = v[m];
            vj[m] = c * v[m];
            vj[half + m] = sn * v[m];
        }
    }
    return sol;
}

struct ConjectureConfig {
    std::vector<double> thetas;
    int s = 2000;
    long long trials = 100000;
    std::uint64_t seed = 1;
    double alpha = 1.0;
    int audit_anchors = 8;  ///< anchor labels visited by the pair feasibility audit
};

/// Conditioned on both variables making exactly one extreme sign change,
/// the circular distance of their positions divided by s, next to theta/(2 pi).
/// The walks come from the shared r = (r1, r2): walk_i = W(r1) and
/// walk_j = cos(theta) W(r1) + sin(theta) W(r2), which is exactly the walk of
/// correlated_pair under round_solution's draw.
inline Report conjecture_experiment(const ConjectureConfig& cfg) {
    if (cfg.s < 4 || cfg.s % 2 != 0) throw Error("conjecture_experiment: s must be even and >= 4");
    if (cfg.trials < 1) throw Error("conjecture_experiment: trials must be >= 1");
    Report rep;
    rep.experiment = "conjecture";
    rep.seed = cfg.seed;
    rep.param("s", cfg.s);
    rep.param("trials", cfg.trials);
    rep.param("alpha", cfg.alpha);
    rep.param("seed", cfg.seed);
    rep.param("audit_anchors", cfg.audit_anchors);

    std::vector<double> thetas;
    for (double theta : cfg.thetas) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw Error("conjecture_experiment: theta must lie in [0, pi]");
        const SdpSolutionP pair = correlated_pair(cfg.s, theta);
        const FeasibilityReport audit = feasibility_report(pair, nullptr, AuditScope{cfg.audit_anchors});
        const double anchor_dot = dot(pair.v(0, 0), pair.v(1, 0));
        if (audit.max_residual() > 1e-9 || std::abs(anchor_dot - std::cos(theta)) > 1e-9) {
            rep.notes.push_back("theta=" + format_double(theta) + " skipped: pair construction failed its audit");
            continue;
        }
        thetas.push_back(theta);
    }

    const int half = cfg.s / 2;
    std::vector<RunningStats> distance(thetas.size()), conditioned(thetas.size());
    std::vector<double> r(cfg.s);
    std::vector<double> mixed(cfg.s);
    for (long long t = 0; t < cfg.trials; ++t) {
        GaussianSampler g = RoundingStreams{cfg.seed, static_cast<std::uint64_t>(t)}.gaussian();
        g.fill(r);
        const WalkTrace wi = canonical_walk(cfg.s, std::span<const double>(r).first(half));
        const WalkTrace w2 = canonical_walk(cfg.s, std::span<const double>(r).subspan(half));
        const auto ups_i = detect_extreme_sign_changes(wi, cfg.alpha);
        for (std::size_t q = 0; q < thetas.size(); ++q) {
            const double c = std::cos(thetas[q]), sn = std::sin(thetas[q]);
            WalkTrace wj{cfg.s, std::vector<double>(cfg.s)};
            for (int k = 0; k < cfg.s; ++k) wj.values[k] = c * wi.values[k] + sn * w2.values[k];
            const auto ups_j = detect_extreme_sign_changes(wj, cfg.alpha);
            const bool both = ups_i.size() == 1 && ups_j.size() == 1;
            conditioned[q].add(both);
            if (both)
                distance[q].add(static_cast<double>(circular_distance(ups_i[0].t_plus, ups_j[0].t_plus, cfg.s)) /
                                cfg.s);
        }
    }
    for (std::size_t q = 0; q < thetas.size(); ++q) {
        ReportCell c = stat_cell("theta=" + format_double(thetas[q]), distance[q], thetas[q] / (2.0 * std::numbers::pi));
        c.fields.emplace_back("theta", thetas[q]);
        c.fields.emplace_back("conditioning_rate", conditioned[q].mean());
        rep.cells.push_back(std::move(c));
    }
    rep.notes.push_back("reference is the conjectured bound theta/(2 pi) on the mean normalized distance");
    return rep;
}

struct EndToEndConfig {
    SolverConfig solver;
    int ell = 1;
    long long trials = 1000;
    std::uint64_t seed = 1;
    double alpha = 1.0;
    double tolerance = 1e-3;  ///< slack on opt <= relaxation value
};

/// Solve, convert, optionally lift, round many times, and compare with the
/// brute-force optimum of the instance the positions live on.
inline Report end_to_end_ratio(const Instance& inst, const EndToEndConfig& cfg) {
    if (cfg.trials < 1) throw Error("end_to_end_ratio: trials must be >= 1");
    if (cfg.ell < 1) throw Error("end_to_end_ratio: ell must be >= 1");
    const Instance target = cfg.ell == 1 ? inst : scale_instance(inst, cfg.ell);
    const BruteForceResult opt = brute_force_optimum(target);
    const PPlusSolveResult solved = solve_p_plus(inst, cfg.solver);
    const SdpSolutionP relaxed = convert_to_p(solved.solution);
    const double relaxed_value = objective_p(relaxed, inst);

    RunningStats rounded, one_rate;
    for (long long t = 0; t < cfg.trials; ++t) {
        const RoundingStreams streams{cfg.seed, static_cast<std::uint64_t>(t)};
        const RoundingOutcome out = cfg.ell == 1 ? round_solution(relaxed, cfg.alpha, streams)
                                                 : round_lifted(relaxed, cfg.ell, cfg.alpha, streams);
        rounded.add(evaluate(target, Assignment{out.positions()}).total());
        long long ones = 0;
        for (const auto& pl : out.placements) ones += pl.status == CrossingStatus::OneCrossing;
        one_rate.add(static_cast<double>(ones) / inst.n());
    }

    Report rep;
    rep.experiment = "e2e";
    rep.seed = cfg.seed;
    rep.param("p", inst.p());
    rep.param("n", inst.n());
    rep.param("m", inst.equations().size());
    rep.param("ell", cfg.ell);
    rep.param("trials", cfg.trials);
    rep.param("alpha", cfg.alpha);
    rep.param("seed", cfg.seed);
    rep.param("solver_seed", cfg.solver.seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto scalar = [&](std::string name, double value) {
        return ReportCell{std::move(name), {{"mean", value}, {"stderr", 0.0}, {"count", 1.0}, {"reference", nan}}};
    };
    const double optimum = opt.value();
    rep.cells = {scalar("relaxation_value", solved.report.objective),
                 scalar("relaxation_value_converted", relaxed_value),
                 scalar("optimum", optimum),
                 stat_cell("rounded_value", rounded, optimum),
                 scalar("ratio_rounded_to_optimum", optimum != 0.0 ? rounded.mean() / optimum : nan),
                 scalar("ratio_rounded_to_relaxation",
                        solved.report.objective != 0.0 ? rounded.mean() / solved.report.objective : nan),
                 stat_cell("one_crossing_rate", one_rate),
                 scalar("solver_iterations", solved.report.iterations),
                 scalar("solver_converged", solved.report.converged ? 1.0 : 0.0),
                 scalar("solver_max_residual", solved.report.max_residual())};
    const bool upper = rounded.mean() <= optimum + 3.0 * rounded.stderr_() + 1e-12;
    const bool relaxation = optimum <= solved.report.objective + cfg.tolerance;
    if (!upper) rep.notes.push_back("mean rounded value exceeds the optimum by more than 3 stderr");
    if (!relaxation) rep.notes.push_back("relaxation value is below the optimum");
    if (!solved.report.converged) rep.notes.push_back("solver did not meet its tolerance; value is a feasible lower estimate");
    rep.passed = upper && relaxation;
    return rep;
}

/// The constants table as a report: quoted, computed, |delta| and whether the
/// row is held to 1e-4.
inline Report reproduce_constants() {
    Report rep;
    rep.experiment = "constants";
    const std::vector<ConstantRow> rows = constants_table();
    for (const ConstantRow& row : rows)
        rep.cells.push_back({row.name,
                             {{"quoted", row.quoted},
                              {"computed", row.computed},
                              {"delta", row.delta()},
                              {"checked", row.checked ? 1.0 : 0.0}}});
    for (const ConstantRow& row : rows)
        if (!row.checked) rep.notes.push_back(row.name + ": " + row.note);
    bool ok = true;
    for (const ConstantRow& row : rows)
        if (row.checked && row.delta() > 1e-4) ok = false;
    ok = ok && exact_one_lower_bound() >= 0.96;
    rep.passed = ok;
    return rep;
}

}  // namespace relq
