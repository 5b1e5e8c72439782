#pragma once

// Relaxed linear equations mod p: the problem model.
//
// An instance is a list of difference equations x_j - x_i = d (mod p). An
// assignment places every variable at a position in [0, p); each equation
// scores 1 - 2y/p where y is the circular slack between x_j - x_i and d.
// Scores are kept as integer numerators over p so that comparisons are exact.

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "relq/random.hpp"

namespace relq {

/// Contract or format violation.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Equation {
    int i = 0;
    int j = 0;
    int d = 0;

    friend bool operator==(const Equation&, const Equation&) = default;
};

class Instance {
public:
    Instance(int p, int n, std::vector<Equation> equations)
        : p_(p), n_(n), equations_(std::move(equations)) {
        if (p < 2 || p % 2 != 0) throw Error("instance: p must be an even integer >= 2");
        if (n < 1) throw Error("instance: n must be >= 1");
        for (const Equation& e : equations_) {
            if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
                throw Error("instance: variable index out of range");
            if (e.i == e.j) throw Error("instance: self-loop equation");
            if (e.d < 0 || e.d >= p) throw Error("instance: d out of [0,p)");
        }
    }

    int p() const { return p_; }
    int n() const { return n_; }
    std::size_t m() const { return equations_.size(); }
    const std::vector<Equation>& equations() const { return equations_; }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    int p_;
    int n_;
    std::vector<Equation> equations_;
};

struct Assignment {
    std::vector<int> positions;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct EquationTerm {
    std::size_t index = 0;
    int slack = 0;     ///< circular slack y in [0, p/2]
    double term = 0.0; ///< 1 - 2y/p
};

struct EvalBreakdown {
    int p = 2;
    std::int64_t numerator = 0;  ///< total = numerator / p
    std::vector<EquationTerm> per_equation;

    double total() const { return static_cast<double>(numerator) / p; }
};

inline int mod(long long a, int p) {
    const long long r = a % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

/// Arc distance between positions a and b on the p-cycle.
inline int circular_distance(int a, int b, int p) {
    if (p < 1) throw Error("circular_distance: p must be positive");
    if (a < 0 || a >= p || b < 0 || b >= p) throw Error("circular_distance: argument outside [0,p)");
    const int forward = mod(static_cast<long long>(b) - a, p);
    return forward < p - forward ? forward : p - forward;
}

inline void check_assignment(const Instance& inst, const Assignment& asg) {
    if (static_cast<int>(asg.positions.size()) != inst.n())
        throw Error("assignment: length does not match instance");
    for (int x : asg.positions)
        if (x < 0 || x >= inst.p()) throw Error("assignment: position outside [0,p)");
}

inline EvalBreakdown evaluate(const Instance& inst, const Assignment& asg) {
    check_assignment(inst, asg);
    const int p = inst.p();
    EvalBreakdown out;
    out.p = p;
    out.per_equation.reserve(inst.m());
    for (std::size_t idx = 0; idx < inst.m(); ++idx) {
        const Equation& e = inst.equations()[idx];
        const int diff = mod(static_cast<long long>(asg.positions[e.j]) - asg.positions[e.i], p);
        const int y = circular_distance(diff, e.d, p);
        out.numerator += p - 2 * y;
        out.per_equation.push_back({idx, y, 1.0 - 2.0 * y / p});
    }
    return out;
}

/// Objective numerator (over p) without the per-equation breakdown.
inline std::int64_t objective_numerator(const Instance& inst, const std::vector<int>& x) {
    const int p = inst.p();
    std::int64_t num = 0;
    for (const Equation& e : inst.equations()) {
        const int diff = mod(static_cast<long long>(x[e.j]) - x[e.i], p);
        num += p - 2 * circular_distance(diff, e.d, p);
    }
    return num;
}

struct BruteForceResult {
    Assignment assignment;
    std::int64_t numerator = 0;
    int p = 2;

    double value() const { return static_cast<double>(numerator) / p; }
};

inline constexpr double kBruteForceBudget = 1e8;

/// Exhaustive maximization with x_0 pinned to 0 (the objective is invariant
/// under a global shift). Rejects searches over more than 1e8 assignments.
inline BruteForceResult brute_force_optimum(const Instance& inst) {
    const int p = inst.p();
    const int n = inst.n();
    if (std::pow(static_cast<double>(p), n - 1) > kBruteForceBudget)
        throw Error("brute_force_optimum: p^(n-1) exceeds the enumeration budget");
    std::vector<int> x(n, 0);
    BruteForceResult best;
    best.p = p;
    best.assignment.positions = x;
    best.numerator = objective_numerator(inst, x);
    if (n == 1) return best;
    for (;;) {
        int k = 1;
        while (k < n && ++x[k] == p) x[k++] = 0;
        if (k == n) break;
        const std::int64_t num = objective_numerator(inst, x);
        if (num > best.numerator) {
            best.numerator = num;
            best.assignment.positions = x;
        }
    }
    return best;
}

/// Maps the instance onto domain ell*p with every d scaled by ell.
inline Instance scale_instance(const Instance& inst, int ell) {
    if (ell < 1) throw Error("scale_instance: ell must be >= 1");
    const long long s = static_cast<long long>(inst.p()) * ell;
    if (s > (1LL << 30)) throw Error("scale_instance: scaled domain overflows");
    std::vector<Equation> eqs = inst.equations();
    for (Equation& e : eqs) e.d *= ell;
    return Instance(static_cast<int>(s), inst.n(), std::move(eqs));
}

struct GeneratedInstance {
    Instance instance;
    std::optional<Assignment> planted;
};

/// Random instance with m equations over distinct random pairs. With `planted`,
/// hidden positions are drawn first and every d is made consistent with them.
inline GeneratedInstance generate_instance(int n, int p, int m, std::uint64_t seed, bool planted) {
    if (n < 2) throw Error("generate_instance: n must be >= 2");
    if (m < 1) throw Error("generate_instance: m must be >= 1");
    if (p < 2 || p % 2 != 0) throw Error("generate_instance: p must be even and >= 2");
    CounterRng rng(seed, kStreamGenerator);
    std::optional<Assignment> hidden;
    if (planted) {
        hidden.emplace();
        hidden->positions.resize(n);
        for (int& x : hidden->positions) x = static_cast<int>(rng.uniform_below(p));
    }
    std::vector<Equation> eqs;
    eqs.reserve(m);
    for (int e = 0; e < m; ++e) {
        const int i = static_cast<int>(rng.uniform_below(n));
        int j = static_cast<int>(rng.uniform_below(n - 1));
        if (j >= i) ++j;
        const int d = hidden ? mod(static_cast<long long>(hidden->positions[j]) - hidden->positions[i], p)
                             : static_cast<int>(rng.uniform_below(p));
        eqs.push_back({i, j, d});
    }
    return {Instance(p, n, std::move(eqs)), std::move(hidden)};
}

// Text format:
//   relq 1
//   p n m
//   i j d      (m lines, 0-based)
// '#' starts a comment; blank lines are ignored on input.

inline void write_instance(std::ostream& os, const Instance& inst) {
    os << "relq 1\n" << inst.p() << ' ' << inst.n() << ' ' << inst.m() << '\n';
    for (const Equation& e : inst.equations()) os << e.i << ' ' << e.j << ' ' << e.d << '\n';
}

inline std::string to_text(const Instance& inst) {
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

namespace detail {

/// Next non-empty line with comments stripped; false at end of input.
inline bool next_content_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

template <class... T>
void parse_fields(const std::string& line, const char* what, T&... out) {
    std::istringstream ls(line);
    if (!(ls >> ... >> out)) throw Error(std::string("parse error: expected ") + what);
    std::string rest;
    if (ls >> rest) throw Error(std::string("parse error: trailing data after ") + what);
}

}  // namespace detail

inline Instance read_instance(std::istream& is) {
    std::string line;
    if (!detail::next_content_line(is, line)) throw Error("parse error: empty instance");
    std::string magic;
    int version = 0;
    detail::parse_fields(line, "header 'relq 1'", magic, version);
    if (magic != "relq" || version != 1) throw Error("parse error: bad header, expected 'relq 1'");
    if (!detail::next_content_line(is, line)) throw Error("parse error: missing 'p n m' line");
    long long p = 0, n = 0, m = 0;
    detail::parse_fields(line, "'p n m'", p, n, m);
    if (p % 2 != 0) throw Error("parse error: odd p is not supported");
    if (m < 0) throw Error("parse error: negative equation count");
    std::vector<Equation> eqs;
    eqs.reserve(static_cast<std::size_t>(m));
    for (long long k = 0; k < m; ++k) {
        if (!detail::next_content_line(is, line)) throw Error("parse error: fewer equations than declared");
        Equation e;
        detail::parse_fields(line, "'i j d'", e.i, e.j, e.d);
        eqs.push_back(e);
    }
    if (detail::next_content_line(is, line)) throw Error("parse error: more equations than declared");
    return Instance(static_cast<int>(p), static_cast<int>(n), std::move(eqs));
}

inline Instance instance_from_text(const std::string& text) {
    std::istringstream is(text);
    return read_instance(is);
}

}  // namespace relq
