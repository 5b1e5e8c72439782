#pragma once

// Vector solutions of the two relaxations and their file format.
//
// Both relaxations attach p vectors to each of n variables. They differ in
// meaning (assignment vectors u_ih versus constellation vectors v_i^k), so
// they are distinct types over the same storage.

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "relq/instance.hpp"
#include "relq/linalg.hpp"

namespace relq {

/// n*p vectors of length dim, variable-major then label-minor.
class VectorFamily {
public:
    VectorFamily() = default;
    VectorFamily(int p, int n, int dim)
        : p_(p), n_(n), dim_(dim), data_(static_cast<std::size_t>(p) * n * dim, 0.0) {
        if (p < 2 || p % 2 != 0) throw Error("vector family: p must be even and >= 2");
        if (n < 1 || dim < 1) throw Error("vector family: n and dim must be >= 1");
    }

    int p() const { return p_; }
    int n() const { return n_; }
    int dim() const { return dim_; }

    std::size_t row_index(int i, int k) const { return static_cast<std::size_t>(i) * p_ + k; }

    std::span<double> vec(int i, int k) {
        return {data_.data() + row_index(i, k) * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<const double> vec(int i, int k) const {
        return {data_.data() + row_index(i, k) * dim_, static_cast<std::size_t>(dim_)};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// All vectors as rows of a (n*p) x dim matrix.
    Matrix as_matrix() const {
        Matrix m(static_cast<std::size_t>(n_) * p_, dim_);
        m.data() = data_;
        return m;
    }

    Matrix gram() const { return gram_of_rows(as_matrix()); }

    friend bool operator==(const VectorFamily&, const VectorFamily&) = default;

private:
    int p_ = 2;
    int n_ = 1;
    int dim_ = 1;
    std::vector<double> data_;
};

/// Assignment vectors u_ih of the assignment-constraint relaxation.
class SdpSolutionPPlus : public VectorFamily {
public:
    using VectorFamily::VectorFamily;
    explicit SdpSolutionPPlus(VectorFamily f) : VectorFamily(std::move(f)) {}
    std::span<const double> u(int i, int h) const { return vec(i, h); }
};

/// Constellation vectors v_i^k of the constellation relaxation.
class SdpSolutionP : public VectorFamily {
public:
    using VectorFamily::VectorFamily;
    explicit SdpSolutionP(VectorFamily f) : VectorFamily(std::move(f)) {}
    std::span<const double> v(int i, int k) const { return vec(i, k); }
};

enum class SolutionKind { PPlus, P };

inline const char* kind_name(SolutionKind kind) { return kind == SolutionKind::PPlus ? "pplus" : "p"; }

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token) {
    double x = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), x);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw Error("parse error: bad decimal '" + token + "'");
    return x;
}

// Solution file:
//   relqsol 1
//   p n dim kind        (kind is pplus or p)
//   n*p lines of dim decimals

inline void write_solution(std::ostream& os, const VectorFamily& sol, SolutionKind kind) {
    os << "relqsol 1\n" << sol.p() << ' ' << sol.n() << ' ' << sol.dim() << ' ' << kind_name(kind) << '\n';
    for (int i = 0; i < sol.n(); ++i)
        for (int k = 0; k < sol.p(); ++k) {
            const auto row = sol.vec(i, k);
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) os << ' ';
                os << format_double(row[c]);
            }
            os << '\n';
        }
}

struct LoadedSolution {
    SolutionKind kind;
    VectorFamily vectors;
};

inline LoadedSolution read_solution(std::istream& is) {
    std::string line;
    if (!detail::next_content_line(is, line)) throw Error("parse error: empty solution file");
    std::string magic;
    int version = 0;
    detail::parse_fields(line, "header 'relqsol 1'", magic, version);
    if (magic != "relqsol" || version != 1) throw Error("parse error: bad header, expected 'relqsol 1'");
    if (!detail::next_content_line(is, line)) throw Error("parse error: missing 'p n dim kind' line");
    int p = 0, n = 0, dim = 0;
    std::string kind;
    detail::parse_fields(line, "'p n dim kind'", p, n, dim, kind);
    if (kind != "pplus" && kind != "p") throw Error("parse error: kind must be 'pplus' or 'p'");
    LoadedSolution out{kind == "pplus" ? SolutionKind::PPlus : SolutionKind::P, VectorFamily(p, n, dim)};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < p; ++k) {
            if (!detail::next_content_line(is, line)) throw Error("parse error: solution file truncated");
            std::istringstream ls(line);
            auto row = out.vectors.vec(i, k);
            std::string token;
            for (double& x : row) {
                if (!(ls >> token)) throw Error("parse error: short vector row");
                x = parse_double(token);
            }
            if (ls >> token) throw Error("parse error: long vector row");
        }
    if (detail::next_content_line(is, line)) throw Error("parse error: trailing data in solution file");
    return out;
}

}  // namespace relq
