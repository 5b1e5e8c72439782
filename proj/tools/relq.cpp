// relq command-line driver.
//
// Exit codes: 0 success, 1 I/O or parse error, 2 failed experiment assertion.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relq/relq.hpp"

namespace {

using namespace relq;

struct OutputOptions {
    std::string prefix;
    bool json = false;
    bool csv = false;
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
    cmd->add_option("--out", out.prefix, "write PREFIX.csv and PREFIX.json");
    auto* j = cmd->add_flag("--json", out.json, "print the JSON summary to stdout");
    auto* c = cmd->add_flag("--csv", out.csv, "print the CSV table to stdout (default)");
    j->excludes(c);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    return f;
}

int emit(const Report& rep, const OutputOptions& out) {
    if (!out.prefix.empty()) {
        auto csv = open_out(out.prefix + ".csv");
        write_csv(csv, rep);
        auto json = open_out(out.prefix + ".json");
        write_json(json, rep);
        if (!csv || !json) throw Error("write failed for '" + out.prefix + "'");
    }
    if (out.json)
        write_json(std::cout, rep);
    else if (out.csv || out.prefix.empty())
        write_csv(std::cout, rep);
    return rep.passed ? 0 : 2;
}

Instance load_instance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open instance '" + path + "'");
    return read_instance(f);
}

LoadedSolution load_solution(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open solution '" + path + "'");
    return read_solution(f);
}

double parse_angle(const std::string& text) {
    // accepts plain radians or "pi/6", "3pi/4", "pi"
    const auto pos = text.find("pi");
    if (pos == std::string::npos) return parse_double(text);
    double num = 1.0, den = 1.0;
    if (pos > 0) num = parse_double(text.substr(0, pos));
    const std::string rest = text.substr(pos + 2);
    if (!rest.empty()) {
        if (rest.front() != '/') throw Error("parse error: bad angle '" + text + "'");
        den = parse_double(rest.substr(1));
    }
    return num * std::numbers::pi / den;
}

std::vector<double> parse_angles(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& s : items) out.push_back(parse_angle(s));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brownian-walk rounding for relaxed linear equations mod p"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::uint64_t seed = 1;
    long long trials = 0;
    OutputOptions out;

    // gen
    int gen_n = 4, gen_p = 8, gen_m = 6;
    bool gen_planted = false;
    std::string gen_file;
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    gen->add_option("--n", gen_n, "variables")->check(CLI::PositiveNumber);
    gen->add_option("--p", gen_p, "domain size (even)");
    gen->add_option("--m", gen_m, "equations")->check(CLI::PositiveNumber);
    gen->add_flag("--planted", gen_planted, "make every equation consistent with a hidden assignment");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--out", gen_file, "instance file (default stdout)");

    // brute
    std::string in_file;
    auto* brute = app.add_subcommand("brute", "exhaustive optimum of a small instance");
    brute->add_option("--in", in_file, "instance file")->required();
    add_output_flags(brute, out);

    // solve
    std::string solution_file;
    std::string solve_kind = "p";
    SolverConfig solver;
    auto* solve = app.add_subcommand("solve", "solve the assignment relaxation");
    solve->add_option("--in", in_file, "instance file")->required();
    solve->add_option("--solution", solution_file, "write the vector solution here");
    solve->add_option("--kind", solve_kind, "solution form to write: p or pplus")->check(CLI::IsMember({"p", "pplus"}));
    solve->add_option("--seed", solver.seed, "0 starts at the uniform point");
    solve->add_option("--max-iterations", solver.max_iterations)->check(CLI::PositiveNumber);
    solve->add_option("--tolerance", solver.constraint_tolerance)->check(CLI::PositiveNumber);
    add_output_flags(solve, out);

    // round
    double alpha = 1.0;
    int ell = 1;
    std::string walk_file;
    auto* round = app.add_subcommand("round", "round a vector solution");
    round->add_option("--solution", solution_file, "solution file (pplus is converted first)")->required();
    round->add_option("--in", in_file, "instance file, to score the rounded assignment");
    round->add_option("--alpha", alpha, "threshold")->check(CLI::PositiveNumber);
    round->add_option("--ell", ell, "lift the solution to domain ell*p before rounding")->check(CLI::PositiveNumber);
    round->add_option("--seed", seed, "random seed");
    round->add_option("--trial", trials, "trial index within the seed");
    round->add_option("--emit-walk", walk_file, "write walk traces as CSV");
    add_output_flags(round, out);

    // constants
    auto* constants = app.add_subcommand("constants", "quoted versus computed Brownian constants");
    add_output_flags(constants, out);

    // mc-signchange
    int s = 2000;
    auto* signchange = app.add_subcommand("mc-signchange", "extreme sign change frequencies");
    signchange->add_option("--s", s, "domain size");
    signchange->add_option("--trials", trials, "trials");
    signchange->add_option("--seed", seed, "random seed");
    signchange->add_option("--alpha", alpha, "threshold")->check(CLI::PositiveNumber);
    add_output_flags(signchange, out);

    // mc-correlation
    std::vector<std::string> angles;
    auto* correlation = app.add_subcommand("mc-correlation", "E|x.r - y.r| against its closed form");
    correlation->add_option("--theta", angles, "angles, radians or forms like pi/6");
    correlation->add_option("--trials", trials, "trials");
    correlation->add_option("--seed", seed, "random seed");
    add_output_flags(correlation, out);

    // conjecture
    std::vector<double> cosines;
    int audit_anchors = 8;
    auto* conjecture = app.add_subcommand("conjecture", "conditioned distance of correlated walk pairs");
    conjecture->add_option("--theta", angles, "angles, radians or forms like pi/6");
    conjecture->add_option("--cos", cosines, "angles given by their cosine");
    conjecture->add_option("--s", s, "domain size");
    conjecture->add_option("--trials", trials, "trials");
    conjecture->add_option("--seed", seed, "random seed");
    conjecture->add_option("--alpha", alpha, "threshold")->check(CLI::PositiveNumber);
    conjecture->add_option("--audit-anchors", audit_anchors, "anchor labels checked by the pair audit");
    add_output_flags(conjecture, out);

    // e2e
    bool triangle = false;
    auto* e2e = app.add_subcommand("e2e", "solve, lift, round and compare with the optimum");
    auto* e2e_in = e2e->add_option("--in", in_file, "instance file");
    auto* e2e_tri = e2e->add_flag("--triangle", triangle, "use the inconsistent triangle on p = 4");
    e2e_in->excludes(e2e_tri);
    e2e->add_option("--ell", ell, "lift factor")->check(CLI::PositiveNumber);
    e2e->add_option("--trials", trials, "rounding trials");
    e2e->add_option("--seed", seed, "rounding seed");
    e2e->add_option("--solver-seed", solver.seed, "solver start");
    e2e->add_option("--alpha", alpha, "threshold")->check(CLI::PositiveNumber);
    add_output_flags(e2e, out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const GeneratedInstance g = generate_instance(gen_n, gen_p, gen_m, seed, gen_planted);
            std::ostringstream text;
            write_instance(text, g.instance);
            if (g.planted) {
                text << "# planted";
                for (int x : g.planted->positions) text << ' ' << x;
                text << '\n';
            }
            if (gen_file.empty()) {
                std::cout << text.str();
            } else {
                auto f = open_out(gen_file);
                f << text.str();
                if (!f) throw Error("write failed for '" + gen_file + "'");
            }
            return 0;
        }

        if (brute->parsed()) {
            const Instance inst = load_instance(in_file);
            const BruteForceResult best = brute_force_optimum(inst);
            Report rep;
            rep.experiment = "brute";
            rep.param("p", inst.p());
            rep.param("n", inst.n());
            rep.param("m", inst.m());
            rep.cells.push_back({"optimum", {{"value", best.value()}, {"numerator", static_cast<double>(best.numerator)}}});
            for (int i = 0; i < inst.n(); ++i)
                rep.cells.push_back({"x" + std::to_string(i),
                                     {{"value", static_cast<double>(best.assignment.positions[i])}, {"numerator", 0.0}}});
            return emit(rep, out);
        }

        if (solve->parsed()) {
            const Instance inst = load_instance(in_file);
            const PPlusSolveResult res = solve_p_plus(inst, solver);
            if (!solution_file.empty()) {
                auto f = open_out(solution_file);
                if (solve_kind == "pplus")
                    write_solution(f, res.solution, SolutionKind::PPlus);
                else
                    write_solution(f, convert_to_p(res.solution), SolutionKind::P);
                if (!f) throw Error("write failed for '" + solution_file + "'");
            }
            Report rep;
            rep.experiment = "solve";
            rep.seed = solver.seed;
            rep.param("p", inst.p());
            rep.param("n", inst.n());
            rep.param("m", inst.m());
            rep.param("seed", solver.seed);
            rep.param("max_iterations", solver.max_iterations);
            rep.param("tolerance", solver.constraint_tolerance);
            rep.cells.push_back({"objective", {{"value", res.report.objective}}});
            rep.cells.push_back({"iterations", {{"value", static_cast<double>(res.report.iterations)}}});
            rep.cells.push_back({"converged", {{"value", res.report.converged ? 1.0 : 0.0}}});
            rep.cells.push_back({"dimension", {{"value", static_cast<double>(res.solution.dim())}}});
            for (const auto& r : res.report.residuals) rep.cells.push_back({"residual_" + r.family, {{"value", r.max_residual}}});
            if (!res.report.converged) rep.notes.push_back("solver stopped at its iteration limit");
            return emit(rep, out);
        }

        if (round->parsed()) {
            LoadedSolution loaded = load_solution(solution_file);
            const SdpSolutionP sol = loaded.kind == SolutionKind::P
                                         ? SdpSolutionP(std::move(loaded.vectors))
                                         : convert_to_p(SdpSolutionPPlus(std::move(loaded.vectors)));
            const RoundingStreams streams{seed, static_cast<std::uint64_t>(trials)};
            GaussianSampler g = streams.gaussian();
            const std::vector<double> r = sample_gaussian(g, static_cast<std::size_t>(sol.dim()) * ell);
            const std::vector<WalkTrace> walks = ell == 1 ? solution_walks(sol, r) : lifted_walks(sol, ell, r);
            const RoundingOutcome outcome = ell == 1 ? round_solution(sol, alpha, streams)
                                                     : round_lifted(sol, ell, alpha, streams);
            if (!walk_file.empty()) {
                auto f = open_out(walk_file);
                write_walk_csv(f, walks, alpha);
                if (!f) throw Error("write failed for '" + walk_file + "'");
            }
            Report rep;
            rep.experiment = "round";
            rep.seed = seed;
            rep.param("s", sol.p() * ell);
            rep.param("n", sol.n());
            rep.param("alpha", alpha);
            rep.param("ell", ell);
            rep.param("seed", seed);
            rep.param("trial", trials);
            for (int i = 0; i < sol.n(); ++i) {
                const VariablePlacement& pl = outcome.placements[i];
                rep.cells.push_back({"x" + std::to_string(i),
                                     {{"position", static_cast<double>(pl.position)},
                                      {"status", static_cast<double>(static_cast<int>(pl.status))},
                                      {"crossings", static_cast<double>(pl.crossings)}}});
            }
            rep.notes.push_back("status codes: 0 one crossing, 1 no crossing, 2 several crossings");
            if (!in_file.empty()) {
                const Instance inst = load_instance(in_file);
                const Instance target = ell == 1 ? inst : scale_instance(inst, ell);
                const double value = evaluate(target, Assignment{outcome.positions()}).total();
                rep.cells.push_back({"objective", {{"position", value}, {"status", 0.0}, {"crossings", 0.0}}});
            }
            return emit(rep, out);
        }

        if (constants->parsed()) return emit(reproduce_constants(), out);

        if (signchange->parsed()) return emit(mc_sign_change(s, trials > 0 ? trials : 200000, seed, alpha), out);

        if (correlation->parsed()) {
            std::vector<double> thetas = parse_angles(angles);
            if (thetas.empty())
                thetas = {0.0, std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4,
                          std::numbers::pi};
            return emit(mc_correlation_gap(thetas, trials > 0 ? trials : 1000000, seed), out);
        }

        if (conjecture->parsed()) {
            ConjectureConfig cfg;
            cfg.thetas = parse_angles(angles);
            for (double c : cosines) {
                if (c < -1.0 || c > 1.0) throw Error("--cos values must lie in [-1, 1]");
                cfg.thetas.push_back(std::acos(c));
            }
            if (cfg.thetas.empty()) cfg.thetas = {std::numbers::pi / 12, std::numbers::pi / 6, std::numbers::pi / 4};
            cfg.s = s;
            cfg.trials = trials > 0 ? trials : 100000;
            cfg.seed = seed;
            cfg.alpha = alpha;
            cfg.audit_anchors = audit_anchors;
            return emit(conjecture_experiment(cfg), out);
        }

        if (e2e->parsed()) {
            if (!triangle && in_file.empty()) throw Error("e2e needs --in FILE or --triangle");
            const Instance inst = triangle ? Instance(4, 3, {{0, 1, 2}, {1, 2, 2}, {2, 0, 2}}) : load_instance(in_file);
            EndToEndConfig cfg;
            cfg.solver = solver;
            cfg.ell = ell;
            cfg.trials = trials > 0 ? trials : 1000;
            cfg.seed = seed;
            cfg.alpha = alpha;
            return emit(end_to_end_ratio(inst, cfg), out);
        }
    } catch (const std::exception& e) {
        std::cerr << "relq: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
