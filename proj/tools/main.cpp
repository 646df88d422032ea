#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <riskcontract/benchmark.hpp>
#include <riskcontract/catalogue.hpp>
#include <riskcontract/errors.hpp>
#include <riskcontract/minimax.hpp>
#include <riskcontract/oracle.hpp>
#include <riskcontract/risk.hpp>

#include "scenario_io.hpp"

using namespace riskcontract;

namespace {

// Six significant digits, locale independent; keeps output byte stable.
std::string fmt6(double x)
{
    if (x == 0.0)
        x = 0.0; // canonicalize the sign of zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void meta(std::ostream& os, const std::string& key, const std::string& value)
{
    os << "# " << key << "," << value << "\n";
}

void meta(std::ostream& os, const std::string& key, double value)
{
    meta(os, key, fmt6(value));
}

void dump_if_requested(const io::ScenarioFile& sf, const std::string& path)
{
    if (path.empty())
        return;
    std::ofstream out(path);
    if (!out)
        throw validation_error("cannot write normalized scenario to " + path);
    out << io::dump_normalized(sf);
}

int run_risk(const std::string& file, const std::string& position_arg,
             int coherence_samples, std::uint64_t seed,
             const std::string& dump_path)
{
    const io::ScenarioFile sf = io::load_scenario(io::resolve_input(file));
    if (!sf.has_states || !sf.has_risk)
        throw validation_error("risk: scenario file needs states and risk");
    dump_if_requested(sf, dump_path);

    Position position = sf.scenario.income;
    if (!position_arg.empty() && position_arg != "income") {
        position.clear();
        std::stringstream ss(position_arg);
        std::string tok;
        while (std::getline(ss, tok, ','))
            position.push_back(std::stod(tok));
    }

    std::ostream& os = std::cout;
    meta(os, "command", "risk");
    const double value = risk_value(sf.risk, sf.scenario, position);
    meta(os, "risk", value);
    meta(os, "mean", sf.scenario.mean(position));

    if (sf.risk.kind != RiskSpec::Kind::mixture) {
        const double cap = sf.risk.kind == RiskSpec::Kind::avar_cap
                               ? sf.risk.cap
                               : 1.0 / sf.risk.level;
        const DualRisk dual = avar_dual(sf.scenario, position, cap);
        os << "state,p,W,q\n";
        for (std::size_t j = 0; j < sf.scenario.size(); ++j)
            os << sf.scenario.states[j] << "," << fmt6(sf.scenario.probs[j])
               << "," << fmt6(position[j]) << "," << fmt6(dual.weights.q[j])
               << "\n";
    } else {
        os << "weight,level,leg_risk\n";
        for (const auto& [w, lam] : sf.risk.mixture)
            os << fmt6(w) << "," << fmt6(lam) << ","
               << fmt6(avar_quantile(sf.scenario, position, lam)) << "\n";
    }

    if (coherence_samples > 0) {
        const CoherenceReport report =
            coherence_suite(sf.risk, sf.scenario, coherence_samples, seed);
        os << "axiom,trials,violations,worst\n";
        for (const auto& a : report.axioms)
            os << a.axiom << "," << a.trials << "," << a.violations << ","
               << fmt6(a.worst) << "\n";
        if (!report.all_passed())
            return 1;
    }
    return 0;
}

int run_benchmark(const std::string& file, const std::string& dump_path)
{
    const io::ScenarioFile sf = io::load_scenario(io::resolve_input(file));
    if (!sf.has_states || !sf.has_types || !sf.has_risk || !sf.claim)
        throw validation_error(
            "benchmark: scenario file needs states (or claim.quantize), "
            "types, risk and claim");
    dump_if_requested(sf, dump_path);

    const BenchmarkClaim claim =
        BenchmarkClaim::normalized(sf.scenario, sf.claim_payoff());
    const BenchmarkSolution sol =
        solve_benchmark(sf.grid, sf.scenario, claim, sf.risk);

    std::ostream& os = std::cout;
    meta(os, "command", "benchmark");
    meta(os, "A_star", sol.income);
    meta(os, "ratio", sol.ratio);
    meta(os, "M", sol.constants.m);
    meta(os, "N", sol.constants.n);
    meta(os, "claim_mean", claim.mean);
    meta(os, "risk_before", sol.risk_before);
    meta(os, "risk_after", sol.risk_after);
    meta(os, "comonotone_shortcut", sol.shortcut ? "true" : "false");
    os << "theta,v,alpha,price\n";
    for (std::size_t i = 0; i < sf.grid.size(); ++i)
        os << fmt6(sf.grid.thetas[i]) << "," << fmt6(sol.v.values[i]) << ","
           << fmt6(sol.multipliers[i]) << ","
           << fmt6(sol.catalogue.prices[i]) << "\n";
    return 0;
}

int run_minimax(const std::string& file, const std::string& mode,
                const std::string& trace_path, const std::string& dump_path)
{
    io::ScenarioFile sf = io::load_scenario(io::resolve_input(file));
    if (!sf.has_states || !sf.has_types)
        throw validation_error("minimax: scenario file needs states and types");
    if (!mode.empty()) {
        if (mode == "paper_faithful")
            sf.solver.mode = BarrierMode::paper_faithful;
        else if (mode == "refined")
            sf.solver.mode = BarrierMode::refined;
        else
            throw validation_error("--mode must be paper_faithful|refined");
    }
    dump_if_requested(sf, dump_path);

    const MinimaxSolution sol = solve_minimax(sf.scenario, sf.grid,
                                              sf.smoothing, sf.solver,
                                              sf.initial_state());

    if (!trace_path.empty()) {
        std::ofstream trace(trace_path);
        if (!trace)
            throw validation_error("cannot write trace to " + trace_path);
        trace << "iteration,residual_norm,step_length,objective,mu\n";
        for (const auto& rec : sol.trace)
            trace << rec.iteration << "," << fmt6(rec.residual_norm) << ","
                  << fmt6(rec.step_length) << "," << fmt6(rec.objective) << ","
                  << fmt6(rec.mu) << "\n";
    }

    std::ostream& os = std::cout;
    meta(os, "command", "minimax");
    meta(os, "mode", sf.solver.mode == BarrierMode::refined ? "refined"
                                                            : "paper_faithful");
    meta(os, "risk_before", sol.risk_before);
    meta(os, "risk_after", sol.risk_after);
    meta(os, "objective", sol.objective);
    meta(os, "income", sol.income);
    meta(os, "iterations", static_cast<double>(sol.iterations));
    meta(os, "converged", sol.converged ? "true" : "unconverged");
    os << "theta,v,K,price\n";
    for (std::size_t i = 0; i < sf.grid.size(); ++i) {
        Position payoff(sf.scenario.size());
        for (std::size_t j = 0; j < sf.scenario.size(); ++j)
            payoff[j] = smoothed_plus(
                sol.strikes[i] - std::abs(sf.scenario.income[j]),
                sf.smoothing.eps);
        const double price =
            utility(sf.grid.thetas[i], sf.scenario, payoff) - sol.v.values[i];
        os << fmt6(sf.grid.thetas[i]) << "," << fmt6(sol.v.values[i]) << ","
           << fmt6(sol.strikes[i]) << "," << fmt6(price) << "\n";
    }
    return 0;
}

int run_verify(const std::string& scenario_file,
               const std::string& catalogue_file, double tol,
               const std::string& dump_path)
{
    const io::ScenarioFile sf =
        io::load_scenario(io::resolve_input(scenario_file));
    if (!sf.has_states || !sf.has_types)
        throw validation_error("verify: scenario file needs states and types");
    dump_if_requested(sf, dump_path);
    const io::CatalogueFile cf =
        io::load_catalogue(io::resolve_input(catalogue_file), sf.scenario);
    if (cf.catalogue.size() != sf.grid.size())
        throw shape_error("catalogue size does not match the type grid");

    std::ostream& os = std::cout;
    meta(os, "command", "verify");
    os << "check,result,worst,detail\n";
    bool all_ok = true;

    const auto ic = check_ic(sf.grid, sf.scenario, cf.catalogue, tol);
    if (ic.empty()) {
        os << "IC,PASS,0,\n";
    } else {
        all_ok = false;
        const auto worst = std::max_element(
            ic.begin(), ic.end(), [](const auto& a, const auto& b) {
                return a.magnitude < b.magnitude;
            });
        os << "IC,FAIL," << fmt6(worst->magnitude) << ",type "
           << worst->type + 1 << " prefers contract " << worst->other + 1
           << "\n";
    }

    const auto ir = check_ir(sf.grid, sf.scenario, cf.catalogue, tol);
    if (ir.empty()) {
        os << "IR,PASS,0,\n";
    } else {
        all_ok = false;
        const auto worst = std::max_element(
            ir.begin(), ir.end(), [](const auto& a, const auto& b) {
                return a.magnitude < b.magnitude;
            });
        os << "IR,FAIL," << fmt6(worst->magnitude) << ",type "
           << worst->type + 1 << " below reservation utility\n";
    }

    // Net utility by type recovers the value function; variance binding is
    // checked against its slopes.
    ValueFunction v;
    v.values.resize(sf.grid.size());
    for (std::size_t i = 0; i < sf.grid.size(); ++i)
        v.values[i] =
            utility(sf.grid.thetas[i], sf.scenario, cf.catalogue.contracts[i]) -
            cf.catalogue.prices[i];
    const auto residuals =
        variance_residual(sf.grid, sf.scenario, v, cf.catalogue.contracts);
    double worst_res = 0.0;
    std::size_t worst_idx = 0;
    for (std::size_t i = 0; i < residuals.size(); ++i)
        if (std::abs(residuals[i]) > worst_res) {
            worst_res = std::abs(residuals[i]);
            worst_idx = i;
        }
    if (worst_res <= tol) {
        os << "VARIANCE,PASS," << fmt6(worst_res) << ",\n";
    } else {
        all_ok = false;
        os << "VARIANCE,FAIL," << fmt6(worst_res) << ",type " << worst_idx + 1
           << " variance does not bind\n";
    }
    return all_ok ? 0 : 1;
}

int run_oracle(const std::string& file, int resolution, double budget,
               const std::string& fixture_name, const std::string& dump_path)
{
    const io::ScenarioFile sf = io::load_scenario(io::resolve_input(file));
    if (!sf.has_states || !sf.has_types)
        throw validation_error("oracle: scenario file needs states and types");
    dump_if_requested(sf, dump_path);

    GridSearchSpec spec;
    spec.resolution = resolution;
    spec.max_points = static_cast<std::uint64_t>(budget);
    const GridSearchResult best = grid_search_minimax(
        sf.scenario, sf.grid, sf.smoothing, sf.solver.cap, spec);

    std::ostringstream body;
    meta(body, "command", "oracle");
    meta(body, "objective", best.objective);
    meta(body, "resolution", static_cast<double>(resolution));
    body << "theta,v,K\n";
    for (std::size_t i = 0; i < sf.grid.size(); ++i)
        body << fmt6(sf.grid.thetas[i]) << "," << fmt6(best.v.values[i]) << ","
             << fmt6(best.strikes[i]) << "\n";

    std::cout << body.str();
    if (!fixture_name.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(io::fixtures_dir());
        const fs::path out_path = fs::path(io::fixtures_dir()) / fixture_name;
        std::ofstream out(out_path);
        if (!out)
            throw validation_error("cannot write fixture " + out_path.string());
        out << body.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Risk-minimizing derivative catalogue toolkit"};
    app.require_subcommand(1);

    std::string file, catalogue_file, position_arg = "income";
    std::string mode, trace_path, dump_path, fixture_name;
    int coherence_samples = 0;
    std::uint64_t seed = 91;
    double tol = 1e-8, budget = 1e7;
    int resolution = 33;

    auto* risk_cmd = app.add_subcommand("risk", "Evaluate risk of a position");
    risk_cmd->add_option("file", file, "scenario file")->required();
    risk_cmd->add_option("--position", position_arg,
                         "'income' or a comma-separated payoff vector");
    risk_cmd->add_option("--coherence", coherence_samples,
                         "run the coherence suite with this many samples");
    risk_cmd->add_option("--seed", seed, "coherence randomization seed");
    risk_cmd->add_option("--dump-normalized", dump_path,
                         "write the normalized scenario file here");

    auto* bench_cmd =
        app.add_subcommand("benchmark", "Closed-form single-claim solver");
    bench_cmd->add_option("file", file, "scenario file")->required();
    bench_cmd->add_option("--dump-normalized", dump_path, "");

    auto* mini_cmd =
        app.add_subcommand("minimax", "Interior-point put-catalogue solver");
    mini_cmd->add_option("file", file, "scenario file")->required();
    mini_cmd->add_option("--mode", mode, "paper_faithful|refined");
    mini_cmd->add_option("--trace", trace_path, "per-iteration trace CSV");
    mini_cmd->add_option("--dump-normalized", dump_path, "");

    auto* verify_cmd =
        app.add_subcommand("verify", "Check a catalogue against a scenario");
    verify_cmd->add_option("scenario", file, "scenario file")->required();
    verify_cmd->add_option("catalogue", catalogue_file, "catalogue file")
        ->required();
    verify_cmd->add_option("--tol", tol, "violation tolerance");
    verify_cmd->add_option("--dump-normalized", dump_path, "");

    auto* oracle_cmd =
        app.add_subcommand("oracle", "Brute-force reference strike search");
    oracle_cmd->add_option("file", file, "scenario file")->required();
    oracle_cmd->add_option("--resolution", resolution, "points per strike axis");
    oracle_cmd->add_option("--budget", budget, "tuple budget");
    oracle_cmd->add_option("--write-fixture", fixture_name,
                           "also write the table into the fixtures directory");
    oracle_cmd->add_option("--dump-normalized", dump_path, "");

    CLI11_PARSE(app, argc, argv);

    try {
        if (risk_cmd->parsed())
            return run_risk(file, position_arg, coherence_samples, seed,
                            dump_path);
        if (bench_cmd->parsed())
            return run_benchmark(file, dump_path);
        if (mini_cmd->parsed())
            return run_minimax(file, mode, trace_path, dump_path);
        if (verify_cmd->parsed())
            return run_verify(file, catalogue_file, tol, dump_path);
        if (oracle_cmd->parsed())
            return run_oracle(file, resolution, budget, fixture_name,
                              dump_path);
    } catch (const budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const shape_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
