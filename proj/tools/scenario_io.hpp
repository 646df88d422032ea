#pragma once

#include <optional>
#include <string>
#include <vector>

#include <riskcontract/benchmark.hpp>
#include <riskcontract/minimax.hpp>
#include <riskcontract/risk.hpp>
#include <riskcontract/scenario.hpp>

namespace riskcontract::io {

/// Optional benchmark-claim description: a payoff map applied to either the
/// income vector or a raw underlying, optionally built by quantizing a
/// normal underlying with an affine income map.
struct ClaimConfig {
    PayoffMap payoff;
    bool on_income = true;
    struct Quantize {
        double mean = 0.0;
        double stddev = 1.0;
        int cells = 2000;
        double income_intercept = 0.0;
        double income_slope = 1.0;
    };
    std::optional<Quantize> quantize;
};

struct InitConfig {
    std::vector<double> v0, k0, q0, s0, z0;
    bool provided = false;
};

/// Parsed scenario document. Sections default to the reference constants
/// when omitted; present sections are fully validated and unknown keys are
/// rejected with their path.
struct ScenarioFile {
    Scenario scenario;
    bool has_states = false;
    TypeGrid grid;
    bool has_types = false;
    RiskSpec risk;
    bool has_risk = false;
    SmoothingParams smoothing;
    SolverConfig solver;
    InitConfig init;
    std::optional<ClaimConfig> claim;
    std::vector<double> underlying; // filled when the claim quantizes

    /// Initial iterate: the documented reference start unless init given.
    KKTState initial_state() const;
    /// Raw claim payoff vector per the claim config.
    Position claim_payoff() const;
};

/// Parse and validate; throws riskcontract::validation_error with
/// line/column or key-path context.
ScenarioFile load_scenario(const std::string& path);

/// Canonical serialized form: defaults made explicit, keys sorted, numbers
/// round-trip exact. Reparsing yields a field-identical scenario.
std::string dump_normalized(const ScenarioFile& sf);

struct CatalogueFile {
    Catalogue catalogue;
};

CatalogueFile load_catalogue(const std::string& path,
                             const Scenario& scenario);

/// Resolve a path, falling back to $RISKCONTRACT_FIXTURES/<path> when the
/// plain path does not exist.
std::string resolve_input(const std::string& path);

/// Directory for fixture output: $RISKCONTRACT_FIXTURES or ./fixtures.
std::string fixtures_dir();

} // namespace riskcontract::io
