#include "scenario_io.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <riskcontract/errors.hpp>

using nlohmann::json;

namespace riskcontract::io {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw validation_error(msg);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed)
{
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            fail("unknown key at " + (where.empty() ? key : where + "." + key));
}

double require_number(const json& obj, const std::string& where,
                      const std::string& key)
{
    if (!obj.contains(key))
        fail("missing key " + where + "." + key);
    if (!obj[key].is_number())
        fail(where + "." + key + " must be a number");
    return obj[key].get<double>();
}

std::vector<double> number_list(const json& v, const std::string& where)
{
    if (!v.is_array())
        fail(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            fail(where + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// Scalar broadcast or explicit list for the init slacks/multipliers.
std::vector<double> scalar_or_list(const json& v, const std::string& where,
                                   std::size_t n)
{
    if (v.is_number())
        return std::vector<double>(n, v.get<double>());
    return number_list(v, where);
}

std::vector<double> default_v0(std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = double(n - 1 - i);
    return v;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte)
{
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

PayoffMap parse_payoff(const json& v, const std::string& where)
{
    reject_unknown(v, where, {"kind", "strike"});
    PayoffMap map;
    const std::string kind = v.value("kind", "identity");
    if (kind == "identity")
        map.kind = PayoffMap::Kind::identity;
    else if (kind == "put")
        map.kind = PayoffMap::Kind::put;
    else if (kind == "call")
        map.kind = PayoffMap::Kind::call;
    else
        fail(where + ".kind must be identity|put|call");
    if (map.kind != PayoffMap::Kind::identity)
        map.strike = require_number(v, where, "strike");
    return map;
}

} // namespace

KKTState ScenarioFile::initial_state() const
{
    if (!init.provided)
        return KKTState::reference_start(grid.size(), scenario.size());
    return KKTState::make(init.v0, init.k0, init.q0, init.s0, init.z0);
}

Position ScenarioFile::claim_payoff() const
{
    if (!claim)
        fail("scenario file has no claim section");
    const std::vector<double>& base =
        claim->on_income ? scenario.income : underlying;
    if (base.empty())
        fail("claim.on is 'underlying' but no underlying exists");
    Position out(base.size());
    for (std::size_t j = 0; j < base.size(); ++j)
        out[j] = claim->payoff(base[j]);
    return out;
}

ScenarioFile load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte ? e.byte - 1 : 0);
        fail("parse error at line " + std::to_string(line) + ", column " +
             std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object())
        fail("scenario file must hold a JSON object");
    reject_unknown(doc, "", {"states", "types", "risk", "smoothing", "solver",
                             "init", "claim"});

    ScenarioFile sf;

    if (doc.contains("claim")) {
        const json& c = doc["claim"];
        reject_unknown(c, "claim", {"payoff", "on", "quantize"});
        ClaimConfig cc;
        if (c.contains("payoff"))
            cc.payoff = parse_payoff(c["payoff"], "claim.payoff");
        const std::string on = c.value("on", "income");
        if (on == "income")
            cc.on_income = true;
        else if (on == "underlying")
            cc.on_income = false;
        else
            fail("claim.on must be income|underlying");
        if (c.contains("quantize")) {
            const json& qz = c["quantize"];
            reject_unknown(qz, "claim.quantize",
                           {"mean", "stddev", "cells", "income"});
            ClaimConfig::Quantize q;
            q.mean = require_number(qz, "claim.quantize", "mean");
            q.stddev = require_number(qz, "claim.quantize", "stddev");
            q.cells = static_cast<int>(qz.value("cells", 2000));
            if (qz.contains("income")) {
                reject_unknown(qz["income"], "claim.quantize.income",
                               {"intercept", "slope"});
                q.income_intercept =
                    require_number(qz["income"], "claim.quantize.income",
                                   "intercept");
                q.income_slope = require_number(
                    qz["income"], "claim.quantize.income", "slope");
            }
            cc.quantize = q;
        }
        sf.claim = cc;
    }

    if (sf.claim && sf.claim->quantize) {
        if (doc.contains("states"))
            fail("states and claim.quantize are mutually exclusive");
        const auto& q = *sf.claim->quantize;
        try {
            QuantizedScenario qs = quantize_normal(
                q.mean, q.stddev, q.cells, q.income_intercept, q.income_slope);
            sf.scenario = std::move(qs.scenario);
            sf.underlying = std::move(qs.underlying);
        } catch (const error& e) {
            fail(std::string("claim.quantize: ") + e.what());
        }
        sf.has_states = true;
    } else if (doc.contains("states")) {
        const json& st = doc["states"];
        reject_unknown(st, "states", {"labels", "p", "W"});
        if (!st.contains("p") || !st.contains("W"))
            fail("states requires keys states.p and states.W");
        std::vector<std::string> labels;
        if (st.contains("labels")) {
            if (!st["labels"].is_array())
                fail("states.labels must be an array of strings");
            for (const auto& e : st["labels"])
                labels.push_back(e.get<std::string>());
        }
        try {
            sf.scenario = Scenario::make(number_list(st["p"], "states.p"),
                                         number_list(st["W"], "states.W"),
                                         std::move(labels));
        } catch (const error& e) {
            fail(std::string("states.p/states.W: ") + e.what());
        }
        sf.has_states = true;
    }

    if (doc.contains("types")) {
        const json& ty = doc["types"];
        reject_unknown(ty, "types", {"a", "thetas", "weights"});
        try {
            sf.grid = TypeGrid::make(
                require_number(ty, "types", "a"),
                number_list(ty.at("thetas"), "types.thetas"),
                number_list(ty.at("weights"), "types.weights"));
        } catch (const json::exception&) {
            fail("types requires keys a, thetas, weights");
        } catch (const error& e) {
            fail(std::string("types: ") + e.what());
        }
        sf.has_types = true;
    }

    if (doc.contains("risk")) {
        const json& r = doc["risk"];
        reject_unknown(r, "risk", {"kind", "level", "cap", "mixture"});
        const std::string kind = r.value("kind", "avar_cap");
        try {
            if (kind == "avar_level")
                sf.risk = RiskSpec::make_level(require_number(r, "risk", "level"));
            else if (kind == "avar_cap")
                sf.risk = RiskSpec::make_cap(require_number(r, "risk", "cap"));
            else if (kind == "mixture") {
                std::vector<std::pair<double, double>> parts;
                if (!r.contains("mixture") || !r["mixture"].is_array())
                    fail("risk.mixture must be an array of [weight, level]");
                for (const auto& e : r["mixture"]) {
                    const auto pair = number_list(e, "risk.mixture[]");
                    if (pair.size() != 2)
                        fail("risk.mixture entries must be [weight, level]");
                    parts.emplace_back(pair[0], pair[1]);
                }
                sf.risk = RiskSpec::make_mixture(std::move(parts));
            } else
                fail("risk.kind must be avar_level|avar_cap|mixture");
        } catch (const error& e) {
            fail(std::string("risk: ") + e.what());
        }
        sf.has_risk = true;
    }

    if (doc.contains("smoothing")) {
        const json& sm = doc["smoothing"];
        reject_unknown(sm, "smoothing", {"eps", "eps2", "eps3"});
        sf.smoothing.eps = sm.value("eps", sf.smoothing.eps);
        sf.smoothing.eps2 = sm.value("eps2", sf.smoothing.eps2);
        sf.smoothing.eps3 = sm.value("eps3", sf.smoothing.eps3);
        try {
            sf.smoothing.validate();
        } catch (const error& e) {
            fail(std::string("smoothing: ") + e.what());
        }
    }

    if (doc.contains("solver")) {
        const json& so = doc["solver"];
        reject_unknown(so, "solver",
                       {"tau", "mu", "rho", "max_iter", "mode", "cap", "sigma",
                        "mu_min", "stage_iters", "tau_refined"});
        sf.solver.tau = so.value("tau", sf.solver.tau);
        sf.solver.mu = so.value("mu", sf.solver.mu);
        sf.solver.rho = so.value("rho", sf.solver.rho);
        sf.solver.max_iter = so.value("max_iter", sf.solver.max_iter);
        sf.solver.cap = so.value("cap", sf.solver.cap);
        sf.solver.sigma = so.value("sigma", sf.solver.sigma);
        sf.solver.mu_min = so.value("mu_min", sf.solver.mu_min);
        sf.solver.stage_iters = so.value("stage_iters", sf.solver.stage_iters);
        sf.solver.tau_refined = so.value("tau_refined", sf.solver.tau_refined);
        const std::string mode = so.value("mode", "paper_faithful");
        if (mode == "paper_faithful")
            sf.solver.mode = BarrierMode::paper_faithful;
        else if (mode == "refined")
            sf.solver.mode = BarrierMode::refined;
        else
            fail("solver.mode must be paper_faithful|refined");
        try {
            sf.solver.validate();
        } catch (const error& e) {
            fail(std::string("solver: ") + e.what());
        }
    }
    // Risk spec cap and solver cap describe the same dual bound; keep them
    // in sync when only one was given.
    if (sf.has_risk && sf.risk.kind == RiskSpec::Kind::avar_cap &&
        !(doc.contains("solver") && doc["solver"].contains("cap")))
        sf.solver.cap = sf.risk.cap;

    if (doc.contains("init")) {
        const json& ini = doc["init"];
        reject_unknown(ini, "init", {"v0", "K0", "q0", "s0", "z0"});
        if (!sf.has_types || !sf.has_states)
            fail("init requires states and types sections");
        const std::size_t n = sf.grid.size();
        const std::size_t m = sf.scenario.size();
        const std::size_t ng = constraint_count(n, m);
        InitConfig ic;
        ic.v0 = ini.contains("v0") ? number_list(ini["v0"], "init.v0")
                                   : default_v0(n);
        ic.k0 = ini.contains("K0") ? number_list(ini["K0"], "init.K0")
                                   : std::vector<double>(n, 1.0);
        ic.q0 = ini.contains("q0") ? number_list(ini["q0"], "init.q0")
                                   : std::vector<double>(m, 1.0);
        ic.s0 = ini.contains("s0") ? scalar_or_list(ini["s0"], "init.s0", ng)
                                   : std::vector<double>(ng, 0.1);
        ic.z0 = ini.contains("z0") ? scalar_or_list(ini["z0"], "init.z0", ng)
                                   : std::vector<double>(ng, 1.0);
        if (ic.v0.size() != n || ic.k0.size() != n)
            fail("init.v0/init.K0 must have one entry per type");
        if (ic.q0.size() != m)
            fail("init.q0 must have one entry per state");
        if (ic.s0.size() != ng || ic.z0.size() != ng)
            fail("init.s0/init.z0 must be scalars or length-" +
                 std::to_string(ng) + " arrays");
        ic.provided = true;
        sf.init = std::move(ic);
    }

    return sf;
}

std::string dump_normalized(const ScenarioFile& sf)
{
    json doc;
    if (sf.has_states) {
        doc["states"]["labels"] = sf.scenario.states;
        doc["states"]["p"] = sf.scenario.probs;
        doc["states"]["W"] = sf.scenario.income;
    }
    if (sf.has_types) {
        doc["types"]["a"] = sf.grid.a;
        doc["types"]["thetas"] = sf.grid.thetas;
        doc["types"]["weights"] = sf.grid.weights;
    }
    if (sf.has_risk) {
        switch (sf.risk.kind) {
        case RiskSpec::Kind::avar_level:
            doc["risk"]["kind"] = "avar_level";
            doc["risk"]["level"] = sf.risk.level;
            break;
        case RiskSpec::Kind::avar_cap:
            doc["risk"]["kind"] = "avar_cap";
            doc["risk"]["cap"] = sf.risk.cap;
            break;
        case RiskSpec::Kind::mixture: {
            doc["risk"]["kind"] = "mixture";
            json parts = json::array();
            for (const auto& [w, lam] : sf.risk.mixture)
                parts.push_back({w, lam});
            doc["risk"]["mixture"] = parts;
            break;
        }
        }
    }
    doc["smoothing"]["eps"] = sf.smoothing.eps;
    doc["smoothing"]["eps2"] = sf.smoothing.eps2;
    doc["smoothing"]["eps3"] = sf.smoothing.eps3;
    doc["solver"]["tau"] = sf.solver.tau;
    doc["solver"]["mu"] = sf.solver.mu;
    doc["solver"]["rho"] = sf.solver.rho;
    doc["solver"]["max_iter"] = sf.solver.max_iter;
    doc["solver"]["cap"] = sf.solver.cap;
    doc["solver"]["sigma"] = sf.solver.sigma;
    doc["solver"]["mu_min"] = sf.solver.mu_min;
    doc["solver"]["stage_iters"] = sf.solver.stage_iters;
    doc["solver"]["tau_refined"] = sf.solver.tau_refined;
    doc["solver"]["mode"] = sf.solver.mode == BarrierMode::refined
                                ? "refined"
                                : "paper_faithful";
    if (sf.init.provided) {
        doc["init"]["v0"] = sf.init.v0;
        doc["init"]["K0"] = sf.init.k0;
        doc["init"]["q0"] = sf.init.q0;
        doc["init"]["s0"] = sf.init.s0;
        doc["init"]["z0"] = sf.init.z0;
    }
    if (sf.claim) {
        switch (sf.claim->payoff.kind) {
        case PayoffMap::Kind::identity:
            doc["claim"]["payoff"]["kind"] = "identity";
            break;
        case PayoffMap::Kind::put:
            doc["claim"]["payoff"]["kind"] = "put";
            doc["claim"]["payoff"]["strike"] = sf.claim->payoff.strike;
            break;
        case PayoffMap::Kind::call:
            doc["claim"]["payoff"]["kind"] = "call";
            doc["claim"]["payoff"]["strike"] = sf.claim->payoff.strike;
            break;
        }
        doc["claim"]["on"] = sf.claim->on_income ? "income" : "underlying";
        if (sf.claim->quantize) {
            const auto& q = *sf.claim->quantize;
            doc["claim"]["quantize"]["mean"] = q.mean;
            doc["claim"]["quantize"]["stddev"] = q.stddev;
            doc["claim"]["quantize"]["cells"] = q.cells;
            doc["claim"]["quantize"]["income"]["intercept"] =
                q.income_intercept;
            doc["claim"]["quantize"]["income"]["slope"] = q.income_slope;
        }
    }
    return doc.dump(2) + "\n";
}

CatalogueFile load_catalogue(const std::string& path, const Scenario& scenario)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open catalogue file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(std::string("catalogue parse error: ") + e.what());
    }
    reject_unknown(doc, "", {"contracts", "prices"});
    CatalogueFile cf;
    if (!doc.contains("contracts") || !doc["contracts"].is_array())
        fail("catalogue requires a contracts array");
    for (const auto& row : doc["contracts"]) {
        Position x = number_list(row, "contracts[]");
        if (x.size() != scenario.size())
            throw shape_error("catalogue contract length does not match states");
        cf.catalogue.contracts.push_back(std::move(x));
    }
    if (!doc.contains("prices"))
        fail("catalogue requires a prices array");
    cf.catalogue.prices = number_list(doc["prices"], "prices");
    if (cf.catalogue.prices.size() != cf.catalogue.contracts.size())
        throw shape_error("catalogue prices/contracts lengths differ");
    return cf;
}

std::string resolve_input(const std::string& path)
{
    namespace fs = std::filesystem;
    if (fs::exists(path))
        return path;
    if (const char* dir = std::getenv("RISKCONTRACT_FIXTURES")) {
        const fs::path alt = fs::path(dir) / path;
        if (fs::exists(alt))
            return alt.string();
    }
    return path;
}

std::string fixtures_dir()
{
    if (const char* dir = std::getenv("RISKCONTRACT_FIXTURES"))
        return dir;
    return "fixtures";
}

} // namespace riskcontract::io
