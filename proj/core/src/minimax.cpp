#include "riskcontract/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riskcontract/errors.hpp"
#include "riskcontract/numerics.hpp"

namespace riskcontract {

void SmoothingParams::validate() const
{
    if (!(eps > 0.0 && eps2 > 0.0 && eps3 > 0.0))
        throw validation_error("smoothing params must be strictly positive");
}

void SolverConfig::validate() const
{
    if (!(tau > 0.0 && tau < 1.0))
        throw validation_error("solver config: tau must lie in (0,1)");
    if (!(mu > 0.0))
        throw validation_error("solver config: mu must be positive");
    if (max_iter < 1)
        throw validation_error("solver config: max_iter must be >= 1");
    if (!(cap >= 1.0))
        throw validation_error("solver config: cap must be >= 1");
    if (!(sigma > 0.0 && sigma < 1.0))
        throw validation_error("solver config: sigma must lie in (0,1)");
    if (!(mu_min > 0.0 && mu_min <= mu))
        throw validation_error("solver config: mu_min must lie in (0, mu]");
    if (stage_iters < 1)
        throw validation_error("solver config: stage_iters must be >= 1");
    if (!(tau_refined > 0.0 && tau_refined < 1.0))
        throw validation_error("solver config: tau_refined must lie in (0,1)");
}

KKTState KKTState::reference_start(std::size_t n, std::size_t m)
{
    KKTState st;
    st.v.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        st.v[static_cast<Eigen::Index>(i)] = double(n - 1 - i);
    st.strikes = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    st.q = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    const auto ng = static_cast<Eigen::Index>(constraint_count(n, m));
    st.s = Eigen::VectorXd::Constant(ng, 0.1);
    st.z = Eigen::VectorXd::Ones(ng);
    return st;
}

KKTState KKTState::make(const std::vector<double>& v0,
                        const std::vector<double>& k0,
                        const std::vector<double>& q0,
                        const std::vector<double>& s0,
                        const std::vector<double>& z0)
{
    if (v0.size() != k0.size())
        throw shape_error("kkt state: v0 and K0 lengths differ");
    const std::size_t ng = constraint_count(v0.size(), q0.size());
    if (s0.size() != ng || z0.size() != ng)
        throw shape_error("kkt state: slack/multiplier length must be 4n+1+2m");
    KKTState st;
    auto to_vec = [](const std::vector<double>& x) {
        return Eigen::Map<const Eigen::VectorXd>(x.data(),
                                                 static_cast<Eigen::Index>(
                                                     x.size()))
            .eval();
    };
    st.v = to_vec(v0);
    st.strikes = to_vec(k0);
    st.q = to_vec(q0);
    st.s = to_vec(s0);
    st.z = to_vec(z0);
    return st;
}

double smoothed_plus(double d, double eps)
{
    if (d <= -eps)
        return 0.0;
    if (d >= eps)
        return d;
    const double t = d + eps;
    return t * t / (4.0 * eps);
}

double smoothed_plus_slope(double d, double eps)
{
    if (d <= -eps)
        return 0.0;
    if (d >= eps)
        return 1.0;
    return (d + eps) / (2.0 * eps);
}

double smoothed_plus_curvature(double d, double eps)
{
    if (d <= -eps || d >= eps)
        return 0.0;
    return 1.0 / (2.0 * eps);
}

namespace {

// Per-iterate tables: smoothed payoffs, their strike derivatives and the
// moments entering objective and constraints.
struct Work {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t ng = 0;
    Eigen::MatrixXd t;   // T_ij
    Eigen::MatrixXd t1;  // dT_ij / dK_i
    Eigen::MatrixXd t2;  // d^2 T_ij / dK_i^2
    Eigen::VectorXd et;  // E[T_i]
    Eigen::VectorXd et1; // E[T'_i]
    Eigen::VectorXd var;    // Var[T_i]
    Eigen::VectorXd var_k;  // dVar_i / dK_i
    Eigen::VectorXd var_kk; // d^2 Var_i / dK_i^2
    Eigen::VectorXd slopes; // v'_i, forward differences, backward at the top
};

Work build_work(const Eigen::VectorXd& v, const Eigen::VectorXd& strikes,
                const Scenario& scenario, const TypeGrid& grid,
                const SmoothingParams& params)
{
    Work w;
    w.n = grid.size();
    w.m = scenario.size();
    w.ng = constraint_count(w.n, w.m);
    if (static_cast<std::size_t>(v.size()) != w.n ||
        static_cast<std::size_t>(strikes.size()) != w.n)
        throw shape_error("minimax: v/K length does not match the type grid");

    const auto n = static_cast<Eigen::Index>(w.n);
    const auto m = static_cast<Eigen::Index>(w.m);
    w.t.resize(n, m);
    w.t1.resize(n, m);
    w.t2.resize(n, m);
    w.et.resize(n);
    w.et1.resize(n);
    w.var.resize(n);
    w.var_k.resize(n);
    w.var_kk.resize(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        double et = 0.0, et1 = 0.0, et2 = 0.0;
        double ett = 0.0, ett1 = 0.0, et1t1 = 0.0, ett2 = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double d = strikes[i] - std::abs(scenario.income[j]);
            const double tij = smoothed_plus(d, params.eps);
            const double t1ij = smoothed_plus_slope(d, params.eps);
            const double t2ij = smoothed_plus_curvature(d, params.eps);
            w.t(i, j) = tij;
            w.t1(i, j) = t1ij;
            w.t2(i, j) = t2ij;
            const double p = scenario.probs[j];
            et += p * tij;
            et1 += p * t1ij;
            et2 += p * t2ij;
            ett += p * tij * tij;
            ett1 += p * tij * t1ij;
            et1t1 += p * t1ij * t1ij;
            ett2 += p * tij * t2ij;
        }
        w.et[i] = et;
        w.et1[i] = et1;
        w.var[i] = ett - et * et;
        w.var_k[i] = 2.0 * (ett1 - et * et1);
        w.var_kk[i] = 2.0 * (et1t1 + ett2 - et1 * et1 - et * et2);
    }

    ValueFunction vf(std::vector<double>(v.data(), v.data() + v.size()));
    const auto sl = vf.slopes(grid);
    w.slopes = Eigen::Map<const Eigen::VectorXd>(sl.data(),
                                                 static_cast<Eigen::Index>(
                                                     sl.size()));
    return w;
}

// Sparse structure of d(v'_i)/dv_k: at most two entries per row.
struct SlopeDeriv {
    Eigen::Index col0, col1;
    double val0, val1;
};

SlopeDeriv slope_deriv(const TypeGrid& grid, std::size_t i)
{
    const std::size_t n = grid.size();
    if (i + 1 < n) {
        const double inv = 1.0 / grid.gap(i);
        return {static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1),
                -inv, inv};
    }
    const double inv = 1.0 / grid.gap(n - 2);
    return {static_cast<Eigen::Index>(n - 2), static_cast<Eigen::Index>(n - 1),
            -inv, inv};
}

Eigen::VectorXd grad_f_x(const Work& w, const TypeGrid& grid,
                         const Eigen::VectorXd& q, const Scenario& scenario)
{
    const auto n = static_cast<Eigen::Index>(w.n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g[i] += grid.weights[i];
        const auto d = slope_deriv(grid, static_cast<std::size_t>(i));
        const double coeff = -grid.weights[i] * grid.thetas[i];
        g[d.col0] += coeff * d.val0;
        g[d.col1] += coeff * d.val1;
        double acc = 0.0;
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(w.m); ++j)
            acc += w.t1(i, j) * scenario.probs[j] * (q[j] - 1.0);
        g[n + i] = grid.weights[i] * acc;
    }
    return g;
}

Eigen::VectorXd grad_f_q(const Work& w, const TypeGrid& grid,
                         const Scenario& scenario)
{
    const auto m = static_cast<Eigen::Index>(w.m);
    Eigen::VectorXd g(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double claims = 0.0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(w.n); ++i)
            claims += grid.weights[i] * w.t(i, j);
        g[j] = scenario.probs[j] * (-scenario.income[j] + claims);
    }
    return g;
}

Eigen::VectorXd constraint_values(const Work& w, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& q,
                                  const Scenario& scenario,
                                  const SmoothingParams& params, double cap)
{
    const auto n = static_cast<Eigen::Index>(w.n);
    const auto m = static_cast<Eigen::Index>(w.m);
    Eigen::VectorXd g(static_cast<Eigen::Index>(w.ng));
    for (Eigen::Index i = 0; i < n; ++i)
        g[i] = -v[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        g[n + i] = v[i + 1] - v[i];
    for (Eigen::Index i = 0; i < n; ++i) {
        g[2 * n - 1 + i] = w.var[i] + w.slopes[i] - params.eps2;
        g[3 * n - 1 + i] = -w.var[i] - w.slopes[i] - params.eps2;
    }
    double budget = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
        budget += scenario.probs[j] * q[j];
    // Relaxed budget |p.q - 1| <= eps3. The source listing carries sign
    // typos that cap the budget at 1 - eps3 outright; that leaves the
    // system unbounded in the strikes (deep-in-the-money puts sell at fair
    // value while the capped adversary undervalues the liability). The
    // adversary must be able to push the budget above 1 for large strikes
    // to price as a liability, so the symmetric pair is used.
    g[4 * n - 1] = budget - 1.0 - params.eps3;
    g[4 * n] = -budget + 1.0 - params.eps3;
    for (Eigen::Index j = 0; j < m; ++j) {
        g[4 * n + 1 + j] = -q[j];
        g[4 * n + 1 + m + j] = q[j] - cap;
    }
    return g;
}

// Dense constraint Jacobians; ng x 2n and ng x m.
void constraint_jacobians(const Work& w, const TypeGrid& grid,
                          const Scenario& scenario, Eigen::MatrixXd& gx,
                          Eigen::MatrixXd& gq)
{
    const auto n = static_cast<Eigen::Index>(w.n);
    const auto m = static_cast<Eigen::Index>(w.m);
    const auto ng = static_cast<Eigen::Index>(w.ng);
    gx = Eigen::MatrixXd::Zero(ng, 2 * n);
    gq = Eigen::MatrixXd::Zero(ng, m);

    for (Eigen::Index i = 0; i < n; ++i)
        gx(i, i) = -1.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        gx(n + i, i) = -1.0;
        gx(n + i, i + 1) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto d = slope_deriv(grid, static_cast<std::size_t>(i));
        gx(2 * n - 1 + i, d.col0) = d.val0;
        gx(2 * n - 1 + i, d.col1) = d.val1;
        gx(2 * n - 1 + i, n + i) = w.var_k[i];
        gx(3 * n - 1 + i, d.col0) = -d.val0;
        gx(3 * n - 1 + i, d.col1) = -d.val1;
        gx(3 * n - 1 + i, n + i) = -w.var_k[i];
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        gq(4 * n - 1, j) = scenario.probs[j];
        gq(4 * n, j) = -scenario.probs[j];
        gq(4 * n + 1 + j, j) = -1.0;
        gq(4 * n + 1 + m + j, j) = 1.0;
    }
}

} // namespace

double objective(const Eigen::VectorXd& v, const Eigen::VectorXd& strikes,
                 const Eigen::VectorXd& q, const Scenario& scenario,
                 const TypeGrid& grid, const SmoothingParams& params)
{
    const Work w = build_work(v, strikes, scenario, grid, params);
    double value = risk_term(v, strikes, q, scenario, grid, params);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(w.n); ++i)
        value += grid.weights[i] *
                 (v[i] - grid.thetas[i] * w.slopes[i] - w.et[i]);
    return value;
}

double risk_term(const Eigen::VectorXd& v, const Eigen::VectorXd& strikes,
                 const Eigen::VectorXd& q, const Scenario& scenario,
                 const TypeGrid& grid, const SmoothingParams& params)
{
    const Work w = build_work(v, strikes, scenario, grid, params);
    if (static_cast<std::size_t>(q.size()) != w.m)
        throw shape_error("minimax: q length does not match the scenario");
    double value = 0.0;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(w.m); ++j) {
        double claims = 0.0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(w.n); ++i)
            claims += grid.weights[i] * w.t(i, j);
        value += scenario.probs[j] * q[j] * (-scenario.income[j] + claims);
    }
    return value;
}

Eigen::VectorXd constraints(const Eigen::VectorXd& v,
                            const Eigen::VectorXd& strikes,
                            const Eigen::VectorXd& q, const Scenario& scenario,
                            const TypeGrid& grid, const SmoothingParams& params,
                            double cap)
{
    params.validate();
    const Work w = build_work(v, strikes, scenario, grid, params);
    return constraint_values(w, v, q, scenario, params, cap);
}

Eigen::VectorXd kkt_residual(const KKTState& state, const Scenario& scenario,
                             const TypeGrid& grid,
                             const SmoothingParams& params,
                             const SolverConfig& config)
{
    const Work w = build_work(state.v, state.strikes, scenario, grid, params);
    const auto n = static_cast<Eigen::Index>(w.n);
    const auto m = static_cast<Eigen::Index>(w.m);
    const auto ng = static_cast<Eigen::Index>(w.ng);
    if (state.s.size() != ng || state.z.size() != ng)
        throw shape_error("kkt_residual: slack/multiplier length mismatch");

    Eigen::MatrixXd gx, gq;
    constraint_jacobians(w, grid, scenario, gx, gq);
    const Eigen::VectorXd g =
        constraint_values(w, state.v, state.q, scenario, params, config.cap);

    Eigen::VectorXd f(2 * n + m + 2 * ng);
    f.segment(0, 2 * n) =
        grad_f_x(w, grid, state.q, scenario) + gx.transpose() * state.z;
    f.segment(2 * n, m) =
        grad_f_q(w, grid, scenario) - gq.transpose() * state.z;
    f.segment(2 * n + m, ng) =
        state.z.cwiseProduct(state.s).array() - config.mu;
    f.segment(2 * n + m + ng, ng) = g + state.s;
    return f;
}

NewtonStep newton_step(const KKTState& state, const Scenario& scenario,
                       const TypeGrid& grid, const SmoothingParams& params,
                       const SolverConfig& config)
{
    if ((state.s.array() <= 0.0).any() || (state.z.array() <= 0.0).any())
        throw infeasible_error("newton_step: slacks and multipliers must be positive");

    const Work w = build_work(state.v, state.strikes, scenario, grid, params);
    const auto n = static_cast<Eigen::Index>(w.n);
    const auto m = static_cast<Eigen::Index>(w.m);
    const auto ng = static_cast<Eigen::Index>(w.ng);
    const Eigen::Index dim = 2 * n + m + 2 * ng;

    Eigen::MatrixXd gx, gq;
    constraint_jacobians(w, grid, scenario, gx, gq);

    const Eigen::VectorXd f =
        kkt_residual(state, scenario, grid, params, config);

    Eigen::MatrixXd df = Eigen::MatrixXd::Zero(dim, dim);
    // Rows x: Hessian of f + z.g in x, mixed x-q block, and Gx^T.
    for (Eigen::Index i = 0; i < n; ++i) {
        double hkk = 0.0;
        for (Eigen::Index j = 0; j < m; ++j)
            hkk += w.t2(i, j) * scenario.probs[j] * (state.q[j] - 1.0);
        hkk *= grid.weights[i];
        hkk += (state.z[2 * n - 1 + i] - state.z[3 * n - 1 + i]) * w.var_kk[i];
        df(n + i, n + i) = hkk;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double mixed = grid.weights[i] * w.t1(i, j) * scenario.probs[j];
            df(n + i, 2 * n + j) = mixed; // d grad_K f / d q
            df(2 * n + j, n + i) = mixed; // d grad_q f / d K
        }
    }
    df.block(0, 2 * n + m + ng, 2 * n, ng) = gx.transpose();
    // Rows q: the maximizer block carries the sign flip on the multipliers.
    df.block(2 * n, 2 * n + m + ng, m, ng) = -gq.transpose();
    // Complementarity rows.
    for (Eigen::Index k = 0; k < ng; ++k) {
        df(2 * n + m + k, 2 * n + m + k) = state.z[k];
        df(2 * n + m + k, 2 * n + m + ng + k) = state.s[k];
    }
    // Primal feasibility rows.
    df.block(2 * n + m + ng, 0, ng, 2 * n) = gx;
    df.block(2 * n + m + ng, 2 * n, ng, m) = gq;
    df.block(2 * n + m + ng, 2 * n + m, ng, ng) =
        Eigen::MatrixXd::Identity(ng, ng);

    // Dense LU with escalating diagonal regularization on failure.
    Eigen::VectorXd d;
    bool solved = false;
    const double fnorm = f.norm();
    for (double delta : {0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
        Eigen::MatrixXd reg = df;
        if (delta > 0.0)
            reg.diagonal().array() += delta;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(reg);
        d = lu.solve(-f);
        if (!d.allFinite())
            continue;
        const double resid = (reg * d + f).norm();
        if (resid <= 1e-8 * std::max(1.0, fnorm)) {
            solved = true;
            break;
        }
    }
    if (!solved) {
        std::ostringstream os;
        os << "newton_step: singular KKT matrix beyond regularization "
           << "(dim " << dim << ", |F| = " << fnorm << ")";
        throw error(os.str());
    }

    // Largest step keeping slacks and multipliers positive, then the
    // fraction-to-boundary damping min(tau * alpha_max, 1).
    const auto ds = d.segment(2 * n + m, ng);
    const auto dz = d.segment(2 * n + m + ng, ng);
    double alpha_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < ng; ++k) {
        if (ds[k] < 0.0)
            alpha_max = std::min(alpha_max, -state.s[k] / ds[k]);
        if (dz[k] < 0.0)
            alpha_max = std::min(alpha_max, -state.z[k] / dz[k]);
    }
    const double step = std::min(config.tau * alpha_max, 1.0);

    NewtonStep out;
    out.state = state;
    out.state.v += step * d.segment(0, n);
    out.state.strikes += step * d.segment(n, n);
    out.state.q += step * d.segment(2 * n, m);
    out.state.s += step * ds;
    out.state.z += step * dz;
    out.step_length = step;
    return out;
}

MinimaxSolution solve_minimax(const Scenario& scenario, const TypeGrid& grid,
                              const SmoothingParams& params,
                              const SolverConfig& config, const KKTState& init)
{
    params.validate();
    config.validate();
    scenario.validate();
    grid.validate();
    if (grid.size() < 2)
        throw validation_error("solve_minimax: needs at least two types");
    const std::size_t ng = constraint_count(grid.size(), scenario.size());
    if (init.types() != grid.size() || init.states() != scenario.size() ||
        init.ng() != ng)
        throw shape_error("solve_minimax: initial state has wrong dimensions");
    if ((init.s.array() <= 0.0).any() || (init.z.array() <= 0.0).any())
        throw infeasible_error(
            "solve_minimax: initial slacks and multipliers must be positive");

    MinimaxSolution sol;
    sol.risk_before = avar_dual(scenario, scenario.income, config.cap).risk;

    KKTState state = init;
    int total_iters = 0;

    auto log_record = [&](double norm, double step, double mu) {
        sol.trace.push_back({total_iters, norm,  step,
                             objective(state.v, state.strikes, state.q,
                                       scenario, grid, params),
                             mu});
    };

    // One barrier stage: Newton until the residual norm drops below mu.
    auto run_stage = [&](double mu, int iter_cap, double tau) {
        SolverConfig staged = config;
        staged.mu = mu;
        staged.tau = tau;
        double norm = kkt_residual(state, scenario, grid, params, staged).norm();
        KKTState best = state;
        double best_norm = norm;
        int iters = 0;
        while (norm > mu && iters < iter_cap) {
            const NewtonStep step =
                newton_step(state, scenario, grid, params, staged);
            state = step.state;
            norm = kkt_residual(state, scenario, grid, params, staged).norm();
            ++iters;
            ++total_iters;
            log_record(norm, step.step_length, mu);
            if (norm < best_norm) {
                best_norm = norm;
                best = state;
            }
        }
        if (norm > mu)
            state = best; // keep the lowest-residual iterate of a failed stage
        return norm <= mu;
    };

    {
        SolverConfig first = config;
        first.mu = config.mu;
        const double norm0 =
            kkt_residual(state, scenario, grid, params, first).norm();
        log_record(norm0, 0.0, config.mu);
    }

    const int first_cap = config.mode == BarrierMode::refined
                              ? std::max(config.max_iter, config.stage_iters)
                              : config.max_iter;
    bool ok = run_stage(config.mu, first_cap, config.tau);
    if (config.mode == BarrierMode::refined && ok) {
        double mu = config.mu;
        while (mu > config.mu_min && ok) {
            mu = std::max(mu * config.sigma, config.mu_min);
            ok = run_stage(mu, config.stage_iters, config.tau_refined);
        }
    }

    sol.converged = ok;
    sol.iterations = total_iters;
    sol.state = state;
    sol.v = ValueFunction(
        std::vector<double>(state.v.data(), state.v.data() + state.v.size()));
    sol.strikes.assign(state.strikes.data(),
                       state.strikes.data() + state.strikes.size());
    sol.weights.q.assign(state.q.data(), state.q.data() + state.q.size());
    sol.risk_after =
        risk_term(state.v, state.strikes, state.q, scenario, grid, params);
    sol.objective =
        objective(state.v, state.strikes, state.q, scenario, grid, params);
    sol.income = sol.risk_after - sol.objective;
    return sol;
}

double invert_variance(const Scenario& scenario, double target, double eps)
{
    if (!(eps > 0.0))
        throw validation_error("invert_variance: eps must be positive");
    if (!(target >= 0.0))
        throw validation_error("invert_variance: target must be nonnegative");

    double wmax = 0.0;
    for (double w : scenario.income)
        wmax = std::max(wmax, std::abs(w));
    const double hi = wmax + eps;

    auto variance_at = [&](double strike) {
        Position t(scenario.size());
        for (std::size_t j = 0; j < scenario.size(); ++j)
            t[j] = smoothed_plus(strike - std::abs(scenario.income[j]), eps);
        return scenario.variance(t);
    };

    const double plateau = variance_at(hi);
    if (target > plateau + 1e-12)
        throw infeasible_error(
            "invert_variance: target exceeds the plateau variance");
    const double goal = std::min(target, plateau);
    if (variance_at(0.0) > goal)
        throw infeasible_error(
            "invert_variance: target below the variance at zero strike");
    return num::bisect_increasing(
        [&](double k) { return variance_at(k) - goal; }, 0.0, hi,
        1e-13 * std::max(1.0, hi));
}

} // namespace riskcontract
