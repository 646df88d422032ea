#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "riskcontract/risk.hpp"
#include "riskcontract/scenario.hpp"

namespace riskcontract {

/// Relaxation constants of the discretized saddle-point problem.
struct SmoothingParams {
    double eps = 0.1;  // payoff smoothing half-width
    double eps2 = 0.1; // variance-equality relaxation
    double eps3 = 0.2; // dual-budget relaxation
    void validate() const;
};

enum class BarrierMode { paper_faithful, refined };

struct SolverConfig {
    double tau = 0.1;    // fraction-to-boundary factor
    double mu = 0.1;     // barrier parameter, doubles as the stopping norm
    double rho = 0.5;    // declared penalty weight; recorded, never used
    int max_iter = 40;   // Newton iteration cap (per barrier stage)
    double cap = 1.1;    // dual weight bound
    BarrierMode mode = BarrierMode::paper_faithful;
    double sigma = 0.2;    // barrier reduction factor in refined mode
    double mu_min = 1e-8;  // final barrier value in refined mode
    int stage_iters = 200; // per-stage cap for the refined continuation
    double tau_refined = 0.95; // boundary fraction for continuation stages
    void validate() const;
};

/// Number of inequality constraints for n types and m states: the stack
/// holds n sign bounds on v, n-1 monotonicity bounds, 2n relaxed variance
/// equalities, 2 budget bounds and 2m bounds on q.
constexpr std::size_t constraint_count(std::size_t n, std::size_t m)
{
    return 4 * n + 1 + 2 * m;
}

/// Full primal-dual iterate: values v, strikes K, dual weights q, slacks s
/// and multipliers z. Slacks and multipliers must stay strictly positive.
struct KKTState {
    Eigen::VectorXd v;
    Eigen::VectorXd strikes;
    Eigen::VectorXd q;
    Eigen::VectorXd s;
    Eigen::VectorXd z;

    std::size_t types() const { return static_cast<std::size_t>(v.size()); }
    std::size_t states() const { return static_cast<std::size_t>(q.size()); }
    std::size_t ng() const { return static_cast<std::size_t>(s.size()); }

    /// Documented reference start: v descending to zero in unit steps,
    /// unit strikes and dual weights, s = 0.1, z = 1.
    static KKTState reference_start(std::size_t n, std::size_t m);

    static KKTState make(const std::vector<double>& v0,
                         const std::vector<double>& k0,
                         const std::vector<double>& q0,
                         const std::vector<double>& s0,
                         const std::vector<double>& z0);
};

/// Differentiable surrogate of max(d, 0): zero below -eps, identity above
/// +eps, the quadratic (d+eps)^2 / (4 eps) in between. C^1 everywhere.
double smoothed_plus(double d, double eps);
/// First derivative of smoothed_plus in d.
double smoothed_plus_slope(double d, double eps);
/// Second derivative (piecewise constant).
double smoothed_plus_curvature(double d, double eps);

/// Saddle objective
///   F(v,K,q) = -sum_j W_j p_j q_j + sum_i M_i sum_j T_ij p_j q_j
///              - sum_i M_i E[T_i] + sum_i M_i (v_i - theta_i v'_i)
/// with the smoothed put payoffs T_ij = smoothed_plus(K_i - |W_j|, eps):
/// inner risk of the net position under dual weights q minus the catalogue
/// income under binding variances.
double objective(const Eigen::VectorXd& v, const Eigen::VectorXd& strikes,
                 const Eigen::VectorXd& q, const Scenario& scenario,
                 const TypeGrid& grid, const SmoothingParams& params);

/// The inner risk part of the objective alone (first two terms).
double risk_term(const Eigen::VectorXd& v, const Eigen::VectorXd& strikes,
                 const Eigen::VectorXd& q, const Scenario& scenario,
                 const TypeGrid& grid, const SmoothingParams& params);

/// Constraint stack g(v,K,q) <= 0, in order: -v_i; v_{i+1} - v_i;
/// Var[T_i] + v'_i - eps2; -Var[T_i] - v'_i - eps2; the relaxed budget pair
/// |p.q - 1| <= eps3; -q_j; q_j - cap.
Eigen::VectorXd constraints(const Eigen::VectorXd& v,
                            const Eigen::VectorXd& strikes,
                            const Eigen::VectorXd& q, const Scenario& scenario,
                            const TypeGrid& grid, const SmoothingParams& params,
                            double cap);

/// Stacked KKT residual
///   [ grad_x f + grad_x g^T z ; grad_q f - grad_q g^T z ; Z S e - mu e ;
///     g + s ]
/// with the sign flip on the q block because q maximizes.
Eigen::VectorXd kkt_residual(const KKTState& state, const Scenario& scenario,
                             const TypeGrid& grid,
                             const SmoothingParams& params,
                             const SolverConfig& config);

struct NewtonStep {
    KKTState state;
    double step_length = 0.0;
};

/// One damped Newton step on the KKT system: solve DF d = -F by dense
/// partial-pivot LU (with escalating diagonal regularization when the
/// factorization fails), then advance by min(tau * alpha_max, 1) where
/// alpha_max is the largest step keeping s and z positive.
NewtonStep newton_step(const KKTState& state, const Scenario& scenario,
                       const TypeGrid& grid, const SmoothingParams& params,
                       const SolverConfig& config);

struct IterationRecord {
    int iteration = 0;
    double residual_norm = 0.0;
    double step_length = 0.0;
    double objective = 0.0;
    double mu = 0.0;
};

struct MinimaxSolution {
    ValueFunction v;
    std::vector<double> strikes;
    DualWeights weights;
    double risk_before = 0.0; // exact dual risk of the bare income
    double risk_after = 0.0;  // risk term of the objective at the solution
    double objective = 0.0;   // full objective at the solution
    double income = 0.0;      // catalogue income at the solution
    int iterations = 0;
    bool converged = false;
    KKTState state;
    std::vector<IterationRecord> trace;
};

/// Iterate newton_step until ||F||_2 <= mu or the iteration cap. In
/// refined mode, continue with the geometric barrier schedule
/// mu <- sigma * mu down to mu_min, re-solving each stage. Non-convergence
/// returns the best (lowest residual) iterate with `converged` unset.
MinimaxSolution solve_minimax(const Scenario& scenario, const TypeGrid& grid,
                              const SmoothingParams& params,
                              const SolverConfig& config, const KKTState& init);

/// Strike whose smoothed put payoff on |W| has the target variance, by
/// bisection of the non-decreasing variance map over
/// [0, max |W| + eps]. Ties break toward the smallest strike. Throws
/// infeasible_error when the target exceeds the plateau variance.
double invert_variance(const Scenario& scenario, double target, double eps);

} // namespace riskcontract
