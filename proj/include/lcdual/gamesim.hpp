// gamesim.hpp -- Monte Carlo certification of the controller/stopper game:
// payoff estimates under barrier controls and threshold stopping, saddle-point
// inequality battery, budget identity, and primal-value consistency.
#pragma once

#include "lcdual/dualvalue.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lcdual {

struct SimConfig {
    std::int64_t n_paths = 200'000;
    double dt = 1.0 / 250.0;
    double horizon = 200.0; // years; truncation bound must stay below stderr
    std::uint64_t seed = 74025;
    bool antithetic = true;
    int threads = 0;        // 0 = hardware concurrency
    bool dt_probe = true;   // re-estimate at 2*dt for a discretization probe
    int probe_divisor = 4;  // probe uses n_paths / probe_divisor paths

    void validate() const;
};

// Controller reflects the dual state at control_barrier; stopper quits the
// game the first grid time the state is below stop_threshold.
struct StrategyPair {
    double control_barrier;  // b
    double stop_threshold;   // a, with a < b
};

struct SimOutcome {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_stopped = 0;
    double mean_stop_time = 0.0; // years, over stopped paths
    double truncation_bound = 0.0;
    bool truncation_warning = false;
    double dt_bias_probe = 0.0; // estimate at 2*dt (0 when probing disabled)
    double probe_stderr = 0.0;
};

// Diagnostic single-path record on the time grid.
struct PathRecord {
    std::vector<double> t, Y, D, Z;
    std::int64_t stop_index = -1; // grid index of stopping, -1 if never
};

// Exact lognormal stepping of Y; the running maximum is refined with the exact
// within-step bridge maximum so the reflection carries no monitoring bias.
// Stopping is still detected at grid times.
PathRecord simulate_Z_path(double y0, const StrategyPair& pair, const SimConfig& cfg,
                           std::uint64_t path_id, const MarketParams& market,
                           const DerivedParams& derived);

// Game payoff estimate: discounted flow payoff up to the stop, plus the
// discounted retired value at the stop. sol supplies the payoff branches and
// the retired-value closure; truncation at the horizon is reported, not fixed.
SimOutcome estimate_J0(double y0, const StrategyPair& pair, const SimConfig& cfg,
                       const DualSolution& sol);

struct NashEntry {
    StrategyPair pair{};
    std::string side; // "equilibrium", "stopper", "controller"
    SimOutcome outcome{};
    double oracle = 0.0;       // Q(y0)
    double margin_sigma = 0.0; // (estimate - oracle) / stderr
    bool pass = false;
};

struct NashReport {
    double y0 = 0.0;
    double q_oracle = 0.0;
    std::vector<NashEntry> entries; // equilibrium first
    bool pass = false;
};

// Equilibrium estimate must sit within 3 stderr of Q(y0); stopper-side
// deviations must not beat Q(y0) from above, controller-side not from below.
NashReport verify_nash(double y0, const SimConfig& cfg, const DualSolution& sol,
                       std::span<const StrategyPair> perturbations);

// Two stopper-side and two controller-side deviations around the equilibrium.
std::vector<StrategyPair> default_perturbations(const Thresholds& th, double y0);

struct BudgetReport {
    double y0 = 0.0;
    double oracle = 0.0; // -Q'(y0)
    SimOutcome unweighted;
    SimOutcome weighted;
    double diff_mean = 0.0; // unweighted - weighted, per-sample mean
    double diff_stderr = 0.0;
    bool pass_unweighted = false;
    bool pass_weighted = false;
    bool pass_agree = false;
    bool pass = false;
};

// Discounted replication cost of the equilibrium consumption/income stream,
// with and without the control weighting; both must reproduce -Q'(y0).
// Paths alive at the horizon close with the dual wealth -Q'(Z_T).
BudgetReport verify_budget_identity(double y0, const SimConfig& cfg,
                                    const DualSolution& sol);

struct PrimalReport {
    double y0 = 0.0;
    double x0 = 0.0;     // -Q'(y0)
    double oracle = 0.0; // V(x0)
    SimOutcome outcome;
    double margin_sigma = 0.0;
    bool pass = false;
};

// Realized discounted utility of the optimal consumption/job plan, closed at
// retirement with the retired value and at the horizon with V(-Q'(Z_T)).
PrimalReport estimate_primal_value(double y0, const SimConfig& cfg,
                                   const DualSolution& sol);

} // namespace lcdual
