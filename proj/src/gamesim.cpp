#include "lcdual/gamesim.hpp"

#include "lcdual/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace lcdual {

namespace {

// Branch-resolved flow evaluations with precomputed constants; the power/log
// families reduce to one exp and one sqrt-or-exp per grid point.
struct StepKernel {
    UtilityFamily fam = UtilityFamily::Custom;
    const UtilityModel* util = nullptr;
    double z_S = 0.0;
    double kappa[2]{}, eps[2]{};
    double p = 0.0;
    double flow_c[2]{}, u_c[2]{}, chat_c[2]{}; // power family
    double log_c[2]{}, log_u[2]{};             // log family

    static StepKernel make(const SwitchFunctions& sw) {
        StepKernel k;
        k.util = sw.util;
        k.fam = sw.util->family();
        k.z_S = sw.z_S;
        k.kappa[0] = sw.agent.kappa1;
        k.kappa[1] = sw.agent.kappa2;
        k.eps[0] = sw.agent.eps1;
        k.eps[1] = sw.agent.eps2;
        if (k.fam == UtilityFamily::Crra) {
            const double g = sw.util->crra_gamma();
            k.p = (g - 1.0) / g;
            for (int i = 0; i < 2; ++i) {
                const double kp = std::pow(k.kappa[i], -k.p);
                k.flow_c[i] = g / (1.0 - g) * kp;
                k.u_c[i] = kp / (1.0 - g);
                k.chat_c[i] = kp;
            }
        } else if (k.fam == UtilityFamily::Log) {
            for (int i = 0; i < 2; ++i) {
                k.log_c[i] = std::log(k.kappa[i]) - 1.0; // conj(z/kappa) = -ln z + log_c
                k.log_u[i] = std::log(k.kappa[i]);
            }
        }
        return k;
    }

    int branch(double Z) const { return Z > z_S ? 0 : 1; }

    double zpow(double Z, double lnZ) const {
        return p == 0.5 ? std::sqrt(Z) : std::exp(p * lnZ);
    }

    // conjugate(Z/kappa) + eps Z on the active branch
    double flow(double Z, double lnZ, double zp) const {
        const int i = branch(Z);
        switch (fam) {
            case UtilityFamily::Crra: return flow_c[i] * zp + eps[i] * Z;
            case UtilityFamily::Log: return -lnZ + log_c[i] + eps[i] * Z;
            default: return util->conjugate(Z / kappa[i]) + eps[i] * Z;
        }
    }

    // u(kappa * c_hat(Z)) = u(inv_marginal(Z/kappa))
    double uofc(double Z, double lnZ, double zp) const {
        const int i = branch(Z);
        switch (fam) {
            case UtilityFamily::Crra: return u_c[i] * zp;
            case UtilityFamily::Log: return log_u[i] - lnZ;
            default: return util->u(util->inv_marginal(Z / kappa[i]));
        }
    }

    // c_hat(Z) - eps_hat(Z)
    double cmeps(double Z, double lnZ, double zp) const {
        const int i = branch(Z);
        switch (fam) {
            case UtilityFamily::Crra: return chat_c[i] * zp / Z - eps[i];
            case UtilityFamily::Log: return 1.0 / Z - eps[i];
            default:
                return util->inv_marginal(Z / kappa[i]) / kappa[i] - eps[i];
        }
    }
};

// Linear interpolation on a log-spaced grid; out-of-range points fall back to
// the exact evaluator. Used only inside Monte Carlo terminal closures where
// the interpolation error is far below the statistical noise.
class LogGridCache {
public:
    LogGridCache() = default;
    LogGridCache(std::function<double(double)> exact, double lo, double hi, int n)
        : exact_(std::move(exact)), ln_lo_(std::log(lo)), ln_hi_(std::log(hi)), n_(n) {
        v_.resize(n_ + 1);
        for (int i = 0; i <= n_; ++i)
            v_[i] = exact_(std::exp(ln_lo_ + (ln_hi_ - ln_lo_) * i / n_));
        inv_dx_ = n_ / (ln_hi_ - ln_lo_);
    }

    double operator()(double z) const {
        const double lnz = std::log(z);
        if (lnz < ln_lo_ || lnz > ln_hi_) return exact_(z);
        const double u = (lnz - ln_lo_) * inv_dx_;
        const int i = std::min(static_cast<int>(u), n_ - 1);
        const double w = u - i;
        return v_[i] * (1.0 - w) + v_[i + 1] * w;
    }

    bool empty() const { return v_.empty(); }

private:
    std::function<double(double)> exact_;
    double ln_lo_ = 0.0, ln_hi_ = 1.0, inv_dx_ = 1.0;
    int n_ = 0;
    std::vector<double> v_;
};

struct Functionals {
    bool j0 = false, budget = false, budget_weighted = false, primal = false;
};

struct Oracles {
    std::function<double(double)> JR, XR; // stopped-path closures
    LogGridCache Q, mQp;                  // horizon closures (budget/primal)
};

struct Moments {
    double sum = 0.0, sum2 = 0.0;
    std::int64_t n = 0;
    void add(double v) {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    void merge(const Moments& o) {
        sum += o.sum;
        sum2 += o.sum2;
        n += o.n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double se() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sum2 - static_cast<double>(n) * m * m) /
                                             static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

struct ChunkResult {
    Moments j0, bud, budw, pri, diff;
    std::int64_t n_stopped = 0;
    double stop_time_sum = 0.0;
};

struct RunConsts {
    double y0, lnb, a, delta, r, theta;
    double dt, drift_dt, vol_dt, two_var, edt;
    std::int64_t n_steps;
};

struct MemberValues {
    double j0 = 0.0, bud = 0.0, budw = 0.0, pri = 0.0;
    bool stopped = false;
    double stop_time = 0.0;
};

// Walks one antithetic pair (or one path when sgn1 == 0) on the shared grid.
template <bool kJ0, bool kBud, bool kBudW, bool kPri>
void walk_pair(const RunConsts& rc, const StepKernel& kern, const Oracles& orc,
               Xoshiro256pp& rng, bool antithetic, MemberValues out[2]) {
    const int nm = antithetic ? 2 : 1;
    double lnY[2], lnM[2], acc[2][4], w_prev[2][4];
    bool done[2] = {false, false};
    const double ln_y0 = std::log(rc.y0);

    const double lnD0 = std::min(0.0, rc.lnb - ln_y0);
    const double Z0 = std::exp(ln_y0 + lnD0);
    const double lnZ0 = ln_y0 + lnD0;
    const double zp0 = kern.zpow(Z0, lnZ0);
    for (int m = 0; m < nm; ++m) {
        lnY[m] = ln_y0;
        lnM[m] = ln_y0;
        for (double* a4 : {acc[m], w_prev[m]}) std::fill(a4, a4 + 4, 0.0);
        if (Z0 < rc.a) {
            // stopped before any step: the retired closure at the start state
            const double D0 = std::exp(lnD0);
            if constexpr (kJ0) out[m].j0 = orc.JR(Z0);
            if constexpr (kBud) out[m].bud = Z0 / (rc.y0 * D0) * orc.XR(Z0);
            if constexpr (kBudW) out[m].budw = Z0 / rc.y0 * orc.XR(Z0);
            if constexpr (kPri) out[m].pri = orc.JR(Z0) + Z0 * orc.XR(Z0);
            out[m].stopped = true;
            out[m].stop_time = 0.0;
            done[m] = true;
        } else {
            const double D0 = std::exp(lnD0);
            const double H0 = Z0 / (rc.y0 * D0);
            if constexpr (kJ0) w_prev[m][0] = kern.flow(Z0, lnZ0, zp0);
            if constexpr (kBud) w_prev[m][1] = H0 * kern.cmeps(Z0, lnZ0, zp0);
            if constexpr (kBudW) w_prev[m][2] = H0 * D0 * kern.cmeps(Z0, lnZ0, zp0);
            if constexpr (kPri) w_prev[m][3] = kern.uofc(Z0, lnZ0, zp0);
        }
    }

    double disc = 1.0;
    double t = 0.0;
    for (std::int64_t k = 1; k <= rc.n_steps; ++k) {
        if (done[0] && (nm < 2 || done[1])) break;
        t += rc.dt;
        disc *= rc.edt;
        const double xi = rng.normal();
        const double lnU = std::log(rng.uniform());
        const double xi_m[2] = {xi, -xi};

        for (int m = 0; m < nm; ++m) {
            if (done[m]) continue;
            const double d = rc.drift_dt - rc.vol_dt * xi_m[m];
            const double lnY_new = lnY[m] + d;
            // exact within-step maximum of the driving log-state
            const double bridge = 0.5 * (lnY[m] + lnY_new +
                                         std::sqrt(d * d - rc.two_var * lnU));
            lnM[m] = std::max(lnM[m], bridge);
            lnY[m] = lnY_new;
            const double lnD = std::min(0.0, rc.lnb - lnM[m]);
            const double lnZ = lnY[m] + lnD;
            const double Z = std::exp(lnZ);
            const double zp = kern.zpow(Z, lnZ);

            double H = 0.0, D = 0.0;
            if constexpr (kBud || kBudW) {
                D = std::exp(lnD);
                H = Z * disc / (rc.y0 * D);
            }
            double w_cur[4] = {0.0, 0.0, 0.0, 0.0};
            if constexpr (kJ0) w_cur[0] = disc * kern.flow(Z, lnZ, zp);
            if constexpr (kBud) w_cur[1] = H * kern.cmeps(Z, lnZ, zp);
            if constexpr (kBudW) w_cur[2] = H * D * kern.cmeps(Z, lnZ, zp);
            if constexpr (kPri) w_cur[3] = disc * kern.uofc(Z, lnZ, zp);
            for (int i = 0; i < 4; ++i) {
                acc[m][i] += 0.5 * (w_prev[m][i] + w_cur[i]) * rc.dt;
                w_prev[m][i] = w_cur[i];
            }

            if (Z < rc.a) {
                if constexpr (kJ0) out[m].j0 = acc[m][0] + disc * orc.JR(Z);
                if constexpr (kBud) out[m].bud = acc[m][1] + H * orc.XR(Z);
                if constexpr (kBudW) out[m].budw = acc[m][2] + H * D * orc.XR(Z);
                if constexpr (kPri)
                    out[m].pri = acc[m][3] + disc * (orc.JR(Z) + Z * orc.XR(Z));
                out[m].stopped = true;
                out[m].stop_time = t;
                done[m] = true;
            }
        }
    }

    for (int m = 0; m < nm; ++m) {
        if (done[m]) continue;
        const double lnD = std::min(0.0, rc.lnb - lnM[m]);
        const double lnZ = lnY[m] + lnD;
        const double Z = std::exp(lnZ);
        if constexpr (kJ0) out[m].j0 = acc[m][0]; // truncation reported by caller
        if constexpr (kBud || kBudW) {
            const double D = std::exp(lnD);
            const double H = Z * disc / (rc.y0 * D);
            const double closure = orc.mQp(Z);
            if constexpr (kBud) out[m].bud = acc[m][1] + H * closure;
            if constexpr (kBudW) out[m].budw = acc[m][2] + H * D * closure;
        }
        if constexpr (kPri)
            out[m].pri = acc[m][3] + disc * (orc.Q(Z) + Z * orc.mQp(Z));
    }
}

using WalkFn = void (*)(const RunConsts&, const StepKernel&, const Oracles&,
                        Xoshiro256pp&, bool, MemberValues[2]);

WalkFn select_walk(const Functionals& f) {
    const int key = (f.j0 ? 8 : 0) | (f.budget ? 4 : 0) | (f.budget_weighted ? 2 : 0) |
                    (f.primal ? 1 : 0);
    switch (key) {
        case 8: return &walk_pair<true, false, false, false>;
        case 4: return &walk_pair<false, true, false, false>;
        case 6: return &walk_pair<false, true, true, false>;
        case 1: return &walk_pair<false, false, false, true>;
        case 15: return &walk_pair<true, true, true, true>;
        default: return &walk_pair<true, true, true, true>;
    }
}

struct RunResult {
    Moments j0, bud, budw, pri, diff;
    std::int64_t n_stopped = 0;
    double stop_time_sum = 0.0;
    std::int64_t n_samples = 0;
};

RunResult run_paths(double y0, const StrategyPair& pair, const SimConfig& cfg,
                    const SwitchFunctions& sw, const MarketParams& market,
                    const DerivedParams& derived, const Oracles& orc,
                    const Functionals& fn) {
    if (!(pair.stop_threshold < pair.control_barrier))
        throw ValidationError("strategy pair requires stop_threshold < control_barrier");
    if (!(y0 > 0.0)) throw ValidationError("y0 must be positive");

    RunConsts rc;
    rc.y0 = y0;
    rc.lnb = std::log(pair.control_barrier);
    rc.a = pair.stop_threshold;
    rc.delta = market.delta;
    rc.r = market.r;
    rc.theta = derived.theta;
    rc.dt = cfg.dt;
    rc.drift_dt = (market.delta - market.r - 0.5 * derived.theta * derived.theta) * cfg.dt;
    rc.vol_dt = derived.theta * std::sqrt(cfg.dt);
    rc.two_var = 2.0 * derived.theta * derived.theta * cfg.dt;
    rc.edt = std::exp(-market.delta * cfg.dt);
    rc.n_steps = std::llround(cfg.horizon / cfg.dt);

    const StepKernel kern = StepKernel::make(sw);
    const WalkFn walk = select_walk(fn);

    const std::int64_t n_units =
        cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths; // pairs or paths
    constexpr std::int64_t kChunk = 512;
    const std::int64_t n_chunks = (n_units + kChunk - 1) / kChunk;
    std::vector<ChunkResult> chunks(static_cast<std::size_t>(n_chunks));

    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
        std::int64_t c;
        while ((c = next.fetch_add(1)) < n_chunks) {
            ChunkResult& out = chunks[static_cast<std::size_t>(c)];
            const std::int64_t lo = c * kChunk;
            const std::int64_t hi = std::min(n_units, lo + kChunk);
            for (std::int64_t u = lo; u < hi; ++u) {
                Xoshiro256pp rng(cfg.seed, static_cast<std::uint64_t>(u));
                MemberValues mv[2];
                walk(rc, kern, orc, rng, cfg.antithetic, mv);
                const int nm = cfg.antithetic ? 2 : 1;
                for (int m = 0; m < nm; ++m) {
                    if (mv[m].stopped) {
                        ++out.n_stopped;
                        out.stop_time_sum += mv[m].stop_time;
                    }
                }
                auto sample = [&](auto pick) {
                    return cfg.antithetic ? 0.5 * (pick(mv[0]) + pick(mv[1]))
                                          : pick(mv[0]);
                };
                if (fn.j0) out.j0.add(sample([](const MemberValues& v) { return v.j0; }));
                if (fn.budget)
                    out.bud.add(sample([](const MemberValues& v) { return v.bud; }));
                if (fn.budget_weighted)
                    out.budw.add(sample([](const MemberValues& v) { return v.budw; }));
                if (fn.primal)
                    out.pri.add(sample([](const MemberValues& v) { return v.pri; }));
                if (fn.budget && fn.budget_weighted)
                    out.diff.add(sample(
                        [](const MemberValues& v) { return v.bud - v.budw; }));
            }
        }
    };

    int n_threads = cfg.threads > 0
                        ? cfg.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // fixed-order reduction: identical result for any thread count
    RunResult res;
    for (const auto& c : chunks) {
        res.j0.merge(c.j0);
        res.bud.merge(c.bud);
        res.budw.merge(c.budw);
        res.pri.merge(c.pri);
        res.diff.merge(c.diff);
        res.n_stopped += c.n_stopped;
        res.stop_time_sum += c.stop_time_sum;
    }
    res.n_samples = cfg.antithetic ? 2 * n_units : n_units;
    return res;
}

SimOutcome outcome_from(const Moments& m, const RunResult& rr, double bound) {
    SimOutcome o;
    o.estimate = m.mean();
    o.stderr_ = m.se();
    o.n_stopped = rr.n_stopped;
    o.mean_stop_time =
        rr.n_stopped > 0 ? rr.stop_time_sum / static_cast<double>(rr.n_stopped) : 0.0;
    o.truncation_bound = bound;
    o.truncation_warning = bound > o.stderr_ && o.stderr_ > 0.0;
    return o;
}

Oracles make_oracles(const DualSolution& sol, bool need_horizon_closures) {
    const RetiredSolution& ret = sol.retired();
    Oracles orc;
    orc.JR = [&ret](double z) { return ret.value(z); };
    orc.XR = [&ret](double z) { return ret.wealth(z); };
    if (need_horizon_closures) {
        const double lo = sol.thresholds().z_R * (1.0 - 1e-9);
        const double hi = sol.thresholds().z_B;
        orc.Q = LogGridCache([&sol](double z) { return sol.Q(z); }, lo, hi, 4096);
        orc.mQp = LogGridCache([&sol](double z) { return -sol.Qp(z); }, lo, hi, 4096);
    }
    return orc;
}

} // namespace

void SimConfig::validate() const {
    if (n_paths < 1) throw ValidationError("n_paths must be at least 1");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(horizon >= 10.0 * dt)) throw ValidationError("horizon must cover at least 10 steps");
    if (probe_divisor < 1) throw ValidationError("probe_divisor must be at least 1");
}

PathRecord simulate_Z_path(double y0, const StrategyPair& pair, const SimConfig& cfg,
                           std::uint64_t path_id, const MarketParams& market,
                           const DerivedParams& derived) {
    cfg.validate();
    if (!(pair.stop_threshold < pair.control_barrier))
        throw ValidationError("strategy pair requires stop_threshold < control_barrier");
    const std::int64_t nst = std::llround(cfg.horizon / cfg.dt);
    const double drift_dt =
        (market.delta - market.r - 0.5 * derived.theta * derived.theta) * cfg.dt;
    const double vol_dt = derived.theta * std::sqrt(cfg.dt);
    const double two_var = 2.0 * derived.theta * derived.theta * cfg.dt;
    const double lnb = std::log(pair.control_barrier);

    Xoshiro256pp rng(cfg.seed, path_id);
    PathRecord rec;
    rec.t.reserve(static_cast<std::size_t>(nst) + 1);
    rec.Y.reserve(rec.t.capacity());
    rec.D.reserve(rec.t.capacity());
    rec.Z.reserve(rec.t.capacity());

    double lnY = std::log(y0);
    double lnM = lnY;
    for (std::int64_t k = 0; k <= nst; ++k) {
        if (k > 0) {
            const double d = drift_dt - vol_dt * rng.normal();
            const double lnY_new = lnY + d;
            const double lnU = std::log(rng.uniform());
            lnM = std::max(lnM, 0.5 * (lnY + lnY_new + std::sqrt(d * d - two_var * lnU)));
            lnY = lnY_new;
        }
        const double lnD = std::min(0.0, lnb - lnM);
        rec.t.push_back(static_cast<double>(k) * cfg.dt);
        rec.Y.push_back(std::exp(lnY));
        rec.D.push_back(std::exp(lnD));
        rec.Z.push_back(std::exp(lnY + lnD));
        if (rec.stop_index < 0 && rec.Z.back() < pair.stop_threshold) {
            rec.stop_index = k;
            break;
        }
    }
    return rec;
}

SimOutcome estimate_J0(double y0, const StrategyPair& pair, const SimConfig& cfg,
                       const DualSolution& sol) {
    cfg.validate();
    const auto& th = sol.thresholds();
    Oracles orc = make_oracles(sol, false);
    Functionals fn;
    fn.j0 = true;

    const RunResult rr = run_paths(y0, pair, cfg, sol.context().sw, sol.context().market,
                                   sol.context().derived, orc, fn);
    const double bound_scale = std::max(std::abs(sol.Q(th.z_R)),
                                        std::abs(sol.retired().value(th.z_R)));
    const double bound = std::exp(-sol.context().market.delta * cfg.horizon) * bound_scale;
    SimOutcome out = outcome_from(rr.j0, rr, bound);

    if (cfg.dt_probe) {
        SimConfig probe = cfg;
        probe.dt = 2.0 * cfg.dt;
        probe.n_paths = std::max<std::int64_t>(2, cfg.n_paths / cfg.probe_divisor);
        probe.dt_probe = false;
        const RunResult pr = run_paths(y0, pair, probe, sol.context().sw,
                                       sol.context().market, sol.context().derived, orc, fn);
        out.dt_bias_probe = pr.j0.mean();
        out.probe_stderr = pr.j0.se();
    }
    return out;
}

std::vector<StrategyPair> default_perturbations(const Thresholds& th, double y0) {
    std::vector<StrategyPair> ps;
    ps.push_back({th.z_B, 0.5 * th.z_R});                          // stop later
    ps.push_back({th.z_B, std::min(2.0 * th.z_R, 0.9 * y0)});      // stop earlier
    ps.push_back({1.5 * th.z_B, th.z_R});                          // reflect higher
    ps.push_back({std::max(0.7 * th.z_B, 2.0 * th.z_R), th.z_R});  // reflect lower
    return ps;
}

NashReport verify_nash(double y0, const SimConfig& cfg, const DualSolution& sol,
                       std::span<const StrategyPair> perturbations) {
    const auto& th = sol.thresholds();
    NashReport rep;
    rep.y0 = y0;
    rep.q_oracle = sol.Q(y0);
    rep.pass = true;

    auto run_entry = [&](const StrategyPair& pair, const std::string& side) {
        NashEntry e;
        e.pair = pair;
        e.side = side;
        SimConfig run_cfg = cfg;
        run_cfg.dt_probe = cfg.dt_probe && side == "equilibrium";
        e.outcome = estimate_J0(y0, pair, run_cfg, sol);
        e.oracle = rep.q_oracle;
        const double se = std::max(e.outcome.stderr_, 1e-300);
        e.margin_sigma = (e.outcome.estimate - e.oracle) / se;
        if (side == "equilibrium")
            e.pass = std::abs(e.margin_sigma) <= 3.0;
        else if (side == "stopper")
            e.pass = e.margin_sigma <= 3.0; // cannot beat the value from above
        else
            e.pass = e.margin_sigma >= -3.0; // cannot push the value below
        rep.pass = rep.pass && e.pass;
        return e;
    };

    rep.entries.push_back(run_entry({th.z_B, th.z_R}, "equilibrium"));
    for (const auto& p : perturbations) {
        const bool stopper_side = p.control_barrier == th.z_B;
        const bool controller_side = p.stop_threshold == th.z_R;
        if (stopper_side == controller_side)
            throw ValidationError(
                "perturbation must vary exactly one side of the strategy pair");
        rep.entries.push_back(run_entry(p, stopper_side ? "stopper" : "controller"));
    }
    return rep;
}

BudgetReport verify_budget_identity(double y0, const SimConfig& cfg,
                                    const DualSolution& sol) {
    cfg.validate();
    const auto& th = sol.thresholds();
    if (!(y0 > th.z_R && y0 < th.z_B))
        throw ValidationError("budget check requires y0 strictly between the boundaries");

    Oracles orc = make_oracles(sol, true);
    Functionals fn;
    fn.budget = true;
    fn.budget_weighted = true;
    const RunResult rr = run_paths(y0, {th.z_B, th.z_R}, cfg, sol.context().sw,
                                   sol.context().market, sol.context().derived, orc, fn);

    BudgetReport rep;
    rep.y0 = y0;
    rep.oracle = -sol.Qp(y0);
    rep.unweighted = outcome_from(rr.bud, rr, 0.0);
    rep.weighted = outcome_from(rr.budw, rr, 0.0);
    rep.diff_mean = rr.diff.mean();
    rep.diff_stderr = rr.diff.se();
    rep.pass_unweighted =
        std::abs(rep.unweighted.estimate - rep.oracle) <= 3.0 * rep.unweighted.stderr_;
    rep.pass_weighted =
        std::abs(rep.weighted.estimate - rep.oracle) <= 3.0 * rep.weighted.stderr_;
    rep.pass_agree = std::abs(rep.diff_mean) <= 3.0 * std::max(rep.diff_stderr, 1e-300);
    rep.pass = rep.pass_unweighted && rep.pass_weighted && rep.pass_agree;
    return rep;
}

PrimalReport estimate_primal_value(double y0, const SimConfig& cfg,
                                   const DualSolution& sol) {
    cfg.validate();
    const auto& th = sol.thresholds();
    if (!(y0 > th.z_R && y0 < th.z_B))
        throw ValidationError("primal check requires y0 strictly between the boundaries");

    Oracles orc = make_oracles(sol, true);
    Functionals fn;
    fn.primal = true;
    const RunResult rr = run_paths(y0, {th.z_B, th.z_R}, cfg, sol.context().sw,
                                   sol.context().market, sol.context().derived, orc, fn);

    PrimalReport rep;
    rep.y0 = y0;
    rep.x0 = -sol.Qp(y0);
    rep.oracle = sol.Q(y0) + y0 * rep.x0;
    rep.outcome = outcome_from(rr.pri, rr, 0.0);
    rep.margin_sigma =
        (rep.outcome.estimate - rep.oracle) / std::max(rep.outcome.stderr_, 1e-300);
    rep.pass = std::abs(rep.margin_sigma) <= 3.0;
    return rep;
}

} // namespace lcdual
