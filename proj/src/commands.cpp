#include "lcdual/commands.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <vector>

namespace lcdual {

using nlohmann::json;

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::filesystem::path ensure_output_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot write output file: " + path.string());
    out << text;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    const double lnlo = std::log(lo), lnhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] =
            std::exp(lnlo + (lnhi - lnlo) * i / (n - 1));
    return g;
}

json outcome_json(const SimOutcome& o) {
    json j;
    j["estimate"] = o.estimate;
    j["stderr"] = o.stderr_;
    j["n_stopped"] = o.n_stopped;
    j["mean_stop_time"] = o.mean_stop_time;
    j["truncation_bound"] = o.truncation_bound;
    j["truncation_warning"] = o.truncation_warning;
    j["dt_bias_probe"] = o.dt_bias_probe;
    j["probe_stderr"] = o.probe_stderr;
    return j;
}

} // namespace

Pipeline solve_pipeline(const RunConfig& cfg) {
    cfg.validate();
    Pipeline p;
    p.cfg = cfg;
    p.util = make_utility(cfg.utility);
    p.ctx = make_context(cfg.market, cfg.agent, p.util, cfg.numerics, cfg.root_max_iter);
    p.retired = build_retired(cfg.market, p.ctx.derived, p.util, cfg.numerics);
    p.th = solve_free_boundaries(p.ctx);
    p.dual = build_dual(p.th, p.retired, p.ctx);
    return p;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    const Pipeline p = solve_pipeline(cfg);
    const Thresholds& th = p.th;

    json doc;
    doc["thresholds"] = {{"z_S", th.z_S},
                         {"z_hat", th.z_hat},
                         {"z_bar", th.z_bar},
                         {"z_R", th.z_R},
                         {"z_B", th.z_B}};
    doc["coefficients"] = {{"E1", th.E1},
                           {"E2", th.E2},
                           {"E1_alt", th.E1_alt},
                           {"E2_alt", th.E2_alt}};
    const PolicyTable pt = policy_table(p.dual, {});
    doc["regime"] = to_string(pt.regime);
    doc["x_ret"] = pt.x_ret;
    if (pt.x_S) doc["x_S"] = *pt.x_S;

    json diag;
    diag["phi1_residual"] = th.phi1_residual;
    diag["phi2_residual"] = th.phi2_residual;
    diag["E1_rel_diff"] =
        std::abs(th.E1 - th.E1_alt) / std::max(std::abs(th.E1), 1e-300);
    diag["E2_rel_diff"] =
        std::abs(th.E2 - th.E2_alt) / std::max(std::abs(th.E2), 1e-300);
    diag["f_residual"] = th.diag.f_residual;
    diag["h_residual"] = th.diag.h_residual;
    diag["zbar_residual"] = th.diag.zbar_residual;
    diag["zbar_at_kink"] = th.z_bar_at_kink;
    diag["outer_iterations"] = th.diag.outer_iterations;
    diag["phi_evaluations"] = th.diag.phi_evaluations;
    diag["theta"] = p.ctx.derived.theta;
    diag["n1"] = p.ctx.derived.n1;
    diag["n2"] = p.ctx.derived.n2;
    if (p.retired.closed_form() && !std::isnan(p.retired.merton_constant()))
        diag["merton_K"] = p.retired.merton_constant();
    doc["diagnostics"] = diag;

    const auto dir = ensure_output_dir(cfg);
    write_text(dir / "solution.json", doc.dump(2) + "\n");
    log << "solution.json written to " << (dir / "solution.json").string() << "\n"
        << "  z_R = " << g17(th.z_R) << ", z_B = " << g17(th.z_B)
        << ", regime = " << to_string(pt.regime) << "\n";
    return kExitOk;
}

int cmd_grid(const RunConfig& cfg, double z_min, double z_max, int n, std::ostream& log) {
    if (n < 2) throw ValidationError("grid needs at least 2 points");
    const Pipeline p = solve_pipeline(cfg);
    if (!(z_min > 0.0)) z_min = p.th.z_R / 10.0;
    if (!(z_max > 0.0)) z_max = 10.0 * p.th.z_B;
    if (!(z_min < z_max)) throw ValidationError("grid requires z_min < z_max");

    // Q'' jumps at z_R; skip a small collar on both sides of it.
    const double collar = 1e-6 * p.th.z_R;

    std::string csv = "z,Q,Qp,Qpp,lq_residual,region\n";
    int failures = 0;
    for (double z : log_grid(z_min, z_max, n)) {
        if (std::abs(z - p.th.z_R) <= collar) z = p.th.z_R + 2.0 * collar;
        const HjbqvPoint pt = hjbqv_residual(p.dual, z);
        if (!pt.pass) ++failures;
        csv += g17(z) + "," + g17(p.dual.Q(z)) + "," + g17(p.dual.Qp(z)) + "," +
               g17(p.dual.Qpp(z)) + "," + g17(pt.lq) + "," + to_string(pt.region) +
               (pt.pass ? "" : "!FAIL") + "\n";
    }
    const auto dir = ensure_output_dir(cfg);
    write_text(dir / "grid.csv", csv);
    log << "grid.csv written (" << n << " rows, " << failures << " classification failures)\n";
    return failures == 0 ? kExitOk : kExitVerification;
}

int cmd_policy(const RunConfig& cfg, std::vector<double> xs, bool with_pi,
               std::ostream& log) {
    const Pipeline p = solve_pipeline(cfg);
    const double x_ret = p.retired.wealth(p.th.z_R);
    if (xs.empty()) xs = log_grid(x_ret / 1000.0, 2.0 * x_ret, 33);

    const PolicyTable table = policy_table(p.dual, xs);
    std::string csv = with_pi ? "x,y_star,V,c_star,job,region,pi_candidate\n"
                              : "x,y_star,V,c_star,job,region\n";
    for (const PolicyPoint& row : table.rows) {
        csv += g17(row.x) + "," + g17(row.y_star) + "," + g17(row.V) + "," +
               g17(row.c_star) + "," + to_string(row.job) + "," + to_string(row.region);
        if (with_pi) csv += "," + g17(row.pi_candidate);
        csv += "\n";
    }
    const auto dir = ensure_output_dir(cfg);
    write_text(dir / "policy.csv", csv);
    log << "policy.csv written (" << table.rows.size() << " rows); regime = "
        << to_string(table.regime) << ", x_ret = " << g17(table.x_ret);
    if (table.x_S) log << ", x_S = " << g17(*table.x_S);
    log << "\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    const Pipeline p = solve_pipeline(cfg);
    const Thresholds& th = p.th;
    json doc;
    bool all_pass = true;

    { // variational-inequality sign pattern on a log grid
        const int n = 500;
        const double collar = 1e-6 * th.z_R;
        int failures = 0;
        double worst_interior = 0.0;
        std::string first_fail;
        for (double z : log_grid(th.z_R / 10.0, 10.0 * th.z_B, n)) {
            if (std::abs(z - th.z_R) <= collar) z = th.z_R + 2.0 * collar;
            const HjbqvPoint pt = hjbqv_residual(p.dual, z);
            if (pt.region == GridRegion::WR)
                worst_interior = std::max(worst_interior, std::abs(pt.lq));
            if (!pt.pass) {
                ++failures;
                if (first_fail.empty())
                    first_fail = "z=" + g17(pt.z) + ": " + pt.detail;
            }
        }
        json j;
        j["n_points"] = n;
        j["n_fail"] = failures;
        j["worst_interior_residual"] = worst_interior;
        j["pass"] = failures == 0;
        if (!first_fail.empty()) j["first_failure"] = first_fail;
        doc["hjbqv"] = j;
        all_pass = all_pass && failures == 0;
        log << "hjbqv classification: " << (failures == 0 ? "pass" : "FAIL") << " ("
            << failures << "/" << n << " failures)\n";
    }

    const double y0 = 0.5 * (th.z_R + th.z_B);

    { // saddle-point battery
        const auto perts = default_perturbations(th, y0);
        const NashReport nash = verify_nash(y0, cfg.sim, p.dual, perts);
        json entries = json::array();
        for (const NashEntry& e : nash.entries) {
            json je;
            je["side"] = e.side;
            je["control_barrier"] = e.pair.control_barrier;
            je["stop_threshold"] = e.pair.stop_threshold;
            je["oracle"] = e.oracle;
            je["margin_sigma"] = e.margin_sigma;
            je["pass"] = e.pass;
            je.update(outcome_json(e.outcome));
            entries.push_back(je);
            log << "nash " << e.side << " (b=" << e.pair.control_barrier
                << ", a=" << e.pair.stop_threshold << "): est=" << e.outcome.estimate
                << " se=" << e.outcome.stderr_ << " margin=" << e.margin_sigma
                << " sigma -> " << (e.pass ? "pass" : "FAIL") << "\n";
        }
        json j;
        j["y0"] = nash.y0;
        j["q_oracle"] = nash.q_oracle;
        j["entries"] = entries;
        j["pass"] = nash.pass;
        doc["nash"] = j;
        all_pass = all_pass && nash.pass;
    }

    { // budget identity
        const BudgetReport b = verify_budget_identity(y0, cfg.sim, p.dual);
        json j;
        j["y0"] = b.y0;
        j["oracle"] = b.oracle;
        j["unweighted"] = outcome_json(b.unweighted);
        j["weighted"] = outcome_json(b.weighted);
        j["diff_mean"] = b.diff_mean;
        j["diff_stderr"] = b.diff_stderr;
        j["pass_unweighted"] = b.pass_unweighted;
        j["pass_weighted"] = b.pass_weighted;
        j["pass_agree"] = b.pass_agree;
        j["pass"] = b.pass;
        doc["budget"] = j;
        all_pass = all_pass && b.pass;
        log << "budget identity: oracle=" << b.oracle << " unweighted="
            << b.unweighted.estimate << "+-" << b.unweighted.stderr_ << " weighted="
            << b.weighted.estimate << "+-" << b.weighted.stderr_ << " -> "
            << (b.pass ? "pass" : "FAIL") << "\n";
    }

    { // primal consistency
        const PrimalReport pr = estimate_primal_value(y0, cfg.sim, p.dual);
        json j;
        j["y0"] = pr.y0;
        j["x0"] = pr.x0;
        j["oracle"] = pr.oracle;
        j["outcome"] = outcome_json(pr.outcome);
        j["margin_sigma"] = pr.margin_sigma;
        j["pass"] = pr.pass;
        doc["primal"] = j;
        all_pass = all_pass && pr.pass;
        log << "primal consistency: oracle=" << pr.oracle << " est="
            << pr.outcome.estimate << "+-" << pr.outcome.stderr_ << " -> "
            << (pr.pass ? "pass" : "FAIL") << "\n";
    }

    doc["overall_pass"] = all_pass;
    const auto dir = ensure_output_dir(cfg);
    write_text(dir / "sim_report.json", doc.dump(2) + "\n");
    log << "sim_report.json written; overall " << (all_pass ? "pass" : "FAIL") << "\n";
    return all_pass ? kExitOk : kExitVerification;
}

} // namespace lcdual
