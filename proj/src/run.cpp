#include "hamflow/run.hpp"

#include <fstream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hamflow/errors.hpp"
#include "hamflow/field.hpp"
#include "hamflow/index.hpp"
#include "hamflow/outputs.hpp"
#include "hamflow/verify.hpp"

namespace hamflow {

namespace {

using nlohmann::json;

std::shared_ptr<const ModeSet> build_modes(const RunConfig& rc) {
    if (rc.domain.lengths.empty())
        throw ConfigError("cli", "run_config",
                          "this command needs a [domain] and [truncation] section");
    return std::make_shared<ModeSet>(enumerate_modes(rc.domain, rc.k_max, rc.spatial_cutoff));
}

json index_pair_json(const IndexPair& pair, Real tol) {
    json levels = json::array();
    for (const auto& lv : pair.history)
        levels.push_back({{"total_dim", lv.total_dim},
                          {"k_max", lv.k_max},
                          {"spatial_cutoff", lv.spatial_cutoff},
                          {"mu", lv.mu},
                          {"nu", lv.nu}});
    return {{"mu", pair.mu},
            {"nu", pair.nu},
            {"stabilized", true},
            {"nullity_tol", tol},
            {"levels", levels}};
}

json audit_json(const AuditReport& report) {
    auto check = [](const AuditCheck& c) {
        return json{{"applicable", c.applicable},
                    {"pass", c.pass},
                    {"worst_margin", c.worst_margin},
                    {"detail", c.detail}};
    };
    return {{"samples", report.samples},
            {"all_pass", report.all_pass()},
            {"lipschitz", check(report.lipschitz)},
            {"remainder_bound", check(report.remainder_bound)},
            {"sign_condition", check(report.sign_condition)},
            {"pinching", check(report.pinching)},
            {"decay", check(report.decay)}};
}

std::vector<std::string> cmd_spectrum(const RunConfig& rc, std::ostream&) {
    const auto modes = build_modes(rc);
    std::ostringstream csv;
    csv << "block,k,parity,n,mu,lambda_plus,lambda_minus\n";
    for (Index b = 0; b < static_cast<Index>(modes->blocks.size()); ++b) {
        const ModeBlock& blk = modes->blocks[static_cast<std::size_t>(b)];
        const auto [lp, lm] = mode_eigenvalues(blk);
        csv << b << ',' << blk.k << ',' << to_string(blk.parity) << ',';
        for (std::size_t i = 0; i < blk.n.size(); ++i) csv << (i ? " " : "") << blk.n[i];
        csv << ',' << fmt17(blk.mu) << ',' << fmt17(lp) << ',' << fmt17(lm) << '\n';
    }
    write_text_file(rc.output_dir + "/spectrum.csv", csv.str());
    return {"spectrum.csv"};
}

std::vector<std::string> cmd_index(const RunConfig& rc, std::ostream& log) {
    const auto modes = build_modes(rc);
    const MatrixField B = rc.index_b.build(rc.domain.m);
    const IndexPair pair = relative_index(B, *modes);
    std::ostringstream csv;
    csv << "pencil,total_dim,k_max,spatial_cutoff,mu,nu\n";
    for (const auto& lv : pair.history)
        csv << rc.pencil_label << ',' << lv.total_dim << ',' << lv.k_max << ','
            << fmt17(lv.spatial_cutoff) << ',' << lv.mu << ',' << lv.nu << '\n';
    write_text_file(rc.output_dir + "/index.csv", csv.str());
    json j = index_pair_json(pair, kDefaultNullityTol);
    j["pencil"] = rc.pencil_label;
    write_text_file(rc.output_dir + "/index_certificate.json", j.dump(2) + "\n");
    log << "index " << rc.pencil_label << ": mu=" << pair.mu << " nu=" << pair.nu << "\n";
    return {"index.csv", "index_certificate.json"};
}

std::vector<std::string> cmd_flow(const RunConfig& rc, std::ostream& log) {
    const auto modes = build_modes(rc);
    const MatrixField B1 = rc.index_b.build(rc.domain.m);
    const MatrixField B2 = rc.index_b2.build(rc.domain.m);
    const FlowResult flow = spectral_flow(B1, B2, rc.flow_steps, *modes);
    const IndexPair i1 = relative_index(B1, *modes);
    const IndexPair i2 = relative_index(B2, *modes);
    std::ostringstream csv;
    csv << "s,multiplicity\n";
    for (const Crossing& c : flow.crossings)
        csv << fmt17(c.s) << ',' << c.multiplicity << '\n';
    write_text_file(rc.output_dir + "/flow.csv", csv.str());
    json j{{"flow", flow.flow},
           {"index_difference", i2.mu - i1.mu},
           {"consistent", flow.flow == i2.mu - i1.mu},
           {"mu_b1", i1.mu},
           {"mu_b2", i2.mu},
           {"crossings", json::array()}};
    for (const Crossing& c : flow.crossings)
        j["crossings"].push_back({{"s", c.s}, {"multiplicity", c.multiplicity}});
    write_text_file(rc.output_dir + "/flow.json", j.dump(2) + "\n");
    log << "flow = " << flow.flow << ", index difference = " << i2.mu - i1.mu << "\n";
    return {"flow.csv", "flow.json"};
}

std::vector<std::string> cmd_solve(const RunConfig& rc, std::ostream& log) {
    const auto modes = build_modes(rc);
    if (!(rc.window_l_h > 0.0))
        throw ConfigError("cli", "run_config", "solve needs [window] l_h > 0");
    const HamiltonianModel model = rc.model.build(modes, rc.seed);
    const WindowDecomposition window = build_window(*modes, rc.window_l_h);
    ReducedProblem problem(*modes, window, model, natural_form(model), rc.solve_eps,
                           rc.solve_lambda, rc.engine.reduction,
                           default_grid(*modes, rc.oversample));
    std::vector<Vector> starts;
    starts.push_back(Vector::Zero(window.inner_dim));
    std::mt19937_64 rng(rc.seed + 11);
    std::normal_distribution<Real> gauss(0.0, 1.0);
    for (int i = 0; i < rc.engine.extra_starts; ++i) {
        Vector s(window.inner_dim);
        for (Index j = 0; j < s.size(); ++j) s[j] = gauss(rng);
        starts.push_back(s);
    }
    const auto zeros = solve_reduced(problem, starts);
    if (zeros.empty())
        throw SolverError("reduction_solver", "solve_reduced",
                          "no start converged at (eps=" + std::to_string(rc.solve_eps) +
                              ", lambda=" + std::to_string(rc.solve_lambda) + ")");

    std::size_t best = 0;
    for (std::size_t i = 1; i < zeros.size(); ++i)
        if (zeros[i].full_residual < zeros[best].full_residual) best = i;
    const ReducedZero& z = zeros[best];
    const Vector full = problem.assemble_full(z.z0, z.point.z_perp);
    const SpectralField field(modes, full);
    write_field(rc.output_dir + "/field.bin", field);
    write_field_csv(rc.output_dir + "/field.csv", field);

    std::ostringstream csv;
    csv << "zero,norm_z0,jacobian_sign,reduced_norm,full_residual,outer_iterations,contraction\n";
    for (std::size_t i = 0; i < zeros.size(); ++i)
        csv << i << ',' << fmt17(zeros[i].z0.norm()) << ',' << zeros[i].jacobian_sign << ','
            << fmt17(zeros[i].reduced_norm) << ',' << fmt17(zeros[i].full_residual) << ','
            << zeros[i].point.outer_iterations << ','
            << fmt17(zeros[i].point.outer_contraction_measured) << '\n';
    write_text_file(rc.output_dir + "/zeros.csv", csv.str());

    const AuditReport audit = audit_conditions(model, rc.audit_samples, 10.0, rc.seed);
    write_text_file(rc.output_dir + "/audit.json", audit_json(audit).dump(2) + "\n");

    json j{{"eps", rc.solve_eps},
           {"lambda", rc.solve_lambda},
           {"zeros", zeros.size()},
           {"best_residual", z.full_residual},
           {"norm", full.norm()},
           {"window_l_h", window.l_h},
           {"window_delta", window.delta},
           {"inner_dim", window.inner_dim}};
    write_text_file(rc.output_dir + "/solve.json", j.dump(2) + "\n");
    log << "solve: " << zeros.size() << " zero(s), best residual " << z.full_residual << "\n";
    return {"field.bin", "field.csv", "zeros.csv", "audit.json", "solve.json"};
}

std::vector<std::string> cmd_homotopy(const RunConfig& rc, std::ostream& log) {
    const auto modes = build_modes(rc);
    if (!(rc.window_l_h > 0.0))
        throw ConfigError("cli", "run_config", "homotopy needs [window] l_h > 0");
    const HamiltonianModel model = rc.model.build(modes, rc.seed);
    const WindowDecomposition window = build_window(*modes, rc.window_l_h);
    const ContinuationTrace trace = run_homotopy(rc.schedule, model, window, *modes, rc.engine);
    const MonitorReport monitor = apriori_monitor(trace, model, rc.schedule.mode,
                                                  rc.schedule.inner_fraction_floor);

    std::ostringstream csv;
    csv << "eps,lambda,norm,residual,step1_margin,inner_fraction,contraction,outer_iterations,"
           "newton_iterations,degree\n";
    for (const TracePoint& p : trace.points) {
        csv << fmt17(p.eps) << ',' << fmt17(p.lambda) << ',' << fmt17(p.norm) << ','
            << fmt17(p.residual) << ',' << fmt17(p.step1_margin) << ','
            << fmt17(p.inner_fraction) << ',' << fmt17(p.contraction) << ','
            << p.outer_iterations << ',' << p.newton_iterations << ',';
        if (p.degree) csv << *p.degree;
        csv << '\n';
    }
    write_text_file(rc.output_dir + "/trace.csv", csv.str());
    write_field(rc.output_dir + "/final_field.bin", trace.final_field);

    auto mon = [](const MonitorCheck& c) {
        return json{{"applicable", c.applicable},
                    {"pass", c.pass},
                    {"worst_margin", c.worst_margin},
                    {"detail", c.detail}};
    };
    json j{{"mode", to_string(trace.mode)},
           {"points", trace.points.size()},
           {"final_residual", trace.final_hs_residual},
           {"final_norm", trace.final_field.coeffs.norm()},
           {"max_contraction", trace.max_contraction},
           {"cauchy_gaps", trace.cauchy_gaps},
           {"gap_certificate", trace.gap_certificate},
           {"epsilon0", trace.epsilon0},
           {"monitor",
            {{"all_pass", monitor.all_pass()},
             {"step1", mon(monitor.step1)},
             {"boundedness", mon(monitor.boundedness)},
             {"saturating_bound", mon(monitor.saturating_bound)},
             {"inner_fraction", mon(monitor.inner_fraction)},
             {"cauchy_trend", mon(monitor.cauchy_trend)}}}};
    json degrees = json::object();
    for (const auto& [lam, deg] : trace.degrees) degrees[fmt17(lam)] = deg;
    j["degrees"] = degrees;
    write_text_file(rc.output_dir + "/summary.json", j.dump(2) + "\n");

    const AuditReport audit = audit_conditions(model, rc.audit_samples, 10.0, rc.seed);
    write_text_file(rc.output_dir + "/audit.json", audit_json(audit).dump(2) + "\n");

    log << "homotopy (" << to_string(trace.mode) << "): " << trace.points.size()
        << " points, final residual " << trace.final_hs_residual << "\n";
    return {"trace.csv", "final_field.bin", "summary.json", "audit.json"};
}

std::vector<std::string> cmd_verify(const RunConfig& rc, std::ostream& log, bool& ok) {
    const auto results = run_acceptance(log, rc.seed);
    ok = all_pass(results);
    write_text_file(rc.output_dir + "/verify_report.json", acceptance_report_json(results));
    return {"verify_report.json"};
}

} // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const MonitorError*>(&e)) return 2;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const IoError*>(&e) ||
        dynamic_cast<const PreconditionError*>(&e))
        return 1;
    if (dynamic_cast<const Error*>(&e)) return 3;
    return 3;
}

int run_config(const RunConfig& config, std::ostream& log) {
    try {
        ensure_output_dir(config.output_dir);
        std::vector<std::string> files;
        bool ok = true;
        switch (config.command) {
            case Command::Spectrum: files = cmd_spectrum(config, log); break;
            case Command::IndexCmd: files = cmd_index(config, log); break;
            case Command::Flow: files = cmd_flow(config, log); break;
            case Command::Solve: files = cmd_solve(config, log); break;
            case Command::Homotopy: files = cmd_homotopy(config, log); break;
            case Command::Verify: files = cmd_verify(config, log, ok); break;
        }
        files.push_back("manifest.json");
        write_manifest(config, files);
        return ok ? 0 : 3;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace hamflow
