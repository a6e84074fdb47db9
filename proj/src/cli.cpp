#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsis/bounds.hpp"
#include "qsis/harness.hpp"

namespace qsis {

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    int law = 32;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials, n, m;
    std::optional<int> workers;
    std::optional<double> gamma, theta, alpha, mu, eta, zeta, p, q;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "config file (JSON)");
    cmd->add_option("--out", o.out_path, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", o.seed, "master seed override");
    cmd->add_option("--trials", o.trials, "trial count override");
    cmd->add_option("--workers", o.workers, "worker count override");
    cmd->add_option("--n", o.n, "sample rows n");
    cmd->add_option("--m", o.m, "sample cols m");
    cmd->add_option("--gamma", o.gamma, "gamma parameter");
    cmd->add_option("--theta", o.theta, "theta parameter");
    cmd->add_option("--alpha", o.alpha, "alpha parameter");
    cmd->add_option("--mu", o.mu, "mu parameter");
    cmd->add_option("--eta", o.eta, "eta parameter");
    cmd->add_option("--zeta", o.zeta, "zeta parameter");
    cmd->add_option("--p", o.p, "outer exponent p");
    cmd->add_option("--q", o.q, "inner exponent q");
}

ExperimentConfig resolve_config(const CommonOpts& o) {
    ExperimentConfig cfg = o.config_path.empty() ? reference_config() : load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.trials) cfg.trials = *o.trials;
    if (o.workers) cfg.workers = *o.workers;
    if (o.n) cfg.n = *o.n;
    if (o.m) cfg.m = *o.m;
    if (o.gamma) cfg.gamma = *o.gamma;
    if (o.theta) cfg.theta = *o.theta;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.mu) cfg.mu = *o.mu;
    if (o.eta) cfg.eta = *o.eta;
    if (o.zeta) cfg.zeta = *o.zeta;
    if (o.p) cfg.p = *o.p;
    if (o.q) cfg.q = *o.q;
    return cfg;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InvalidParameter("cannot write output file: " + path);
    out << text;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string bounds_csv(const ExperimentConfig& cfg, int law) {
    Instruments inst = build_instruments(cfg);
    BoundInputs in;
    in.d = static_cast<long>(inst.analysis.d);
    in.c_phi_tilde = inst.analysis.c_phi_tilde;
    in.a1 = inst.analysis.a1;
    in.omega_l1 = inst.kernel.l1_norm;
    in.mu1 = inst.domain.K.measure1();
    in.mu2 = inst.domain.K.measure2();
    in.c_rho_1 = inst.density.c1;
    in.c_rho_2 = inst.density.c2;
    in.p = cfg.p;
    in.q = cfg.q;
    if (law == 33) {
        Thm33Report r = thm33_constants(in, cfg.mu, cfg.eta, cfg.n, cfg.m);
        std::string out =
            "mu,eta,n,m,lower_factor,upper_factor,nm_min,exponent1,exponent2,prob_lower,"
            "vacuous,log_A1,log_A2\r\n";
        out += fmt(r.mu) + ',' + fmt(r.eta) + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.m) + ',' + fmt(r.lower_factor) + ',' + fmt(r.upper_factor) +
               ',' + fmt(r.nm_min) + ',' + fmt(r.exponent1) + ',' + fmt(r.exponent2) + ',' +
               fmt(r.prob_lower) + ',' + (r.vacuous ? "1" : "0") + ',' + fmt(r.log_A1) + ',' +
               fmt(r.log_A2) + "\r\n";
        return out;
    }
    double zeta = cfg.zeta > 0.0 ? cfg.zeta : cfg.theta / cfg.alpha;
    Thm32Report r = thm32_constants(in, zeta, cfg.gamma, cfg.n, cfg.m);
    std::string out =
        "zeta,gamma,n,m,a_tilde,b_tilde,beta_prime,beta_dprime,nm_min,p_frak,prob_lower,"
        "vacuous,A1,A2,log_A1,log_A2\r\n";
    out += fmt(r.zeta) + ',' + fmt(r.gamma) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.m) + ',' + fmt(r.a_tilde) + ',' + fmt(r.b_tilde) + ',' +
           fmt(r.beta_prime) + ',' + fmt(r.beta_dprime) + ',' + fmt(r.nm_min) + ',' +
           fmt(r.p_frak) + ',' + fmt(r.prob_lower) + ',' + (r.vacuous ? "1" : "0") + ',' +
           fmt(r.A1) + ',' + fmt(r.A2) + ',' + fmt(r.log_A1) + ',' + fmt(r.log_A2) + "\r\n";
    return out;
}

void run_and_emit(const ExperimentConfig& cfg, const CommonOpts& o) {
    MonteCarloReport rep = run_experiment(cfg);
    if (o.format == "csv") {
        write_output(o.out_path, report_trials_csv(rep));
    } else {
        write_output(o.out_path, report_to_json(rep).dump(2) + "\n");
    }
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"qsis: average-sampling laboratory on quasi shift-invariant spaces"};
    app.require_subcommand(1);

    CommonOpts bounds_o, lemmas_o, ineq_o, recon_o, mc_o;
    std::string report_in, report_out, report_format = "csv";

    auto* bounds_cmd = app.add_subcommand("bounds", "print the closed-form constants as CSV");
    add_common(bounds_cmd, bounds_o);
    bounds_cmd->add_option("--law", bounds_o.law, "which theorem (32 or 33)")
        ->check(CLI::IsMember({32, 33}));

    auto* lemmas_cmd = app.add_subcommand("verify-lemmas", "run the lemma verifier suite");
    add_common(lemmas_cmd, lemmas_o);

    auto* ineq_cmd = app.add_subcommand("sample-ineq", "Monte Carlo sampling-inequality runs");
    add_common(ineq_cmd, ineq_o);
    ineq_cmd->add_option("--law", ineq_o.law, "which theorem (32 or 33)")
        ->check(CLI::IsMember({32, 33}));

    auto* recon_cmd = app.add_subcommand("reconstruct", "Monte Carlo reconstruction runs");
    add_common(recon_cmd, recon_o);

    auto* mc_cmd = app.add_subcommand("montecarlo", "run the experiment kind named in the config");
    add_common(mc_cmd, mc_o);

    auto* report_cmd = app.add_subcommand("report", "re-render a saved JSON report");
    report_cmd->add_option("--in", report_in, "report JSON file")->required();
    report_cmd->add_option("--out", report_out, "output path (default: stdout)");
    report_cmd->add_option("--format", report_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (*bounds_cmd) {
            write_output(bounds_o.out_path, bounds_csv(resolve_config(bounds_o), bounds_o.law));
        } else if (*lemmas_cmd) {
            ExperimentConfig cfg = resolve_config(lemmas_o);
            cfg.kind = ExperimentKind::VerifyLemmas;
            run_and_emit(cfg, lemmas_o);
        } else if (*ineq_cmd) {
            ExperimentConfig cfg = resolve_config(ineq_o);
            cfg.kind = ineq_o.law == 33 ? ExperimentKind::SamplingInequality33
                                        : ExperimentKind::SamplingInequality32;
            run_and_emit(cfg, ineq_o);
        } else if (*recon_cmd) {
            ExperimentConfig cfg = resolve_config(recon_o);
            cfg.kind = ExperimentKind::Reconstruct;
            run_and_emit(cfg, recon_o);
        } else if (*mc_cmd) {
            run_and_emit(resolve_config(mc_o), mc_o);
        } else if (*report_cmd) {
            std::ifstream in(report_in);
            if (!in) throw InvalidParameter("cannot open report file: " + report_in);
            nlohmann::ordered_json j;
            in >> j;
            if (report_format == "json") {
                write_output(report_out, j.dump(2) + "\n");
            } else {
                std::string csv =
                    "index,label,pass,membership_failure,injective,lower,value,upper,"
                    "rel_coeff,rel_pq,rel_inf,error\r\n";
                for (const auto& row : j.at("outcomes")) {
                    auto gets = [&](const char* k) {
                        return row.contains(k) ? row.at(k).get<std::string>() : std::string();
                    };
                    csv += std::to_string(row.at("index").get<long>()) + ',' + gets("label") +
                           ',' + (row.at("pass").get<bool>() ? "1" : "0") + ',' +
                           (row.at("membership_failure").get<bool>() ? "1" : "0") + ',' +
                           (row.at("injective").get<bool>() ? "1" : "0") + ',' +
                           fmt(row.at("lower").get<double>()) + ',' +
                           fmt(row.at("value").get<double>()) + ',' +
                           fmt(row.at("upper").get<double>()) + ',' +
                           fmt(row.at("rel_coeff").get<double>()) + ',' +
                           fmt(row.at("rel_pq").get<double>()) + ',' +
                           fmt(row.at("rel_inf").get<double>()) + ',' + gets("error") + "\r\n";
                }
                write_output(report_out, csv);
            }
        }
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace qsis
