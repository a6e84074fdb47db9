#include "qsis/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "qsis/bounds.hpp"
#include "qsis/reconstruction.hpp"

namespace qsis {

using nlohmann::ordered_json;

namespace {

std::uint64_t seed_for(std::uint64_t master, std::uint64_t slot) {
    std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (slot + 1));
    return detail::splitmix64(s);
}

int resolve_workers(int cfg_workers) {
    if (cfg_workers > 0) return cfg_workers;
    if (const char* env = std::getenv("QSIS_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(std::min(hc, 8u)) : 1;
}

template <typename Fn>
void run_parallel(long trials, int workers, Fn&& fn) {
    if (workers <= 1 || trials <= 1) {
        for (long t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                long t = next.fetch_add(1);
                if (t >= trials) return;
                fn(t);
            }
        });
    for (auto& th : pool) th.join();
}

// Store the trial outcome, turning any escaped module error into an
// annotated failed outcome instead of tearing the run down.
template <typename Trial>
void guarded(std::vector<TrialOutcome>& out, long t, Trial&& trial) {
    try {
        out[t] = trial();
    } catch (const std::exception& e) {
        TrialOutcome o;
        o.index = t;
        o.pass = false;
        o.error = "trial " + std::to_string(t) + ": " + e.what();
        out[t] = std::move(o);
    }
}

BoundInputs bound_inputs(const Instruments& inst) {
    BoundInputs in;
    in.d = static_cast<long>(inst.analysis.d);
    in.c_phi_tilde = inst.analysis.c_phi_tilde;
    in.a1 = inst.analysis.a1;
    in.omega_l1 = inst.kernel.l1_norm;
    in.mu1 = inst.domain.K.measure1();
    in.mu2 = inst.domain.K.measure2();
    in.c_rho_1 = inst.density.c1;
    in.c_rho_2 = inst.density.c2;
    in.p = inst.exponents.p;
    in.q = inst.exponents.q;
    return in;
}

ordered_json common_constants(const Instruments& inst) {
    const auto& an = inst.analysis;
    return ordered_json{
        {"a1", an.a1},
        {"a2", an.a2},
        {"d", static_cast<long>(an.d)},
        {"c_phi_tilde", an.c_phi_tilde},
        {"a_exact", an.a_exact},
        {"omega_l1", inst.kernel.l1_norm},
        {"mu1", inst.domain.K.measure1()},
        {"mu2", inst.domain.K.measure2()},
        {"c_rho_1", inst.density.c1},
        {"c_rho_2", inst.density.c2},
        {"s0", inst.space.s0()},
        {"t0", inst.space.t0()},
        {"r", inst.space.r()},
        {"cols", static_cast<long>(inst.space.cols())},
    };
}

ordered_json thm32_json(const Thm32Report& r) {
    return ordered_json{
        {"zeta", r.zeta},           {"gamma", r.gamma},
        {"n", r.n},                 {"m", r.m},
        {"a_tilde", r.a_tilde},     {"b_tilde", r.b_tilde},
        {"beta_prime", r.beta_prime}, {"beta_dprime", r.beta_dprime},
        {"nm_min", r.nm_min},       {"p_frak", r.p_frak},
        {"prob_lower", r.prob_lower}, {"vacuous", r.vacuous},
        {"A1", r.A1},               {"A2", r.A2},
        {"log_A1", r.log_A1},       {"log_A2", r.log_A2},
    };
}

ordered_json thm33_json(const Thm33Report& r) {
    return ordered_json{
        {"mu", r.mu},
        {"eta", r.eta},
        {"n", r.n},
        {"m", r.m},
        {"lower_factor", r.lower_factor},
        {"upper_factor", r.upper_factor},
        {"nm_min", r.nm_min},
        {"exponent1", r.exponent1},
        {"exponent2", r.exponent2},
        {"prob_lower", r.prob_lower},
        {"vacuous", r.vacuous},
        {"log_A1", r.log_A1},
        {"log_A2", r.log_A2},
    };
}

// Sample the convolution at the drawn points (grid data + bilinear reads).
Eigen::ArrayXXd conv_at_samples(const Instruments& inst, const GridFunction<double>& f,
                                const SampleSet& pts) {
    std::vector<std::pair<double, double>> targets;
    targets.reserve(pts.n * pts.m);
    for (Eigen::Index j = 0; j < pts.n; ++j)
        for (Eigen::Index k = 0; k < pts.m; ++k)
            targets.emplace_back(pts.u(j, k), pts.v(j, k));
    auto vals = convolve(f, inst.kernel, inst.domain.K, targets);
    Eigen::ArrayXXd out(pts.n, pts.m);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < pts.n; ++j)
        for (Eigen::Index k = 0; k < pts.m; ++k) out(j, k) = vals[idx++];
    return out;
}

// Draw a unit element and rescale to `scale`, retrying until the membership
// predicate accepts (up to 64 attempts).
template <typename Predicate>
bool draw_member(const Instruments& inst, const ExperimentConfig& cfg, long trial, double scale,
                 Predicate&& accept, GridFunction<double>& f_out) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto [f, c] = random_unit_element(inst.space, inst.exponents,
                                          seed_for(cfg.seed, trial * 131 + attempt));
        f.values *= scale;
        if (accept(f)) {
            f_out = std::move(f);
            return true;
        }
    }
    return false;
}

TrialOutcome trial_sampling32(const Instruments& inst, const ExperimentConfig& cfg,
                              const Thm32Report& thm, long t) {
    TrialOutcome out;
    out.index = t;
    GridFunction<double> f;
    bool ok = draw_member(inst, cfg, t, cfg.alpha, [&](const GridFunction<double>& g) {
        auto flags = classify_membership(inst.space, g, inst.kernel, inst.exponents, cfg.theta,
                                         cfg.alpha, 1.0);
        return flags.in_theta_alpha;
    }, f);
    if (!ok) {
        out.membership_failure = true;
        return out;
    }
    double fn = mixed_norm(f, inst.domain.Ktilde, inst.exponents);
    SampleSet pts = draw_sample_set(inst.density, cfg.n, cfg.m, seed_for(cfg.seed, t * 131 + 100),
                                    inst.mode);
    Eigen::ArrayXXd vals = conv_at_samples(inst, f, pts);
    out.value = seq_mixed_norm(vals, inst.exponents);
    out.lower = thm.a_tilde * fn;
    out.upper = thm.b_tilde * fn;
    out.pass = out.value >= out.lower && out.value <= out.upper;
    return out;
}

TrialOutcome trial_sampling33(const Instruments& inst, const ExperimentConfig& cfg,
                              const Thm33Report& thm, long t) {
    TrialOutcome out;
    out.index = t;
    GridFunction<double> f;
    bool ok = draw_member(inst, cfg, t, 1.0, [&](const GridFunction<double>& g) {
        auto flags = classify_membership(inst.space, g, inst.kernel, inst.exponents, 0.0, kInf,
                                         cfg.mu);
        return flags.in_omega_mu;
    }, f);
    if (!ok) {
        out.membership_failure = true;
        return out;
    }
    double fn = mixed_norm(f, inst.domain.Ktilde, inst.exponents);
    SampleSet pts = draw_sample_set(inst.density, cfg.n, cfg.m, seed_for(cfg.seed, t * 131 + 100),
                                    inst.mode);
    Eigen::ArrayXXd vals = conv_at_samples(inst, f, pts);
    double nm = static_cast<double>(cfg.n) * static_cast<double>(cfg.m);
    out.value = vals.abs().sum();
    out.lower = nm * inst.kernel.l1_norm * thm.lower_factor * fn;
    out.upper = nm * inst.kernel.l1_norm * thm.upper_factor * fn;
    out.pass = out.value >= out.lower && out.value <= out.upper;
    return out;
}

TrialOutcome trial_reconstruct(const Instruments& inst, const ExperimentConfig& cfg, long t) {
    TrialOutcome out;
    out.index = t;
    const QsisSpace& sp = inst.space;
    Rng rng = Rng::substream(seed_for(cfg.seed, t * 131), 0xC0EF);
    CoefficientArray<double> c(sp.cols());
    for (Eigen::Index j = 0; j < sp.cols(); ++j) c(j) = rng.gaussian();
    GridFunction<double> f = synthesize(sp, c);
    SampleSet pts = draw_sample_set(inst.density, cfg.n, cfg.m, seed_for(cfg.seed, t * 131 + 100),
                                    inst.mode);
    SampleMatrix<double> M = assemble_matrix(sp, inst.kernel, pts);
    Eigen::VectorXd S = M.M * c; // noiseless samples, exact by construction
    try {
        DualSystem<double> dual = solve_dual(M);
        auto rep = reconstruct<double>(S, dual, sp, inst.exponents, &f, &c);
        out.rel_coeff = rep.rel_coeff.value_or(0.0);
        out.rel_pq = rep.rel_pq.value_or(0.0);
        out.rel_inf = rep.rel_inf.value_or(0.0);
        out.value = out.rel_coeff;
        out.pass = out.rel_coeff <= 1e-8 && out.rel_pq <= 1e-8;
    } catch (const NotInjectiveError& e) {
        out.injective = false;
        out.pass = false;
        std::ostringstream msg;
        msg << "trial " << t << ": " << e.what() << " (smin=" << e.smin << ", smax=" << e.smax
            << ")";
        out.error = msg.str();
    }
    return out;
}

// ---- verify-lemmas checks ------------------------------------------------

TrialOutcome check_lemma21(const Instruments& inst, const ExperimentConfig& cfg) {
    TrialOutcome out;
    out.label = "lemma21_sup_bound";
    double bound = inst.analysis.c_phi_tilde / inst.analysis.a1 + 1e-9;
    MixedExponents inf_exp{kInf, kInf};
    long violations = 0;
    double worst = 0.0;
    for (long t = 0; t < cfg.trials; ++t) {
        auto [f, c] = random_unit_element(inst.space, inst.exponents, seed_for(cfg.seed, 7000 + t));
        double sup = mixed_norm(f, inst.domain.Ktilde, inf_exp);
        worst = std::max(worst, sup);
        if (sup > bound) ++violations;
    }
    out.value = worst;
    out.upper = bound;
    out.pass = violations == 0;
    return out;
}

TrialOutcome check_young_scalar(const Instruments& inst, const ExperimentConfig& cfg) {
    TrialOutcome out;
    out.label = "young_scalar";
    const AxisInterval& K0 = inst.domain.K.a1;
    const AxisInterval& W0 = inst.domain.W.a1;
    double min_slack = kInf;
    Rng rng = Rng::substream(cfg.seed, 0x2c3);
    for (long t = 0; t < cfg.trials; ++t) {
        double a = rng.uniform(-2.0, 2.0), b = rng.uniform(0.5, 9.0), ph = rng.uniform(0.0, 6.28);
        double d0 = rng.uniform(-1.0, 1.0);
        auto f = [=](double x) { return a * std::sin(b * x + ph) + d0; };
        double amp = rng.uniform(-2.0, 2.0);
        double w_lo = W0.range.lo, w_len = W0.range.hi - W0.range.lo;
        auto g = [=](double x) {
            double z = (x - w_lo) / w_len * 2.0;
            return (z < 0.0 || z > 2.0) ? 0.0 : amp * (z <= 1.0 ? z : 2.0 - z);
        };
        double p = rng.uniform(1.0, 3.0);
        double uq = rng.uniform(1.0 - 1.0 / p, 1.0);
        double q = uq > 1e-9 ? 1.0 / uq : kInf;
        double inv_r = 1.0 / p + (q == kInf ? 0.0 : 1.0 / q) - 1.0;
        double r = inv_r > 1e-9 ? 1.0 / inv_r : kInf;
        min_slack = std::min(min_slack, young_check_scalar(f, g, K0, W0, p, q, r));
    }
    out.value = min_slack;
    out.lower = -1e-12;
    out.pass = min_slack >= -1e-12;
    return out;
}

TrialOutcome check_young_mixed(const Instruments& inst, const ExperimentConfig& cfg) {
    TrialOutcome out;
    out.label = "young_mixed";
    double min_slack = kInf;
    Rng rng = Rng::substream(cfg.seed, 0x2c4);
    const double pqs[3] = {1.5, 2.0, 3.0};
    for (long t = 0; t < cfg.trials; ++t) {
        auto [f, c] =
            random_unit_element(inst.space, inst.exponents, seed_for(cfg.seed, 9000 + t));
        f.values *= rng.uniform(0.5, 2.0);
        AveragingKernel<double> ker =
            rng.uniform() < 0.5
                ? make_box_kernel(inst.domain.W, rng.uniform(0.5, 2.0))
                : make_gaussian_kernel(inst.domain.W, rng.uniform(0.15, 0.5),
                                       rng.uniform(0.5, 2.0));
        MixedExponents e{pqs[static_cast<int>(rng.uniform(0.0, 3.0))],
                         pqs[static_cast<int>(rng.uniform(0.0, 3.0))]};
        auto slacks = young_check_mixed(f, ker, inst.domain.K, inst.domain.W, e);
        min_slack = std::min({min_slack, slacks.pq, slacks.inf});
    }
    out.value = min_slack;
    out.lower = -1e-12;
    out.pass = min_slack >= -1e-12;
    return out;
}

TrialOutcome check_lemma25(const Instruments& inst, const ExperimentConfig& cfg) {
    TrialOutcome out;
    out.label = "lemma25_moments";
    auto [f, cf] = random_unit_element(inst.space, inst.exponents, seed_for(cfg.seed, 0x25a));
    auto [g, cg] = random_unit_element(inst.space, inst.exponents, seed_for(cfg.seed, 0x25b));
    long trials = std::max<long>(1000, cfg.trials);
    double c_over_a1 = inst.analysis.c_phi_tilde / inst.analysis.a1;
    auto rep = empirical_y_moments(inst.space, f, g, inst.density, inst.kernel, c_over_a1,
                                   trials, seed_for(cfg.seed, 0x25c));
    bool mean_ok = std::abs(rep.mean_y_f) <= 3.0 * rep.stderr_y_f;
    bool centering_ok = std::abs(rep.grid_centering) <= 1e-12;
    out.value = rep.mean_y_f;
    out.upper = 3.0 * rep.stderr_y_f;
    out.pass = mean_ok && centering_ok && rep.diff_sup.pass && rep.diff_var.pass &&
               rep.unit_sup.pass && rep.unit_var.pass;
    return out;
}

TrialOutcome check_holder_chain(const Instruments& inst, const ExperimentConfig& cfg) {
    TrialOutcome out;
    out.label = "holder_l1_vs_pq";
    const auto& e = inst.exponents;
    double ep = e.p == kInf ? 1.0 : (e.p - 1.0) / e.p;
    double eq = e.q == kInf ? 1.0 : (e.q - 1.0) / e.q;
    double factor = std::pow(inst.domain.K.measure2(), eq) * std::pow(inst.domain.K.measure1(), ep);
    MixedExponents l1{1.0, 1.0};
    double min_slack = kInf;
    for (long t = 0; t < 200; ++t) {
        auto [f, c] = random_unit_element(inst.space, e, seed_for(cfg.seed, 11000 + t));
        min_slack = std::min(min_slack, factor * mixed_norm(f, inst.domain.K, e) -
                                            mixed_norm(f, inst.domain.K, l1));
    }
    out.value = min_slack;
    out.lower = -1e-12;
    out.pass = min_slack >= -1e-12;
    return out;
}

TrialOutcome check_conv_sup(const Instruments& inst, const ExperimentConfig& cfg) {
    TrialOutcome out;
    out.label = "conv_sup_bound";
    MixedExponents inf_exp{kInf, kInf};
    double min_slack = kInf;
    for (long t = 0; t < 200; ++t) {
        auto [f, c] = random_unit_element(inst.space, inst.exponents, seed_for(cfg.seed, 12000 + t));
        auto slacks = young_check_mixed(f, inst.kernel, inst.domain.K, inst.domain.W, inf_exp);
        min_slack = std::min(min_slack, slacks.inf);
    }
    out.value = min_slack;
    out.lower = -1e-12;
    out.pass = min_slack >= -1e-12;
    return out;
}

TrialOutcome check_l1_conv_chain(const Instruments& inst, const ExperimentConfig& cfg) {
    TrialOutcome out;
    out.label = "l1_conv_chain";
    const auto& e = inst.exponents;
    double ep = e.p == kInf ? 1.0 : (e.p - 1.0) / e.p;
    double eq = e.q == kInf ? 1.0 : (e.q - 1.0) / e.q;
    double bound = std::pow(inst.domain.K.measure2(), eq) *
                   std::pow(inst.domain.K.measure1(), ep) * inst.kernel.l1_norm;
    double min_slack = kInf;
    for (long t = 0; t < 200; ++t) {
        auto [f, c] = random_unit_element(inst.space, e, seed_for(cfg.seed, 13000 + t));
        auto flags = classify_membership(inst.space, f, inst.kernel, e, 0.0, kInf, 1.0);
        min_slack = std::min(min_slack, bound - flags.conv_l1);
    }
    out.value = min_slack;
    out.lower = -1e-12;
    out.pass = min_slack >= -1e-12;
    return out;
}

} // namespace

std::pair<double, double> wilson_interval(long successes, long total) {
    if (total <= 0) return {0.0, 1.0};
    double z = 1.959963984540054;
    double n = static_cast<double>(total);
    double phat = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = phat + z2 / (2.0 * n);
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, (center - half) / denom), std::min(1.0, (center + half) / denom)};
}

MonteCarloReport run_experiment(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Instruments inst = build_instruments(cfg);
    MonteCarloReport rep;
    rep.kind = to_string(cfg.kind);
    rep.seed = cfg.seed;
    rep.workers = resolve_workers(cfg.workers);
    rep.config = cfg;
    rep.constants = common_constants(inst);
    BoundInputs in = bound_inputs(inst);

    auto finalize_counts = [&rep]() {
        for (const auto& o : rep.outcomes) {
            if (o.membership_failure) ++rep.membership_failures;
            if (!o.injective) ++rep.injectivity_failures;
            if (!o.membership_failure && o.pass) ++rep.successes;
        }
        rep.tested = static_cast<long>(rep.outcomes.size()) - rep.membership_failures;
        rep.success_rate =
            rep.tested > 0 ? static_cast<double>(rep.successes) / rep.tested : 0.0;
        auto [lo, hi] = wilson_interval(rep.successes, rep.tested);
        rep.wilson_lo = lo;
        rep.wilson_hi = hi;
    };

    switch (cfg.kind) {
        case ExperimentKind::Bounds: {
            rep.trials = 0;
            rep.constants["p_min"] = p_min(cfg.n, cfg.m, in.d, in.omega_l1);
            rep.constants["thm32"] =
                thm32_json(thm32_constants(in, cfg.theta / cfg.alpha, cfg.gamma, cfg.n, cfg.m));
            if (cfg.eta < cfg.mu * in.c_rho_1)
                rep.constants["thm33"] =
                    thm33_json(thm33_constants(in, cfg.mu, cfg.eta, cfg.n, cfg.m));
            break;
        }
        case ExperimentKind::SamplingInequality32: {
            rep.trials = cfg.trials;
            Thm32Report thm = thm32_constants(in, cfg.theta / cfg.alpha, cfg.gamma, cfg.n, cfg.m);
            rep.constants["thm32"] = thm32_json(thm);
            rep.constants["p_min"] = p_min(cfg.n, cfg.m, in.d, in.omega_l1);
            rep.prob_available = true;
            rep.prob_lower = thm.prob_lower;
            rep.vacuous = thm.vacuous;
            rep.outcomes.resize(cfg.trials);
            run_parallel(cfg.trials, rep.workers, [&](long t) {
                guarded(rep.outcomes, t, [&] { return trial_sampling32(inst, cfg, thm, t); });
            });
            finalize_counts();
            break;
        }
        case ExperimentKind::SamplingInequality33: {
            rep.trials = cfg.trials;
            Thm33Report thm = thm33_constants(in, cfg.mu, cfg.eta, cfg.n, cfg.m);
            rep.constants["thm33"] = thm33_json(thm);
            rep.constants["p_min"] = p_min(cfg.n, cfg.m, in.d, in.omega_l1);
            rep.prob_available = true;
            rep.prob_lower = thm.prob_lower;
            rep.vacuous = thm.vacuous;
            rep.outcomes.resize(cfg.trials);
            run_parallel(cfg.trials, rep.workers, [&](long t) {
                guarded(rep.outcomes, t, [&] { return trial_sampling33(inst, cfg, thm, t); });
            });
            finalize_counts();
            break;
        }
        case ExperimentKind::Reconstruct: {
            rep.trials = cfg.trials;
            BetaEstimate beta =
                beta_estimate(inst.space, inst.kernel, inst.exponents,
                              std::max<int>(cfg.analysis_probes, static_cast<int>(inst.space.cols())),
                              cfg.seed);
            rep.constants["beta_hat"] = beta.beta;
            rep.constants["beta_hypothesis_failure"] = beta.hypothesis_failure;
            if (!beta.hypothesis_failure && inst.exponents.p > 1.0 && inst.exponents.q > 1.0 &&
                !std::isinf(inst.exponents.p) && !std::isinf(inst.exponents.q)) {
                Thm32Report thm = thm32_constants(in, beta.beta / inst.analysis.a2, cfg.gamma,
                                                  cfg.n, cfg.m);
                rep.constants["thm32_at_beta"] = thm32_json(thm);
                rep.prob_available = true;
                rep.prob_lower = thm.prob_lower;
                rep.vacuous = thm.vacuous;
            }
            rep.outcomes.resize(cfg.trials);
            run_parallel(cfg.trials, rep.workers, [&](long t) {
                guarded(rep.outcomes, t, [&] { return trial_reconstruct(inst, cfg, t); });
            });
            finalize_counts();
            break;
        }
        case ExperimentKind::VerifyLemmas: {
            rep.outcomes.push_back(check_lemma21(inst, cfg));
            rep.outcomes.push_back(check_young_scalar(inst, cfg));
            rep.outcomes.push_back(check_young_mixed(inst, cfg));
            rep.outcomes.push_back(check_lemma25(inst, cfg));
            rep.outcomes.push_back(check_holder_chain(inst, cfg));
            rep.outcomes.push_back(check_conv_sup(inst, cfg));
            rep.outcomes.push_back(check_l1_conv_chain(inst, cfg));
            rep.trials = static_cast<long>(rep.outcomes.size());
            for (long i = 0; i < rep.trials; ++i) rep.outcomes[i].index = i;
            finalize_counts();
            break;
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

ordered_json report_to_json(const MonteCarloReport& rep, bool include_wall) {
    ordered_json trials = ordered_json::array();
    for (const auto& o : rep.outcomes) {
        ordered_json row{
            {"index", o.index},
            {"pass", o.pass},
            {"membership_failure", o.membership_failure},
            {"injective", o.injective},
            {"lower", o.lower},
            {"value", o.value},
            {"upper", o.upper},
            {"rel_coeff", o.rel_coeff},
            {"rel_pq", o.rel_pq},
            {"rel_inf", o.rel_inf},
        };
        if (!o.label.empty()) row["label"] = o.label;
        if (!o.error.empty()) row["error"] = o.error;
        trials.push_back(std::move(row));
    }
    ordered_json j{
        {"kind", rep.kind},
        {"seed", rep.seed},
        {"workers", rep.workers},
        {"trials", rep.trials},
        {"tested", rep.tested},
        {"successes", rep.successes},
        {"success_rate", rep.success_rate},
        {"wilson_lo", rep.wilson_lo},
        {"wilson_hi", rep.wilson_hi},
        {"prob_available", rep.prob_available},
        {"prob_lower", rep.prob_lower},
        {"vacuous", rep.vacuous},
        {"membership_failures", rep.membership_failures},
        {"injectivity_failures", rep.injectivity_failures},
        {"constants", rep.constants},
        {"config", config_to_json(rep.config)},
        {"outcomes", std::move(trials)},
    };
    if (include_wall) j["wall_ms"] = rep.wall_ms;
    return j;
}

namespace {
std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

std::string report_trials_csv(const MonteCarloReport& rep) {
    std::string out =
        "index,label,pass,membership_failure,injective,lower,value,upper,rel_coeff,rel_pq,"
        "rel_inf,error\r\n";
    for (const auto& o : rep.outcomes) {
        out += std::to_string(o.index) + ',' + csv_escape(o.label) + ',' +
               (o.pass ? "1" : "0") + ',' + (o.membership_failure ? "1" : "0") + ',' +
               (o.injective ? "1" : "0") + ',' + num(o.lower) + ',' + num(o.value) + ',' +
               num(o.upper) + ',' + num(o.rel_coeff) + ',' + num(o.rel_pq) + ',' +
               num(o.rel_inf) + ',' + csv_escape(o.error) + "\r\n";
    }
    return out;
}

} // namespace qsis
