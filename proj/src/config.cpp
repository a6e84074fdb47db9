#include "qsis/config.hpp"

#include <fstream>

#include "json.hpp"

namespace qsis {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::VerifyLemmas: return "verify-lemmas";
        case ExperimentKind::SamplingInequality32: return "sampling-inequality-32";
        case ExperimentKind::SamplingInequality33: return "sampling-inequality-33";
        case ExperimentKind::Reconstruct: return "reconstruct";
        case ExperimentKind::Bounds: return "bounds";
    }
    throw InvalidParameter("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "verify-lemmas") return ExperimentKind::VerifyLemmas;
    if (s == "sampling-inequality-32") return ExperimentKind::SamplingInequality32;
    if (s == "sampling-inequality-33") return ExperimentKind::SamplingInequality33;
    if (s == "reconstruct") return ExperimentKind::Reconstruct;
    if (s == "bounds") return ExperimentKind::Bounds;
    throw InvalidParameter("unknown experiment kind: " + s);
}

ExperimentConfig reference_config() {
    ExperimentConfig cfg;
    // 1/64 grid step; axes padded two steps beyond K~ = [-0.25, 1.25]^2 so
    // interpolated reads near the boundary stay on the grid.
    double h = 1.0 / 64.0;
    cfg.axis1 = {"interval", -0.25 - 2.0 * h, 1.25 + 2.0 * h, 100};
    cfg.axis2 = cfg.axis1;
    return cfg;
}

static ordered_json axis_to_json(const AxisConfig& a) {
    return ordered_json{{"kind", a.kind}, {"start", a.start}, {"end", a.end},
                        {"num_points", a.num_points}};
}

static AxisConfig axis_from_json(const json& j) {
    AxisConfig a;
    a.kind = j.at("kind").get<std::string>();
    a.start = j.at("start").get<double>();
    a.end = j.at("end").get<double>();
    a.num_points = j.at("num_points").get<long>();
    return a;
}

ordered_json config_to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["domain"] = ordered_json{
        {"axis1", axis_to_json(c.axis1)},
        {"axis2", axis_to_json(c.axis2)},
        {"K", {{c.k_lo1, c.k_hi1}, {c.k_lo2, c.k_hi2}}},
        {"W", {{c.w_lo1, c.w_hi1}, {c.w_lo2, c.w_hi2}}},
    };
    j["space"] = ordered_json{
        {"generator", "bspline"},   {"order", c.order},
        {"scale", c.scale},         {"r", c.r},
        {"delta1", c.delta1},       {"delta2", c.delta2},
        {"jitter", c.jitter},       {"shift_seed", c.shift_seed},
        {"analysis_probes", c.analysis_probes},
    };
    j["kernel"] = ordered_json{{"family", c.kernel_family},
                               {"l1", c.kernel_l1},
                               {"sigma_frac", c.kernel_sigma_frac}};
    j["density"] = ordered_json{{"family", c.density_family},
                                {"sigma_frac", c.density_sigma_frac},
                                {"lambda", c.density_lambda},
                                {"mode", c.sample_mode}};
    j["exponents"] = ordered_json{{"p", c.p}, {"q", c.q}};
    j["experiment"] = ordered_json{
        {"kind", to_string(c.kind)}, {"trials", c.trials}, {"n", c.n}, {"m", c.m},
        {"gamma", c.gamma},          {"theta", c.theta},   {"alpha", c.alpha},
        {"mu", c.mu},                {"eta", c.eta},       {"zeta", c.zeta},
        {"seed", c.seed},            {"workers", c.workers},
    };
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    const auto& dom = j.at("domain");
    c.axis1 = axis_from_json(dom.at("axis1"));
    c.axis2 = axis_from_json(dom.at("axis2"));
    c.k_lo1 = dom.at("K").at(0).at(0).get<double>();
    c.k_hi1 = dom.at("K").at(0).at(1).get<double>();
    c.k_lo2 = dom.at("K").at(1).at(0).get<double>();
    c.k_hi2 = dom.at("K").at(1).at(1).get<double>();
    c.w_lo1 = dom.at("W").at(0).at(0).get<double>();
    c.w_hi1 = dom.at("W").at(0).at(1).get<double>();
    c.w_lo2 = dom.at("W").at(1).at(0).get<double>();
    c.w_hi2 = dom.at("W").at(1).at(1).get<double>();
    const auto& sp = j.at("space");
    c.order = sp.at("order").get<int>();
    c.scale = sp.at("scale").get<double>();
    c.r = sp.at("r").get<int>();
    c.delta1 = sp.at("delta1").get<double>();
    c.delta2 = sp.at("delta2").get<double>();
    c.jitter = sp.at("jitter").get<double>();
    c.shift_seed = sp.at("shift_seed").get<std::uint64_t>();
    c.analysis_probes = sp.value("analysis_probes", 64);
    const auto& ker = j.at("kernel");
    c.kernel_family = ker.at("family").get<std::string>();
    c.kernel_l1 = ker.value("l1", 1.0);
    c.kernel_sigma_frac = ker.value("sigma_frac", 0.25);
    const auto& den = j.at("density");
    c.density_family = den.at("family").get<std::string>();
    c.density_sigma_frac = den.value("sigma_frac", 0.5);
    c.density_lambda = den.value("lambda", 0.5);
    c.sample_mode = den.value("mode", std::string("joint"));
    c.p = j.at("exponents").at("p").get<double>();
    c.q = j.at("exponents").at("q").get<double>();
    const auto& ex = j.at("experiment");
    c.kind = experiment_kind_from_string(ex.at("kind").get<std::string>());
    c.trials = ex.at("trials").get<long>();
    c.n = ex.at("n").get<long>();
    c.m = ex.at("m").get<long>();
    c.gamma = ex.value("gamma", 0.5);
    c.theta = ex.value("theta", 0.1);
    c.alpha = ex.value("alpha", 1.0);
    c.mu = ex.value("mu", 0.2);
    c.eta = ex.value("eta", 0.05);
    c.zeta = ex.value("zeta", 0.2);
    c.seed = ex.at("seed").get<std::uint64_t>();
    c.workers = ex.value("workers", 0);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidParameter("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidParameter("cannot write config file: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

static AxisKind axis_kind_from_string(const std::string& s) {
    if (s == "interval") return AxisKind::Interval;
    if (s == "cyclic") return AxisKind::Cyclic;
    throw InvalidParameter("unknown axis kind: " + s);
}

Instruments build_instruments(const ExperimentConfig& cfg) {
    Instruments inst;
    Axis a1 = build_axis(axis_kind_from_string(cfg.axis1.kind), cfg.axis1.start, cfg.axis1.end,
                         cfg.axis1.num_points);
    Axis a2 = build_axis(axis_kind_from_string(cfg.axis2.kind), cfg.axis2.start, cfg.axis2.end,
                         cfg.axis2.num_points);
    inst.domain = make_product_domain(a1, a2, cfg.k_lo1, cfg.k_hi1, cfg.k_lo2, cfg.k_hi2,
                                      cfg.w_lo1, cfg.w_hi1, cfg.w_lo2, cfg.w_hi2);
    GeneratorSet gens = make_bspline_generators(cfg.order, cfg.scale, cfg.r);
    const auto& kt = inst.domain.Ktilde;
    ShiftSystem shifts = make_shift_system(
        kt.a1.range.lo - gens.omega_hi, kt.a1.range.hi - gens.omega_lo,
        kt.a2.range.lo - gens.omega_hi, kt.a2.range.hi - gens.omega_lo, cfg.delta1, cfg.delta2,
        cfg.jitter, cfg.shift_seed);
    inst.space = make_qsis_space(inst.domain, gens, shifts);
    if (cfg.kernel_family == "box") {
        inst.kernel = make_box_kernel(inst.domain.W, cfg.kernel_l1);
    } else if (cfg.kernel_family == "gaussian") {
        inst.kernel = make_gaussian_kernel(inst.domain.W, cfg.kernel_sigma_frac, cfg.kernel_l1);
    } else {
        throw InvalidParameter("unknown kernel family: " + cfg.kernel_family);
    }
    if (cfg.density_family == "uniform") {
        inst.density = make_uniform_density(inst.domain.K);
    } else if (cfg.density_family == "gaussian") {
        inst.density = make_gaussian_density(inst.domain.K, cfg.density_sigma_frac);
    } else if (cfg.density_family == "tilted") {
        inst.density = make_tilted_density(inst.domain.K, cfg.density_lambda);
    } else {
        throw InvalidParameter("unknown density family: " + cfg.density_family);
    }
    if (cfg.sample_mode == "joint") {
        inst.mode = SampleMode::Joint;
    } else if (cfg.sample_mode == "product") {
        inst.mode = SampleMode::Product;
    } else {
        throw InvalidParameter("unknown sample mode: " + cfg.sample_mode);
    }
    inst.exponents = make_exponents(cfg.p, cfg.q);
    inst.analysis = analyze_space(inst.space, inst.exponents, cfg.analysis_probes, cfg.seed);
    return inst;
}

} // namespace qsis
