// Experiment configuration: JSON-backed, round-trip stable, and the factory
// that instantiates the domain, space, kernel, and density it describes.
#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "qsis/averaging.hpp"
#include "qsis/domain.hpp"
#include "qsis/sampling.hpp"
#include "qsis/space.hpp"

namespace qsis {

enum class ExperimentKind {
    VerifyLemmas,
    SamplingInequality32,
    SamplingInequality33,
    Reconstruct,
    Bounds,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct AxisConfig {
    std::string kind = "interval";
    double start = 0.0;
    double end = 1.0;
    long num_points = 64;
};

struct ExperimentConfig {
    // domain
    AxisConfig axis1;
    AxisConfig axis2;
    double k_lo1 = 0.0, k_hi1 = 1.0, k_lo2 = 0.0, k_hi2 = 1.0;
    double w_lo1 = -0.25, w_hi1 = 0.25, w_lo2 = -0.25, w_hi2 = 0.25;
    // space
    int order = 1;
    double scale = 0.5;
    int r = 1;
    double delta1 = 0.5, delta2 = 0.5;
    double jitter = 0.25;
    std::uint64_t shift_seed = 1;
    int analysis_probes = 64;
    // kernel
    std::string kernel_family = "box"; // box | gaussian
    double kernel_l1 = 1.0;
    double kernel_sigma_frac = 0.25;
    // density
    std::string density_family = "uniform"; // uniform | gaussian | tilted
    double density_sigma_frac = 0.5;
    double density_lambda = 0.5;
    std::string sample_mode = "joint"; // joint | product
    // exponents
    double p = 2.0;
    double q = 2.0;
    // experiment
    ExperimentKind kind = ExperimentKind::Reconstruct;
    long trials = 100;
    long n = 8;
    long m = 8;
    double gamma = 0.5;
    double theta = 0.1;
    double alpha = 1.0;
    double mu = 0.2;
    double eta = 0.05;
    double zeta = 0.2;
    std::uint64_t seed = 12345;
    int workers = 0; // 0: QSIS_WORKERS env or hardware concurrency
};

// The desk-scale reference setup: K = [0,1]^2, W = [-0.25,0.25]^2, order-1
// B-splines at scale 0.5 on a jittered half-step lattice, box kernel of unit
// mass, uniform density, p = q = 2.
ExperimentConfig reference_config();

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Everything an experiment needs, built once per run from the config.
struct Instruments {
    ProductDomain domain;
    QsisSpace space;
    AveragingKernel<double> kernel;
    SamplingDensity density;
    MixedExponents exponents;
    SpaceAnalysis analysis;
    SampleMode mode = SampleMode::Joint;
};

Instruments build_instruments(const ExperimentConfig& cfg);

} // namespace qsis
