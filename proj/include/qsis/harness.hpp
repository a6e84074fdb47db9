// Seeded Monte Carlo experiment driver and report serialization.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qsis/config.hpp"

namespace qsis {

struct TrialOutcome {
    long index = 0;
    bool pass = false;
    bool membership_failure = false;
    bool injective = true;
    std::string label;      // check name for verify-lemmas rows
    std::string error;      // module error annotated with the trial index
    double lower = 0.0;     // event bounds and the tested statistic
    double value = 0.0;
    double upper = 0.0;
    double rel_coeff = 0.0; // reconstruct diagnostics
    double rel_pq = 0.0;
    double rel_inf = 0.0;
};

struct MonteCarloReport {
    std::string kind;
    long trials = 0;
    long tested = 0;     // trials minus membership failures
    long successes = 0;
    double success_rate = 0.0; // successes / tested
    double wilson_lo = 0.0;    // 95% binomial interval
    double wilson_hi = 0.0;
    bool prob_available = false;
    double prob_lower = 0.0;
    bool vacuous = false;
    long membership_failures = 0;
    long injectivity_failures = 0;
    nlohmann::ordered_json constants; // every evaluated constant, by name
    std::vector<TrialOutcome> outcomes;
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
    int workers = 1;
    ExperimentConfig config;
};

MonteCarloReport run_experiment(const ExperimentConfig& cfg);

// Stable-field-order JSON; wall-clock can be masked for byte comparisons.
nlohmann::ordered_json report_to_json(const MonteCarloReport& rep, bool include_wall = true);

// RFC-4180 CSV: one header row, then one row per trial outcome.
std::string report_trials_csv(const MonteCarloReport& rep);

// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(long successes, long total);

int cli_main(int argc, const char* const* argv);

} // namespace qsis
