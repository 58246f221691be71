#pragma once

// Seeded Monte Carlo model of the witch process.
//
// PRNG: xoshiro256** (Blackman & Vigna), state seeded from a 64-bit seed
// by four successive SplitMix64 outputs. Bounded integers use rejection
// sampling on the full 64-bit output (threshold = 2^64 mod n), so every
// draw is unbiased and bit-identical across platforms. Probabilities are
// sampled exactly: a categorical over rationals draws one integer in
// [0, lcm of denominators) and walks the cumulative numerators.

#include "witchbayes/decision.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace witchbayes {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed);
    explicit Rng(const std::array<std::uint64_t, 4>& state) : s_(state) {}

    std::uint64_t next();
    /// Uniform in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

    const std::array<std::uint64_t, 4>& state() const { return s_; }

private:
    std::array<std::uint64_t, 4> s_;
};

/// Exact sampler for a finite distribution with rational weights.
class CategoricalSampler {
public:
    explicit CategoricalSampler(const Distribution& d);
    std::size_t sample(Rng& rng) const;
    const std::string& label(std::size_t i) const { return labels_[i]; }

private:
    std::vector<std::string> labels_;
    std::vector<std::uint64_t> cumulative_;
    std::uint64_t denominator_ = 1;
};

struct Composition {
    int violet = 14;
    int total = 21;
};

struct DayRecord {
    std::uint64_t day_index = 0;
    std::string true_hypothesis;
    std::string hat_color;
    std::string food_served;
    std::string witch_taste;
    bool angry = false;

    friend bool operator==(const DayRecord&, const DayRecord&) = default;
};

nlohmann::json to_json(const DayRecord& rec);

/// Precomputed samplers for one composition/strategy pair. Each day draws,
/// in order: the witch (uniform over `total`), her taste given her hat,
/// and the food from the strategy row for that hat.
class DaySimulator {
public:
    DaySimulator(Composition composition, const Strategy& strategy, const LikelihoodTable& taste_table);
    DayRecord simulate(Rng& rng, std::uint64_t day_index) const;

private:
    Composition composition_;
    std::string hypothesis_;
    std::map<std::string, CategoricalSampler> taste_;
    std::map<std::string, CategoricalSampler> food_;
};

DayRecord simulate_day(Rng& rng, Composition composition, const Strategy& strategy,
                       const LikelihoodTable& taste_table, std::uint64_t day_index = 0);

EvidenceSequence simulate_hat_sequence(Rng& rng, Composition composition, std::uint64_t days);

struct SimConfig {
    std::uint64_t seed = 42;
    std::uint64_t trials = 100000;
    Composition composition;
    Strategy strategy;
    LikelihoodTable taste_table = build_witch_scenario(WitchConfig{}).require_second_layer();
};

struct HatTally {
    std::uint64_t days = 0;
    std::uint64_t angry = 0;
    Probability exact_anger;
};

struct SimSummary {
    std::uint64_t seed = 0;
    std::uint64_t days = 0;
    Composition composition;
    std::map<std::string, HatTally> per_hat;
    std::uint64_t angry = 0;
};

nlohmann::json to_json(const SimSummary& summary);

/// Runs `cfg.trials` days; `on_day` sees every record in order.
SimSummary run_simulation(const SimConfig& cfg, const std::function<void(const DayRecord&)>& on_day = {});

struct CalibrationBin {
    Rational lower;
    Rational upper;
    std::uint64_t runs = 0;
    std::uint64_t hits = 0;         // runs whose true hypothesis was the target
    double expected_hits = 0;       // sum of the posteriors assigned to the target
    double variance = 0;            // sum of p(1-p)

    bool within(double sigmas) const;
};

struct CalibrationReport {
    std::uint64_t seed = 0;
    std::uint64_t days = 0;
    std::uint64_t repetitions = 0;
    std::string target;
    double mean_true_posterior = 0;
    std::map<std::string, std::uint64_t> true_hypothesis_counts;
    std::vector<CalibrationBin> bins;

    bool calibrated(double sigmas = 3.0) const;
};

nlohmann::json to_json(const CalibrationReport& report);

/// Draws a true hypothesis from the prior, a sequence of `days` outcomes
/// from its row, and scores the exact posterior, `repetitions` times.
/// `target` defaults to the last hypothesis.
CalibrationReport monte_carlo_posterior_check(std::uint64_t seed, const Scenario& scenario, std::uint64_t days,
                                              std::uint64_t repetitions, std::size_t bins = 10,
                                              std::string target = {});

}  // namespace witchbayes
