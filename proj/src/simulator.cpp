#include "witchbayes/simulator.hpp"

#include "witchbayes/error.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <cmath>
#include <limits>

namespace witchbayes {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t to_u64(const BigInt& v, const char* what) {
    if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) {
        throw Error(ErrorKind::InvalidArgument, std::string(what) + " does not fit in 64 bits");
    }
    return v.convert_to<std::uint64_t>();
}

}  // namespace

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "Rng::below(0)");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % n;
    }
}

CategoricalSampler::CategoricalSampler(const Distribution& d) {
    BigInt lcm = 1;
    for (const auto& e : d.entries()) lcm = boost::integer::lcm(lcm, e.p.value().den());
    denominator_ = to_u64(lcm, "sampler denominator");
    std::uint64_t acc = 0;
    for (const auto& e : d.entries()) {
        labels_.push_back(e.label);
        acc += to_u64(e.p.value().num() * (lcm / e.p.value().den()), "sampler weight");
        cumulative_.push_back(acc);
    }
}

std::size_t CategoricalSampler::sample(Rng& rng) const {
    const std::uint64_t u = rng.below(denominator_);
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
        if (u < cumulative_[i]) return i;
    }
    return cumulative_.size() - 1;  // unreachable: cumulative_.back() == denominator_
}

nlohmann::json to_json(const DayRecord& rec) {
    return {{"type", "day"},
            {"day", rec.day_index},
            {"true_hypothesis", rec.true_hypothesis},
            {"hat", rec.hat_color},
            {"food", rec.food_served},
            {"taste", rec.witch_taste},
            {"angry", rec.angry}};
}

DaySimulator::DaySimulator(Composition composition, const Strategy& strategy, const LikelihoodTable& taste_table)
    : composition_(composition), hypothesis_(witch_hypothesis_label(composition.violet)) {
    if (composition.total <= 0 || composition.violet < 0 || composition.violet > composition.total) {
        throw Error(ErrorKind::InvalidArgument, "invalid composition");
    }
    for (const char* hat : {labels::black, labels::violet}) {
        taste_.emplace(hat, CategoricalSampler(taste_table.row_distribution(taste_table.row_index(hat))));
        if (strategy.covers(hat)) food_.emplace(hat, CategoricalSampler(strategy.for_hat(hat)));
    }
    if (composition.violet > 0 && !strategy.covers(labels::violet)) {
        throw Error(ErrorKind::UnknownHatColor, "strategy does not cover hat 'V'");
    }
    if (composition.violet < composition.total && !strategy.covers(labels::black)) {
        throw Error(ErrorKind::UnknownHatColor, "strategy does not cover hat 'N'");
    }
}

DayRecord DaySimulator::simulate(Rng& rng, std::uint64_t day_index) const {
    const auto witch = rng.below(static_cast<std::uint64_t>(composition_.total));
    const std::string hat = witch < static_cast<std::uint64_t>(composition_.violet) ? labels::violet : labels::black;
    const auto& taste_sampler = taste_.at(hat);
    const auto& food_sampler = food_.at(hat);
    DayRecord rec;
    rec.day_index = day_index;
    rec.true_hypothesis = hypothesis_;
    rec.hat_color = hat;
    rec.witch_taste = taste_sampler.label(taste_sampler.sample(rng));
    rec.food_served = food_sampler.label(food_sampler.sample(rng));
    rec.angry = rec.food_served != rec.witch_taste;
    return rec;
}

DayRecord simulate_day(Rng& rng, Composition composition, const Strategy& strategy,
                       const LikelihoodTable& taste_table, std::uint64_t day_index) {
    return DaySimulator(composition, strategy, taste_table).simulate(rng, day_index);
}

EvidenceSequence simulate_hat_sequence(Rng& rng, Composition composition, std::uint64_t days) {
    if (composition.total <= 0 || composition.violet < 0 || composition.violet > composition.total) {
        throw Error(ErrorKind::InvalidArgument, "invalid composition");
    }
    EvidenceSequence seq;
    seq.reserve(days);
    for (std::uint64_t d = 0; d < days; ++d) {
        const auto witch = rng.below(static_cast<std::uint64_t>(composition.total));
        seq.emplace_back(witch < static_cast<std::uint64_t>(composition.violet) ? labels::violet : labels::black);
    }
    return seq;
}

SimSummary run_simulation(const SimConfig& cfg, const std::function<void(const DayRecord&)>& on_day) {
    const DaySimulator sim(cfg.composition, cfg.strategy, cfg.taste_table);
    Rng rng(cfg.seed);
    SimSummary summary;
    summary.seed = cfg.seed;
    summary.days = cfg.trials;
    summary.composition = cfg.composition;
    for (const char* hat : {labels::black, labels::violet}) {
        if (cfg.strategy.covers(hat)) {
            summary.per_hat[hat] = HatTally{0, 0, anger_probability(cfg.strategy, cfg.taste_table, hat)};
        }
    }
    for (std::uint64_t d = 0; d < cfg.trials; ++d) {
        const auto rec = sim.simulate(rng, d);
        auto& tally = summary.per_hat.at(rec.hat_color);
        ++tally.days;
        if (rec.angry) {
            ++tally.angry;
            ++summary.angry;
        }
        if (on_day) on_day(rec);
    }
    return summary;
}

nlohmann::json to_json(const SimSummary& summary) {
    nlohmann::json per_hat = nlohmann::json::object();
    for (const auto& [hat, t] : summary.per_hat) {
        per_hat[hat] = {{"days", t.days},
                        {"angry", t.angry},
                        {"exact_anger", t.exact_anger.value().str()},
                        {"exact_anger_approx", t.exact_anger.value().to_decimal()}};
    }
    return {{"type", "summary"},
            {"seed", summary.seed},
            {"days", summary.days},
            {"composition", {{"violet", summary.composition.violet}, {"total", summary.composition.total}}},
            {"angry", summary.angry},
            {"per_hat", std::move(per_hat)}};
}

bool CalibrationBin::within(double sigmas) const {
    return std::abs(static_cast<double>(hits) - expected_hits) <= sigmas * std::sqrt(variance) + 1e-9;
}

bool CalibrationReport::calibrated(double sigmas) const {
    for (const auto& b : bins) {
        if (b.runs > 0 && !b.within(sigmas)) return false;
    }
    return true;
}

nlohmann::json to_json(const CalibrationReport& report) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : report.bins) {
        bins.push_back({{"lower", b.lower.str()},
                        {"upper", b.upper.str()},
                        {"runs", b.runs},
                        {"hits", b.hits},
                        {"expected_hits", b.expected_hits},
                        {"sigma", std::sqrt(b.variance)},
                        {"within_3sigma", b.within(3.0)}});
    }
    return {{"type", "calibration"},
            {"seed", report.seed},
            {"days", report.days},
            {"repetitions", report.repetitions},
            {"target", report.target},
            {"mean_true_posterior", report.mean_true_posterior},
            {"true_hypothesis_counts", report.true_hypothesis_counts},
            {"bins", std::move(bins)},
            {"calibrated", report.calibrated()}};
}

CalibrationReport monte_carlo_posterior_check(std::uint64_t seed, const Scenario& scenario, std::uint64_t days,
                                              std::uint64_t repetitions, std::size_t bins, std::string target) {
    if (repetitions == 0) throw Error(ErrorKind::InvalidArgument, "repetitions must be positive");
    if (bins == 0) throw Error(ErrorKind::InvalidArgument, "bins must be positive");
    const auto& table = scenario.first_layer();
    if (target.empty()) target = table.rows().back();
    const std::size_t target_idx = table.row_index(target);

    const CategoricalSampler prior_sampler(scenario.prior());
    std::vector<CategoricalSampler> row_samplers;
    for (std::size_t i = 0; i < table.rows().size(); ++i) row_samplers.emplace_back(table.row_distribution(i));

    CalibrationReport report;
    report.seed = seed;
    report.days = days;
    report.repetitions = repetitions;
    report.target = target;
    for (std::size_t b = 0; b < bins; ++b) {
        report.bins.push_back({Rational(static_cast<std::int64_t>(b), static_cast<std::int64_t>(bins)),
                               Rational(static_cast<std::int64_t>(b + 1), static_cast<std::int64_t>(bins))});
    }

    // The posterior depends only on outcome counts, so it is cached per count vector.
    std::map<std::vector<std::uint64_t>, Distribution> cache;
    Rng rng(seed);
    double true_posterior_sum = 0;
    for (std::uint64_t r = 0; r < repetitions; ++r) {
        const std::size_t truth = prior_sampler.sample(rng);
        ++report.true_hypothesis_counts[table.rows()[truth]];
        std::vector<std::uint64_t> counts(table.outcomes().size(), 0);
        for (std::uint64_t d = 0; d < days; ++d) ++counts[row_samplers[truth].sample(rng)];

        auto it = cache.find(counts);
        if (it == cache.end()) {
            EvidenceSequence seq;
            for (std::size_t j = 0; j < counts.size(); ++j) seq.insert(seq.end(), counts[j], table.outcomes()[j]);
            it = cache.emplace(counts, sequential_posterior(scenario, seq)).first;
        }
        const auto& post = it->second;
        true_posterior_sum += post.entries()[truth].p.value().to_double();

        const Rational& p = post.entries()[target_idx].p.value();
        const Rational scaled = p * Rational(static_cast<std::int64_t>(bins));
        auto bin = BigInt(scaled.num() / scaled.den()).convert_to<std::size_t>();
        if (bin >= bins) bin = bins - 1;
        auto& cell = report.bins[bin];
        const double pd = p.to_double();
        ++cell.runs;
        cell.expected_hits += pd;
        cell.variance += pd * (1 - pd);
        if (truth == target_idx) ++cell.hits;
    }
    report.mean_true_posterior = true_posterior_sum / static_cast<double>(repetitions);
    return report;
}

}  // namespace witchbayes
