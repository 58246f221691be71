// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include "support/oracles.hpp"
#include "witchbayes/decision.hpp"
#include "witchbayes/error.hpp"
#include "witchbayes/inference.hpp"
#include "witchbayes/session.hpp"
#include "witchbayes/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace witchbayes;

namespace {

Probability P(std::int64_t n, std::int64_t d) { return Probability(Rational(n, d)); }

EvidenceSequence seq_of(std::string_view s) {
    EvidenceSequence out;
    for (char c : s) out.emplace_back(1, c);
    return out;
}

// Collects failures for one criterion.
struct Check {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

bool within_sigmas(std::uint64_t observed, std::uint64_t n, const Rational& p, double k = 3.0) {
    const double pd = p.to_double();
    const double sd = std::sqrt(static_cast<double>(n) * pd * (1 - pd));
    return std::abs(static_cast<double>(observed) - static_cast<double>(n) * pd) <= k * sd;
}

const Scenario& witches() {
    static const Scenario s = build_witch_scenario(WitchConfig{});
    return s;
}

EvidenceSequence shuffled(EvidenceSequence seq, Rng& rng) {
    for (std::size_t k = seq.size(); k > 1; --k) std::swap(seq[k - 1], seq[rng.below(k)]);
    return seq;
}

void four_black(Check& c) {
    const auto post = sequential_posterior(witches(), seq_of("NNNN"));
    c.expect(post.at("V7") == P(16, 17), "P(V7|NNNN) = " + post.at("V7").value().str());
    c.expect(post.at("V14") == P(1, 17), "P(V14|NNNN) = " + post.at("V14").value().str());
}

void ten_violet(Check& c) {
    const auto post = sequential_posterior(witches(), seq_of("VVVVVVVVVV"));
    c.expect(post.at("V7") == P(1, 1025), "P(V7|10V) = " + post.at("V7").value().str());
    c.expect(post.at("V14") == P(1024, 1025), "P(V14|10V) = " + post.at("V14").value().str());
}

void predictive_ten_violet(Check& c) {
    const auto p = predictive(witches(), seq_of("VVVVVVVVVV"), "V");
    c.expect(p == P(2049, 3075), "P(V|10V) = " + p.value().str());
    const auto text = p.value().to_decimal();
    c.expect(text.rfind("0.6663", 0) == 0, "decimal rendering " + text);
}

void balanced_sequences(Check& c) {
    Rng rng(101);
    for (int k = 0; k <= 60; ++k) {
        EvidenceSequence seq;
        for (int i = 0; i < k; ++i) {
            seq.emplace_back("N");
            seq.emplace_back("V");
        }
        for (int rep = 0; rep < 5; ++rep) {
            const auto s = shuffled(seq, rng);
            c.expect(sequential_posterior(witches(), s) == witches().prior(), "balanced length " + std::to_string(2 * k));
        }
    }
}

void exchangeability(Check& c) {
    Rng rng(202);
    for (int i = 0; i < 1000; ++i) {
        EvidenceSequence seq;
        for (std::uint64_t k = 0, len = rng.below(40); k < len; ++k) seq.emplace_back(rng.below(2) ? "V" : "N");
        const auto other = shuffled(seq, rng);
        c.expect(sequential_posterior(witches(), seq) == sequential_posterior(witches(), other), "pair " + std::to_string(i));
    }
}

void odds_identity(Check& c) {
    Rng rng(303);
    int cases = 0;
    while (cases < 1000) {
        const auto den = static_cast<std::int64_t>(1 + rng.below(100));
        const Rational prior_a(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den) + 1)), den);
        const Distribution prior({{"A", Probability(prior_a)}, {"B", Probability(Rational(1) - prior_a)}});
        const auto lden = static_cast<std::int64_t>(1 + rng.below(100));
        const Probability la(Rational(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(lden) + 1)), lden));
        const Probability lb(Rational(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(lden) + 1)), lden));
        // the posterior is undefined when the evidence has zero probability
        if ((prior_a * la.value() + (Rational(1) - prior_a) * lb.value()).is_zero()) continue;
        // both forms need a defined ratio
        if (la.value().is_zero() && lb.value().is_zero()) continue;
        const std::vector<Probability> lik{la, lb};
        const auto direct = posterior(prior, lik);
        const auto via_odds =
            distribution_from_odds(update_odds(odds_from_distribution(prior, "A", "B"), bayes_factor(la, lb)), "A", "B");
        c.expect(direct == via_odds, "case " + std::to_string(cases));
        ++cases;
    }
}

void decision(Check& c) {
    const auto& tastes = witches().require_second_layer();
    const auto det = anger_probability(deterministic_strategy(tastes), tastes, "V");
    const auto med = anger_probability(medallion_strategy(tastes), tastes, "V");
    c.expect(det == P(7, 49), "deterministic anger " + det.value().str());
    c.expect(med == P(12, 49), "medallion anger " + med.value().str());
    const auto board = chessboard_oracle();
    c.expect(board == ChessboardCount{37, 12},
             "chessboard " + std::to_string(board.satisfied) + "," + std::to_string(board.angry));
}

void taste_limit(Check& c) {
    WitchConfig certain;
    certain.candidate_violet_counts = {14};
    const auto v14 = build_witch_scenario(certain);
    c.expect(second_layer_predictive(v14, {}, "Sweet") == P(4, 7), "P(Sweet|V14)");
    c.expect(second_layer_predictive(v14, {}, "Salty") == P(3, 7), "P(Salty|V14)");
    const auto oracle = oracle::enumerate_joint(witches(), seq_of("NNNN"));
    c.expect(oracle.next_second.at("Salty") == Rational(83, 119), "oracle P(S|4N) = " + oracle.next_second.at("Salty").str());
    const auto lib = second_layer_predictive(witches(), seq_of("NNNN"), "Salty");
    c.expect(lib.value() == oracle.next_second.at("Salty"), "library P(S|4N) = " + lib.value().str());
}

void tombola(Check& c) {
    const auto sc = builtin_scenario("tombola");
    c.expect(sequential_posterior(sc, {"dispari"}).at("37") == P(1, 45), "P(37|dispari)");
    c.expect(sequential_posterior(sc, {"pari"}).at("37") == P(0, 1), "P(37|pari)");
    const auto btf = bayes_factor(sc.first_layer().at("37", "dispari"), sc.first_layer().at("other", "dispari"));
    c.expect(btf == BayesFactor(Rational(89, 44)), "BTF " + btf.str());
    const auto odds = update_odds(Odds(1, 89), btf);
    c.expect(odds == Odds(1, 44), "posterior odds " + odds.str());
    c.expect(distribution_from_odds(odds, "37", "other").at("37") == P(1, 45), "odds to probability");
}

void prenatal(Check& c) {
    const auto sc = builtin_scenario("prenatal");
    const auto m = sequential_posterior(sc, {"m"}).at("M");
    const auto f = sequential_posterior(sc, {"f"}).at("F");
    // 4-cell joint table
    const Rational mm = Rational(1, 2) * Rational(95, 100), mf = Rational(1, 2) * Rational(5, 100);
    const Rational fm = Rational(1, 2) * Rational(20, 100), ff = Rational(1, 2) * Rational(80, 100);
    c.expect(m.value() == mm / (mm + fm), "P(M|m) = " + m.value().str());
    c.expect(f.value() == ff / (ff + mf), "P(F|f) = " + f.value().str());
    c.expect(m == P(19, 23) && f == P(16, 17), "values");
    c.expect(m < f, "ordering");
}

void succession(Check& c) {
    for (std::uint64_t n = 0; n <= 100; ++n) {
        for (std::uint64_t x = 0; x <= n; ++x) {
            const auto s = laplace_succession(x, n);
            c.expect(s.exact.value() == Rational(static_cast<std::int64_t>(x + 1), static_cast<std::int64_t>(n + 2)),
                     "(" + std::to_string(x) + "," + std::to_string(n) + ")");
        }
    }
    c.expect(laplace_succession(0, 0).exact == P(1, 2), "(0,0)");
}

void monte_carlo(Check& c) {
    const auto& tastes = witches().require_second_layer();
    const std::uint64_t trials = 100000;
    for (const char* name : {"deterministic", "medallion"}) {
        SimConfig cfg;
        cfg.seed = 42;
        cfg.trials = trials;
        cfg.strategy = named_strategy(name, tastes);
        std::string stream_a, stream_b;
        const auto a = run_simulation(cfg, [&](const DayRecord& r) { stream_a += to_json(r).dump() + "\n"; });
        const auto b = run_simulation(cfg, [&](const DayRecord& r) { stream_b += to_json(r).dump() + "\n"; });
        const auto& v = a.per_hat.at("V");
        c.expect(within_sigmas(v.days, trials, Rational(14, 21)), std::string(name) + " hat frequency");
        c.expect(within_sigmas(v.angry, v.days, anger_probability(cfg.strategy, tastes, "V").value()),
                 std::string(name) + " anger frequency " + std::to_string(v.angry) + "/" + std::to_string(v.days));
        c.expect(a.per_hat.at("N").angry == 0, std::string(name) + " black-hat anger");
        c.expect(to_json(a).dump() == to_json(b).dump() && stream_a == stream_b, std::string(name) + " reproducibility");
    }
    const auto cal = monte_carlo_posterior_check(42, witches(), 10, trials);
    c.expect(cal.calibrated(3.0), "posterior calibration");
    c.expect(to_json(cal).dump() == to_json(monte_carlo_posterior_check(42, witches(), 10, trials)).dump(),
             "calibration reproducibility");
}

void session_replay(Check& c) {
    std::ifstream in(std::string(WITCHBAYES_TEST_DATA_DIR) + "/session_transcript.jsonl");
    c.expect(static_cast<bool>(in), "transcript missing");
    SessionService svc;
    int commands = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const auto entry = nlohmann::json::parse(line);
        const auto got = svc.handle_line(entry.at("request").dump());
        c.expect(got == entry.at("response").get<std::string>(), "command " + std::to_string(commands + 1));
        ++commands;
    }
    c.expect(commands == 30, "transcript has " + std::to_string(commands) + " commands");

    SessionService fresh;
    fresh.handle({{"op", "create_session"}});
    for (const char* o : {"N", "V", "V"}) fresh.handle({{"op", "observe"}, {"session", "s1"}, {"outcome", o}});
    const auto before = fresh.handle({{"op", "state"}, {"session", "s1"}}).dump();
    for (const char* suffix : {"", "VVVV", "NNNNNNNN", "Q"}) fresh.handle({{"op", "what_if"}, {"session", "s1"}, {"suffix", suffix}});
    c.expect(fresh.handle({{"op", "state"}, {"session", "s1"}}).dump() == before, "what_if changed the session");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"posterior after NNNN is (16/17, 1/17)", four_black},
        {"posterior after ten V is (1/1025, 1024/1025)", ten_violet},
        {"P(V | ten V) = 2049/3075, renders as 0.6663...", predictive_ten_violet},
        {"balanced sequences return the prior", balanced_sequences},
        {"exchangeability over 1000 sequence pairs", exchangeability},
        {"odds-form update equals the posterior formula on 1000 binary cases", odds_identity},
        {"anger 7/49 vs 12/49 and chessboard (37, 12)", decision},
        {"taste limit 4/7, 3/7 and P(Salty | NNNN) = 83/119", taste_limit},
        {"tombola: 1/45 after dispari, 0 after pari, factor 89/44", tombola},
        {"prenatal: P(M|m) = 19/23 < P(F|f) = 16/17", prenatal},
        {"rule of succession for x <= n <= 100", succession},
        {"Monte Carlo within 3 sigma and reproducible", monte_carlo},
        {"session transcript replays byte for byte; what_if has no effect", session_replay},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        if (c.failures.empty()) {
            std::cout << "PASS  " << name << '\n';
        } else {
            ++failed;
            std::cout << "FAIL  " << name << "  (" << c.failures.size() << " problems; first: " << c.failures.front()
                      << ")\n";
        }
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed\n";
    return failed == 0 ? 0 : 1;
}
