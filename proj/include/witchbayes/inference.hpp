#pragma once

// Two-layer discrete scenarios (hypothesis -> observable -> second
// observable), sequence inference and predictive distributions.

#include "witchbayes/probability.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace witchbayes {

/// Dense conditional table P(outcome | row). Rows sum to exactly 1.
class LikelihoodTable {
public:
    LikelihoodTable(std::vector<std::string> rows, std::vector<std::string> outcomes,
                    std::vector<std::vector<Probability>> p);

    const std::vector<std::string>& rows() const { return rows_; }
    const std::vector<std::string>& outcomes() const { return outcomes_; }

    std::size_t row_index(std::string_view label) const;
    std::size_t outcome_index(std::string_view label) const;

    const Probability& at(std::size_t row, std::size_t outcome) const { return p_[row][outcome]; }
    const Probability& at(std::string_view row, std::string_view outcome) const;

    const std::vector<Probability>& row(std::size_t i) const { return p_[i]; }
    std::vector<Probability> column(std::size_t outcome) const;

    /// Row as a distribution over outcomes.
    Distribution row_distribution(std::size_t i) const;

    LikelihoodTable select_rows(const std::vector<std::size_t>& keep) const;

    friend bool operator==(const LikelihoodTable&, const LikelihoodTable&) = default;

private:
    std::vector<std::string> rows_;
    std::vector<std::string> outcomes_;
    std::vector<std::vector<Probability>> p_;
};

using EvidenceSequence = std::vector<std::string>;

class Scenario {
public:
    Scenario(std::string name, Distribution prior, LikelihoodTable first_layer,
             std::optional<LikelihoodTable> second_layer = std::nullopt);

    const std::string& name() const { return name_; }
    const Distribution& prior() const { return prior_; }
    const LikelihoodTable& first_layer() const { return first_; }
    const std::optional<LikelihoodTable>& second_layer() const { return second_; }
    bool has_second_layer() const { return second_.has_value(); }

    /// Second layer or NoSecondLayer.
    const LikelihoodTable& require_second_layer() const;

    Scenario with_prior(Distribution prior) const;

    /// Throws UnknownOutcome for labels outside the first-layer outcomes.
    void validate(const EvidenceSequence& seq) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;

private:
    std::string name_;
    Distribution prior_;
    LikelihoodTable first_;
    std::optional<LikelihoodTable> second_;
};

struct WitchConfig {
    int total_witches = 21;
    std::vector<int> candidate_violet_counts = {7, 14};
    Rational violet_sweet_fraction = Rational(6, 7);
    Rational black_salty_fraction = Rational(1);
};

namespace labels {
inline constexpr const char* black = "N";
inline constexpr const char* violet = "V";
inline constexpr const char* sweet = "Sweet";
inline constexpr const char* salty = "Salty";
}  // namespace labels

/// Hypothesis label for a violet count, e.g. "V7".
std::string witch_hypothesis_label(int violet_count);

Scenario build_witch_scenario(const WitchConfig& cfg);

/// Drops hypotheses giving probability 0 to an outcome already seen.
Scenario filter_by_observed_outcomes(const Scenario& scenario, const std::set<std::string>& seen);
Scenario filter_by_observed_colors(const Scenario& scenario, bool seen_black, bool seen_violet);

Probability sequence_likelihood(const Scenario& scenario, std::string_view hypothesis, const EvidenceSequence& seq);

Distribution sequential_posterior(const Scenario& scenario, const EvidenceSequence& seq);

/// Predictive distribution of the next first-layer outcome.
Distribution predictive_distribution(const Scenario& scenario, const EvidenceSequence& seq);
Probability predictive(const Scenario& scenario, const EvidenceSequence& seq, std::string_view outcome);

Distribution second_layer_predictive_distribution(const Scenario& scenario, const EvidenceSequence& seq);
Probability second_layer_predictive(const Scenario& scenario, const EvidenceSequence& seq,
                                    std::string_view second_outcome);

/// Posterior over first-layer outcomes (hats) after learning only the
/// second-layer outcome (what the witch liked).
Distribution infer_hat_from_taste(const Scenario& scenario, const Distribution& prior_over_hats,
                                  std::string_view liked);

struct Succession {
    Probability exact;                      // (x+1)/(n+2)
    std::optional<Probability> approximate; // x/n, only when n > 0
};

Succession laplace_succession(std::uint64_t successes, std::uint64_t trials);

/// "witches", "tombola", "prenatal" in that order.
std::vector<Scenario> builtin_scenarios();
/// Throws UnknownLabel for an unknown name.
Scenario builtin_scenario(std::string_view name);

/// Accepts "NNVN", "N,N,V,N" or whitespace-separated labels.
EvidenceSequence parse_sequence(const Scenario& scenario, std::string_view text);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

}  // namespace witchbayes
