#pragma once

// Food-serving strategies under 0-1 "anger" loss: a witch gets angry when
// the food served differs from the taste she prefers.

#include "witchbayes/inference.hpp"

#include <map>
#include <string>
#include <vector>

namespace witchbayes {

/// Per hat color, a distribution over foods. Deterministic strategies are
/// point masses.
class Strategy {
public:
    Strategy() = default;
    /// Food entries are kept sorted by label with zero entries dropped, so
    /// equal strategies compare equal regardless of construction order.
    explicit Strategy(std::map<std::string, Distribution> per_hat);

    static Strategy point_masses(const std::map<std::string, std::string>& food_for_hat);

    const Distribution& for_hat(std::string_view hat) const;
    bool covers(std::string_view hat) const { return per_hat_.find(std::string(hat)) != per_hat_.end(); }
    bool is_deterministic() const;
    const std::map<std::string, Distribution>& per_hat() const { return per_hat_; }

    friend bool operator==(const Strategy&, const Strategy&) = default;

private:
    std::map<std::string, Distribution> per_hat_;
};

/// Always serve the taste the hat group prefers most often.
Strategy deterministic_strategy(const LikelihoodTable& taste_table);
/// Draw the food from the same fractions as the tastes (the medallion bag).
Strategy medallion_strategy(const LikelihoodTable& taste_table);
/// Strategy fixture by name: "deterministic"/"optimal", "medallion".
Strategy named_strategy(std::string_view name, const LikelihoodTable& taste_table);

Probability anger_probability(const Strategy& strategy, const LikelihoodTable& taste_table, std::string_view hat);

struct ChessboardCount {
    int satisfied = 0;
    int angry = 0;
    friend bool operator==(const ChessboardCount&, const ChessboardCount&) = default;
};

/// Counts every (witch column, medallion row) cell, one cell per equally
/// likely joint draw. A cell is angry when the medallion food differs from
/// the column witch's taste.
ChessboardCount chessboard_oracle(const std::vector<std::string>& witch_tastes,
                                  const std::vector<std::string>& medallions);
/// The 7x7 violet-hat board: columns A-F sweet witches, G the salty one;
/// rows 1-6 sweet medallions, row 7 salty.
ChessboardCount chessboard_oracle();

/// Per hat the point mass on the most liked food; ties go to the food
/// listed first in the table.
Strategy optimal_strategy(const LikelihoodTable& taste_table);

Probability marginal_anger(const Strategy& strategy, const Scenario& scenario, const Distribution& posterior);

struct AngerReport {
    std::map<std::string, Probability> per_hat;
    Probability marginal;  // given the composition hypothesis
};

AngerReport anger_report(const Strategy& strategy, const Scenario& scenario, std::string_view hypothesis);

nlohmann::json strategy_to_json(const Strategy& strategy);
Strategy strategy_from_json(const nlohmann::json& doc);

}  // namespace witchbayes
