#include "witchbayes/decision.hpp"

#include "witchbayes/error.hpp"

#include <algorithm>

namespace witchbayes {

Strategy::Strategy(std::map<std::string, Distribution> per_hat) {
    for (auto& [hat, foods] : per_hat) {
        std::vector<Entry> entries;
        for (const auto& e : foods.entries()) {
            if (!e.p.value().is_zero()) entries.push_back(e);
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.label < b.label; });
        per_hat_.emplace(hat, Distribution(std::move(entries)));
    }
}

Strategy Strategy::point_masses(const std::map<std::string, std::string>& food_for_hat) {
    std::map<std::string, Distribution> per_hat;
    for (const auto& [hat, food] : food_for_hat) {
        per_hat.emplace(hat, Distribution({{food, Probability(Rational(1))}}));
    }
    return Strategy(std::move(per_hat));
}

const Distribution& Strategy::for_hat(std::string_view hat) const {
    auto it = per_hat_.find(std::string(hat));
    if (it == per_hat_.end()) throw Error(ErrorKind::UnknownHatColor, "strategy does not cover hat '" + std::string(hat) + "'");
    return it->second;
}

bool Strategy::is_deterministic() const {
    return std::all_of(per_hat_.begin(), per_hat_.end(), [](const auto& kv) {
        const auto& entries = kv.second.entries();
        return std::count_if(entries.begin(), entries.end(), [](const Entry& e) { return !e.p.value().is_zero(); }) == 1;
    });
}

Strategy optimal_strategy(const LikelihoodTable& taste_table) {
    std::map<std::string, std::string> choice;
    for (std::size_t i = 0; i < taste_table.rows().size(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < taste_table.outcomes().size(); ++j) {
            if (taste_table.at(i, j) > taste_table.at(i, best)) best = j;
        }
        choice[taste_table.rows()[i]] = taste_table.outcomes()[best];
    }
    return Strategy::point_masses(choice);
}

Strategy deterministic_strategy(const LikelihoodTable& taste_table) { return optimal_strategy(taste_table); }

Strategy medallion_strategy(const LikelihoodTable& taste_table) {
    std::map<std::string, Distribution> per_hat;
    for (std::size_t i = 0; i < taste_table.rows().size(); ++i) {
        per_hat.emplace(taste_table.rows()[i], taste_table.row_distribution(i));
    }
    return Strategy(std::move(per_hat));
}

Strategy named_strategy(std::string_view name, const LikelihoodTable& taste_table) {
    if (name == "deterministic" || name == "optimal") return deterministic_strategy(taste_table);
    if (name == "medallion") return medallion_strategy(taste_table);
    throw Error(ErrorKind::UnknownLabel, "unknown strategy '" + std::string(name) + "'");
}

Probability anger_probability(const Strategy& strategy, const LikelihoodTable& taste_table, std::string_view hat) {
    const auto& foods = strategy.for_hat(hat);
    std::size_t row = 0;
    try {
        row = taste_table.row_index(hat);
    } catch (const Error&) {
        throw Error(ErrorKind::UnknownHatColor, "taste table has no hat '" + std::string(hat) + "'");
    }
    Rational anger;
    for (std::size_t t = 0; t < taste_table.outcomes().size(); ++t) {
        for (const auto& food : foods.entries()) {
            if (food.label != taste_table.outcomes()[t]) anger += taste_table.at(row, t).value() * food.p.value();
        }
    }
    return Probability(std::move(anger));
}

ChessboardCount chessboard_oracle(const std::vector<std::string>& witch_tastes,
                                  const std::vector<std::string>& medallions) {
    ChessboardCount count;
    for (const auto& medallion : medallions) {
        for (const auto& taste : witch_tastes) {
            if (medallion == taste) {
                ++count.satisfied;
            } else {
                ++count.angry;
            }
        }
    }
    return count;
}

ChessboardCount chessboard_oracle() {
    std::vector<std::string> columns(6, labels::sweet);
    columns.emplace_back(labels::salty);
    std::vector<std::string> rows(6, labels::sweet);
    rows.emplace_back(labels::salty);
    return chessboard_oracle(columns, rows);
}

Probability marginal_anger(const Strategy& strategy, const Scenario& scenario, const Distribution& posterior) {
    const auto& tastes = scenario.require_second_layer();
    const auto& hats = scenario.first_layer();
    if (posterior.labels() != hats.rows()) throw Error(ErrorKind::LabelMismatch, "posterior labels differ from hypotheses");

    std::vector<Rational> per_hat;
    for (const auto& hat : hats.outcomes()) per_hat.push_back(anger_probability(strategy, tastes, hat).value());

    Rational total;
    for (std::size_t h = 0; h < hats.rows().size(); ++h) {
        const auto& w = posterior.entries()[h].p.value();
        if (w.is_zero()) continue;
        for (std::size_t c = 0; c < hats.outcomes().size(); ++c) {
            total += w * hats.at(h, c).value() * per_hat[c];
        }
    }
    return Probability(std::move(total));
}

AngerReport anger_report(const Strategy& strategy, const Scenario& scenario, std::string_view hypothesis) {
    const auto& tastes = scenario.require_second_layer();
    std::vector<Entry> point;
    for (const auto& h : scenario.first_layer().rows()) {
        point.push_back({h, Probability(Rational(h == hypothesis ? 1 : 0))});
    }
    scenario.first_layer().row_index(hypothesis);
    AngerReport report{{}, marginal_anger(strategy, scenario, Distribution(std::move(point)))};
    for (const auto& hat : scenario.first_layer().outcomes()) {
        report.per_hat.emplace(hat, anger_probability(strategy, tastes, hat));
    }
    return report;
}

nlohmann::json strategy_to_json(const Strategy& strategy) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [hat, foods] : strategy.per_hat()) {
        nlohmann::json f = nlohmann::json::object();
        for (const auto& e : foods.entries()) {
            if (!e.p.value().is_zero()) f[e.label] = e.p.value().str();
        }
        doc[hat] = std::move(f);
    }
    return doc;
}

Strategy strategy_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::ParseError, "strategy json must be an object");
    std::map<std::string, Distribution> per_hat;
    for (const auto& [hat, foods] : doc.items()) {
        if (!foods.is_object()) throw Error(ErrorKind::ParseError, "strategy entry for '" + hat + "' must be an object");
        std::vector<Entry> entries;
        for (const auto& [food, p] : foods.items()) {
            if (!p.is_string()) throw Error(ErrorKind::ParseError, "strategy probabilities must be \"num/den\" strings");
            entries.push_back({food, Probability::parse(p.get<std::string>())});
        }
        per_hat.emplace(hat, Distribution(std::move(entries)));
    }
    return Strategy(std::move(per_hat));
}

}  // namespace witchbayes
