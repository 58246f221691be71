#include "witchbayes/inference.hpp"

#include "witchbayes/error.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace witchbayes {

namespace {

void require_unique(const std::vector<std::string>& labels, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
        if (l.empty()) throw Error(ErrorKind::InvalidArgument, std::string("empty ") + what + " label");
        if (!seen.insert(l).second) throw Error(ErrorKind::InvalidArgument, std::string("duplicate ") + what + " label '" + l + "'");
    }
}

std::size_t find_label(const std::vector<std::string>& labels, std::string_view label, ErrorKind kind,
                       const char* what) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error(kind, std::string("unknown ") + what + " '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

LikelihoodTable::LikelihoodTable(std::vector<std::string> rows, std::vector<std::string> outcomes,
                                 std::vector<std::vector<Probability>> p)
    : rows_(std::move(rows)), outcomes_(std::move(outcomes)), p_(std::move(p)) {
    require_unique(rows_, "row");
    require_unique(outcomes_, "outcome");
    if (rows_.empty() || outcomes_.empty()) throw Error(ErrorKind::InvalidArgument, "empty likelihood table");
    if (p_.size() != rows_.size()) throw Error(ErrorKind::LengthMismatch, "row count mismatch");
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (p_[i].size() != outcomes_.size()) throw Error(ErrorKind::LengthMismatch, "column count mismatch in row '" + rows_[i] + "'");
        Rational sum;
        for (const auto& v : p_[i]) sum += v.value();
        if (sum != Rational(1)) throw Error(ErrorKind::InvalidArgument, "row '" + rows_[i] + "' sums to " + sum.str());
    }
}

std::size_t LikelihoodTable::row_index(std::string_view label) const {
    return find_label(rows_, label, ErrorKind::UnknownHypothesis, "row");
}

std::size_t LikelihoodTable::outcome_index(std::string_view label) const {
    return find_label(outcomes_, label, ErrorKind::UnknownOutcome, "outcome");
}

const Probability& LikelihoodTable::at(std::string_view row, std::string_view outcome) const {
    return p_[row_index(row)][outcome_index(outcome)];
}

std::vector<Probability> LikelihoodTable::column(std::size_t outcome) const {
    std::vector<Probability> out;
    out.reserve(p_.size());
    for (const auto& r : p_) out.push_back(r.at(outcome));
    return out;
}

Distribution LikelihoodTable::row_distribution(std::size_t i) const {
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < outcomes_.size(); ++j) entries.push_back({outcomes_[j], p_[i][j]});
    return Distribution(std::move(entries));
}

LikelihoodTable LikelihoodTable::select_rows(const std::vector<std::size_t>& keep) const {
    std::vector<std::string> rows;
    std::vector<std::vector<Probability>> p;
    for (auto i : keep) {
        rows.push_back(rows_.at(i));
        p.push_back(p_.at(i));
    }
    return LikelihoodTable(std::move(rows), outcomes_, std::move(p));
}

Scenario::Scenario(std::string name, Distribution prior, LikelihoodTable first_layer,
                   std::optional<LikelihoodTable> second_layer)
    : name_(std::move(name)), prior_(std::move(prior)), first_(std::move(first_layer)), second_(std::move(second_layer)) {
    if (prior_.labels() != first_.rows()) {
        throw Error(ErrorKind::LabelMismatch, "prior labels differ from first-layer hypotheses");
    }
    if (second_ && second_->rows() != first_.outcomes()) {
        throw Error(ErrorKind::LabelMismatch, "second-layer rows differ from first-layer outcomes");
    }
}

const LikelihoodTable& Scenario::require_second_layer() const {
    if (!second_) throw Error(ErrorKind::NoSecondLayer, "scenario '" + name_ + "' has no second layer");
    return *second_;
}

Scenario Scenario::with_prior(Distribution prior) const { return Scenario(name_, std::move(prior), first_, second_); }

void Scenario::validate(const EvidenceSequence& seq) const {
    for (const auto& o : seq) first_.outcome_index(o);
}

std::string witch_hypothesis_label(int violet_count) { return "V" + std::to_string(violet_count); }

Scenario build_witch_scenario(const WitchConfig& cfg) {
    if (cfg.total_witches <= 0) throw Error(ErrorKind::InvalidArgument, "total_witches must be positive");
    if (cfg.candidate_violet_counts.empty()) throw Error(ErrorKind::EmptyCandidates, "no candidate violet counts");
    std::set<int> distinct;
    for (int v : cfg.candidate_violet_counts) {
        if (v < 0 || v > cfg.total_witches) {
            throw Error(ErrorKind::InvalidArgument, "violet count " + std::to_string(v) + " outside [0, total]");
        }
        if (!distinct.insert(v).second) throw Error(ErrorKind::InvalidArgument, "duplicate violet count " + std::to_string(v));
    }
    const Probability sweet_given_violet(cfg.violet_sweet_fraction);
    const Probability salty_given_black(cfg.black_salty_fraction);

    std::vector<Weight> prior;
    std::vector<std::string> hyps;
    std::vector<std::vector<Probability>> hat_rows;
    for (int v : cfg.candidate_violet_counts) {
        const Probability p_violet(Rational(v, cfg.total_witches));
        hyps.push_back(witch_hypothesis_label(v));
        prior.push_back({hyps.back(), Rational(1)});
        hat_rows.push_back({p_violet.complement(), p_violet});
    }
    LikelihoodTable hats(hyps, {labels::black, labels::violet}, std::move(hat_rows));
    LikelihoodTable tastes({labels::black, labels::violet}, {labels::sweet, labels::salty},
                           {{salty_given_black.complement(), salty_given_black},
                            {sweet_given_violet, sweet_given_violet.complement()}});
    return Scenario("witches", normalize(prior), std::move(hats), std::move(tastes));
}

Scenario filter_by_observed_outcomes(const Scenario& scenario, const std::set<std::string>& seen) {
    const auto& table = scenario.first_layer();
    std::vector<std::size_t> seen_idx;
    for (const auto& s : seen) seen_idx.push_back(table.outcome_index(s));

    std::vector<std::size_t> keep;
    std::vector<Weight> prior;
    for (std::size_t i = 0; i < table.rows().size(); ++i) {
        bool excluded = std::any_of(seen_idx.begin(), seen_idx.end(),
                                    [&](std::size_t j) { return table.at(i, j).value().is_zero(); });
        if (excluded) continue;
        keep.push_back(i);
        prior.push_back({table.rows()[i], scenario.prior().entries()[i].p.value()});
    }
    if (keep.empty()) throw Error(ErrorKind::NothingLeft, "every hypothesis excluded by the observed outcomes");
    if (keep.size() == table.rows().size()) return scenario;
    try {
        return Scenario(scenario.name(), normalize(prior), table.select_rows(keep), scenario.second_layer());
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::AllZeroWeights) {
            throw Error(ErrorKind::NothingLeft, "surviving hypotheses all have prior zero");
        }
        throw;
    }
}

Scenario filter_by_observed_colors(const Scenario& scenario, bool seen_black, bool seen_violet) {
    std::set<std::string> seen;
    if (seen_black) seen.insert(labels::black);
    if (seen_violet) seen.insert(labels::violet);
    return filter_by_observed_outcomes(scenario, seen);
}

namespace {

std::vector<std::size_t> outcome_indices(const Scenario& scenario, const EvidenceSequence& seq) {
    std::vector<std::size_t> idx;
    idx.reserve(seq.size());
    for (const auto& o : seq) idx.push_back(scenario.first_layer().outcome_index(o));
    return idx;
}

Probability row_likelihood(const LikelihoodTable& table, std::size_t row, const std::vector<std::size_t>& idx) {
    Rational acc(1);
    for (auto j : idx) {
        acc *= table.at(row, j).value();
        if (acc.is_zero()) break;
    }
    return Probability(std::move(acc));
}

}  // namespace

Probability sequence_likelihood(const Scenario& scenario, std::string_view hypothesis, const EvidenceSequence& seq) {
    const auto row = scenario.first_layer().row_index(hypothesis);
    return row_likelihood(scenario.first_layer(), row, outcome_indices(scenario, seq));
}

Distribution sequential_posterior(const Scenario& scenario, const EvidenceSequence& seq) {
    const auto idx = outcome_indices(scenario, seq);
    std::vector<Probability> likelihoods;
    for (std::size_t i = 0; i < scenario.first_layer().rows().size(); ++i) {
        likelihoods.push_back(row_likelihood(scenario.first_layer(), i, idx));
    }
    return posterior(scenario.prior(), likelihoods);
}

Distribution predictive_distribution(const Scenario& scenario, const EvidenceSequence& seq) {
    const auto post = sequential_posterior(scenario, seq);
    const auto& table = scenario.first_layer();
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < table.outcomes().size(); ++j) {
        entries.push_back({table.outcomes()[j], total_probability(table.column(j), post)});
    }
    return Distribution(std::move(entries));
}

Probability predictive(const Scenario& scenario, const EvidenceSequence& seq, std::string_view outcome) {
    scenario.first_layer().outcome_index(outcome);
    return predictive_distribution(scenario, seq).at(outcome);
}

Distribution second_layer_predictive_distribution(const Scenario& scenario, const EvidenceSequence& seq) {
    const auto& second = scenario.require_second_layer();
    const auto hats = predictive_distribution(scenario, seq);
    std::vector<Entry> entries;
    for (std::size_t k = 0; k < second.outcomes().size(); ++k) {
        entries.push_back({second.outcomes()[k], total_probability(second.column(k), hats)});
    }
    return Distribution(std::move(entries));
}

Probability second_layer_predictive(const Scenario& scenario, const EvidenceSequence& seq,
                                    std::string_view second_outcome) {
    scenario.require_second_layer().outcome_index(second_outcome);
    return second_layer_predictive_distribution(scenario, seq).at(second_outcome);
}

Distribution infer_hat_from_taste(const Scenario& scenario, const Distribution& prior_over_hats,
                                  std::string_view liked) {
    const auto& second = scenario.require_second_layer();
    if (prior_over_hats.labels() != second.rows()) {
        throw Error(ErrorKind::LabelMismatch, "hat prior labels differ from second-layer rows");
    }
    return posterior(prior_over_hats, second.column(second.outcome_index(liked)));
}

Succession laplace_succession(std::uint64_t successes, std::uint64_t trials) {
    if (successes > trials) throw Error(ErrorKind::XExceedsN, "successes exceed trials");
    Succession out{Probability(Rational(BigInt(successes) + 1, BigInt(trials) + 2)), std::nullopt};
    if (trials > 0) out.approximate = Probability(Rational(BigInt(successes), BigInt(trials)));
    return out;
}

std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> out;
    out.push_back(build_witch_scenario(WitchConfig{}));

    // one number drawn from the 90 of a tombola bag; is it "37"?
    {
        const Distribution prior({{"37", Probability(Rational(1, 90))}, {"other", Probability(Rational(89, 90))}});
        LikelihoodTable parity({"37", "other"}, {"pari", "dispari"},
                               {{Probability(Rational(0)), Probability(Rational(1))},
                                {Probability(Rational(45, 89)), Probability(Rational(44, 89))}});
        out.emplace_back("tombola", prior, std::move(parity));
    }
    {
        const Distribution prior({{"M", Probability(Rational(1, 2))}, {"F", Probability(Rational(1, 2))}});
        LikelihoodTable test({"M", "F"}, {"m", "f"},
                             {{Probability::parse("0.95"), Probability::parse("0.05")},
                              {Probability::parse("0.20"), Probability::parse("0.80")}});
        out.emplace_back("prenatal", prior, std::move(test));
    }
    return out;
}

Scenario builtin_scenario(std::string_view name) {
    for (auto& s : builtin_scenarios()) {
        if (s.name() == name) return s;
    }
    throw Error(ErrorKind::UnknownLabel, "unknown scenario '" + std::string(name) + "'");
}

EvidenceSequence parse_sequence(const Scenario& scenario, std::string_view text) {
    EvidenceSequence seq;
    const bool delimited = text.find_first_of(", \t") != std::string_view::npos;
    if (delimited) {
        std::string token;
        for (char c : text) {
            if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
                if (!token.empty()) seq.push_back(std::exchange(token, {}));
            } else {
                token += c;
            }
        }
        if (!token.empty()) seq.push_back(token);
    } else if (!text.empty()) {
        const auto& outcomes = scenario.first_layer().outcomes();
        const bool single_char = std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.size() == 1; });
        if (single_char) {
            for (char c : text) seq.emplace_back(1, c);
        } else {
            seq.emplace_back(text);
        }
    }
    scenario.validate(seq);
    return seq;
}

namespace {

nlohmann::json table_to_json(const LikelihoodTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& p : t.row(i)) r.push_back(p.value().str());
        rows.push_back(std::move(r));
    }
    return {{"rows", t.rows()}, {"outcomes", t.outcomes()}, {"p", std::move(rows)}};
}

LikelihoodTable table_from_json(const nlohmann::json& j) {
    std::vector<std::vector<Probability>> p;
    for (const auto& r : j.at("p")) {
        std::vector<Probability> row;
        for (const auto& v : r) row.push_back(Probability::parse(v.get<std::string>()));
        p.push_back(std::move(row));
    }
    return LikelihoodTable(j.at("rows").get<std::vector<std::string>>(),
                           j.at("outcomes").get<std::vector<std::string>>(), std::move(p));
}

}  // namespace

nlohmann::json scenario_to_json(const Scenario& scenario) {
    nlohmann::json prior = nlohmann::json::array();
    for (const auto& e : scenario.prior().entries()) prior.push_back(e.p.value().str());
    nlohmann::json doc = {
        {"format", 1},
        {"name", scenario.name()},
        {"hypotheses", scenario.prior().labels()},
        {"prior", std::move(prior)},
        {"first_layer", table_to_json(scenario.first_layer())},
        {"second_layer", nullptr},
    };
    if (scenario.second_layer()) doc["second_layer"] = table_to_json(*scenario.second_layer());
    return doc;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<int>() != 1) throw Error(ErrorKind::ParseError, "unsupported scenario format");
        const auto hyps = doc.at("hypotheses").get<std::vector<std::string>>();
        const auto& prior_json = doc.at("prior");
        if (prior_json.size() != hyps.size()) throw Error(ErrorKind::LengthMismatch, "prior length differs from hypotheses");
        std::vector<Entry> prior;
        for (std::size_t i = 0; i < hyps.size(); ++i) {
            prior.push_back({hyps[i], Probability::parse(prior_json[i].get<std::string>())});
        }
        std::optional<LikelihoodTable> second;
        if (doc.contains("second_layer") && !doc["second_layer"].is_null()) second = table_from_json(doc["second_layer"]);
        return Scenario(doc.value("name", std::string("custom")), Distribution(std::move(prior)),
                        table_from_json(doc.at("first_layer")), std::move(second));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("scenario json: ") + e.what());
    }
}

}  // namespace witchbayes
