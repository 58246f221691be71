#include "witchbayes/probability.hpp"

#include "witchbayes/error.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <algorithm>
#include <unordered_set>

namespace witchbayes {

Probability::Probability(Rational value) : value_(std::move(value)) {
    if (value_ < Rational(0) || value_ > Rational(1)) {
        throw Error(ErrorKind::InvalidArgument, "probability out of [0,1]: " + value_.str());
    }
}

Odds::Odds(BigInt for_count, BigInt against_count)
    : for_(std::move(for_count)), against_(std::move(against_count)) {
    if (for_ < 0 || against_ < 0) throw Error(ErrorKind::InvalidArgument, "negative odds");
    if (for_ == 0 && against_ == 0) throw Error(ErrorKind::InvalidArgument, "odds 0:0");
    if (for_ == 0) {
        against_ = 1;
    } else if (against_ == 0) {
        for_ = 1;
    } else {
        BigInt g = boost::integer::gcd(for_, against_);
        for_ /= g;
        against_ /= g;
    }
}

BayesFactor::BayesFactor(Rational value) : value_(std::move(value)) {
    if (value_->is_negative()) throw Error(ErrorKind::InvalidArgument, "negative Bayes factor");
}

const Rational& BayesFactor::value() const {
    if (!value_) throw Error(ErrorKind::InvalidArgument, "Bayes factor is infinite");
    return *value_;
}

BayesFactor operator*(const BayesFactor& a, const BayesFactor& b) {
    if (!a.is_infinite() && !b.is_infinite()) return BayesFactor(a.value() * b.value());
    const bool zero = (!a.is_infinite() && a.value().is_zero()) || (!b.is_infinite() && b.value().is_zero());
    if (zero) throw Error(ErrorKind::Indeterminate, "0 x inf Bayes factor product");
    return BayesFactor::infinite();
}

Distribution::Distribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw Error(ErrorKind::InvalidArgument, "empty distribution");
    std::unordered_set<std::string> seen;
    Rational sum;
    for (const auto& e : entries_) {
        if (!seen.insert(e.label).second) throw Error(ErrorKind::InvalidArgument, "duplicate label '" + e.label + "'");
        sum += e.p.value();
    }
    if (sum != Rational(1)) throw Error(ErrorKind::InvalidArgument, "distribution sums to " + sum.str());
}

std::vector<std::string> Distribution::labels() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.label);
    return out;
}

std::size_t Distribution::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].label == label) return i;
    }
    throw Error(ErrorKind::UnknownLabel, "unknown label '" + std::string(label) + "'");
}

bool Distribution::contains(std::string_view label) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.label == label; });
}

const Probability& Distribution::at(std::string_view label) const { return entries_[index_of(label)].p; }

Distribution normalize(std::span<const Weight> weights) {
    Rational total;
    for (const auto& w : weights) {
        if (w.w.is_negative()) throw Error(ErrorKind::InvalidArgument, "negative weight for '" + w.label + "'");
        total += w.w;
    }
    if (total.is_zero()) throw Error(ErrorKind::AllZeroWeights, "all weights are zero");
    std::vector<Entry> entries;
    entries.reserve(weights.size());
    for (const auto& w : weights) entries.push_back({w.label, Probability(w.w / total)});
    return Distribution(std::move(entries));
}

BayesFactor bayes_factor(const Probability& likelihood_1, const Probability& likelihood_2) {
    if (likelihood_2.value().is_zero()) {
        if (likelihood_1.value().is_zero()) {
            throw Error(ErrorKind::BothZero, "evidence impossible under both hypotheses");
        }
        return BayesFactor::infinite();
    }
    return BayesFactor(likelihood_1.value() / likelihood_2.value());
}

Odds update_odds(const Odds& prior, const BayesFactor& factor) {
    if (factor.is_infinite()) {
        if (prior.for_count() == 0) throw Error(ErrorKind::Indeterminate, "0 x inf: prior excludes the favoured hypothesis");
        return Odds(1, 0);
    }
    const Rational& f = factor.value();
    if (f.is_zero() && prior.against_count() == 0) {
        throw Error(ErrorKind::Indeterminate, "inf x 0: prior certain of the excluded hypothesis");
    }
    return Odds(prior.for_count() * f.num(), prior.against_count() * f.den());
}

Distribution posterior(const Distribution& prior, std::span<const Probability> likelihoods) {
    if (likelihoods.size() != prior.size()) {
        throw Error(ErrorKind::LengthMismatch, "likelihoods not aligned with prior");
    }
    std::vector<Weight> joint;
    joint.reserve(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) {
        const auto& e = prior.entries()[i];
        joint.push_back({e.label, e.p.value() * likelihoods[i].value()});
    }
    try {
        return normalize(joint);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::AllZeroWeights) {
            throw Error(ErrorKind::ImpossibleEvidence, "evidence has probability zero under every hypothesis");
        }
        throw;
    }
}

Probability total_probability(std::span<const Probability> conditionals, const Distribution& weights) {
    if (conditionals.size() != weights.size()) {
        throw Error(ErrorKind::LengthMismatch, "conditionals not aligned with weights");
    }
    Rational sum;
    for (std::size_t i = 0; i < conditionals.size(); ++i) {
        sum += conditionals[i].value() * weights.entries()[i].p.value();
    }
    return Probability(std::move(sum));
}

Odds odds_from_distribution(const Distribution& d, std::string_view label_a, std::string_view label_b) {
    const Rational& a = d.at(label_a).value();
    const Rational& b = d.at(label_b).value();
    if (a.is_zero() && b.is_zero()) throw Error(ErrorKind::BothZero, "both labels have probability zero");
    return Odds(a.num() * b.den(), b.num() * a.den());
}

Distribution distribution_from_odds(const Odds& odds, std::string label_a, std::string label_b) {
    if (label_a == label_b) throw Error(ErrorKind::InvalidArgument, "labels must differ");
    const BigInt total = odds.for_count() + odds.against_count();
    return Distribution({{std::move(label_a), Probability(Rational(odds.for_count(), total))},
                         {std::move(label_b), Probability(Rational(odds.against_count(), total))}});
}

}  // namespace witchbayes
