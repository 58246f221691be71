#pragma once

// Exact probability carriers and the Bayes machinery built on them:
// normalization, Bayes(-Turing) factors, odds updates, posteriors and the
// law of total probability.

#include "witchbayes/rational.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace witchbayes {

/// A Rational constrained to [0, 1].
class Probability {
public:
    Probability() = default;
    explicit Probability(Rational value);

    static Probability parse(std::string_view text) { return Probability(Rational::parse(text)); }

    const Rational& value() const { return value_; }
    Probability complement() const { return Probability(Rational(1) - value_); }

    friend bool operator==(const Probability&, const Probability&) = default;
    friend auto operator<=>(const Probability& a, const Probability& b) { return a.value_ <=> b.value_; }

private:
    Rational value_;
};

/// Ratio for:against between two hypotheses, kept reduced.
/// (n, 0) is certainty of the first hypothesis, (0, n) of the second.
class Odds {
public:
    Odds(BigInt for_count, BigInt against_count);

    const BigInt& for_count() const { return for_; }
    const BigInt& against_count() const { return against_; }

    std::string str() const { return for_.str() + ":" + against_.str(); }

    friend bool operator==(const Odds&, const Odds&) = default;

private:
    BigInt for_;
    BigInt against_;
};

class BayesFactor {
public:
    explicit BayesFactor(Rational value);
    static BayesFactor infinite() { return BayesFactor(); }

    bool is_infinite() const { return !value_.has_value(); }
    /// Finite value; throws if infinite.
    const Rational& value() const;

    std::string str() const { return is_infinite() ? "inf" : value_->str(); }

    friend BayesFactor operator*(const BayesFactor& a, const BayesFactor& b);
    friend bool operator==(const BayesFactor&, const BayesFactor&) = default;

private:
    BayesFactor() = default;
    std::optional<Rational> value_;
};

struct Entry {
    std::string label;
    Probability p;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Labelled distribution; labels unique and probabilities summing to 1.
class Distribution {
public:
    explicit Distribution(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::vector<std::string> labels() const;

    const Probability& at(std::string_view label) const;
    bool contains(std::string_view label) const;
    std::size_t index_of(std::string_view label) const;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<Entry> entries_;
};

struct Weight {
    std::string label;
    Rational w;
};

Distribution normalize(std::span<const Weight> weights);

BayesFactor bayes_factor(const Probability& likelihood_1, const Probability& likelihood_2);

Odds update_odds(const Odds& prior, const BayesFactor& factor);

Distribution posterior(const Distribution& prior, std::span<const Probability> likelihoods);

Probability total_probability(std::span<const Probability> conditionals, const Distribution& weights);

Odds odds_from_distribution(const Distribution& d, std::string_view label_a, std::string_view label_b);

Distribution distribution_from_odds(const Odds& odds, std::string label_a, std::string label_b);

}  // namespace witchbayes
