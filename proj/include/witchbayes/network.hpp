#pragma once

// Two-layer Bayesian-network diagrams for a Scenario, exported as DOT or
// versioned JSON. Edge thickness follows a five-bucket class of p.

#include "witchbayes/inference.hpp"

#include <optional>
#include <string>
#include <vector>

namespace witchbayes {

enum class Layer { Hypothesis, Outcome, SecondOutcome };

std::string_view to_string(Layer layer);

struct NetNode {
    std::string id;
    std::string label;
    Layer layer = Layer::Hypothesis;
    std::optional<Probability> annotation;
    bool observed = false;

    friend bool operator==(const NetNode&, const NetNode&) = default;
};

struct NetEdge {
    std::string from;
    std::string to;
    Probability p;
    int weight_class = 1;

    friend bool operator==(const NetEdge&, const NetEdge&) = default;
};

struct NetDiagram {
    std::string name;
    std::vector<NetNode> nodes;
    std::vector<NetEdge> edges;

    friend bool operator==(const NetDiagram&, const NetDiagram&) = default;
};

/// 1: p < 0.1, 2: < 0.3, 3: < 0.5, 4: < 0.8, 5: up to 1.
int weight_class(const Probability& p);

/// Hypothesis nodes carry the posterior when given; outcome and
/// second-outcome nodes then carry the matching predictive probabilities.
/// `evidence` marks the last observed first-layer outcome.
NetDiagram diagram_from_scenario(const Scenario& scenario, const std::optional<Distribution>& posterior = std::nullopt,
                                 const std::optional<std::string>& evidence = std::nullopt);

std::string to_dot(const NetDiagram& diagram);
std::string to_json(const NetDiagram& diagram);
nlohmann::json diagram_to_json(const NetDiagram& diagram);
NetDiagram diagram_from_json(const nlohmann::json& doc);

}  // namespace witchbayes
