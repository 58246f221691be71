#include "witchbayes/network.hpp"

#include "witchbayes/error.hpp"

#include <sstream>

namespace witchbayes {

std::string_view to_string(Layer layer) {
    switch (layer) {
        case Layer::Hypothesis: return "hypothesis";
        case Layer::Outcome: return "outcome";
        case Layer::SecondOutcome: return "second_outcome";
    }
    return "hypothesis";
}

namespace {

Layer layer_from_string(std::string_view s) {
    if (s == "hypothesis") return Layer::Hypothesis;
    if (s == "outcome") return Layer::Outcome;
    if (s == "second_outcome") return Layer::SecondOutcome;
    throw Error(ErrorKind::ParseError, "unknown layer '" + std::string(s) + "'");
}

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

int weight_class(const Probability& p) {
    const Rational& v = p.value();
    if (v < Rational(1, 10)) return 1;
    if (v < Rational(3, 10)) return 2;
    if (v < Rational(1, 2)) return 3;
    if (v < Rational(4, 5)) return 4;
    return 5;
}

NetDiagram diagram_from_scenario(const Scenario& scenario, const std::optional<Distribution>& posterior,
                                 const std::optional<std::string>& evidence) {
    const auto& first = scenario.first_layer();
    if (posterior && posterior->labels() != first.rows()) {
        throw Error(ErrorKind::LabelMismatch, "posterior labels differ from scenario hypotheses");
    }
    if (evidence) {
        try {
            first.outcome_index(*evidence);
        } catch (const Error&) {
            throw Error(ErrorKind::LabelMismatch, "evidence '" + *evidence + "' is not a first-layer outcome");
        }
    }

    NetDiagram d;
    d.name = scenario.name();
    std::optional<Distribution> hats;
    for (std::size_t i = 0; i < first.rows().size(); ++i) {
        NetNode n{"h" + std::to_string(i), first.rows()[i], Layer::Hypothesis, std::nullopt, false};
        if (posterior) n.annotation = posterior->entries()[i].p;
        d.nodes.push_back(std::move(n));
    }
    if (posterior) {
        std::vector<Entry> entries;
        for (std::size_t j = 0; j < first.outcomes().size(); ++j) {
            entries.push_back({first.outcomes()[j], total_probability(first.column(j), *posterior)});
        }
        hats = Distribution(std::move(entries));
    }
    for (std::size_t j = 0; j < first.outcomes().size(); ++j) {
        NetNode n{"o" + std::to_string(j), first.outcomes()[j], Layer::Outcome, std::nullopt,
                  evidence && *evidence == first.outcomes()[j]};
        if (hats) n.annotation = hats->entries()[j].p;
        d.nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < first.rows().size(); ++i) {
        for (std::size_t j = 0; j < first.outcomes().size(); ++j) {
            const auto& p = first.at(i, j);
            d.edges.push_back({"h" + std::to_string(i), "o" + std::to_string(j), p, weight_class(p)});
        }
    }
    if (const auto& second = scenario.second_layer()) {
        for (std::size_t k = 0; k < second->outcomes().size(); ++k) {
            NetNode n{"s" + std::to_string(k), second->outcomes()[k], Layer::SecondOutcome, std::nullopt, false};
            if (hats) n.annotation = total_probability(second->column(k), *hats);
            d.nodes.push_back(std::move(n));
        }
        for (std::size_t j = 0; j < second->rows().size(); ++j) {
            for (std::size_t k = 0; k < second->outcomes().size(); ++k) {
                const auto& p = second->at(j, k);
                d.edges.push_back({"o" + std::to_string(j), "s" + std::to_string(k), p, weight_class(p)});
            }
        }
    }
    return d;
}

std::string to_dot(const NetDiagram& diagram) {
    std::ostringstream os;
    os << "digraph \"" << dot_escape(diagram.name) << "\" {\n";
    os << "  rankdir=TB;\n";
    os << "  node [shape=ellipse, fontname=\"Helvetica\"];\n";
    for (const auto& n : diagram.nodes) {
        std::string label = dot_escape(n.label);
        if (n.observed) label += " √";
        if (n.annotation) label += "\\n" + n.annotation->value().str();
        os << "  " << n.id << " [label=\"" << label << "\"";
        if (n.layer == Layer::Hypothesis) os << ", shape=box";
        if (n.observed) os << ", peripheries=2";
        os << "];\n";
    }
    for (const auto& e : diagram.edges) {
        os << "  " << e.from << " -> " << e.to << " [label=\"" << e.p.value().str() << "\", penwidth="
           << e.weight_class;
        if (e.weight_class == 1) os << ", style=dashed";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

nlohmann::json diagram_to_json(const NetDiagram& diagram) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : diagram.nodes) {
        nodes.push_back({{"id", n.id},
                         {"label", n.label},
                         {"layer", to_string(n.layer)},
                         {"annotation", n.annotation ? nlohmann::json(n.annotation->value().str()) : nlohmann::json()},
                         {"observed", n.observed}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : diagram.edges) {
        edges.push_back({{"from", e.from}, {"to", e.to}, {"p", e.p.value().str()}, {"weight_class", e.weight_class}});
    }
    return {{"format", 1}, {"kind", "net_diagram"}, {"name", diagram.name}, {"nodes", std::move(nodes)},
            {"edges", std::move(edges)}};
}

std::string to_json(const NetDiagram& diagram) { return diagram_to_json(diagram).dump(); }

NetDiagram diagram_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<int>() != 1 || doc.at("kind").get<std::string>() != "net_diagram") {
            throw Error(ErrorKind::ParseError, "not a format-1 net_diagram document");
        }
        NetDiagram d;
        d.name = doc.at("name").get<std::string>();
        for (const auto& n : doc.at("nodes")) {
            NetNode node{n.at("id").get<std::string>(), n.at("label").get<std::string>(),
                         layer_from_string(n.at("layer").get<std::string>()), std::nullopt,
                         n.at("observed").get<bool>()};
            if (!n.at("annotation").is_null()) node.annotation = Probability::parse(n["annotation"].get<std::string>());
            d.nodes.push_back(std::move(node));
        }
        for (const auto& e : doc.at("edges")) {
            d.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                               Probability::parse(e.at("p").get<std::string>()), e.at("weight_class").get<int>()});
        }
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("diagram json: ") + e.what());
    }
}

}  // namespace witchbayes
