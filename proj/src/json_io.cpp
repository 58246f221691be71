#include "witchbayes/json_io.hpp"

namespace witchbayes {

nlohmann::json probability_json(const Probability& p, int digits) {
    return {{"p", p.value().str()}, {"approx", p.value().to_decimal(digits)}};
}

nlohmann::json distribution_json(const Distribution& d, int digits) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : d.entries()) {
        auto item = probability_json(e.p, digits);
        item["label"] = e.label;
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace witchbayes
