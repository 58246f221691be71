#pragma once

#include "witchbayes/probability.hpp"

#include "json.hpp"

namespace witchbayes {

/// {"p": "num/den", "approx": "0.xxxxxx"}
nlohmann::json probability_json(const Probability& p, int digits = 6);

/// [{"label": ..., "p": "num/den", "approx": ...}, ...] in label order.
nlohmann::json distribution_json(const Distribution& d, int digits = 6);

}  // namespace witchbayes
