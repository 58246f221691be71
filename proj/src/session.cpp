#include "witchbayes/session.hpp"

#include "witchbayes/decision.hpp"
#include "witchbayes/error.hpp"
#include "witchbayes/json_io.hpp"
#include "witchbayes/network.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

namespace witchbayes {

namespace {

constexpr int kFormat = 1;

struct ProtocolError {
    int status;
    std::string kind;
    std::string message;
};

int status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UnknownLabel:
        case ErrorKind::UnknownOutcome:
        case ErrorKind::UnknownHypothesis:
        case ErrorKind::UnknownHatColor:
        case ErrorKind::ImpossibleEvidence:
        case ErrorKind::NoSecondLayer:
        case ErrorKind::LabelMismatch:
            return 422;
        default:
            return 400;
    }
}

std::string_view mode_name(SessionMode m) { return m == SessionMode::Manual ? "manual" : "simulated"; }

SessionMode parse_mode(const std::string& s) {
    if (s == "manual") return SessionMode::Manual;
    if (s == "simulated") return SessionMode::Simulated;
    throw ProtocolError{422, "UnknownLabel", "unknown mode '" + s + "'"};
}

void require_mode(const Session& s, SessionMode wanted, std::string_view op) {
    if (s.mode() != wanted) {
        throw ProtocolError{409, "WrongMode", std::string(op) + " requires a " + std::string(mode_name(wanted)) +
                                                  " session; '" + s.id() + "' is " + std::string(mode_name(s.mode()))};
    }
}

std::string require_string(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string()) {
        throw ProtocolError{400, "BadRequest", std::string("missing string field '") + field + "'"};
    }
    return j[field].get<std::string>();
}

EvidenceSequence sequence_field(const Scenario& scenario, const nlohmann::json& j) {
    if (j.is_string()) return parse_sequence(scenario, j.get<std::string>());
    if (j.is_array()) {
        EvidenceSequence seq;
        for (const auto& v : j) {
            if (!v.is_string()) throw ProtocolError{400, "BadRequest", "sequence entries must be strings"};
            seq.push_back(v.get<std::string>());
        }
        scenario.validate(seq);
        return seq;
    }
    if (j.is_null()) return {};
    throw ProtocolError{400, "BadRequest", "sequence must be a string or an array of labels"};
}

nlohmann::json ok(nlohmann::json result) {
    return {{"format", kFormat}, {"status", 200}, {"result", std::move(result)}};
}

nlohmann::json fail(int status, std::string_view kind, std::string_view message) {
    return {{"format", kFormat}, {"status", status}, {"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

ServiceOptions ServiceOptions::from_env() {
    ServiceOptions o;
    if (const char* dir = std::getenv("WITCHBAYES_SESSION_DIR"); dir && *dir) o.log_dir = dir;
    if (const char* reveal = std::getenv("WITCHBAYES_ENABLE_REVEAL"); reveal && std::string(reveal) == "1") {
        o.enable_reveal = true;
    }
    return o;
}

nlohmann::json beliefs_json(const Scenario& scenario, const EvidenceSequence& seq) {
    nlohmann::json b = {
        {"posterior", distribution_json(sequential_posterior(scenario, seq))},
        {"predictive", distribution_json(predictive_distribution(scenario, seq))},
        {"second_layer_predictive", nullptr},
    };
    if (scenario.has_second_layer()) {
        b["second_layer_predictive"] = distribution_json(second_layer_predictive_distribution(scenario, seq));
    }
    return b;
}

const std::string& Session::hidden_truth() const {
    if (!hidden_) throw ProtocolError{409, "WrongMode", "session has no hidden truth"};
    return scenario_->first_layer().rows()[*hidden_];
}

nlohmann::json Session::apply(nlohmann::json event) {
    const std::string type = require_string(event, "type");
    if (type == "created") {
        if (scenario_) throw ProtocolError{400, "BadEvent", "session already created"};
        Scenario scenario = scenario_from_json(event.at("scenario"));
        const auto mode = parse_mode(require_string(event, "mode"));
        const auto seed = event.value("seed", std::uint64_t{0});
        id_ = require_string(event, "session");
        mode_ = mode;
        if (mode == SessionMode::Simulated) {
            rng_.emplace(seed);
            hidden_ = CategoricalSampler(scenario.prior()).sample(*rng_);
        }
        scenario_.emplace(std::move(scenario));
        return event;
    }
    if (!scenario_) throw ProtocolError{400, "BadEvent", "event before creation"};

    if (type == "observed") {
        require_mode(*this, SessionMode::Manual, "observe");
        const std::string outcome = require_string(event, "outcome");
        EvidenceSequence next = observations_;
        next.push_back(outcome);
        scenario_->validate(next);
        sequential_posterior(*scenario_, next);  // rejects impossible evidence
        observations_ = std::move(next);
        return event;
    }
    if (type == "next_day") {
        require_mode(*this, SessionMode::Simulated, "next_day");
        if (pending_hat_) throw ProtocolError{409, "PendingDay", "serve the pending day before drawing the next one"};
        const auto& table = scenario_->first_layer();
        const auto hat = table.outcomes()[CategoricalSampler(table.row_distribution(*hidden_)).sample(*rng_)];
        if (event.contains("hat") && event["hat"] != hat) {
            throw ProtocolError{400, "BadEvent", "replayed hat differs from the logged one"};
        }
        event["hat"] = hat;
        observations_.push_back(hat);
        if (scenario_->has_second_layer()) {
            pending_hat_ = hat;
        }
        return event;
    }
    if (type == "served") {
        require_mode(*this, SessionMode::Simulated, "serve");
        const auto& tastes = scenario_->require_second_layer();
        if (!pending_hat_) throw ProtocolError{409, "NoPendingDay", "no revealed hat awaiting a food; call next_day"};
        const std::string food = require_string(event, "food");
        tastes.outcome_index(food);
        const auto taste = tastes.outcomes()[CategoricalSampler(tastes.row_distribution(tastes.row_index(*pending_hat_))).sample(*rng_)];
        if (event.contains("taste") && event["taste"] != taste) {
            throw ProtocolError{400, "BadEvent", "replayed taste differs from the logged one"};
        }
        DecisionLogEntry entry{observations_.size(), *pending_hat_, food, taste, food != taste};
        event["taste"] = entry.taste;
        event["angry"] = entry.angry;
        event["day"] = entry.day;
        log_.push_back(std::move(entry));
        pending_hat_.reset();
        return event;
    }
    if (type == "reset") {
        observations_.clear();
        log_.clear();
        pending_hat_.reset();
        return event;
    }
    throw ProtocolError{400, "BadEvent", "unknown event type '" + type + "'"};
}

nlohmann::json Session::state_json() const {
    const auto& sc = *scenario_;
    const auto post = sequential_posterior(sc, observations_);
    nlohmann::json state = {
        {"session", id_},
        {"mode", mode_name(mode_)},
        {"scenario", sc.name()},
        {"day", observations_.size()},
        {"observations", observations_},
        {"beliefs", beliefs_json(sc, observations_)},
        {"decisions", nullptr},
        {"pending", nullptr},
    };
    if (const auto& tastes = sc.second_layer()) {
        const auto optimal = optimal_strategy(*tastes);
        nlohmann::json recommended = nlohmann::json::object();
        for (const auto& [hat, foods] : optimal.per_hat()) recommended[hat] = foods.entries().front().label;
        nlohmann::json anger = nlohmann::json::object();
        for (const char* name : {"deterministic", "medallion"}) {
            anger[name] = probability_json(marginal_anger(named_strategy(name, *tastes), sc, post));
        }
        state["decisions"] = {{"recommended", std::move(recommended)}, {"marginal_anger", std::move(anger)}};
    }
    if (pending_hat_) state["pending"] = {{"day", observations_.size()}, {"hat", *pending_hat_}};

    nlohmann::json log = nlohmann::json::array();
    std::uint64_t angry = 0;
    for (const auto& e : log_) {
        log.push_back({{"day", e.day}, {"hat", e.hat}, {"food", e.food}, {"taste", e.taste}, {"angry", e.angry}});
        angry += e.angry ? 1 : 0;
    }
    state["log"] = std::move(log);
    state["totals"] = {{"served", log_.size()}, {"angry", angry}};
    return state;
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {
    if (options_.log_dir) std::filesystem::create_directories(*options_.log_dir);
}

std::string SessionService::handle_line(std::string_view line) {
    nlohmann::json request;
    try {
        request = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        return fail(400, "BadRequest", std::string("malformed json: ") + e.what()).dump();
    }
    return handle(request).dump();
}

nlohmann::json SessionService::handle(const nlohmann::json& request) {
    nlohmann::json response;
    try {
        if (!request.is_object()) throw ProtocolError{400, "BadRequest", "request must be a JSON object"};
        response = dispatch(request);
    } catch (const ProtocolError& e) {
        response = fail(e.status, e.kind, e.message);
    } catch (const Error& e) {
        response = fail(status_for(e.kind()), to_string(e.kind()), e.what());
    } catch (const nlohmann::json::exception& e) {
        response = fail(400, "BadRequest", e.what());
    }
    if (request.is_object() && request.contains("id")) response["id"] = request["id"];
    return response;
}

std::shared_ptr<Session> SessionService::find(const nlohmann::json& request) {
    const std::string id = require_string(request, "session");
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ProtocolError{404, "UnknownSession", "unknown session '" + id + "'"};
    return it->second;
}

void SessionService::commit(Session& session, const nlohmann::json& event) {
    auto done = session.apply(event);
    if (options_.log_dir) {
        std::ofstream out(*options_.log_dir / (session.id() + ".jsonl"), std::ios::app);
        out << done.dump() << '\n';
    }
}

nlohmann::json SessionService::create(const nlohmann::json& request) {
    std::optional<Scenario> scenario;
    const auto& spec = request.contains("scenario") ? request["scenario"] : nlohmann::json("witches");
    if (spec.is_string()) {
        scenario = builtin_scenario(spec.get<std::string>());
    } else if (spec.is_object()) {
        scenario = scenario_from_json(spec);
    } else {
        throw ProtocolError{400, "BadRequest", "scenario must be a builtin name or a scenario document"};
    }
    const std::string mode = request.value("mode", std::string("manual"));
    parse_mode(mode);
    if (request.contains("seed") && !request["seed"].is_number_unsigned()) {
        throw ProtocolError{400, "BadRequest", "seed must be a non-negative integer"};
    }

    auto session = std::make_shared<Session>();
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "s" + std::to_string(next_id_++);
        sessions_.emplace(id, session);
    }
    std::lock_guard lock(session->mutex());
    try {
        commit(*session, {{"type", "created"},
                          {"session", id},
                          {"mode", mode},
                          {"seed", request.value("seed", std::uint64_t{0})},
                          {"scenario", scenario_to_json(*scenario)}});
    } catch (...) {
        std::lock_guard map_lock(mutex_);
        sessions_.erase(id);
        throw;
    }
    return ok(session->state_json());
}

nlohmann::json SessionService::dispatch(const nlohmann::json& request) {
    const std::string op = require_string(request, "op");
    if (op == "create_session") return create(request);

    static const std::set<std::string> known = {"observe", "next_day", "state", "serve", "what_if",
                                                "network", "reset", "reveal"};
    if (!known.contains(op)) throw ProtocolError{400, "UnknownOp", "unknown op '" + op + "'"};

    auto session = find(request);
    std::lock_guard lock(session->mutex());

    if (op == "observe") {
        commit(*session, {{"type", "observed"}, {"outcome", require_string(request, "outcome")}});
        return ok(session->state_json());
    }
    if (op == "next_day") {
        commit(*session, {{"type", "next_day"}});
        auto state = session->state_json();
        return ok({{"hat", session->observations().back()}, {"state", std::move(state)}});
    }
    if (op == "serve") {
        commit(*session, {{"type", "served"}, {"food", require_string(request, "food")}});
        const auto& last = session->decision_log().back();
        return ok({{"outcome",
                    {{"day", last.day}, {"hat", last.hat}, {"food", last.food}, {"taste", last.taste}, {"angry", last.angry}}},
                   {"state", session->state_json()}});
    }
    if (op == "state") return ok(session->state_json());
    if (op == "what_if") {
        const auto suffix = sequence_field(session->scenario(), request.contains("suffix") ? request["suffix"] : nlohmann::json());
        EvidenceSequence seq = session->observations();
        seq.insert(seq.end(), suffix.begin(), suffix.end());
        return ok({{"session", session->id()}, {"suffix", suffix}, {"beliefs", beliefs_json(session->scenario(), seq)}});
    }
    if (op == "network") {
        const auto& obs = session->observations();
        std::optional<std::string> evidence;
        if (!obs.empty()) evidence = obs.back();
        return ok(diagram_to_json(diagram_from_scenario(session->scenario(),
                                                        sequential_posterior(session->scenario(), obs), evidence)));
    }
    if (op == "reset") {
        commit(*session, {{"type", "reset"}});
        return ok(session->state_json());
    }
    // reveal
    if (!options_.enable_reveal) throw ProtocolError{403, "Forbidden", "reveal is disabled"};
    require_mode(*session, SessionMode::Simulated, "reveal");
    return ok({{"session", session->id()}, {"hidden_truth", session->hidden_truth()}});
}

std::size_t SessionService::load_logs() {
    if (!options_.log_dir || !std::filesystem::exists(*options_.log_dir)) return 0;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*options_.log_dir)) {
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::size_t loaded = 0;
    for (const auto& path : files) {
        auto session = std::make_shared<Session>();
        std::ifstream in(path);
        std::string line;
        try {
            while (std::getline(in, line)) {
                if (!line.empty()) session->apply(nlohmann::json::parse(line));
            }
        } catch (const ProtocolError& e) {
            throw Error(ErrorKind::ParseError, path.string() + ": " + e.message);
        }
        if (session->id().empty()) continue;
        std::lock_guard lock(mutex_);
        const auto& id = session->id();
        if (id.size() > 1 && id[0] == 's') {
            next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(id.substr(1)) + 1);
        }
        sessions_[id] = std::move(session);
        ++loaded;
    }
    return loaded;
}

}  // namespace witchbayes
