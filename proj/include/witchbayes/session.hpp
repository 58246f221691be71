#pragma once

// Interactive game sessions behind one JSON request/response schema shared
// by the stdio and HTTP transports.
//
// Request:  {"op": "...", "session": "s1", ...op fields..., "id": <optional, echoed>}
// Response: {"format": 1, "status": 200, "result": {...}}
//           {"format": 1, "status": 4xx, "error": {"kind": "...", "message": "..."}}
//
// Sessions are event sourced: every accepted mutation appends one event
// and the session state is a fold over its events. With a log directory
// configured, events are appended to <dir>/<session>.jsonl and can be
// replayed by load_logs().

#include "witchbayes/inference.hpp"
#include "witchbayes/simulator.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace witchbayes {

enum class SessionMode { Manual, Simulated };

struct ServiceOptions {
    bool enable_reveal = false;
    std::optional<std::filesystem::path> log_dir;

    /// WITCHBAYES_SESSION_DIR and WITCHBAYES_ENABLE_REVEAL=1.
    static ServiceOptions from_env();
};

struct DecisionLogEntry {
    std::uint64_t day = 0;
    std::string hat;
    std::string food;
    std::string taste;
    bool angry = false;
};

class Session {
public:
    /// Folds one event and returns it completed with anything drawn from
    /// the session RNG. Validation happens before any mutation, so a
    /// throwing apply leaves the session unchanged.
    nlohmann::json apply(nlohmann::json event);

    const std::string& id() const { return id_; }
    SessionMode mode() const { return mode_; }
    const Scenario& scenario() const { return *scenario_; }
    const EvidenceSequence& observations() const { return observations_; }
    const std::vector<DecisionLogEntry>& decision_log() const { return log_; }
    bool has_pending() const { return pending_hat_.has_value(); }
    /// Hidden hypothesis label (simulated mode only). Never serialized.
    const std::string& hidden_truth() const;

    nlohmann::json state_json() const;

    std::mutex& mutex() { return mutex_; }

private:
    std::string id_;
    SessionMode mode_ = SessionMode::Manual;
    std::optional<Scenario> scenario_;
    std::optional<Rng> rng_;
    std::optional<std::size_t> hidden_;
    EvidenceSequence observations_;
    std::optional<std::string> pending_hat_;
    std::vector<DecisionLogEntry> log_;
    std::mutex mutex_;
};

/// Posterior, hat predictive and (when present) second-layer predictive
/// for a scenario after `seq`.
nlohmann::json beliefs_json(const Scenario& scenario, const EvidenceSequence& seq);

class SessionService {
public:
    explicit SessionService(ServiceOptions options = {});

    nlohmann::json handle(const nlohmann::json& request);
    /// One stdio line in, one compact JSON line out.
    std::string handle_line(std::string_view line);

    /// Rebuilds sessions from the log directory. Returns how many were loaded.
    std::size_t load_logs();

    static int status_of(const nlohmann::json& response) { return response.at("status").get<int>(); }

private:
    nlohmann::json dispatch(const nlohmann::json& request);
    nlohmann::json create(const nlohmann::json& request);
    std::shared_ptr<Session> find(const nlohmann::json& request);
    void commit(Session& session, const nlohmann::json& event);

    ServiceOptions options_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

}  // namespace witchbayes
