#include "doctest.h"

#include "witchbayes/cli.hpp"
#include "witchbayes/http.hpp"
#include "witchbayes/session.hpp"

#include "httplib.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using namespace witchbayes;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("witchbayes_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

json create(SessionService& svc, const std::string& mode = "manual", std::uint64_t seed = 0,
            const std::string& scenario = "witches") {
    auto r = svc.handle({{"op", "create_session"}, {"mode", mode}, {"seed", seed}, {"scenario", scenario}});
    REQUIRE(r["status"] == 200);
    return r["result"];
}

std::string posterior_p(const json& state, const std::string& label) {
    for (const auto& e : state["beliefs"]["posterior"]) {
        if (e["label"] == label) return e["p"];
    }
    return "";
}

}  // namespace

TEST_CASE("manual session updates beliefs") {
    SessionService svc;
    const auto created = create(svc);
    CHECK(created["session"] == "s1");
    CHECK(created["day"] == 0);
    CHECK(posterior_p(created, "V7") == "1/2");
    json last;
    for (int i = 0; i < 4; ++i) last = svc.handle({{"op", "observe"}, {"session", "s1"}, {"outcome", "N"}});
    REQUIRE(last["status"] == 200);
    const auto& state = last["result"];
    CHECK(state["day"] == 4);
    CHECK(posterior_p(state, "V7") == "16/17");
    CHECK(state["beliefs"]["second_layer_predictive"][1]["label"] == "Salty");
    CHECK(state["beliefs"]["second_layer_predictive"][1]["p"] == "83/119");
    CHECK(state["decisions"]["recommended"]["V"] == "Sweet");
    CHECK(state["decisions"]["recommended"]["N"] == "Salty");

    const auto same = svc.handle({{"op", "state"}, {"session", "s1"}, {"id", 7}});
    CHECK(same["id"] == 7);
    CHECK(same["result"] == state);
}

TEST_CASE("what_if does not touch the session") {
    SessionService svc;
    create(svc);
    svc.handle({{"op", "observe"}, {"session", "s1"}, {"outcome", "V"}});
    const auto before = svc.handle({{"op", "state"}, {"session", "s1"}}).dump();

    const auto empty = svc.handle({{"op", "what_if"}, {"session", "s1"}, {"suffix", ""}});
    REQUIRE(empty["status"] == 200);
    CHECK(empty["result"]["beliefs"] == json::parse(before)["result"]["beliefs"]);

    const auto ten = svc.handle({{"op", "what_if"}, {"session", "s1"}, {"suffix", "VVVVVVVVV"}});
    CHECK(ten["result"]["beliefs"]["predictive"][1]["p"] == "683/1025");
    const auto as_array = svc.handle({{"op", "what_if"}, {"session", "s1"}, {"suffix", json::array({"N", "N"})}});
    CHECK(as_array["status"] == 200);
    CHECK(svc.handle({{"op", "what_if"}, {"session", "s1"}, {"suffix", "Q"}})["status"] == 422);
    CHECK(svc.handle({{"op", "state"}, {"session", "s1"}}).dump() == before);
}

TEST_CASE("protocol errors") {
    SessionService svc;
    create(svc);
    auto status = [&](const json& req) { return SessionService::status_of(svc.handle(req)); };
    CHECK(status({{"op", "state"}, {"session", "s9"}}) == 404);
    CHECK(status({{"op", "observe"}, {"session", "s1"}, {"outcome", "Q"}}) == 422);
    CHECK(status({{"op", "observe"}, {"session", "s1"}}) == 400);
    CHECK(status({{"op", "fly"}, {"session", "s1"}}) == 400);
    CHECK(status({{"session", "s1"}}) == 400);
    CHECK(status(json::array()) == 400);
    CHECK(status({{"op", "next_day"}, {"session", "s1"}}) == 409);
    CHECK(status({{"op", "serve"}, {"session", "s1"}, {"food", "Sweet"}}) == 409);
    CHECK(status({{"op", "reveal"}, {"session", "s1"}}) == 403);
    CHECK(status({{"op", "create_session"}, {"scenario", "meteo"}}) == 422);
    CHECK(status({{"op", "create_session"}, {"mode", "dreaming"}}) == 422);
    CHECK(status({{"op", "create_session"}, {"seed", -3}}) == 400);
    const auto err = svc.handle({{"op", "state"}, {"session", "s9"}});
    CHECK(err["error"]["kind"] == "UnknownSession");
    CHECK(err["format"] == 1);
    CHECK_FALSE(err.contains("result"));
    CHECK(json::parse(svc.handle_line("{oops"))["status"] == 400);

    create(svc, "manual", 0, "tombola");
    const auto no_tombola = svc.handle({{"op", "observe"}, {"session", "s2"}, {"outcome", "pari"}});
    CHECK(no_tombola["status"] == 200);
    CHECK(posterior_p(no_tombola["result"], "37") == "0/1");
    CHECK(status({{"op", "serve"}, {"session", "s2"}, {"food", "Sweet"}}) == 409);

    // impossible evidence is rejected and leaves the session unchanged
    WitchConfig black_only;
    black_only.candidate_violet_counts = {0};
    const auto doc = scenario_to_json(build_witch_scenario(black_only));
    REQUIRE(svc.handle({{"op", "create_session"}, {"scenario", doc}})["status"] == 200);
    const auto rejected = svc.handle({{"op", "observe"}, {"session", "s3"}, {"outcome", "V"}});
    CHECK(rejected["status"] == 422);
    CHECK(rejected["error"]["kind"] == "ImpossibleEvidence");
    CHECK(svc.handle({{"op", "state"}, {"session", "s3"}})["result"]["day"] == 0);
    CHECK(status({{"op", "create_session"}, {"scenario", 5}}) == 400);
}

TEST_CASE("simulated session flow") {
    SessionService svc(ServiceOptions{true, std::nullopt});
    create(svc, "simulated", 11);
    CHECK(SessionService::status_of(svc.handle({{"op", "observe"}, {"session", "s1"}, {"outcome", "N"}})) == 409);
    CHECK(SessionService::status_of(svc.handle({{"op", "serve"}, {"session", "s1"}, {"food", "Sweet"}})) == 409);

    std::uint64_t angry = 0;
    for (int day = 1; day <= 20; ++day) {
        const auto next = svc.handle({{"op", "next_day"}, {"session", "s1"}});
        REQUIRE(next["status"] == 200);
        const std::string hat = next["result"]["hat"];
        CHECK(next["result"]["state"]["pending"]["hat"] == hat);
        CHECK(SessionService::status_of(svc.handle({{"op", "next_day"}, {"session", "s1"}})) == 409);
        const std::string food = next["result"]["state"]["decisions"]["recommended"][hat];
        const auto served = svc.handle({{"op", "serve"}, {"session", "s1"}, {"food", food}});
        REQUIRE(served["status"] == 200);
        CHECK(served["result"]["outcome"]["day"] == day);
        angry += served["result"]["outcome"]["angry"].get<bool>();
    }
    const auto state = svc.handle({{"op", "state"}, {"session", "s1"}})["result"];
    CHECK(state["day"] == 20);
    CHECK(state["totals"]["served"] == 20);
    CHECK(state["totals"]["angry"] == angry);
    for (const auto& e : state["log"]) {
        if (e["hat"] == "N") CHECK_FALSE(e["angry"].get<bool>());
    }
    const auto reveal = svc.handle({{"op", "reveal"}, {"session", "s1"}});
    REQUIRE(reveal["status"] == 200);
    const std::string truth = reveal["result"]["hidden_truth"];
    CHECK((truth == "V7" || truth == "V14"));

    create(svc, "manual");
    CHECK(SessionService::status_of(svc.handle({{"op", "reveal"}, {"session", "s2"}})) == 409);

    // same seed, same days
    SessionService other;
    create(other, "simulated", 11);
    const auto first_hat = other.handle({{"op", "next_day"}, {"session", "s1"}})["result"]["hat"];
    CHECK(first_hat == state["observations"][0]);
}

TEST_CASE("reset and network") {
    SessionService svc;
    create(svc);
    svc.handle({{"op", "observe"}, {"session", "s1"}, {"outcome", "N"}});
    const auto net = svc.handle({{"op", "network"}, {"session", "s1"}});
    REQUIRE(net["status"] == 200);
    CHECK(net["result"]["kind"] == "net_diagram");
    CHECK(net["result"]["nodes"][2]["observed"] == true);
    CHECK(net["result"]["nodes"][0]["annotation"] == "2/3");
    const auto reset = svc.handle({{"op", "reset"}, {"session", "s1"}});
    CHECK(reset["result"]["day"] == 0);
    CHECK(posterior_p(reset["result"], "V7") == "1/2");
}

TEST_CASE("event logs replay into the same state") {
    const auto dir = fresh_dir("logs");
    std::string manual_state, simulated_state;
    {
        SessionService svc(ServiceOptions{false, dir});
        create(svc);
        for (const char* o : {"N", "V", "N"}) svc.handle({{"op", "observe"}, {"session", "s1"}, {"outcome", o}});
        create(svc, "simulated", 5);
        for (int i = 0; i < 3; ++i) {
            svc.handle({{"op", "next_day"}, {"session", "s2"}});
            svc.handle({{"op", "serve"}, {"session", "s2"}, {"food", "Sweet"}});
        }
        svc.handle({{"op", "next_day"}, {"session", "s2"}});
        manual_state = svc.handle({{"op", "state"}, {"session", "s1"}}).dump();
        simulated_state = svc.handle({{"op", "state"}, {"session", "s2"}}).dump();
    }
    CHECK(std::filesystem::exists(dir / "s1.jsonl"));
    SessionService restored(ServiceOptions{false, dir});
    CHECK(restored.load_logs() == 2);
    CHECK(restored.handle({{"op", "state"}, {"session", "s1"}}).dump() == manual_state);
    CHECK(restored.handle({{"op", "state"}, {"session", "s2"}}).dump() == simulated_state);
    // the rng continues where it left off
    CHECK(restored.handle({{"op", "serve"}, {"session", "s2"}, {"food", "Salty"}})["status"] == 200);
    CHECK(create(restored)["session"] == "s3");

    // a tampered log is refused
    {
        std::ofstream bad(dir / "s9.jsonl");
        bad << R"({"type":"observed","outcome":"N"})" << '\n';
    }
    SessionService broken(ServiceOptions{false, dir});
    CHECK_THROWS(broken.load_logs());
    std::filesystem::remove_all(dir);
}

TEST_CASE("session state agrees with the command line") {
    SessionService svc;
    create(svc);
    json state;
    for (char c : std::string("NNVNVV")) state = svc.handle({{"op", "observe"}, {"session", "s1"}, {"outcome", std::string(1, c)}});
    std::istringstream in;
    std::ostringstream out, err;
    REQUIRE(run_cli({"posterior", "--seq", "NNVNVV", "--json"}, in, out, err) == 0);
    CHECK(json::parse(out.str())["posterior"] == state["result"]["beliefs"]["posterior"]);
}

TEST_CASE("stdio session transport") {
    std::istringstream in(R"({"op":"create_session","id":1}
{"op":"observe","session":"s1","outcome":"N"}

not json
)");
    std::ostringstream out, err;
    REQUIRE(run_cli({"session"}, in, out, err) == 0);
    std::istringstream lines(out.str());
    std::vector<json> responses;
    for (std::string line; std::getline(lines, line);) responses.push_back(json::parse(line));
    REQUIRE(responses.size() == 3);
    CHECK(responses[0]["id"] == 1);
    CHECK(responses[1]["result"]["day"] == 1);
    CHECK(responses[2]["status"] == 400);
}

TEST_CASE("http transport") {
    SessionService svc;
    HttpFrontend http(svc);
    const int port = http.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread server([&] { http.run(); });

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(5);
    auto health = client.Get("/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto created = client.Post("/v1/create_session", R"({"mode":"manual"})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 200);
    CHECK(json::parse(created->body)["result"]["session"] == "s1");

    for (int i = 0; i < 4; ++i) client.Post("/v1/observe", R"({"session":"s1","outcome":"N"})", "application/json");
    auto state = client.Post("/v1/state", R"({"session":"s1"})", "application/json");
    REQUIRE(state);
    const auto body = json::parse(state->body);
    CHECK(posterior_p(body["result"], "V7") == "16/17");
    // the same request through the in-process handler gives the same bytes
    CHECK(state->body == svc.handle({{"op", "state"}, {"session", "s1"}}).dump());

    auto missing = client.Post("/v1/state", R"({"session":"s4"})", "application/json");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto garbage = client.Post("/v1/state", "[1,2", "application/json");
    REQUIRE(garbage);
    CHECK(garbage->status == 400);
    auto forbidden = client.Post("/v1/reveal", R"({"session":"s1"})", "application/json");
    REQUIRE(forbidden);
    CHECK(forbidden->status == 403);

    http.stop();
    server.join();
}

TEST_CASE("bind address parsing") {
    CHECK(parse_bind_address("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
    CHECK(parse_bind_address("0.0.0.0:0").second == 0);
    CHECK_THROWS(parse_bind_address("localhost"));
    CHECK_THROWS(parse_bind_address("localhost:"));
    CHECK_THROWS(parse_bind_address("localhost:99999"));
    CHECK_THROWS(parse_bind_address("localhost:80x"));
}
