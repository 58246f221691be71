#include "witchbayes/cli.hpp"

#include "witchbayes/decision.hpp"
#include "witchbayes/error.hpp"
#include "witchbayes/http.hpp"
#include "witchbayes/inference.hpp"
#include "witchbayes/json_io.hpp"
#include "witchbayes/network.hpp"
#include "witchbayes/session.hpp"
#include "witchbayes/simulator.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace witchbayes {

namespace {

nlohmann::json error_json(std::string_view kind, std::string_view message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
}

Scenario load_scenario(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path)) return scenario_from_json(read_json_file(name_or_path));
    return builtin_scenario(name_or_path);
}

Strategy load_strategy(const std::string& name_or_path, const LikelihoodTable& tastes) {
    if (std::filesystem::exists(name_or_path)) return strategy_from_json(read_json_file(name_or_path));
    return named_strategy(name_or_path, tastes);
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string seq_text(const EvidenceSequence& seq) {
    if (seq.empty()) return "(none)";
    std::string out;
    const bool compact = std::all_of(seq.begin(), seq.end(), [](const auto& s) { return s.size() == 1; });
    for (const auto& s : seq) {
        if (!compact && !out.empty()) out += ',';
        out += s;
    }
    return out;
}

void print_distribution(std::ostream& out, const std::string& header, const Distribution& d, int digits) {
    std::size_t w_label = header.size(), w_p = 9;
    for (const auto& e : d.entries()) {
        w_label = std::max(w_label, e.label.size());
        w_p = std::max(w_p, e.p.value().str().size());
    }
    out << pad(header, w_label + 2) << pad("exact", w_p + 2) << "approx\n";
    for (const auto& e : d.entries()) {
        out << pad(e.label, w_label + 2) << pad(e.p.value().str(), w_p + 2) << e.p.value().to_decimal(digits) << '\n';
    }
}

struct Flags {
    std::string scenario = "witches";
    std::string seq;
    bool json = false;
    int digits = 6;
};

void add_common(CLI::App* cmd, Flags& f, bool with_seq = true) {
    cmd->add_option("--scenario", f.scenario, "builtin scenario name (witches, tombola, prenatal) or a scenario JSON file");
    if (with_seq) cmd->add_option("--seq", f.seq, "observed sequence, e.g. NNNN or pari,dispari");
    cmd->add_flag("--json", f.json, "machine-readable output");
    cmd->add_option("--digits", f.digits, "significant digits for decimal approximations")->check(CLI::Range(1, 40));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact discrete Bayesian inference and decisions for the witches of the cave"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Flags f;

    auto* posterior_cmd = app.add_subcommand("posterior", "posterior over hypotheses after a sequence");
    add_common(posterior_cmd, f);

    std::string outcome;
    auto* predict_cmd = app.add_subcommand("predict", "predictive probability of the next outcome (hat or taste)");
    add_common(predict_cmd, f);
    predict_cmd->add_option("--outcome", outcome, "first- or second-layer outcome label")->required();

    std::string compare = "deterministic,medallion";
    auto* decide_cmd = app.add_subcommand("decide", "compare food-serving strategies by anger probability");
    add_common(decide_cmd, f);
    decide_cmd->add_option("--compare", compare, "comma-separated strategy names or JSON files");

    std::uint64_t seed = 42, days = 100000;
    int violet = 14, total = 21;
    std::string strategy_name = "deterministic", report = "summary";
    auto* simulate_cmd = app.add_subcommand("simulate", "seeded Monte Carlo of the daily ritual");
    simulate_cmd->add_option("--seed", seed);
    simulate_cmd->add_option("--violet", violet)->check(CLI::NonNegativeNumber);
    simulate_cmd->add_option("--total", total)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--days", days);
    simulate_cmd->add_option("--strategy", strategy_name, "deterministic, medallion or a strategy JSON file");
    simulate_cmd->add_option("--report", report)->check(CLI::IsMember({"summary", "jsonl"}));

    std::uint64_t reps = 10000;
    std::size_t bins = 10;
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Monte Carlo calibration of the exact posterior");
    calibrate_cmd->add_option("--scenario", f.scenario);
    calibrate_cmd->add_option("--seed", seed);
    calibrate_cmd->add_option("--days", days);
    calibrate_cmd->add_option("--reps", reps)->check(CLI::PositiveNumber);
    calibrate_cmd->add_option("--bins", bins)->check(CLI::PositiveNumber);

    std::string format = "dot";
    auto* export_cmd = app.add_subcommand("export-net", "Bayesian-network diagram of a scenario");
    add_common(export_cmd, f);
    export_cmd->add_option("--format", format)->check(CLI::IsMember({"dot", "json"}));

    std::uint64_t x = 0, n = 0;
    auto* succession_cmd = app.add_subcommand("succession", "Laplace rule of succession (x+1)/(n+2)");
    succession_cmd->add_option("--x", x)->required();
    succession_cmd->add_option("--n", n)->required();
    succession_cmd->add_flag("--json", f.json);

    std::string scenario_name = "witches";
    auto* scenario_cmd = app.add_subcommand("scenario", "print a builtin scenario as JSON");
    scenario_cmd->add_option("--name", scenario_name);

    const char* bind_env = std::getenv("WITCHBAYES_BIND");
    std::string bind = bind_env && *bind_env ? bind_env : "127.0.0.1:8080";
    std::string session_dir;
    bool enable_reveal = false;
    auto* serve_cmd = app.add_subcommand("serve", "HTTP session server (WITCHBAYES_BIND, WITCHBAYES_SESSION_DIR)");
    serve_cmd->add_option("--bind", bind, "host:port");
    serve_cmd->add_option("--session-dir", session_dir, "append-only session event logs");
    serve_cmd->add_flag("--enable-reveal", enable_reveal, "allow the debug reveal op");

    auto* stdio_cmd = app.add_subcommand("session", "session protocol over stdio, one JSON request per line");
    stdio_cmd->add_option("--session-dir", session_dir);
    stdio_cmd->add_flag("--enable-reveal", enable_reveal);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_json("BadFlags", e.what()).dump() << '\n';
        return 2;
    }

    try {
        if (*posterior_cmd) {
            const auto sc = load_scenario(f.scenario);
            const auto seq = parse_sequence(sc, f.seq);
            const auto post = sequential_posterior(sc, seq);
            if (f.json) {
                out << nlohmann::json{{"format", 1}, {"scenario", sc.name()}, {"evidence", seq},
                                      {"posterior", distribution_json(post, f.digits)}}.dump()
                    << '\n';
            } else {
                out << "scenario: " << sc.name() << "\nevidence: " << seq_text(seq) << '\n';
                print_distribution(out, "hypothesis", post, f.digits);
            }
        } else if (*predict_cmd) {
            const auto sc = load_scenario(f.scenario);
            const auto seq = parse_sequence(sc, f.seq);
            const auto& outcomes = sc.first_layer().outcomes();
            const bool first_layer = std::find(outcomes.begin(), outcomes.end(), outcome) != outcomes.end();
            const auto p = first_layer ? predictive(sc, seq, outcome) : second_layer_predictive(sc, seq, outcome);
            if (f.json) {
                auto j = probability_json(p, f.digits);
                j["format"] = 1;
                j["outcome"] = outcome;
                j["evidence"] = seq;
                out << j.dump() << '\n';
            } else {
                out << p.value().str() << " ≈ " << p.value().to_decimal(f.digits) << '\n';
            }
        } else if (*decide_cmd) {
            const auto sc = load_scenario(f.scenario);
            const auto& tastes = sc.require_second_layer();
            const auto seq = parse_sequence(sc, f.seq);
            const auto post = sequential_posterior(sc, seq);
            std::vector<std::pair<std::string, Strategy>> strategies;
            std::stringstream names(compare);
            for (std::string name; std::getline(names, name, ',');) {
                if (!name.empty()) strategies.emplace_back(name, load_strategy(name, tastes));
            }
            const auto best = optimal_strategy(tastes);
            const auto board = chessboard_oracle();

            nlohmann::json table = nlohmann::json::array();
            for (const auto& [name, s] : strategies) {
                nlohmann::json per_hat = nlohmann::json::object();
                for (const auto& hat : tastes.rows()) per_hat[hat] = probability_json(anger_probability(s, tastes, hat), f.digits);
                table.push_back({{"strategy", name},
                                 {"per_hat", std::move(per_hat)},
                                 {"marginal", probability_json(marginal_anger(s, sc, post), f.digits)}});
            }
            nlohmann::json recommended = nlohmann::json::object();
            for (const auto& [hat, foods] : best.per_hat()) recommended[hat] = foods.entries().front().label;

            if (f.json) {
                out << nlohmann::json{{"format", 1},
                                      {"scenario", sc.name()},
                                      {"evidence", seq},
                                      {"strategies", table},
                                      {"recommended", recommended},
                                      {"chessboard", {{"satisfied", board.satisfied}, {"angry", board.angry}}}}
                           .dump()
                    << '\n';
            } else {
                out << "anger probability per hat color\n";
                out << pad("strategy", 16) << pad("hat", 6) << pad("exact", 10) << "approx\n";
                for (const auto& row : table) {
                    for (const auto& [hat, p] : row["per_hat"].items()) {
                        out << pad(row["strategy"].get<std::string>(), 16) << pad(hat, 6)
                            << pad(p["p"].get<std::string>(), 10) << p["approx"].get<std::string>() << '\n';
                    }
                }
                out << "marginal anger given evidence " << seq_text(seq) << ":\n";
                for (const auto& row : table) {
                    out << "  " << pad(row["strategy"].get<std::string>(), 14) << row["marginal"]["p"].get<std::string>()
                        << " ≈ " << row["marginal"]["approx"].get<std::string>() << '\n';
                }
                out << "chessboard (violet hat, medallion draw): " << board.satisfied << "/49 satisfied, "
                    << board.angry << "/49 angry\n";
                out << "recommended:";
                for (const auto& [hat, food] : recommended.items()) out << ' ' << hat << " -> " << food.get<std::string>();
                out << '\n';
            }
        } else if (*simulate_cmd) {
            if (violet > total) throw Error(ErrorKind::InvalidArgument, "--violet exceeds --total");
            SimConfig cfg;
            cfg.seed = seed;
            cfg.trials = days;
            cfg.composition = {violet, total};
            cfg.strategy = load_strategy(strategy_name, cfg.taste_table);
            std::function<void(const DayRecord&)> sink;
            if (report == "jsonl") sink = [&out](const DayRecord& r) { out << to_json(r).dump() << '\n'; };
            out << to_json(run_simulation(cfg, sink)).dump() << '\n';
        } else if (*calibrate_cmd) {
            const auto sc = load_scenario(f.scenario);
            out << to_json(monte_carlo_posterior_check(seed, sc, days, reps, bins)).dump() << '\n';
        } else if (*export_cmd) {
            const auto sc = load_scenario(f.scenario);
            const auto seq = parse_sequence(sc, f.seq);
            std::optional<std::string> evidence;
            if (!seq.empty()) evidence = seq.back();
            const auto diagram = diagram_from_scenario(sc, sequential_posterior(sc, seq), evidence);
            out << (format == "dot" ? to_dot(diagram) : to_json(diagram) + "\n");
        } else if (*succession_cmd) {
            const auto s = laplace_succession(x, n);
            if (f.json) {
                nlohmann::json j = {{"format", 1}, {"x", x}, {"n", n}, {"exact", probability_json(s.exact)},
                                    {"approximate", nullptr}};
                if (s.approximate) j["approximate"] = probability_json(*s.approximate);
                out << j.dump() << '\n';
            } else {
                out << s.exact.value().str() << '\n';
                if (s.approximate) out << "x/n approximation: " << s.approximate->value().str() << '\n';
            }
        } else if (*scenario_cmd) {
            out << scenario_to_json(builtin_scenario(scenario_name)).dump(2) << '\n';
        } else if (*serve_cmd || *stdio_cmd) {
            auto options = ServiceOptions::from_env();
            if (!session_dir.empty()) options.log_dir = session_dir;
            options.enable_reveal = options.enable_reveal || enable_reveal;
            SessionService service(options);
            service.load_logs();
            if (*stdio_cmd) {
                for (std::string line; std::getline(in, line);) {
                    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                    out << service.handle_line(line) << '\n' << std::flush;
                }
            } else {
                const auto [host, port] = parse_bind_address(bind);
                HttpFrontend http(service);
                const int bound = http.bind(host, port);
                if (bound < 0) throw std::runtime_error("cannot bind " + bind);
                err << "listening on " << host << ':' << bound << std::endl;
                http.run();
            }
        }
    } catch (const Error& e) {
        err << error_json(to_string(e.kind()), e.what()).dump() << '\n';
        return e.kind() == ErrorKind::ImpossibleEvidence ? 3 : 2;
    } catch (const std::exception& e) {
        err << error_json("Internal", e.what()).dump() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace witchbayes
