#include "witchbayes/decision.hpp"
#include "witchbayes/inference.hpp"
#include "witchbayes/network.hpp"
#include "witchbayes/session.hpp"
#include "witchbayes/simulator.hpp"
#include "witchbayes/error.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace witchbayes;

namespace {

py::object fraction(const Rational& r) {
    static py::object Fraction = py::module_::import("fractions").attr("Fraction");
    py::object to_int = py::module_::import("builtins").attr("int");
    return Fraction(to_int(r.num().str()), to_int(r.den().str()));
}

nlohmann::json to_json(const py::handle& obj) {
    auto dumps = py::module_::import("json").attr("dumps");
    return nlohmann::json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

Scenario scenario_arg(const py::object& s) {
    if (py::isinstance<py::str>(s)) return builtin_scenario(s.cast<std::string>());
    return scenario_from_json(to_json(s));
}

py::dict distribution(const Distribution& d) {
    py::dict out;
    for (const auto& e : d.entries()) out[py::str(e.label)] = fraction(e.p.value());
    return out;
}

const LikelihoodTable& witch_tastes() {
    static const Scenario witches = builtin_scenario("witches");
    return witches.require_second_layer();
}

Strategy strategy_arg(const py::object& s) {
    if (py::isinstance<py::str>(s)) return named_strategy(s.cast<std::string>(), witch_tastes());
    return strategy_from_json(to_json(s));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact discrete Bayesian inference and decisions for the witches of the cave";

    static py::exception<Error> exc(m, "WitchBayesError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            exc((std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    m.def("posterior", [](const std::string& seq, const py::object& scenario) {
        const auto sc = scenario_arg(scenario);
        return distribution(sequential_posterior(sc, parse_sequence(sc, seq)));
    }, py::arg("seq"), py::arg("scenario") = "witches");

    m.def("predictive", [](const std::string& seq, const std::string& outcome, const py::object& scenario) {
        const auto sc = scenario_arg(scenario);
        return fraction(predictive(sc, parse_sequence(sc, seq), outcome).value());
    }, py::arg("seq"), py::arg("outcome"), py::arg("scenario") = "witches");

    m.def("second_layer_predictive", [](const std::string& seq, const std::string& outcome, const py::object& scenario) {
        const auto sc = scenario_arg(scenario);
        return fraction(second_layer_predictive(sc, parse_sequence(sc, seq), outcome).value());
    }, py::arg("seq"), py::arg("outcome"), py::arg("scenario") = "witches");

    m.def("laplace_succession", [](std::uint64_t x, std::uint64_t n) {
        return fraction(laplace_succession(x, n).exact.value());
    }, py::arg("x"), py::arg("n"));

    m.def("anger_probability", [](const py::object& strategy, const std::string& hat) {
        return fraction(anger_probability(strategy_arg(strategy), witch_tastes(), hat).value());
    }, py::arg("strategy"), py::arg("hat"));

    m.def("optimal_strategy", [] { return from_json(strategy_to_json(optimal_strategy(witch_tastes()))); });

    m.def("chessboard_oracle", [] {
        const auto c = chessboard_oracle();
        return py::make_tuple(c.satisfied, c.angry);
    });

    m.def("simulate", [](std::uint64_t seed, int violet, int total, std::uint64_t days, const py::object& strategy) {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.trials = days;
        cfg.composition = {violet, total};
        cfg.strategy = strategy_arg(strategy);
        return from_json(to_json(run_simulation(cfg)));
    }, py::arg("seed") = 42, py::arg("violet") = 14, py::arg("total") = 21, py::arg("days") = 100000,
       py::arg("strategy") = "deterministic");

    m.def("export_net", [](const std::string& seq, const py::object& scenario, const std::string& format) {
        const auto sc = scenario_arg(scenario);
        const auto s = parse_sequence(sc, seq);
        std::optional<std::string> evidence;
        if (!s.empty()) evidence = s.back();
        const auto d = diagram_from_scenario(sc, sequential_posterior(sc, s), evidence);
        if (format == "dot") return to_dot(d);
        if (format == "json") return to_json(d);
        throw Error(ErrorKind::InvalidArgument, "format must be dot or json");
    }, py::arg("seq") = "", py::arg("scenario") = "witches", py::arg("format") = "dot");

    m.def("builtin_scenario", [](const std::string& name) { return from_json(scenario_to_json(builtin_scenario(name))); });

    m.def("to_decimal", [](const std::string& rational, int digits) {
        return Rational::parse(rational).to_decimal(digits);
    }, py::arg("rational"), py::arg("digits") = 6);

    py::class_<SessionService>(m, "SessionService")
        .def(py::init([](bool enable_reveal) {
            ServiceOptions o;
            o.enable_reveal = enable_reveal;
            return std::make_unique<SessionService>(o);
        }), py::arg("enable_reveal") = false)
        .def("handle", [](SessionService& s, const py::object& request) { return from_json(s.handle(to_json(request))); })
        .def("handle_line", &SessionService::handle_line);
}
