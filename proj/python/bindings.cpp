#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "xcross/crossing_approx.hpp"
#include "xcross/errors.hpp"
#include "xcross/exact_exponential.hpp"
#include "xcross/gig.hpp"
#include "xcross/harness.hpp"
#include "xcross/mc_simulator.hpp"
#include "xcross/renewal_model.hpp"

namespace py = pybind11;
using namespace xcross;

namespace {

CrossingQuery query(double u, double c, double v, double t) { return {u, c, v, t}; }

std::string sweep_csv(const std::string& config, int threads) {
    const RunConfig cfg = parse_config(nlohmann::json::parse(config));
    const SweepResult res = run_sweep(cfg, columns_for(cfg.command.value_or(Command::sweep)), threads > 0 ? threads : thread_cap());
    std::ostringstream os;
    write_csv(os, res.rows);
    return os.str();
}

std::string compare_json(const std::string& config, int threads) {
    return run_compare(parse_config(nlohmann::json::parse(config)), threads > 0 ? threads : thread_cap()).dump();
}

}  // namespace

PYBIND11_MODULE(_xcross, m) {
    m.doc() = "Level-crossing probabilities for renewal risk processes";

    auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
    py::register_exception<DegenerateModelError>(m, "DegenerateModelError", domain.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Exponential>(m, "Exponential")
        .def(py::init<double>(), py::arg("rate") = 1.0)
        .def_readwrite("rate", &Exponential::rate)
        .def("__repr__", [](const Exponential& d) { return describe(DistSpec{d}); });
    py::class_<Gamma>(m, "Gamma")
        .def(py::init<double, double>(), py::arg("shape") = 1.0, py::arg("rate") = 1.0)
        .def_readwrite("shape", &Gamma::shape)
        .def_readwrite("rate", &Gamma::rate)
        .def("__repr__", [](const Gamma& d) { return describe(DistSpec{d}); });
    py::class_<Deterministic>(m, "Deterministic")
        .def(py::init<double>(), py::arg("value") = 1.0)
        .def_readwrite("value", &Deterministic::value)
        .def("__repr__", [](const Deterministic& d) { return describe(DistSpec{d}); });

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init([](DistSpec t, DistSpec y, std::optional<DistSpec> t1) {
                 validate(t);
                 validate(y);
                 if (t1) validate(*t1);
                 return ModelSpec{t, y, t1};
             }),
             py::arg("T") = DistSpec{Exponential{}}, py::arg("Y") = DistSpec{Exponential{}},
             py::arg("T1") = std::nullopt)
        .def_readwrite("T", &ModelSpec::t)
        .def_readwrite("Y", &ModelSpec::y)
        .def_readwrite("T1", &ModelSpec::first_arrival);

    py::class_<MomentSet>(m, "MomentSet")
        .def(py::init<>())
        .def_readwrite("e_t", &MomentSet::e_t)
        .def_readwrite("var_t", &MomentSet::var_t)
        .def_readwrite("mu3_t", &MomentSet::mu3_t)
        .def_readwrite("e_t4", &MomentSet::e_t4)
        .def_readwrite("e_y", &MomentSet::e_y)
        .def_readwrite("var_y", &MomentSet::var_y)
        .def_readwrite("mu3_y", &MomentSet::mu3_y)
        .def_readwrite("e_y4", &MomentSet::e_y4)
        .def_readwrite("e_y2", &MomentSet::e_y2);

    py::class_<DerivedConstants>(m, "DerivedConstants")
        .def_readonly("m", &DerivedConstants::m)
        .def_readonly("d2", &DerivedConstants::d2)
        .def_readonly("b1", &DerivedConstants::b1)
        .def_readonly("b2", &DerivedConstants::b2)
        .def_readonly("b3", &DerivedConstants::b3)
        .def_readonly("b4", &DerivedConstants::b4)
        .def_readwrite("k_f", &DerivedConstants::k_f)
        .def_readwrite("k_s", &DerivedConstants::k_s)
        .def_readonly("c_star", &DerivedConstants::c_star)
        .def_readonly("drift", &DerivedConstants::drift);

    py::class_<ApproxTerms>(m, "ApproxTerms")
        .def_readonly("i_m", &ApproxTerms::i_m)
        .def_readonly("i_f", &ApproxTerms::i_f)
        .def_readonly("i_s", &ApproxTerms::i_s)
        .def_readonly("value", &ApproxTerms::value);

    py::class_<SeriesResult>(m, "SeriesResult")
        .def_readonly("value", &SeriesResult::value)
        .def_readonly("tail_bound", &SeriesResult::tail_bound)
        .def_readonly("quad_error", &SeriesResult::quad_error)
        .def_readonly("terms", &SeriesResult::terms);

    py::class_<SimEstimate>(m, "SimEstimate")
        .def_readonly("p_hat", &SimEstimate::p_hat)
        .def_readonly("ci_low", &SimEstimate::ci_low)
        .def_readonly("ci_high", &SimEstimate::ci_high)
        .def_readonly("std_error", &SimEstimate::std_error)
        .def_readonly("n_ruined", &SimEstimate::n_ruined)
        .def_readonly("n_paths", &SimEstimate::n_paths)
        .def_readonly("seed", &SimEstimate::seed);

    py::enum_<ConditionalKernel>(m, "ConditionalKernel")
        .value("approximation", ConditionalKernel::approximation)
        .value("exact_exponential", ConditionalKernel::exact_exponential);

    m.attr("inf") = kInfinity;
    m.attr("Z95") = kZ95;
    m.attr("Z99") = kZ99;

    m.def("gig_pdf", py::vectorize([](double mu, double lam, double p, double x) { return gig_pdf({mu, lam, p}, x); }),
          py::arg("mu"), py::arg("lam"), py::arg("p"), py::arg("x"));
    m.def("gig_cdf", py::vectorize([](double mu, double lam, double p, double x) { return gig_cdf_closed({mu, lam, p}, x); }),
          py::arg("mu"), py::arg("lam"), py::arg("p"), py::arg("x"));
    m.def("gig_cdf_quadrature", [](double mu, double lam, double p, double x) { return gig_cdf_quadrature({mu, lam, p}, x).value; },
          py::arg("mu"), py::arg("lam"), py::arg("p"), py::arg("x"));

    m.def("moments_of", py::overload_cast<const ModelSpec&>(&moments_of), py::arg("model"));
    m.def("derive_constants", [](const MomentSet& mo, double c) {
        validate(mo);
        return derive_constants(mo, c);
    }, py::arg("moments"), py::arg("c"));
    m.def("constants_from_md2", &constants_from_md2, py::arg("m"), py::arg("d2"), py::arg("c"));
    m.def("sign_corrected_k_f", &sign_corrected_k_f, py::arg("moments"), py::arg("c"));

    m.def("approx_terms", [](double u, double c, double v, double t, const DerivedConstants& k) {
        return approx_terms(query(u, c, v, t), k);
    }, py::arg("u"), py::arg("c"), py::arg("v") = 0.0, py::arg("t") = kInfinity, py::arg("constants"));
    m.def("elementary_component", [](int j, double u, double c, double v, double t, const DerivedConstants& k) {
        return elementary_component_closed(j, query(u, c, v, t), k).value;
    }, py::arg("k"), py::arg("u"), py::arg("c"), py::arg("v"), py::arg("t"), py::arg("constants"));
    m.def("integral_M", [](double u, double c, double v, double t, const DerivedConstants& k) {
        return integral_M(query(u, c, v, t), k);
    }, py::arg("u"), py::arg("c"), py::arg("v") = 0.0, py::arg("t") = kInfinity, py::arg("constants"));
    m.def("integral_F", [](double u, double c, double v, double t, const DerivedConstants& k) {
        return integral_F(query(u, c, v, t), k);
    }, py::arg("u"), py::arg("c"), py::arg("v") = 0.0, py::arg("t") = kInfinity, py::arg("constants"));
    m.def("integral_S", [](double u, double c, double v, double t, const DerivedConstants& k) {
        return integral_S(query(u, c, v, t), k);
    }, py::arg("u"), py::arg("c"), py::arg("v") = 0.0, py::arg("t") = kInfinity, py::arg("constants"));

    m.def("exact_conditional_exp", [](double u, double c, double v, double t, double rate_t, double rate_y) {
        return exact_conditional_exp(query(u, c, v, t), {rate_t, rate_y});
    }, py::arg("u"), py::arg("c"), py::arg("v") = 0.0, py::arg("t") = kInfinity, py::arg("rate_t") = 1.0,
       py::arg("rate_y") = 1.0);
    m.def("exact_conditional_series", [](double u, double c, double v, double t, double rate_t, double rate_y,
                                         std::optional<int> n_max, double tol) {
        const CrossingQuery q = query(u, c, v, t);
        return n_max ? exact_conditional_series(q, {rate_t, rate_y}, *n_max)
                     : exact_conditional_series_auto(q, {rate_t, rate_y}, tol);
    }, py::arg("u"), py::arg("c"), py::arg("v"), py::arg("t"), py::arg("rate_t") = 1.0, py::arg("rate_y") = 1.0,
       py::arg("n_max") = std::nullopt, py::arg("tol") = 1e-13);

    m.def("prob_ruin", &prob_ruin, py::arg("u"), py::arg("c"), py::arg("t"), py::arg("model"),
          py::arg("kernel") = ConditionalKernel::approximation, py::call_guard<py::gil_scoped_release>());

    m.def("simulate_ruin", [](double u, double c, double t, const ModelSpec& model, std::int64_t paths, std::uint64_t seed,
                              std::optional<double> v, int threads) {
        SimConfig cfg;
        cfg.u = u;
        cfg.c = c;
        cfg.t = t;
        cfg.model = model;
        cfg.n_paths = paths;
        cfg.seed = seed;
        cfg.conditioning = v;
        py::gil_scoped_release release;
        return threads > 0 ? simulate_ruin(cfg, threads) : simulate_ruin(cfg);
    }, py::arg("u"), py::arg("c"), py::arg("t"), py::arg("model") = ModelSpec{}, py::arg("paths") = 100000,
       py::arg("seed") = 1, py::arg("v") = std::nullopt, py::arg("threads") = 0);
    m.def("wilson_interval", [](std::int64_t k, std::int64_t n, double z) {
        const auto w = wilson_interval(k, n, z);
        return py::make_tuple(w.lo, w.hi);
    }, py::arg("successes"), py::arg("n"), py::arg("z") = kZ95);

    m.def("sweep_csv", &sweep_csv, py::arg("config_json"), py::arg("threads") = 0,
          "Evaluate a run configuration (JSON text) and return the CSV table.");
    m.def("compare_json", &compare_json, py::arg("config_json"), py::arg("threads") = 0,
          "Run the error-decay study of a configuration and return the JSON report.");
}
