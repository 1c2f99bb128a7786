#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delaygeom/approx.hpp"
#include "delaygeom/mcsim.hpp"

namespace py = pybind11;
using namespace delaygeom;

namespace
{
DelayQuery query(const NetworkParams& params, const CoverageCriterion& criterion)
{
    return DelayQuery{params, criterion, {}};
}
} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Delay metrics of Poisson cellular networks";

    py::class_<NetworkParams>(m, "NetworkParams")
        .def(py::init<>())
        .def_static("defaults", &NetworkParams::defaults)
        .def_readwrite("lambda_bs", &NetworkParams::lambda_bs)
        .def_readwrite("lambda_mt", &NetworkParams::lambda_mt)
        .def_readwrite("alpha", &NetworkParams::alpha)
        .def_readwrite("path_loss_k", &NetworkParams::path_loss_k)
        .def_readwrite("tx_power", &NetworkParams::tx_power)
        .def_readwrite("noise_power", &NetworkParams::noise_power)
        .def("validate", &NetworkParams::validate);

    py::class_<Sir>(m, "Sir")
        .def(py::init([](double gamma) { return Sir{gamma}; }), py::arg("gamma"))
        .def_readwrite("gamma", &Sir::gamma);
    py::class_<Sinr>(m, "Sinr")
        .def(py::init([](double gamma) { return Sinr{gamma}; }), py::arg("gamma"))
        .def_readwrite("gamma", &Sinr::gamma);
    py::class_<SirAsnr>(m, "SirAsnr")
        .def(py::init([](double gamma, double theta) { return SirAsnr{gamma, theta}; }),
             py::arg("gamma"), py::arg("theta"))
        .def_readwrite("gamma", &SirAsnr::gamma)
        .def_readwrite("theta", &SirAsnr::theta);

    m.def("active_probability", &active_probability, py::arg("lambda_bs"), py::arg("lambda_mt"));
    m.def("critical_threshold", &critical_threshold, py::arg("alpha"), py::arg("load"));
    m.def("db_to_linear", &db_to_linear);
    m.def("dbm_to_watt", &dbm_to_watt);
    m.def(
        "conditional_coverage",
        [](double r0, std::vector<double> interferers, const CoverageCriterion& c,
           const NetworkParams& p) {
            NetworkRealization real{r0, std::move(interferers)};
            real.validate();
            return conditional_coverage(real, c, p);
        },
        py::arg("r0"), py::arg("interferers"), py::arg("criterion"), py::arg("params"));

    m.def(
        "hyp2f1", [](double a, Complex b, double c, double z) { return hyp2f1(a, b, c, z); },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));
    m.def("script_f", &script_f, py::arg("k"), py::arg("alpha"), py::arg("gamma"),
          py::arg("load"));
    m.def("regularized_incomplete_beta", &regularized_incomplete_beta, py::arg("x"),
          py::arg("a"), py::arg("b"));

    m.def(
        "local_delay",
        [](const NetworkParams& p, const CoverageCriterion& c, bool general) {
            return local_delay(query(p, c), general ? DelayMethod::general_integral
                                                    : DelayMethod::closed_form)
                .value();
        },
        py::arg("params"), py::arg("criterion"), py::arg("general_integral") = false);
    m.def(
        "f1", [](int tau, const NetworkParams& p, const CoverageCriterion& c) {
            return f1(tau, query(p, c));
        },
        py::arg("tau"), py::arg("params"), py::arg("criterion"));
    m.def(
        "f1_curve", [](int cap, const NetworkParams& p, const CoverageCriterion& c) {
            return f1_curve(cap, query(p, c));
        },
        py::arg("cap"), py::arg("params"), py::arg("criterion"));
    m.def(
        "packet_loss",
        [](const NetworkParams& p, const CoverageCriterion& c) { return packet_loss(query(p, c)); },
        py::arg("params"), py::arg("criterion"));
    m.def(
        "char_fn", [](Complex t, const NetworkParams& p, const CoverageCriterion& c) {
            return char_fn(t, query(p, c));
        },
        py::arg("t"), py::arg("params"), py::arg("criterion"));
    m.def(
        "f2", [](double T, const NetworkParams& p, const CoverageCriterion& c,
                 const std::string& method) {
            auto q = query(p, c);
            if (method == "euler")
                return f2_euler(T, q);
            if (method == "beta")
                return f2_beta(T, beta_shape(q));
            if (method == "exact")
                return f2_gilpelaez(T, q);
            throw py::value_error("method must be exact, euler or beta");
        },
        py::arg("T"), py::arg("params"), py::arg("criterion"), py::arg("method") = "exact");
    m.def(
        "f3", [](double x, int tau, const NetworkParams& p, const CoverageCriterion& c,
                 const std::string& method) {
            auto q = query(p, c);
            if (method == "euler")
                return f3_euler(x, tau, q);
            if (method == "beta")
                return f3_beta(x, tau, beta_shape(q));
            if (method == "exact")
                return f3_gilpelaez(x, tau, q);
            throw py::value_error("method must be exact, euler or beta");
        },
        py::arg("x"), py::arg("tau"), py::arg("params"), py::arg("criterion"),
        py::arg("method") = "exact");
    m.def(
        "f1_riemann", [](int tau, const NetworkParams& p, const CoverageCriterion& c, int n) {
            return f1_riemann(tau, query(p, c), n);
        },
        py::arg("tau"), py::arg("params"), py::arg("criterion"), py::arg("n") = riemann_default_n);
    m.def(
        "beta_shape",
        [](const NetworkParams& p, const CoverageCriterion& c) {
            BetaShape s = beta_shape(query(p, c));
            return py::dict(py::arg("a") = s.a, py::arg("b") = s.b, py::arg("mu") = s.mu,
                            py::arg("nu") = s.nu);
        },
        py::arg("params"), py::arg("criterion"));

    m.def(
        "simulate",
        [](const NetworkParams& p, const CoverageCriterion& c, std::size_t realizations,
           std::uint64_t seed, bool slot_level, std::size_t slots) {
            SimConfig cfg = SimConfig::defaults(p);
            cfg.n_realizations = realizations;
            cfg.master_seed = seed;
            cfg.n_slots = slots;
            cfg.fading_mode = slot_level ? FadingMode::slot_level : FadingMode::semi_analytic;
            CoverageSample s;
            {
                py::gil_scoped_release release;
                s = simulate_coverage(p, c, cfg);
            }
            return py::dict(py::arg("r0") = s.r0, py::arg("n_interferers") = s.n_interferers,
                            py::arg("pcov") = s.pcov);
        },
        py::arg("params"), py::arg("criterion"), py::arg("realizations") = 5000,
        py::arg("seed") = SimConfig{}.master_seed, py::arg("slot_level") = false,
        py::arg("slots") = 5000);
}
