// Thin pybind11 layer. Structured values cross the boundary as JSON text;
// the Python package converts them to dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "failsafe/error.hpp"
#include "failsafe/fitlab.hpp"
#include "failsafe/io.hpp"
#include "failsafe/mcsim.hpp"
#include "failsafe/ordering.hpp"
#include "failsafe/preorders.hpp"
#include "failsafe/systems.hpp"

namespace py = pybind11;
using namespace failsafe;

namespace {

SystemSpec system_of(const std::string& text) {
    auto s = io::system_from_json(io::parse_json(text, "system"));
    s.validate();
    return s;
}

std::string verify(const std::string& theorem, const std::string& x, const std::string& y) {
    const auto sx = system_of(x);
    const auto sy = system_of(y);
    ConditionReport r;
    if (theorem == "t1") r = verify_theorem1(sx, sy);
    else if (theorem == "t2") r = verify_theorem2(sx, sy);
    else if (theorem == "p-mphrs") r = verify_prop_mphrs(sx, sy);
    else if (theorem == "p-ls") r = verify_prop_ls(sx, sy);
    else throw ValidationError("unknown theorem: " + theorem);
    return io::to_json(r).dump();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Second-smallest lifetime of dependent heterogeneous components";

    auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", validation.ptr());
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<InconsistencyError>(m, "InconsistencyError", PyExc_RuntimeError);

    m.def("classify", [](const std::vector<double>& a, const std::vector<double>& b, double tol) {
        return io::to_json(preorders::classify(a, b, tol)).dump();
    }, py::arg("a"), py::arg("b"), py::arg("tol") = preorders::kDefaultTol);

    m.def("psi", [](const std::string& gen, double t) {
        return io::generator_from_json(io::parse_json(gen, "generator")).psi(t);
    });

    m.def("survival", [](const std::string& sys, const std::vector<double>& xs) {
        return failsafe::curve(system_of(sys), xs).values;
    });

    m.def("verify", &verify, py::arg("theorem"), py::arg("x"), py::arg("y"));

    m.def("simulate_second_smallest", [](const std::string& sys, std::size_t count, std::uint64_t seed) {
        return second_smallest(sample_lifetimes(system_of(sys), count, seed));
    });

    m.def("mle_fit", [](const std::string& family, const std::vector<double>& data) {
        return io::to_json(fitlab::mle_fit(fitlab::fit_family_from_string(family), data)).dump();
    });

    m.def("kendall_tau", [](const std::vector<double>& x, const std::vector<double>& y) {
        return fitlab::kendall_tau(x, y);
    });
}
