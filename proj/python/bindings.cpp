#include <pybind11/pybind11.h>

namespace py = pybind11;

PYBIND11_MODULE(_dbarh, m) {
    m.doc() = "anti-derivative operators and dbar homotopy solver (core bindings)";
}
