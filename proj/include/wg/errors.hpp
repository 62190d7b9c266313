// errors.hpp -- exception types thrown by the meshing/assembly/solve pipeline.
#pragma once

#include <stdexcept>
#include <string>

namespace wg {

struct CellCutTwice : std::runtime_error {
    int cell_id;
    explicit CellCutTwice(int cell, const std::string& what)
        : std::runtime_error("CellCutTwice: cell " + std::to_string(cell) + ": " + what)
        , cell_id(cell) {}
};

struct DegenerateCut : std::runtime_error {
    int cell_id;
    explicit DegenerateCut(int cell, const std::string& what)
        : std::runtime_error("DegenerateCut: cell " + std::to_string(cell) + ": " + what)
        , cell_id(cell) {}
};

struct NonPositiveJacobian : std::runtime_error {
    int cell_id;
    double xi, eta;
    NonPositiveJacobian(int cell, double xi_, double eta_)
        : std::runtime_error("NonPositiveJacobian: cell " + std::to_string(cell) +
                             " at reference point (" + std::to_string(xi_) + ", " +
                             std::to_string(eta_) + ")")
        , cell_id(cell), xi(xi_), eta(eta_) {}
};

struct SingularMass : std::runtime_error {
    explicit SingularMass(const std::string& what)
        : std::runtime_error("SingularMass: " + what) {}
};

struct InconsistentConstraint : std::runtime_error {
    int dof;
    InconsistentConstraint(int dof_, double a, double b)
        : std::runtime_error("InconsistentConstraint: dof " + std::to_string(dof_) +
                             " constrained to both " + std::to_string(a) + " and " +
                             std::to_string(b))
        , dof(dof_) {}
};

struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what)
        : std::runtime_error("SingularSystem: " + what) {}
};

struct DerivativeMismatch : std::runtime_error {
    explicit DerivativeMismatch(const std::string& what)
        : std::runtime_error("DerivativeMismatch: " + what) {}
};

} // namespace wg
