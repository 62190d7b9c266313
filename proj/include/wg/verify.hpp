// verify.hpp -- manufactured-solution studies: projections of exact fields,
// energy/L2 errors, convergence reports, the patch test, an inf-sup probe,
// and the boundary-functional evaluators used by the consistency check.
#pragma once

#include "wg/problems.hpp"
#include "wg/solver.hpp"

#include <optional>
#include <string>

namespace wg {

struct ErrorRow {
    int n = 0;
    double h = 0.0;
    double energy = 0.0;
    double l2u = 0.0;
    double l2p = 0.0;     // mean-shifted pressure error (used for rates)
    double l2p_raw = 0.0; // unshifted, reported alongside
    double div_residual = 0.0;
    int n_dofs = 0;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
    // observed orders between consecutive rows: log(e_i/e_{i+1}) / log(h_i/h_{i+1})
    std::vector<double> energy_order, l2u_order, l2p_order;

    void compute_orders();
    std::string csv() const; // schema: n,h,energy_err,energy_order,l2u_err,...
};

struct StudyConfig {
    int problem = 1;
    int k = 1;
    int levels = 4;
    MeshKind kind = MeshKind::tri;
    bool straighten = false; // chord-approximate the interface (comparison mesh)
    int quad_exactness = 0;  // 0: scheme default 2k+2
    Exec exec = Exec::serial;
};

// Level n of a study uses background refinement n (mesh 4*2^n cells per side).
InterfaceMesh build_problem_mesh(const ManufacturedProblem& prob, int n, MeshKind kind,
                                 bool straighten = false);

// Q_h u of the exact velocity: interior Q_0 per cell, Q_b per trace slot with
// the slot's own side of the interface.
VectorXd project_exact_velocity(const MeshContext& ctx, const DofMap& dofs,
                                const ManufacturedProblem& prob);
// Scalar projection of the exact pressure per cell.
VectorXd project_exact_pressure(const MeshContext& ctx, const DofMap& dofs,
                                const ManufacturedProblem& prob);
// Mean of the exact pressure over the mesh (by quadrature).
double pressure_mean(const MeshContext& ctx, const ManufacturedProblem& prob);

double energy_norm(const SaddlePointSystem& sys, const VectorXd& u_full);
double energy_error(const MeshContext& ctx, const SaddlePointSystem& sys,
                    const WGSolution& sol, const ManufacturedProblem& prob);

struct L2Errors {
    double u = 0.0;
    double p_raw = 0.0;
    double p_shifted = 0.0;
};
L2Errors l2_errors(const MeshContext& ctx, const SaddlePointSystem& sys,
                   const WGSolution& sol, const ManufacturedProblem& prob);

ErrorReport convergence_study(const StudyConfig& cfg);

// Patch test: on an unfitted straight mesh with polynomial data (u in [P_k]^2
// divergence-free, p in P_{k-1}) the scheme reproduces Q_h u and Q_h p.
struct PatchResult {
    double energy = 0.0, l2u = 0.0, l2p = 0.0;
    bool pass(double tol = 1e-9) const { return energy < tol && l2u < tol && l2p < tol; }
};
PatchResult patch_test(int k, MeshKind kind = MeshKind::tri, int n = 1);

// Smallest generalized singular value of the pressure coupling measured in the
// a_s metric, via inverse iteration on the Schur complement through the
// factored KKT system.
double infsup_probe(const SaddlePointSystem& sys, int max_iter = 500, double tol = 1e-9);

// ---- boundary functionals of the error equation ------------------------
// v_full / q are coefficient vectors over the full (unreduced) DOF sets.
double ell1(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& v_full);
double ell2(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& v_full);
double ell3(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& v_full);
double ell4(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& q);
// s(u_full, v_full) alone (the stabilizer part of a_s).
double stabilizer_form(const MeshContext& ctx, const ProblemData& data,
                       const VectorXd& u_full, const VectorXd& v_full);

// ---- property suite -----------------------------------------------------
struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0; // worst observed defect (or the deciding quantity)
    double tol = 0.0;
    std::string detail;
};

std::vector<CheckResult> run_property_suite(unsigned long long seed, Exec exec = Exec::serial);

void write_file(const std::string& path, const std::string& contents);

} // namespace wg
