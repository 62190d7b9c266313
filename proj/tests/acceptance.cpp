// acceptance.cpp -- the acceptance gate: convergence-order targets for the
// manufactured studies, the curved-vs-chord comparison, the exact property
// suite, the inf-sup trend, and determinism.  Prints one line per criterion;
// exits nonzero if any fails.  Criteria can be selected by name (c1..c6).
#include "wg/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

using namespace wg;

namespace {

struct Gate {
    bool all_pass = true;
    void report(const std::string& name, bool pass, const std::string& detail)
    {
        std::printf("%s  %-14s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
        std::fflush(stdout);
        all_pass &= pass;
    }
};

using StudyKey = std::tuple<int, int, int, int, int>; // problem, k, kind, straight, levels
std::map<StudyKey, ErrorReport> study_cache;

const ErrorReport& run_study(int problem, int k, MeshKind kind, bool straight, int levels)
{
    StudyKey key{problem, k, int(kind), int(straight), levels};
    auto it = study_cache.find(key);
    if (it != study_cache.end()) return it->second;
    StudyConfig cfg;
    cfg.problem = problem;
    cfg.k = k;
    cfg.kind = kind;
    cfg.straighten = straight;
    cfg.levels = levels;
    cfg.exec = Exec::parallel;
    return study_cache.emplace(key, convergence_study(cfg)).first->second;
}

struct Orders {
    double energy, l2u, l2p;
};
Orders finest(const ErrorReport& rep)
{
    return {rep.energy_order.back(), rep.l2u_order.back(), rep.l2p_order.back()};
}

std::string fmt_orders(const Orders& o)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "orders (%.3f, %.3f, %.3f)", o.energy, o.l2u, o.l2p);
    return buf;
}

bool within(const Orders& o, int k, double tol)
{
    return std::abs(o.energy - k) <= tol && std::abs(o.l2u - (k + 1)) <= tol &&
           std::abs(o.l2p - k) <= tol;
}

void criterion1(Gate& gate)
{
    for (int k = 1; k <= 3; ++k) {
        Orders o = finest(run_study(1, k, MeshKind::tri, false, 4));
        char name[32];
        std::snprintf(name, sizeof name, "crit-1 k=%d", k);
        char detail[160];
        std::snprintf(detail, sizeof detail,
                      "problem 1, curved tri: %s vs (%d, %d, %d) +-0.3", fmt_orders(o).c_str(),
                      k, k + 1, k);
        gate.report(name, within(o, k, 0.3), detail);
    }
}

void criterion2(Gate& gate)
{
    Orders curved = finest(run_study(1, 3, MeshKind::tri, false, 4));
    Orders straight = finest(run_study(1, 3, MeshKind::tri, true, 4));
    double gap = curved.l2u - straight.l2u;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "k=3 velocity L2 order: curved %.3f vs chord %.3f, gap %.3f >= 1.0",
                  curved.l2u, straight.l2u, gap);
    gate.report("crit-2", gap >= 1.0, detail);
}

void criterion3(Gate& gate)
{
    for (int k = 1; k <= 3; ++k) {
        // the coefficient-jump problem leaves its pre-asymptotic band late at
        // k = 1; one extra halving reaches the settled orders
        int levels = (k == 1) ? 5 : 4;
        for (MeshKind kind : {MeshKind::tri, MeshKind::quad}) {
            Orders o = finest(run_study(3, k, kind, false, levels));
            char name[32];
            std::snprintf(name, sizeof name, "crit-3 k=%d %s", k,
                          kind == MeshKind::tri ? "tri" : "quad");
            char detail[160];
            std::snprintf(detail, sizeof detail, "problem 3: %s vs (%d, %d, %d) +-0.35",
                          fmt_orders(o).c_str(), k, k + 1, k);
            gate.report(name, within(o, k, 0.35), detail);
        }
    }
}

void criterion4(Gate& gate)
{
    auto results = run_property_suite(7, Exec::parallel);
    for (const CheckResult& r : results) {
        char detail[200];
        std::snprintf(detail, sizeof detail, "%s: worst %.3e vs %.0e  (%s)", r.name.c_str(),
                      r.worst, r.tol, r.detail.c_str());
        gate.report("crit-4", r.pass, detail);
    }

    if (study_cache.empty()) {
        run_study(1, 2, MeshKind::tri, false, 3);
        run_study(3, 1, MeshKind::tri, false, 3);
    }
    double worst = 0.0;
    int rows = 0;
    for (const auto& [key, rep] : study_cache)
        for (const ErrorRow& r : rep.rows) {
            worst = std::max(worst, r.div_residual);
            ++rows;
        }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "divergence residual over %d solved studies: worst %.3e < 1e-10", rows,
                  worst);
    gate.report("crit-4", worst < 1e-10, detail);
}

void criterion5(Gate& gate)
{
    ManufacturedProblem prob = make_problem(1);
    for (int k = 1; k <= 2; ++k) {
        std::vector<double> betas;
        for (int n = 1; n <= 3; ++n) {
            InterfaceMesh mesh = build_problem_mesh(prob, n, MeshKind::tri);
            MeshContext ctx = build_context(mesh, SchemeOptions{k}, Exec::parallel);
            SaddlePointSystem sys = assemble(ctx, prob.data(), Exec::parallel);
            betas.push_back(infsup_probe(sys));
        }
        bool ok = true;
        for (size_t i = 1; i < betas.size(); ++i) ok &= betas[i] > 0.8 * betas[i - 1];
        char name[32], detail[160];
        std::snprintf(name, sizeof name, "crit-5 k=%d", k);
        std::snprintf(detail, sizeof detail,
                      "inf-sup beta_h = %.4f, %.4f, %.4f; per-level decrease < 20%%",
                      betas[0], betas[1], betas[2]);
        gate.report(name, ok, detail);
    }
}

void criterion6(Gate& gate)
{
    ManufacturedProblem prob = make_problem(1);
    InterfaceMesh mesh = build_problem_mesh(prob, 1, MeshKind::tri);
    MeshContext cs = build_context(mesh, SchemeOptions{2}, Exec::serial);
    MeshContext cp = build_context(mesh, SchemeOptions{2}, Exec::parallel);
    SaddlePointSystem s1 = assemble(cs, prob.data(), Exec::serial);
    SaddlePointSystem s2 = assemble(cp, prob.data(), Exec::parallel);
    SaddlePointSystem s3 = assemble(cs, prob.data(), Exec::serial);

    auto identical = [](const SpMat& a, const SpMat& b) {
        if (a.nonZeros() != b.nonZeros()) return false;
        return std::memcmp(a.valuePtr(), b.valuePtr(), a.nonZeros() * sizeof(double)) == 0;
    };
    bool det_assembly = identical(s1.K, s2.K) && identical(s1.K, s3.K) &&
                        (s1.rhs - s2.rhs).cwiseAbs().maxCoeff() == 0.0;
    gate.report("crit-6", det_assembly,
                "assembly bit-identical across repeats and worker policies");

    WGSolution u1 = solve(s1);
    WGSolution u2 = solve(s2);
    bool det_solve = (u1.u - u2.u).cwiseAbs().maxCoeff() == 0.0 &&
                     (u1.p - u2.p).cwiseAbs().maxCoeff() == 0.0;
    gate.report("crit-6", det_solve, "solutions bit-identical across repeated solves");

    StudyConfig cfg;
    cfg.problem = 1;
    cfg.k = 1;
    cfg.levels = 2;
    std::string csv1 = convergence_study(cfg).csv();
    cfg.exec = Exec::parallel;
    std::string csv2 = convergence_study(cfg).csv();
    gate.report("crit-6", csv1 == csv2, "study CSV byte-identical across runs");
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> wanted(argv + 1, argv + argc);
    auto selected = [&wanted](const char* name) {
        return wanted.empty() ||
               std::find(wanted.begin(), wanted.end(), name) != wanted.end();
    };

    Gate gate;
    try {
        if (selected("c1")) criterion1(gate);
        if (selected("c2")) criterion2(gate);
        if (selected("c3")) criterion3(gate);
        if (selected("c4")) criterion4(gate);
        if (selected("c5")) criterion5(gate);
        if (selected("c6")) criterion6(gate);
    } catch (const std::exception& ex) {
        std::printf("FAIL  exception: %s\n", ex.what());
        return 1;
    }
    std::printf("%s\n", gate.all_pass ? "ACCEPTANCE: all criteria passed"
                                      : "ACCEPTANCE: FAILURES present");
    return gate.all_pass ? 0 : 1;
}
