// wg.cpp -- command-line driver: convergence studies, the property suite,
// inf-sup probes and mesh dumps.
#include "wg/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

void apply_thread_cap()
{
#ifdef _OPENMP
    if (const char* env = std::getenv("WG_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

void print_report(const wg::ErrorReport& rep)
{
    std::printf("%3s %12s %12s %7s %12s %7s %12s %7s %12s\n", "n", "h", "energy", "order",
                "l2_u", "order", "l2_p", "order", "l2_p_raw");
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        const wg::ErrorRow& r = rep.rows[i];
        auto ord = [&](const std::vector<double>& o) {
            if (i == 0) return std::string("   --");
            char b[16];
            std::snprintf(b, sizeof b, "%7.3f", o[i - 1]);
            return std::string(b);
        };
        std::printf("%3d %12.4e %12.4e %s %12.4e %s %12.4e %s %12.4e\n", r.n, r.h, r.energy,
                    ord(rep.energy_order).c_str(), r.l2u, ord(rep.l2u_order).c_str(), r.l2p,
                    ord(rep.l2p_order).c_str(), r.l2p_raw);
    }
}

} // namespace

int main(int argc, char** argv)
{
    apply_thread_cap();
    CLI::App app{"weak Galerkin solver for two-phase Stokes interface problems"};
    app.require_subcommand(1);

    int problem = 1, k = 1, levels = 4, level = 1, quad_exactness = 0;
    unsigned long long seed = 1;
    std::string mesh_kind = "tri", out;
    bool straighten = false;

    auto add_common = [&](CLI::App* cmd, bool with_levels) {
        cmd->add_option("--problem", problem, "test problem id")->check(CLI::Range(1, 3));
        cmd->add_option("--k", k, "polynomial degree")->check(CLI::Range(1, 3));
        if (with_levels)
            cmd->add_option("--levels", levels, "refinement levels")->check(CLI::Range(1, 8));
        cmd->add_option("--mesh", mesh_kind, "mesh kind")
            ->check(CLI::IsMember({"tri", "quad"}));
    };

    CLI::App* study = app.add_subcommand("study", "manufactured-solution convergence study");
    add_common(study, true);
    study->add_flag("--straighten", straighten, "replace interface arcs by chords");
    study->add_option("--quad-exactness", quad_exactness, "quadrature exactness override");
    study->add_option("--out", out, "output CSV path");

    CLI::App* patch = app.add_subcommand("patch", "polynomial patch test");
    patch->add_option("--k", k, "polynomial degree")->check(CLI::Range(1, 3));
    patch->add_option("--mesh", mesh_kind, "mesh kind")->check(CLI::IsMember({"tri", "quad"}));

    CLI::App* infsup = app.add_subcommand("infsup", "discrete inf-sup probe over refinements");
    add_common(infsup, true);

    CLI::App* dump = app.add_subcommand("mesh-dump", "write the fitted mesh as WGMESH 1");
    add_common(dump, false);
    dump->add_option("--n", level, "refinement level")->check(CLI::Range(0, 8));
    dump->add_flag("--straighten", straighten, "replace interface arcs by chords");
    dump->add_option("--out", out, "output path")->required();

    CLI::App* check = app.add_subcommand("check", "run the full property suite");
    check->add_option("--seed", seed, "seed for randomized property tests");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        wg::MeshKind kind = (mesh_kind == "quad") ? wg::MeshKind::quad : wg::MeshKind::tri;
        if (study->parsed()) {
            wg::StudyConfig cfg;
            cfg.problem = problem;
            cfg.k = k;
            cfg.levels = levels;
            cfg.kind = kind;
            cfg.straighten = straighten;
            cfg.quad_exactness = quad_exactness;
            cfg.exec = wg::Exec::parallel;
            wg::ErrorReport rep = wg::convergence_study(cfg);
            print_report(rep);
            double dres = 0.0;
            for (const auto& r : rep.rows) dres = std::max(dres, r.div_residual);
            std::printf("max divergence residual: %.3e\n", dres);
            if (out.empty()) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "study_p%d_k%d_%s%s.csv", problem, k,
                              mesh_kind.c_str(), straighten ? "_straight" : "");
                out = buf;
            }
            wg::write_file(out, rep.csv());
            std::printf("wrote %s\n", out.c_str());
        } else if (patch->parsed()) {
            wg::PatchResult r = wg::patch_test(k, kind);
            std::printf("patch k=%d: energy %.3e  l2_u %.3e  l2_p %.3e  -> %s\n", k, r.energy,
                        r.l2u, r.l2p, r.pass() ? "pass" : "FAIL");
            if (!r.pass()) return 1;
        } else if (infsup->parsed()) {
            wg::ManufacturedProblem prob = wg::make_problem(problem);
            double prev = 0.0;
            bool ok = true;
            for (int n = 1; n <= levels; ++n) {
                wg::InterfaceMesh mesh = wg::build_problem_mesh(prob, n, kind);
                wg::MeshContext ctx = wg::build_context(mesh, wg::SchemeOptions{k},
                                                        wg::Exec::parallel);
                wg::SaddlePointSystem sys = wg::assemble(ctx, prob.data(), wg::Exec::parallel);
                double beta = wg::infsup_probe(sys);
                if (n == 1)
                    std::printf("n=%d  beta_h = %.6f\n", n, beta);
                else {
                    std::printf("n=%d  beta_h = %.6f  ratio %.4f\n", n, beta, beta / prev);
                    ok = ok && (beta / prev > 0.8);
                }
                prev = beta;
            }
            std::printf("inf-sup trend: %s\n", ok ? "stable" : "DEGRADING");
            if (!ok) return 1;
        } else if (dump->parsed()) {
            wg::ManufacturedProblem prob = wg::make_problem(problem);
            wg::InterfaceMesh mesh = wg::build_problem_mesh(prob, level, kind, straighten);
            wg::save_mesh(mesh, out);
            std::printf("wrote %s (%zu cells, %zu edges)\n", out.c_str(), mesh.cells.size(),
                        mesh.edges.size());
        } else if (check->parsed()) {
            auto results = wg::run_property_suite(seed, wg::Exec::parallel);
            bool all = true;
            for (const auto& r : results) {
                std::printf("%-32s %s  worst %.3e%s%s\n", r.name.c_str(),
                            r.pass ? "PASS" : "FAIL", r.worst,
                            r.detail.empty() ? "" : "  -- ", r.detail.c_str());
                all = all && r.pass;
            }
            if (!all) return 1;
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
