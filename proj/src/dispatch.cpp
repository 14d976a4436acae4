#include "twowell/dispatch.hpp"

#include "twowell/analysis.hpp"
#include "twowell/errors.hpp"
#include "twowell/fixtures.hpp"
#include "twowell/gridperturb.hpp"
#include "twowell/io.hpp"
#include "twowell/spin.hpp"
#include "twowell/verify.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>

namespace twowell {

namespace {

json mat_json(const Eigen::Matrix2d& M) {
    return json::array({json::array({M(0, 0), M(0, 1)}), json::array({M(1, 0), M(1, 1)})});
}

Density density_kind(const std::string& name) {
    if (name == "tilde") return Density::Tilde;
    if (name == "one_well") return Density::OneWell;
    return Density::Truncated;
}

LayerKind layer_kind(const std::string& name) {
    if (name == "b_plus") return LayerKind::BPlus;
    if (name == "b_minus") return LayerKind::BMinus;
    if (name == "c_plus") return LayerKind::CPlus;
    if (name == "c_minus") return LayerKind::CMinus;
    throw ConfigError("kind must be one of b_plus|b_minus|c_plus|c_minus");
}

MinimizeOptions solver_options(const RunConfig& cfg) {
    MinimizeOptions o;
    o.max_iters = cfg.max_iters;
    o.grad_tol = cfg.grad_tol;
    o.step0 = cfg.step0;
    o.seed = cfg.seed;
    o.method = cfg.method == "gd" ? Method::GradientDescent : Method::QuasiNewton;
    return o;
}

// Study commands default to the staged relaxation schedule with bounded
// budgets; explicit flags still win.
MinimizeOptions study_options(const RunConfig& cfg, const WellSystem& w, int n) {
    MinimizeOptions o = relaxation_options(n, w);
    o.stage_max_iters = 300;
    o.max_iters = cfg.max_iters >= 0 ? cfg.max_iters : 2000;
    if (cfg.grad_tol >= 0.0) o.grad_tol = cfg.grad_tol;
    if (cfg.step0 >= 0.0) o.step0 = cfg.step0;
    o.seed = cfg.seed;
    o.method = cfg.method == "gd" ? Method::GradientDescent : Method::QuasiNewton;
    return o;
}

// Generic plot helper consuming only the CSV artifacts of the run.
std::string plot_script(const std::vector<std::pair<std::string, std::string>>& panels) {
    std::string s = "#!/usr/bin/env python3\n"
                    "# Plots the CSV artifacts next to this script.\n"
                    "import csv\n"
                    "import os\n"
                    "import matplotlib.pyplot as plt\n\n"
                    "here = os.path.dirname(os.path.abspath(__file__))\n\n"
                    "def read(name):\n"
                    "    with open(os.path.join(here, name)) as f:\n"
                    "        rows = list(csv.DictReader(f))\n"
                    "    return rows\n\n";
    s += "panels = [\n";
    for (const auto& [file, ycol] : panels)
        s += "    (\"" + file + "\", \"" + ycol + "\"),\n";
    s += "]\n"
         "fig, axes = plt.subplots(1, len(panels), figsize=(6 * len(panels), 4), squeeze=False)\n"
         "for ax, (name, ycol) in zip(axes[0], panels):\n"
         "    rows = read(name)\n"
         "    xcol = [c for c in rows[0] if c not in (ycol,)][0] if rows else 'x'\n"
         "    xs = list(range(len(rows)))\n"
         "    ys = [float(r[ycol]) for r in rows]\n"
         "    ax.plot(xs, ys, marker='o')\n"
         "    ax.set_title(name + ' : ' + ycol)\n"
         "    ax.set_xlabel('row')\n"
         "    ax.set_ylabel(ycol)\n"
         "fig.tight_layout()\n"
         "fig.savefig(os.path.join(here, 'plots.png'), dpi=150)\n"
         "print('wrote plots.png')\n";
    return s;
}

Deformation input_deformation(const RunConfig& cfg, const WellSystem& w) {
    if (!cfg.input.empty()) return load_deformation(cfg.input);
    auto dom = std::make_shared<LatticeDomain>(build_domain(cfg.d, cfg.l, cfg.sign, cfg.n));
    if (cfg.init == "affine") {
        Eigen::Matrix2d F;
        if (cfg.init_f == "u0")
            F = make_wells(cfg.a).U0;
        else if (cfg.init_f == "qu1")
            F = w.Q * w.U1;
        else if (cfg.init_f == "identity")
            F = Eigen::Matrix2d::Identity();
        else if (cfg.init_f == "flambda")
            F = cfg.sign > 0 ? w.f_lambda(cfg.lambda) : w.f_lambda_minus(cfg.lambda);
        else
            throw ConfigError("init_f must be one of u0|qu1|flambda|identity");
        return init_affine(dom, w, F, cfg.lambda);
    }
    if (cfg.init == "profile") {
        auto [V1, V2] = rank_one_pair(w, cfg.lamsign);
        return init_profile(dom, w, V1, V2, cfg.lamsign, cfg.lambda);
    }
    if (cfg.init == "laminate") {
        auto [V1, V2] = rank_one_pair(w, cfg.lamsign);
        LaminateSpec spec;
        spec.sign = cfg.lamsign;
        spec.offsets = cfg.interfaces;
        for (size_t k = 0; k <= cfg.interfaces.size(); ++k)
            spec.gradients.push_back(k % 2 == 0 ? V1 : V2);
        return init_laminate(dom, w, spec, cfg.lambda);
    }
    if (cfg.init == "perturbed") {
        Eigen::Matrix2d F = cfg.sign > 0 ? w.f_lambda(cfg.lambda) : w.f_lambda_minus(cfg.lambda);
        return init_perturbed(init_affine(dom, w, F, cfg.lambda), cfg.amplitude, cfg.seed);
    }
    throw ConfigError("init must be one of affine|profile|laminate|perturbed");
}

RunMeta meta_of(const RunConfig& cfg, const Fixtures* fx = nullptr) {
    RunMeta m;
    m.n = cfg.n;
    m.a = cfg.a;
    m.lambda = cfg.lambda;
    m.seed = cfg.seed;
    if (fx) m.fixture_version = fixture_version_string(*fx);
    return m;
}

int run_command(const RunConfig& cfg, Manifest& man, std::ostream& out) {
    WellSystem w = make_wells(cfg.a);

    if (cfg.command == "wells") {
        json j{{"a", w.a},          {"b", w.b},
               {"cbar", w.cbar},    {"U0", mat_json(w.U0)},
               {"U1", mat_json(w.U1)}, {"Q", mat_json(w.Q)},
               {"Qtilde", mat_json(w.Qtilde)}, {"lambda", cfg.lambda},
               {"F_lambda", mat_json(w.f_lambda(cfg.lambda))}};
        man.emit(cfg.out, "wells.json", j.dump(2) + "\n");
        out << j.dump(2) << "\n";
        return 0;
    }

    if (cfg.command == "energy" || cfg.command == "export") {
        Deformation def = input_deformation(cfg, w);
        RunMeta meta = meta_of(cfg);
        meta.n = def.domain->n();
        meta.lambda = def.lambda;
        EnergyReport rep = hamiltonian(def, w, density_kind(cfg.density));
        man.emit(cfg.out, "energy.csv", energy_report_csv(rep, *def.domain, meta));
        man.emit(cfg.out, "energy.json", energy_report_summary(rep, meta).dump(2) + "\n");
        if (cfg.command == "export") {
            EnergyReport trep = hamiltonian(def, w, Density::Truncated);
            SpinField sf = spin_field(def, w, trep);
            man.emit(cfg.out, "spin.csv", spin_field_csv(sf, meta));
            man.emit(cfg.out, "spin.json", spin_field_summary(sf, meta).dump(2) + "\n");
        }
        out << "total " << fmt_g17(rep.total) << " rescaled " << fmt_g17(rep.rescaled) << "\n";
        return 0;
    }

    if (cfg.command == "minimize") {
        Deformation def = input_deformation(cfg, w);
        MinimizeResult res = minimize(def, w, density_kind(cfg.density), solver_options(cfg));
        std::ostringstream ckpt;
        save_deformation(res.final, ckpt);
        man.emit(cfg.out, "final.def", ckpt.str());
        CsvTable trace({"iter", "energy"});
        for (size_t k = 0; k < res.energy_trace.size(); ++k)
            trace.add_row({std::to_string(k), fmt_g17(res.energy_trace[k])});
        man.emit(cfg.out, "trace.csv", trace.str());
        InterfaceSummary is = interface_extract(res.final, w, cfg.tol * w.cbar);
        CsvTable pts({"segment", "px", "py"});
        for (size_t si = 0; si < is.segments.size(); ++si)
            for (const auto& p : is.segments[si].points)
                pts.add_row({std::to_string(si), fmt_g17(p.x()), fmt_g17(p.y())});
        man.emit(cfg.out, "interfaces.csv", pts.str());
        json j{{"iterations", res.iterations},
               {"energy", res.energy_trace.back()},
               {"rescaled", def.domain->n() * res.energy_trace.back()},
               {"termination", int(res.termination)},
               {"admissible", res.admissible},
               {"n", def.domain->n()},
               {"a", cfg.a},
               {"lambda", def.lambda},
               {"seed", cfg.seed},
               {"options",
                {{"method", cfg.method},
                 {"max_iters", cfg.max_iters},
                 {"grad_tol", cfg.grad_tol},
                 {"step0", cfg.step0}}}};
        man.emit(cfg.out, "minimize.json", j.dump(2) + "\n");
        out << "energy " << fmt_g17(res.energy_trace.back()) << " iterations " << res.iterations
            << "\n";
        return 0;
    }

    if (cfg.command == "layer") {
        std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{16, 32} : cfg.n_list;
        LayerKind kind = layer_kind(cfg.kind);
        int sign = cfg.kind == "c_minus" ? -1 : +1;
        if (cfg.kind == "c_plus") sign = +1;
        auto [V1, V2] = rank_one_pair(w, sign);
        Eigen::Matrix2d A = V1, B = V2;
        if (kind == LayerKind::BPlus) A = w.f_lambda(cfg.lambda), B = V1;
        if (kind == LayerKind::BMinus) A = V1, B = w.f_lambda(cfg.lambda);
        if (kind == LayerKind::BPlus || kind == LayerKind::BMinus) sign = +1;
        LayerEnergyEstimate est = estimate_layer_energy(
            w, kind, A, B, sign, cfg.m1, cfg.m2, ns, study_options(cfg, w, ns.back()), cfg.lambda);
        CsvTable t({"n", "a", "lambda", "seed", "m1", "m2", "kind", "estimate", "residual"});
        for (auto [n, e] : est.per_n)
            t.add_row({std::to_string(n), fmt_g17(cfg.a), fmt_g17(cfg.lambda),
                       std::to_string(cfg.seed), fmt_g17(cfg.m1), fmt_g17(cfg.m2), cfg.kind,
                       fmt_g17(e), fmt_g17(est.fit_residual)});
        man.emit(cfg.out, "layer.csv", t.str());
        json j{{"kind", cfg.kind}, {"extrapolated", est.extrapolated},
               {"fit_residual", est.fit_residual}, {"all_converged", est.all_converged},
               {"a", cfg.a},       {"lambda", cfg.lambda}};
        man.emit(cfg.out, "layer.json", j.dump(2) + "\n");
        man.emit(cfg.out, "plot.py", plot_script({{"layer.csv", "estimate"}}));
        out << "extrapolated " << fmt_g17(est.extrapolated) << "\n";
        return 0;
    }

    if (cfg.command == "scaling") {
        int sign = cfg.kind == "c_plus" ? +1 : -1;
        auto [V1, V2] = rank_one_pair(w, sign);
        ScalingReport rep = scaling_study(w, V1, V2, sign, cfg.m1_list, cfg.m2_list, cfg.n,
                                          study_options(cfg, w, cfg.n));
        CsvTable t({"n", "a", "lambda", "seed", "m1", "m2", "estimate"});
        for (const ScalingCell& c : rep.cells)
            t.add_row({std::to_string(cfg.n), fmt_g17(cfg.a), fmt_g17(cfg.lambda),
                       std::to_string(cfg.seed), fmt_g17(c.m1), fmt_g17(c.m2),
                       fmt_g17(c.estimate)});
        man.emit(cfg.out, "scaling.csv", t.str());
        man.emit(cfg.out, "plot.py", plot_script({{"scaling.csv", "estimate"}}));
        json j{{"m1_spread", rep.m1_spread},
               {"m2_ratio", rep.m2_ratio},
               {"m1_invariance_ok", rep.m1_invariance_ok},
               {"m2_linearity_ok", rep.m2_linearity_ok}};
        man.emit(cfg.out, "scaling.json", j.dump(2) + "\n");
        out << j.dump(2) << "\n";
        return 0;
    }

    if (cfg.command == "surface-scaling") {
        std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{16, 32} : cfg.n_list;
        SurfaceScalingReport rep = surface_scaling_study(w, cfg.lambda, ns, cfg.restarts, cfg.seed,
                                                         cfg.amplitude,
                                                         study_options(cfg, w, ns.back()));
        CsvTable t({"n", "a", "lambda", "seed", "best_rescaled"});
        for (const auto& row : rep.rows)
            t.add_row({std::to_string(row.n), fmt_g17(cfg.a), fmt_g17(cfg.lambda),
                       std::to_string(cfg.seed), fmt_g17(row.best)});
        man.emit(cfg.out, "surface_scaling.csv", t.str());
        man.emit(cfg.out, "plot.py", plot_script({{"surface_scaling.csv", "best_rescaled"}}));
        json j{{"max_over_min", rep.max_over_min}, {"bounded", rep.bounded}};
        man.emit(cfg.out, "surface_scaling.json", j.dump(2) + "\n");
        out << j.dump(2) << "\n";
        return 0;
    }

    if (cfg.command == "spin") {
        Deformation def = input_deformation(cfg, w);
        RunMeta meta = meta_of(cfg);
        meta.n = def.domain->n();
        meta.lambda = def.lambda;
        EnergyReport rep = hamiltonian(def, w, Density::Truncated);
        SpinField sf = spin_field(def, w, rep);
        ComparisonRecord cmp = comparison_check(def, w);
        man.emit(cfg.out, "spin.csv", spin_field_csv(sf, meta));
        json j = spin_field_summary(sf, meta);
        j["edge_mechanism_ok"] = cmp.edge_mechanism_ok;
        j["comparison_ratio"] = cmp.mismatch_count > 0 ? cmp.ratio : 0.0;
        man.emit(cfg.out, "spin.json", j.dump(2) + "\n");
        out << "h_spin " << fmt_g17(sf.h_spin) << " mismatches " << sf.mismatch_edges.size()
            << "\n";
        return cmp.edge_mechanism_ok ? 0 : 1;
    }

    if (cfg.command == "coarea") {
        Deformation def = input_deformation(cfg, w);
        ScalarLatticeField f{def.domain, {}};
        EnergyReport rep = hamiltonian(def, w, Density::Truncated);
        if (cfg.init_f == "dist" || cfg.density == "dist")
            f.values = rep.dist_wells;
        else
            f.values = rep.site_density;
        CoareaRecord rec = coarea_check(f);
        json j{{"lhs", rec.lhs}, {"rhs", rec.rhs}, {"ratio", rec.ratio}};
        man.emit(cfg.out, "coarea.json", j.dump(2) + "\n");
        out << j.dump(2) << "\n";
        return 0;
    }

    if (cfg.command == "rigidity") {
        Deformation def = input_deformation(cfg, w);
        RigiditySample rs =
            rigidity_sample(def, w, {cfg.x0[0], cfg.x0[1]}, {cfg.y0[0], cfg.y0[1]}, cfg.alpha,
                            cfg.samples, cfg.seed);
        double c = 0.0;
        std::string fxver;
        if (!cfg.fixtures.empty()) {
            Fixtures fx = load_fixtures(cfg.fixtures);
            c = fx.rigidity_c;
            fxver = fixture_version_string(fx);
        }
        CsvTable t({"sample", "ratio"});
        for (size_t k = 0; k < rs.ratios.size(); ++k)
            t.add_row({std::to_string(k), fmt_g17(rs.ratios[k])});
        man.emit(cfg.out, "rigidity_ratios.csv", t.str());
        json j{{"eta", rs.eta},
               {"mu", rs.mu},
               {"samples", rs.ratios.size()},
               {"fixture", fxver.empty() ? "-" : fxver}};
        if (c > 0.0) j["fraction_within"] = rs.fraction_within(c);
        man.emit(cfg.out, "rigidity.json", j.dump(2) + "\n");
        out << j.dump(2) << "\n";
        return 0;
    }

    if (cfg.command == "perturb-grid") {
        RecursionTrace tr = recursion_sequence(cfg.theta);
        CsvTable rt({"step", "x"});
        for (size_t k = 0; k < tr.xs.size(); ++k)
            rt.add_row({std::to_string(k), fmt_g17(tr.xs[k])});
        man.emit(cfg.out, "recursion.csv", rt.str());

        json j{{"theta", cfg.theta},
               {"status", tr.status == RecursionTrace::Status::Converged    ? "converged"
                          : tr.status == RecursionTrace::Status::Diverged ? "diverged"
                                                                          : "max_steps"}};
        if (tr.status == RecursionTrace::Status::Converged) j["limit"] = tr.limit;
        auto closed = recursion_limit(cfg.theta);
        j["closed_form"] = closed ? json(*closed) : json("divergent");

        if (cfg.theta > 0.0 && cfg.theta <= 0.25) {
            ChainTrace ct = simulate_chain_selection(
                cfg.theta, cfg.chain_length, cfg.seed, cfg.resolution,
                cfg.mode == "worst" ? PlacementMode::WorstCase : PlacementMode::UniformRandom);
            CsvTable t({"step", "feasible_fraction", "bad_fraction"});
            for (size_t k = 0; k < ct.feasible_fraction.size(); ++k)
                t.add_row({std::to_string(k + 1), fmt_g17(ct.feasible_fraction[k]),
                           fmt_g17(1.0 - ct.feasible_fraction[k])});
            man.emit(cfg.out, "chain.csv", t.str());
            man.emit(cfg.out, "plot.py",
                     plot_script({{"recursion.csv", "x"}, {"chain.csv", "feasible_fraction"}}));
            j["chain_bound_ok"] = ct.bound_ok;
            j["falsified"] = ct.falsified;
        }
        man.emit(cfg.out, "perturb_grid.json", j.dump(2) + "\n");
        out << j.dump(2) << "\n";
        return 0;
    }

    if (cfg.command == "calibrate") {
        Fixtures fx = calibrate(w, cfg.seed);
        if (cfg.layers) {
            MinimizeOptions o = solver_options(cfg);
            if (o.max_iters < 0) o.max_iters = 400;
            if (o.grad_tol < 0) o.grad_tol = 2e-4;
            calibrate_layers(fx, w, cfg.lambda, cfg.n_list.empty() ? std::vector<int>{16, 24, 32}
                                                                   : cfg.n_list, o);
        }
        std::string path = cfg.fixtures.empty() ? "fixtures.json" : cfg.fixtures;
        man.emit(cfg.out, path, fixtures_to_json(fx).dump(2) + "\n");
        out << "fixtures " << fixture_version_string(fx) << "\n";
        return 0;
    }

    if (cfg.command == "verify") {
        Fixtures fx;
        if (!cfg.fixtures.empty() && std::filesystem::exists(cfg.fixtures))
            fx = load_fixtures(cfg.fixtures);
        else
            fx = calibrate(w, cfg.seed + 1);
        VerifyOptions vo;
        vo.seed = cfg.seed;
        vo.configs = cfg.samples < 10000 ? cfg.samples : 200;
        auto results = run_verify_suites(w, fx, vo);
        bool all = true;
        json arr = json::array();
        for (const auto& r : results) {
            all = all && r.pass;
            out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
            arr.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        }
        json j{{"fixture", fixture_version_string(fx)}, {"suites", arr}, {"all_pass", all}};
        man.emit(cfg.out, "verify.json", j.dump(2) + "\n");
        return all ? 0 : 1;
    }

    throw ConfigError("unknown command '" + cfg.command + "'");
}

} // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Manifest man(cfg.command, cfg.echo);
    try {
        int rc = run_command(cfg, man, out);
        man.write(cfg.out);
        return rc;
    } catch (const ConfigError& e) {
        err << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << json{{"error", {{"kind", "domain"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
}

} // namespace twowell
