#include "twowell/verify.hpp"

#include "twowell/analysis.hpp"
#include "twowell/gridperturb.hpp"
#include "twowell/spin.hpp"

#include <cmath>
#include <sstream>

namespace twowell {

std::vector<SuiteResult> run_verify_suites(const WellSystem& w, const Fixtures& fx,
                                           const VerifyOptions& opts) {
    std::vector<SuiteResult> out;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        out.push_back({name, pass, detail});
    };

    int64_t lower_viol = 0, elb_viol = 0, coarea_viol = 0, edge_viol = 0, ratio_viol = 0,
            perim_viol = 0, plugin_viol = 0;
    double sd_worst = 0.0;
    int64_t sites = 0, configs_run = 0;

    // plugin density for the general-class contract: dominates the model
    // density by construction with c1 = 1.7
    const double plugin_c1 = 1.7;
    auto plugin = [&](const Stencil& s, const WellSystem& ws) {
        double d = dist_to_well(stencil_matrix(s), ws.U0);
        return plugin_c1 * density_truncated(s, ws) + 0.3 * d * d;
    };

    for (int n : opts.n_list) {
        int per_n = opts.configs / int(opts.n_list.size());
        for (int idx = 0; idx < per_n; ++idx) {
            Deformation def = suite_deformation(w, n, opts.seed, idx);
            EnergyReport rep = hamiltonian(def, w, Density::Truncated);
            ++configs_run;

            for (int32_t id = 0; id < def.domain->num_nodes(); ++id) {
                Stencil s = stencil_at(def, id);
                double d = dist_to_wells(stencil_matrix(s), w);
                double d2 = d * d;
                double dstencil = stencil_distance_to_wells(s, w);
                double upper_denom = dstencil * dstencil + w.cbar * dstencil;
                ++sites;
                if (density_tilde(s, w) < 0.5 * fx.lemma_lower_c * d2 - 1e-12) ++lower_viol;
                double h = density_truncated(s, w);
                // lower bound in the node-gradient metric; the upper bound
                // uses the stencil metric with its linear near-well term
                if (h < 0.5 * fx.elb_c1 * d2 - 1e-12 ||
                    h > 2.0 * fx.elb_c2 * upper_denom + 1e-12)
                    ++elb_viol;
                double hp = plugin(s, w);
                if (hp < plugin_c1 * h - 1e-12) ++plugin_viol;
            }

            SecondDiffRecord sd = second_diff_check(def, rep);
            sd_worst = std::max(sd_worst, sd.max_ratio);

            ScalarLatticeField f{def.domain, rep.site_density};
            CoareaRecord co = coarea_check(f);
            if (co.lhs > fx.coarea_c * co.rhs + 1e-12) ++coarea_viol;

            ComparisonRecord cmp = comparison_check(def, w, fx.spin_ratio_c);
            if (!cmp.edge_mechanism_ok) ++edge_viol;
            if (!cmp.ratio_ok) ++ratio_viol;
            if (cmp.mismatch_count > 0) {
                double perim = double(cmp.mismatch_count) / n;
                if (perim > fx.spin_perimeter_c * (n * cmp.h_total) + 1e-12) ++perim_viol;
            }
        }
    }

    std::ostringstream meta;
    meta << configs_run << " configurations, " << sites << " sites";
    add("pointwise_lower_bound", lower_viol == 0,
        lower_viol == 0 ? meta.str() : std::to_string(lower_viol) + " violations");
    add("two_sided_bound", elb_viol == 0,
        elb_viol == 0 ? meta.str() : std::to_string(elb_viol) + " violations");
    {
        std::ostringstream d;
        d << "max ratio " << sd_worst << " vs fixture " << fx.second_diff_c;
        add("second_difference_control", sd_worst <= fx.second_diff_c, d.str());
    }
    add("coarea_inequality", coarea_viol == 0,
        coarea_viol == 0 ? meta.str() : std::to_string(coarea_viol) + " violations");
    add("spin_edge_mechanism", edge_viol == 0,
        edge_viol == 0 ? meta.str() : std::to_string(edge_viol) + " configurations violated");
    add("spin_comparison_ratio", ratio_viol == 0,
        ratio_viol == 0 ? meta.str() : std::to_string(ratio_viol) + " below fixture");
    add("phase_perimeter_bound", perim_viol == 0,
        perim_viol == 0 ? meta.str() : std::to_string(perim_viol) + " violations");
    add("plugin_density_contract", plugin_viol == 0,
        plugin_viol == 0 ? meta.str() : std::to_string(plugin_viol) + " violations");

    if (opts.with_chain) {
        bool ok = true;
        std::string detail = "worst case and 10 uniform seeds at theta in {0.1, 0.25}";
        for (double theta : {0.1, 0.25}) {
            ChainTrace tr =
                simulate_chain_selection(theta, 40, opts.seed, 1000, PlacementMode::WorstCase);
            if (!tr.bound_ok || tr.falsified) ok = false;
            for (uint64_t s = 0; s < 10; ++s) {
                ChainTrace tu = simulate_chain_selection(theta, 25, opts.seed + s, 1000,
                                                         PlacementMode::UniformRandom);
                if (!tu.bound_ok || tu.falsified) ok = false;
            }
        }
        add("chain_selection_bound", ok, detail);
    }
    return out;
}

} // namespace twowell
