#include "twowell/analysis.hpp"

#include "twowell/errors.hpp"

#include "twowell/fixtures.hpp"
#include "twowell/optimize.hpp"
#include "twowell/rng.hpp"

#include <doctest.h>

using namespace twowell;

namespace {

ScalarLatticeField random_field(std::shared_ptr<const LatticeDomain> dom, uint64_t seed,
                                bool nonnegative) {
    Rng rng(seed);
    ScalarLatticeField f{dom, std::vector<double>(size_t(dom->num_nodes()))};
    for (double& v : f.values) v = nonnegative ? rng.uniform() : rng.normal();
    return f;
}

} // namespace

TEST_CASE("discrete gradient") {
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 8));

    SUBCASE("constant field has zero gradient") {
        ScalarLatticeField f{dom, std::vector<double>(size_t(dom->num_nodes()), 3.5)};
        DiscreteGradientField g = discrete_gradient(f);
        for (const auto& v : g.g) CHECK(v.norm() == 0.0);
    }

    SUBCASE("linear field i/n gives (1,0)") {
        ScalarLatticeField f{dom, {}};
        f.values.resize(size_t(dom->num_nodes()));
        for (int32_t id = 0; id < dom->num_nodes(); ++id)
            f.values[size_t(id)] = dom->point(id).x();
        DiscreteGradientField g = discrete_gradient(f);
        for (int32_t id = 0; id < dom->num_nodes(); ++id) {
            if (g.mask[size_t(id)] & 1) CHECK(g.g[size_t(id)].x() == doctest::Approx(1.0));
            if (g.mask[size_t(id)] & 2) CHECK(g.g[size_t(id)].y() == doctest::Approx(0.0));
        }
    }

    SUBCASE("linearity is exact") {
        ScalarLatticeField f = random_field(dom, 5, false);
        ScalarLatticeField g = random_field(dom, 6, false);
        ScalarLatticeField combo{dom, std::vector<double>(size_t(dom->num_nodes()))};
        for (size_t k = 0; k < combo.values.size(); ++k)
            combo.values[k] = 2.0 * f.values[k] + 0.5 * g.values[k];
        DiscreteGradientField gf = discrete_gradient(f), gg = discrete_gradient(g),
                              gc = discrete_gradient(combo);
        for (size_t k = 0; k < gc.g.size(); ++k)
            CHECK((gc.g[k] - (2.0 * gf.g[k] + 0.5 * gg.g[k])).norm() < 1e-12);
    }
}

TEST_CASE("second difference control") {
    WellSystem w = make_wells(std::sqrt(2.0));
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 16));

    SUBCASE("affine states have zero ratios") {
        Deformation def = make_affine(dom, w.f_lambda(0.4));
        EnergyReport rep = hamiltonian(def, w, Density::Truncated);
        SecondDiffRecord rec = second_diff_check(def, rep);
        CHECK(rec.max_ratio < 1e-6);
        CHECK_FALSE(rec.unbounded);
    }

    SUBCASE("laminate ratios are finite and translation invariant") {
        auto [V0, V1] = rank_one_pair(w, +1);
        Deformation def = init_profile(dom, w, V0, V1, +1, 0.5);
        EnergyReport rep = hamiltonian(def, w, Density::Truncated);
        SecondDiffRecord rec = second_diff_check(def, rep);
        CHECK(rec.max_ratio > 0.0);
        CHECK(rec.max_ratio < 50.0);

        Deformation moved = def;
        for (auto& x : moved.x) x += Eigen::Vector2d{2.0, -1.0};
        SecondDiffRecord rec2 = second_diff_check(moved, hamiltonian(moved, w, Density::Truncated));
        CHECK(rec2.max_ratio == doctest::Approx(rec.max_ratio).epsilon(1e-9));
    }

    SUBCASE("suite maximum matches a recomputation oracle") {
        Deformation def = suite_deformation(w, 16, 4, 1);
        EnergyReport rep = hamiltonian(def, w, Density::Truncated);
        SecondDiffRecord rec = second_diff_check(def, rep);

        double want = 0.0;
        const LatticeDomain& d = *def.domain;
        double n = d.n();
        for (int32_t id = 0; id < d.num_nodes(); ++id) {
            Eigen::Vector2i ij = d.coord(id);
            double h = rep.site_density[size_t(id)];
            auto at = [&](int di, int dj) { return d.node_id(ij.x() + di, ij.y() + dj); };
            int32_t xr = at(1, 0), xl = at(-1, 0), yu = at(0, 1), yd = at(0, -1), ur = at(1, 1);
            if (xr >= 0 && xl >= 0 && h > 0)
                want = std::max(want, n * (def.x[size_t(xr)] + def.x[size_t(xl)] -
                                           2 * def.x[size_t(id)]).norm() / std::sqrt(h));
            if (yu >= 0 && yd >= 0 && h > 0)
                want = std::max(want, n * (def.x[size_t(yu)] + def.x[size_t(yd)] -
                                           2 * def.x[size_t(id)]).norm() / std::sqrt(h));
            if (xr >= 0 && xr < d.num_nodes() && xl >= 0 && xl < d.num_nodes() && yu >= 0 &&
                ur >= 0) {
                double den = std::sqrt(h) + std::sqrt(rep.site_density[size_t(xr)]) +
                             std::sqrt(rep.site_density[size_t(xl)]);
                if (den > 0)
                    want = std::max(want, n * (def.x[size_t(ur)] - def.x[size_t(yu)] -
                                               def.x[size_t(xr)] + def.x[size_t(id)]).norm() / den);
            }
        }
        CHECK(rec.max_ratio == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("coarea inequality") {
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 16));

    SUBCASE("zero field") {
        ScalarLatticeField f{dom, std::vector<double>(size_t(dom->num_nodes()), 0.0)};
        CoareaRecord rec = coarea_check(f);
        CHECK(rec.lhs == 0.0);
        CHECK(rec.rhs == 0.0);
    }

    SUBCASE("block indicator against the hand count") {
        int n = 16, k = 4;
        ScalarLatticeField f{dom, std::vector<double>(size_t(dom->num_nodes()), 0.0)};
        for (int32_t id = 0; id < dom->num_nodes(); ++id) {
            Eigen::Vector2i ij = dom->coord(id);
            if (ij.x() >= 0 && ij.x() < k && ij.y() >= 0 && ij.y() < k)
                f.values[size_t(id)] = 1.0;
        }
        CoareaRecord rec = coarea_check(f);
        CHECK(rec.lhs == doctest::Approx(4.0 * k / n).epsilon(1e-14));
        // rhs hand count: (k-1) rows/cols see one unit component, the block
        // corner rows see sqrt(2); 2(k-1) singles per direction pair plus
        // 2 corners with both components
        CHECK(rec.ratio <= 2.0);
        CHECK(rec.lhs <= std::sqrt(2.0) * rec.rhs + 1e-12);
    }

    SUBCASE("random nonnegative fields satisfy lhs <= sqrt(2) rhs") {
        for (uint64_t s = 0; s < 100; ++s) {
            ScalarLatticeField f = random_field(dom, 100 + s, true);
            CoareaRecord rec = coarea_check(f);
            CHECK(rec.lhs <= std::sqrt(2.0) * rec.rhs + 1e-12);
            CHECK(rec.lhs <= 2.0 * rec.rhs + 1e-12);
        }
    }

    SUBCASE("doubling the field doubles both sides exactly") {
        ScalarLatticeField f = random_field(dom, 77, true);
        ScalarLatticeField f2{dom, f.values};
        for (double& v : f2.values) v *= 2.0;
        CoareaRecord a = coarea_check(f), b = coarea_check(f2);
        CHECK(b.lhs == 2.0 * a.lhs);
        CHECK(b.rhs == 2.0 * a.rhs);
    }

    SUBCASE("negative values rejected") {
        ScalarLatticeField f{dom, std::vector<double>(size_t(dom->num_nodes()), -1.0)};
        CHECK_THROWS_AS(coarea_check(f), DomainError);
    }
}

TEST_CASE("rigidity sampling") {
    WellSystem w = make_wells(std::sqrt(2.0));
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 32));

    SUBCASE("affine well states give unit ratios and zero mu") {
        for (const Eigen::Matrix2d& F : {w.U0, (rotation(0.9) * w.U0).eval()}) {
            Deformation def = make_affine(dom, F);
            RigiditySample rs = rigidity_sample(def, w, {-1.5, 0.0}, {0.5, 0.0}, 0.1, 300, 3);
            CHECK(rs.mu < 1e-10);
            for (double r : rs.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    SUBCASE("distribution is invariant under rigid motions of the image") {
        Deformation def = suite_deformation(w, 32, 8, 1);
        RigiditySample a = rigidity_sample(def, w, {-1.5, 0.0}, {0.5, 0.0}, 0.1, 500, 17);
        Deformation moved = def;
        Eigen::Matrix2d R = rotation(1.3);
        for (auto& x : moved.x) x = R * x + Eigen::Vector2d{0.7, -0.4};
        RigiditySample b = rigidity_sample(moved, w, {-1.5, 0.0}, {0.5, 0.0}, 0.1, 500, 17);
        REQUIRE(a.ratios.size() == b.ratios.size());
        for (size_t k = 0; k < a.ratios.size(); ++k)
            CHECK(a.ratios[k] == doctest::Approx(b.ratios[k]).epsilon(1e-12));
    }

    SUBCASE("geometry preconditions rejected") {
        Deformation def = make_affine(dom, w.U0);
        CHECK_THROWS_AS(rigidity_sample(def, w, {-4.9, 0.9}, {4.9, -0.9}, 0.1, 10, 1),
                        DomainError);
        CHECK_THROWS_AS(rigidity_sample(def, w, {-1.0, 0.0}, {1.0, 0.0}, 0.2, 10, 1), ConfigError);
    }
}

TEST_CASE("interface extraction") {
    WellSystem w = make_wells(std::sqrt(2.0));
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 16));

    SUBCASE("single laminate yields one straight segment") {
        auto [V0, V1] = rank_one_pair(w, +1);
        Deformation def = init_profile(dom, w, V0, V1, +1, 0.5, /*apply_bc=*/false);
        InterfaceSummary is = interface_extract(def, w, 0.15);
        CHECK(is.classifiable);
        REQUIRE(is.segments.size() == 1);
        CHECK(is.segments[0].angle_to_plus < 1e-6);
    }

    SUBCASE("uniform state yields no segments") {
        Deformation def = make_affine(dom, w.U0);
        InterfaceSummary is = interface_extract(def, w, 0.15);
        CHECK(is.classifiable);
        CHECK(is.segments.empty());
    }

    SUBCASE("mirror laminate aligns with the other normal") {
        auto [V0, V1] = rank_one_pair(w, -1);
        Deformation def = init_profile(dom, w, V0, V1, -1, 0.5, /*apply_bc=*/false);
        InterfaceSummary is = interface_extract(def, w, 0.15);
        CHECK(is.classifiable);
        REQUIRE(!is.segments.empty());
        for (const auto& s : is.segments) CHECK(s.angle_to_minus < 15.0);
    }

    SUBCASE("far-from-both-wells state is unclassifiable, not a crash") {
        Deformation def = make_affine(dom, 3.0 * Eigen::Matrix2d::Identity());
        InterfaceSummary is = interface_extract(def, w, 0.01);
        CHECK_FALSE(is.classifiable);
    }
}

TEST_CASE("second gradient budget") {
    WellSystem w = make_wells(std::sqrt(2.0));

    SUBCASE("affine is zero") {
        auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 8));
        Deformation def = make_affine(dom, w.f_lambda(0.3));
        CHECK(second_gradient_budget(def) < 1e-18);
    }

    SUBCASE("laminate budget grows linearly in n") {
        auto [V0, V1] = rank_one_pair(w, +1);
        double b16 = 0.0, b32 = 0.0;
        for (int n : {16, 32}) {
            auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, n));
            Deformation def = init_profile(dom, w, V0, V1, +1, 0.5, /*apply_bc=*/false);
            (n == 16 ? b16 : b32) = second_gradient_budget(def);
        }
        CHECK(b32 / b16 == doctest::Approx(2.0).epsilon(0.3));
    }

    SUBCASE("smooth perturbation budget scales quadratically in amplitude") {
        auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 16));
        Deformation base = make_affine(dom, w.U0);
        Deformation p1 = init_perturbed(base, 0.05, 9);
        Deformation p2 = init_perturbed(base, 0.025, 9);
        double r = second_gradient_budget(p1) / second_gradient_budget(p2);
        CHECK(r == doctest::Approx(4.0).epsilon(0.2));
    }
}
