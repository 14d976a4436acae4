#include "twowell/spin.hpp"

#include "twowell/fixtures.hpp"
#include "twowell/optimize.hpp"
#include "twowell/rng.hpp"

#include <doctest.h>

#include <set>

using namespace twowell;

TEST_CASE("spin field on uniform well states") {
    WellSystem w = make_wells(std::sqrt(2.0));
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 8));

    SUBCASE("U0 state is all +1") {
        Deformation def = make_affine(dom, w.U0);
        EnergyReport rep = hamiltonian(def, w, Density::Truncated);
        SpinField sf = spin_field(def, w, rep);
        for (int8_t s : sf.sigma) CHECK(s == 1);
        CHECK(sf.mismatch_edges.empty());
        CHECK(sf.h_spin == 0.0);
    }

    SUBCASE("QU1 state is all -1") {
        Deformation def = make_affine(dom, w.Q * w.U1);
        EnergyReport rep = hamiltonian(def, w, Density::Truncated);
        SpinField sf = spin_field(def, w, rep);
        for (int8_t s : sf.sigma) CHECK(s == -1);
        CHECK(sf.h_spin == 0.0);
    }
}

TEST_CASE("spin Hamiltonian counts mismatch edges") {
    WellSystem w = make_wells(std::sqrt(2.0));
    int n = 8;
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, n));
    Deformation def = make_affine(dom, w.U0);
    EnergyReport rep = hamiltonian(def, w, Density::Truncated);
    SpinField sf = spin_field(def, w, rep);

    // flip one interior spin by hand and recount
    int32_t id = dom->node_id(0, 0);
    REQUIRE(id >= 0);
    sf.sigma[size_t(id)] = -1;
    sf.mismatch_edges.clear();
    for (int32_t p = 0; p < dom->num_nodes(); ++p) {
        Eigen::Vector2i ij = dom->coord(p);
        for (int dir = 0; dir < 2; ++dir) {
            int32_t q = dom->node_id(ij.x() + (dir == 0), ij.y() + (dir == 1));
            if (q < 0 || q >= dom->num_nodes()) continue;
            if (sf.sigma[size_t(p)] != sf.sigma[size_t(q)]) sf.mismatch_edges.push_back({p, q});
        }
    }
    CHECK(sf.mismatch_edges.size() == 4);
    CHECK(spin_hamiltonian(sf) == doctest::Approx(8.0 * 4.0 / (n * n)).epsilon(1e-14));
}

TEST_CASE("laminate mismatch edges form a single diagonal band") {
    WellSystem w = make_wells(std::sqrt(2.0));
    int n = 32;
    auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, n));
    auto [V0, V1] = rank_one_pair(w, +1);
    Deformation def = init_profile(dom, w, V0, V1, +1, 0.5, /*apply_bc=*/false);
    EnergyReport rep = hamiltonian(def, w, Density::Truncated);
    SpinField sf = spin_field(def, w, rep);

    // brute-force recount oracle
    int64_t count = 0;
    for (int32_t p = 0; p < dom->num_nodes(); ++p) {
        Eigen::Vector2i ij = dom->coord(p);
        for (int dir = 0; dir < 2; ++dir) {
            int32_t q = dom->node_id(ij.x() + (dir == 0), ij.y() + (dir == 1));
            if (q >= 0 && q < dom->num_nodes() && sf.sigma[size_t(p)] != sf.sigma[size_t(q)])
                ++count;
        }
    }
    CHECK(int64_t(sf.mismatch_edges.size()) == count);
    CHECK(count > 0);

    // all mismatch edges hug the tau = 0 interface diagonal
    std::set<int64_t> diags;
    for (const auto& [p, q] : sf.mismatch_edges) {
        Eigen::Vector2i ij = dom->coord(p);
        diags.insert(ij.x() + ij.y());
    }
    for (int64_t d : diags) CHECK(std::abs(d) <= 2);
    CHECK(spin_hamiltonian(sf) ==
          doctest::Approx(8.0 * double(count) / (n * n)).epsilon(1e-14));
}

TEST_CASE("comparison mechanism") {
    WellSystem w = make_wells(std::sqrt(2.0));

    SUBCASE("uniform state passes vacuously") {
        auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 8));
        Deformation def = make_affine(dom, w.U0);
        ComparisonRecord rec = comparison_check(def, w);
        CHECK(rec.edge_mechanism_ok);
        CHECK(rec.mismatch_count == 0);
    }

    SUBCASE("laminate edges all exceed the density floor") {
        auto dom = std::make_shared<LatticeDomain>(build_domain(4.0, 1.0, +1, 32));
        auto [V0, V1] = rank_one_pair(w, +1);
        Deformation def = init_profile(dom, w, V0, V1, +1, 0.5);
        ComparisonRecord rec = comparison_check(def, w);
        CHECK(rec.mismatch_count > 0);
        CHECK(rec.edge_mechanism_ok);
        CHECK(rec.offending.empty());
    }

    SUBCASE("random admissible suite has no violations and a positive ratio") {
        double min_ratio = std::numeric_limits<double>::infinity();
        for (int idx = 0; idx < 25; ++idx) {
            Deformation def = suite_deformation(w, 16, 99, idx);
            ComparisonRecord rec = comparison_check(def, w);
            CHECK(rec.edge_mechanism_ok);
            if (rec.mismatch_count > 0) min_ratio = std::min(min_ratio, rec.ratio);
        }
        CHECK(min_ratio > 0.0);
    }
}
