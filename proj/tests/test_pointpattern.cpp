#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "geostat/pointpattern.hpp"

using namespace geostat;
using Catch::Matchers::WithinAbs;

namespace {

TagPointPattern pattern(std::vector<PlanarPoint> pts, double w = 1.0, double h = 1.0) {
    TagPointPattern p;
    p.points = std::move(pts);
    p.window = Window{w, h};
    return p;
}

// Independent O(n^2) oracle: literal double loop over ordered pairs with the
// same scaling expression as the estimator contract.
std::vector<double> brute_force_k(const TagPointPattern& a, const ScaleGrid& grid) {
    std::size_t n = a.n();
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::uint64_t cnt = 0;
        double h2 = grid.h[g] * grid.h[g];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                double dx = a.points[i].x - a.points[j].x;
                double dy = a.points[i].y - a.points[j].y;
                if (dx * dx + dy * dy <= h2) ++cnt;
            }
        }
        out[g] = static_cast<double>(cnt) *
                 (a.window.area() / (static_cast<double>(n) * static_cast<double>(n)));
    }
    return out;
}

std::vector<double> brute_force_k_cross(const TagPointPattern& a, const TagPointPattern& b,
                                        const ScaleGrid& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::uint64_t cnt = 0;
        double h2 = grid.h[g] * grid.h[g];
        for (const auto& pa : a.points) {
            for (const auto& pb : b.points) {
                double dx = pa.x - pb.x, dy = pa.y - pb.y;
                if (dx * dx + dy * dy <= h2) ++cnt;
            }
        }
        out[g] = static_cast<double>(cnt) *
                 (a.window.area() /
                  (static_cast<double>(a.n()) * static_cast<double>(b.n())));
    }
    return out;
}

TagPointPattern random_pattern(std::mt19937_64& rng, std::size_t n, double w = 1.0,
                               double h = 1.0) {
    TagPointPattern p;
    p.window = Window{w, h};
    p.points.resize(n);
    for (auto& pt : p.points) {
        pt.x = uniform01(rng) * w;
        pt.y = uniform01(rng) * h;
    }
    return p;
}

TagPointPattern thomas_children(std::mt19937_64& rng, std::size_t parents,
                                std::size_t per_parent, double sigma, double w, double h,
                                std::vector<PlanarPoint>* parent_out = nullptr) {
    TagPointPattern p;
    p.window = Window{w, h};
    std::vector<PlanarPoint> centers(parents);
    for (auto& c : centers) {
        c.x = uniform01(rng) * w;
        c.y = uniform01(rng) * h;
    }
    if (parent_out) *parent_out = centers;
    for (const auto& c : centers) {
        for (std::size_t i = 0; i < per_parent; ++i) {
            PlanarPoint pt;
            do {
                pt.x = c.x + normal01(rng) * sigma;
                pt.y = c.y + normal01(rng) * sigma;
            } while (pt.x < 0 || pt.x > w || pt.y < 0 || pt.y > h);
            p.points.push_back(pt);
        }
    }
    return p;
}

}  // namespace

TEST_CASE("self K estimate matches the worked three-point example") {
    auto p = pattern({{0.0, 0.0}, {0.05, 0.0}, {0.2, 0.0}});
    ScaleGrid g;
    g.h = {0.1};
    auto k = estimate_k(p, g);
    REQUIRE(k.has_value());
    CHECK_THAT((*k)[0], WithinAbs(2.0 / 9.0, 1e-15));
}

TEST_CASE("self K is zero beyond the maximum pair distance") {
    auto p = pattern({{0.0, 0.0}, {0.9, 0.9}});
    auto k = estimate_k(p, ScaleGrid::regular());
    REQUIRE(k.has_value());
    for (double v : *k) CHECK(v == 0.0);
}

TEST_CASE("degenerate patterns signal instead of computing") {
    CHECK_FALSE(estimate_k(pattern({{0.1, 0.1}}), ScaleGrid::regular()).has_value());
    CHECK_FALSE(estimate_k(pattern({}), ScaleGrid::regular()).has_value());
    CHECK_FALSE(
        estimate_k_cross(pattern({}), pattern({{0.0, 0.0}}), ScaleGrid::regular()).has_value());
}

TEST_CASE("cross K matches the worked example and is symmetric") {
    auto pi = pattern({{0.0, 0.0}});
    auto pj = pattern({{0.05, 0.0}, {0.5, 0.0}});
    ScaleGrid g;
    g.h = {0.1};
    auto k = estimate_k_cross(pi, pj, g);
    REQUIRE(k.has_value());
    CHECK_THAT((*k)[0], WithinAbs(0.5, 1e-15));

    auto rng = make_rng(5);
    auto a = random_pattern(rng, 17), b = random_pattern(rng, 23);
    auto kij = estimate_k_cross(a, b, ScaleGrid::regular());
    auto kji = estimate_k_cross(b, a, ScaleGrid::regular());
    REQUIRE(kij.has_value());
    for (std::size_t i = 0; i < kij->size(); ++i) CHECK((*kij)[i] == (*kji)[i]);
}

TEST_CASE("estimators equal the brute-force oracle bit for bit") {
    auto rng = make_rng(101);
    ScaleGrid grid = ScaleGrid::regular();
    for (int iter = 0; iter < 40; ++iter) {
        auto a = random_pattern(rng, 2 + uniform_index(rng, 120));
        auto k = estimate_k(a, grid);
        auto oracle = brute_force_k(a, grid);
        REQUIRE(k.has_value());
        for (std::size_t i = 0; i < grid.size(); ++i) REQUIRE((*k)[i] == oracle[i]);

        auto b = random_pattern(rng, 1 + uniform_index(rng, 80));
        auto kc = estimate_k_cross(a, b, grid);
        auto oc = brute_force_k_cross(a, b, grid);
        REQUIRE(kc.has_value());
        for (std::size_t i = 0; i < grid.size(); ++i) REQUIRE((*kc)[i] == oc[i]);
    }
}

TEST_CASE("K is monotone non-decreasing in h") {
    auto rng = make_rng(11);
    for (int iter = 0; iter < 20; ++iter) {
        auto a = random_pattern(rng, 3 + uniform_index(rng, 60));
        auto k = estimate_k(a, ScaleGrid::regular());
        REQUIRE(k.has_value());
        for (std::size_t i = 1; i < k->size(); ++i) CHECK((*k)[i] >= (*k)[i - 1]);
    }
}

TEST_CASE("coordinate scaling scales K consistently (pair counts invariant)") {
    auto rng = make_rng(12);
    auto a = random_pattern(rng, 40);
    ScaleGrid g1 = ScaleGrid::regular();
    const double c = 3.0;
    TagPointPattern scaled = a;
    scaled.window = Window{a.window.width * c, a.window.height * c};
    for (auto& p : scaled.points) {
        p.x *= c;
        p.y *= c;
    }
    ScaleGrid g2;
    for (double h : g1.h) g2.h.push_back(h * c);
    auto k1 = estimate_k(a, g1);
    auto k2 = estimate_k(scaled, g2);
    REQUIRE(k1.has_value());
    // K'(ch) = c^2 K(h): both sides recover the same integer pair counts.
    double n2 = static_cast<double>(a.n()) * static_cast<double>(a.n());
    for (std::size_t i = 0; i < g1.size(); ++i) {
        double count1 = (*k1)[i] * n2 / a.window.area();
        double count2 = (*k2)[i] * n2 / scaled.window.area();
        CHECK_THAT(count1, WithinAbs(count2, 1e-9));
        CHECK_THAT((*k2)[i], WithinAbs(c * c * (*k1)[i], 1e-12 * std::max(1.0, (*k1)[i])));
    }
}

TEST_CASE("k_to_d identities") {
    ScaleGrid g = ScaleGrid::regular();
    SECTION("K = pi h^2 gives D = 0") {
        std::vector<double> k(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) k[i] = std::numbers::pi * g.h[i] * g.h[i];
        auto ld = k_to_d(k, g);
        for (double d : ld.dhat) CHECK_THAT(d, WithinAbs(0.0, 1e-15));
    }
    SECTION("K = pi gives L = 1; K = 4 pi at h = 1 gives L = 2, D = 1") {
        ScaleGrid g1;
        g1.h = {0.5, 1.0};
        auto ld = k_to_d({std::numbers::pi, 4.0 * std::numbers::pi}, g1);
        CHECK_THAT(ld.lhat[0], WithinAbs(1.0, 1e-12));
        CHECK_THAT(ld.lhat[1], WithinAbs(2.0, 1e-12));
        CHECK_THAT(ld.dhat[1], WithinAbs(1.0, 1e-12));
    }
    SECTION("round trip pi (D + h)^2 reproduces K to 1e-12") {
        auto rng = make_rng(3);
        auto a = random_pattern(rng, 50);
        auto k = estimate_k(a, g);
        auto ld = k_to_d(*k, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double back = std::numbers::pi * (ld.dhat[i] + g.h[i]) * (ld.dhat[i] + g.h[i]);
            CHECK_THAT(back, WithinAbs((*k)[i], 1e-12));
        }
    }
}

TEST_CASE("null simulation is deterministic for a fixed seed") {
    auto rng = make_rng(21);
    auto a = random_pattern(rng, 30);
    ScaleGrid g = ScaleGrid::regular();
    auto e1 = simulate_null(a, nullptr, PatternKind::kSelf, g, 99, 777);
    auto e2 = simulate_null(a, nullptr, PatternKind::kSelf, g, 99, 777);
    REQUIRE(e1.has_value());
    REQUIRE(e2.has_value());
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(e1->lo[i] == e2->lo[i]);
        CHECK(e1->hi[i] == e2->hi[i]);
        CHECK(e1->var_d[i] == e2->var_d[i]);
        CHECK(e1->var_d[i] >= 0.0);
        CHECK(e1->lo[i] <= e1->hi[i]);
    }

    auto b = random_pattern(rng, 20);
    auto c1 = simulate_null(a, &b, PatternKind::kCross, g, 50, 3);
    auto c2 = simulate_null(a, &b, PatternKind::kCross, g, 50, 3);
    REQUIRE(c1.has_value());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(c1->hi[i] == c2->hi[i]);
}

TEST_CASE("envelope results do not depend on the worker count") {
    auto rng = make_rng(22);
    auto a = random_pattern(rng, 25);
    ScaleGrid g = ScaleGrid::regular();
    setenv("GEOSTAT_THREADS", "1", 1);
    auto e1 = simulate_null(a, nullptr, PatternKind::kSelf, g, 33, 5);
    setenv("GEOSTAT_THREADS", "7", 1);
    auto e2 = simulate_null(a, nullptr, PatternKind::kSelf, g, 33, 5);
    unsetenv("GEOSTAT_THREADS");
    REQUIRE(e1.has_value());
    REQUIRE(e2.has_value());
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(e1->lo[i] == e2->lo[i]);
        CHECK(e1->hi[i] == e2->hi[i]);
        CHECK(e1->var_d[i] == e2->var_d[i]);
    }
}

TEST_CASE("interaction classification rules") {
    DProfile prof;
    prof.grid = ScaleGrid::regular(0.1, 0.1, 3);
    prof.env_lo = {-1.0, -1.0, -1.0};
    prof.env_hi = {1.0, 1.0, 1.0};

    SECTION("above the upper envelope everywhere is attraction") {
        prof.dhat = {2.0, 2.0, 2.0};
        auto v = classify_interaction(prof);
        CHECK(v.overall == Interaction::kAttraction);
        for (auto s : v.per_scale) CHECK(s == Interaction::kAttraction);
    }
    SECTION("zero D inside a symmetric envelope is independence") {
        prof.dhat = {0.0, 0.0, 0.0};
        CHECK(classify_interaction(prof).overall == Interaction::kIndependence);
    }
    SECTION("below the lower envelope is repulsion") {
        prof.dhat = {-2.0, 0.0, 0.0};
        CHECK(classify_interaction(prof).overall == Interaction::kRepulsion);
    }
    SECTION("mixed crossings give no overall attraction") {
        prof.dhat = {2.0, 0.0, -2.0};
        CHECK(classify_interaction(prof).overall == Interaction::kIndependence);
    }
}

TEST_CASE("CSR patterns stay inside their own envelopes most of the time") {
    ScaleGrid g = ScaleGrid::regular();
    std::size_t inside = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto rng = make_rng(derive_seed(314, seed));
        auto a = random_pattern(rng, 100);
        auto prof = profile_self(a, g, 99, derive_seed(159, seed));
        REQUIRE(prof.has_value());
        for (std::size_t i = 0; i < g.size(); ++i) {
            total += 1;
            inside += (prof->dhat[i] >= prof->env_lo[i] && prof->dhat[i] <= prof->env_hi[i]);
        }
    }
    CHECK(static_cast<double>(inside) / static_cast<double>(total) >= 0.85);
}

TEST_CASE("clustered bivariate patterns read as attraction") {
    ScaleGrid g = ScaleGrid::regular();
    int attracted = 0;
    const int runs = 6;
    for (int seed = 0; seed < runs; ++seed) {
        auto rng = make_rng(derive_seed(9000, static_cast<std::uint64_t>(seed)));
        std::vector<PlanarPoint> parents;
        auto a = thomas_children(rng, 10, 24, 0.05, 4.0, 4.0, &parents);
        TagPointPattern b;
        b.window = a.window;
        for (const auto& c : parents) {
            for (int i = 0; i < 24; ++i) {
                PlanarPoint pt;
                do {
                    pt.x = c.x + normal01(rng) * 0.05;
                    pt.y = c.y + normal01(rng) * 0.05;
                } while (pt.x < 0 || pt.x > 4.0 || pt.y < 0 || pt.y > 4.0);
                b.points.push_back(pt);
            }
        }
        auto prof = profile_cross(a, b, g, 99, derive_seed(42, static_cast<std::uint64_t>(seed)));
        REQUIRE(prof.has_value());
        attracted += classify_interaction(*prof).overall == Interaction::kAttraction;
    }
    CHECK(attracted >= runs - 1);
}
