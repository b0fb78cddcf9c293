#include <doctest.h>

#include "stofv/errors.hpp"
#include "stofv/mesh.hpp"

#include <cmath>
#include <numbers>

using namespace stofv;

TEST_CASE("build_grid geometry") {
    const TorusGrid g1 = build_grid(1, 4);
    CHECK(g1.num_cells() == 4);
    CHECK(g1.h() == 0.25);
    CHECK(g1.cell_volume() == 0.25);
    CHECK(g1.face_area() == 1.0);
    CHECK(g1.alpha() == 0.5);

    const TorusGrid g2 = build_grid(2, 3);
    CHECK(g2.num_cells() == 9);
    CHECK(g2.cell_volume() == doctest::Approx(1.0 / 9.0));
    CHECK(g2.face_area() == doctest::Approx(1.0 / 3.0));
    CHECK(g2.faces(4).size() == 4);

    CHECK_THROWS_AS(build_grid(3, 4), ConfigError);
    CHECK_THROWS_AS(build_grid(1, 0), ConfigError);
}

TEST_CASE("periodic wrap with two cells") {
    const TorusGrid g = build_grid(1, 2);
    const auto faces = g.faces(0);
    REQUIRE(faces.size() == 2);
    CHECK(faces[0].neighbor == 1);
    CHECK(faces[1].neighbor == 1);
    CHECK(faces[0].sign == -1);
    CHECK(faces[1].sign == 1);
}

TEST_CASE("faces come in opposite pairs and volumes sum to one") {
    for (int dim : {1, 2}) {
        const TorusGrid g = build_grid(dim, 5);
        double vol = 0.0;
        for (std::size_t c = 0; c < g.num_cells(); ++c) {
            vol += g.cell_volume();
            for (const Face& f : g.faces(c)) {
                bool found = false;
                for (const Face& r : g.faces(f.neighbor)) {
                    if (r.neighbor == c && r.axis == f.axis && r.sign == -f.sign) {
                        found = true;
                    }
                }
                CHECK(found);
            }
        }
        CHECK(vol == doctest::Approx(1.0).epsilon(1e-14));
        const double h = g.h();
        CHECK(h * g.boundary_measure() <= g.cell_volume() / (g.alpha() * g.alpha()) + 1e-15);
    }
}

TEST_CASE("cell_average oracles") {
    const TorusGrid g2 = build_grid(1, 2);
    const auto s = cell_average([](const Point& x) { return std::sin(2.0 * std::numbers::pi * x[0]); }, g2, 8);
    CHECK(s[0] == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-10));
    CHECK(s[1] == doctest::Approx(-2.0 / std::numbers::pi).epsilon(1e-10));

    const TorusGrid g4 = build_grid(1, 4);
    const auto saw = cell_average([](const Point& x) { return x[0]; }, g4);
    CHECK(saw[0] == doctest::Approx(0.125).epsilon(1e-15));

    const TorusGrid g = build_grid(2, 3);
    for (double v : cell_average([](const Point&) { return 0.7; }, g)) {
        CHECK(v == doctest::Approx(0.7));
    }
}

TEST_CASE("refine, prolong and restrict") {
    const Refinement r1 = refine(build_grid(1, 2));
    CHECK(r1.fine.cells_per_axis() == 4);
    CHECK(r1.children[0] == std::vector<std::size_t>{0, 1});

    const Refinement r2 = refine(build_grid(2, 2));
    for (const auto& ch : r2.children) {
        CHECK(ch.size() == 4);
    }
    const std::vector<double> v{0.1, -0.4, 0.9, 0.3};
    const auto back = restrict_to_coarse(r2, prolong(r2, v));
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-15));
    }
}
