#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "ddm/landau.hpp"
#include "doctest.h"
#include "oracles.hpp"

using ddm::eval_vm;
using ddm::eval_vmn;
using oracles::near;

TEST_CASE("eval_vm matches high-precision reference values") {
    // frozen from independent arbitrary-precision quadrature of the defining
    // integral; covers both evaluation branches and the bound-pinch window
    struct Ref {
        int m;
        double B, z, value;
    };
    const Ref refs[] = {
        {0, 2.0, 0.0, 1.772453850905516},      {0, 2.0, 0.037, 1.7008144275862973},
        {0, 1.0, 1.25, 0.57843034604763108},   {0, 250000.0, 0.01, 96.404052357657881},
        {1, 2.0, 0.0, 0.88622692545275801},    {1, 1.0, 0.6, 0.56336890169097195},
        {2, 10.0, 0.31, 1.314280004276037},    {5, 2.0, 1.7, 0.34469532879980022},
        {5, 1000.0, 0.05, 8.6648843863763919}, {17, 2.0, 0.9, 0.23507089819364871},
        {17, 500.0, 3.3, 0.30203376141435297}, {40, 2.0, 0.21, 0.15753264851483503},
        {0, 2.0, 30.0, 0.033314845593610216},  {3, 50.0, 8.0, 0.12484411507088965},
    };
    for (const Ref& r : refs) {
        CAPTURE(r.m);
        CAPTURE(r.B);
        CAPTURE(r.z);
        CHECK(near(eval_vm(r.m, r.B, r.z), r.value, 1e-10));
    }
}

TEST_CASE("eval_vm closed-form points") {
    CHECK(near(eval_vm(0, 2.0, 0.0), std::sqrt(oracles::kPi), 1e-14));
    CHECK(near(eval_vm(1, 2.0, 0.0), 0.5 * std::sqrt(oracles::kPi), 1e-14));
    // beta = Bz^2/2 = 1/2 makes the (1/2 - beta) F_0 term vanish:
    // V_1 = sqrt(B/2) sqrt(1/2) = 250 exactly at B = 250000, z = 0.002
    CHECK(near(eval_vm(1, 250000.0, 0.002), 250.0, 1e-13));
}

TEST_CASE("eval_vm is even in z") {
    for (int m : {0, 1, 4, 11})
        for (double z : {0.125, 1.0, 7.5}) CHECK(eval_vm(m, 2.0, z) == eval_vm(m, 2.0, -z));
}

TEST_CASE("Jensen bounds sandwich eval_vm") {
    for (double B : {0.5, 2.0}) {
        for (int m = 0; m <= 20; ++m) {
            for (int k = 0; k <= 200; ++k) {
                const double z = 0.05 * k;
                const double v = eval_vm(m, B, z);
                const double lo = ddm::vm_lower_bound(m, B, z);
                const double hi = ddm::vm_upper_bound(m, B, z);
                CAPTURE(m);
                CAPTURE(z);
                CHECK(v >= lo * (1.0 - 1e-12));
                CHECK(v <= hi * (1.0 + 1e-12));
            }
        }
    }
    // far tail: bounds pinch below the midpoint threshold and still bracket
    const double v = eval_vm(3, 2.0, 100.0);
    CHECK(v >= ddm::vm_lower_bound(3, 2.0, 100.0) * (1.0 - 1e-12));
    CHECK(v <= ddm::vm_upper_bound(3, 2.0, 100.0) * (1.0 + 1e-12));
}

TEST_CASE("eval_vm decreases in m at fixed z") {
    for (double z : {0.0, 0.3, 2.0, 9.0})
        for (int m = 0; m < 12; ++m)
            CHECK(eval_vm(m, 2.0, z) >= eval_vm(m + 1, 2.0, z) * (1.0 - 1e-12));
}

TEST_CASE("eval_vm scaling law") {
    // V_m(sqrt(a) z; B/a) = V_m(z; B) / sqrt(a)
    for (double a : {0.1, 0.5, 0.9})
        for (int m : {0, 2, 7})
            for (double z : {0.0, 0.4, 3.1}) {
                CAPTURE(a);
                CAPTURE(m);
                CAPTURE(z);
                CHECK(near(eval_vm(m, 2.0 / a, std::sqrt(a) * z),
                           eval_vm(m, 2.0, z) / std::sqrt(a), 1e-10));
            }
}

TEST_CASE("1/V_m is convex in z") {
    for (int m : {0, 1, 5}) {
        for (int k = 1; k < 160; ++k) {
            const double h = 0.05;
            const double d2 = 1.0 / eval_vm(m, 2.0, (k + 1) * h) -
                              2.0 / eval_vm(m, 2.0, k * h) + 1.0 / eval_vm(m, 2.0, (k - 1) * h);
            CAPTURE(m);
            CAPTURE(k);
            CHECK(d2 >= -1e-10);
        }
    }
}

TEST_CASE("reciprocal comparison of V_m and V_mn") {
    // (1/V_m(z) + 1/V_n(z) + 1/V_m(z') + 1/V_n(z')) V_mn(z - z') >= 1
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> uz(-10.0, 10.0);
    std::uniform_int_distribution<int> um(0, 8);
    std::uniform_int_distribution<int> ub(0, 2);
    const double Bs[] = {0.5, 2.0, 40.0};
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = um(rng), n = um(rng);
        const double z = uz(rng), zp = uz(rng);
        const double B = Bs[ub(rng)];
        const double recips = 1.0 / eval_vm(m, B, z) + 1.0 / eval_vm(n, B, z) +
                              1.0 / eval_vm(m, B, zp) + 1.0 / eval_vm(n, B, zp);
        CAPTURE(m);
        CAPTURE(n);
        CAPTURE(z);
        CAPTURE(zp);
        CHECK(recips * eval_vmn(m, n, B, z - zp) >= 1.0 - 1e-9);
    }
}

TEST_CASE("scaling inequality a V_m(a z) <= V_m(z) for a <= 1") {
    for (double a : {0.1, 0.5, 0.9})
        for (int m : {0, 1, 6})
            for (double z : {0.0, 0.7, 5.0})
                CHECK(a * eval_vm(m, 2.0, a * z) <= eval_vm(m, 2.0, z) * (1.0 + 1e-12));
}

TEST_CASE("Coulomb tail of eval_vm") {
    // |z V_m(z) - 1| <= 2 (m+1) / (B z^2) once the tail bound is meaningful
    struct P {
        int m;
        double B, z;
    };
    for (const P& p : {P{0, 2.0, 5.0}, P{0, 2.0, 30.0}, P{3, 50.0, 8.0}, P{6, 10.0, 12.0}}) {
        const double err = std::fabs(p.z * eval_vm(p.m, p.B, p.z) - 1.0);
        CHECK(err <= 2.0 * (p.m + 1) / (p.B * p.z * p.z));
    }
}

TEST_CASE("pair_coefficients small cases are exact") {
    const auto c00 = ddm::pair_coefficients(0, 0).c;
    REQUIRE(c00.size() == 1);
    CHECK(c00[0] == 1.0);

    const auto c10 = ddm::pair_coefficients(1, 0).c;
    REQUIRE(c10.size() == 2);
    CHECK(c10[0] == 0.5);
    CHECK(c10[1] == 0.5);

    const auto c11 = ddm::pair_coefficients(1, 1).c;
    REQUIRE(c11.size() == 3);
    CHECK(c11[0] == 0.5);
    CHECK(c11[1] == 0.0);
    CHECK(c11[2] == 0.5);
}

TEST_CASE("pair_coefficients are a probability vector") {
    for (int m = 0; m <= 12; ++m)
        for (int n = 0; n <= m; ++n) {
            const auto pc = ddm::pair_coefficients(m, n);
            REQUIRE(static_cast<int>(pc.c.size()) == m + n + 1);
            double sum = 0.0;
            for (double ci : pc.c) {
                CHECK(ci >= 0.0);
                sum += ci;
            }
            CAPTURE(m);
            CAPTURE(n);
            CHECK(near(sum, 1.0, 1e-12));
            // order of the pair does not matter
            CHECK(ddm::pair_coefficients(n, m).c == pc.c);
        }
    // large orders still in the exact 128-bit branch (m + n <= 128)
    for (auto [m, n] : {std::pair{35, 30}, std::pair{50, 40}, std::pair{64, 64}}) {
        const auto big = ddm::pair_coefficients(m, n);
        double sum = 0.0;
        for (double ci : big.c) {
            CHECK(ci >= 0.0);
            sum += ci;
        }
        CAPTURE(m);
        CAPTURE(n);
        CHECK(near(sum, 1.0, 1e-12));
    }
    // log-space branch (m + n > 128): alternating sums cost accuracy, the
    // normalization survives only approximately
    const auto deep = ddm::pair_coefficients(70, 60);
    double deep_sum = 0.0;
    for (double ci : deep.c) {
        CHECK(ci >= 0.0);
        deep_sum += ci;
    }
    CHECK(near(deep_sum, 1.0, 1e-2));
}

TEST_CASE("eval_vmn reference values and identities") {
    // (0,0) collapses to a single-term sum
    for (double z : {0.0, 0.9, 4.2})
        CHECK(near(eval_vmn(0, 0, 2.0, z), eval_vm(0, 2.0, z / std::sqrt(2.0)) / std::sqrt(2.0),
                   1e-14));
    // V_{1,0}(0; B=2) = (3/4) sqrt(pi/2)
    CHECK(near(eval_vmn(1, 0, 2.0, 0.0), 0.75 * std::sqrt(oracles::kPi / 2.0), 1e-13));
    struct Ref {
        int m, n;
        double B, z, value;
    };
    const Ref refs[] = {
        {0, 0, 2.0, 0.9, 0.691733665871348},
        {1, 0, 2.0, 0.9, 0.603724182064563},
        {2, 1, 1.0, 1.7, 0.325716549444885},
        {3, 3, 10.0, 0.45, 0.953717796758846},
    };
    for (const Ref& r : refs) CHECK(near(eval_vmn(r.m, r.n, r.B, r.z), r.value, 1e-10));
    // symmetry in (m, n)
    CHECK(eval_vmn(4, 1, 2.0, 1.3) == eval_vmn(1, 4, 2.0, 1.3));
}

TEST_CASE("eval_vmn agrees with 2d ring-ring quadrature") {
    for (int m = 0; m <= 3; ++m)
        for (int n = 0; n <= m; ++n) {
            if (m + n > 3) continue;
            for (double z : {0.4, 1.1}) {
                CAPTURE(m);
                CAPTURE(n);
                CAPTURE(z);
                CHECK(near(eval_vmn(m, n, 2.0, z), oracles::vmn_2d_quadrature(m, n, 2.0, z),
                           1e-6));
            }
        }
}

TEST_CASE("eval_vmn agrees with the transverse-Fourier quadrature") {
    // independent 1D representation, accurate to machine precision and valid
    // at z = 0 where the ring-ring form degenerates
    for (double B : {1.0, 2.0, 10.0})
        for (int m = 0; m <= 6; ++m)
            for (int n = 0; n <= m; ++n) {
                if (m + n > 6) continue;
                for (double z : {0.0, 0.45, 0.9, 1.7, 2.5}) {
                    CAPTURE(m);
                    CAPTURE(n);
                    CAPTURE(B);
                    CAPTURE(z);
                    CHECK(near(eval_vmn(m, n, B, z),
                               oracles::vmn_fourier_quadrature(m, n, B, z), 1e-12));
                }
            }
}

TEST_CASE("orbital_overlap closed forms and quadrature") {
    CHECK(near(ddm::orbital_overlap(0, 0, 2.0), 2.0 / (4.0 * oracles::kPi), 1e-14));
    CHECK(near(ddm::orbital_overlap(1, 0, 2.0), 2.0 / (8.0 * oracles::kPi), 1e-14));
    CHECK(ddm::orbital_overlap(3, 5, 7.0) == ddm::orbital_overlap(5, 3, 7.0));
    for (int m = 0; m <= 6; ++m)
        for (int n = 0; n <= 6; ++n)
            CHECK(near(ddm::orbital_overlap(m, n, 10.0), oracles::overlap_quadrature(m, n, 10.0),
                       1e-12));
    // linear in B
    CHECK(near(ddm::orbital_overlap(2, 2, 6.0), 3.0 * ddm::orbital_overlap(2, 2, 2.0), 1e-14));
}

TEST_CASE("build_table tabulates pointwise and cell-averaged potentials") {
    const ddm::ZGrid grid{6.0, 97};
    const double B = 2.0;
    const ddm::PotentialTable tab = ddm::build_table(3, B, grid);
    REQUIRE(tab.max_m == 3);
    const int c = grid.center_index();
    const double h = grid.spacing();

    for (int m = 0; m <= 3; ++m) {
        for (int j = 0; j < grid.n; ++j) {
            CHECK(tab.vm_at(m, j) == eval_vm(m, B, grid.node(j)));
            CHECK(tab.vm_at(m, j) == tab.vm_at(m, 2 * c - j));
        }
        // cell averages against an independent panelled Gauss-Legendre rule
        for (int j : {c, c + 1, c + 17, grid.n - 1}) {
            const double zb = grid.node(j);
            const double ref =
                oracles::cell_average([&](double z) { return eval_vm(m, B, z); }, zb, h);
            CAPTURE(m);
            CAPTURE(j);
            CHECK(near(tab.vm_bar_at(m, j), ref, 1e-10));
        }
    }

    for (int d : {0, 1, 9, 40}) {
        const double ref = oracles::cell_average(
            [&](double z) { return eval_vmn(2, 1, B, z); }, d * h, h);
        CHECK(near(tab.vmn_at(2, 1, d), ref, 1e-10));
        CHECK(tab.vmn_at(1, 2, d) == tab.vmn_at(2, 1, d));
    }
    CHECK(tab.vmn_kernel(0, 3) == tab.vmn_kernel(3, 0));
    CHECK(static_cast<int>(tab.vmn_kernel(0, 0).size()) == grid.n);
}

TEST_CASE("build_table rejects absurd memory budgets") {
    CHECK_THROWS_AS(ddm::build_table(3, 2.0, ddm::ZGrid{6.0, 97}, 1024), std::length_error);
}

TEST_CASE("table cache round-trips bitwise") {
    namespace fs = std::filesystem;
    const ddm::ZGrid grid{4.0, 65};
    const double B = 10.0;
    const fs::path dir = fs::temp_directory_path() / "ddm_table_cache_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const ddm::PotentialTable tab = ddm::build_table(2, B, grid);
    const std::string key = ddm::table_cache_key(2, B, grid);
    CHECK(key == ddm::table_cache_key(2, B, grid));
    CHECK(key != ddm::table_cache_key(3, B, grid));
    CHECK(key != ddm::table_cache_key(2, B + 1.0, grid));
    CHECK(key != ddm::table_cache_key(2, B, ddm::ZGrid{4.0, 129}));

    const std::string path = (dir / (key + ".tbl")).string();
    ddm::save_table(tab, path);
    ddm::PotentialTable back;
    REQUIRE(ddm::load_table(back, path, 2, B, grid));
    CHECK(back.vm_half == tab.vm_half);
    CHECK(back.vm_bar_half == tab.vm_bar_half);
    CHECK(back.vmn_rel == tab.vmn_rel);
    // mismatched parameters must refuse the cached file
    ddm::PotentialTable wrong;
    CHECK(!ddm::load_table(wrong, path, 2, B + 1.0, grid));

    const ddm::PotentialTable t1 = ddm::load_or_build_table(2, B, grid, dir.string());
    const ddm::PotentialTable t2 = ddm::load_or_build_table(2, B, grid, dir.string());
    CHECK(t1.vm_bar_half == t2.vm_bar_half);
    CHECK(t1.vmn_rel == tab.vmn_rel);
    fs::remove_all(dir);
}
