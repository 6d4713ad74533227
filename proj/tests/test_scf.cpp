#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "ddm/meanfield.hpp"
#include "ddm/scf.hpp"
#include "doctest.h"
#include "oracles.hpp"

using ddm::ScfConfig;
using ddm::SolveReport;
using ddm::ZGrid;
using oracles::near;

namespace {

ScfConfig explicit_grid(double L, int n) {
    ScfConfig cfg;
    cfg.grid.automatic = false;
    cfg.grid.half_length = L;
    cfg.grid.n = n;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("aufbau_fill pinned examples") {
    using Spectra = std::map<int, std::vector<double>>;
    const Spectra sp{{0, {-2.0, -1.0, 3.0}}, {1, {-1.5}}};

    auto occ = ddm::aufbau_fill(sp, 2.0);
    CHECK(occ[0] == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(occ[1] == std::vector<double>{1.0});

    occ = ddm::aufbau_fill(sp, 2.5);
    CHECK(occ[0] == std::vector<double>{1.0, 0.5, 0.0});
    CHECK(occ[1] == std::vector<double>{1.0});

    // positive levels never fill, whatever the budget
    occ = ddm::aufbau_fill(sp, 10.0);
    CHECK(occ[0] == std::vector<double>{1.0, 1.0, 0.0});
    CHECK(occ[1] == std::vector<double>{1.0});

    // degenerate levels: smaller m first, then smaller index
    occ = ddm::aufbau_fill(Spectra{{0, {-1.0}}, {1, {-1.0}}}, 1.0);
    CHECK(occ[0] == std::vector<double>{1.0});
    CHECK(occ[1] == std::vector<double>{0.0});
    occ = ddm::aufbau_fill(Spectra{{0, {-1.0, -1.0}}}, 1.0);
    CHECK(occ[0] == std::vector<double>{1.0, 0.0});

    occ = ddm::aufbau_fill(sp, 0.0);
    CHECK(occ[0] == std::vector<double>{0.0, 0.0, 0.0});
    CHECK_THROWS_AS(ddm::aufbau_fill(Spectra{{0, {std::nan("")}}}, 1.0), std::invalid_argument);
}

TEST_CASE("scf_solve validates its inputs") {
    ScfConfig cfg;
    CHECK_THROWS_AS(ddm::scf_solve(0.0, 1.0, 2.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(ddm::scf_solve(1.0, -1.0, 2.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(ddm::scf_solve(1.0, 1.0, 0.0, cfg), std::invalid_argument);
    ScfConfig bad = explicit_grid(10.0, 257);
    bad.energy_tol = 0.0;
    CHECK_THROWS_AS(ddm::scf_solve(1.0, 1.0, 2.0, bad), std::invalid_argument);
    // table must cover every needed channel
    const ddm::PotentialTable tab = ddm::build_table(0, 2.0, ZGrid{10.0, 257});
    CHECK_THROWS_AS(ddm::scf_solve_on_grid(2.5, 3.0, 2.0, ScfConfig{}, tab, nullptr),
                    std::length_error);
    CHECK_THROWS_AS(ddm::energy_curve(1.0, 2.0, {}, cfg), std::invalid_argument);
}

TEST_CASE("single electron matches an independent conjugate-gradient minimizer") {
    // same discrete functional, minimized without any eigensolver or aufbau
    const ZGrid g{20.0, 513};
    const ddm::PotentialTable tab = ddm::build_table(0, 2.0, g);
    std::vector<double> attr(g.n);
    for (int j = 0; j < g.n; ++j) attr[j] = tab.vm_bar_at(0, j);
    oracles::OrbitalFunctional of;
    of.n = g.n;
    of.h = g.spacing();
    of.Z = 1.0;
    of.attraction = &attr;
    of.kernel = &tab.vmn_kernel(0, 0);
    std::vector<double> psi(g.n);
    for (int j = 0; j < g.n; ++j) psi[j] = std::exp(-0.8 * std::fabs(g.node(j)));
    const double e_oracle = of.minimize(psi);

    ScfConfig cfg = explicit_grid(20.0, 513);
    cfg.energy_tol = 1e-12;
    const SolveReport rep = ddm::scf_solve(1.0, 1.0, 2.0, cfg);
    REQUIRE(rep.converged);
    CHECK(near(rep.energy.total, e_oracle, 5e-6));
    CHECK(rep.energy.total <= e_oracle + 1e-9);  // scf must not land above the cg minimum
}

TEST_CASE("vanishing filling is first-order perturbative") {
    const double N = 1e-8;
    ScfConfig cfg;
    cfg.threads = 1;
    const SolveReport rep = ddm::scf_solve(N, 1.0, 2.0, cfg);
    REQUIRE(rep.converged);
    // bare ground level of -d2 - V0bar on the same grid
    const ddm::PotentialTable tab = ddm::build_table(0, 2.0, rep.grid);
    std::vector<double> phi(rep.grid.n);
    for (int j = 0; j < rep.grid.n; ++j) phi[j] = tab.vm_bar_at(0, j);
    const double e0 = ddm::lowest_eigenvalues(ddm::build_hamiltonian(phi, rep.grid), 1)[0];
    CHECK(near(rep.energy.total / N, e0, 1e-6));
    CHECK(near(rep.mu, e0, 1e-6));
    CHECK(near(rep.filled, N, 1e-9));
}

TEST_CASE("neutral hydrogenic solve reproduces frozen reference values") {
    // cross-checked against an independent damped fixed-point solver on the
    // same table (agreement 2e-13)
    ScfConfig cfg;
    cfg.threads = 1;
    const SolveReport rep = ddm::scf_solve(1.0, 1.0, 2.0, cfg);
    REQUIRE(rep.converged);
    CHECK(near(rep.energy.total, -0.453075029191259, 1e-9));
    CHECK(near(rep.mu, -0.16027860550615602, 1e-8));
    CHECK(near(rep.filled, 1.0, 1e-12));
    CHECK(ddm::chemical_potential(rep) == rep.mu);
    CHECK(rep.energy_residual <= cfg.energy_tol * std::max(1.0, std::fabs(rep.energy.total)));
    CHECK(rep.mu < 0.0);
    CHECK(static_cast<int>(rep.channels.size()) == 1);

    // energy split adds up and the (negative) attraction term dominates;
    // at Z = 1 the charge derivative equals the attraction term itself
    CHECK(near(rep.energy.total,
               rep.energy.kinetic + rep.energy.attraction + rep.energy.direct, 1e-12));
    CHECK(rep.energy.kinetic > 0.0);
    CHECK(rep.energy.attraction < 0.0);
    CHECK(rep.energy.direct > 0.0);
    CHECK(-rep.energy.attraction > rep.energy.kinetic + rep.energy.direct);
    CHECK(near(rep.dEdZ, rep.energy.attraction, 1e-10));

    // the self-consistent kinetic identity and the variational trace bound
    CHECK(rep.kinetic_check < 1e-8 * std::max(1.0, rep.energy.kinetic));
    double sqrt_kin = 0.0;
    for (const auto& ch : rep.channels) {
        std::vector<double> s(rep.grid.n);
        for (int j = 0; j < rep.grid.n; ++j) s[j] = std::sqrt(std::max(0.0, ch.density[j]));
        sqrt_kin = ddm::dirichlet_form(s, rep.grid.spacing());
    }
    CHECK(sqrt_kin <= rep.energy.kinetic + 1e-8);

    // energy trace is monotone up to roundoff
    for (std::size_t i = 1; i < rep.energy_trace.size(); ++i)
        CHECK(rep.energy_trace[i] <=
              rep.energy_trace[i - 1] + 1e-13 * std::fabs(rep.energy_trace[i - 1]));
}

TEST_CASE("auto grid is converged against one more doubling") {
    ScfConfig cfg;
    cfg.threads = 1;
    const SolveReport rep = ddm::scf_solve(1.0, 1.0, 2.0, cfg);
    CHECK(rep.richardson > 0.0);
    ScfConfig fine = explicit_grid(rep.grid.half_length, 2 * rep.grid.n - 1);
    const SolveReport rep2 = ddm::scf_solve(1.0, 1.0, 2.0, fine);
    CHECK(std::fabs(rep2.energy.total - rep.energy.total) <
          4.0 * rep.richardson + 4.0 * cfg.energy_tol * std::fabs(rep.energy.total));
}

TEST_CASE("converged occupations are a fixed point of aufbau_fill") {
    ScfConfig cfg = explicit_grid(30.0, 2049);
    const SolveReport rep = ddm::scf_solve(2.0, 2.0, 10.0, cfg);
    REQUIRE(rep.converged);
    REQUIRE(rep.mu < 0.0);  // sub-critical
    std::map<int, std::vector<double>> spectra;
    for (std::size_t m = 0; m < rep.mu_table.size(); ++m)
        spectra[static_cast<int>(m)] = rep.mu_table[m];
    const auto occ = ddm::aufbau_fill(spectra, rep.N);
    for (std::size_t m = 0; m < rep.channels.size(); ++m) {
        REQUIRE(occ.count(static_cast<int>(m)) == 1);
        CHECK(rep.channels[m].occupations == occ.at(static_cast<int>(m)));
    }
    // per-channel eigenvalues ascend; occupations are monotone with one
    // fractional level at most
    int fractional = 0;
    for (const auto& ch : rep.channels) {
        for (std::size_t i = 1; i < ch.occupations.size(); ++i)
            CHECK(ch.occupations[i] <= ch.occupations[i - 1]);
        for (double f : ch.occupations) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            if (f > 0.0 && f < 1.0) ++fractional;
        }
    }
    CHECK(fractional <= 1);
    for (const auto& mus : rep.mu_table)
        for (std::size_t i = 1; i < mus.size(); ++i) CHECK(mus[i] >= mus[i - 1]);
    // Hoffmann-Ostenhof: kinetic energy of sqrt(rho_m) below the channel trace
    for (const auto& ch : rep.channels) {
        std::vector<double> s(rep.grid.n);
        for (int j = 0; j < rep.grid.n; ++j) s[j] = std::sqrt(std::max(0.0, ch.density[j]));
        double chan_kin = 0.0;
        for (std::size_t i = 0; i < ch.occupations.size(); ++i)
            chan_kin +=
                ch.occupations[i] * ddm::dirichlet_form(ch.eigenpairs[i].vector, rep.grid.spacing());
        CHECK(ddm::dirichlet_form(s, rep.grid.spacing()) <= chan_kin + 1e-8);
    }
}

TEST_CASE("over-critical filling hits the ionization plateau") {
    ScfConfig cfg = explicit_grid(70.5, 16385);
    const SolveReport rep = ddm::scf_solve(2.0, 1.0, 10.0, cfg);
    REQUIRE(rep.converged);
    CHECK(rep.mu == 0.0);
    CHECK(rep.filled < rep.N);
    CHECK(near(rep.filled, 1.122600570301375, 1e-6));
    CHECK(near(rep.energy.total, -0.8041801985019893, 1e-8));
    int fractional = 0, occupied = 0;
    for (const auto& ch : rep.channels)
        for (double f : ch.occupations) {
            if (f > 0.0) ++occupied;
            if (f > 0.0 && f < 1.0) ++fractional;
        }
    CHECK(fractional == 1);
    CHECK(occupied == 2);
    CHECK(rep.kinetic_check < 1e-6 * std::max(1.0, rep.energy.kinetic));
}

TEST_CASE("energy_curve is monotone, convex, and warm-start neutral") {
    ScfConfig cfg;
    cfg.threads = 1;
    const std::vector<double> ns{0.5, 1.0, 1.5, 2.0};
    const auto curve = ddm::energy_curve(2.0, 10.0, ns, cfg);
    REQUIRE(curve.size() == 4);
    for (const auto& r : curve) {
        REQUIRE(r.converged);
        CHECK(r.grid.n == curve[0].grid.n);  // one shared grid, sized at max N
        CHECK(r.grid.half_length == curve[0].grid.half_length);
    }
    for (int i = 1; i < 4; ++i) {
        CHECK(curve[i].energy.total <=
              curve[i - 1].energy.total + 1e-10 * std::fabs(curve[i - 1].energy.total));
        CHECK(curve[i].mu >= curve[i - 1].mu - 1e-7);  // mu rises toward zero
    }
    for (int i = 1; i + 1 < 4; ++i) {
        const double d2 = curve[i + 1].energy.total - 2.0 * curve[i].energy.total +
                          curve[i - 1].energy.total;
        CHECK(d2 >= -1e-8);
    }
    // a cold solve on the same grid lands on the same energy
    ScfConfig cold = explicit_grid(curve[0].grid.half_length, curve[0].grid.n);
    const SolveReport alone = ddm::scf_solve(1.5, 2.0, 10.0, cold);
    CHECK(std::fabs(alone.energy.total - curve[2].energy.total) <=
          2.0 * cfg.energy_tol * std::fabs(alone.energy.total));
}

TEST_CASE("bare ground level approaches the hyper-strong log scaling") {
    // e0(B) / (-(ln B)^2 / 4) climbs toward 1 as B grows; the approach is
    // logarithmically slow, so only the ordering over decades is asserted
    double prev = 0.0;
    for (double B : {1e4, 1e6, 1e8}) {
        const ZGrid g{10.0, 2049};
        std::vector<double> phi(g.n);
        for (int j = 0; j < g.n; ++j)
            phi[j] = oracles::cell_average([&](double z) { return ddm::eval_vm(0, B, z); },
                                           g.node(j), g.spacing());
        const double e0 = ddm::lowest_eigenvalues(ddm::build_hamiltonian(phi, g), 1)[0];
        const double ratio = e0 / (-0.25 * std::log(B) * std::log(B));
        CHECK(ratio > prev);
        CHECK(ratio < 1.0);
        prev = ratio;
    }
    CHECK(prev > 0.5);
}
