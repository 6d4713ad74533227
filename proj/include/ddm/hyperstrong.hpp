#pragma once

#include <vector>

namespace ddm {

struct ScfConfig;
struct SolveReport;

// tanh c(lambda) = (2 - lambda)/2, i.e. c = (1/2) ln((4-lambda)/lambda); lambda < 2.
double hs_c_of_lambda(double lambda);

// The explicit hyper-strong minimizer:
//   lambda < 2: rho(z) = (2-lambda)^2 / (8 sinh^2((2-lambda)|z|/4 + c(lambda)))
//   lambda >= 2: rho(z) = 2 (2+|z|)^-2
double hs_minimizer(double lambda, double z);

// E^HS(lambda): kinetic of sqrt(rho) - rho(0) + (1/2) int rho^2, evaluated on
// the closed-form minimizer by adaptive quadrature.
double hs_energy(double lambda);

// L(eta) solving sqrt(eta) = L sinh(L/2), Newton from
// max(2 ln(1+sqrt(eta)), sqrt(2) eta^(1/4)), residual 1e-12 max(1, sqrt(eta)).
double l_of_eta(double eta);

struct HsStudyRow {
    double eta = 0.0;
    double energy = 0.0;     // E^DDM(lambda Z, Z, eta Z^3)
    double r = 0.0;          // E^DDM / (Z^3 ln^2 eta)
    double gap = 0.0;        // |r - E^HS(lambda)|
    bool converged = false;
};

// For each eta: solve the DDM problem at (lambda Z, Z, eta Z^3) and report the
// rescaled energy against E^HS(lambda). Entries are independent and run on
// `threads` workers; rows come back in input order.
std::vector<HsStudyRow> hs_convergence_study(double lambda, double Z,
                                             const std::vector<double>& etas,
                                             const ScfConfig& config, int threads = 1);

// Weak-L1 discrepancy between the rescaled DDM density and rho^HS, paired
// against 5 fixed smooth bumps spanning [-8, 8] in HS coordinates.
double hs_density_comparison(double lambda, double Z, double eta, const ScfConfig& config);

// The same discrepancy computed from an existing converged report.
double hs_density_discrepancy(double lambda, double Z, double eta, const SolveReport& report);

}  // namespace ddm
