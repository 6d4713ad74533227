#pragma once

#include <utility>
#include <vector>

#include "ddm/scf.hpp"

namespace ddm {

struct NcritReport {
    double Z = 0.0, B = 0.0;
    double n_critical = 0.0;
    double lower_bound = 0.0;  // = Z
    double upper_bound = 0.0;  // = 4Z - (1/N_c) dE/dZ at N_c
    std::vector<std::pair<double, double>> mu_trace;  // (N, mu) samples, ascending N
    bool rank_flag = false;    // all channel occupancies <= 1 at N_c
    SolveReport at_ncrit;      // converged solve at N = n_critical
};

// Locate the ionization plateau: bisection over [Z, 8Z] for the smallest N
// with mu(N) >= -1e-7 Z^2 and a flat energy E(N + delta) - E(N) within
// tolerance. All solves share one enlarged fixed grid (the wall-density
// criterion is unusable near threshold where the marginal orbital decays
// arbitrarily slowly).
NcritReport find_ncrit(double Z, double B, double tol_N, const ScfConfig& config);

struct RankOneResult {
    bool rank_one = false;          // every channel holds at most one level with f > 1e-8
    double second_level_max = 0.0;  // worst channel's second-highest occupation
};

RankOneResult rank_one_check(const SolveReport& report);

// |mu - mu_{ceil(N)-1}^1|: in the rank-1 regime the chemical potential is the
// lowest eigenvalue of the last occupied channel.
double chemical_potential_identity_check(const SolveReport& report);

}  // namespace ddm
