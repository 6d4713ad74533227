#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddm/meanfield.hpp"

namespace ddm {

struct GridPolicy {
    bool automatic = true;
    double half_length = 0.0;  // used when automatic == false
    int n = 0;
};

struct ScfConfig {
    double energy_tol = 1e-9;   // relative energy change
    double density_tol = 1e-7;  // L1 residual of the applied density update
    int max_iter = 500;
    int eigen_count = 0;        // 0 = auto: min(ceil(N)+2, 12), grown on demand
    int threads = 0;            // channel-level workers; 0 = hardware count
    GridPolicy grid;
    std::string cache_dir;      // potential-table cache directory ("" = off)
};

struct SolveReport {
    double N = 0.0, Z = 0.0, B = 0.0;
    EnergyBreakdown energy;
    double mu = 0.0;
    std::vector<ChannelState> channels;          // converged eigenpairs + occupations
    std::vector<std::vector<double>> mu_table;   // per-channel computed eigenvalues
    DensityProfile density;                      // density of the reported state
    int iterations = 0;
    bool converged = false;
    double energy_residual = 0.0;
    double density_residual = 0.0;
    ZGrid grid;
    double dEdZ = 0.0;
    double filled = 0.0;         // sum of occupations (= min(N, N_c) at convergence)
    double kinetic_check = 0.0;  // two-way kinetic agreement diagnostic
    double richardson = 0.0;     // |E(h) - E(h/2)|/3 two-grid estimate (auto grid)
    std::vector<double> energy_trace;  // mixture energy per iteration (nonincreasing)
};

// Fill the lowest strictly-negative levels across channels with unit weight
// until the budget N is spent; the last level gets the fractional remainder.
// Ties broken by smaller m, then smaller level index.
std::map<int, std::vector<double>> aufbau_fill(const std::map<int, std::vector<double>>& spectra,
                                               double N);

SolveReport scf_solve(double N, double Z, double B, const ScfConfig& config);

// Fixed-grid entry sharing a prebuilt table; warm_start (may be null) seeds
// the first effective potential.
SolveReport scf_solve_on_grid(double N, double Z, double B, const ScfConfig& config,
                              const PotentialTable& table, const DensityProfile* warm_start);

// Batch of solves sharing one table and grid (auto-sized at the largest N),
// warm-starting each N from the previous one in the list.
std::vector<SolveReport> energy_curve(double Z, double B, const std::vector<double>& n_values,
                                      const ScfConfig& config);

double chemical_potential(const SolveReport& report);

}  // namespace ddm
