#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "ddm/landau.hpp"

namespace ddm {

// Channel densities rho_m on the grid, indexed by m = 0..channels-1.
struct DensityProfile {
    std::vector<std::vector<double>> rho;

    int channels() const { return static_cast<int>(rho.size()); }
    double particle_number(const ZGrid& grid) const;
};

// One angular-momentum channel of the minimizer: eigenpairs of h_m with
// occupations f in [0,1], weakly decreasing, at most one fractional.
struct ChannelState {
    int m = 0;
    std::vector<Eigenpair> eigenpairs;
    std::vector<double> occupations;
    std::vector<double> density;

    void rebuild_density(int grid_n);
};

struct EnergyBreakdown {
    double kinetic = 0.0;
    double attraction = 0.0;
    double direct = 0.0;
    double total = 0.0;
};

double trapezoid(const std::vector<double>& f, double h);

// Dirichlet quadratic form sum (v_{j+1}-v_j)^2 / h with zero walls; equals
// h * v^T (-Laplacian) v, i.e. the kinetic energy of a grid-normalized state.
double dirichlet_form(const std::vector<double>& v, double h);

// W_m(z_j) = sum_n sum_k V_{m,n}(z_j - z_k) rho_n(z_k) w_k h.
std::vector<double> hartree_potential(int m, const DensityProfile& rho, const PotentialTable& table);

// Precomputed kernel transforms for repeated hartree assembly on one table.
// In the FFT regime each V_{m,n} kernel is padded and transformed once here;
// every hartree_all call then needs only one forward transform per source
// channel and one inverse transform per output channel. Below the direct
// threshold (len == 0) assembly falls back to direct summation unchanged.
struct HartreePlan {
    const PotentialTable* table = nullptr;
    int channels = 0;
    int threads = 1;  // workers for per-channel assembly (independent slots)
    int len = 0;      // padded transform length, 0 in the direct regime
    std::vector<std::vector<std::complex<double>>> kernel_fft;  // (m<=n) packed
};

HartreePlan make_hartree_plan(const PotentialTable& table, int channels, int threads = 1);

// All channels at once (shares the source transforms in the FFT regime).
std::vector<std::vector<double>> hartree_all(const DensityProfile& rho, const PotentialTable& table);
std::vector<std::vector<double>> hartree_all(const DensityProfile& rho, const HartreePlan& plan);

// Phi_m = Z V_m - W_m.
std::vector<double> effective_potential(int m, double Z, const DensityProfile& rho,
                                        const PotentialTable& table);

// D~(rho, rho) = 1/2 sum_m int rho_m W_m.
double direct_energy(const DensityProfile& rho, const PotentialTable& table);

// Explicit O(M^2 n^2) double sum, for cross-checks; `transposed` swaps the
// loop nesting. Canonical per-pair evaluation makes both orders bitwise equal.
double direct_energy_double_sum(const DensityProfile& rho, const PotentialTable& table,
                                bool transposed);

DensityProfile density_of(const std::vector<ChannelState>& channels);

EnergyBreakdown total_energy(const std::vector<ChannelState>& channels, double Z,
                             const PotentialTable& table, const ZGrid& grid);

// |kinetic via Dirichlet forms - kinetic via sum f mu + sum int Phi rho|;
// the two agree (1e-8) only at self-consistency, so this is a diagnostic.
double kinetic_consistency(const std::vector<ChannelState>& channels, double Z,
                           const PotentialTable& table, const ZGrid& grid);

// -sum_m int V_m rho_m (the Feynman-Hellmann dE/dZ at the minimizer).
double dE_dZ(const DensityProfile& rho, const PotentialTable& table);

// 3D density rho~(r, z) = sum_m (B/2pi) u^m e^-u / m! * rho_m(z), u = B r^2/2,
// with linear interpolation of rho_m between grid nodes.
std::vector<double> density3d(const DensityProfile& rho, double B, const ZGrid& grid,
                              const std::vector<std::pair<double, double>>& rz_points);

// Convolution backends. kernel[d] = K(d h), d in [0, n); src is already
// quadrature-weighted. Direct summation below the size threshold,
// radix-2 FFT above (they agree to 1e-10; see tests).
std::vector<double> convolve_direct(const std::vector<double>& kernel, const std::vector<double>& src);
std::vector<double> convolve_fft(const std::vector<double>& kernel, const std::vector<double>& src);

// grid sizes up to this use direct summation in hartree assembly
inline constexpr int kDirectConvolutionMaxNodes = 2049;

}  // namespace ddm
