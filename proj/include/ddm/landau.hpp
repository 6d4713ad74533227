#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ddm/grid.hpp"

namespace ddm {

// V_m(z) = (1/m!) integral_0^inf u^m e^-u (2u/B + z^2)^(-1/2) du.
// Generalized Gauss-Laguerre quadrature against the weight u^m e^-u with
// adaptive node doubling (64, 128, ...) until the relative change is < 1e-10.
// For B z^2/2 <= 1/2 the quadrature's branch point sits too close to the
// origin for that to converge, and the closed form
//   V_m = sqrt(B/2) F_m(beta)/m!,  F_0 = sqrt(pi) e^beta erfc(sqrt(beta)),
//   F_1 = sqrt(beta) + (1/2 - beta) F_0,
//   F_{k+1} = ((2k+1-2beta) F_k + 2k beta F_{k-1}) / 2
// is used instead (forward-stable there; the two branches agree to ~1e-13
// across the crossover). Once the Jensen sandwich pinches below 1e-12
// relative width the bound midpoint is returned directly.
double eval_vm(int m, double B, double z);

// Jensen sandwich bounds: lower (z^2 + 2(m+1)/B)^(-1/2),
// upper (z^2 + 2m/B)^(-1/2), read as 1/|z| for m = 0.
double vm_lower_bound(int m, double B, double z);
double vm_upper_bound(int m, double B, double z);

struct PairCoefficients {
    int m = 0, n = 0;
    std::vector<double> c;  // size m+n+1, c_i >= 0, sum = 1
};

// c_i = a_i^2 i! (m+n-i)! / (m! n! 2^(m+n)) with a_i the coefficient of
// y^i x^(m+n-i) in (x+y)^m (x-y)^n, expanded in exact 64-bit integers for
// m+n <= 60 and in log-space beyond.
PairCoefficients pair_coefficients(int m, int n);

// V_{m,n}(z) = (1/sqrt 2) sum_i c_i V_i(z/sqrt 2), same field strength B.
double eval_vmn(int m, int n, double B, double z);

// integral |phi_m|^2 |phi_n|^2 d^2x = (B/2pi) (m+n)! / (m! n! 2^(m+n+1)).
double orbital_overlap(int m, int n, double B);

// The discrete Hamiltonian and all quadratures consume cell-averaged
// potential values (1/h) int_{z-h/2}^{z+h/2} V: the potentials have a core of
// width ~B^(-1/2) that node sampling misrepresents whenever h cannot resolve
// it (strong fields), while cell averages keep the discrete energy O(h^2)
// accurate for smooth densities. Pointwise values are kept alongside for
// tabulation-consistency checks and the vm-table output.
struct PotentialTable {
    double B = 0.0;
    ZGrid grid;
    int max_m = -1;
    // half-storage: index j = 0 corresponds to z = 0, j = n_half-1 to z = L.
    std::vector<std::vector<double>> vm_half;      // pointwise V_m, [m][j]
    std::vector<std::vector<double>> vm_bar_half;  // cell-averaged V_m, [m][j]
    // cell-averaged V_{m,n} on the relative-difference lattice d*h, d in
    // [0, n); stored for ordered pairs m <= n at flat index pair_index(m, n).
    std::vector<std::vector<double>> vmn_rel;

    int n_half() const { return (grid.n + 1) / 2; }
    int pair_index(int m, int n) const;
    // V_m at full-grid node j (mirrored from the stored half).
    double vm_at(int m, int j) const;
    double vm_bar_at(int m, int j) const;
    // cell-averaged V_{m,n}(|j - k| * h).
    double vmn_at(int m, int n, int dist) const;
    const std::vector<double>& vmn_kernel(int m, int n) const;
};

// Tabulates vm for 0 <= m <= max_m on the grid and vmn for all pairs
// m, n <= max_m on the relative lattice. Deterministic. Throws
// std::length_error naming the offending dimensions if the estimated
// footprint exceeds the memory budget (default 4 GiB).
PotentialTable build_table(int max_m, double B, const ZGrid& grid,
                           std::size_t memory_budget_bytes = std::size_t(4) << 30);

// Binary table cache: little-endian IEEE-754 doubles with a versioned header.
// The key is an FNV-1a hash over (format version, B bits, grid, max_m).
std::string table_cache_key(int max_m, double B, const ZGrid& grid);
void save_table(const PotentialTable& table, const std::string& path);
bool load_table(PotentialTable& table, const std::string& path, int max_m, double B,
                const ZGrid& grid);

// Table-backed or cache-backed construction: tries cache_dir (if nonempty),
// builds and stores on miss.
PotentialTable load_or_build_table(int max_m, double B, const ZGrid& grid,
                                   const std::string& cache_dir);

}  // namespace ddm
