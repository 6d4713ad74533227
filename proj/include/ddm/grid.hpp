#pragma once

#include <vector>

namespace ddm {

// Uniform symmetric grid on [-L, L] with an odd node count, so z = 0 is a node.
struct ZGrid {
    double half_length = 0.0;
    int n = 0;

    ZGrid() = default;
    ZGrid(double half_length_, int n_);

    double spacing() const { return 2.0 * half_length / (n - 1); }
    double node(int j) const { return -half_length + j * spacing(); }
    int center_index() const { return (n - 1) / 2; }
};

struct TridiagonalOperator {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;  // size n-1

    int size() const { return static_cast<int>(diagonal.size()); }
    double inf_norm() const;
};

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;  // grid-normalized: sum v_j^2 h = 1
};

// h_m = -d^2/dz^2 - phi with a 3-point stencil and Dirichlet walls just
// outside the grid: diagonal_j = 2/h^2 - phi_j, off-diagonal = -1/h^2.
TridiagonalOperator build_hamiltonian(const std::vector<double>& phi, const ZGrid& grid);

// Number of eigenvalues of op strictly below x (Sturm / LDL^T sign count).
int sturm_count(const TridiagonalOperator& op, double x);

// The k algebraically smallest eigenvalues, ascending, via bisection.
// Resolved essentially to machine precision; deterministic.
std::vector<double> lowest_eigenvalues(const TridiagonalOperator& op, int k);

// Eigenvalues and vectors; vectors via inverse iteration, orthogonalized
// within close clusters, sign-fixed (first nonzero component positive) and
// normalized so that sum v_j^2 * grid_h = 1.
std::vector<Eigenpair> lowest_eigenpairs(const TridiagonalOperator& op, int k, double grid_h);

// |E(h) - E(h/2)|/3 style two-grid extrapolation estimate for a converged
// eigenvalue pair computed on grids h and h/2.
double richardson_estimate(double value_h, double value_half_h);

}  // namespace ddm
