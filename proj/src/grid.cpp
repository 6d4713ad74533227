#include "ddm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace ddm {

ZGrid::ZGrid(double half_length_, int n_) : half_length(half_length_), n(n_) {
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw std::invalid_argument("ZGrid: half_length must be positive and finite");
    if (n < 33 || n % 2 == 0)
        throw std::invalid_argument("ZGrid: node count must be odd and >= 33, got " + std::to_string(n));
}

double TridiagonalOperator::inf_norm() const {
    const int n = size();
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = std::fabs(diagonal[i]);
        if (i > 0) row += std::fabs(off_diagonal[i - 1]);
        if (i + 1 < n) row += std::fabs(off_diagonal[i]);
        norm = std::max(norm, row);
    }
    return norm;
}

TridiagonalOperator build_hamiltonian(const std::vector<double>& phi, const ZGrid& grid) {
    if (static_cast<int>(phi.size()) != grid.n)
        throw std::invalid_argument("build_hamiltonian: phi size does not match grid");
    for (double p : phi)
        if (!std::isfinite(p)) throw std::invalid_argument("build_hamiltonian: non-finite potential entry");
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    TridiagonalOperator op;
    op.diagonal.resize(grid.n);
    op.off_diagonal.assign(grid.n - 1, -inv_h2);
    for (int j = 0; j < grid.n; ++j) op.diagonal[j] = 2.0 * inv_h2 - phi[j];
    return op;
}

int sturm_count(const TridiagonalOperator& op, double x) {
    const int n = op.size();
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
        const double e2 = (i > 0) ? op.off_diagonal[i - 1] * op.off_diagonal[i - 1] : 0.0;
        d = (op.diagonal[i] - x) - e2 / d;
        if (d == 0.0) d = -tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

std::vector<double> lowest_eigenvalues(const TridiagonalOperator& op, int k) {
    const int n = op.size();
    if (k < 1 || k > n) throw std::invalid_argument("lowest_eigenvalues: k out of range");

    // Gershgorin enclosure of the whole spectrum.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::fabs(op.off_diagonal[i - 1]);
        if (i + 1 < n) r += std::fabs(op.off_diagonal[i]);
        lo = std::min(lo, op.diagonal[i] - r);
        hi = std::max(hi, op.diagonal[i] + r);
    }
    const double scale = std::max(std::fabs(lo), std::fabs(hi));
    const double eps = std::numeric_limits<double>::epsilon();

    std::vector<double> values(k);
    double left = lo;
    for (int j = 0; j < k; ++j) {
        // invariant: count(a) <= j, count(b) >= j+1
        double a = left, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;  // interval at machine resolution
            if (sturm_count(op, mid) >= j + 1)
                b = mid;
            else
                a = mid;
            if (b - a <= 4.0 * eps * std::max(scale, std::max(std::fabs(a), std::fabs(b)))) break;
        }
        values[j] = 0.5 * (a + b);
        left = a;  // eigenvalue j+1 cannot lie below a
    }
    return values;
}

namespace {

// Solve (T - sigma I) w = rhs in place by banded LU with partial pivoting
// (fill-in limited to a second superdiagonal). Zero pivots are replaced by a
// tiny value, the standard inverse-iteration practice for near-singular
// shifts.
struct ShiftedSolver {
    std::vector<double> dd, du, du2, mult;
    std::vector<char> piv;

    void factor(const TridiagonalOperator& op, double sigma) {
        const int n = op.size();
        dd.resize(n);
        du.assign(n, 0.0);
        du2.assign(n, 0.0);
        mult.assign(n, 0.0);
        piv.assign(n, 0);
        for (int i = 0; i < n; ++i) dd[i] = op.diagonal[i] - sigma;
        for (int i = 0; i + 1 < n; ++i) du[i] = op.off_diagonal[i];
        const double tiny = std::max(op.inf_norm(), 1.0) *
                            std::numeric_limits<double>::epsilon() * 1e-30;
        for (int i = 0; i + 1 < n; ++i) {
            const double sub = op.off_diagonal[i];
            if (std::fabs(dd[i]) >= std::fabs(sub)) {
                if (dd[i] == 0.0) dd[i] = tiny;
                const double m = sub / dd[i];
                mult[i] = m;
                dd[i + 1] -= m * du[i];
                du[i + 1] -= m * du2[i];
            } else {
                piv[i] = 1;
                const double m = dd[i] / sub;
                mult[i] = m;
                const double row_du = du[i], row_du2 = du2[i];
                dd[i] = sub;
                du[i] = dd[i + 1];
                du2[i] = du[i + 1];
                dd[i + 1] = row_du - m * du[i];
                du[i + 1] = row_du2 - m * du2[i];
            }
        }
        if (dd[n - 1] == 0.0) dd[n - 1] = tiny;
    }

    void solve(std::vector<double>& w) const {
        const int n = static_cast<int>(dd.size());
        for (int i = 0; i + 1 < n; ++i) {
            if (piv[i]) std::swap(w[i], w[i + 1]);
            w[i + 1] -= mult[i] * w[i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = w[i];
            if (i + 1 < n) s -= du[i] * w[i + 1];
            if (i + 2 < n) s -= du2[i] * w[i + 2];
            w[i] = s / dd[i];
        }
    }
};

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Deterministic generic start vector for inverse iteration. A constant start
// is even about the grid center and has only rounding-level overlap with odd
// eigenvectors, so a near-degenerate even neighbor can win the iteration.
// mt19937's output sequence is fixed by the standard, so identical input bits
// still give identical output bits on any platform.
void seed_start(std::vector<double>& v, int index, int attempt) {
    std::mt19937 gen(0x9e3779b9u + 2654435761u * static_cast<unsigned>(index) +
                     40503u * static_cast<unsigned>(attempt));
    for (double& x : v) x = static_cast<double>(gen()) * (2.0 / 4294967295.0) - 1.0;
    const double nv = l2_norm(v);
    for (double& x : v) x /= nv;
}

}  // namespace

std::vector<Eigenpair> lowest_eigenpairs(const TridiagonalOperator& op, int k, double grid_h) {
    const int n = op.size();
    if (!(grid_h > 0.0)) throw std::invalid_argument("lowest_eigenpairs: grid spacing must be positive");
    // one spare eigenvalue beyond k lets the slot guard below recognize an
    // iterate that converged onto the neighbor just outside the window
    const std::vector<double> values = lowest_eigenvalues(op, std::min(k + 1, n));
    const double norm_t = op.inf_norm();
    const double eps = std::numeric_limits<double>::epsilon();
    const double accept = 1e-10 * norm_t;
    const double same_value = 32.0 * eps * norm_t;  // below bisection resolution: one eigenvalue

    std::vector<Eigenpair> pairs(k);
    ShiftedSolver solver;
    for (int j = 0; j < k; ++j) {
        solver.factor(op, values[j]);
        std::vector<double> v(n);
        int attempt = 0;
        seed_start(v, j, attempt);
        bool ok = false;
        for (int step = 0; step < 50; ++step) {
            std::vector<double> w = v;
            solver.solve(w);
            // keep the computed block orthonormal: with a near-degenerate
            // neighbor the shift amplifies both members of the pair
            for (int p = 0; p < j; ++p) {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += w[i] * pairs[p].vector[i];
                dot *= grid_h;  // stored vectors are h-normalized
                for (int i = 0; i < n; ++i) w[i] -= dot * pairs[p].vector[i];
            }
            const double nw = l2_norm(w);
            if (!(nw > 0.0) || !std::isfinite(nw)) {
                seed_start(v, j, ++attempt);
                continue;
            }
            for (double& x : w) x /= nw;
            // residual ||T w - mu w|| and Rayleigh quotient w^T T w
            double res = 0.0, ray = 0.0;
            for (int i = 0; i < n; ++i) {
                double t = op.diagonal[i] * w[i];
                if (i > 0) t += op.off_diagonal[i - 1] * w[i - 1];
                if (i + 1 < n) t += op.off_diagonal[i] * w[i + 1];
                ray += w[i] * t;
                t -= values[j] * w[i];
                res += t * t;
            }
            res = std::sqrt(res);
            v = w;
            if (res <= accept) {
                // a small residual alone cannot tell a near-degenerate neighbor
                // from the target: require the Rayleigh quotient to sit closest
                // to the eigenvalue this slot is for
                bool right_slot = true;
                for (int p = 0; p < static_cast<int>(values.size()); ++p) {
                    if (p == j || std::fabs(values[p] - values[j]) <= same_value) continue;
                    if (std::fabs(ray - values[p]) < 0.25 * std::fabs(ray - values[j])) {
                        right_slot = false;
                        break;
                    }
                }
                if (right_slot) {
                    ok = true;
                    break;
                }
                seed_start(v, j, ++attempt);  // converged onto a neighbor: restart
            }
        }
        if (!ok)
            throw std::runtime_error("inverse iteration failed to converge for eigenvalue index " +
                                     std::to_string(j));
        // sign convention: first nonzero component positive
        for (int i = 0; i < n; ++i) {
            if (v[i] != 0.0) {
                if (v[i] < 0.0)
                    for (double& x : v) x = -x;
                break;
            }
        }
        // grid normalization sum v^2 h = 1 (v is currently l2-normalized)
        const double s = 1.0 / std::sqrt(grid_h);
        for (double& x : v) x *= s;
        pairs[j].value = values[j];
        pairs[j].vector = std::move(v);
    }
    return pairs;
}

double richardson_estimate(double value_h, double value_half_h) {
    return std::fabs(value_h - value_half_h) / 3.0;
}

}  // namespace ddm
