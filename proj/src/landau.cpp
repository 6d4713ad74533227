#include "ddm/landau.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace ddm {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_vm_args(int m, double B, double z) {
    if (m < 0) throw std::invalid_argument("eval_vm: negative angular index");
    if (!(B > 0.0) || !std::isfinite(B)) throw std::invalid_argument("eval_vm: B must be positive");
    if (!std::isfinite(z)) throw std::invalid_argument("eval_vm: non-finite z");
}

struct QuadRule {
    std::vector<double> x, w;  // weights normalized: sum w = 1
};

// Orthonormal polynomials for the weight u^alpha e^-u / Gamma(alpha+1):
// x p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1}, b_k = 2k+alpha+1,
// a_k = sqrt(k (k+alpha)). Returns p_n, p_n' and the Christoffel sum
// S = sum_{k<n} p_k^2 as mantissa s with p scaled by 2^e (S = s * 2^(2e)).
struct OrthoEval {
    double pn, dpn, s;
    int e;
};

OrthoEval ortho_eval(double alpha, int n, double x) {
    double pkm = 0.0, pk = 1.0, dkm = 0.0, dk = 0.0, s = 1.0;
    int e = 0;
    for (int k = 0; k < n; ++k) {
        const double ak1 = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
        const double ak = (k > 0) ? std::sqrt(k * (k + alpha)) : 0.0;
        const double bk = 2.0 * k + alpha + 1.0;
        const double pk1 = ((x - bk) * pk - ak * pkm) / ak1;
        const double dk1 = ((x - bk) * dk + pk - ak * dkm) / ak1;
        pkm = pk;
        pk = pk1;
        dkm = dk;
        dk = dk1;
        if (k < n - 1) s += pk * pk;
        if (std::fabs(pk) > 1e120) {
            const double f = 0x1p-140;
            pkm *= f;
            pk *= f;
            dkm *= f;
            dk *= f;
            s *= f * f;
            e += 140;
        }
    }
    return {pk, dk, s, e};
}

// Gauss rule for the normalized weight u^alpha e^-u / Gamma(alpha+1):
// Golub-Welsch eigenvalues of the Jacobi matrix, Newton-polished, weights
// from the Christoffel function w_i = 1 / sum_k p_k(x_i)^2 (relative
// accuracy even for far-tail nodes, unlike squared eigenvector components).
QuadRule make_rule(double alpha, int n) {
    TridiagonalOperator jac;
    jac.diagonal.resize(n);
    jac.off_diagonal.resize(n - 1);
    for (int k = 0; k < n; ++k) jac.diagonal[k] = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < n; ++k) jac.off_diagonal[k - 1] = std::sqrt(k * (k + alpha));
    QuadRule rule;
    rule.x = lowest_eigenvalues(jac, n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double xi = rule.x[i];
        for (int it = 0; it < 3; ++it) {
            const OrthoEval oe = ortho_eval(alpha, n, xi);
            if (oe.dpn == 0.0) break;
            const double step = oe.pn / oe.dpn;
            xi -= step;
            if (std::fabs(step) <= 1e-15 * std::fabs(xi)) break;
        }
        const OrthoEval oe = ortho_eval(alpha, n, xi);
        rule.x[i] = xi;
        rule.w[i] = std::exp2(-2.0 * oe.e) / oe.s;
    }
    return rule;
}

const QuadRule& cached_rule(int m, int n) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({m, n});
    if (it == cache.end()) it = cache.emplace(std::make_pair(m, n), make_rule(m, n)).first;
    return it->second;
}

double vm_fixed_rule(int m, double B, double z, int n) {
    const QuadRule& rule = cached_rule(m, n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.w[i] / std::sqrt(2.0 * rule.x[i] / B + z * z);
    return s;
}

// Closed-form branch for beta = B z^2 / 2 <= 1/2.
double vm_recurrence(int m, double B, double beta) {
    const double f0 = std::sqrt(kPi) * std::exp(beta) * std::erfc(std::sqrt(beta));
    double f = f0;
    if (m >= 1) {
        double fk = std::sqrt(beta) + (0.5 - beta) * f0;
        double fkm = f0;
        for (int k = 1; k < m; ++k) {
            const double fk1 = ((2.0 * k + 1.0 - 2.0 * beta) * fk + 2.0 * k * beta * fkm) / 2.0;
            fkm = fk;
            fk = fk1;
        }
        f = fk;
    }
    return std::sqrt(B / 2.0) * f * std::exp(-std::lgamma(m + 1.0));
}

// exact binomial table up to C(60,30); higher orders go through lgamma
int64_t binom_exact(int n, int k) {
    static const auto table = [] {
        std::vector<std::vector<int64_t>> t(61);
        for (int i = 0; i <= 60; ++i) {
            t[i].resize(i + 1);
            t[i][0] = t[i][i] = 1;
            for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
        }
        return t;
    }();
    return table[n][k];
}

}  // namespace

double vm_lower_bound(int m, double B, double z) {
    return 1.0 / std::sqrt(z * z + 2.0 * (m + 1) / B);
}

double vm_upper_bound(int m, double B, double z) {
    if (m == 0) return z != 0.0 ? 1.0 / std::fabs(z) : std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(z * z + 2.0 * m / B);
}

double eval_vm(int m, double B, double z) {
    check_vm_args(m, B, z);
    const double lo = vm_lower_bound(m, B, z);
    const double hi = vm_upper_bound(m, B, z);
    const double mid = 0.5 * (lo + hi);
    if (std::isfinite(hi) && hi - lo <= 1e-12 * mid) return mid;

    const double beta = 0.5 * B * z * z;
    if (beta <= 0.5) return vm_recurrence(m, B, beta);

    int n = 64;
    double prev = vm_fixed_rule(m, B, z, n);
    while (n < 8192) {
        n *= 2;
        const double cur = vm_fixed_rule(m, B, z, n);
        if (std::fabs(cur - prev) <= 1e-10 * std::fabs(cur)) return cur;
        prev = cur;
    }
    throw std::runtime_error("eval_vm: quadrature failed to converge (m=" + std::to_string(m) + ")");
}

PairCoefficients pair_coefficients(int m, int n) {
    if (m < 0 || n < 0) throw std::invalid_argument("pair_coefficients: negative index");
    const int mn = m + n;
    PairCoefficients pc;
    pc.m = m;
    pc.n = n;
    pc.c.assign(mn + 1, 0.0);

    if (mn <= 128) {
        // coefficients of (x+y)^m (x-y)^n in exact 128-bit integers:
        // a_i multiplies y^i x^(mn-i); every intermediate is bounded by
        // C(128, 64) ~ 2.4e37, inside the signed 128-bit range
        const auto pascal_row = [](int k) {
            std::vector<unsigned __int128> r(k + 1, 0);
            r[0] = 1;
            for (int a = 1; a <= k; ++a)
                for (int b = a; b >= 1; --b) r[b] += r[b - 1];
            return r;
        };
        const auto bm = pascal_row(m), bn = pascal_row(n), bmn = pascal_row(mn);
        std::vector<__int128> a(mn + 1, 0);
        for (int j = 0; j <= m; ++j) {
            for (int l = 0; l <= n; ++l) {
                const __int128 term = static_cast<__int128>(bm[j] * bn[l]);
                a[j + l] += (l % 2) ? -term : term;
            }
        }
        // c_i = a_i^2 C(mn, m) / (C(mn, i) 2^mn)
        const long double cm = static_cast<long double>(bmn[m]);
        for (int i = 0; i <= mn; ++i) {
            const long double ai = static_cast<long double>(a[i]);
            pc.c[i] = static_cast<double>(
                ai * ai * (cm / static_cast<long double>(bmn[i])) /
                std::exp2(static_cast<long double>(mn)));
        }
    } else {
        // log-space: a_i = sum_j (-1)^? C(m,j) C(n,i-j); accumulate in long double
        for (int i = 0; i <= mn; ++i) {
            long double ai = 0.0L;
            for (int j = std::max(0, i - n); j <= std::min(m, i); ++j) {
                const int l = i - j;
                long double t = std::exp((long double)(std::lgamma(m + 1.0) - std::lgamma(j + 1.0) -
                                                       std::lgamma(m - j + 1.0) + std::lgamma(n + 1.0) -
                                                       std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0)));
                ai += (l % 2) ? -t : t;
            }
            if (ai == 0.0L) continue;
            const double log_c = 2.0 * std::log(std::fabs((double)ai)) + std::lgamma(i + 1.0) +
                                 std::lgamma(mn - i + 1.0) - std::lgamma(m + 1.0) -
                                 std::lgamma(n + 1.0) - mn * std::log(2.0);
            pc.c[i] = std::exp(log_c);
        }
    }
    return pc;
}

double eval_vmn(int m, int n, double B, double z) {
    const PairCoefficients pc = pair_coefficients(m, n);
    const double zs = z / std::sqrt(2.0);
    double s = 0.0;
    for (int i = 0; i <= m + n; ++i)
        if (pc.c[i] != 0.0) s += pc.c[i] * eval_vm(i, B, zs);
    return s / std::sqrt(2.0);
}

double orbital_overlap(int m, int n, double B) {
    if (m < 0 || n < 0) throw std::invalid_argument("orbital_overlap: negative index");
    if (!(B > 0.0)) throw std::invalid_argument("orbital_overlap: B must be positive");
    const int mn = m + n;
    double ratio;  // (m+n)! / (m! n!)
    if (mn <= 60)
        ratio = static_cast<double>(binom_exact(mn, m));
    else
        ratio = std::exp(std::lgamma(mn + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n + 1.0));
    return B / (2.0 * kPi) * ratio * std::exp2(-(mn + 1));
}

int PotentialTable::pair_index(int m, int n) const {
    if (m > n) std::swap(m, n);
    if (m < 0 || n > max_m) throw std::out_of_range("PotentialTable: channel pair not tabulated");
    // ordered pairs (m, n), m <= n <= max_m, indexed by n(n+1)/2 + m
    return n * (n + 1) / 2 + m;
}

double PotentialTable::vm_at(int m, int j) const {
    if (m < 0 || m > max_m) throw std::out_of_range("PotentialTable: channel not tabulated");
    const int c = (grid.n - 1) / 2;
    return vm_half[m][std::abs(j - c)];
}

double PotentialTable::vm_bar_at(int m, int j) const {
    if (m < 0 || m > max_m) throw std::out_of_range("PotentialTable: channel not tabulated");
    const int c = (grid.n - 1) / 2;
    return vm_bar_half[m][std::abs(j - c)];
}

double PotentialTable::vmn_at(int m, int n, int dist) const {
    return vmn_rel[pair_index(m, n)][dist];
}

const std::vector<double>& PotentialTable::vmn_kernel(int m, int n) const {
    return vmn_rel[pair_index(m, n)];
}

namespace {

double simpson_rec(int m, double B, double a, double fa, double b, double fb, double fm,
                   double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double lm = 0.5 * (a + mid), rm = 0.5 * (mid + b);
    const double flm = eval_vm(m, B, lm), frm = eval_vm(m, B, rm);
    const double left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(m, B, a, fa, mid, fm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(m, B, mid, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

// (1/(b-a)) int_a^b V_m: the V_m core has width ~B^(-1/2), so the central
// cells need the adaptive descent; smooth cells exit on the first estimate.
double vm_cell_average(int m, double B, double a, double b) {
    const double fa = eval_vm(m, B, a), fb = eval_vm(m, B, b);
    const double fm = eval_vm(m, B, 0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = 1e-13 * std::fabs(whole) + 1e-300;
    return simpson_rec(m, B, a, fa, b, fb, fm, whole, tol, 40) / (b - a);
}

// averages of V_m over the lattice cells [d*step - step/2, d*step + step/2];
// the d = 0 cell reduces to [0, step/2] by evenness.
std::vector<double> vm_cell_averages(int m, double B, double step, int count) {
    std::vector<double> out(count);
    for (int d = 0; d < count; ++d) {
        const double a = (d == 0) ? 0.0 : d * step - 0.5 * step;
        const double b = d * step + 0.5 * step;
        out[d] = vm_cell_average(m, B, a, b);
    }
    return out;
}

}  // namespace

PotentialTable build_table(int max_m, double B, const ZGrid& grid, std::size_t memory_budget_bytes) {
    if (max_m < 0) throw std::invalid_argument("build_table: max_m must be >= 0");
    if (!(B > 0.0) || !std::isfinite(B)) throw std::invalid_argument("build_table: B must be positive");

    const int n = grid.n;
    const int nh = (n + 1) / 2;
    const std::size_t pairs = std::size_t(max_m + 1) * (max_m + 2) / 2;
    const std::size_t bytes = sizeof(double) * (2 * std::size_t(max_m + 1) * nh + pairs * n);
    if (bytes > memory_budget_bytes)
        throw std::length_error("build_table: table would need " + std::to_string(bytes) +
                                " bytes (max_m=" + std::to_string(max_m) + ", n=" + std::to_string(n) +
                                ", pairs=" + std::to_string(pairs) + "), budget " +
                                std::to_string(memory_budget_bytes));

    PotentialTable t;
    t.B = B;
    t.grid = grid;
    t.max_m = max_m;
    const double h = grid.spacing();

    t.vm_half.resize(max_m + 1);
    t.vm_bar_half.resize(max_m + 1);
    for (int m = 0; m <= max_m; ++m) {
        t.vm_half[m].resize(nh);
        for (int j = 0; j < nh; ++j) t.vm_half[m][j] = eval_vm(m, B, j * h);
        t.vm_bar_half[m] = vm_cell_averages(m, B, h, nh);
    }

    // cell-averaged V_i on the sqrt-2-scaled lattice, shared by every pair
    // expansion: averaging commutes with the c_i combination
    const int imax = 2 * max_m;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<std::vector<double>> vi_scaled(imax + 1);
    for (int i = 0; i <= imax; ++i) vi_scaled[i] = vm_cell_averages(i, B, h * inv_sqrt2, n);

    t.vmn_rel.resize(pairs);
    for (int nn = 0; nn <= max_m; ++nn) {
        for (int mm = 0; mm <= nn; ++mm) {
            const PairCoefficients pc = pair_coefficients(mm, nn);
            std::vector<double>& arr = t.vmn_rel[t.pair_index(mm, nn)];
            arr.assign(n, 0.0);
            for (int i = 0; i <= mm + nn; ++i) {
                if (pc.c[i] == 0.0) continue;
                const double ci = pc.c[i] * inv_sqrt2;
                const std::vector<double>& vi = vi_scaled[i];
                for (int d = 0; d < n; ++d) arr[d] += ci * vi[d];
            }
        }
    }
    return t;
}

namespace {

constexpr char kTableMagic[8] = {'D', 'D', 'M', 'T', 'B', 'L', '0', '2'};

uint64_t fnv1a(const void* data, std::size_t len, uint64_t h = 1469598103934665603ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

static_assert(std::endian::native == std::endian::little,
              "table cache assumes a little-endian host");

}  // namespace

std::string table_cache_key(int max_m, double B, const ZGrid& grid) {
    uint64_t h = fnv1a(kTableMagic, sizeof(kTableMagic));
    uint64_t bbits;
    std::memcpy(&bbits, &B, 8);
    h = fnv1a(&bbits, 8, h);
    double L = grid.half_length;
    std::memcpy(&bbits, &L, 8);
    h = fnv1a(&bbits, 8, h);
    int32_t ints[2] = {grid.n, max_m};
    h = fnv1a(ints, sizeof(ints), h);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_table(const PotentialTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_table: cannot open " + path);
    out.write(kTableMagic, sizeof(kTableMagic));
    const int32_t dims[3] = {t.grid.n, t.max_m, t.n_half()};
    const double header_d[2] = {t.B, t.grid.half_length};
    out.write(reinterpret_cast<const char*>(header_d), sizeof(header_d));
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    for (const auto& row : t.vm_half)
        out.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * row.size());
    for (const auto& row : t.vm_bar_half)
        out.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * row.size());
    for (const auto& row : t.vmn_rel)
        out.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * row.size());
    if (!out) throw std::runtime_error("save_table: write failed for " + path);
}

bool load_table(PotentialTable& t, const std::string& path, int max_m, double B, const ZGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kTableMagic, sizeof(magic)) != 0) return false;
    double header_d[2];
    int32_t dims[3];
    in.read(reinterpret_cast<char*>(header_d), sizeof(header_d));
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) return false;
    if (header_d[0] != B || header_d[1] != grid.half_length || dims[0] != grid.n || dims[1] != max_m)
        return false;
    t.B = B;
    t.grid = grid;
    t.max_m = max_m;
    const int nh = dims[2];
    if (nh != (grid.n + 1) / 2) return false;
    t.vm_half.assign(max_m + 1, std::vector<double>(nh));
    for (auto& row : t.vm_half) {
        in.read(reinterpret_cast<char*>(row.data()), sizeof(double) * row.size());
        if (!in) return false;
    }
    t.vm_bar_half.assign(max_m + 1, std::vector<double>(nh));
    for (auto& row : t.vm_bar_half) {
        in.read(reinterpret_cast<char*>(row.data()), sizeof(double) * row.size());
        if (!in) return false;
    }
    const std::size_t pairs = std::size_t(max_m + 1) * (max_m + 2) / 2;
    t.vmn_rel.assign(pairs, std::vector<double>(grid.n));
    for (auto& row : t.vmn_rel) {
        in.read(reinterpret_cast<char*>(row.data()), sizeof(double) * row.size());
        if (!in) return false;
    }
    return true;
}

PotentialTable load_or_build_table(int max_m, double B, const ZGrid& grid,
                                   const std::string& cache_dir) {
    if (!cache_dir.empty()) {
        const std::string path = cache_dir + "/vmtab-" + table_cache_key(max_m, B, grid) + ".bin";
        PotentialTable t;
        if (load_table(t, path, max_m, B, grid)) return t;
        t = build_table(max_m, B, grid);
        try {
            save_table(t, path);
        } catch (const std::runtime_error&) {
            // cache is best-effort; fall through with the built table
        }
        return t;
    }
    return build_table(max_m, B, grid);
}

}  // namespace ddm
