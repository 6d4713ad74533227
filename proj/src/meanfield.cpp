#include "ddm/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ddm/io.hpp"

namespace ddm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// trapezoid endpoint weight
double trap_w(int j, int n) { return (j == 0 || j == n - 1) ? 0.5 : 1.0; }

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const int n = static_cast<int>(a.size());
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / len * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

double DensityProfile::particle_number(const ZGrid& grid) const {
    double total = 0.0;
    for (const auto& r : rho) total += trapezoid(r, grid.spacing());
    return total;
}

void ChannelState::rebuild_density(int grid_n) {
    density.assign(grid_n, 0.0);
    for (std::size_t i = 0; i < occupations.size(); ++i) {
        const double f = occupations[i];
        if (f == 0.0) continue;
        const std::vector<double>& v = eigenpairs[i].vector;
        for (int j = 0; j < grid_n; ++j) density[j] += f * v[j] * v[j];
    }
}

double trapezoid(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += trap_w(j, n) * f[j];
    return s * h;
}

double dirichlet_form(const std::vector<double>& v, double h) {
    const int n = static_cast<int>(v.size());
    double s = v[0] * v[0] + v[n - 1] * v[n - 1];  // walls at both ends
    for (int j = 0; j + 1 < n; ++j) {
        const double d = v[j + 1] - v[j];
        s += d * d;
    }
    return s / h;
}

std::vector<double> convolve_direct(const std::vector<double>& kernel, const std::vector<double>& src) {
    const int n = static_cast<int>(src.size());
    std::vector<double> out(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += kernel[std::abs(j - k)] * src[k];
        out[j] = s;
    }
    return out;
}

std::vector<double> convolve_fft(const std::vector<double>& kernel, const std::vector<double>& src) {
    const int n = static_cast<int>(src.size());
    const int L = next_pow2(2 * n - 1);
    std::vector<std::complex<double>> a(L), b(L);
    for (int j = 0; j < n; ++j) a[j] = src[j];
    b[0] = kernel[0];
    for (int d = 1; d < n; ++d) {
        b[d] = kernel[d];
        b[L - d] = kernel[d];
    }
    fft_radix2(a, false);
    fft_radix2(b, false);
    for (int i = 0; i < L; ++i) a[i] *= b[i];
    fft_radix2(a, true);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = a[j].real();
    return out;
}

namespace {

std::vector<double> weighted_source(const std::vector<double>& rho, double h) {
    const int n = static_cast<int>(rho.size());
    std::vector<double> src(n);
    for (int j = 0; j < n; ++j) src[j] = rho[j] * trap_w(j, n) * h;
    return src;
}

}  // namespace

std::vector<double> hartree_potential(int m, const DensityProfile& rho, const PotentialTable& table) {
    const int n = table.grid.n;
    if (rho.channels() - 1 > table.max_m)
        throw std::length_error("hartree_potential: density has channels beyond the table (max_m=" +
                                std::to_string(table.max_m) + ")");
    const double h = table.grid.spacing();
    std::vector<double> w(n, 0.0);
    for (int nn = 0; nn < rho.channels(); ++nn) {
        if (static_cast<int>(rho.rho[nn].size()) != n)
            throw std::invalid_argument("hartree_potential: density size mismatch");
        const std::vector<double> src = weighted_source(rho.rho[nn], h);
        const std::vector<double>& kernel = table.vmn_kernel(m, nn);
        const std::vector<double> conv =
            (n <= kDirectConvolutionMaxNodes) ? convolve_direct(kernel, src) : convolve_fft(kernel, src);
        for (int j = 0; j < n; ++j) w[j] += conv[j];
    }
    return w;
}

namespace {

// packed index into the upper triangle (m <= nn) of a channels x channels pair table
int pair_index(int m, int nn, int channels) {
    if (m > nn) std::swap(m, nn);
    return m * channels - m * (m - 1) / 2 + (nn - m);
}

}  // namespace

HartreePlan make_hartree_plan(const PotentialTable& table, int channels, int threads) {
    if (channels - 1 > table.max_m)
        throw std::length_error("make_hartree_plan: channels beyond the table (max_m=" +
                                std::to_string(table.max_m) + ")");
    HartreePlan plan;
    plan.table = &table;
    plan.channels = channels;
    plan.threads = std::max(1, threads);
    const int n = table.grid.n;
    if (n <= kDirectConvolutionMaxNodes) return plan;
    plan.len = next_pow2(2 * n - 1);
    std::vector<std::pair<int, int>> pairs;
    for (int m = 0; m < channels; ++m)
        for (int nn = m; nn < channels; ++nn) pairs.emplace_back(m, nn);
    plan.kernel_fft.resize(pairs.size());
    parallel_for_checked(static_cast<int>(pairs.size()), plan.threads, [&](int p) {
        const auto [m, nn] = pairs[p];
        const std::vector<double>& kernel = table.vmn_kernel(m, nn);
        std::vector<std::complex<double>> b(plan.len);
        b[0] = kernel[0];
        for (int d = 1; d < n; ++d) {
            b[d] = kernel[d];
            b[plan.len - d] = kernel[d];
        }
        fft_radix2(b, false);
        plan.kernel_fft[pair_index(m, nn, channels)] = std::move(b);
    });
    return plan;
}

std::vector<std::vector<double>> hartree_all(const DensityProfile& rho, const HartreePlan& plan) {
    const PotentialTable& table = *plan.table;
    const int M = rho.channels();
    if (M > plan.channels)
        throw std::length_error("hartree_all: density has channels beyond the plan");
    const int n = table.grid.n;
    std::vector<std::vector<double>> out(M);
    if (plan.len == 0) {
        for (int m = 0; m < M; ++m) out[m] = hartree_potential(m, rho, table);
        return out;
    }
    const double h = table.grid.spacing();
    for (int nn = 0; nn < M; ++nn)
        if (static_cast<int>(rho.rho[nn].size()) != n)
            throw std::invalid_argument("hartree_all: density size mismatch");
    std::vector<std::vector<std::complex<double>>> src_fft(M);
    parallel_for_checked(M, plan.threads, [&](int nn) {
        const std::vector<double> src = weighted_source(rho.rho[nn], h);
        src_fft[nn].assign(plan.len, 0.0);
        for (int j = 0; j < n; ++j) src_fft[nn][j] = src[j];
        fft_radix2(src_fft[nn], false);
    });
    parallel_for_checked(M, plan.threads, [&](int m) {
        std::vector<std::complex<double>> acc(plan.len, std::complex<double>(0.0, 0.0));
        for (int nn = 0; nn < M; ++nn) {
            const auto& kf = plan.kernel_fft[pair_index(m, nn, plan.channels)];
            for (int i = 0; i < plan.len; ++i) acc[i] += kf[i] * src_fft[nn][i];
        }
        fft_radix2(acc, true);
        out[m].resize(n);
        for (int j = 0; j < n; ++j) out[m][j] = acc[j].real();
    });
    return out;
}

std::vector<std::vector<double>> hartree_all(const DensityProfile& rho, const PotentialTable& table) {
    return hartree_all(rho, make_hartree_plan(table, rho.channels()));
}

std::vector<double> effective_potential(int m, double Z, const DensityProfile& rho,
                                        const PotentialTable& table) {
    std::vector<double> phi = hartree_potential(m, rho, table);
    const int n = table.grid.n;
    for (int j = 0; j < n; ++j) phi[j] = Z * table.vm_bar_at(m, j) - phi[j];
    return phi;
}

double direct_energy(const DensityProfile& rho, const PotentialTable& table) {
    const double h = table.grid.spacing();
    const int n = table.grid.n;
    double total = 0.0;
    const std::vector<std::vector<double>> w = hartree_all(rho, table);
    for (int m = 0; m < rho.channels(); ++m) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += trap_w(j, n) * rho.rho[m][j] * w[m][j];
        total += 0.5 * s * h;
    }
    return total;
}

double direct_energy_double_sum(const DensityProfile& rho, const PotentialTable& table,
                                bool transposed) {
    const int M = rho.channels();
    const int n = table.grid.n;
    const double h = table.grid.spacing();
    double total = 0.0;
    for (int a = 0; a < M; ++a) {
        for (int b = 0; b < M; ++b) {
            const int m = transposed ? b : a;
            const int nn = transposed ? a : b;
            // canonical orientation: sum with the smaller channel outside
            const auto& rm = rho.rho[std::min(m, nn)];
            const auto& rn = rho.rho[std::max(m, nn)];
            const std::vector<double>& kernel = table.vmn_kernel(m, nn);
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                double inner = 0.0;
                for (int k = 0; k < n; ++k) inner += kernel[std::abs(j - k)] * rn[k] * trap_w(k, n);
                s += rm[j] * trap_w(j, n) * inner;
            }
            total += 0.5 * s * h * h;
        }
    }
    return total;
}

DensityProfile density_of(const std::vector<ChannelState>& channels) {
    DensityProfile p;
    p.rho.resize(channels.size());
    for (std::size_t m = 0; m < channels.size(); ++m) p.rho[m] = channels[m].density;
    return p;
}

EnergyBreakdown total_energy(const std::vector<ChannelState>& channels, double Z,
                             const PotentialTable& table, const ZGrid& grid) {
    const double h = grid.spacing();
    EnergyBreakdown e;
    for (const ChannelState& ch : channels) {
        for (std::size_t i = 0; i < ch.occupations.size(); ++i) {
            const double f = ch.occupations[i];
            if (f < 0.0 || f > 1.0 + 1e-12)
                throw std::invalid_argument("total_energy: occupation outside [0,1]");
            if (f == 0.0) continue;
            e.kinetic += f * dirichlet_form(ch.eigenpairs[i].vector, h);
        }
    }
    const DensityProfile rho = density_of(channels);
    for (int m = 0; m < rho.channels(); ++m) {
        double s = 0.0;
        for (int j = 0; j < grid.n; ++j) s += trap_w(j, grid.n) * table.vm_bar_at(m, j) * rho.rho[m][j];
        e.attraction -= Z * s * h;
    }
    e.direct = direct_energy(rho, table);
    e.total = e.kinetic + e.attraction + e.direct;
    return e;
}

double kinetic_consistency(const std::vector<ChannelState>& channels, double Z,
                           const PotentialTable& table, const ZGrid& grid) {
    const double h = grid.spacing();
    const DensityProfile rho = density_of(channels);
    double k1 = 0.0, sum_f_mu = 0.0, sum_phi_rho = 0.0;
    for (const ChannelState& ch : channels) {
        for (std::size_t i = 0; i < ch.occupations.size(); ++i) {
            const double f = ch.occupations[i];
            if (f == 0.0) continue;
            k1 += f * dirichlet_form(ch.eigenpairs[i].vector, h);
            sum_f_mu += f * ch.eigenpairs[i].value;
        }
    }
    const std::vector<std::vector<double>> w = hartree_all(rho, table);
    for (int m = 0; m < rho.channels(); ++m) {
        double s = 0.0;
        for (int j = 0; j < grid.n; ++j)
            s += trap_w(j, grid.n) * (Z * table.vm_bar_at(m, j) - w[m][j]) * rho.rho[m][j];
        sum_phi_rho += s * h;
    }
    return std::fabs(k1 - (sum_f_mu + sum_phi_rho));
}

double dE_dZ(const DensityProfile& rho, const PotentialTable& table) {
    const double h = table.grid.spacing();
    double s = 0.0;
    for (int m = 0; m < rho.channels(); ++m) {
        double t = 0.0;
        for (int j = 0; j < table.grid.n; ++j)
            t += trap_w(j, table.grid.n) * table.vm_bar_at(m, j) * rho.rho[m][j];
        s -= t * h;
    }
    return s;
}

std::vector<double> density3d(const DensityProfile& rho, double B, const ZGrid& grid,
                              const std::vector<std::pair<double, double>>& rz_points) {
    std::vector<double> out;
    out.reserve(rz_points.size());
    const double h = grid.spacing();
    for (const auto& [r, z] : rz_points) {
        // linear interpolation of each rho_m at z; zero outside the box
        double val = 0.0;
        if (std::fabs(z) <= grid.half_length) {
            const double t = (z + grid.half_length) / h;
            const int j0 = std::min(static_cast<int>(t), grid.n - 2);
            const double frac = t - j0;
            const double u = 0.5 * B * r * r;
            for (int m = 0; m < rho.channels(); ++m) {
                const double rz = (1.0 - frac) * rho.rho[m][j0] + frac * rho.rho[m][j0 + 1];
                if (rz == 0.0) continue;
                double wu;  // u^m e^-u / m!
                if (u == 0.0)
                    wu = (m == 0) ? 1.0 : 0.0;
                else
                    wu = std::exp(m * std::log(u) - u - std::lgamma(m + 1.0));
                val += B / (2.0 * kPi) * wu * rz;
            }
        }
        out.push_back(val);
    }
    return out;
}

}  // namespace ddm
