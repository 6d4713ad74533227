#include "ddm/scf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "ddm/hyperstrong.hpp"
#include "ddm/io.hpp"

namespace ddm {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("scf: ") + name + " must be positive and finite");
}

int channel_count(double N) { return std::max(1, static_cast<int>(std::ceil(N))); }

double trap_dot(const std::vector<double>& a, const std::vector<double>& b, double h) {
    const int n = static_cast<int>(a.size());
    double s = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for (int j = 1; j + 1 < n; ++j) s += a[j] * b[j];
    return s * h;
}

double trap_abs(const std::vector<double>& a, double h) {
    const int n = static_cast<int>(a.size());
    double s = 0.5 * (std::fabs(a[0]) + std::fabs(a[n - 1]));
    for (int j = 1; j + 1 < n; ++j) s += std::fabs(a[j]);
    return s * h;
}

struct PureState {
    std::vector<ChannelState> channels;
    std::map<int, std::vector<double>> spectra;
    double kinetic = 0.0;   // sum f * dirichlet form
    double lin = 0.0;       // sum f * mu  (Tr[h_Phi Gamma])
    double filled = 0.0;
};

// Diagonalize every channel in the current effective potentials and fill by
// the Aufbau rule, growing the per-channel eigenpair budget while the top
// computed level is occupied. Channels solve concurrently; every output slot
// is per-channel and assembly stays in channel order, so the result is
// independent of the worker count.
PureState diagonalize_and_fill(const std::vector<std::vector<double>>& phi, double N,
                               const ZGrid& grid, std::vector<int>& k_per, int threads) {
    const int M = static_cast<int>(phi.size());
    const double h = grid.spacing();
    PureState st;
    st.channels.resize(M);
    std::vector<TridiagonalOperator> ops(M);
    for (int m = 0; m < M; ++m) st.spectra[m];  // allocate map slots up front
    parallel_for_checked(M, threads, [&](int m) {
        ops[m] = build_hamiltonian(phi[m], grid);
        st.channels[m].m = m;
        st.channels[m].eigenpairs = lowest_eigenpairs(ops[m], k_per[m], h);
        std::vector<double>& sp = st.spectra.at(m);
        sp.resize(k_per[m]);
        for (int i = 0; i < k_per[m]; ++i) sp[i] = st.channels[m].eigenpairs[i].value;
    });
    std::map<int, std::vector<double>> occ;
    for (int round = 0; round < 32; ++round) {
        occ = aufbau_fill(st.spectra, N);
        std::vector<int> grow;
        for (int m = 0; m < M; ++m) {
            const std::vector<double>& f = occ[m];
            if (!f.empty() && f.back() > 0.0 && k_per[m] < grid.n) {
                k_per[m] = std::min(k_per[m] + 4, grid.n);
                grow.push_back(m);
            }
        }
        if (grow.empty()) break;
        parallel_for_checked(static_cast<int>(grow.size()), threads, [&](int g) {
            const int m = grow[g];
            st.channels[m].eigenpairs = lowest_eigenpairs(ops[m], k_per[m], h);
            std::vector<double>& sp = st.spectra.at(m);
            sp.resize(k_per[m]);
            for (int i = 0; i < k_per[m]; ++i) sp[i] = st.channels[m].eigenpairs[i].value;
        });
    }
    for (int m = 0; m < M; ++m) {
        st.channels[m].occupations = occ[m];
        st.channels[m].rebuild_density(grid.n);
        for (int i = 0; i < k_per[m]; ++i) {
            const double f = occ[m][i];
            if (f == 0.0) continue;
            st.kinetic += f * dirichlet_form(st.channels[m].eigenpairs[i].vector, h);
            st.lin += f * st.spectra[m][i];
            st.filled += f;
        }
    }
    return st;
}

// Gaussian elimination with partial pivoting on a tiny row-major system;
// false when numerically singular (degenerate anchor sets).
bool solve_linear(std::vector<double> A, std::vector<double> r, int nn, std::vector<double>& out) {
    double scale = 0.0;
    for (double x : A) scale = std::max(scale, std::fabs(x));
    if (!(scale > 0.0)) return false;
    for (int col = 0; col < nn; ++col) {
        int piv = col;
        for (int i = col + 1; i < nn; ++i)
            if (std::fabs(A[i * nn + col]) > std::fabs(A[piv * nn + col])) piv = i;
        if (std::fabs(A[piv * nn + col]) < 1e-13 * scale) return false;
        if (piv != col) {
            for (int j = 0; j < nn; ++j) std::swap(A[piv * nn + j], A[col * nn + j]);
            std::swap(r[piv], r[col]);
        }
        for (int i = col + 1; i < nn; ++i) {
            const double m = A[i * nn + col] / A[col * nn + col];
            if (m == 0.0) continue;
            for (int j = col; j < nn; ++j) A[i * nn + j] -= m * A[col * nn + j];
            r[i] -= m * r[col];
        }
    }
    out.assign(nn, 0.0);
    for (int i = nn - 1; i >= 0; --i) {
        double s = r[i];
        for (int j = i + 1; j < nn; ++j) s -= A[i * nn + j] * out[j];
        out[i] = s / A[i * nn + i];
    }
    return true;
}

// Minimize L·c + c·D·c over the probability simplex. The dimension is tiny
// (current mixture + a short proposal history), so exact enumeration of
// active sets is cheap and fully deterministic. Because the energy is exactly
// quadratic over density-matrix mixtures, the minimizer is an exact descent
// step; c = e_0 (keep the current state) is always a candidate, so the step
// never increases the energy.
std::vector<double> simplex_qp(const std::vector<double>& L, const std::vector<double>& D, int q) {
    std::vector<double> best(q, 0.0);
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<int> idx;
    std::vector<double> A, r, x, c;
    for (unsigned mask = 1; mask < (1u << q); ++mask) {
        idx.clear();
        for (int i = 0; i < q; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        const int s = static_cast<int>(idx.size());
        c.assign(q, 0.0);
        if (s == 1) {
            c[idx[0]] = 1.0;
        } else {
            // KKT system of min L·c + c·D·c subject to sum c = 1 on support
            const int nn = s + 1;
            A.assign(nn * nn, 0.0);
            r.assign(nn, 0.0);
            for (int a = 0; a < s; ++a) {
                for (int b = 0; b < s; ++b) A[a * nn + b] = 2.0 * D[idx[a] * q + idx[b]];
                A[a * nn + s] = -1.0;
                A[s * nn + a] = 1.0;
                r[a] = -L[idx[a]];
            }
            r[s] = 1.0;
            if (!solve_linear(std::move(A), std::move(r), nn, x)) continue;
            bool feasible = true;
            double sum = 0.0;
            for (int a = 0; a < s; ++a) {
                if (x[a] < -1e-12) {
                    feasible = false;
                    break;
                }
                sum += std::max(0.0, x[a]);
            }
            if (!feasible || !(sum > 0.0)) continue;
            for (int a = 0; a < s; ++a) c[idx[a]] = std::max(0.0, x[a]) / sum;
        }
        double f = 0.0;
        for (int i = 0; i < q; ++i) {
            f += L[i] * c[i];
            double di = 0.0;
            for (int j = 0; j < q; ++j) di += D[i * q + j] * c[j];
            f += c[i] * di;
        }
        if (f < best_f) {
            best_f = f;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::map<int, std::vector<double>> aufbau_fill(const std::map<int, std::vector<double>>& spectra,
                                               double N) {
    std::map<int, std::vector<double>> occ;
    for (const auto& [m, vals] : spectra) occ[m].assign(vals.size(), 0.0);
    if (!(N > 0.0)) return occ;

    std::vector<std::tuple<double, int, int>> levels;  // (mu, m, i)
    for (const auto& [m, vals] : spectra) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (!std::isfinite(vals[i]))
                throw std::invalid_argument("aufbau_fill: non-finite eigenvalue");
            if (vals[i] < 0.0) levels.emplace_back(vals[i], m, static_cast<int>(i));
        }
    }
    std::sort(levels.begin(), levels.end());
    double budget = N;
    for (const auto& [mu, m, i] : levels) {
        if (budget <= 0.0) break;
        const double f = std::min(1.0, budget);
        occ[m][i] = f;
        budget -= f;
    }
    return occ;
}

SolveReport scf_solve_on_grid(double N, double Z, double B, const ScfConfig& config,
                              const PotentialTable& table, const DensityProfile* warm_start) {
    check_positive(N, "N");
    check_positive(Z, "Z");
    check_positive(B, "B");
    if (!(config.energy_tol > 0.0) || !(config.density_tol > 0.0))
        throw std::invalid_argument("scf: tolerances must be positive");

    const ZGrid grid = table.grid;
    const int n = grid.n;
    const double h = grid.spacing();
    const int M = channel_count(N);
    if (M - 1 > table.max_m)
        throw std::length_error("scf: table covers m <= " + std::to_string(table.max_m) +
                                " but the solve needs " + std::to_string(M) + " channels");

    const int base_k = (config.eigen_count > 0) ? config.eigen_count : std::min(M + 2, 12);
    std::vector<int> k_per(M, std::min(base_k, n));
    const int nthreads = (config.threads > 0)
                             ? config.threads
                             : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

    std::vector<std::vector<double>> vm(M, std::vector<double>(n));
    for (int m = 0; m < M; ++m)
        for (int j = 0; j < n; ++j) vm[m][j] = table.vm_bar_at(m, j);

    // mixture state: density, its Hartree field, kinetic energy
    DensityProfile rho;
    rho.rho.assign(M, std::vector<double>(n, 0.0));
    double T_cur = 0.0;
    bool have_state = true;
    if (warm_start) {
        for (int m = 0; m < M && m < warm_start->channels(); ++m)
            if (static_cast<int>(warm_start->rho[m].size()) == n) rho.rho[m] = warm_start->rho[m];
        have_state = false;  // kinetic energy of the seed is unknown; first step is pure
    }
    const HartreePlan hplan = make_hartree_plan(table, M, nthreads);
    std::vector<std::vector<double>> W = hartree_all(rho, hplan);

    SolveReport rep;
    rep.N = N;
    rep.Z = Z;
    rep.B = B;
    rep.grid = grid;

    double E_prev = std::numeric_limits<double>::infinity();
    double dres_last = std::numeric_limits<double>::infinity();
    double best_E = std::numeric_limits<double>::infinity();
    DensityProfile best_rho;
    double best_T = 0.0;

    // Short history of pure Aufbau proposals. The energy is exactly quadratic
    // over mixtures of density matrices, so the descent step is an exact
    // simplex QP over {current mixture} ∪ history; a two-point line search is
    // the history-1 case but zigzags when a threshold level couples to core
    // relaxation (the level flips between filled and empty as its eigenvalue
    // crosses zero, which the QP resolves by fractional occupation).
    constexpr int kHistory = 6;
    std::vector<DensityProfile> hist_rho;
    std::vector<std::vector<std::vector<double>>> hist_W;
    std::vector<double> hist_T, hist_lin;

    std::vector<std::vector<double>> phi(M, std::vector<double>(n));
    int iter = 0;
    for (iter = 1; iter <= config.max_iter; ++iter) {
        double attr = 0.0, dir = 0.0;
        for (int m = 0; m < M; ++m) {
            attr -= Z * trap_dot(vm[m], rho.rho[m], h);
            dir += 0.5 * trap_dot(W[m], rho.rho[m], h);
        }
        if (have_state) {
            const double E_cur = T_cur + attr + dir;
            rep.energy_trace.push_back(E_cur);
            if (E_cur < best_E) {
                best_E = E_cur;
                best_rho = rho;
                best_T = T_cur;
            }
            rep.energy_residual = std::fabs(E_cur - E_prev) / std::max(1.0, std::fabs(E_cur));
            rep.density_residual = dres_last;
            if (iter > 1 && rep.energy_residual <= config.energy_tol &&
                rep.density_residual <= config.density_tol) {
                rep.converged = true;
                break;
            }
            E_prev = E_cur;
        }

        for (int m = 0; m < M; ++m)
            for (int j = 0; j < n; ++j) phi[m][j] = Z * vm[m][j] - W[m][j];

        const PureState cand = diagonalize_and_fill(phi, N, grid, k_per, nthreads);
        DensityProfile rho_new = density_of(cand.channels);
        std::vector<std::vector<double>> W_new = hartree_all(rho_new, hplan);

        if (!have_state) {
            // warm-started bootstrap: adopt the pure Aufbau state outright
            rho = std::move(rho_new);
            W = std::move(W_new);
            T_cur = cand.kinetic;
            have_state = true;
            dres_last = std::numeric_limits<double>::infinity();
            continue;
        }

        double attr_new = 0.0;
        for (int m = 0; m < M; ++m) attr_new -= Z * trap_dot(vm[m], rho_new.rho[m], h);
        hist_rho.push_back(std::move(rho_new));
        hist_W.push_back(std::move(W_new));
        hist_T.push_back(cand.kinetic);
        hist_lin.push_back(cand.kinetic + attr_new);
        if (static_cast<int>(hist_rho.size()) > kHistory) {
            hist_rho.erase(hist_rho.begin());
            hist_W.erase(hist_W.begin());
            hist_T.erase(hist_T.begin());
            hist_lin.erase(hist_lin.begin());
        }

        // E(c) = Σ c_i lin_i + Σ c_i c_j D̃(ρ_i, ρ_j) over the simplex,
        // index 0 = current mixture, 1.. = history (exact since the Hartree
        // term is bilinear and kinetic + attraction are linear in Γ)
        const int q = 1 + static_cast<int>(hist_rho.size());
        std::vector<double> L(q), D(q * q);
        L[0] = T_cur + attr;
        D[0] = dir;
        auto cross = [&](const std::vector<std::vector<double>>& Wa, const DensityProfile& ra,
                         const std::vector<std::vector<double>>& Wb, const DensityProfile& rb) {
            double s = 0.0;
            for (int m = 0; m < M; ++m)
                s += 0.25 * (trap_dot(Wa[m], rb.rho[m], h) + trap_dot(Wb[m], ra.rho[m], h));
            return s;
        };
        for (int i = 1; i < q; ++i) {
            L[i] = hist_lin[i - 1];
            D[i * q + i] = cross(hist_W[i - 1], hist_rho[i - 1], hist_W[i - 1], hist_rho[i - 1]);
            D[i] = D[i * q] = cross(W, rho, hist_W[i - 1], hist_rho[i - 1]);
            for (int p = 1; p < i; ++p)
                D[i * q + p] = D[p * q + i] =
                    cross(hist_W[i - 1], hist_rho[i - 1], hist_W[p - 1], hist_rho[p - 1]);
        }
        const std::vector<double> c = simplex_qp(L, D, q);

        // move to the optimal mixture; residual = actual density movement
        dres_last = 0.0;
        for (int m = 0; m < M; ++m) {
            double l1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double rv = c[0] * rho.rho[m][j];
                double wv = c[0] * W[m][j];
                for (int s = 1; s < q; ++s) {
                    rv += c[s] * hist_rho[s - 1].rho[m][j];
                    wv += c[s] * hist_W[s - 1][m][j];
                }
                l1 += ((j == 0 || j == n - 1) ? 0.5 : 1.0) * std::fabs(rv - rho.rho[m][j]);
                rho.rho[m][j] = rv;
                W[m][j] = wv;
            }
            dres_last += l1 * h;
        }
        double T_mix = c[0] * T_cur;
        for (int s = 1; s < q; ++s) T_mix += c[s] * hist_T[s - 1];
        T_cur = T_mix;
        if (std::getenv("DDM_SCF_TRACE")) {
            std::fprintf(stderr, "TRACE it=%d filled=%.9f c=[", iter, cand.filled);
            for (int s = 0; s < q; ++s) std::fprintf(stderr, " %.3f", c[s]);
            std::fprintf(stderr, " ]");
            for (int m = 0; m < M; ++m) {
                std::fprintf(stderr, " | m%d:", m);
                const auto& sp = cand.spectra.at(m);
                const auto& oc = cand.channels[m].occupations;
                for (std::size_t i = 0; i < sp.size() && i < 4; ++i)
                    std::fprintf(stderr, " %.3e(f=%.3f)", sp[i], i < oc.size() ? oc[i] : 0.0);
            }
            std::fprintf(stderr, "\n");
        }
    }
    rep.iterations = std::min(iter, config.max_iter);

    // Final pure Aufbau state in the field of the best density seen.
    if (!(best_E < std::numeric_limits<double>::infinity())) {
        best_rho = rho;
        best_T = T_cur;
    }
    std::vector<std::vector<double>> Wb = hartree_all(best_rho, hplan);
    for (int m = 0; m < M; ++m)
        for (int j = 0; j < n; ++j) phi[m][j] = Z * vm[m][j] - Wb[m][j];
    const PureState fin = diagonalize_and_fill(phi, N, grid, k_per, nthreads);

    EnergyBreakdown pure = total_energy(fin.channels, Z, table, grid);
    EnergyBreakdown mix;
    mix.kinetic = best_T;
    for (int m = 0; m < M; ++m) {
        mix.attraction -= Z * trap_dot(vm[m], best_rho.rho[m], h);
        mix.direct += 0.5 * trap_dot(Wb[m], best_rho.rho[m], h);
    }
    mix.total = mix.kinetic + mix.attraction + mix.direct;

    rep.channels = fin.channels;
    rep.mu_table.resize(M);
    for (int m = 0; m < M; ++m) rep.mu_table[m] = fin.spectra.at(m);
    rep.filled = fin.filled;
    if (pure.total <= mix.total) {
        rep.energy = pure;
        rep.density = density_of(fin.channels);
    } else {
        rep.energy = mix;
        rep.density = best_rho;
        // On the ionization plateau the minimizer carries a fractional
        // occupation on a level pinned at mu = 0, which a hard Aufbau fill
        // cannot express (the level's sign flips at rounding level). Reassign
        // occupations by distributing the converged bound mass ascending in
        // mu; below the plateau this budget equals N and reproduces the
        // Aufbau filling.
        double mass = 0.0;
        for (int m = 0; m < M; ++m) mass += trap_abs(best_rho.rho[m], h);
        std::vector<std::tuple<double, int, int>> levels;
        for (int m = 0; m < M; ++m)
            for (std::size_t i = 0; i < rep.channels[m].eigenpairs.size(); ++i)
                levels.emplace_back(rep.channels[m].eigenpairs[i].value, m, static_cast<int>(i));
        std::sort(levels.begin(), levels.end());
        for (int m = 0; m < M; ++m)
            std::fill(rep.channels[m].occupations.begin(), rep.channels[m].occupations.end(), 0.0);
        double budget = std::min(mass, N);
        for (const auto& [mu_l, m, i] : levels) {
            if (budget <= 0.0) break;
            const double f = std::min(1.0, budget);
            rep.channels[m].occupations[i] = f;
            budget -= f;
        }
        rep.filled = std::min(mass, N) - std::max(0.0, budget);
        for (int m = 0; m < M; ++m) rep.channels[m].rebuild_density(grid.n);
    }

    // chemical potential: largest occupied level, or 0 on the plateau
    if (N - rep.filled > 1e-9 * std::max(1.0, N)) {
        rep.mu = 0.0;
    } else {
        double mu = -std::numeric_limits<double>::infinity();
        for (const ChannelState& ch : rep.channels)
            for (std::size_t i = 0; i < ch.occupations.size(); ++i)
                if (ch.occupations[i] > 0.0) mu = std::max(mu, ch.eigenpairs[i].value);
        rep.mu = std::isfinite(mu) ? mu : 0.0;
    }
    rep.dEdZ = dE_dZ(rep.density, table);
    rep.kinetic_check = kinetic_consistency(rep.channels, Z, table, grid);
    return rep;
}

namespace {

struct SizedGrid {
    ZGrid grid;
    PotentialTable table;
    DensityProfile warm;
    double coarse_energy = 0.0;
    bool has_warm = false;
};

double wall_density(const SolveReport& r) {
    double w = 0.0;
    for (const auto& rm : r.density.rho)
        w += std::max(rm.front(), rm.back());
    return w;
}

// Box-doubling at fixed spacing until the density has decayed at the walls
// and the energy is box-stable, then one h/2 refinement grid for the final
// solve (whose two-grid difference yields the Richardson estimate).
SizedGrid auto_size(double N, double Z, double B, const ScfConfig& config) {
    const double eta = B / (Z * Z * Z);
    const double L_eta = l_of_eta(eta);
    const double L0 = std::max(20.0 / (Z * std::max(1.0, L_eta)),
                               10.0 * std::pow(Z, -0.4) * std::pow(B, -0.2));
    const int max_m = channel_count(N) - 1;

    ZGrid g(L0, 1025);
    PotentialTable table = load_or_build_table(max_m, B, g, config.cache_dir);
    SolveReport r = scf_solve_on_grid(N, Z, B, config, table, nullptr);
    double E_box = r.energy.total;

    bool settled = false;
    for (int d = 0; d < 6; ++d) {
        ZGrid g2(2.0 * g.half_length, 2 * g.n - 1);
        // previous nodes embed exactly (same spacing); pad with zeros
        DensityProfile warm;
        warm.rho.assign(r.density.channels(), std::vector<double>(g2.n, 0.0));
        const int off = (g.n - 1) / 2;
        for (int m = 0; m < r.density.channels(); ++m)
            for (int j = 0; j < g.n; ++j) warm.rho[m][j + off] = r.density.rho[m][j];
        PotentialTable table2 = load_or_build_table(max_m, B, g2, config.cache_dir);
        SolveReport r2 = scf_solve_on_grid(N, Z, B, config, table2, &warm);

        const bool wall_ok = wall_density(r2) < 1e-10;
        const bool stable =
            std::fabs(r2.energy.total - E_box) <= config.energy_tol * std::max(1.0, std::fabs(r2.energy.total));
        g = g2;
        table = std::move(table2);
        r = std::move(r2);
        E_box = r.energy.total;
        if (wall_ok && stable) {
            settled = true;
            break;
        }
    }
    if (!settled && wall_density(r) >= 1e-10)
        throw std::runtime_error(
            "scf: grid auto-sizing failed: wall density still above 1e-10 after 6 box doublings");

    SizedGrid out;
    out.grid = ZGrid(g.half_length, 2 * g.n - 1);
    out.table = load_or_build_table(max_m, B, out.grid, config.cache_dir);
    out.warm.rho.assign(r.density.channels(), std::vector<double>(out.grid.n, 0.0));
    for (int m = 0; m < r.density.channels(); ++m) {
        for (int j = 0; j < g.n; ++j) out.warm.rho[m][2 * j] = r.density.rho[m][j];
        for (int j = 0; j + 1 < g.n; ++j)
            out.warm.rho[m][2 * j + 1] = 0.5 * (r.density.rho[m][j] + r.density.rho[m][j + 1]);
    }
    out.has_warm = true;
    out.coarse_energy = E_box;
    return out;
}

}  // namespace

SolveReport scf_solve(double N, double Z, double B, const ScfConfig& config) {
    check_positive(N, "N");
    check_positive(Z, "Z");
    check_positive(B, "B");
    if (!config.grid.automatic) {
        ZGrid g(config.grid.half_length, config.grid.n);
        PotentialTable table = load_or_build_table(channel_count(N) - 1, B, g, config.cache_dir);
        return scf_solve_on_grid(N, Z, B, config, table, nullptr);
    }
    SizedGrid sized = auto_size(N, Z, B, config);
    SolveReport rep = scf_solve_on_grid(N, Z, B, config, sized.table,
                                        sized.has_warm ? &sized.warm : nullptr);
    rep.richardson = richardson_estimate(sized.coarse_energy, rep.energy.total);
    return rep;
}

std::vector<SolveReport> energy_curve(double Z, double B, const std::vector<double>& n_values,
                                      const ScfConfig& config) {
    if (n_values.empty()) throw std::invalid_argument("energy_curve: empty N list");
    const double n_max = *std::max_element(n_values.begin(), n_values.end());
    check_positive(n_max, "N");

    ZGrid grid;
    PotentialTable table;
    if (config.grid.automatic) {
        SizedGrid sized = auto_size(n_max, Z, B, config);
        grid = sized.grid;
        table = std::move(sized.table);
    } else {
        grid = ZGrid(config.grid.half_length, config.grid.n);
        table = load_or_build_table(channel_count(n_max) - 1, B, grid, config.cache_dir);
    }

    std::vector<SolveReport> out;
    out.reserve(n_values.size());
    const DensityProfile* warm = nullptr;
    for (double N : n_values) {
        out.push_back(scf_solve_on_grid(N, Z, B, config, table, warm));
        warm = &out.back().density;
    }
    return out;
}

double chemical_potential(const SolveReport& report) { return report.mu; }

}  // namespace ddm
