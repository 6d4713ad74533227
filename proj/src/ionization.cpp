#include "ddm/ionization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ddm/landau.hpp"

namespace ddm {

namespace {

struct NcritSolver {
    double Z, B;
    ScfConfig config;
    PotentialTable table;
    DensityProfile last_density;
    bool have_density = false;
    std::vector<std::pair<double, double>> trace;

    SolveReport solve(double N) {
        SolveReport rep = scf_solve_on_grid(N, Z, B, config, table,
                                            have_density ? &last_density : nullptr);
        last_density = rep.density;
        have_density = true;
        return rep;
    }
};

}  // namespace

NcritReport find_ncrit(double Z, double B, double tol_N, const ScfConfig& config) {
    if (!(Z > 0.0) || !(B > 0.0))
        throw std::invalid_argument("find_ncrit: Z and B must be positive");
    if (!(tol_N > 0.0)) throw std::invalid_argument("find_ncrit: tol_N must be positive");

    const double mu_floor = 1e-7 * Z * Z;
    const double delta = std::max(tol_N, 0.05);
    const int max_m = static_cast<int>(std::ceil(8.0 * Z + delta)) - 1;

    // Size the box on the neutral atom, then enlarge 4x at fixed spacing:
    // near threshold the outermost orbital decays too slowly for the
    // wall-density criterion, while the energy plateau remains well resolved.
    ScfConfig neutral_cfg = config;
    neutral_cfg.grid = GridPolicy{};
    SolveReport neutral = scf_solve(Z, Z, B, neutral_cfg);
    const ZGrid base = neutral.grid;
    const ZGrid big(4.0 * base.half_length, 4 * (base.n - 1) + 1);

    NcritSolver ns;
    ns.Z = Z;
    ns.B = B;
    ns.config = config;
    ns.config.grid = GridPolicy{};
    ns.table = load_or_build_table(max_m, B, big, config.cache_dir);

    auto plateau = [&](double N, const SolveReport& at_n) {
        if (at_n.mu < -mu_floor) return false;
        SolveReport shifted = ns.solve(N + delta);
        const double scale = std::max(1.0, std::fabs(at_n.energy.total));
        return std::fabs(shifted.energy.total - at_n.energy.total) <=
               std::max(config.energy_tol, 1e-9) * scale;
    };
    auto probe = [&](double N) {
        SolveReport rep = ns.solve(N);
        ns.trace.emplace_back(N, rep.mu);
        return plateau(N, rep);
    };

    double lo = Z, hi = 0.0;
    for (double cand : {2.0 * Z, 4.0 * Z, 8.0 * Z}) {
        if (probe(cand)) {
            hi = cand;
            break;
        }
        lo = cand;
    }
    if (hi == 0.0)
        throw std::runtime_error(
            "find_ncrit: no ionization plateau up to N = 8Z; this contradicts the N_c upper "
            "bound and indicates a solver failure");

    while (hi - lo > tol_N) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid))
            hi = mid;
        else
            lo = mid;
    }

    NcritReport out;
    out.Z = Z;
    out.B = B;
    out.n_critical = hi;
    out.lower_bound = Z;
    out.at_ncrit = ns.solve(hi);
    out.upper_bound = 4.0 * Z - out.at_ncrit.dEdZ / hi;
    out.rank_flag = rank_one_check(out.at_ncrit).rank_one;
    std::sort(ns.trace.begin(), ns.trace.end());
    out.mu_trace = std::move(ns.trace);
    return out;
}

RankOneResult rank_one_check(const SolveReport& report) {
    RankOneResult res;
    res.rank_one = true;
    for (const ChannelState& ch : report.channels) {
        std::vector<double> occ;
        for (double f : ch.occupations)
            if (f > 1e-8) occ.push_back(f);
        if (occ.size() > 1) {
            res.rank_one = false;
            std::sort(occ.rbegin(), occ.rend());
            res.second_level_max = std::max(res.second_level_max, occ[1]);
        }
    }
    return res;
}

double chemical_potential_identity_check(const SolveReport& report) {
    const int last = static_cast<int>(std::ceil(report.N)) - 1;
    if (last < 0 || last >= static_cast<int>(report.mu_table.size()) ||
        report.mu_table[last].empty())
        throw std::invalid_argument(
            "chemical_potential_identity_check: report lacks the last occupied channel");
    return std::fabs(report.mu - report.mu_table[last][0]);
}

}  // namespace ddm
