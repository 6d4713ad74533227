#include "ddm/hyperstrong.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "ddm/io.hpp"
#include "ddm/scf.hpp"

namespace ddm {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_quad(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_step(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 60);
}

// ((d/dz) sqrt(rho^HS))^2 + (1/2) (rho^HS)^2 at z >= 0
double hs_integrand(double lambda, double z) {
    if (lambda < 2.0) {
        const double q = 2.0 - lambda;
        const double s = q * z / 4.0 + hs_c_of_lambda(lambda);
        const double sh = std::sinh(s), ch = std::cosh(s);
        const double kin = q * q * q * q * ch * ch / (128.0 * sh * sh * sh * sh);
        const double rho = q * q / (8.0 * sh * sh);
        return kin + 0.5 * rho * rho;
    }
    const double w = 2.0 + z;
    return 2.0 / (w * w * w * w) + 0.5 * 4.0 / (w * w * w * w);
}

}  // namespace

double hs_c_of_lambda(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 2.0))
        throw std::invalid_argument("hs_c_of_lambda: requires 0 < lambda < 2");
    return 0.5 * std::log((4.0 - lambda) / lambda);
}

double hs_minimizer(double lambda, double z) {
    if (!(lambda > 0.0)) throw std::invalid_argument("hs_minimizer: lambda must be positive");
    const double az = std::fabs(z);
    if (lambda < 2.0) {
        const double q = 2.0 - lambda;
        const double sh = std::sinh(q * az / 4.0 + hs_c_of_lambda(lambda));
        return q * q / (8.0 * sh * sh);
    }
    return 2.0 / ((2.0 + az) * (2.0 + az));
}

double hs_energy(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("hs_energy: lambda must be positive");
    // map z = t/(1-t); integrand decays fast enough that g(1) = 0
    auto g = [lambda](double t) {
        if (t >= 1.0) return 0.0;
        const double z = t / (1.0 - t);
        const double jac = 1.0 / ((1.0 - t) * (1.0 - t));
        const double v = hs_integrand(lambda, z) * jac;
        return std::isfinite(v) ? v : 0.0;
    };
    const double half = adaptive_quad(g, 0.0, 1.0, 1e-14);
    return 2.0 * half - hs_minimizer(lambda, 0.0);
}

double l_of_eta(double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("l_of_eta: eta must be positive");
    const double target = std::sqrt(eta);
    double L = std::max(2.0 * std::log1p(target), std::sqrt(2.0) * std::pow(eta, 0.25));
    if (L >= 60.0) {
        // precondition in log space (sinh x ~ e^x/2): L/2 + ln(L/2) = ln(target);
        // the plain iteration would otherwise crawl or overflow for large starts
        const double t = std::log(target);
        for (int it = 0; it < 100; ++it) {
            const double g = 0.5 * L + std::log(0.5 * L) - t;
            const double step = g / (0.5 + 1.0 / L);
            L -= step;
            if (!(L > 0.0)) L = 1e-3;
            if (std::fabs(step) <= 1e-9 * L) break;
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double sh = std::sinh(0.5 * L), ch = std::cosh(0.5 * L);
        const double f = L * sh - target;
        if (std::fabs(f) <= 1e-12 * std::max(1.0, target)) return L;
        const double df = sh + 0.5 * L * ch;
        L -= f / df;
        if (!(L > 0.0)) L = 1e-12;
    }
    throw std::runtime_error("l_of_eta: Newton iteration failed at eta = " + std::to_string(eta));
}

std::vector<HsStudyRow> hs_convergence_study(double lambda, double Z,
                                             const std::vector<double>& etas,
                                             const ScfConfig& config, int threads) {
    if (!(lambda > 0.0) || !(Z > 0.0))
        throw std::invalid_argument("hs_convergence_study: lambda and Z must be positive");
    for (std::size_t i = 0; i < etas.size(); ++i) {
        if (!(etas[i] > 1.0))
            throw std::invalid_argument("hs_convergence_study: eta values must exceed 1");
        if (i > 0 && !(etas[i] > etas[i - 1]))
            throw std::invalid_argument("hs_convergence_study: eta values must be increasing");
    }
    const double e_hs = hs_energy(lambda);
    std::vector<HsStudyRow> rows(etas.size());
    std::vector<std::string> errors(etas.size());
    parallel_for_ordered(static_cast<int>(etas.size()), threads, [&](int i) {
        try {
            const double eta = etas[i];
            SolveReport rep = scf_solve(lambda * Z, Z, eta * Z * Z * Z, config);
            HsStudyRow& row = rows[i];
            row.eta = eta;
            row.energy = rep.energy.total;
            const double lg = std::log(eta);
            row.r = rep.energy.total / (Z * Z * Z * lg * lg);
            row.gap = std::fabs(row.r - e_hs);
            row.converged = rep.converged;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const std::string& e : errors)
        if (!e.empty()) throw std::runtime_error("hs_convergence_study: " + e);
    return rows;
}

double hs_density_discrepancy(double lambda, double Z, double eta, const SolveReport& report) {
    if (!(eta > 1.0)) throw std::invalid_argument("hs_density_discrepancy: eta must exceed 1");
    const double lg = std::log(eta);
    const ZGrid& grid = report.grid;
    const double h = grid.spacing();

    auto rho_sum = [&](double z) {
        const double x = (z + grid.half_length) / h;
        if (x < 0.0 || x > grid.n - 1) return 0.0;
        const int j = std::min(static_cast<int>(x), grid.n - 2);
        const double w = x - j;
        double v = 0.0;
        for (const auto& rm : report.density.rho) v += (1.0 - w) * rm[j] + w * rm[j + 1];
        return v;
    };
    // rescaled density in HS coordinates
    auto rho_resc = [&](double x) { return rho_sum(x / (Z * lg)) / (Z * Z * lg); };

    const double width = 1.6;
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double center = -6.4 + 3.2 * k;
        // smooth bump exp(-1/(1-t^2)) on |t| < 1, composite Simpson
        const int nq = 800;
        const double a = center - width, step = 2.0 * width / nq;
        double acc = 0.0;
        for (int j = 0; j <= nq; ++j) {
            const double x = a + j * step;
            const double t = (x - center) / width;
            double bump = 0.0;
            if (std::fabs(t) < 1.0) bump = std::exp(-1.0 / (1.0 - t * t));
            const double f = (rho_resc(x) - hs_minimizer(lambda, x)) * bump;
            const double w = (j == 0 || j == nq) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            acc += w * f;
        }
        total += std::fabs(acc * step / 3.0);
    }
    return total;
}

double hs_density_comparison(double lambda, double Z, double eta, const ScfConfig& config) {
    if (!(lambda > 0.0) || !(Z > 0.0))
        throw std::invalid_argument("hs_density_comparison: lambda and Z must be positive");
    SolveReport rep = scf_solve(lambda * Z, Z, eta * Z * Z * Z, config);
    return hs_density_discrepancy(lambda, Z, eta, rep);
}

}  // namespace ddm
