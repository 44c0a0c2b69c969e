#include "cvqt/subtraction.hpp"

#include <cmath>

#include "cvqt/errors.hpp"
#include "cvqt/parallel.hpp"

namespace cvqt {

namespace {

double factorial_ratio(int j, int s) {
    // (j+s)!/j!
    return std::exp(std::lgamma(j + s + 1.0) - std::lgamma(j + 1.0));
}

}  // namespace

GammaTable formal_subtract(const GammaTable& table, int s) {
    if (s < 0) throw ParameterError("formal_subtract: s must be nonnegative");
    if (s == 0) return table;
    const Cutoffs src = table.cutoffs();
    Cutoffs cut{src.n_c - s, src.m_c - s, src.k_c};
    if (cut.n_c < 0 || cut.m_c < 0)
        throw TruncationError("formal_subtract: source cutoffs below the shift", s);

    const int nc = cut.n_c, mc = cut.m_c;
    Eigen::VectorXd wn(std::max(nc, mc) + 2), wn1(std::max(nc, mc) + 2);
    for (int j = 0; j < wn.size(); ++j) {
        wn(j) = factorial_ratio(j, s);       // (j+s)!/j!
        wn1(j) = factorial_ratio(j + 1, s);  // (j+1+s)!/(j+1)!
    }

    Eigen::MatrixXd diag(nc + 1, mc + 1), ge(nc + 1, mc + 1), eg(nc + 1, mc + 1),
        ggee(nc + 1, mc + 1), geeg(nc + 1, mc + 1);
    for (int n = 0; n <= nc; ++n)
        for (int m = 0; m <= mc; ++m) {
            diag(n, m) = wn(n) * wn(m) * table.diag()(n + s, m + s);
            ge(n, m) = wn(n) * wn1(m) * table.ge()(n + s, m + s);
            eg(n, m) = wn1(n) * wn(m) * table.eg()(n + s, m + s);
            const double wcoh = std::sqrt(wn(n) * wn1(n) * wn(m) * wn1(m));
            ggee(n, m) = wcoh * table.ggee()(n + s, m + s);
            geeg(n, m) = wcoh * table.geeg()(n + s, m + s);
        }

    const double z = diag.sum();
    if (!(z > 0.0))
        throw TruncationError("formal_subtract: vanishing diagonal trace after the shift", z);
    const double wmax = wn(nc) * wn1(std::max(nc, mc));
    diag /= z;
    ge /= z;
    eg /= z;
    ggee /= z;
    geeg /= z;

    GammaTable out(table.sf(), cut, std::move(diag), std::move(ge), std::move(eg), std::move(ggee),
                   std::move(geeg));
    out.set_quality(table.quadrature_error() * wmax / z, table.series_noise() * wmax / z, 0.01);
    return out;
}

GammaTable physical_subtract(const GammaTable& table, double transmittivity) {
    if (!(transmittivity > 0.0 && transmittivity < 1.0))
        throw ParameterError("physical_subtract: transmittivity must lie in (0,1)");
    const Cutoffs src = table.cutoffs();
    Cutoffs cut{src.n_c - 1, src.m_c - 1, src.k_c};
    if (cut.n_c < 0 || cut.m_c < 0)
        throw TruncationError("physical_subtract: source cutoffs below the shift", 1);

    const double t = transmittivity;
    const int nc = cut.n_c, mc = cut.m_c;
    Eigen::MatrixXd diag(nc + 1, mc + 1), ge(nc + 1, mc + 1), eg(nc + 1, mc + 1),
        ggee(nc + 1, mc + 1), geeg(nc + 1, mc + 1);
    for (int n = 0; n <= nc; ++n) {
        const double tn = std::pow(t, n);
        for (int m = 0; m <= mc; ++m) {
            const double tm = std::pow(t, m);
            diag(n, m) = tn * tm * (n + 1.0) * (m + 1.0) * table.diag()(n + 1, m + 1);
            ge(n, m) = tn * tm * t * (n + 1.0) * (m + 2.0) * table.ge()(n + 1, m + 1);
            eg(n, m) = tn * tm * t * (n + 2.0) * (m + 1.0) * table.eg()(n + 1, m + 1);
            const double wcoh =
                tn * tm * t * std::sqrt((n + 1.0) * (n + 2.0) * (m + 1.0) * (m + 2.0));
            ggee(n, m) = wcoh * table.ggee()(n + 1, m + 1);
            geeg(n, m) = wcoh * table.geeg()(n + 1, m + 1);
        }
    }
    const double z = diag.sum();
    if (!(z > 0.0))
        throw TruncationError("physical_subtract: vanishing diagonal trace after the shift", z);
    const double wmax = (nc + 1.0) * (std::max(nc, mc) + 2.0);
    diag /= z;
    ge /= z;
    eg /= z;
    ggee /= z;
    geeg /= z;

    GammaTable out(table.sf(), cut, std::move(diag), std::move(ge), std::move(eg), std::move(ggee),
                   std::move(geeg));
    out.set_quality(table.quadrature_error() * wmax / z, table.series_noise() * wmax / z, 0.01);
    return out;
}

StandardForm gaussian_equivalent_cm(double zeta, int s, int n_f) {
    if (s < 0) throw ParameterError("gaussian_equivalent_cm: s must be nonnegative");
    if (zeta == 0.0 && s > 0)
        throw DomainError("gaussian_equivalent_cm: cannot subtract photons from the vacuum");
    if (n_f == 0) {
        // grow the truncation until the subtracted state's tail mass is tiny
        n_f = std::max(60, 4 * s + 20);
        const double t2 = std::tanh(std::abs(zeta)) * std::tanh(std::abs(zeta));
        while (n_f < 1000) {
            // tail estimate of (n+s choose s)^2 t^{2n}
            const double logtail = 2.0 * (std::lgamma(n_f + s + 1.0) - std::lgamma(n_f + 1.0) -
                                          std::lgamma(s + 1.0)) +
                                   n_f * std::log(std::max(t2, 1e-300)) -
                                   std::log1p(-std::min(t2, 1.0 - 1e-12));
            if (logtail < std::log(1e-14)) break;
            n_f += n_f / 2;
        }
        if (n_f >= 1000)
            throw TruncationError("gaussian_equivalent_cm: truncation above 1000", n_f);
    }
    const FockTwoModeState ps = photon_subtract_fock(tmsv_fock(zeta, n_f), s);
    const CovarianceMatrix v = second_moments(ps);
    StandardForm sf;
    sf.n1 = v(0, 0);
    sf.n2 = v(2, 2);
    sf.m_plus = v(0, 2);
    sf.m_minus = v(1, 3);
    // the subtracted TMSV is already in standard form
    const double off = std::max(std::abs(v(0, 0) - v(1, 1)), std::abs(v(0, 2) + v(1, 3)));
    if (off > 1e-9)
        throw NumericError("gaussian_equivalent_cm: moments not in standard form", off);
    return sf;
}

double max_transfer(const GammaTable& table, double tau_lo, double tau_hi, int resolution) {
    if (!(tau_hi > tau_lo) || resolution < 2)
        throw ParameterError("max_transfer: invalid window or resolution");
    const std::vector<double> grid = linspace(tau_lo, tau_hi, resolution);
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        vals[i] = negativity(assemble_state(table, grid[i]));
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] > vals[best]) best = i;

    // golden-section refinement around the best cell
    const double h = (tau_hi - tau_lo) / (resolution - 1);
    double a = std::max(tau_lo, grid[best] - h);
    double b = std::min(tau_hi, grid[best] + h);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = negativity(assemble_state(table, x1));
    double f2 = negativity(assemble_state(table, x2));
    for (int it = 0; it < 60 && (b - a) > 1e-10; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = negativity(assemble_state(table, x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = negativity(assemble_state(table, x1));
        }
    }
    return std::max(vals[best], std::max(f1, f2));
}

GammaTable build_subtracted(const StandardForm& sf, int s, const Cutoffs& floor_cutoffs,
                            double* window_deficit, int window_cap) {
    if (s < 0) throw ParameterError("build_subtracted: s must be nonnegative");
    if (window_deficit) *window_deficit = 0.0;
    if (s == 0) {
        Cutoffs cut = floor_cutoffs;
        cut.k_c = recommended_k_c(sf, cut, cut.k_c);
        return build_table(sf, cut);
    }
    int nc = std::max(floor_cutoffs.n_c, floor_cutoffs.m_c);
    for (;;) {
        const bool capped = nc >= window_cap;
        if (capped) nc = window_cap;
        Cutoffs src{nc + s, nc + s, floor_cutoffs.k_c};
        src.k_c = recommended_k_c(sf, src, src.k_c);
        const GammaTable sub = formal_subtract(build_table(sf, src), s);
        const double edge =
            sub.diag().row(sub.cutoffs().n_c).sum() + sub.diag().col(sub.cutoffs().m_c).sum();
        if (edge < 1e-9) return sub;
        if (capped) {
            if (!window_deficit)
                throw TruncationError("build_subtracted: capped window still leaks boundary mass",
                                      edge);
            *window_deficit = edge;
            return sub;
        }
        nc = std::min(nc * 3 / 2 + 4, window_cap);
    }
}

DegaussSurface degauss_difference(const std::vector<double>& zeta_grid,
                                  const std::vector<double>& tau_grid, int s,
                                  const DegaussOptions& opts) {
    if (zeta_grid.empty() || tau_grid.empty())
        throw ParameterError("degauss_difference: grids must be nonempty");
    if (s < 0) throw ParameterError("degauss_difference: s must be nonnegative");

    DegaussSurface surf;
    surf.rows.resize(zeta_grid.size() * tau_grid.size());
    surf.noise_floor.assign(surf.rows.size(), 0.0);

    parallel_for(zeta_grid.size(), [&](std::size_t zi) {
        const double zeta = zeta_grid[zi];
        const std::size_t base = zi * tau_grid.size();
        if (zeta == 0.0) {
            for (std::size_t ti = 0; ti < tau_grid.size(); ++ti)
                surf.rows[base + ti] = {zeta, tau_grid[ti], 0.0, 0.0};
            return;
        }
        const StandardForm sf = make_tmsv(zeta);
        const GammaTable plain = build_table(sf, opts.cutoffs);

        Cutoffs floor_cut = opts.cutoffs;
        if (opts.source_k_c > 0) floor_cut.k_c = opts.source_k_c;
        const GammaTable sub = build_subtracted(sf, s, floor_cut);

        const TransferCurve cg = transfer_curve(plain, tau_grid);
        const TransferCurve cn = transfer_curve(sub, tau_grid);
        for (std::size_t ti = 0; ti < tau_grid.size(); ++ti) {
            surf.rows[base + ti] = {zeta, tau_grid[ti], cg.negativity[ti], cn.negativity[ti]};
            surf.noise_floor[base + ti] = sub.series_noise();
        }
    });
    return surf;
}

double non_gaussianity(double zeta, int s) {
    if (s == 0) return 0.0;  // pure Gaussian state
    const StandardForm sf = gaussian_equivalent_cm(zeta, s);
    return von_neumann_entropy(CovarianceMatrix(sf.matrix()));
}

}  // namespace cvqt
