#include "cvqt/transfer.hpp"

#include <cassert>
#include <cmath>
#include <ostream>

#include "cvqt/errors.hpp"
#include "cvqt/parallel.hpp"

namespace cvqt {

bool QubitXState::valid(double tol) const {
    if (A < -tol || B < -tol || C < -tol || E < -tol) return false;
    if (std::abs(trace() - 1.0) > tol) return false;
    if (std::abs(G) > std::sqrt(std::max(A, 0.0) * std::max(E, 0.0)) + tol) return false;
    if (std::abs(D) > std::sqrt(std::max(B, 0.0) * std::max(C, 0.0)) + tol) return false;
    return true;
}

std::pair<double, double> jc_amplitudes(int n, double tau, AmplitudeConvention conv) {
    if (n < 0) throw ParameterError("jc_amplitudes: n must be nonnegative");
    const double root = std::sqrt(static_cast<double>(n));
    const double c = std::cos(tau * root);
    if (conv == AmplitudeConvention::signed_sin) return {c, std::sin(tau * root)};
    return {c, std::sqrt(std::max(1.0 - c * c, 0.0))};
}

QubitXState assemble_state(const GammaTable& table, double tau, AmplitudeConvention conv) {
    const int nc = table.cutoffs().n_c;
    const int mc = table.cutoffs().m_c;
    Eigen::VectorXd c1sq(nc + 1), s1sq(nc + 1), u1(nc + 1);
    Eigen::VectorXd c2sq(mc + 1), s2sq(mc + 1), u2(mc + 1);
    for (int n = 0; n <= nc; ++n) {
        const auto [cn, sn] = jc_amplitudes(n, tau, conv);
        const auto [cn1, sn1] = jc_amplitudes(n + 1, tau, conv);
        (void)cn1;
        c1sq(n) = cn * cn;
        s1sq(n) = sn1 * sn1;
        u1(n) = cn * sn1;
    }
    for (int m = 0; m <= mc; ++m) {
        const auto [cm, sm] = jc_amplitudes(m, tau, conv);
        const auto [cm1, sm1] = jc_amplitudes(m + 1, tau, conv);
        (void)cm1;
        c2sq(m) = cm * cm;
        s2sq(m) = sm1 * sm1;
        u2(m) = cm * sm1;
    }
    QubitXState x;
    x.A = c1sq.dot(table.diag() * c2sq);
    x.B = c1sq.dot(table.ge() * s2sq);
    x.C = s1sq.dot(table.eg() * c2sq);
    x.G = -u1.dot(table.ggee() * u2);
    x.D = u1.dot(table.geeg() * u2);
    x.E = 1.0 - x.A - x.B - x.C;

    if (!x.valid(1e-6))
        throw TruncationError("assemble_state: X-state positivity violated, raise the cutoffs",
                              std::abs(std::min({x.A, x.B, x.C, x.E, 0.0})));
    return x;
}

double negativity(const QubitXState& rho) {
    const double inner = 0.5 * (rho.B + rho.C) -
                         std::sqrt(0.25 * (rho.B - rho.C) * (rho.B - rho.C) + rho.G * rho.G);
    const double outer = 0.5 * (rho.A + rho.E) -
                         std::sqrt(0.25 * (rho.A - rho.E) * (rho.A - rho.E) + rho.D * rho.D);
    const double result = 2.0 * std::max(0.0, -std::min(inner, outer));
    assert(std::abs(result - negativity_eigensolve(rho)) < 1e-10);
    return result;
}

double negativity_eigensolve(const QubitXState& rho) {
    // partial transpose over the second qubit swaps G and D off the diagonals
    Eigen::Matrix4d pt = Eigen::Matrix4d::Zero();
    pt(0, 0) = rho.A;
    pt(1, 1) = rho.B;
    pt(2, 2) = rho.C;
    pt(3, 3) = rho.E;
    pt(0, 3) = pt(3, 0) = rho.D;
    pt(1, 2) = pt(2, 1) = rho.G;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(pt);
    return 2.0 * std::max(0.0, -solver.eigenvalues().minCoeff());
}

TransferCurve transfer_curve(const GammaTable& table, const std::vector<double>& tau_grid,
                             AmplitudeConvention conv) {
    for (double t : tau_grid)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw ParameterError("transfer_curve: tau grid must be finite and nonnegative");
    TransferCurve curve;
    curve.tau = tau_grid;
    curve.negativity.assign(tau_grid.size(), 0.0);
    parallel_for(tau_grid.size(), [&](std::size_t i) {
        curve.negativity[i] = negativity(assemble_state(table, tau_grid[i], conv));
    });
    return curve;
}

void TransferCurve::to_csv(std::ostream& os) const {
    os.precision(17);
    os << "tau,negativity\n";
    for (std::size_t i = 0; i < tau.size(); ++i) os << tau[i] << ',' << negativity[i] << '\n';
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw ParameterError("linspace: need at least one point");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
    return out;
}

}  // namespace cvqt
