#pragma once

#include <utility>
#include <vector>

#include "cvqt/gamma.hpp"

namespace cvqt {

/// Two-qubit X-state in the (gg, ge, eg, ee) basis: populations A, B, C, E on
/// the diagonal, coherences G = <gg|rho|ee> and D = <ge|rho|eg>.
struct QubitXState {
    double A = 1.0;
    double B = 0.0;
    double C = 0.0;
    double E = 0.0;
    double G = 0.0;
    double D = 0.0;

    double trace() const { return A + B + C + E; }
    bool valid(double tol = 1e-9) const;
};

enum class AmplitudeConvention {
    signed_sin,     // S_n = sin(tau sqrt(n)), the exact-propagator amplitude
    unsigned_root,  // S_n = +sqrt(1 - C_n^2), taken literally
};

/// Rabi amplitudes of the resonant coupling after a dimensionless time tau:
/// C_n = cos(tau sqrt(n)) and the chosen S_n variant.
std::pair<double, double> jc_amplitudes(int n, double tau,
                                        AmplitudeConvention conv = AmplitudeConvention::signed_sin);

/// Contracts the gamma table with the Rabi amplitudes:
///   A = sum C_n^2 C_m^2 diag,  B = sum C_n^2 S_{m+1}^2 ge,
///   C = sum S_{n+1}^2 C_m^2 eg, G = -sum C_n S_{n+1} C_m S_{m+1} ggee,
///   D = +sum C_n S_{n+1} C_m S_{m+1} geeg,  E = 1 - A - B - C.
/// Raises TruncationError when the X-state positivity bounds are violated by
/// more than 1e-6 (the table cutoffs are too small).
QubitXState assemble_state(const GammaTable& table, double tau,
                           AmplitudeConvention conv = AmplitudeConvention::signed_sin);

/// Twice the modulus of the negative partial-transpose eigenvalue, from the
/// X-state closed form: the PT doublet eigenvalues are
/// (A+E)/2 +- sqrt((A-E)^2/4 + D^2) and (B+C)/2 +- sqrt((B-C)^2/4 + G^2).
double negativity(const QubitXState& rho);

/// Full 4x4 symmetric eigensolve of the partial transpose; cross-check path.
double negativity_eigensolve(const QubitXState& rho);

struct TransferCurve {
    std::vector<double> tau;
    std::vector<double> negativity;

    void to_csv(std::ostream& os) const;  // columns tau,negativity
};

/// Maps assemble_state + negativity over the grid (parallel over grid points).
TransferCurve transfer_curve(const GammaTable& table, const std::vector<double>& tau_grid,
                             AmplitudeConvention conv = AmplitudeConvention::signed_sin);

/// Uniform grid of count points over [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace cvqt
