#pragma once

#include <Eigen/Dense>

#include "cvqt/gaussian.hpp"
#include "cvqt/transfer.hpp"

namespace cvqt {

// Brute-force validation path. Everything here is plain ladder-operator
// arithmetic on truncated Fock amplitudes: no hypergeometric series and no
// quadrature, so agreement with the gamma engine is evidential.

/// Truncated two-mode Fock state: either pure, with a real amplitude matrix
/// amps(n, m), or a diagonal mixture with weights(n, m) on |n,m><n,m|.
class FockTwoModeState {
public:
    static FockTwoModeState pure(Eigen::MatrixXd amps);
    static FockTwoModeState diagonal_mixture(Eigen::MatrixXd weights);

    bool is_pure() const { return pure_; }
    int truncation() const { return static_cast<int>(data_.rows()) - 1; }
    const Eigen::MatrixXd& amplitudes() const;
    const Eigen::MatrixXd& weights() const;

private:
    FockTwoModeState(bool pure, Eigen::MatrixXd data) : pure_(pure), data_(std::move(data)) {}
    bool pure_;
    Eigen::MatrixXd data_;
};

/// Two-mode squeezed vacuum amplitudes c_n = sech(z) tanh(z)^n on |n,n>,
/// renormalized over the truncation. Errors if the relative tail
/// tanh^{2 N_F} exceeds 1e-12.
FockTwoModeState tmsv_fock(double zeta, int n_f);

/// Single-mode thermal weight nbar^n / (nbar+1)^{n+1}.
double thermal_weights(double nbar, int n);

/// Product of two thermal modes as a diagonal mixture.
FockTwoModeState thermal_product_fock(double nbar1, double nbar2, int n_f);

/// Applies a1^s a2^s and renormalizes (pure states only).
FockTwoModeState photon_subtract_fock(const FockTwoModeState& state, int s);

/// Exact bilocal propagator |g,n> -> C_n|g,n> - i S_n|e,n-1> on |gg> x state,
/// followed by the exact partial trace over both modes. Asserts that all
/// non-X entries vanish below 1e-12.
QubitXState jc_evolve_trace(const FockTwoModeState& state, double tau);

/// Logarithmic negativity (base 2). Pure states: log2 of the squared sum of
/// the Schmidt coefficients (singular values of the amplitude matrix);
/// diagonal mixtures are PPT and return 0.
double cv_log_negativity(const FockTwoModeState& state);

/// Second quadrature moments <{Q_i,Q_j}>/2 from ladder matrix elements.
CovarianceMatrix second_moments(const FockTwoModeState& state);

}  // namespace cvqt
