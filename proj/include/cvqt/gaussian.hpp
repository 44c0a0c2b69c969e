#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "cvqt/errors.hpp"

namespace cvqt {

// Quadrature convention used throughout: x = a + a^dag, y = i(a^dag - a),
// so the vacuum covariance matrix is the identity. Quadratures are ordered
// (x1, y1, x2, y2) and first moments are zero everywhere.

/// 4x4 symplectic form, 2x2 blocks [[0,1],[-1,0]] on each mode.
Eigen::Matrix4d symplectic_form();

/// Canonical standard-form parameters of a two-mode covariance matrix:
/// Diag[n1,n1] and Diag[n2,n2] on the modes, Diag[m_plus,m_minus] across,
/// with n_j >= 1 and m_plus >= |m_minus|.
struct StandardForm {
    double n1 = 1.0;
    double n2 = 1.0;
    double m_plus = 0.0;
    double m_minus = 0.0;

    Eigen::Matrix4d matrix() const;
    bool valid(double tol = 1e-8) const;
};

bool operator==(const StandardForm& a, const StandardForm& b);

/// Two-mode covariance matrix of second quadrature moments. Stored exactly
/// symmetric; construction symmetrizes the input.
class CovarianceMatrix {
public:
    CovarianceMatrix() : v_(Eigen::Matrix4d::Identity()) {}
    explicit CovarianceMatrix(const Eigen::Matrix4d& v) : v_(0.5 * (v + v.transpose())) {}

    const Eigen::Matrix4d& mat() const { return v_; }
    double operator()(int i, int j) const { return v_(i, j); }

    /// Both symplectic eigenvalues >= 1 - tol.
    bool bona_fide(double tol = 1e-8) const;

    static CovarianceMatrix identity() { return CovarianceMatrix(); }

private:
    Eigen::Matrix4d v_;
};

/// Single-mode squeezings, phase-space rotations, beam-splitter transmittivity
/// and thermal occupations of the squeezed-thermal resource construction.
struct ResourceParams {
    double s1 = 0.0;
    double s2 = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double transmittivity = 0.5;
    double nbar1 = 0.0;
    double nbar2 = 0.0;
};

/// Local (mode-wise) symplectic operation S = s1 (+) s2, det s_j = 1.
struct LocalSymplectic {
    Eigen::Matrix2d s1 = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d s2 = Eigen::Matrix2d::Identity();

    Eigen::Matrix4d matrix() const;
    bool is_symplectic(double tol = 1e-10) const;
};

/// Two-mode squeezed vacuum: n1 = n2 = cosh(2|zeta|), m_plus = sinh(2|zeta|),
/// m_minus = -m_plus (the standard form is sign-canonical in zeta).
StandardForm make_tmsv(double zeta);

/// Squeezed-thermal modes mixed on a beam splitter:
/// V = B^T (R1+R2)^T (S1+S2)^T V_th (S1+S2)(R1+R2) B with V_th = (2nbar_j+1) I.
CovarianceMatrix make_squeezed_thermal_bs(const ResourceParams& p);

/// Standard-form reduction. Parameters come from the local symplectic
/// invariants (block determinants); the returned local operation maps v onto
/// the induced standard-form matrix within 1e-9.
std::pair<StandardForm, LocalSymplectic> to_standard_form(const CovarianceMatrix& v);

/// Smallest symplectic eigenvalue of the partial transpose; < 1 signals
/// entanglement.
double nu_minus(const StandardForm& sf);

/// Strict test nu_minus < 1 - tol (the boundary counts as separable: the
/// vacuum sits exactly at nu_minus = 1).
bool is_entangled(const StandardForm& sf, double tol = 1e-9);

/// Thermal-loss channel: V(t) = (2N+1)(1-e^{-Gt}) I + V(0) e^{-Gt}.
CovarianceMatrix dissipate(const CovarianceMatrix& v0, double big_n, double gamma_t);

/// Closed-form dissipation threshold
///   (1/2) log[ (4N(N+1) + sinh 2z - cosh 2z + 1) / (4N(N+1)) ].
/// Returns +infinity for big_n = 0 (pure loss). Note this printed form does
/// not coincide with separability_gamma_t below; see the README.
double dissipation_threshold(double zeta, double big_n);

/// Exact time at which the dissipated TMSV crosses nu_minus = 1:
///   log[ (2N + 1 - e^{-2 zeta}) / (2N) ].   +infinity for big_n = 0.
double separability_gamma_t(double zeta, double big_n);

/// Mean thermal occupation at which the symmetric squeezed-thermal resource
/// becomes separable: (e^{2 zeta} - 1)/2.
double thermal_threshold(double zeta);

/// Moduli of the eigenvalue pairs of i Omega V, ascending.
std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& v);

/// Sum over modes of f(nu) with
/// f(nu) = ((nu+1)/2) ln((nu+1)/2) - ((nu-1)/2) ln((nu-1)/2), in nats.
double von_neumann_entropy(const CovarianceMatrix& v);

/// Uniform sampling windows for random resources.
struct SamplingRanges {
    double s_abs_max = 1.2;        // s_j in [-s_abs_max, s_abs_max]
    double t_min = 0.25, t_max = 0.75;
    double nbar_max = 0.5;
};

/// Deterministic seeded draw of an entangled bona fide resource, built with
/// make_squeezed_thermal_bs and rejection-filtered on is_entangled.
CovarianceMatrix random_resource(std::uint64_t seed, const SamplingRanges& ranges = {});

// JSON serialization: CovarianceMatrix <-> {"v": [[..] x4]},
// StandardForm <-> {"n1","n2","m_plus","m_minus"}.
std::string to_json(const CovarianceMatrix& v);
std::string to_json(const StandardForm& sf);
CovarianceMatrix covariance_from_json(const std::string& text);
StandardForm standard_form_from_json(const std::string& text);

}  // namespace cvqt
