#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>

#include "cvqt/gaussian.hpp"

namespace cvqt {

/// Fock cutoffs n_c, m_c and series cutoff k_c.
struct Cutoffs {
    int n_c = 25;
    int m_c = 25;
    int k_c = 100;
};

bool operator==(const Cutoffs& a, const Cutoffs& b);

/// Node counts for the phase-space quadrature: periodic trapezoid rule on the
/// two angles, mapped Gauss-Legendre on the two radii over [0, r_max] with
/// r_max set from the Gaussian envelope (< 1e-18 at the boundary). The
/// convergence estimate compares against the halved rule (every other angular
/// node, half the radial nodes).
struct QuadratureOptions {
    int angular_nodes = 64;
    int radial_nodes = 80;
    double envelope_tail = 1e-18;
};

enum class CoherencePath {
    series,      // terminating k-series (matches the quadrature oracle to 1e-10)
    quadrature,  // trapezoid x Gauss-Legendre evaluation of the defining integral
};

struct BuildOptions {
    CoherencePath coherence = CoherencePath::series;
    QuadratureOptions quad;
    double quad_tol = 1e-7;    // node-refinement disagreement that raises NumericError
    double epsilon_trunc = 0.01;  // normalization window half-width for the warning
};

/// Coefficient families of the resource in the Fock basis, truncated at the
/// cutoffs. Indexing (n, m) with n <= n_c, m <= m_c:
///   diag(n,m) = gamma^{n m}_{n m}          ge(n,m) = gamma^{n m+1}_{n m+1}
///   eg(n,m)   = gamma^{n+1 m}_{n+1 m}      ggee(n,m) = gamma^{n+1 m+1}_{n m}
///   geeg(n,m) = gamma^{n+1 m}_{n m+1}
class GammaTable {
public:
    GammaTable(StandardForm sf, Cutoffs cut, Eigen::MatrixXd diag, Eigen::MatrixXd ge,
               Eigen::MatrixXd eg, Eigen::MatrixXd ggee, Eigen::MatrixXd geeg);

    const StandardForm& sf() const { return sf_; }
    const Cutoffs& cutoffs() const { return cut_; }
    const Eigen::MatrixXd& diag() const { return diag_; }
    const Eigen::MatrixXd& ge() const { return ge_; }
    const Eigen::MatrixXd& eg() const { return eg_; }
    const Eigen::MatrixXd& ggee() const { return ggee_; }
    const Eigen::MatrixXd& geeg() const { return geeg_; }

    /// Sum of diag over the truncation window (1 for an exactly captured state).
    double normalization() const { return norm_; }
    bool truncation_warning() const { return truncation_warning_; }
    /// Worst node-refinement disagreement of the quadrature-backed entries
    /// (0 when the series path was used).
    double quadrature_error() const { return quad_error_; }
    /// Estimated absolute noise floor of the series evaluation.
    double series_noise() const { return series_noise_; }

    void set_quality(double quad_error, double series_noise, double epsilon_trunc);

    /// CSV with columns family,n,m,value, preceded by # metadata lines.
    void to_csv(std::ostream& os) const;
    static GammaTable from_csv(std::istream& is);

    /// FNV-1a hash of (standard form, cutoffs); cache key for table reuse.
    std::uint64_t cache_key() const;

private:
    StandardForm sf_;
    Cutoffs cut_;
    Eigen::MatrixXd diag_, ge_, eg_, ggee_, geeg_;
    double norm_ = 0.0;
    double quad_error_ = 0.0;
    double series_noise_ = 0.0;
    bool truncation_warning_ = false;
};

/// Angular series coefficient
/// G_k = (2k-1)!!/((2k)!(2k)!!) m_-^{2k} 2F1(1/2,-k;1;(m_-^2-m_+^2)/m_-^2),
/// evaluated in division-free polynomial form (regular at m_minus = 0).
double coeff_G(int k, double m_plus, double m_minus);

/// Displacement matrix element f_np(xi) = <n|D(-xi)|p>.
std::complex<double> f_np(int n, int p, std::complex<double> xi);

/// Terminating k-series for the diagonal family gamma^{n m}_{n m}.
double gamma_diag(int n, int m, const StandardForm& sf, const Cutoffs& cut);
/// gamma^{n m+1}_{n m+1} (diagonal series at shifted column index).
double gamma_ge(int n, int m, const StandardForm& sf, const Cutoffs& cut);
/// gamma^{n+1 m}_{n+1 m}.
double gamma_eg(int n, int m, const StandardForm& sf, const Cutoffs& cut);
/// gamma^{n+1 m+1}_{n m}, via the coherence path in opts.
double gamma_ggee(int n, int m, const StandardForm& sf, const Cutoffs& cut,
                  const BuildOptions& opts = {});
/// gamma^{n+1 m}_{n m+1}.
double gamma_geeg(int n, int m, const StandardForm& sf, const Cutoffs& cut,
                  const BuildOptions& opts = {});

/// Direct quadrature of gamma^{pq}_{nm} = (1/pi^2) int chi f_np f_mq for any
/// index quadruple. Raises NumericError when the imaginary part or the
/// node-refinement disagreement exceeds tol. Angular kernels are memoized per
/// (standard form, phase pair, nodes).
double gamma_quadrature(int n, int m, int p, int q, const StandardForm& sf, double tol,
                        const QuadratureOptions& opts = {});

/// Builds all five families. The k-series handles diag/ge/eg always; the
/// coherence families follow opts.coherence. Normalization outside
/// [1 - eps, 1 + eps] sets the truncation warning; it is not an error.
GammaTable build_table(const StandardForm& sf, const Cutoffs& cut, const BuildOptions& opts = {});

/// k_c large enough for the series to converge over the whole table window:
/// terms decay like (m_+^2/((n1+1)(n2+1)))^k only past k ~ (n_c+m_c)/|log ratio|.
int recommended_k_c(const StandardForm& sf, const Cutoffs& cut, int k_c_floor = 100);

}  // namespace cvqt
