#include "cvqt/gamma.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <vector>

#include "cvqt/errors.hpp"
#include "cvqt/parallel.hpp"

namespace cvqt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long double kSeriesEps = 1e-19L;  // 80-bit accumulation

using ldvec = std::vector<long double>;
using ldmat = std::vector<ldvec>;

// ---------------------------------------------------------------------------
// terminating hypergeometric tables via contiguous three-term recurrences
// ---------------------------------------------------------------------------

// F1[n][k] = 2F1(-n, k+1; 1; z).  Recurrence in degree n
//   (n+1) F_{n+1} = (2n+1 - (k+1+n) z) F_n - n (1-z) F_{n-1}
// which stays accurate where the direct alternating sum loses all digits.
ldmat hyp_table_c1(int nmax, int kc, long double z) {
    ldmat f(nmax + 1, ldvec(kc + 1));
    for (int k = 0; k <= kc; ++k) f[0][k] = 1.0L;
    if (nmax >= 1)
        for (int k = 0; k <= kc; ++k) f[1][k] = 1.0L - (k + 1) * z;
    for (int n = 1; n < nmax; ++n)
        for (int k = 0; k <= kc; ++k)
            f[n + 1][k] =
                ((2 * n + 1 - (k + 1 + n) * z) * f[n][k] - n * (1.0L - z) * f[n - 1][k]) / (n + 1);
    return f;
}

// F2[n][k] = 2F1(-n, k+2; 2; z) with
//   (n+2) F_{n+1} = (2n+2 - (k+2+n) z) F_n - n (1-z) F_{n-1}
ldmat hyp_table_c2(int nmax, int kc, long double z) {
    ldmat f(nmax + 1, ldvec(kc + 1));
    for (int k = 0; k <= kc; ++k) f[0][k] = 1.0L;
    if (nmax >= 1)
        for (int k = 0; k <= kc; ++k) f[1][k] = 1.0L - (k + 2) * z / 2.0L;
    for (int n = 1; n < nmax; ++n)
        for (int k = 0; k <= kc; ++k)
            f[n + 1][k] =
                ((2 * n + 2 - (k + 2 + n) * z) * f[n][k] - n * (1.0L - z) * f[n - 1][k]) / (n + 2);
    return f;
}

// ---------------------------------------------------------------------------
// series weights
// ---------------------------------------------------------------------------

// Diagonal-family weights w_k = 4 g_k / (c1 c2)^{k+1} with
// g_k = m_-^{2k} 2F1(1/2,-k;1;(m_-^2-m_+^2)/m_-^2) expanded division-free:
// g_k = sum_j (1/2)_j k!/((k-j)! j!^2) (m_+^2-m_-^2)^j m_-^{2(k-j)}.
// Everything is scaled by (c1 c2)^k as it is built, so the terms stay in
// [0, (m_+^2/(c1 c2))^k] and never overflow.
ldvec diag_weights(const StandardForm& sf, int kc) {
    const long double c12 = (1.0L + sf.n1) * (1.0L + sf.n2);
    const long double a = (static_cast<long double>(sf.m_plus) * sf.m_plus -
                           static_cast<long double>(sf.m_minus) * sf.m_minus) / c12;
    const long double b = static_cast<long double>(sf.m_minus) * sf.m_minus / c12;
    ldvec apow(kc + 1), bpow(kc + 1);
    apow[0] = bpow[0] = 1.0L;
    for (int j = 1; j <= kc; ++j) {
        apow[j] = apow[j - 1] * a;
        bpow[j] = bpow[j - 1] * b;
    }
    ldvec w(kc + 1);
    for (int k = 0; k <= kc; ++k) {
        long double coef = 1.0L;  // (1/2)_j k!/((k-j)! j!^2) at j=0
        long double sum = bpow[k];
        for (int j = 0; j < k; ++j) {
            coef *= (0.5L + j) * (k - j) / ((j + 1.0L) * (j + 1.0L));
            sum += coef * apow[j + 1] * bpow[k - j - 1];
        }
        w[k] = 4.0L * sum / c12;
    }
    return w;
}

// Coherence-family weights. The angular integral contributes
// I_0(p r s) I_1(q r s) for gamma^{n+1 m+1}_{n m} and I_1(p r s) I_0(q r s)
// for gamma^{n+1 m}_{n m+1}, p = (m_+ + m_-)/2, q = (m_+ - m_-)/2. Expanding
// the Bessel product in (r s)^{2k+1} and folding the radial integrals gives
//   gamma^{n+1 m+1}_{n m} = sqrt((n+1)(m+1)) sum_k wg_k F2(n,k) F2(m,k)
//   wg_k = (8/(c1 c2)^2) sum_l (k+1)!^2/((k-l)!^2 l! (l+1)!)
//                              (p^2/c12)^{k-l} (q^2/c12)^l q
// and wd_k with p <-> q swapped.
struct CoherenceWeights {
    ldvec wg, wd;
};

CoherenceWeights coherence_weights(const StandardForm& sf, int kc) {
    const long double c12 = (1.0L + sf.n1) * (1.0L + sf.n2);
    const long double p = (static_cast<long double>(sf.m_plus) + sf.m_minus) / 2.0L;
    const long double q = (static_cast<long double>(sf.m_plus) - sf.m_minus) / 2.0L;
    const long double ap = p * p / c12;
    const long double aq = q * q / c12;
    ldvec ppow(kc + 1), qpow(kc + 1);
    ppow[0] = qpow[0] = 1.0L;
    for (int j = 1; j <= kc; ++j) {
        ppow[j] = ppow[j - 1] * ap;
        qpow[j] = qpow[j - 1] * aq;
    }
    CoherenceWeights out{ldvec(kc + 1), ldvec(kc + 1)};
    const long double front = 8.0L / (c12 * c12);
    for (int k = 0; k <= kc; ++k) {
        // E_l = (k+1)!^2 / ((k-l)!^2 l! (l+1)!), E_0 = (k+1)^2
        long double e = (k + 1.0L) * (k + 1.0L);
        long double sg = e * ppow[k];  // l = 0 term of the q-side sum
        long double sd = e * qpow[k];
        for (int l = 0; l < k; ++l) {
            e *= (k - l) * (k - l) / ((l + 1.0L) * (l + 2.0L));
            sg += e * ppow[k - l - 1] * qpow[l + 1];
            sd += e * qpow[k - l - 1] * ppow[l + 1];
        }
        out.wg[k] = front * q * sg;
        out.wd[k] = front * p * sd;
    }
    return out;
}

// sum_k w_k F1(n,k) F2(m,k) for all (n,m), plus a positive envelope used as a
// cancellation noise estimate.
void weighted_product(const ldvec& w, const ldmat& f1, const ldmat& f2, Eigen::MatrixXd& out,
                      long double& noise) {
    const int nmax = static_cast<int>(f1.size()) - 1;
    const int mmax = static_cast<int>(f2.size()) - 1;
    const int kc = static_cast<int>(w.size()) - 1;
    out.resize(nmax + 1, mmax + 1);
    long double env_max = 0.0L;
    for (int n = 0; n <= nmax; ++n) {
        for (int m = 0; m <= mmax; ++m) {
            long double acc = 0.0L, env = 0.0L;
            const ldvec& a = f1[n];
            const ldvec& b = f2[m];
            for (int k = 0; k <= kc; ++k) {
                const long double t = w[k] * a[k] * b[k];
                acc += t;
                env += std::abs(t);
            }
            out(n, m) = static_cast<double>(acc);
            env_max = std::max(env_max, env);
        }
    }
    noise = std::max(noise, kSeriesEps * env_max);
}

// ---------------------------------------------------------------------------
// associated Laguerre and displacement matrix elements
// ---------------------------------------------------------------------------

// L_j^{(alpha)}(x) for j = 0..jmax, ascending recurrence.
std::vector<double> laguerre_column(int jmax, int alpha, double x) {
    std::vector<double> l(jmax + 1);
    l[0] = 1.0;
    if (jmax >= 1) l[1] = 1.0 + alpha - x;
    for (int j = 1; j < jmax; ++j)
        l[j + 1] = ((2.0 * j + alpha + 1.0 - x) * l[j] - (j + alpha) * l[j - 1]) / (j + 1.0);
    return l;
}

}  // namespace

std::complex<double> f_np(int n, int p, std::complex<double> xi) {
    if (n < 0 || p < 0) throw ParameterError("f_np: indices must be nonnegative");
    const int lo = std::min(n, p);
    const int hi = std::max(n, p);
    const int d = hi - lo;
    const double x = std::norm(xi);
    const double lag = laguerre_column(lo, d, x)[lo];
    const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)));
    std::complex<double> amp;
    if (n >= p) {
        amp = std::pow(-xi, d);  // (-xi)^{n-p}
    } else {
        amp = std::pow(std::conj(xi), d);
    }
    return ratio * amp * std::exp(-0.5 * x) * lag;
}

double coeff_G(int k, double m_plus, double m_minus) {
    if (k < 0) throw ParameterError("coeff_G: k must be nonnegative");
    // G_k = (1/(4^k k!^2)) sum_j (1/2)_j k!/((k-j)! j!^2) (m_+^2-m_-^2)^j m_-^{2(k-j)}
    const long double a = static_cast<long double>(m_plus) * m_plus -
                          static_cast<long double>(m_minus) * m_minus;
    const long double b = static_cast<long double>(m_minus) * m_minus;
    long double coef = 1.0L, apow = 1.0L;
    ldvec bpow(k + 1);
    bpow[0] = 1.0L;
    for (int j = 1; j <= k; ++j) bpow[j] = bpow[j - 1] * b;
    long double sum = bpow[k];
    for (int j = 0; j < k; ++j) {
        coef *= (0.5L + j) * (k - j) / ((j + 1.0L) * (j + 1.0L));
        apow *= a;
        sum += coef * apow * bpow[k - j - 1];
    }
    long double scale = 1.0L;
    for (int j = 1; j <= k; ++j) scale *= 4.0L * j * j;  // 4^k k!^2
    return static_cast<double>(sum / scale);
}

namespace {

// shared core: diagonal family on [0..nmax] x [0..mmax]
Eigen::MatrixXd diag_block(const StandardForm& sf, int nmax, int mmax, int kc,
                           long double* noise_out = nullptr) {
    const ldvec w = diag_weights(sf, kc);
    const ldmat f1 = hyp_table_c1(nmax, kc, 2.0L / (1.0L + sf.n1));
    const ldmat f2 = hyp_table_c1(mmax, kc, 2.0L / (1.0L + sf.n2));
    Eigen::MatrixXd out;
    long double noise = 0.0L;
    weighted_product(w, f1, f2, out, noise);
    if (noise_out) *noise_out = std::max(*noise_out, noise);
    return out;
}

void coherence_blocks_series(const StandardForm& sf, int nmax, int mmax, int kc,
                             Eigen::MatrixXd& ggee, Eigen::MatrixXd& geeg,
                             long double* noise_out = nullptr) {
    const CoherenceWeights w = coherence_weights(sf, kc);
    const ldmat f1 = hyp_table_c2(nmax, kc, 2.0L / (1.0L + sf.n1));
    const ldmat f2 = hyp_table_c2(mmax, kc, 2.0L / (1.0L + sf.n2));
    long double noise = 0.0L;
    weighted_product(w.wg, f1, f2, ggee, noise);
    weighted_product(w.wd, f1, f2, geeg, noise);
    for (int n = 0; n <= nmax; ++n)
        for (int m = 0; m <= mmax; ++m) {
            const double rt = std::sqrt((n + 1.0) * (m + 1.0));
            ggee(n, m) *= rt;
            geeg(n, m) *= rt;
        }
    if (noise_out) *noise_out = std::max(*noise_out, noise);
}

void check_bona_fide_sf(const StandardForm& sf, const char* where) {
    if (!sf.valid()) throw DomainError(std::string(where) + ": standard form is not bona fide");
}

// ---------------------------------------------------------------------------
// phase-space quadrature
// ---------------------------------------------------------------------------

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

struct RadialGrid {
    std::vector<double> r, w;  // nodes and weights on [0, r_max]
    double r_max = 0.0;
};

// The integrand is (polynomial of the given degree) x Gaussian; the domain
// must cover the point where r^degree e^{-lam r^2 / 2} falls below the tail,
// and the node count keeps the density of the degree-free configuration.
RadialGrid radial_grid(const StandardForm& sf, int nodes, double tail, int degree) {
    const double c1 = sf.n1 + 1.0, c2 = sf.n2 + 1.0;
    // slowest decay direction of the full Gaussian envelope
    const double lam =
        0.5 * (c1 + c2) - std::sqrt(0.25 * (c1 - c2) * (c1 - c2) + sf.m_plus * sf.m_plus);
    if (lam <= 0.0) throw DomainError("radial_grid: envelope does not decay (not bona fide)");
    const double big = std::log(1.0 / tail);
    const double r_base = std::sqrt(2.0 * big / lam);
    double r = r_base;
    for (int it = 0; it < 8; ++it)
        r = std::sqrt(2.0 * (big + degree * std::log(std::max(r, 1.0))) / lam);
    RadialGrid g;
    g.r_max = std::min(r, 80.0);
    const int n_eff = std::max(nodes, static_cast<int>(std::ceil(nodes * g.r_max / r_base)));
    std::vector<double> x, w;
    gauss_legendre(n_eff, x, w);
    g.r.resize(n_eff);
    g.w.resize(n_eff);
    for (int i = 0; i < n_eff; ++i) {
        g.r[i] = 0.5 * g.r_max * (x[i] + 1.0);
        g.w[i] = 0.5 * g.r_max * w[i];
    }
    return g;
}

// Angular sums A_ab(r_i, s_j) = sum_{phi,theta} w^2 chi_ang e^{i(a phi + b theta)}
// over the trapezoid lattice, for one phase pair (a, b).
struct AngularKernel {
    Eigen::MatrixXd re, im;
    RadialGrid grid;
    int angular = 0;
};

struct KernelKey {
    double n1, n2, mp, mm;
    int a, b, angular, radial, degree;
    bool operator<(const KernelKey& o) const {
        return std::memcmp(this, &o, sizeof(KernelKey)) < 0;
    }
};

std::map<KernelKey, std::shared_ptr<const AngularKernel>> g_kernel_cache;
std::mutex g_kernel_mutex;

std::shared_ptr<const AngularKernel> angular_kernel(const StandardForm& sf, int a, int b,
                                                    const QuadratureOptions& opts, int angular,
                                                    int radial, int degree) {
    // bucket the polynomial degree so nearby index quadruples share kernels
    degree = ((degree + 15) / 16) * 16;
    KernelKey key{};
    key.n1 = sf.n1;
    key.n2 = sf.n2;
    key.mp = sf.m_plus;
    key.mm = sf.m_minus;
    key.a = a;
    key.b = b;
    key.angular = angular;
    key.radial = radial;
    key.degree = degree;
    {
        std::lock_guard<std::mutex> lock(g_kernel_mutex);
        auto it = g_kernel_cache.find(key);
        if (it != g_kernel_cache.end()) return it->second;
    }

    auto kernel = std::make_shared<AngularKernel>();
    kernel->grid = radial_grid(sf, radial, opts.envelope_tail, degree);
    kernel->angular = angular;
    const int na = angular;
    std::vector<double> cphi(na), sphi(na);
    for (int i = 0; i < na; ++i) {
        const double phi = 2.0 * kPi * i / na;
        cphi[i] = std::cos(phi);
        sphi[i] = std::sin(phi);
    }
    // chi(re^{i phi}, se^{i theta}) = exp(-(n1 r^2 + n2 s^2)/2)
    //   * exp(-r s (m_- cos phi cos theta + m_+ sin phi sin theta));
    // the x quadrature pairs with the imaginary part of the displacement
    // amplitude, which puts m_- on the cos-cos term. The f_np envelopes
    // e^{-(r^2+s^2)/2} are folded in as well so the combined exponent stays
    // negative definite and cannot overflow at large radii.
    std::vector<double> k1(na * na), pcos(na * na), psin(na * na);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) {
            k1[i * na + j] = sf.m_minus * cphi[i] * cphi[j] + sf.m_plus * sphi[i] * sphi[j];
            const double arg = 2.0 * kPi * (static_cast<double>(a) * i + static_cast<double>(b) * j) / na;
            pcos[i * na + j] = std::cos(arg);
            psin[i * na + j] = std::sin(arg);
        }
    const double wang = (2.0 * kPi / na) * (2.0 * kPi / na);
    const int nr = static_cast<int>(kernel->grid.r.size());
    kernel->re.resize(nr, nr);
    kernel->im.resize(nr, nr);
    const auto& r = kernel->grid.r;
    const double c1 = sf.n1 + 1.0, c2 = sf.n2 + 1.0;
    parallel_for(static_cast<std::size_t>(nr), [&](std::size_t i) {
        for (int j = 0; j < nr; ++j) {
            const double u = r[i] * r[j];
            const double env = -0.5 * (c1 * r[i] * r[i] + c2 * r[j] * r[j]);
            double sre = 0.0, sim = 0.0;
            for (int t = 0; t < na * na; ++t) {
                const double v = std::exp(env - u * k1[t]);
                sre += v * pcos[t];
                sim += v * psin[t];
            }
            kernel->re(i, j) = wang * sre;
            kernel->im(i, j) = wang * sim;
        }
    });

    std::lock_guard<std::mutex> lock(g_kernel_mutex);
    auto [it, inserted] = g_kernel_cache.emplace(key, kernel);
    return it->second;
}

// radial weight of f_np without the envelope: sign * sqrt(min!/max!) r^{|n-p|} L_min^{(|n-p|)}(r^2)
std::vector<double> radial_factor(int n, int p, const std::vector<double>& r) {
    const int lo = std::min(n, p);
    const int d = std::abs(n - p);
    const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(std::max(n, p) + 1.0)));
    const double sign = (n > p && (n - p) % 2 != 0) ? -1.0 : 1.0;
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = r[i] * r[i];
        out[i] = sign * ratio * std::pow(r[i], d) * laguerre_column(lo, d, x)[lo];
    }
    return out;
}

struct QuadResult {
    double re = 0.0;
    double im = 0.0;
};

QuadResult quadrature_eval(int n, int m, int p, int q, const StandardForm& sf,
                           const QuadratureOptions& opts, int angular, int radial) {
    const int degree = std::max(n + p, m + q) + 2;
    const auto kernel = angular_kernel(sf, n - p, m - q, opts, angular, radial, degree);
    const auto& g = kernel->grid;
    const std::vector<double> rho1 = radial_factor(n, p, g.r);
    const std::vector<double> rho2 = radial_factor(m, q, g.r);
    const int nr = static_cast<int>(g.r.size());
    // envelopes live inside the kernel
    std::vector<double> w1(nr), w2(nr);
    for (int i = 0; i < nr; ++i) {
        w1[i] = g.w[i] * g.r[i] * rho1[i];
        w2[i] = g.w[i] * g.r[i] * rho2[i];
    }
    QuadResult out;
    for (int i = 0; i < nr; ++i) {
        double accr = 0.0, acci = 0.0;
        for (int j = 0; j < nr; ++j) {
            accr += w2[j] * kernel->re(i, j);
            acci += w2[j] * kernel->im(i, j);
        }
        out.re += w1[i] * accr;
        out.im += w1[i] * acci;
    }
    out.re /= kPi * kPi;
    out.im /= kPi * kPi;
    return out;
}

}  // namespace

double gamma_quadrature(int n, int m, int p, int q, const StandardForm& sf, double tol,
                        const QuadratureOptions& opts) {
    if (n < 0 || m < 0 || p < 0 || q < 0)
        throw ParameterError("gamma_quadrature: indices must be nonnegative");
    check_bona_fide_sf(sf, "gamma_quadrature");
    const QuadResult base = quadrature_eval(n, m, p, q, sf, opts, opts.angular_nodes, opts.radial_nodes);
    // refined rule (x1.5 nodes per axis); the disagreement bounds the base error
    const QuadResult fine = quadrature_eval(n, m, p, q, sf, opts, 3 * opts.angular_nodes / 2,
                                            3 * opts.radial_nodes / 2);
    if (std::abs(fine.im) >= tol)
        throw NumericError("gamma_quadrature: imaginary part above tolerance", std::abs(fine.im));
    const double disagreement = std::abs(base.re - fine.re);
    if (disagreement >= tol)
        throw NumericError("gamma_quadrature: node-refinement disagreement", disagreement);
    return fine.re;
}

double gamma_diag(int n, int m, const StandardForm& sf, const Cutoffs& cut) {
    check_bona_fide_sf(sf, "gamma_diag");
    return diag_block(sf, n, m, cut.k_c)(n, m);
}

double gamma_ge(int n, int m, const StandardForm& sf, const Cutoffs& cut) {
    return gamma_diag(n, m + 1, sf, cut);
}

double gamma_eg(int n, int m, const StandardForm& sf, const Cutoffs& cut) {
    return gamma_diag(n + 1, m, sf, cut);
}

double gamma_ggee(int n, int m, const StandardForm& sf, const Cutoffs& cut,
                  const BuildOptions& opts) {
    check_bona_fide_sf(sf, "gamma_ggee");
    if (opts.coherence == CoherencePath::series) {
        Eigen::MatrixXd gg, gd;
        coherence_blocks_series(sf, n, m, cut.k_c, gg, gd);
        return gg(n, m);
    }
    return gamma_quadrature(n, m, n + 1, m + 1, sf, opts.quad_tol, opts.quad);
}

double gamma_geeg(int n, int m, const StandardForm& sf, const Cutoffs& cut,
                  const BuildOptions& opts) {
    check_bona_fide_sf(sf, "gamma_geeg");
    if (opts.coherence == CoherencePath::series) {
        Eigen::MatrixXd gg, gd;
        coherence_blocks_series(sf, n, m, cut.k_c, gg, gd);
        return gd(n, m);
    }
    return gamma_quadrature(n, m + 1, n + 1, m, sf, opts.quad_tol, opts.quad);
}

GammaTable::GammaTable(StandardForm sf, Cutoffs cut, Eigen::MatrixXd diag, Eigen::MatrixXd ge,
                       Eigen::MatrixXd eg, Eigen::MatrixXd ggee, Eigen::MatrixXd geeg)
    : sf_(sf),
      cut_(cut),
      diag_(std::move(diag)),
      ge_(std::move(ge)),
      eg_(std::move(eg)),
      ggee_(std::move(ggee)),
      geeg_(std::move(geeg)) {
    norm_ = diag_.sum();
}

void GammaTable::set_quality(double quad_error, double series_noise, double epsilon_trunc) {
    quad_error_ = quad_error;
    series_noise_ = series_noise;
    truncation_warning_ = std::abs(norm_ - 1.0) > epsilon_trunc;
}

bool operator==(const Cutoffs& a, const Cutoffs& b) {
    return a.n_c == b.n_c && a.m_c == b.m_c && a.k_c == b.k_c;
}

std::uint64_t GammaTable::cache_key() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    mix(&sf_.n1, sizeof(double));
    mix(&sf_.n2, sizeof(double));
    mix(&sf_.m_plus, sizeof(double));
    mix(&sf_.m_minus, sizeof(double));
    mix(&cut_.n_c, sizeof(int));
    mix(&cut_.m_c, sizeof(int));
    mix(&cut_.k_c, sizeof(int));
    return h;
}

int recommended_k_c(const StandardForm& sf, const Cutoffs& cut, int k_c_floor) {
    const double ratio =
        sf.m_plus * sf.m_plus / ((sf.n1 + 1.0) * (sf.n2 + 1.0));
    if (ratio <= 0.0) return k_c_floor;
    // calibrated against the Schmidt closed form: the corner entry of an
    // (n_c, m_c) window converges past k ~ 2.1..3.6 (n_c+m_c)/(1-ratio) over
    // ratio in [0.48, 0.93] and windows up to (200, 200)
    const double need = 4.0 * (cut.n_c + cut.m_c) / std::max(1.0 - ratio, 5e-3) + 120.0;
    return std::min(std::max(static_cast<int>(std::ceil(need)), k_c_floor), 12000);
}

GammaTable build_table(const StandardForm& sf, const Cutoffs& cut, const BuildOptions& opts) {
    check_bona_fide_sf(sf, "build_table");
    if (cut.n_c < 0 || cut.m_c < 0 || cut.k_c < 0)
        throw ParameterError("build_table: cutoffs must be nonnegative");

    long double noise = 0.0L;
    // diag at indices up to n_c+1 / m_c+1 feeds all three population families
    const Eigen::MatrixXd big = diag_block(sf, cut.n_c + 1, cut.m_c + 1, cut.k_c, &noise);
    Eigen::MatrixXd diag = big.topLeftCorner(cut.n_c + 1, cut.m_c + 1);
    Eigen::MatrixXd ge = big.block(0, 1, cut.n_c + 1, cut.m_c + 1);
    Eigen::MatrixXd eg = big.block(1, 0, cut.n_c + 1, cut.m_c + 1);

    Eigen::MatrixXd ggee, geeg;
    double quad_error = 0.0;
    if (opts.coherence == CoherencePath::series) {
        coherence_blocks_series(sf, cut.n_c, cut.m_c, cut.k_c, ggee, geeg, &noise);
    } else {
        auto fill = [&](int angular, int radial, Eigen::MatrixXd& gg, Eigen::MatrixXd& gd) {
            const int degree = 2 * std::max(cut.n_c, cut.m_c) + 3;
            const auto kg = angular_kernel(sf, -1, -1, opts.quad, angular, radial, degree);
            const auto kd = angular_kernel(sf, -1, +1, opts.quad, angular, radial, degree);
            const auto& g = kg->grid;
            const int nr = static_cast<int>(g.r.size());
            // u_n(r) = r L_n^{(1)}(r^2) / sqrt(n+1); envelopes live in the kernel
            Eigen::MatrixXd u1(cut.n_c + 1, nr), u2(cut.m_c + 1, nr);
            for (int i = 0; i < nr; ++i) {
                const double x = g.r[i] * g.r[i];
                const auto l1 = laguerre_column(cut.n_c, 1, x);
                const auto l2 = laguerre_column(cut.m_c, 1, x);
                const double base = g.w[i] * g.r[i] * g.r[i];
                for (int n = 0; n <= cut.n_c; ++n) u1(n, i) = base * l1[n] / std::sqrt(n + 1.0);
                for (int m = 0; m <= cut.m_c; ++m) u2(m, i) = base * l2[m] / std::sqrt(m + 1.0);
            }
            gg = (u1 * kg->re * u2.transpose()) / (kPi * kPi);
            // the bra-side mode-2 element of the geeg family carries (-eta)
            gd = -(u1 * kd->re * u2.transpose()) / (kPi * kPi);
        };
        Eigen::MatrixXd gg_base, gd_base;
        fill(opts.quad.angular_nodes, opts.quad.radial_nodes, gg_base, gd_base);
        fill(3 * opts.quad.angular_nodes / 2, 3 * opts.quad.radial_nodes / 2, ggee, geeg);
        quad_error = std::max((ggee - gg_base).cwiseAbs().maxCoeff(),
                              (geeg - gd_base).cwiseAbs().maxCoeff());
        if (quad_error >= opts.quad_tol)
            throw NumericError("build_table: quadrature node-refinement disagreement", quad_error);
    }

    GammaTable table(sf, cut, std::move(diag), std::move(ge), std::move(eg), std::move(ggee),
                     std::move(geeg));
    table.set_quality(quad_error, static_cast<double>(noise), opts.epsilon_trunc);
    return table;
}

void GammaTable::to_csv(std::ostream& os) const {
    os.precision(17);
    os << "# cvqt gamma table\n";
    os << "# sf n1=" << sf_.n1 << " n2=" << sf_.n2 << " m_plus=" << sf_.m_plus
       << " m_minus=" << sf_.m_minus << "\n";
    os << "# cutoffs n_c=" << cut_.n_c << " m_c=" << cut_.m_c << " k_c=" << cut_.k_c << "\n";
    os << "# normalization=" << norm_ << " quad_error=" << quad_error_
       << " series_noise=" << series_noise_ << "\n";
    os << "family,n,m,value\n";
    auto dump = [&os](const char* name, const Eigen::MatrixXd& m) {
        for (int n = 0; n < m.rows(); ++n)
            for (int c = 0; c < m.cols(); ++c)
                os << name << ',' << n << ',' << c << ',' << m(n, c) << '\n';
    };
    dump("diag", diag_);
    dump("ge", ge_);
    dump("eg", eg_);
    dump("ggee", ggee_);
    dump("geeg", geeg_);
}

static GammaTable from_csv_impl(std::istream& is) {
    StandardForm sf;
    Cutoffs cut;
    double norm = 0.0, quad_error = 0.0, series_noise = 0.0;
    std::string line;
    std::map<std::string, Eigen::MatrixXd*> families;
    Eigen::MatrixXd diag, ge, eg, ggee, geeg;
    bool sized = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::sscanf(line.c_str(), "# sf n1=%lf n2=%lf m_plus=%lf m_minus=%lf", &sf.n1, &sf.n2,
                        &sf.m_plus, &sf.m_minus);
            std::sscanf(line.c_str(), "# cutoffs n_c=%d m_c=%d k_c=%d", &cut.n_c, &cut.m_c,
                        &cut.k_c);
            std::sscanf(line.c_str(), "# normalization=%lf quad_error=%lf series_noise=%lf", &norm,
                        &quad_error, &series_noise);
            continue;
        }
        if (line.rfind("family", 0) == 0) continue;
        if (!sized) {
            diag = ge = eg = ggee = geeg = Eigen::MatrixXd::Zero(cut.n_c + 1, cut.m_c + 1);
            families = {{"diag", &diag}, {"ge", &ge}, {"eg", &eg}, {"ggee", &ggee}, {"geeg", &geeg}};
            sized = true;
        }
        std::istringstream ss(line);
        std::string fam, ns, ms, vs;
        std::getline(ss, fam, ',');
        std::getline(ss, ns, ',');
        std::getline(ss, ms, ',');
        std::getline(ss, vs, ',');
        auto it = families.find(fam);
        if (it == families.end()) throw ParameterError("GammaTable::from_csv: unknown family " + fam);
        (*it->second)(std::stoi(ns), std::stoi(ms)) = std::stod(vs);
    }
    if (!sized) throw ParameterError("GammaTable::from_csv: empty input");
    GammaTable t(sf, cut, std::move(diag), std::move(ge), std::move(eg), std::move(ggee),
                 std::move(geeg));
    t.set_quality(quad_error, series_noise, 0.01);
    return t;
}

GammaTable GammaTable::from_csv(std::istream& is) { return from_csv_impl(is); }

}  // namespace cvqt
