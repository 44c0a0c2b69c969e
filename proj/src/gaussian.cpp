#include "cvqt/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

namespace cvqt {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::Matrix2d rotation2(double phi) {
    // cos(phi) I + i sin(phi) sigma_y as a real matrix
    Eigen::Matrix2d r;
    r << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
    return r;
}

Eigen::Matrix2d sqrt_spd_2x2(const Eigen::Matrix2d& a) {
    // closed form for symmetric positive definite 2x2
    const double det = a.determinant();
    const double s = std::sqrt(det);
    const double t = std::sqrt(a.trace() + 2.0 * s);
    return (a + s * Eigen::Matrix2d::Identity()) / t;
}

double uniform01(std::mt19937_64& gen) {
    // 53-bit uniform, identical across platforms
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

Eigen::Matrix4d symplectic_form() {
    Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
    w(0, 1) = 1.0;
    w(1, 0) = -1.0;
    w(2, 3) = 1.0;
    w(3, 2) = -1.0;
    return w;
}

Eigen::Matrix4d StandardForm::matrix() const {
    Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
    v(0, 0) = v(1, 1) = n1;
    v(2, 2) = v(3, 3) = n2;
    v(0, 2) = v(2, 0) = m_plus;
    v(1, 3) = v(3, 1) = m_minus;
    return v;
}

bool StandardForm::valid(double tol) const {
    if (n1 < 1.0 - tol || n2 < 1.0 - tol) return false;
    if (m_plus < std::abs(m_minus) - tol) return false;
    return CovarianceMatrix(matrix()).bona_fide(tol);
}

bool operator==(const StandardForm& a, const StandardForm& b) {
    return a.n1 == b.n1 && a.n2 == b.n2 && a.m_plus == b.m_plus && a.m_minus == b.m_minus;
}

bool CovarianceMatrix::bona_fide(double tol) const {
    const auto [lo, hi] = symplectic_eigenvalues(*this);
    (void)hi;
    return lo >= 1.0 - tol;
}

Eigen::Matrix4d LocalSymplectic::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.block<2, 2>(0, 0) = s1;
    m.block<2, 2>(2, 2) = s2;
    return m;
}

bool LocalSymplectic::is_symplectic(double tol) const {
    const Eigen::Matrix4d s = matrix();
    const Eigen::Matrix4d w = symplectic_form();
    return (s * w * s.transpose() - w).cwiseAbs().maxCoeff() < tol;
}

StandardForm make_tmsv(double zeta) {
    if (!std::isfinite(zeta)) throw ParameterError("make_tmsv: zeta must be finite");
    const double z = std::abs(zeta);
    StandardForm sf;
    sf.n1 = sf.n2 = std::cosh(2.0 * z);
    sf.m_plus = std::sinh(2.0 * z);
    sf.m_minus = -sf.m_plus;
    return sf;
}

CovarianceMatrix make_squeezed_thermal_bs(const ResourceParams& p) {
    if (p.transmittivity < 0.0 || p.transmittivity > 1.0)
        throw ParameterError("make_squeezed_thermal_bs: transmittivity must lie in [0,1]");
    if (p.nbar1 < 0.0 || p.nbar2 < 0.0)
        throw ParameterError("make_squeezed_thermal_bs: nbar must be nonnegative");

    Eigen::Matrix4d vth = Eigen::Matrix4d::Identity();
    vth(0, 0) = vth(1, 1) = 2.0 * p.nbar1 + 1.0;
    vth(2, 2) = vth(3, 3) = 2.0 * p.nbar2 + 1.0;

    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s(0, 0) = std::exp(-p.s1);
    s(1, 1) = std::exp(p.s1);
    s(2, 2) = std::exp(-p.s2);
    s(3, 3) = std::exp(p.s2);

    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    r.block<2, 2>(0, 0) = rotation2(p.phi1);
    r.block<2, 2>(2, 2) = rotation2(p.phi2);

    const double rt = std::sqrt(p.transmittivity);
    const double rr = std::sqrt(1.0 - p.transmittivity);
    Eigen::Matrix4d b = Eigen::Matrix4d::Zero();
    b.block<2, 2>(0, 0) = rt * Eigen::Matrix2d::Identity();
    b.block<2, 2>(0, 2) = -rr * Eigen::Matrix2d::Identity();
    b.block<2, 2>(2, 0) = rr * Eigen::Matrix2d::Identity();
    b.block<2, 2>(2, 2) = rt * Eigen::Matrix2d::Identity();

    const Eigen::Matrix4d v =
        b.transpose() * r.transpose() * s.transpose() * vth * s * r * b;
    return CovarianceMatrix(v);
}

std::pair<StandardForm, LocalSymplectic> to_standard_form(const CovarianceMatrix& v) {
    if (!v.bona_fide()) throw DomainError("to_standard_form: input is not bona fide");

    const Eigen::Matrix2d a = v.mat().block<2, 2>(0, 0);
    const Eigen::Matrix2d b = v.mat().block<2, 2>(2, 2);
    const Eigen::Matrix2d c = v.mat().block<2, 2>(0, 2);

    StandardForm sf;
    sf.n1 = std::sqrt(a.determinant());
    sf.n2 = std::sqrt(b.determinant());

    // m_plus^2, m_minus^2 from the invariants det C = m+ m- and det V. The
    // quadratic is ill-conditioned at m+^2 = m-^2 (any squeezed-vacuum-like
    // state), so these serve as a consistency guard; the returned values come
    // from the constructive reduction below.
    const double pc = c.determinant();
    const double nn = sf.n1 * sf.n2;
    const double s2 = (nn * nn + pc * pc - v.mat().determinant()) / nn;
    double disc = s2 * s2 - 4.0 * pc * pc;
    const double scale = std::max(1.0, s2 * s2);
    if (disc < -1e-10 * scale)
        throw NumericError("to_standard_form: degenerate correlation quadratic", disc);
    disc = std::max(disc, 0.0);
    const double mp2 = 0.5 * (s2 + std::sqrt(disc));
    const double mm2 = std::max(0.5 * (s2 - std::sqrt(disc)), 0.0);
    const double inv_m_plus = std::sqrt(std::max(mp2, 0.0));
    const double sgn = (pc > 0.0) ? 1.0 : (pc < 0.0 ? -1.0 : 0.0);
    const double inv_m_minus = sgn * std::sqrt(mm2);

    // Construct the local operation: first squeeze each block to n_j * I,
    // then rotate the cross block diagonal.
    LocalSymplectic op;
    op.s1 = (sqrt_spd_2x2(a) / std::sqrt(sf.n1)).inverse();
    op.s2 = (sqrt_spd_2x2(b) / std::sqrt(sf.n2)).inverse();
    Eigen::Matrix2d cp = op.s1 * c * op.s2.transpose();

    // 2x2 SVD with proper rotations, signs absorbed into the second value.
    const Eigen::Matrix2d g = cp.transpose() * cp;
    const double theta_v = 0.5 * std::atan2(2.0 * g(0, 1), g(0, 0) - g(1, 1));
    Eigen::Matrix2d rv = rotation2(theta_v).transpose();  // columns rotate
    Eigen::Matrix2d w = cp * rv;
    Eigen::Vector2d u0 = w.col(0);
    double sig0 = u0.norm();
    Eigen::Vector2d e0 = sig0 > 1e-300 ? Eigen::Vector2d(u0 / sig0) : Eigen::Vector2d(1, 0);
    const Eigen::Vector2d e1(-e0(1), e0(0));  // det [e0 e1] = +1
    double sig1 = e1.dot(w.col(1));
    Eigen::Matrix2d ru;
    ru << e0(0), e1(0), e0(1), e1(1);

    op.s1 = ru.transpose() * op.s1;
    op.s2 = rv.transpose() * op.s2;
    if (std::abs(sig1) > std::abs(sig0)) {
        // swap singular values with a pi/2 rotation on both modes
        const Eigen::Matrix2d q = rotation2(kPi / 2.0);
        op.s1 = q * op.s1;
        op.s2 = q * op.s2;
        std::swap(sig0, sig1);
    }
    if (sig0 < 0.0) {
        // flip the overall sign of the cross block (pi rotation on mode 1)
        op.s1 = -op.s1;
        sig0 = -sig0;
        sig1 = -sig1;
    }
    sf.m_plus = sig0;
    sf.m_minus = sig1;

    // the invariant route agrees up to its own conditioning ~ sqrt(eps * scale)
    const double guard = 1e-6 * std::max(1.0, sf.m_plus);
    if (std::abs(sf.m_plus - inv_m_plus) > guard || std::abs(sf.m_minus - inv_m_minus) > guard)
        throw NumericError("to_standard_form: invariant/constructive mismatch",
                           std::abs(sf.m_plus - inv_m_plus));

    const Eigen::Matrix4d mapped = op.matrix() * v.mat() * op.matrix().transpose();
    const double residual = (mapped - sf.matrix()).cwiseAbs().maxCoeff();
    if (residual > 1e-9)
        throw NumericError("to_standard_form: reduction residual too large", residual);
    return {sf, op};
}

double nu_minus(const StandardForm& sf) {
    const double delta = sf.n1 * sf.n1 + sf.n2 * sf.n2 - 2.0 * sf.m_plus * sf.m_minus;
    const double det_v = (sf.n1 * sf.n2 - sf.m_plus * sf.m_plus) *
                         (sf.n1 * sf.n2 - sf.m_minus * sf.m_minus);
    double inner = delta * delta - 4.0 * det_v;
    const double scale = std::max(1.0, delta * delta);
    if (inner < -1e-12 * scale)
        throw NumericError("nu_minus: negative inner radicand", inner);
    inner = std::max(inner, 0.0);
    double nu2 = 0.5 * (delta - std::sqrt(inner));
    if (nu2 < -1e-12 * std::max(1.0, delta))
        throw NumericError("nu_minus: negative radicand (input not bona fide?)", nu2);
    return std::sqrt(std::max(nu2, 0.0));
}

bool is_entangled(const StandardForm& sf, double tol) {
    return nu_minus(sf) < 1.0 - tol;
}

CovarianceMatrix dissipate(const CovarianceMatrix& v0, double big_n, double gamma_t) {
    if (big_n < 0.0) throw ParameterError("dissipate: N must be nonnegative");
    if (gamma_t < 0.0) throw ParameterError("dissipate: gamma_t must be nonnegative");
    const double u = std::exp(-gamma_t);
    return CovarianceMatrix((2.0 * big_n + 1.0) * (1.0 - u) * Eigen::Matrix4d::Identity() +
                            u * v0.mat());
}

double dissipation_threshold(double zeta, double big_n) {
    if (big_n < 0.0) throw ParameterError("dissipation_threshold: N must be nonnegative");
    if (big_n == 0.0) return std::numeric_limits<double>::infinity();
    const double num = 1.0 - std::exp(-2.0 * zeta);  // sinh(2z) - cosh(2z) + 1
    return 0.5 * std::log1p(num / (4.0 * big_n * (big_n + 1.0)));
}

double separability_gamma_t(double zeta, double big_n) {
    if (big_n < 0.0) throw ParameterError("separability_gamma_t: N must be nonnegative");
    if (big_n == 0.0) return std::numeric_limits<double>::infinity();
    return std::log((2.0 * big_n + 1.0 - std::exp(-2.0 * zeta)) / (2.0 * big_n));
}

double thermal_threshold(double zeta) {
    return 0.5 * std::expm1(2.0 * zeta);
}

std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& v) {
    if ((v.mat() - v.mat().transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ParameterError("symplectic_eigenvalues: matrix must be symmetric");
    const Eigen::Matrix4d m = symplectic_form() * v.mat();
    Eigen::EigenSolver<Eigen::Matrix4d> solver(m, /*computeEigenvectors=*/false);
    Eigen::Vector4d mods = solver.eigenvalues().cwiseAbs();
    std::sort(mods.data(), mods.data() + 4);
    return {mods(0), mods(2)};
}

double von_neumann_entropy(const CovarianceMatrix& v) {
    if (!v.bona_fide()) throw DomainError("von_neumann_entropy: input is not bona fide");
    const auto [lo, hi] = symplectic_eigenvalues(v);
    auto f = [](double nu) {
        if (nu < 1.0 - 1e-8) throw DomainError("von_neumann_entropy: symplectic eigenvalue < 1");
        if (nu <= 1.0 + 1e-14) return 0.0;  // f(1) = 0 by continuity
        const double p = 0.5 * (nu + 1.0);
        const double q = 0.5 * (nu - 1.0);
        return p * std::log(p) - q * std::log(q);
    };
    return f(lo) + f(hi);
}

CovarianceMatrix random_resource(std::uint64_t seed, const SamplingRanges& ranges) {
    if (ranges.t_min > ranges.t_max || ranges.t_min < 0.0 || ranges.t_max > 1.0)
        throw ParameterError("random_resource: invalid transmittivity range");
    std::mt19937_64 gen(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        ResourceParams p;
        p.s1 = ranges.s_abs_max * (2.0 * uniform01(gen) - 1.0);
        p.s2 = ranges.s_abs_max * (2.0 * uniform01(gen) - 1.0);
        p.phi1 = 2.0 * kPi * uniform01(gen);
        p.phi2 = 2.0 * kPi * uniform01(gen);
        p.transmittivity = ranges.t_min + (ranges.t_max - ranges.t_min) * uniform01(gen);
        p.nbar1 = ranges.nbar_max * uniform01(gen);
        p.nbar2 = ranges.nbar_max * uniform01(gen);
        CovarianceMatrix v = make_squeezed_thermal_bs(p);
        if (is_entangled(to_standard_form(v).first)) return v;
    }
    throw std::runtime_error("random_resource: 1000 consecutive separable draws");
}

std::string to_json(const CovarianceMatrix& v) {
    nlohmann::json j;
    auto rows = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) {
        auto row = nlohmann::json::array();
        for (int k = 0; k < 4; ++k) row.push_back(v(i, k));
        rows.push_back(row);
    }
    j["v"] = rows;
    return j.dump();
}

std::string to_json(const StandardForm& sf) {
    nlohmann::json j{{"n1", sf.n1}, {"n2", sf.n2}, {"m_plus", sf.m_plus}, {"m_minus", sf.m_minus}};
    return j.dump();
}

CovarianceMatrix covariance_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Eigen::Matrix4d v;
    const auto& rows = j.at("v");
    if (rows.size() != 4) throw ParameterError("covariance_from_json: need 4 rows");
    for (int i = 0; i < 4; ++i) {
        if (rows[i].size() != 4) throw ParameterError("covariance_from_json: need 4 columns");
        for (int k = 0; k < 4; ++k) v(i, k) = rows[i][k].get<double>();
    }
    return CovarianceMatrix(v);
}

StandardForm standard_form_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    StandardForm sf;
    sf.n1 = j.at("n1").get<double>();
    sf.n2 = j.at("n2").get<double>();
    sf.m_plus = j.at("m_plus").get<double>();
    sf.m_minus = j.at("m_minus").get<double>();
    return sf;
}

}  // namespace cvqt
