#include "cvqt/experiment.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cvqt/errors.hpp"
#include "cvqt/fock.hpp"
#include "cvqt/parallel.hpp"
#include "cvqt/subtraction.hpp"
#include "cvqt/transfer.hpp"

namespace cvqt {

namespace {

constexpr const char* kVersion = "cvqt 1.0.0";
constexpr double kTwoPi = 6.283185307179586;

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

AmplitudeConvention convention(const ExperimentSpec& spec) {
    return spec.unsigned_sn ? AmplitudeConvention::unsigned_root : AmplitudeConvention::signed_sin;
}

void base_metadata(const ExperimentSpec& spec, ResultTable& table) {
    table.metadata.emplace_back("version", kVersion);
    table.metadata.emplace_back("kind", kind_name(spec.kind));
    std::ostringstream hash;
    hash << std::hex << spec.spec_hash();
    table.metadata.emplace_back("spec_hash", hash.str());
    table.metadata.emplace_back("cutoffs", std::to_string(spec.cutoffs.n_c) + "," +
                                               std::to_string(spec.cutoffs.m_c) + "," +
                                               std::to_string(spec.cutoffs.k_c));
    table.metadata.emplace_back("seed", std::to_string(spec.seed));
    table.metadata.emplace_back("spec", spec.canonical());
}

// thermalized TMSV standard form used by the thermal and transfer runs
StandardForm thermal_tmsv(double zeta, double nbar) {
    ResourceParams p;
    p.s1 = zeta;
    p.s2 = -zeta;
    p.transmittivity = 0.5;
    p.nbar1 = p.nbar2 = nbar;
    return to_standard_form(make_squeezed_thermal_bs(p)).first;
}

ResultTable run_normalization_scan(const ExperimentSpec& spec) {
    ResultTable out;
    out.columns = {"zeta", "norm"};
    const int points = static_cast<int>(std::round(spec.zeta_max / 0.05)) + 1;
    const std::vector<double> zetas = linspace(0.0, spec.zeta_max, points);
    out.rows.resize(zetas.size());
    parallel_for(zetas.size(), [&](std::size_t i) {
        const GammaTable t = build_table(make_tmsv(zetas[i]), spec.cutoffs);
        out.rows[i] = {zetas[i], t.normalization()};
    });
    return out;
}

ResultTable run_transfer(const ExperimentSpec& spec) {
    ResultTable out;
    out.columns = {"tau", "negativity"};
    StandardForm sf = thermal_tmsv(spec.zeta, spec.nbar);
    GammaTable table = spec.s > 0 ? build_subtracted(sf, spec.s, spec.cutoffs)
                                  : build_table(sf, spec.cutoffs);
    const TransferCurve curve =
        transfer_curve(table, linspace(0.0, kTwoPi, spec.tau_points), convention(spec));
    for (std::size_t i = 0; i < curve.tau.size(); ++i)
        out.rows.push_back({curve.tau[i], curve.negativity[i]});
    out.metadata.emplace_back("normalization", fmt(table.normalization()));
    return out;
}

ResultTable run_thermal_surface(const ExperimentSpec& spec) {
    ResultTable out;
    out.columns = {"nbar", "tau", "negativity"};
    const std::vector<double> nbars = linspace(0.0, spec.nbar_max, spec.nbar_points);
    const std::vector<double> taus = linspace(0.0, kTwoPi, spec.tau_points);
    out.rows.resize(nbars.size() * taus.size());
    parallel_for(nbars.size(), [&](std::size_t i) {
        const GammaTable table = build_table(thermal_tmsv(spec.zeta, nbars[i]), spec.cutoffs);
        const TransferCurve curve = transfer_curve(table, taus, convention(spec));
        for (std::size_t j = 0; j < taus.size(); ++j)
            out.rows[i * taus.size() + j] = {nbars[i], taus[j], curve.negativity[j]};
    });
    out.metadata.emplace_back("thermal_threshold", fmt(thermal_threshold(spec.zeta)));
    return out;
}

ResultTable run_dissipation_surface(const ExperimentSpec& spec) {
    ResultTable out;
    out.columns = {"gamma_t", "tau", "negativity"};
    const std::vector<double> gts = linspace(0.0, spec.gamma_t_max, spec.gamma_t_points);
    const std::vector<double> taus = linspace(0.0, kTwoPi, spec.tau_points);
    const CovarianceMatrix v0(make_tmsv(spec.zeta).matrix());
    out.rows.resize(gts.size() * taus.size());
    parallel_for(gts.size(), [&](std::size_t i) {
        const StandardForm sf = to_standard_form(dissipate(v0, spec.big_n, gts[i])).first;
        const GammaTable table = build_table(sf, spec.cutoffs);
        const TransferCurve curve = transfer_curve(table, taus, convention(spec));
        for (std::size_t j = 0; j < taus.size(); ++j)
            out.rows[i * taus.size() + j] = {gts[i], taus[j], curve.negativity[j]};
    });
    out.metadata.emplace_back("eq17_threshold", fmt(dissipation_threshold(spec.zeta, spec.big_n)));
    out.metadata.emplace_back("separability_gamma_t",
                              fmt(separability_gamma_t(spec.zeta, spec.big_n)));
    return out;
}

ResultTable run_degauss_diff(const ExperimentSpec& spec) {
    ResultTable out;
    out.columns = {"zeta", "tau", "e_gaus", "e_nongaus", "diff", "noise_floor"};
    DegaussOptions opts;
    opts.cutoffs = spec.cutoffs;
    const DegaussSurface surf =
        degauss_difference(linspace(0.0, spec.zeta_max, spec.zeta_points),
                           linspace(0.0, kTwoPi, spec.tau_points), spec.s, opts);
    for (std::size_t i = 0; i < surf.rows.size(); ++i) {
        const DegaussRow& r = surf.rows[i];
        out.rows.push_back(
            {r.zeta, r.tau, r.e_gaus, r.e_nongaus, r.e_gaus - r.e_nongaus, surf.noise_floor[i]});
    }
    return out;
}

ResultTable run_random_max_scan(const ExperimentSpec& spec) {
    ResultTable out;
    out.columns = {"resource", "s", "max_negativity"};
    const int count = spec.sample_count;
    const int smax = spec.s_max;
    out.rows.resize(static_cast<std::size_t>(count) * (smax + 1));
    std::vector<StandardForm> forms(count);
    for (int i = 0; i < count; ++i)
        forms[i] = to_standard_form(random_resource(spec.seed + i)).first;

    parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
        const StandardForm& sf = forms[i];
        for (int s = 0; s <= smax; ++s) {
            const GammaTable t = build_subtracted(sf, s, spec.cutoffs);
            out.rows[i * (smax + 1) + s] = {static_cast<double>(i), static_cast<double>(s),
                                            max_transfer(t)};
        }
    });
    for (int i = 0; i < count; ++i)
        out.metadata.emplace_back("resource_" + std::to_string(i), to_json(forms[i]));
    return out;
}

ResultTable run_oracle_check(const ExperimentSpec& spec) {
    const OracleCheckReport report = oracle_check(spec.oracle_tolerance);
    ResultTable out;
    out.columns = {"check", "worst", "tolerance", "pass"};
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        out.rows.push_back({static_cast<double>(i), e.worst, e.tolerance, e.pass ? 1.0 : 0.0});
        out.metadata.emplace_back("check_" + std::to_string(i), e.name);
    }
    out.metadata.emplace_back("all_pass", report.all_pass ? "1" : "0");
    return out;
}

void maybe_write_files(const ExperimentSpec& spec, const ResultTable& table) {
    if (spec.out_prefix.empty()) return;
    {
        std::ofstream os(spec.out_prefix + ".csv");
        if (!os) throw ParameterError("run: cannot open " + spec.out_prefix + ".csv for writing");
        table.write_csv(os);
    }
    if (!spec.svg) return;
    std::ofstream os(spec.out_prefix + ".svg");
    if (!os) throw ParameterError("run: cannot open " + spec.out_prefix + ".svg for writing");
    if (table.columns.size() == 2) {
        std::vector<double> x, y;
        for (const auto& r : table.rows) {
            x.push_back(r[0]);
            y.push_back(r[1]);
        }
        write_line_svg(os, x, y, table.columns[0], table.columns[1]);
    } else if (table.columns.size() >= 3) {
        // rows are (outer, inner, value, ...) in grid order
        std::vector<double> xs, ys;
        for (const auto& r : table.rows) {
            if (xs.empty() || r[0] != xs.back()) xs.push_back(r[0]);
        }
        const std::size_t inner = table.rows.size() / xs.size();
        for (std::size_t j = 0; j < inner; ++j) ys.push_back(table.rows[j][1]);
        const std::size_t vcol = table.columns.size() > 4 ? 4 : 2;  // diff column when present
        std::vector<std::vector<double>> vals(xs.size(), std::vector<double>(inner));
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < inner; ++j) vals[i][j] = table.rows[i * inner + j][vcol];
        write_heatmap_svg(os, xs, ys, vals, table.columns[0], table.columns[1]);
    }
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::normalization_scan: return "normalization-scan";
        case ExperimentKind::transfer: return "transfer";
        case ExperimentKind::thermal_surface: return "thermal-surface";
        case ExperimentKind::dissipation_surface: return "dissipation-surface";
        case ExperimentKind::degauss_diff: return "degauss-diff";
        case ExperimentKind::random_max_scan: return "random-max-scan";
        case ExperimentKind::oracle_check: return "oracle-check";
    }
    return "unknown";
}

std::string ExperimentSpec::canonical() const {
    std::ostringstream ss;
    ss.precision(17);
    ss << kind_name(kind) << ";zeta=" << zeta << ";nbar=" << nbar << ";N=" << big_n << ";s=" << s
       << ";T=" << transmittivity << ";ncut=" << cutoffs.n_c << ";mcut=" << cutoffs.m_c
       << ";kcut=" << cutoffs.k_c << ";tau_points=" << tau_points << ";zeta_points=" << zeta_points
       << ";nbar_points=" << nbar_points << ";gt_points=" << gamma_t_points
       << ";zeta_max=" << zeta_max << ";nbar_max=" << nbar_max << ";gt_max=" << gamma_t_max
       << ";seed=" << seed << ";samples=" << sample_count << ";s_max=" << s_max
       << ";oracle_tol=" << oracle_tolerance << ";unsigned_sn=" << (unsigned_sn ? 1 : 0);
    return ss.str();
}

std::uint64_t ExperimentSpec::spec_hash() const {
    const std::string c = canonical();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char byte : c) {
        h ^= byte;
        h *= 1099511628211ULL;
    }
    return h;
}

void ResultTable::write_csv(std::ostream& os) const {
    os.precision(17);
    for (const auto& [k, v] : metadata) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
}

std::string ResultTable::csv() const {
    std::ostringstream ss;
    write_csv(ss);
    return ss.str();
}

ResultTable run(const ExperimentSpec& spec) {
    ResultTable out;
    switch (spec.kind) {
        case ExperimentKind::normalization_scan: out = run_normalization_scan(spec); break;
        case ExperimentKind::transfer: out = run_transfer(spec); break;
        case ExperimentKind::thermal_surface: out = run_thermal_surface(spec); break;
        case ExperimentKind::dissipation_surface: out = run_dissipation_surface(spec); break;
        case ExperimentKind::degauss_diff: out = run_degauss_diff(spec); break;
        case ExperimentKind::random_max_scan: out = run_random_max_scan(spec); break;
        case ExperimentKind::oracle_check: out = run_oracle_check(spec); break;
    }
    ResultTable with_meta;
    base_metadata(spec, with_meta);
    with_meta.columns = out.columns;
    with_meta.rows = std::move(out.rows);
    for (auto& kv : out.metadata) with_meta.metadata.push_back(std::move(kv));
    maybe_write_files(spec, with_meta);
    return with_meta;
}

OracleCheckReport oracle_check(double tolerance) {
    OracleCheckReport report;
    auto add = [&report](const std::string& name, double worst, double tol) {
        report.entries.push_back({name, worst, tol, worst < tol});
        report.all_pass = report.all_pass && worst < tol;
    };
    const std::vector<double> taus = linspace(0.0, kTwoPi, 200);

    // 1. TMSV(0.86) table entries against the Schmidt closed form
    {
        const double z = 0.86;
        const GammaTable t = build_table(make_tmsv(z), Cutoffs{});
        const double th = std::tanh(z);
        const double sech2 = 1.0 / (std::cosh(z) * std::cosh(z));
        double worst = 0.0;
        for (int n = 0; n <= t.cutoffs().n_c; ++n)
            for (int m = 0; m <= t.cutoffs().m_c; ++m) {
                const double dnm = n == m ? sech2 * std::pow(th, 2.0 * n) : 0.0;
                worst = std::max(worst, std::abs(t.diag()(n, m) - dnm));
                const double genm = n == m + 1 ? sech2 * std::pow(th, 2.0 * n) : 0.0;
                worst = std::max(worst, std::abs(t.ge()(n, m) - genm));
                const double egnm = m == n + 1 ? sech2 * std::pow(th, 2.0 * m) : 0.0;
                worst = std::max(worst, std::abs(t.eg()(n, m) - egnm));
                const double ggnm = n == m ? sech2 * std::pow(th, 2.0 * n + 1.0) : 0.0;
                worst = std::max(worst, std::abs(t.ggee()(n, m) - ggnm));
                worst = std::max(worst, std::abs(t.geeg()(n, m)));
            }
        add("tmsv table vs Schmidt closed form", worst, 1e-8);
    }

    // 2. transfer curve vs the Fock oracle, s = 0
    {
        const GammaTable t = build_table(make_tmsv(0.86), Cutoffs{});
        const TransferCurve c = transfer_curve(t, taus);
        const FockTwoModeState f = tmsv_fock(0.86, 60);
        double worst = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i)
            worst = std::max(worst,
                             std::abs(c.negativity[i] - negativity(jc_evolve_trace(f, taus[i]))));
        add("transfer curve vs oracle (s=0, zeta=0.86)", worst, tolerance);
    }

    // 3. s = 1 subtracted curves vs the oracle
    for (double z : {0.3, 0.86}) {
        const Cutoffs src{35, 35, 200};
        const GammaTable sub = formal_subtract(build_table(make_tmsv(z), src), 1);
        const TransferCurve c = transfer_curve(sub, taus);
        const FockTwoModeState f = photon_subtract_fock(tmsv_fock(z, 70), 1);
        double worst = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i)
            worst = std::max(worst,
                             std::abs(c.negativity[i] - negativity(jc_evolve_trace(f, taus[i]))));
        add("transfer curve vs oracle (s=1, zeta=" + fmt(z) + ")", worst, tolerance);
    }

    // 4. physical vs formal subtraction at T = 0.9999
    {
        const Cutoffs src{26, 26, 150};
        const GammaTable source = build_table(make_tmsv(0.86), src);
        const TransferCurve cf = transfer_curve(formal_subtract(source, 1), taus);
        const TransferCurve cp = transfer_curve(physical_subtract(source, 0.9999), taus);
        double worst = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i)
            worst = std::max(worst, std::abs(cf.negativity[i] - cp.negativity[i]));
        add("physical vs formal subtraction (T=0.9999)", worst, 1e-3);
    }

    // 5. quadrature selection rules on two seeded random forms
    {
        double worst = 0.0;
        for (std::uint64_t seed : {11ULL, 12ULL}) {
            const StandardForm sf = to_standard_form(random_resource(seed)).first;
            for (int n = 0; n <= 1; ++n)
                for (int m = 0; m <= 1; ++m) {
                    worst = std::max(worst,
                                     std::abs(gamma_quadrature(n, m, n, m + 1, sf, 1e-6)));
                    worst = std::max(worst,
                                     std::abs(gamma_quadrature(n, m, n + 1, m, sf, 1e-6)));
                }
        }
        add("quadrature selection rules", worst, 1e-10);
    }

    // 6. crippled cutoffs must show their truncation
    {
        const GammaTable t = build_table(make_tmsv(0.86), Cutoffs{3, 3, 100});
        const double deficit = std::abs(1.0 - t.normalization());
        add("crippled cutoffs (n_c=3) expose truncation", t.truncation_warning() ? 0.0 : 1.0, 0.5);
        report.entries.back().worst = deficit;  // informational: the deficit itself
        report.entries.back().pass = t.truncation_warning();
        report.all_pass = report.all_pass && t.truncation_warning();
    }
    return report;
}

std::string OracleCheckReport::text() const {
    std::ostringstream ss;
    ss.precision(6);
    for (const auto& e : entries)
        ss << (e.pass ? "PASS" : "FAIL") << "  " << e.name << "  worst=" << e.worst
           << " tol=" << e.tolerance << "\n";
    ss << (all_pass ? "oracle-check: all checks passed\n" : "oracle-check: FAILURES present\n");
    return ss.str();
}

}  // namespace cvqt
