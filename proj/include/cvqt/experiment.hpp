#pragma once

#include <map>
#include <string>
#include <vector>

#include "cvqt/gamma.hpp"

namespace cvqt {

enum class ExperimentKind {
    normalization_scan,
    transfer,
    thermal_surface,
    dissipation_surface,
    degauss_diff,
    random_max_scan,
    oracle_check,
};

std::string kind_name(ExperimentKind kind);

/// Deterministic description of one run. Grids default to the figure-level
/// axes: tau in [0, 2pi] (200 points), zeta in [0, 2] (80 points), nbar in
/// [0, 3] (60 points), gamma_t in [0, 0.6] (60 points).
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::transfer;
    double zeta = 0.86;
    double nbar = 0.0;
    double big_n = 0.1;
    int s = 0;  // degauss-diff raises this to 1 when the flag is absent
    double transmittivity = 0.9999;
    Cutoffs cutoffs;
    int tau_points = 200;
    int zeta_points = 80;
    int nbar_points = 60;
    int gamma_t_points = 60;
    double zeta_max = 2.0;
    double nbar_max = 3.0;
    double gamma_t_max = 0.6;
    std::uint64_t seed = 42;
    int sample_count = 22;  // random-max-scan resources
    int s_max = 4;          // random-max-scan subtraction depth
    double oracle_tolerance = 1e-6;
    bool unsigned_sn = false;
    std::string out_prefix;  // empty: no files written
    bool svg = false;

    std::string canonical() const;    // stable textual form, hashed into metadata
    std::uint64_t spec_hash() const;  // FNV-1a of canonical()
};

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void write_csv(std::ostream& os) const;
    std::string csv() const;
};

/// Runs the experiment; writes <out_prefix>.csv (and .svg when requested) if
/// out_prefix is set. Deterministic for a fixed spec.
ResultTable run(const ExperimentSpec& spec);

struct OracleCheckEntry {
    std::string name;
    double worst = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct OracleCheckReport {
    std::vector<OracleCheckEntry> entries;
    bool all_pass = true;

    std::string text() const;
};

/// Dual-path validation: gamma tables, transfer curves and subtraction maps
/// against the Fock oracle, plus the quadrature selection rules.
OracleCheckReport oracle_check(double tolerance = 1e-6);

// minimal SVG emitters (no plotting dependency)
void write_line_svg(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& x_label, const std::string& y_label);
void write_heatmap_svg(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<std::vector<double>>& value_rows,
                       const std::string& x_label, const std::string& y_label);

}  // namespace cvqt
