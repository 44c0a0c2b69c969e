#pragma once

#include <vector>

#include "cvqt/fock.hpp"
#include "cvqt/gamma.hpp"
#include "cvqt/transfer.hpp"

namespace cvqt {

enum class SubtractionMode { formal, physical };

/// Symmetric s-photon subtraction request.
struct SubtractionSpec {
    int s = 1;
    SubtractionMode mode = SubtractionMode::formal;
    double transmittivity = 0.9999;  // physical mode only, must be < 1
};

/// Formal index-shift map
///   gamma^{pq}_{nm} -> sqrt((n+s)!(m+s)!(p+s)!(q+s)!/(n!m!p!q!))
///                      gamma^{p+s q+s}_{n+s m+s},
/// applied to all five families and renormalized by the new diagonal trace.
/// The result drops the cutoffs by s; the source table must have been built
/// with cutoffs at least (n_c + s, m_c + s) for the target window.
GammaTable formal_subtract(const GammaTable& table, int s);

/// Single-photon-per-mode conditional subtraction through beam splitters of
/// transmittivity T with photon-resolving detection:
///   gamma -> T^{(n+m+p+q)/2} sqrt((n+1)(m+1)(p+1)(q+1)) gamma^{p+1 q+1}_{n+1 m+1},
/// normalized by the computed diagonal trace. Cascade s stages for s photons.
GammaTable physical_subtract(const GammaTable& table, double transmittivity);

/// Standard form of the Gaussian state sharing the s-photon subtracted TMSV's
/// second moments, computed from the Fock oracle. n_f = 0 picks the
/// truncation automatically.
StandardForm gaussian_equivalent_cm(double zeta, int s, int n_f = 0);

/// Max of negativity over the window: uniform grid scan followed by
/// golden-section refinement around the best cell.
double max_transfer(const GammaTable& table, double tau_lo = 0.0,
                    double tau_hi = 6.283185307179586, int resolution = 400);

struct DegaussRow {
    double zeta = 0.0;
    double tau = 0.0;
    double e_gaus = 0.0;
    double e_nongaus = 0.0;
};

struct DegaussOptions {
    Cutoffs cutoffs;        // result-table cutoffs for both branches
    int source_k_c = 0;     // 0: scale k_c automatically for the inflated source
    bool flag_noise = true; // mark rows whose values sit below the series noise floor
};

struct DegaussSurface {
    std::vector<DegaussRow> rows;
    std::vector<double> noise_floor;      // per-row estimated noise of e_nongaus
    std::vector<double> window_deficit;   // boundary mass left by a capped window (0 = captured)
};

/// Difference surface E_gaus - E_nongaus over (zeta, tau) for s-photon
/// subtraction from the TMSV family. The zeta = 0 column is identically zero
/// (the vacuum transfers nothing either way and its subtraction is undefined).
DegaussSurface degauss_difference(const std::vector<double>& zeta_grid,
                                  const std::vector<double>& tau_grid, int s,
                                  const DegaussOptions& opts = {});

/// Non-Gaussianity degree: von Neumann entropy of the Gaussian state with the
/// subtracted state's second moments.
double non_gaussianity(double zeta, int s);

/// Subtraction with an adequate window: grows the result cutoffs (from the
/// floor) until the renormalized table's boundary mass drops below 1e-9, so
/// the conditional state is actually captured. Subtracted states occupy
/// higher Fock numbers than their source; a fixed window silently conditions
/// on an ever-smaller part of the state. s = 0 builds at the floor unchanged.
/// With window_deficit == nullptr the window cap raises TruncationError;
/// otherwise the capped best-effort table is returned and *window_deficit
/// records its remaining boundary mass (0 when fully captured).
GammaTable build_subtracted(const StandardForm& sf, int s, const Cutoffs& floor_cutoffs,
                            double* window_deficit = nullptr, int window_cap = 320);

}  // namespace cvqt
