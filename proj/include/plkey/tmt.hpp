// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------
//
// Transmission-matrix technique. The receiver at port 2 knows H1 and Zin2
// locally and receives Zin1 over the public channel. Those three relations
// are linear in (A, B, C, D); together with AD - BC = 1 they pin down the
// transmission matrix, from which the reverse CTF H2 follows.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "plkey/two_port.hpp"

namespace plkey {

struct TmtObservation {
    Spectrum h1_hat;   // forward CTF, measured at port 2
    Spectrum zin1_hat; // port-1 input impedance (public)
    Spectrum zin2_hat; // port-2 input impedance, measured at port 2
    Termination term;  // known to both ends

    void validate() const;
};

/// Noiseless observation of a known channel.
TmtObservation observe_exact(const AbcdChannel& ch, const Termination& term);

enum class RootRule {
    smallest_step, // passivity, then smaller |t|
    continuity,    // passivity, then closest to the previous bin, then smaller |t|
};

enum class BinStatus : std::uint8_t {
    ok,
    degenerate,          // linear system rank < 3
    no_finite_root,      // no candidate survives finiteness and residual checks
    both_roots_rejected, // every surviving candidate is non-passive
};

struct SolveOptions {
    RootRule root_rule = RootRule::continuity;
    double rank_tol = 1e-10;     // smallest/largest singular value of the equilibrated system
    double residual_tol = 1e-6;  // max relative misfit of the four equations
    double passivity_tol = 1e-3; // allowed negative absorbed power, relative to |T|^2
};

struct TmtSolution {
    AbcdChannel abcd;             // identity at invalid bins
    Spectrum h2_hat;              // reverse CTF from abcd
    Eigen::VectorXd residual;     // per-bin residual of the selected candidate
    std::vector<std::uint8_t> branch;
    std::vector<BinStatus> status;

    std::vector<std::uint8_t> mask() const;
    std::size_t n_valid() const;
};

TmtSolution solve_abcd(const TmtObservation& obs, const SolveOptions& opts = {});

/// H2 = ZL / (ZL D + B + ZL ZT C + ZT A) from the recovered matrix.
Spectrum recover_h2(const TmtSolution& sol, const Termination& term);

/// Per-bin misfit of (A, B, C, D) against the three observations and AD - BC = 1.
double tmt_residual(const Eigen::Vector4cd& abcd, std::complex<double> h1, std::complex<double> zin1,
                    std::complex<double> zin2, std::complex<double> zt, std::complex<double> zl);

/// Whether the two-port absorbs non-negative power for every port state.
bool is_passive(const Eigen::Vector4cd& abcd, double tol, double z_ref = 50.0);

struct DeltaMismatch {
    Eigen::VectorXd delta;           // |(h2a - h2b) / h2a|
    std::vector<std::uint8_t> valid; // zero reference -> invalid

    /// Median of 20 log10(delta) over valid bins (and bins set in `mask`, if given).
    double median_db(std::span<const std::uint8_t> mask = {}) const;
};

DeltaMismatch delta_mismatch(const Spectrum& h2_alice, const Spectrum& h2_bob);

} // namespace plkey
