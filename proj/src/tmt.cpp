// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/tmt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/SVD>

namespace plkey {

using cd = std::complex<double>;

void TmtObservation::validate() const
{
    require_same_grid(h1_hat, zin1_hat);
    require_same_grid(h1_hat, zin2_hat);
    if (!(h1_hat.grid() == term.grid()))
        throw GridMismatch();
}

TmtObservation observe_exact(const AbcdChannel& ch, const Termination& term)
{
    return {ctf_forward(ch, term), zin_port1(ch, term.z_l), zin_port2(ch, term.z_l), term};
}

std::vector<std::uint8_t> TmtSolution::mask() const
{
    std::vector<std::uint8_t> m(status.size());
    for (std::size_t k = 0; k < status.size(); ++k)
        m[k] = status[k] == BinStatus::ok ? 1 : 0;
    return m;
}

std::size_t TmtSolution::n_valid() const
{
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), BinStatus::ok));
}

double tmt_residual(const Eigen::Vector4cd& x, cd h1, cd zin1, cd zin2, cd zt, cd zl)
{
    const cd A = x[0], B = x[1], C = x[2], D = x[3];
    auto rel = [](cd num, cd den, cd target) {
        if (std::abs(den) < kNearZero || std::abs(target) < kNearZero)
            return std::numeric_limits<double>::infinity();
        return std::abs(num / den - target) / std::abs(target);
    };
    const double e_zin1 = rel(zl * A + B, zl * C + D, zin1);
    const double e_h1 = rel(zl, zl * A + B + zl * zt * C + zt * D, h1);
    const double e_zin2 = rel(zl * D + B, zl * C + A, zin2);
    const double e_det = std::abs(A * D - B * C - 1.0);
    const double r = std::max({e_zin1, e_h1, e_zin2, e_det});
    return std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
}

bool is_passive(const Eigen::Vector4cd& x, double tol, double z_ref)
{
    // Absorbed power Re(V1 I1*) - Re(V2 I2*) = w^H (T^H Q T - Q) w with w = (V2, I2),
    // in units normalized by z_ref so that Q = [0 1/2; 1/2 0].
    Eigen::Matrix2cd t;
    t << x[0], x[1] / z_ref, x[2] * z_ref, x[3];
    Eigen::Matrix2cd q;
    q << 0.0, 0.5, 0.5, 0.0;
    const Eigen::Matrix2cd p = t.adjoint() * q * t - q;
    const double a = p(0, 0).real(), d = p(1, 1).real();
    const double lambda_min = 0.5 * (a + d) - std::hypot(0.5 * (a - d), std::abs(p(0, 1)));
    const double scale = std::max(1.0, t.squaredNorm());
    return std::isfinite(lambda_min) && lambda_min >= -tol * scale;
}

namespace {

struct Candidate {
    Eigen::Vector4cd x;
    double t_abs;
    double residual;
    std::uint8_t branch;
    bool passive;
};

struct BinResult {
    BinStatus status = BinStatus::ok;
    Eigen::Vector4cd x = Eigen::Vector4cd(1.0, 0.0, 0.0, 1.0);
    double residual = std::numeric_limits<double>::infinity();
    std::uint8_t branch = 0;
};

double candidate_distance(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b, double z_ref)
{
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) / z_ref + std::abs(a[2] - b[2]) * z_ref +
           std::abs(a[3] - b[3]);
}

BinResult solve_bin(cd h1, cd zin1, cd zin2, cd zt, cd zl, const SolveOptions& opts,
                    const std::optional<Eigen::Vector4cd>& previous)
{
    BinResult out;
    if (std::abs(h1) < kNearZero) {
        out.status = BinStatus::degenerate;
        return out;
    }

    // Rows: Zin1, H1 and Zin2 relations multiplied through by their denominators.
    Eigen::Matrix<cd, 3, 4> M;
    M << zl, 1.0, -zin1 * zl, -zin1,
         zl, 1.0, zl * zt, zt,
         -zin2, 1.0, -zin2 * zl, zl;
    Eigen::Vector3cd rhs(0.0, zl / h1, 0.0);

    // Equilibrate rows and columns before the orthogonal factorization.
    Eigen::Vector4d col_scale;
    for (int j = 0; j < 4; ++j) {
        const double n = M.col(j).cwiseAbs().maxCoeff();
        col_scale[j] = n > 0.0 ? 1.0 / n : 1.0;
    }
    M = M * col_scale.asDiagonal();
    for (int i = 0; i < 3; ++i) {
        const double n = M.row(i).cwiseAbs().maxCoeff();
        if (n > 0.0) {
            M.row(i) /= n;
            rhs[i] /= n;
        }
    }

    Eigen::JacobiSVD<Eigen::Matrix<cd, 3, 4>> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv[2] >= opts.rank_tol * sv[0])) {
        out.status = BinStatus::degenerate;
        return out;
    }
    const Eigen::Vector4cd x0 = col_scale.asDiagonal() * Eigen::Vector4cd(svd.solve(rhs));
    const Eigen::Vector4cd v = col_scale.asDiagonal() * Eigen::Vector4cd(svd.matrixV().col(3));

    // det(x0 + t v) = 1  ->  a t^2 + b t + c = 0
    const cd a = v[0] * v[3] - v[1] * v[2];
    const cd b = x0[0] * v[3] + v[0] * x0[3] - x0[1] * v[2] - v[1] * x0[2];
    const cd c = x0[0] * x0[3] - x0[1] * x0[2] - 1.0;

    std::array<std::optional<cd>, 2> roots;
    const cd disc = std::sqrt(b * b - 4.0 * a * c);
    const cd q = -0.5 * (b + ((std::real(std::conj(b) * disc) >= 0.0) ? disc : -disc));
    if (std::abs(q) > 0.0) {
        roots[0] = c / q;
        if (std::abs(a) > 0.0)
            roots[1] = q / a;
    } else if (std::abs(c) == 0.0) {
        roots[0] = cd(0.0);
    }

    const double z_ref = std::abs(zl);
    std::vector<Candidate> alive;
    for (std::uint8_t br = 0; br < 2; ++br) {
        if (!roots[br] || !std::isfinite(roots[br]->real()) || !std::isfinite(roots[br]->imag()))
            continue;
        const Eigen::Vector4cd x = x0 + *roots[br] * v;
        if (!x.allFinite())
            continue;
        const double res = tmt_residual(x, h1, zin1, zin2, zt, zl);
        if (!(res <= opts.residual_tol))
            continue;
        alive.push_back({x, std::abs(*roots[br]), res, br, is_passive(x, opts.passivity_tol)});
    }
    if (alive.empty()) {
        out.status = BinStatus::no_finite_root;
        return out;
    }
    std::vector<Candidate> passive;
    std::copy_if(alive.begin(), alive.end(), std::back_inserter(passive), [](const Candidate& k) {
        return k.passive;
    });
    if (passive.empty()) {
        out.status = BinStatus::both_roots_rejected;
        return out;
    }

    const Candidate* pick = &passive.front();
    if (passive.size() == 2) {
        const Candidate& p0 = passive[0];
        const Candidate& p1 = passive[1];
        if (opts.root_rule == RootRule::continuity && previous) {
            const double d0 = candidate_distance(p0.x, *previous, z_ref);
            const double d1 = candidate_distance(p1.x, *previous, z_ref);
            if (d0 != d1)
                pick = d0 < d1 ? &p0 : &p1;
            else
                pick = p0.t_abs <= p1.t_abs ? &p0 : &p1;
        } else {
            pick = p0.t_abs <= p1.t_abs ? &p0 : &p1;
        }
    }
    out.x = pick->x;
    out.residual = pick->residual;
    out.branch = pick->branch;
    return out;
}

} // namespace

TmtSolution solve_abcd(const TmtObservation& obs, const SolveOptions& opts)
{
    obs.validate();
    const FrequencyGrid& grid = obs.h1_hat.grid();
    const auto n = static_cast<Eigen::Index>(grid.n_bins);

    Spectrum::Vector A(n), B(n), C(n), D(n);
    TmtSolution sol;
    sol.residual.resize(n);
    sol.branch.assign(grid.n_bins, 0);
    sol.status.assign(grid.n_bins, BinStatus::ok);

    // The continuity rule makes this loop sequential in bin index.
    std::optional<Eigen::Vector4cd> previous;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const BinResult r = solve_bin(obs.h1_hat[uk], obs.zin1_hat[uk], obs.zin2_hat[uk], obs.term.z_t[uk],
                                      obs.term.z_l[uk], opts, previous);
        A[k] = r.x[0];
        B[k] = r.x[1];
        C[k] = r.x[2];
        D[k] = r.x[3];
        sol.residual[k] = r.residual;
        sol.branch[uk] = r.branch;
        sol.status[uk] = r.status;
        if (r.status == BinStatus::ok)
            previous = r.x;
    }
    sol.abcd = AbcdChannel(grid, std::move(A), std::move(B), std::move(C), std::move(D));
    sol.h2_hat = recover_h2(sol, obs.term);
    return sol;
}

Spectrum recover_h2(const TmtSolution& sol, const Termination& term)
{
    return ctf_reverse(sol.abcd, term);
}

DeltaMismatch delta_mismatch(const Spectrum& h2_alice, const Spectrum& h2_bob)
{
    require_same_grid(h2_alice, h2_bob);
    DeltaMismatch out;
    const auto n = static_cast<Eigen::Index>(h2_alice.size());
    out.delta = Eigen::VectorXd::Zero(n);
    out.valid.assign(h2_alice.size(), 0);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cd ref = h2_alice.values()[k];
        if (std::abs(ref) < kNearZero)
            continue;
        out.delta[k] = std::abs((ref - h2_bob.values()[k]) / ref);
        out.valid[static_cast<std::size_t>(k)] = 1;
    }
    return out;
}

double DeltaMismatch::median_db(std::span<const std::uint8_t> mask) const
{
    std::vector<double> db;
    for (std::size_t k = 0; k < valid.size(); ++k) {
        if (!valid[k] || (!mask.empty() && !mask[k]))
            continue;
        db.push_back(20.0 * std::log10(delta[static_cast<Eigen::Index>(k)]));
    }
    if (db.empty())
        return std::numeric_limits<double>::quiet_NaN();
    const auto mid = db.begin() + static_cast<std::ptrdiff_t>(db.size() / 2);
    std::nth_element(db.begin(), mid, db.end());
    if (db.size() % 2 == 1)
        return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(db.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace plkey
