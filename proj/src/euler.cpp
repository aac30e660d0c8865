#include "mscv/euler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mscv {

namespace {

using Vec4 = std::array<double, 4>;

inline double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

inline double pressure(const Vec4& u) { return (kEulerGamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]); }

inline Vec4 flux(const Vec4& u) {
    const double v = u[1] / u[0];
    const double p = pressure(u);
    return {u[1], u[1] * v + p, u[2] * v, (u[3] + p) * v};
}

inline double max_speed(const Vec4& u) {
    const double p = pressure(u);
    return std::abs(u[1] / u[0]) + std::sqrt(kEulerGamma * std::max(p, 0.0) / u[0]);
}

inline bool valid(const Vec4& u) { return u[0] > 0.0 && pressure(u) > 0.0 && std::isfinite(u[3]); }

Vec4 rusanov(const Vec4& l, const Vec4& r) {
    const Vec4 fl = flux(l), fr = flux(r);
    const double s = std::max(max_speed(l), max_speed(r));
    Vec4 f;
    for (int c = 0; c < 4; ++c) f[c] = 0.5 * (fl[c] + fr[c]) - 0.5 * s * (r[c] - l[c]);
    return f;
}

// Half-range moments of rho * N(u1, T) x N(u2, T) restricted to v1 * dir < 0
// (leaving the domain through the wall), and the re-emitted wall Maxwellian.
// Returned flux is along +x for a left wall (dir = +1).
Vec4 wall_flux(const Vec4& u, double T_w, int dir) {
    const double rho = u[0];
    const double u1 = dir * u[1] / rho, u2 = u[2] / rho;
    const double T = pressure(u) / rho;
    const double I0 = 0.5 * std::erfc(u1 / std::sqrt(2.0 * T));
    const double g = std::exp(-u1 * u1 / (2.0 * T)) / std::sqrt(2.0 * std::numbers::pi * T);
    const double I1 = u1 * I0 - T * g;
    const double I2 = (u1 * u1 + T) * I0 - u1 * T * g;
    const double I3 = (u1 * u1 * u1 + 3.0 * u1 * T) * I0 - T * g * (u1 * u1 + 2.0 * T);
    const double J1 = std::sqrt(T_w / (2.0 * std::numbers::pi));
    const double rho_w = -rho * I1 / J1;
    Vec4 F;
    F[0] = 0.0;
    F[1] = rho * I2 + rho_w * 0.5 * T_w;
    F[2] = rho * u2 * I1;
    F[3] = 0.5 * (rho * (I3 + I1 * (u2 * u2 + T)) + rho_w * (2.0 * T_w * J1 + J1 * T_w));
    // back to the lab frame orientation
    F[0] *= dir;
    F[2] *= dir;
    F[3] *= dir;
    return F;
}

}  // namespace

EulerState euler_from_moments(const MomentVector& m, const SpatialGrid& xg) {
    if (m.size() != static_cast<std::size_t>(xg.n_cells)) throw std::invalid_argument("moment vector does not match spatial grid");
    EulerState U(xg);
    for (int i = 0; i < xg.n_cells; ++i) {
        U.rho[i] = m.rho[i];
        U.m1[i] = m.rho[i] * m.u1[i];
        U.m2[i] = m.rho[i] * m.u2[i];
        U.E[i] = 0.5 * m.rho[i] * (m.u1[i] * m.u1[i] + m.u2[i] * m.u2[i]) + m.rho[i] * m.T[i];
    }
    return U;
}

MomentVector euler_moments(const EulerState& U) {
    MomentVector m(static_cast<std::size_t>(U.nx()));
    for (int i = 0; i < U.nx(); ++i) {
        m.rho[i] = U.rho[i];
        m.u1[i] = U.m1[i] / U.rho[i];
        m.u2[i] = U.m2[i] / U.rho[i];
        m.T[i] = (U.E[i] - 0.5 * (U.m1[i] * U.m1[i] + U.m2[i] * U.m2[i]) / U.rho[i]) / U.rho[i];
    }
    return m;
}

double euler_max_dt(const EulerState& U) {
    double s = 0;
    for (int i = 0; i < U.nx(); ++i) s = std::max(s, max_speed({U.rho[i], U.m1[i], U.m2[i], U.E[i]}));
    return 0.9 * U.xgrid.dx() / s;
}

void euler_step(EulerState& U, double dt, const BoundarySpec& bc) {
    const int nx = U.nx();
    const double dx = U.xgrid.dx();
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (dt > euler_max_dt(U) * (1.0 + 1e-12)) throw std::invalid_argument("time step violates the Euler CFL bound");

    // cells -2..nx+1
    std::vector<Vec4> ext(nx + 4);
    auto at = [&](int i) -> Vec4& { return ext[i + 2]; };
    for (int i = 0; i < nx; ++i) at(i) = {U.rho[i], U.m1[i], U.m2[i], U.E[i]};
    auto ghost = [&](BcKind k, int g, int inner, int periodic_src) {
        if (k == BcKind::periodic)
            at(g) = at(periodic_src);
        else
            at(g) = at(inner);
    };
    ghost(bc.left, -1, 0, nx - 1);
    ghost(bc.left, -2, 0, (nx - 2 + 2 * nx) % nx);
    ghost(bc.right, nx, nx - 1, 0);
    ghost(bc.right, nx + 1, nx - 1, 1 % nx);

    // Hancock predictor for cells -1..nx: boundary-extrapolated states evolved dt/2
    std::vector<Vec4> left(nx + 2), right(nx + 2);
    const double hr = 0.5 * dt / dx;
    for (int i = -1; i <= nx; ++i) {
        Vec4 uL, uR;
        for (int c = 0; c < 4; ++c) {
            const double s = minmod(at(i + 1)[c] - at(i)[c], at(i)[c] - at(i - 1)[c]);
            uL[c] = at(i)[c] - 0.5 * s;
            uR[c] = at(i)[c] + 0.5 * s;
        }
        if (!valid(uL) || !valid(uR)) uL = uR = at(i);
        const Vec4 fL = flux(uL), fR = flux(uR);
        for (int c = 0; c < 4; ++c) {
            uL[c] += hr * (fL[c] - fR[c]);
            uR[c] += hr * (fL[c] - fR[c]);
        }
        if (!valid(uL) || !valid(uR)) uL = uR = at(i);
        left[i + 1] = uL;
        right[i + 1] = uR;
    }
    std::vector<Vec4> F(nx + 1);
    for (int i = 0; i <= nx; ++i) F[i] = rusanov(right[i], left[i + 1]);  // interface i-1/2
    if (bc.left == BcKind::diffusive_wall) F[0] = wall_flux(at(0), bc.wall_T_left, +1);
    if (bc.right == BcKind::diffusive_wall) F[nx] = wall_flux(at(nx - 1), bc.wall_T_right, -1);

    const double r = dt / dx;
    for (int i = 0; i < nx; ++i) {
        Vec4 u = at(i);
        for (int c = 0; c < 4; ++c) u[c] -= r * (F[i + 1][c] - F[i][c]);
        if (!valid(u)) throw std::runtime_error("Euler state invalid");
        U.rho[i] = u[0];
        U.m1[i] = u[1];
        U.m2[i] = u[2];
        U.E[i] = u[3];
    }
}

std::vector<MomentVector> euler_solve(EulerState U, const std::vector<double>& times, const BoundarySpec& bc) {
    std::vector<MomentVector> out;
    out.reserve(times.size());
    double t = 0;
    for (double target : times) {
        if (target < t) throw std::invalid_argument("output times must be nondecreasing");
        while (t < target - 1e-12 * std::max(1.0, target)) {
            const double dtmax = euler_max_dt(U);
            const double dt = std::min(dtmax, target - t);
            euler_step(U, dt, bc);
            t = (dt == target - t) ? target : t + dt;
        }
        out.push_back(euler_moments(U));
    }
    return out;
}

DistributionField euler_equilibrium(const EulerState& U, const VelocityGrid& vg) {
    for (int i = 0; i < U.nx(); ++i)
        if (!(U.rho[i] > 1e-14)) throw std::runtime_error("vacuum cell");
    return maxwellian(euler_moments(U), vg, U.xgrid);
}

}  // namespace mscv
