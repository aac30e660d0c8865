#include "mscv/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mscv {

NuLaw parse_nu_law(const std::string& s) {
    NuLaw law;
    auto number = [&](const std::string& t) {
        std::size_t pos = 0;
        double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("bad nu law: " + s);
        return v;
    };
    try {
        if (s.rfind("const:", 0) == 0) {
            law.kind = NuLaw::Kind::constant;
            law.value = number(s.substr(6));
        } else if (s.size() >= 3 && s.compare(s.size() - 3, 3, "rho") == 0) {
            law.kind = NuLaw::Kind::proportional;
            const std::string c = s.substr(0, s.size() - 3);
            law.value = c.empty() ? 1.0 : number(c);
        } else {
            law.kind = NuLaw::Kind::constant;
            law.value = number(s);
        }
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("bad nu law: " + s);
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("bad nu law: " + s);
    }
    if (!(law.value > 0.0)) throw std::invalid_argument("nu must be positive: " + s);
    return law;
}

double kinetic_dt(const SpatialGrid& xg, const VelocityGrid& vg, double epsilon) {
    return std::min(xg.dx() / (2.0 * vg.vmax), epsilon);
}

double diffusive_wall_bc(const double* f_wall, const VelocityGrid& vg, double T_w, int into_domain, double* ghost) {
    if (!(T_w > 0.0)) throw std::invalid_argument("wall temperature must be positive");
    const int n = vg.n;
    const double w = vg.dv() * vg.dv();
    thread_local std::vector<double> mw;
    mw.resize(vg.size());
    fill_maxwellian_plain(CellMoments{1.0, 0.0, 0.0, T_w}, vg, mw.data());
    double out_flux = 0, norm = 0;
    for (int i = 0; i < n; ++i) {
        const double v = vg.node(i) * into_domain;
        if (v == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * n + j;
            if (v < 0)
                out_flux -= v * f_wall[k] * w;
            else
                norm += v * mw[k] * w;
        }
    }
    if (!(norm > 0.0)) throw std::runtime_error("degenerate wall quadrature");
    const double rho_w = out_flux / norm;
    for (int i = 0; i < n; ++i) {
        const double v = vg.node(i) * into_domain;
        for (int j = 0; j < n; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * n + j;
            ghost[k] = v > 0 ? rho_w * mw[k] : f_wall[k];
        }
    }
    return rho_w;
}

namespace {

inline double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

void fill_ghosts(const DistributionField& f, const BoundarySpec& bc, std::vector<double>& ext) {
    const int nx = f.nx();
    const std::size_t nn = f.cell_size();
    auto E = [&](int ix) { return ext.data() + static_cast<std::size_t>(ix + 2) * nn; };
    std::copy(f.values.begin(), f.values.end(), E(0));
    auto copy_cell = [&](int dst, const double* src) { std::copy(src, src + nn, E(dst)); };
    switch (bc.left) {
        case BcKind::periodic:
            copy_cell(-1, f.cell((nx - 1 + nx) % nx));
            copy_cell(-2, f.cell((nx - 2 + 2 * nx) % nx));
            break;
        case BcKind::transmissive:
            copy_cell(-1, f.cell(0));
            copy_cell(-2, f.cell(0));
            break;
        case BcKind::diffusive_wall:
            diffusive_wall_bc(f.cell(0), f.vgrid, bc.wall_T_left, +1, E(-1));
            copy_cell(-2, E(-1));
            break;
    }
    switch (bc.right) {
        case BcKind::periodic:
            copy_cell(nx, f.cell(0));
            copy_cell(nx + 1, f.cell(1 % nx));
            break;
        case BcKind::transmissive:
            copy_cell(nx, f.cell(nx - 1));
            copy_cell(nx + 1, f.cell(nx - 1));
            break;
        case BcKind::diffusive_wall:
            diffusive_wall_bc(f.cell(nx - 1), f.vgrid, bc.wall_T_right, -1, E(nx));
            copy_cell(nx + 1, E(nx));
            break;
    }
}

void check_timestep(const DistributionField& f, double dt, double epsilon) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (dt > kinetic_dt(f.xgrid, f.vgrid, epsilon) * (1.0 + 1e-12))
        throw std::invalid_argument("time step violates min(dx/(2 v_max), eps)");
}

}  // namespace

void transport_step(DistributionField& f, double dt, const BoundarySpec& bc) {
    const int nx = f.nx();
    const int n = f.vgrid.n;
    const std::size_t nn = f.cell_size();
    const double dx = f.xgrid.dx();
    thread_local std::vector<double> ext, slope, flux;
    ext.resize((nx + 4) * nn);
    slope.resize((nx + 2) * nn);
    flux.resize((nx + 1) * nn);
    fill_ghosts(f, bc, ext);

    // slope for cells -1..nx
    for (int ix = -1; ix <= nx; ++ix) {
        const double* c = ext.data() + (ix + 2) * nn;
        const double* l = c - nn;
        const double* r = c + nn;
        double* s = slope.data() + (ix + 1) * nn;
        for (std::size_t k = 0; k < nn; ++k) s[k] = minmod(r[k] - c[k], c[k] - l[k]);
    }
    // interface ix+1/2 for ix = -1..nx-1
    for (int ix = -1; ix < nx; ++ix) {
        const double* cl = ext.data() + (ix + 2) * nn;
        const double* cr = cl + nn;
        const double* sl = slope.data() + (ix + 1) * nn;
        const double* sr = sl + nn;
        double* F = flux.data() + (ix + 1) * nn;
        for (int i = 0; i < n; ++i) {
            const double v = f.vgrid.node(i);
            const double c = v * dt / dx;
            const std::size_t o = static_cast<std::size_t>(i) * n;
            if (v > 0) {
                const double a = 0.5 * (1.0 - c);
                for (int j = 0; j < n; ++j) F[o + j] = v * (cl[o + j] + a * sl[o + j]);
            } else {
                const double a = 0.5 * (1.0 + c);
                for (int j = 0; j < n; ++j) F[o + j] = v * (cr[o + j] - a * sr[o + j]);
            }
        }
    }
    const double r = dt / dx;
    double fmin = 0;
    for (int ix = 0; ix < nx; ++ix) {
        double* c = f.cell(ix);
        const double* Fl = flux.data() + ix * nn;
        const double* Fr = Fl + nn;
        for (std::size_t k = 0; k < nn; ++k) {
            c[k] -= r * (Fr[k] - Fl[k]);
            fmin = std::min(fmin, c[k]);
        }
    }
    if (fmin < -1e-10 || !std::isfinite(fmin)) throw std::runtime_error("transport produced negative density");
}

void bgk_relax(DistributionField& f, const BgkConfig& cfg, double dt) {
    thread_local std::vector<double> m;
    m.resize(f.cell_size());
    for (int ix = 0; ix < f.nx(); ++ix) {
        double* c = f.cell(ix);
        const CellMoments cm = cell_moments(c, f.vgrid);
        fill_maxwellian(cm, f.vgrid, m.data(), false);
        const double a = std::exp(-cfg.nu_law.nu(cm.rho) * dt / cfg.epsilon);
        const double b = 1.0 - a;
        for (std::size_t k = 0; k < f.cell_size(); ++k) c[k] = a * c[k] + b * m[k];
    }
}

void bgk_step(DistributionField& f, const BgkConfig& cfg, double dt, const BoundarySpec& bc) {
    check_timestep(f, dt, cfg.epsilon);
    transport_step(f, 0.5 * dt, bc);
    bgk_relax(f, cfg, dt);
    transport_step(f, 0.5 * dt, bc);
}

namespace {

void boltzmann_collide(DistributionField& f, BoltzmannOperator& op, double epsilon, double dt) {
    const std::size_t nn = f.cell_size();
    thread_local std::vector<double> q1, q2, f1;
    q1.resize(nn);
    q2.resize(nn);
    f1.resize(nn);
    const double h = dt / epsilon;
    for (int ix = 0; ix < f.nx(); ++ix) {
        double* c = f.cell(ix);
        op.apply(c, q1.data());
        for (std::size_t k = 0; k < nn; ++k) f1[k] = c[k] + h * q1[k];
        op.apply(f1.data(), q2.data());
        for (std::size_t k = 0; k < nn; ++k) c[k] += 0.5 * h * (q1[k] + q2[k]);
    }
}

}  // namespace

void boltzmann_step(DistributionField& f, BoltzmannOperator& op, double epsilon, double dt, const BoundarySpec& bc) {
    if (!(op.grid() == f.vgrid)) throw std::invalid_argument("collision operator built for another grid");
    check_timestep(f, dt, epsilon);
    transport_step(f, 0.5 * dt, bc);
    boltzmann_collide(f, op, epsilon, dt);
    transport_step(f, 0.5 * dt, bc);
}

std::vector<MomentVector> kinetic_solve(DistributionField f, const KineticSolver& solver, const std::vector<double>& times,
                                        const BoundarySpec& bc, std::vector<DistributionField>* fields) {
    const double eps = solver.model == KineticSolver::Model::bgk ? solver.bgk.epsilon : solver.epsilon;
    if (solver.model == KineticSolver::Model::boltzmann) {
        if (solver.op == nullptr) throw std::invalid_argument("full model needs a collision operator");
        if (!(solver.op->grid() == f.vgrid)) throw std::invalid_argument("collision operator built for another grid");
    }
    const double dt_max = solver.dt > 0 ? solver.dt : kinetic_dt(f.xgrid, f.vgrid, eps);
    check_timestep(f, dt_max, eps);
    auto collide = [&](double h) {
        if (solver.model == KineticSolver::Model::bgk)
            bgk_relax(f, solver.bgk, h);
        else
            boltzmann_collide(f, *solver.op, eps, h);
    };
    std::vector<MomentVector> out;
    double t = 0.0;
    for (double target : times) {
        if (target < t) throw std::invalid_argument("output times must be nondecreasing and nonnegative");
        const double span = target - t;
        if (span > 0) {
            const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_max - 1e-9)));
            const double h = span / static_cast<double>(steps);
            // Strang splitting with the inner transport half steps merged.
            transport_step(f, 0.5 * h, bc);
            for (long k = 0; k < steps; ++k) {
                collide(h);
                transport_step(f, k + 1 < steps ? h : 0.5 * h, bc);
            }
        }
        t = target;
        out.push_back(moments(f));
        if (fields) fields->push_back(f);
    }
    return out;
}

DistributionField bgk_homogeneous_exact(const DistributionField& f0, double nu, double t) {
    if (!(nu > 0.0) || !(t >= 0.0)) throw std::invalid_argument("need nu > 0 and t >= 0");
    DistributionField out(f0.vgrid, f0.xgrid);
    const double a = std::exp(-nu * t), b = 1.0 - a;
    std::vector<double> m(f0.cell_size());
    for (int ix = 0; ix < f0.nx(); ++ix) {
        fill_maxwellian(cell_moments(f0.cell(ix), f0.vgrid), f0.vgrid, m.data());
        const double* src = f0.cell(ix);
        double* dst = out.cell(ix);
        for (std::size_t k = 0; k < m.size(); ++k) dst[k] = a * src[k] + b * m[k];
    }
    return out;
}

namespace {

void check_times(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1]))
            throw std::invalid_argument("output times must be nondecreasing and nonnegative");
}

}  // namespace

std::vector<DistributionField> homogeneous_solve(const DistributionField& f0, BoltzmannOperator& op,
                                                 const std::vector<double>& times, double dt, double epsilon) {
    check_times(times);
    if (!(dt > 0.0) || !(epsilon > 0.0)) throw std::invalid_argument("need dt > 0 and epsilon > 0");
    if (f0.nx() != 1) throw std::invalid_argument("homogeneous solve needs a single-cell field");
    const std::size_t nn = f0.cell_size();
    std::vector<double> f(f0.values), k1(nn), k2(nn), k3(nn), k4(nn), tmp(nn);
    std::vector<DistributionField> out;
    out.reserve(times.size());
    const double inv_eps = 1.0 / epsilon;
    double t = 0;
    for (double target : times) {
        while (t < target - 1e-12 * std::max(1.0, target)) {
            const double h = std::min(dt, target - t);
            op.apply(f.data(), k1.data());
            for (std::size_t k = 0; k < nn; ++k) tmp[k] = f[k] + 0.5 * h * inv_eps * k1[k];
            op.apply(tmp.data(), k2.data());
            for (std::size_t k = 0; k < nn; ++k) tmp[k] = f[k] + 0.5 * h * inv_eps * k2[k];
            op.apply(tmp.data(), k3.data());
            for (std::size_t k = 0; k < nn; ++k) tmp[k] = f[k] + h * inv_eps * k3[k];
            op.apply(tmp.data(), k4.data());
            for (std::size_t k = 0; k < nn; ++k)
                f[k] += h * inv_eps / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            t = (h == target - t) ? target : t + h;
        }
        DistributionField snap(f0.vgrid, f0.xgrid);
        snap.values = f;
        out.push_back(std::move(snap));
    }
    return out;
}

std::vector<DistributionField> homogeneous_solve(const DistributionField& f0, HomogeneousModel model,
                                                 const std::vector<double>& times, const HomogeneousParams& p) {
    check_times(times);
    if (model == HomogeneousModel::bgk_exact) {
        std::vector<DistributionField> out;
        for (double t : times) out.push_back(bgk_homogeneous_exact(f0, p.nu, t));
        return out;
    }
    BoltzmannOperator op(f0.vgrid, p.boltzmann);
    return homogeneous_solve(f0, op, times, p.dt, p.epsilon);
}

}  // namespace mscv
