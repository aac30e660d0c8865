#include "mscv/phase_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mscv/log.hpp"

namespace mscv {

CellMoments cell_moments(const double* f, const VelocityGrid& vg) {
    const int n = vg.n;
    const double w = vg.dv() * vg.dv();
    double m0 = 0, m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double vi = vg.node(i);
        double row = 0, rowv = 0;
        for (int j = 0; j < n; ++j) {
            row += f[i * n + j];
            rowv += vg.node(j) * f[i * n + j];
        }
        m0 += row;
        m1 += vi * row;
        m2 += rowv;
    }
    CellMoments m;
    m.rho = m0 * w;
    if (!(m.rho > 1e-14)) throw std::runtime_error("vacuum cell");
    m.u1 = m1 * w / m.rho;
    m.u2 = m2 * w / m.rho;
    double e = 0;
    for (int i = 0; i < n; ++i) {
        const double c1 = vg.node(i) - m.u1;
        for (int j = 0; j < n; ++j) {
            const double c2 = vg.node(j) - m.u2;
            e += (c1 * c1 + c2 * c2) * f[i * n + j];
        }
    }
    m.T = e * w / (2.0 * m.rho);
    return m;
}

MomentVector moments(const DistributionField& f) {
    MomentVector out(static_cast<std::size_t>(f.nx()));
    for (int ix = 0; ix < f.nx(); ++ix) out.set(ix, cell_moments(f.cell(ix), f.vgrid));
    return out;
}

namespace {

struct Sums1d {
    double s0 = 0, s1 = 0, s2 = 0;
};

Sums1d gauss_sums(const VelocityGrid& vg, double w, double theta, double* g) {
    Sums1d s;
    for (int i = 0; i < vg.n; ++i) {
        const double v = vg.node(i);
        const double d = v - w;
        g[i] = std::exp(-d * d / (2.0 * theta));
        s.s0 += g[i];
        s.s1 += v * g[i];
        s.s2 += v * v * g[i];
    }
    return s;
}

void check_moments(const CellMoments& m) {
    if (!(m.rho > 0.0) || !(m.T > 0.0) || !std::isfinite(m.rho) || !std::isfinite(m.T))
        throw std::invalid_argument("invalid Maxwellian moments");
}

}  // namespace

void fill_maxwellian_plain(const CellMoments& m, const VelocityGrid& vg, double* out) {
    check_moments(m);
    const int n = vg.n;
    std::vector<double> gx(n), gy(n);
    gauss_sums(vg, m.u1, m.T, gx.data());
    gauss_sums(vg, m.u2, m.T, gy.data());
    const double a = m.rho / (2.0 * std::numbers::pi * m.T);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = a * gx[i] * gy[j];
}

void fill_maxwellian(const CellMoments& m, const VelocityGrid& vg, double* out, bool warn_on_loss) {
    check_moments(m);
    const int n = vg.n;
    const double w = vg.dv() * vg.dv();
    std::vector<double> gx(n), gy(n);

    // Fixed point on (a, w1, w2, theta) of a*exp(-|v-w|^2/(2 theta)) so the
    // discrete moments match m. The plain formula is the starting guess.
    double a = m.rho / (2.0 * std::numbers::pi * m.T);
    double w1 = m.u1, w2 = m.u2, theta = m.T;
    double plain_rho = 0.0;
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
        Sums1d sx = gauss_sums(vg, w1, theta, gx.data());
        Sums1d sy = gauss_sums(vg, w2, theta, gy.data());
        const double rho = a * w * sx.s0 * sy.s0;
        if (it == 0) plain_rho = rho;
        // beyond 10% truncation the box cannot carry these moments
        if (!(rho > 0.0) || !std::isfinite(rho) || (it == 0 && rho < 0.9 * m.rho)) break;
        const double u1 = sx.s1 / sx.s0, u2 = sy.s1 / sy.s0;
        const double T = 0.5 * (sx.s2 / sx.s0 + sy.s2 / sy.s0 - u1 * u1 - u2 * u2);
        const double err = std::abs(rho - m.rho) / m.rho + std::abs(u1 - m.u1) / std::sqrt(m.T) +
                           std::abs(u2 - m.u2) / std::sqrt(m.T) + std::abs(T - m.T) / m.T;
        if (err < 1e-14 || (it == 59 && err < 1e-12)) {
            ok = true;
            break;
        }
        a *= m.rho / rho;
        w1 += m.u1 - u1;
        w2 += m.u2 - u2;
        theta *= m.T / T;
        if (!(theta > 0.0) || !std::isfinite(a)) break;
    }
    if (!ok) {
        if (warn_on_loss && !(plain_rho >= 0.999 * m.rho)) {
            std::ostringstream os;
            os << "Maxwellian mass loss: recovered " << plain_rho << " of " << m.rho;
            warn(os.str());
        }
        fill_maxwellian_plain(m, vg, out);
        return;
    }
    // gx, gy hold the factors of the last evaluated (converged) parameters
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = a * gx[i] * gy[j];
}

DistributionField maxwellian(const CellMoments& m, const VelocityGrid& vg) {
    DistributionField f(vg);
    fill_maxwellian(m, vg, f.cell(0));
    return f;
}

DistributionField maxwellian(const MomentVector& m, const VelocityGrid& vg, const SpatialGrid& xg) {
    if (m.size() != static_cast<std::size_t>(xg.n_cells))
        throw std::invalid_argument("moment vector does not match spatial grid");
    DistributionField f(vg, xg);
    for (int ix = 0; ix < xg.n_cells; ++ix) fill_maxwellian(m.cell(ix), vg, f.cell(ix));
    return f;
}

double weighted_norm(const DistributionField& f, int p, double s) {
    if (p != 1 && p != 2) throw std::invalid_argument("norm order must be 1 or 2");
    const VelocityGrid& vg = f.vgrid;
    const int n = vg.n;
    std::vector<double> wt(vg.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r = std::hypot(vg.node(i), vg.node(j));
            wt[i * n + j] = std::pow(1.0 + r, s);
        }
    double acc = 0;
    for (int ix = 0; ix < f.nx(); ++ix) {
        const double* c = f.cell(ix);
        for (std::size_t k = 0; k < vg.size(); ++k) {
            const double a = std::abs(c[k]);
            acc += (p == 1 ? a : a * a) * wt[k];
        }
    }
    acc *= vg.dv() * vg.dv();
    if (f.nx() > 1) acc *= f.xgrid.dx();
    return p == 1 ? acc : std::sqrt(acc);
}

double l2_error(const std::vector<double>& estimate, const std::vector<double>& reference) {
    if (estimate.size() != reference.size()) throw std::invalid_argument("grid mismatch");
    double num = 0, den = 0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        const double d = estimate[k] - reference[k];
        num += d * d;
        den += reference[k] * reference[k];
    }
    if (den == 0.0) throw std::invalid_argument("degenerate reference");
    return std::sqrt(num / den);
}

double l2_error(const DistributionField& estimate, const DistributionField& reference) {
    if (!estimate.same_grid(reference)) throw std::invalid_argument("grid mismatch");
    return l2_error(estimate.values, reference.values);
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("truncated field dump");
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
    return v;
}

}  // namespace

void write_field_dump(const std::string& path, const DistributionField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.write("MSCVFLD1", 8);
    put_u64(os, static_cast<std::uint64_t>(f.nx()));
    put_u64(os, static_cast<std::uint64_t>(f.vgrid.n));
    put_u64(os, static_cast<std::uint64_t>(f.vgrid.n));
    put_u64(os, std::bit_cast<std::uint64_t>(f.vgrid.vmax));
    put_u64(os, std::bit_cast<std::uint64_t>(f.xgrid.length));
    for (double v : f.values) put_u64(os, std::bit_cast<std::uint64_t>(v));
    if (!os) throw std::runtime_error("write failed: " + path);
}

DistributionField read_field_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "MSCVFLD1", 8) != 0) throw std::runtime_error("not a field dump: " + path);
    const auto nx = get_u64(is), n1 = get_u64(is), n2 = get_u64(is);
    if (n1 != n2) throw std::runtime_error("non-square velocity grid in dump");
    VelocityGrid vg{static_cast<int>(n1), std::bit_cast<double>(get_u64(is))};
    SpatialGrid xg{static_cast<int>(nx), std::bit_cast<double>(get_u64(is))};
    DistributionField f(vg, xg);
    for (double& v : f.values) v = std::bit_cast<double>(get_u64(is));
    return f;
}

void write_moments_csv(const std::string& path, const MomentVector& m, const SpatialGrid& xg) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "x,rho,u1,u2,T\n" << std::setprecision(17);
    for (std::size_t i = 0; i < m.size(); ++i)
        os << xg.center(static_cast<int>(i)) << ',' << m.rho[i] << ',' << m.u1[i] << ',' << m.u2[i] << ','
           << m.T[i] << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace mscv
