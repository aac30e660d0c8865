#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mscv {

// Uniform periodic velocity grid on [-v_max, v_max)^2, nodes -v_max + j*dv.
struct VelocityGrid {
    int n = 32;
    double vmax = 8.0;

    double dv() const { return 2.0 * vmax / n; }
    double node(int j) const { return -vmax + j * dv(); }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    bool operator==(const VelocityGrid&) const = default;
};

// Cell-centred grid on [0, length].
struct SpatialGrid {
    int n_cells = 1;
    double length = 1.0;

    double dx() const { return length / n_cells; }
    double center(int i) const { return (i + 0.5) * dx(); }
    bool operator==(const SpatialGrid&) const = default;
};

// f(x,v) stored cell-major: values[(ix*n + i)*n + j], i along v1, j along v2.
// A homogeneous field has a single cell.
struct DistributionField {
    VelocityGrid vgrid;
    SpatialGrid xgrid;
    std::vector<double> values;

    DistributionField() = default;
    DistributionField(const VelocityGrid& vg, const SpatialGrid& xg = {})
        : vgrid(vg), xgrid(xg), values(vg.size() * static_cast<std::size_t>(xg.n_cells), 0.0) {}

    int nx() const { return xgrid.n_cells; }
    std::size_t cell_size() const { return vgrid.size(); }
    double* cell(int ix) { return values.data() + static_cast<std::size_t>(ix) * cell_size(); }
    const double* cell(int ix) const { return values.data() + static_cast<std::size_t>(ix) * cell_size(); }
    bool same_grid(const DistributionField& o) const { return vgrid == o.vgrid && xgrid == o.xgrid; }
};

struct CellMoments {
    double rho = 1.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double T = 1.0;
};

struct MomentVector {
    std::vector<double> rho, u1, u2, T;

    MomentVector() = default;
    explicit MomentVector(std::size_t n) : rho(n), u1(n), u2(n), T(n) {}
    std::size_t size() const { return rho.size(); }
    CellMoments cell(std::size_t i) const { return {rho[i], u1[i], u2[i], T[i]}; }
    void set(std::size_t i, const CellMoments& m) {
        rho[i] = m.rho;
        u1[i] = m.u1;
        u2[i] = m.u2;
        T[i] = m.T;
    }
};

CellMoments cell_moments(const double* f, const VelocityGrid& vg);
MomentVector moments(const DistributionField& f);

// Nodal Maxwellian, corrected so its discrete moments reproduce m to round-off.
// If more than 0.1% of the mass falls outside the box a warning is issued and the
// uncorrected nodal values are kept.
void fill_maxwellian(const CellMoments& m, const VelocityGrid& vg, double* out, bool warn_on_loss = true);
DistributionField maxwellian(const CellMoments& m, const VelocityGrid& vg);
DistributionField maxwellian(const MomentVector& m, const VelocityGrid& vg, const SpatialGrid& xg);
// Plain formula rho/(2 pi T) exp(-|v-u|^2/(2T)) without correction.
void fill_maxwellian_plain(const CellMoments& m, const VelocityGrid& vg, double* out);

double weighted_norm(const DistributionField& f, int p, double s);

double l2_error(const std::vector<double>& estimate, const std::vector<double>& reference);
double l2_error(const DistributionField& estimate, const DistributionField& reference);

// Little-endian dump: "MSCVFLD1", uint64 nx, n, n, f64 vmax, length, then values.
void write_field_dump(const std::string& path, const DistributionField& f);
DistributionField read_field_dump(const std::string& path);

// Columns x,rho,u1,u2,T.
void write_moments_csv(const std::string& path, const MomentVector& m, const SpatialGrid& xg);

}  // namespace mscv
