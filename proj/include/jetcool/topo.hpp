#pragma once

/**
 * @file topo.hpp
 * @brief 2D Stokes–Brinkman flow on a staggered grid and density-based topology optimization of
 *        inlet manifolds for dissipation and outlet-flow uniformity.
 *
 * u lives on vertical faces, v on horizontal faces, p at cell centres. Every boundary face takes
 * the tag of the segment covering its centre; uncovered faces are walls. The discrete momentum
 * operator is the Hessian of a dissipation quadratic form, so the saddle-point matrix is
 * symmetric and its factorization serves the adjoint solve as well.
 *
 * Density convention: ε = 1 is fluid and receives alpha_min, ε = 0 is solid and receives
 * alpha_max. `AlphaConvention::literal` swaps the two for reproducing the printed assignment.
 *
 * Fluxes are per unit depth (m²/s).
 */

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"
#include "jetcool/props.hpp"

namespace jetcool::topo {

enum class Side { left, right, bottom, top };
enum class BoundaryKind { wall, inlet, outlet_velocity, outlet_pressure };
enum class Profile { parabolic, uniform };
enum class AlphaConvention { fluid, literal };

inline std::string_view to_string(Side s) {
    switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
    }
    return "?";
}

inline std::string_view to_string(BoundaryKind k) {
    switch (k) {
    case BoundaryKind::wall: return "wall";
    case BoundaryKind::inlet: return "inlet";
    case BoundaryKind::outlet_velocity: return "outlet_velocity";
    case BoundaryKind::outlet_pressure: return "outlet_pressure";
    }
    return "?";
}

inline Side parse_side(const std::string& s) {
    for (Side v : {Side::left, Side::right, Side::bottom, Side::top})
        if (s == to_string(v)) return v;
    throw Error(ErrorKind::config, "unknown boundary side '" + s + "'");
}

inline BoundaryKind parse_boundary_kind(const std::string& s) {
    for (auto v : {BoundaryKind::wall, BoundaryKind::inlet, BoundaryKind::outlet_velocity, BoundaryKind::outlet_pressure})
        if (s == to_string(v)) return v;
    throw Error(ErrorKind::config, "unknown boundary tag '" + s + "'");
}

inline bool is_outlet(BoundaryKind k) { return k == BoundaryKind::outlet_velocity || k == BoundaryKind::outlet_pressure; }

struct Segment {
    Side side;
    double start;  // m along the side: x on bottom/top, y on left/right
    double end;
    BoundaryKind kind;
    double speed = 0.0;  // m/s mean normal speed; inflow for inlets, outflow for outlet_velocity
    Profile profile = Profile::parabolic;
};

/// Parses `side start_mm end_mm tag [speed_mm_s] [parabolic|uniform]`.
inline Segment parse_segment(const std::string& text) {
    std::istringstream in(text);
    std::string side, tag, extra;
    double a = 0, b = 0;
    if (!(in >> side >> a >> b >> tag)) throw Error(ErrorKind::config, "malformed boundary segment '" + text + "'");
    Segment s{parse_side(side), a * 1e-3, b * 1e-3, parse_boundary_kind(tag)};
    while (in >> extra) {
        if (extra == "parabolic") {
            s.profile = Profile::parabolic;
        } else if (extra == "uniform") {
            s.profile = Profile::uniform;
        } else {
            s.speed = csv::to_double(extra, "segment speed") * 1e-3;
        }
    }
    return s;
}

struct Grid2D {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;  // m
    double dy = 0.0;  // m
    std::vector<Segment> segments;

    double lx() const { return nx * dx; }
    double ly() const { return ny * dy; }
    int cells() const { return nx * ny; }
    double side_length(Side s) const { return (s == Side::left || s == Side::right) ? ly() : lx(); }
    double side_step(Side s) const { return (s == Side::left || s == Side::right) ? dy : dx; }
    int side_faces(Side s) const { return (s == Side::left || s == Side::right) ? ny : nx; }

    /// Segment whose open interval contains `pos` on `side`, or -1 for wall. Points within
    /// rounding distance of an end count as outside.
    int segment_at(Side side, double pos) const {
        const double tol = 1e-9 * side_length(side);
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const auto& s = segments[k];
            if (s.side == side && pos > s.start + tol && pos < s.end - tol) return static_cast<int>(k);
        }
        return -1;
    }

    bool has_pressure_outlet() const {
        return std::any_of(segments.begin(), segments.end(),
                           [](const Segment& s) { return s.kind == BoundaryKind::outlet_pressure; });
    }

    int faces_in(std::size_t k) const {
        const auto& s = segments[k];
        const double h = side_step(s.side);
        int n = 0;
        for (int i = 0; i < side_faces(s.side); ++i)
            if (segment_at(s.side, (i + 0.5) * h) == static_cast<int>(k)) ++n;
        return n;
    }

    void validate() const {
        require(nx >= 1 && ny >= 1, ErrorKind::invalid_problem, "grid needs nx, ny >= 1");
        require(dx > 0.0 && dy > 0.0 && std::isfinite(dx) && std::isfinite(dy), ErrorKind::invalid_problem,
                "grid spacing must be > 0");
        int inlets = 0, outlets = 0;
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const auto& s = segments[k];
            const std::string name = "segment " + std::to_string(k) + " (" + std::string(to_string(s.side)) + ")";
            require(s.start < s.end && s.start >= -1e-12 * side_length(s.side) &&
                        s.end <= side_length(s.side) * (1 + 1e-12),
                    ErrorKind::invalid_problem, name + " must satisfy 0 <= start < end <= side length");
            require(s.speed >= 0.0 && std::isfinite(s.speed), ErrorKind::invalid_problem, name + ": speed must be >= 0");
            for (std::size_t m = 0; m < k; ++m) {
                const auto& o = segments[m];
                require(o.side != s.side || o.end <= s.start || s.end <= o.start, ErrorKind::invalid_problem,
                        name + " overlaps segment " + std::to_string(m));
            }
            require(faces_in(k) > 0, ErrorKind::invalid_problem, name + " covers no boundary face");
            if (s.kind == BoundaryKind::inlet) ++inlets;
            if (is_outlet(s.kind)) ++outlets;
        }
        require(inlets > 0, ErrorKind::invalid_problem, "no inlet segment");
        require(outlets > 0, ErrorKind::invalid_problem, "no outlet segment");
    }
};

/// α(ε) = (1−t)·alpha_max + t·alpha_min with t = ε(1+q)/(ε+q).
inline double inverse_permeability(double eps, double q, double alpha_max, double alpha_min) {
    require(q > 0.0, ErrorKind::invalid_input, "penalization q must be > 0");
    require(eps >= 0.0 && eps <= 1.0, ErrorKind::invalid_input, "density must lie in [0, 1]");
    const double t = eps * (1.0 + q) / (eps + q);
    return (1.0 - t) * alpha_max + t * alpha_min;
}

inline double inverse_permeability_derivative(double eps, double q, double alpha_max, double alpha_min) {
    return (alpha_min - alpha_max) * q * (1.0 + q) / ((eps + q) * (eps + q));
}

struct TopoProblem {
    Grid2D grid;
    FluidProps fluid = catalog::water_10c();
    double beta = 0.0;              // weight of the dissipation term
    double volume_fraction = 1.0;   // upper bound on mean ε
    double q = 0.01;
    std::vector<double> q_continuation;  // later penalization stages, e.g. {0.1}
    std::optional<double> alpha_max;     // default 2.5μ/(0.01·L)²
    std::optional<double> alpha_min;     // default 2.5μ/(100·L)²
    double alpha_length = 0.0;           // L above; 0 means the longest domain extent
    AlphaConvention convention = AlphaConvention::fluid;
    double body_fx = 0.0;  // N/m³
    double body_fy = 0.0;
    int max_iters = 100;
    std::optional<double> eps0;  // uniform start; default volume_fraction
    double move_limit = 0.2;

    double length_scale() const { return alpha_length > 0.0 ? alpha_length : std::max(grid.lx(), grid.ly()); }
    double amax() const {
        const double l = 0.01 * length_scale();
        return alpha_max ? *alpha_max : 2.5 * fluid.viscosity / (l * l);
    }
    double amin() const {
        const double l = 100.0 * length_scale();
        return alpha_min ? *alpha_min : 2.5 * fluid.viscosity / (l * l);
    }
    double alpha(double eps, double qq) const {
        return convention == AlphaConvention::fluid ? inverse_permeability(eps, qq, amax(), amin())
                                                    : inverse_permeability(eps, qq, amin(), amax());
    }
    double alpha_derivative(double eps, double qq) const {
        return convention == AlphaConvention::fluid ? inverse_permeability_derivative(eps, qq, amax(), amin())
                                                    : inverse_permeability_derivative(eps, qq, amin(), amax());
    }

    void validate() const {
        grid.validate();
        require(fluid.viscosity > 0.0, ErrorKind::invalid_problem, "viscosity must be > 0");
        require(beta >= 0.0 && beta <= 1.0, ErrorKind::invalid_problem, "beta must lie in [0, 1]");
        require(volume_fraction > 0.0 && volume_fraction <= 1.0, ErrorKind::invalid_problem,
                "volume fraction must lie in (0, 1]");
        require(q > 0.0, ErrorKind::invalid_problem, "q must be > 0");
        for (double s : q_continuation) require(s > 0.0, ErrorKind::invalid_problem, "continuation q must be > 0");
        require(amax() > 0.0 && amin() >= 0.0, ErrorKind::invalid_problem, "alpha bounds must be positive");
        require(max_iters >= 0, ErrorKind::invalid_problem, "max_iters must be >= 0");
        require(move_limit > 0.0 && move_limit <= 1.0, ErrorKind::invalid_problem, "move limit must lie in (0, 1]");
        if (eps0) require(*eps0 >= 0.0 && *eps0 <= 1.0, ErrorKind::invalid_problem, "eps0 must lie in [0, 1]");
    }
};

inline void validate_density(const TopoProblem& pb, const std::vector<double>& eps) {
    require(eps.size() == static_cast<std::size_t>(pb.grid.cells()), ErrorKind::invalid_input,
            "density field has " + std::to_string(eps.size()) + " entries, grid has " +
                std::to_string(pb.grid.cells()) + " cells");
    for (double e : eps)
        require(std::isfinite(e) && e >= 0.0 && e <= 1.0, ErrorKind::invalid_input, "density must lie in [0, 1]");
}

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;
using Factorization = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

struct Face {
    int free = -1;         // index among free velocities, -1 when prescribed
    double value = 0.0;    // prescribed velocity along +x or +y
    double volume = 0.0;   // control-volume area
    int cell[2] = {-1, -1};
    double weight[2] = {0.0, 0.0};  // share of each adjacent cell in α_face
    int segment = -1;
    double normal = 0.0;   // outward normal sign on the boundary
    double length = 0.0;
    double body = 0.0;     // body-force component times volume
};

/// Viscous term ½μ·w·(U_a − U_b)²; b = -1 is a no-slip boundary point.
struct Link {
    int a;
    int b;
    double w;
};

struct CellFace {
    int face;
    double coeff;  // row of −div
};

class Discretization {
public:
    explicit Discretization(const TopoProblem& pb) : pb_(pb), g_(pb.grid) {
        pb.validate();
        const int nx = g_.nx, ny = g_.ny;
        nu_ = (nx + 1) * ny;
        faces_.resize(nu_ + nx * (ny + 1));
        for (std::size_t k = 0; k < g_.segments.size(); ++k)
            if (is_outlet(g_.segments[k].kind)) outlet_index_.push_back(static_cast<int>(k));
        for (std::size_t k = 0; k < g_.segments.size(); ++k)
            if (g_.segments[k].kind == BoundaryKind::inlet) inlet_width_ += g_.faces_in(k) * g_.side_step(g_.segments[k].side);

        for (int j = 0; j < ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                Face& f = faces_[iu(i, j)];
                const bool edge = (i == 0 || i == nx);
                f.volume = (edge ? 0.5 : 1.0) * g_.dx * g_.dy;
                f.length = g_.dy;
                f.body = pb.body_fx * f.volume;
                if (i > 0) f.cell[0] = cell(i - 1, j);
                if (i < nx) f.cell[1] = cell(i, j);
                if (edge) {
                    f.normal = (i == 0) ? -1.0 : 1.0;
                    bind(f, i == 0 ? Side::left : Side::right, (j + 0.5) * g_.dy);
                }
            }
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i < nx; ++i) {
                Face& f = faces_[iv(i, j)];
                const bool edge = (j == 0 || j == ny);
                f.volume = (edge ? 0.5 : 1.0) * g_.dx * g_.dy;
                f.length = g_.dx;
                f.body = pb.body_fy * f.volume;
                if (j > 0) f.cell[0] = cell(i, j - 1);
                if (j < ny) f.cell[1] = cell(i, j);
                if (edge) {
                    f.normal = (j == 0) ? -1.0 : 1.0;
                    bind(f, j == 0 ? Side::bottom : Side::top, (i + 0.5) * g_.dx);
                }
            }
        for (auto& f : faces_) {
            const int n = (f.cell[0] >= 0) + (f.cell[1] >= 0);
            for (int s = 0; s < 2; ++s)
                if (f.cell[s] >= 0) f.weight[s] = 1.0 / n;
        }
        apply_profiles();

        for (auto& f : faces_) {
            const bool interior = f.normal == 0.0;
            const bool open = f.segment >= 0 && g_.segments[f.segment].kind == BoundaryKind::outlet_pressure;
            if (interior || open) f.free = nfree_++;
        }

        build_links();
        build_cells();
        check_compatibility();
    }

    const TopoProblem& problem() const { return pb_; }
    const Grid2D& grid() const { return g_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<int>& outlets() const { return outlet_index_; }
    int iu(int i, int j) const { return j * (g_.nx + 1) + i; }
    int iv(int i, int j) const { return nu_ + j * g_.nx + i; }
    int cell(int i, int j) const { return j * g_.nx + i; }
    int n_free() const { return nfree_; }
    int n_unknowns() const { return nfree_ + static_cast<int>(pressure_index_count_); }
    int pressure_index(int c) const { return pressure_[c]; }
    double inlet_width() const { return inlet_width_; }
    const std::vector<std::vector<CellFace>>& cell_faces() const { return cell_faces_; }

    std::vector<double> face_alpha(const std::vector<double>& alpha) const {
        std::vector<double> a(faces_.size(), 0.0);
        for (std::size_t k = 0; k < faces_.size(); ++k)
            for (int s = 0; s < 2; ++s)
                if (faces_[k].cell[s] >= 0) a[k] += faces_[k].weight[s] * alpha[faces_[k].cell[s]];
        return a;
    }

    SpMat matrix(const std::vector<double>& alpha, Eigen::VectorXd& rhs) const {
        const double mu = pb_.fluid.viscosity;
        const auto af = face_alpha(alpha);
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(links_.size() * 4 + faces_.size() + cell_faces_.size() * 8);
        rhs = Eigen::VectorXd::Zero(n_unknowns());
        for (const auto& l : links_) {
            const double w = mu * l.w;
            const Face& fa = faces_[l.a];
            const Face* fb = l.b >= 0 ? &faces_[l.b] : nullptr;
            if (fa.free >= 0) {
                t.emplace_back(fa.free, fa.free, w);
                if (fb && fb->free >= 0) t.emplace_back(fa.free, fb->free, -w);
                else if (fb) rhs[fa.free] += w * fb->value;
            }
            if (fb && fb->free >= 0) {
                t.emplace_back(fb->free, fb->free, w);
                if (fa.free >= 0) t.emplace_back(fb->free, fa.free, -w);
                else rhs[fb->free] += w * fa.value;
            }
        }
        for (std::size_t k = 0; k < faces_.size(); ++k) {
            const Face& f = faces_[k];
            if (f.free < 0) continue;
            t.emplace_back(f.free, f.free, af[k] * f.volume);
            rhs[f.free] += f.body;
        }
        for (std::size_t c = 0; c < cell_faces_.size(); ++c) {
            const int pc = pressure_[c];
            if (pc < 0) continue;
            for (const auto& cf : cell_faces_[c]) {
                const Face& f = faces_[cf.face];
                if (f.free >= 0) {
                    t.emplace_back(pc, f.free, cf.coeff);
                    t.emplace_back(f.free, pc, cf.coeff);
                } else {
                    rhs[pc] -= cf.coeff * f.value;
                }
            }
        }
        SpMat k(n_unknowns(), n_unknowns());
        k.setFromTriplets(t.begin(), t.end());
        k.makeCompressed();
        return k;
    }

    /// Full face velocity vector from the free unknowns.
    std::vector<double> velocities(const Eigen::VectorXd& x) const {
        std::vector<double> u(faces_.size());
        for (std::size_t k = 0; k < faces_.size(); ++k) u[k] = faces_[k].free >= 0 ? x[faces_[k].free] : faces_[k].value;
        return u;
    }

    double inflow(const std::vector<double>& u) const {
        double q = 0.0;
        for (std::size_t k = 0; k < faces_.size(); ++k) {
            const Face& f = faces_[k];
            if (f.segment >= 0 && g_.segments[f.segment].kind == BoundaryKind::inlet) q -= u[k] * f.normal * f.length;
        }
        return q;
    }

    std::vector<double> outlet_flux(const std::vector<double>& u) const {
        std::vector<double> q(outlet_index_.size(), 0.0);
        for (std::size_t k = 0; k < faces_.size(); ++k) {
            const Face& f = faces_[k];
            if (f.segment < 0) continue;
            const auto it = std::find(outlet_index_.begin(), outlet_index_.end(), f.segment);
            if (it != outlet_index_.end()) q[it - outlet_index_.begin()] += u[k] * f.normal * f.length;
        }
        return q;
    }

    double dissipation(const std::vector<double>& u, const std::vector<double>& alpha) const {
        const double mu = pb_.fluid.viscosity;
        const auto af = face_alpha(alpha);
        double j = 0.0;
        for (const auto& l : links_) {
            const double d = u[l.a] - (l.b >= 0 ? u[l.b] : 0.0);
            j += 0.5 * mu * l.w * d * d;
        }
        for (std::size_t k = 0; k < faces_.size(); ++k)
            j += 0.5 * af[k] * faces_[k].volume * u[k] * u[k] - faces_[k].body * u[k];
        return j;
    }

    /// ∂J1/∂U for every face.
    std::vector<double> dissipation_gradient(const std::vector<double>& u, const std::vector<double>& alpha) const {
        const double mu = pb_.fluid.viscosity;
        const auto af = face_alpha(alpha);
        std::vector<double> g(faces_.size(), 0.0);
        for (const auto& l : links_) {
            const double d = mu * l.w * (u[l.a] - (l.b >= 0 ? u[l.b] : 0.0));
            g[l.a] += d;
            if (l.b >= 0) g[l.b] -= d;
        }
        for (std::size_t k = 0; k < faces_.size(); ++k) g[k] += af[k] * faces_[k].volume * u[k] - faces_[k].body;
        return g;
    }

private:
    void bind(Face& f, Side side, double pos) {
        f.segment = g_.segment_at(side, pos);
        f.value = 0.0;
    }

    void apply_profiles() {
        for (std::size_t k = 0; k < g_.segments.size(); ++k) {
            const auto& s = g_.segments[k];
            if (s.kind == BoundaryKind::wall || s.kind == BoundaryKind::outlet_pressure) continue;
            // Sign: inlets push inward (against the outward normal), velocity outlets push outward.
            const double dir = s.kind == BoundaryKind::inlet ? -1.0 : 1.0;
            std::vector<Face*> members;
            std::vector<double> shape;
            for (auto& f : faces_) {
                if (f.segment != static_cast<int>(k)) continue;
                const bool vertical = (s.side == Side::left || s.side == Side::right);
                // Face centre along the side, recovered from the owning cell.
                const int c = f.cell[0] >= 0 ? f.cell[0] : f.cell[1];
                const double pos = vertical ? (c / g_.nx + 0.5) * g_.dy : (c % g_.nx + 0.5) * g_.dx;
                const double t = (pos - s.start) / (s.end - s.start);
                members.push_back(&f);
                shape.push_back(s.profile == Profile::parabolic ? t * (1.0 - t) : 1.0);
            }
            double mean = 0.0;
            for (double v : shape) mean += v;
            mean /= static_cast<double>(shape.size());
            for (std::size_t m = 0; m < members.size(); ++m)
                members[m]->value = dir * members[m]->normal * s.speed * shape[m] / mean;
        }
    }

    bool tangential_slip(Side side, double pos) const {
        const int s = g_.segment_at(side, pos);
        return s >= 0 && g_.segments[s].kind == BoundaryKind::outlet_pressure;
    }

    void build_links() {
        const int nx = g_.nx, ny = g_.ny;
        const double dx = g_.dx, dy = g_.dy;
        auto ex = [&](int i) { return (i == 0 || i == nx) ? 0.5 * dx : dx; };
        auto ey = [&](int j) { return (j == 0 || j == ny) ? 0.5 * dy : dy; };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) links_.push_back({iu(i, j), iu(i + 1, j), dy / dx});
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i <= nx; ++i) links_.push_back({iu(i, j), iu(i, j + 1), ex(i) / dy});
        for (int i = 0; i <= nx; ++i) {
            if (!tangential_slip(Side::bottom, i * dx)) links_.push_back({iu(i, 0), -1, 2.0 * ex(i) / dy});
            if (!tangential_slip(Side::top, i * dx)) links_.push_back({iu(i, ny - 1), -1, 2.0 * ex(i) / dy});
        }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) links_.push_back({iv(i, j), iv(i, j + 1), dx / dy});
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i + 1 < nx; ++i) links_.push_back({iv(i, j), iv(i + 1, j), ey(j) / dx});
        for (int j = 0; j <= ny; ++j) {
            if (!tangential_slip(Side::left, j * dy)) links_.push_back({iv(0, j), -1, 2.0 * ey(j) / dx});
            if (!tangential_slip(Side::right, j * dy)) links_.push_back({iv(nx - 1, j), -1, 2.0 * ey(j) / dx});
        }
    }

    void build_cells() {
        const int nx = g_.nx, ny = g_.ny;
        cell_faces_.resize(nx * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                cell_faces_[cell(i, j)] = {{iu(i, j), g_.dy}, {iu(i + 1, j), -g_.dy}, {iv(i, j), g_.dx}, {iv(i, j + 1), -g_.dx}};
            }
        pressure_.assign(nx * ny, -1);
        // Without a pressure outlet the level is fixed by dropping cell 0.
        const int first = g_.has_pressure_outlet() ? 0 : 1;
        int n = nfree_;
        for (int c = first; c < nx * ny; ++c) pressure_[c] = n++;
        pressure_index_count_ = static_cast<std::size_t>(n - nfree_);
    }

    void check_compatibility() const {
        if (g_.has_pressure_outlet()) return;
        double in = 0.0, net = 0.0;
        for (const auto& f : faces_) {
            if (f.normal == 0.0) continue;
            const double flux = f.value * f.normal * f.length;
            net += flux;
            in += std::abs(flux);
        }
        require(std::abs(net) <= 1e-12 * std::max(in, 1e-300), ErrorKind::solver,
                "prescribed boundary fluxes are incompatible with incompressibility (net outflow " + csv::fmt(net) +
                    " m²/s) and no pressure outlet exists to absorb it");
    }

    TopoProblem pb_;
    const Grid2D& g_;
    int nu_ = 0;
    int nfree_ = 0;
    std::size_t pressure_index_count_ = 0;
    double inlet_width_ = 0.0;
    std::vector<Face> faces_;
    std::vector<Link> links_;
    std::vector<std::vector<CellFace>> cell_faces_;
    std::vector<int> pressure_;
    std::vector<int> outlet_index_;
};

}  // namespace detail

struct FlowSolution {
    int nx = 0;
    int ny = 0;
    std::vector<double> u;  // (nx+1)·ny vertical faces, index j·(nx+1)+i
    std::vector<double> v;  // nx·(ny+1) horizontal faces, index j·nx+i
    std::vector<double> p;  // nx·ny cells
    double q_in = 0.0;
    std::vector<double> outlet_flux;  // per outlet segment, in segment order
    double residual = 0.0;            // ‖Kx − b‖/‖b‖
    double divergence = 0.0;          // max cell net outflow / q_in
    bool converged = false;

    std::vector<double> faces() const {
        std::vector<double> all(u);
        all.insert(all.end(), v.begin(), v.end());
        return all;
    }

    std::shared_ptr<detail::Factorization> factor;  // non-const: transpose views need it
    double q_used = 0.0;  // penalization the factorization was built with
};

inline std::vector<double> cell_alpha(const TopoProblem& pb, const std::vector<double>& eps, double q) {
    std::vector<double> a(eps.size());
    for (std::size_t c = 0; c < eps.size(); ++c) a[c] = pb.alpha(eps[c], q);
    return a;
}

namespace detail {

inline FlowSolution solve(const Discretization& d, const std::vector<double>& eps, double q) {
    const auto& pb = d.problem();
    validate_density(pb, eps);
    const auto alpha = cell_alpha(pb, eps, q);
    Eigen::VectorXd b;
    const SpMat k = d.matrix(alpha, b);
    auto lu = std::make_shared<Factorization>();
    lu->analyzePattern(k);
    lu->factorize(k);
    require(lu->info() == Eigen::Success, ErrorKind::solver,
            "Stokes–Brinkman system is singular (" + lu->lastErrorMessage() + "); check boundary tags");
    Eigen::VectorXd x = lu->solve(b);
    const Eigen::VectorXd r = b - k * x;
    x += lu->solve(r);

    FlowSolution s;
    s.nx = pb.grid.nx;
    s.ny = pb.grid.ny;
    const double bn = b.norm();
    s.residual = (b - k * x).norm() / (bn > 0.0 ? bn : 1.0);
    require(std::isfinite(s.residual), ErrorKind::solver, "Stokes–Brinkman solve produced non-finite values");

    const auto uf = d.velocities(x);
    const std::size_t nu = static_cast<std::size_t>((s.nx + 1) * s.ny);
    s.u.assign(uf.begin(), uf.begin() + nu);
    s.v.assign(uf.begin() + nu, uf.end());
    s.p.assign(pb.grid.cells(), 0.0);
    for (int c = 0; c < pb.grid.cells(); ++c)
        if (d.pressure_index(c) >= 0) s.p[c] = x[d.pressure_index(c)];
    s.q_in = d.inflow(uf);
    s.outlet_flux = d.outlet_flux(uf);
    double div = 0.0;
    for (const auto& cf : d.cell_faces()) {
        double net = 0.0;
        for (const auto& f : cf) net -= f.coeff * uf[f.face];
        div = std::max(div, std::abs(net));
    }
    s.divergence = s.q_in > 0.0 ? div / s.q_in : div;
    s.converged = s.residual <= 1e-10 && s.divergence <= 1e-8;
    require(s.converged, ErrorKind::solver,
            "Stokes–Brinkman solve did not converge (residual " + csv::fmt(s.residual) + ", divergence " +
                csv::fmt(s.divergence) + ")");
    s.factor = lu;
    s.q_used = q;
    return s;
}

}  // namespace detail

inline FlowSolution solve_flow(const TopoProblem& pb, const std::vector<double>& eps) {
    const detail::Discretization d(pb);
    return detail::solve(d, eps, pb.q);
}

/// ½·Σ(q_i − q̄)².
inline double flow_mismatch(const std::vector<double>& q) {
    if (q.empty()) return 0.0;
    double mean = 0.0;
    for (double v : q) mean += v;
    mean /= static_cast<double>(q.size());
    double s = 0.0;
    for (double v : q) s += (v - mean) * (v - mean);
    return 0.5 * s;
}

/// (max − min) of the outlet fluxes as a fraction of the inflow.
inline double flux_spread(const std::vector<double>& q, double q_in) {
    require(!q.empty() && q_in > 0.0, ErrorKind::invalid_input, "flux spread needs outlets and inflow");
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    return (*hi - *lo) / q_in;
}

struct Objective {
    double J = 0.0;
    double J1 = 0.0;  // W/m dissipation
    double J2 = 0.0;  // m⁴/s² flux mismatch
    std::vector<double> outlet_flux;
    double q_in = 0.0;
};

namespace detail {

/// Weights turning J2 and J1 into the dimensionless J.
struct Scales {
    double c2;
    double c1;
};

inline Scales scales(const Discretization& d, double q_in) {
    const auto& pb = d.problem();
    if (!(q_in > 0.0)) return {0.0, 0.0};
    const double w = d.inlet_width();
    const double u_ref = q_in / w;
    const double lambda2 = pb.fluid.viscosity * u_ref * u_ref / (w * w);
    return {(1.0 - pb.beta) / (q_in * q_in), pb.beta / (lambda2 * pb.grid.lx() * pb.grid.ly())};
}

inline Objective objective(const Discretization& d, const std::vector<double>& eps, const FlowSolution& s, double q) {
    require(!d.outlets().empty(), ErrorKind::invalid_problem, "no outlets tagged");
    require(s.converged, ErrorKind::solver, "objective needs a converged flow solution");
    const auto uf = s.faces();
    Objective o;
    o.J1 = d.dissipation(uf, cell_alpha(d.problem(), eps, q));
    o.outlet_flux = s.outlet_flux;
    o.q_in = s.q_in;
    o.J2 = flow_mismatch(s.outlet_flux);
    const auto sc = scales(d, s.q_in);
    o.J = sc.c2 * o.J2 + sc.c1 * o.J1;
    return o;
}

inline std::vector<double> gradient(const Discretization& d, const std::vector<double>& eps, const FlowSolution& s,
                                    double q) {
    require(s.converged && s.factor, ErrorKind::solver, "gradient refused: flow solution is not converged");
    const auto& pb = d.problem();
    const auto& faces = d.faces();
    const auto uf = s.faces();
    const auto alpha = cell_alpha(pb, eps, q);
    const auto sc = scales(d, s.q_in);

    std::vector<double> dj(faces.size(), 0.0);
    if (sc.c1 != 0.0) {
        const auto g1 = d.dissipation_gradient(uf, alpha);
        for (std::size_t k = 0; k < faces.size(); ++k) dj[k] += sc.c1 * g1[k];
    }
    if (sc.c2 != 0.0) {
        double mean = 0.0;
        for (double v : s.outlet_flux) mean += v;
        mean /= static_cast<double>(s.outlet_flux.size());
        for (std::size_t k = 0; k < faces.size(); ++k) {
            const auto& f = faces[k];
            if (f.segment < 0) continue;
            const auto it = std::find(d.outlets().begin(), d.outlets().end(), f.segment);
            if (it == d.outlets().end()) continue;
            dj[k] += sc.c2 * (s.outlet_flux[it - d.outlets().begin()] - mean) * f.normal * f.length;
        }
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d.n_unknowns());
    for (std::size_t k = 0; k < faces.size(); ++k)
        if (faces[k].free >= 0) rhs[faces[k].free] = dj[k];
    const Eigen::VectorXd lambda = s.factor->transpose().solve(rhs);

    std::vector<double> grad(eps.size(), 0.0);
    for (std::size_t k = 0; k < faces.size(); ++k) {
        const auto& f = faces[k];
        for (int side = 0; side < 2; ++side) {
            const int c = f.cell[side];
            if (c < 0) continue;
            const double da = f.weight[side] * pb.alpha_derivative(eps[c], q) * f.volume;
            grad[c] += sc.c1 * 0.5 * da * uf[k] * uf[k];
            if (f.free >= 0) grad[c] -= lambda[f.free] * da * uf[k];
        }
    }
    return grad;
}

}  // namespace detail

inline Objective objective(const TopoProblem& pb, const std::vector<double>& eps, const FlowSolution& s) {
    const detail::Discretization d(pb);
    return detail::objective(d, eps, s, s.q_used > 0.0 ? s.q_used : pb.q);
}

/// dJ/dε per cell by the discrete adjoint of the flow system.
inline std::vector<double> gradient(const TopoProblem& pb, const std::vector<double>& eps, const FlowSolution& s) {
    const detail::Discretization d(pb);
    return detail::gradient(d, eps, s, s.q_used > 0.0 ? s.q_used : pb.q);
}

struct HistoryRow {
    int iter;
    double J;
    double J1;
    double J2;
    double volume;
};

struct OptimizeResult {
    std::vector<double> eps;
    std::vector<HistoryRow> history;
    Objective initial;
    Objective final;
    int iterations = 0;
    bool stalled = false;  // stopped on |ΔJ|/J < 1e-6 over 5 iterations
    Warnings warnings;
};

inline double mean_density(const std::vector<double>& eps) {
    double s = 0.0;
    for (double e : eps) s += e;
    return s / static_cast<double>(eps.size());
}

/// Projection onto {lo ≤ ε ≤ hi, mean ε ≤ V} by bisection on an additive shift.
inline std::vector<double> project(const std::vector<double>& trial, const std::vector<double>& lo,
                                   const std::vector<double>& hi, double volume_fraction) {
    const std::size_t n = trial.size();
    auto clip = [&](double shift) {
        std::vector<double> x(n);
        for (std::size_t c = 0; c < n; ++c) x[c] = std::clamp(trial[c] - shift, lo[c], hi[c]);
        return x;
    };
    auto x = clip(0.0);
    const double cap = volume_fraction * static_cast<double>(n);
    auto sum = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e;
        return s;
    };
    if (sum(x) <= cap) return x;
    double a = 0.0, b = 0.0;
    for (std::size_t c = 0; c < n; ++c) b = std::max(b, trial[c] - lo[c]);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        (sum(clip(m)) > cap ? a : b) = m;
    }
    return clip(b);
}

/// Projected-gradient descent with move limits, volume projection and backtracking.
inline OptimizeResult optimize(const TopoProblem& pb, std::vector<double> eps0, int max_iters) {
    const detail::Discretization d(pb);
    validate_density(pb, eps0);
    require(max_iters >= 0, ErrorKind::invalid_input, "max_iters must be >= 0");
    const std::size_t n = eps0.size();
    OptimizeResult res;
    res.eps = project(eps0, std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), pb.volume_fraction);

    std::vector<double> stages{pb.q};
    stages.insert(stages.end(), pb.q_continuation.begin(), pb.q_continuation.end());
    const int per_stage = max_iters / static_cast<int>(stages.size());

    int iter = 0;
    Objective obj;
    for (std::size_t st = 0; st < stages.size(); ++st) {
        const double q = stages[st];
        const int budget = st + 1 == stages.size() ? max_iters - iter : per_stage;
        auto sol = detail::solve(d, res.eps, q);
        obj = detail::objective(d, res.eps, sol, q);
        if (st == 0) res.initial = obj;
        res.history.push_back({iter, obj.J, obj.J1, obj.J2, mean_density(res.eps)});
        double step = 1.0;
        int quiet = 0;
        for (int k = 0; k < budget; ++k) {
            const auto g = detail::gradient(d, res.eps, sol, q);
            double gmax = 0.0;
            for (double v : g) gmax = std::max(gmax, std::abs(v));
            if (!(gmax > 0.0)) {
                res.warnings.push_back({"no_descent", "gradient vanishes; design is stationary"});
                break;
            }
            std::vector<double> lo(n), hi(n);
            for (std::size_t c = 0; c < n; ++c) {
                lo[c] = std::max(0.0, res.eps[c] - pb.move_limit);
                hi[c] = std::min(1.0, res.eps[c] + pb.move_limit);
            }
            bool accepted = false;
            double s = step;
            for (int tries = 0; tries <= 10; ++tries, s *= 0.5) {
                std::vector<double> trial(n);
                for (std::size_t c = 0; c < n; ++c) trial[c] = res.eps[c] - s * pb.move_limit * g[c] / gmax;
                auto cand = project(trial, lo, hi, pb.volume_fraction);
                if (cand == res.eps) break;
                auto cs = detail::solve(d, cand, q);
                auto co = detail::objective(d, cand, cs, q);
                if (co.J < obj.J) {
                    const double change = std::abs(obj.J - co.J) / std::max(std::abs(obj.J), 1e-300);
                    quiet = change < 1e-6 ? quiet + 1 : 0;
                    res.eps = std::move(cand);
                    sol = std::move(cs);
                    obj = co;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                res.warnings.push_back({"no_descent", "no decrease at the minimum step; stopped"});
                break;
            }
            ++iter;
            res.history.push_back({iter, obj.J, obj.J1, obj.J2, mean_density(res.eps)});
            // The step may grow past the largest-gradient move; the move limit still caps each cell.
            step = std::min(1e6, 2.0 * s);
            if (quiet >= 5) {
                res.stalled = true;
                break;
            }
        }
    }
    res.final = obj;
    res.iterations = iter;
    return res;
}

inline OptimizeResult optimize(const TopoProblem& pb) {
    const double e0 = pb.eps0 ? *pb.eps0 : pb.volume_fraction;
    return optimize(pb, std::vector<double>(pb.grid.cells(), e0), pb.max_iters);
}

/// Straight all-fluid channel h × 4h: parabolic inlet left, pressure outlet right.
inline TopoProblem poiseuille_channel(int ny, double h = 1e-3, double speed = 1e-3) {
    TopoProblem pb;
    pb.grid = {4 * ny, ny, h / ny, h / ny, {}};
    pb.grid.segments.push_back({Side::left, 0.0, h, BoundaryKind::inlet, speed});
    pb.grid.segments.push_back({Side::right, 0.0, h, BoundaryKind::outlet_pressure});
    return pb;
}

struct PoiseuilleCheck {
    std::vector<int> ny;
    std::vector<double> error;           // max |u − u_exact| / u_max at mid-length
    std::vector<double> observed_order;  // log2 of successive error ratios
    double max_divergence = 0.0;         // worst relative mass imbalance
};

/// Refinement study of the all-fluid channel against the analytic parabola.
inline PoiseuilleCheck poiseuille_selftest(const std::vector<int>& levels = {8, 16, 32}) {
    require(levels.size() >= 2, ErrorKind::invalid_input, "selftest needs at least two grids");
    PoiseuilleCheck out;
    const double h = 1e-3, speed = 1e-3;
    for (int ny : levels) {
        const auto pb = poiseuille_channel(ny, h, speed);
        const auto s = solve_flow(pb, std::vector<double>(pb.grid.cells(), 1.0));
        double err = 0.0;
        const int i = 2 * ny;
        for (int j = 0; j < ny; ++j) {
            const double y = (j + 0.5) * pb.grid.dy;
            const double exact = 6.0 * speed * y * (h - y) / (h * h);
            err = std::max(err, std::abs(s.u[j * (pb.grid.nx + 1) + i] - exact));
        }
        out.ny.push_back(ny);
        out.error.push_back(err / (1.5 * speed));
        out.max_divergence = std::max(out.max_divergence, s.divergence);
    }
    for (std::size_t k = 1; k < out.error.size(); ++k)
        out.observed_order.push_back(std::log(out.error[k - 1] / out.error[k]) /
                                     std::log(static_cast<double>(out.ny[k]) / out.ny[k - 1]));
    return out;
}

/// Row-major ε, top row of the domain first (same orientation as the image).
inline void write_density_csv(std::ostream& out, const std::vector<double>& eps, int nx, int ny) {
    require(eps.size() == static_cast<std::size_t>(nx * ny), ErrorKind::invalid_input, "density size mismatch");
    for (int j = ny - 1; j >= 0; --j) {
        for (int i = 0; i < nx; ++i) out << (i ? "," : "") << csv::fmt(eps[j * nx + i]);
        out << '\n';
    }
}

/// Binary 8-bit PGM, 0 = solid (black), 255 = fluid (white).
inline void write_density_pgm(std::ostream& out, const std::vector<double>& eps, int nx, int ny) {
    require(eps.size() == static_cast<std::size_t>(nx * ny), ErrorKind::invalid_input, "density size mismatch");
    out << "P5\n" << nx << ' ' << ny << "\n255\n";
    for (int j = ny - 1; j >= 0; --j)
        for (int i = 0; i < nx; ++i) {
            const double e = std::clamp(eps[j * nx + i], 0.0, 1.0);
            out.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(255.0 * e))));
        }
}

inline void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& h) {
    out << "iter,J,J1,J2,volume\n";
    for (const auto& r : h)
        out << r.iter << ',' << csv::fmt(r.J) << ',' << csv::fmt(r.J1) << ',' << csv::fmt(r.J2) << ','
            << csv::fmt(r.volume) << '\n';
}

/// Cell-centred fields; face velocities are averaged onto the centre.
inline void write_fields_csv(std::ostream& out, const Grid2D& g, const FlowSolution& s) {
    out << "x,y,u,v,p\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double u = 0.5 * (s.u[j * (g.nx + 1) + i] + s.u[j * (g.nx + 1) + i + 1]);
            const double v = 0.5 * (s.v[j * g.nx + i] + s.v[(j + 1) * g.nx + i]);
            out << csv::fmt((i + 0.5) * g.dx) << ',' << csv::fmt((j + 0.5) * g.dy) << ',' << csv::fmt(u) << ','
                << csv::fmt(v) << ',' << csv::fmt(s.p[j * g.nx + i]) << '\n';
        }
}

}  // namespace jetcool::topo
