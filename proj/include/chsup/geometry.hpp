#pragma once

// Ground-truth shapes with known geometric constants, seeded samplers with
// controlled boundary density decay, rasterized set operations and the set
// divergences used to score estimates.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <utility>
#include <vector>

#include "chsup/common.hpp"

namespace chsup {

struct Ball {
    Vector center;
    double radius;
};

// Analytic set built from balls: a single ball, an annulus, a union of balls,
// or a union with ball-shaped holes removed.  Membership, distance to the
// boundary, diameter, rolling radius and boundary measure (where known) are
// all closed-form.
class ShapeSpec {
public:
    enum class Kind { Ball, Annulus, UnionOfBalls, Difference };

    static ShapeSpec ball(Vector center, double radius) {
        ShapeSpec s;
        s.kind_ = Kind::Ball;
        s.positive_.push_back({std::move(center), radius});
        s.finalize();
        return s;
    }

    static ShapeSpec annulus(Vector center, double r_in, double r_out) {
        if (!(0 < r_in && r_in < r_out))
            throw ValidationError("ShapeSpec::annulus: need 0 < r_in < r_out");
        ShapeSpec s;
        s.kind_ = Kind::Annulus;
        s.positive_.push_back({center, r_out});
        s.negative_.push_back({std::move(center), r_in});
        s.finalize();
        return s;
    }

    static ShapeSpec union_of_balls(std::vector<Ball> balls) {
        if (balls.empty()) throw ValidationError("ShapeSpec: empty union");
        ShapeSpec s;
        s.kind_ = Kind::UnionOfBalls;
        s.positive_ = std::move(balls);
        s.finalize();
        return s;
    }

    static ShapeSpec difference(std::vector<Ball> balls, std::vector<Ball> holes) {
        if (balls.empty()) throw ValidationError("ShapeSpec: empty difference base");
        ShapeSpec s;
        s.kind_ = Kind::Difference;
        s.positive_ = std::move(balls);
        s.negative_ = std::move(holes);
        s.finalize();
        return s;
    }

    Kind kind() const { return kind_; }
    int dimension() const { return static_cast<int>(positive_[0].center.size()); }
    const std::vector<Ball>& balls() const { return positive_; }
    const std::vector<Ball>& holes() const { return negative_; }

    bool contains(const Vector& x) const {
        for (const Ball& h : negative_)
            if ((x - h.center).norm() < h.radius) return false;
        for (const Ball& b : positive_)
            if ((x - b.center).norm() <= b.radius) return true;
        return false;
    }

    /// Distance to the boundary, exact for ball and annulus, a component-wise
    /// lower-bound surrogate for unions and differences.
    double boundary_distance(const Vector& x) const {
        double dist = std::numeric_limits<double>::infinity();
        for (const Ball& b : positive_)
            dist = std::min(dist, std::abs(b.radius - (x - b.center).norm()));
        for (const Ball& h : negative_)
            dist = std::min(dist, std::abs((x - h.center).norm() - h.radius));
        return dist;
    }

    double diameter() const { return diam_; }

    /// Rolling-ball radius; analytic for ball and annulus, a conservative value
    /// (smallest constituent radius) otherwise.
    double rolling_radius() const { return rolling_radius_; }

    /// C_S = 2 * boundary measure, when analytically known (ball, annulus in
    /// dimension 2).  Empty otherwise.
    std::optional<double> boundary_constant() const { return c_s_; }

    /// Axis-aligned bounding box, rows (lo, hi) per axis.
    std::pair<Vector, Vector> bounding_box() const { return {lo_, hi_}; }

    /// Bounding box inflated by the given fraction per side.
    std::pair<Vector, Vector> study_box(double inflate = 0.5) const {
        Vector half = (hi_ - lo_) * (inflate / 2.0);
        return {lo_ - half, hi_ + half};
    }

    /// Maximum of d(x, boundary) over the shape; used to normalize the
    /// rejection sampler's density.
    double max_boundary_distance() const { return max_bdist_; }

private:
    void finalize() {
        const int p = dimension();
        lo_ = Vector::Constant(p, std::numeric_limits<double>::infinity());
        hi_ = Vector::Constant(p, -std::numeric_limits<double>::infinity());
        for (const Ball& b : positive_) {
            if (b.radius <= 0) throw ValidationError("ShapeSpec: ball radius must be > 0");
            if (b.center.size() != p) throw ValidationError("ShapeSpec: mixed dimensions");
            lo_ = lo_.cwiseMin(b.center.array().matrix() - Vector::Constant(p, b.radius));
            hi_ = hi_.cwiseMax(b.center.array().matrix() + Vector::Constant(p, b.radius));
        }
        diam_ = 0.0;
        for (const Ball& a : positive_)
            for (const Ball& b : positive_)
                diam_ = std::max(diam_, (a.center - b.center).norm() + a.radius + b.radius);

        switch (kind_) {
            case Kind::Ball: {
                const double rho = positive_[0].radius;
                rolling_radius_ = rho;
                max_bdist_ = rho;
                if (dimension() == 2) c_s_ = 2.0 * 2.0 * M_PI * rho;
                break;
            }
            case Kind::Annulus: {
                const double rin = negative_[0].radius, rout = positive_[0].radius;
                rolling_radius_ = std::min((rout - rin) / 2.0, rin);
                max_bdist_ = (rout - rin) / 2.0;
                if (dimension() == 2) c_s_ = 2.0 * 2.0 * M_PI * (rin + rout);
                break;
            }
            default: {
                double rmin = std::numeric_limits<double>::infinity();
                double rmax = 0.0;
                for (const Ball& b : positive_) {
                    rmin = std::min(rmin, b.radius);
                    rmax = std::max(rmax, b.radius);
                }
                rolling_radius_ = rmin;
                max_bdist_ = rmax;
                break;
            }
        }
    }

    Kind kind_ = Kind::Ball;
    std::vector<Ball> positive_;
    std::vector<Ball> negative_;
    Vector lo_, hi_;
    double diam_ = 0.0;
    double rolling_radius_ = 0.0;
    double max_bdist_ = 0.0;
    std::optional<double> c_s_;
};

class ShapeTooThinError : public NumericalError {
public:
    explicit ShapeTooThinError(const std::string& what) : NumericalError(what) {}
};

/// i.i.d. points from the density proportional to d(x, boundary)^r on the
/// shape, by rejection against the bounding box.  r = 0 is exactly uniform.
inline Matrix sample_shape(const ShapeSpec& shape, std::size_t n, double r, std::uint64_t seed) {
    if (r < 0) throw ValidationError("sample_shape: r must be >= 0");
    const int p = shape.dimension();
    auto [lo, hi] = shape.bounding_box();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double max_density = std::pow(shape.max_boundary_distance(), r);
    Matrix out(static_cast<Eigen::Index>(n), p);
    std::size_t accepted = 0, tried = 0;
    Vector x(p);
    while (accepted < n) {
        for (int i = 0; i < p; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
        const double u = (r > 0) ? unit(rng) : 0.0;
        ++tried;
        if (!shape.contains(x)) continue;
        if (r > 0 && u * max_density > std::pow(shape.boundary_distance(x), r)) continue;
        out.row(static_cast<Eigen::Index>(accepted++)) = x.transpose();
        if (tried >= 10000 && static_cast<double>(accepted) / tried < 1e-4)
            throw ShapeTooThinError("sample_shape: acceptance rate below 1e-4");
    }
    return out;
}

// Occupancy grid over cell centers of an axis-aligned box.
struct Raster {
    Vector lo, hi;
    std::vector<int> resolution;     // cells per axis
    std::vector<std::uint8_t> occupancy;  // row-major, axis 0 fastest
    double cell_volume = 0.0;

    int dimension() const { return static_cast<int>(resolution.size()); }

    std::size_t cell_count() const {
        std::size_t c = 1;
        for (int r : resolution) c *= static_cast<std::size_t>(r);
        return c;
    }

    Vector cell_center(std::size_t flat) const {
        const int p = dimension();
        Vector x(p);
        for (int i = 0; i < p; ++i) {
            const std::size_t res = static_cast<std::size_t>(resolution[static_cast<std::size_t>(i)]);
            const std::size_t idx = flat % res;
            flat /= res;
            x[i] = lo[i] + (hi[i] - lo[i]) * (static_cast<double>(idx) + 0.5) /
                               static_cast<double>(res);
        }
        return x;
    }

    std::size_t occupied_count() const {
        std::size_t c = 0;
        for (std::uint8_t o : occupancy) c += o;
        return c;
    }

    double measure() const { return static_cast<double>(occupied_count()) * cell_volume; }

    bool same_grid(const Raster& o) const {
        return resolution == o.resolution && lo.isApprox(o.lo) && hi.isApprox(o.hi);
    }
};

inline Raster rasterize(const std::function<bool(const Vector&)>& predicate, const Vector& lo,
                        const Vector& hi, const std::vector<int>& resolution) {
    const int p = static_cast<int>(resolution.size());
    if (lo.size() != p || hi.size() != p)
        throw ValidationError("rasterize: box/resolution dimension mismatch");
    std::size_t cells = 1;
    double volume = 1.0;
    for (int i = 0; i < p; ++i) {
        if (resolution[static_cast<std::size_t>(i)] < 2)
            throw ValidationError("rasterize: resolution must be >= 2 per axis");
        if (hi[i] <= lo[i]) throw ValidationError("rasterize: empty box");
        cells *= static_cast<std::size_t>(resolution[static_cast<std::size_t>(i)]);
        volume *= hi[i] - lo[i];
    }
    if (cells > (std::size_t{1} << 28))
        throw ValidationError("rasterize: cell count exceeds memory budget");
    Raster raster;
    raster.lo = lo;
    raster.hi = hi;
    raster.resolution = resolution;
    raster.cell_volume = volume / static_cast<double>(cells);
    raster.occupancy.resize(cells);
    for (std::size_t f = 0; f < cells; ++f)
        raster.occupancy[f] = predicate(raster.cell_center(f)) ? 1 : 0;
    return raster;
}

/// Convenience overload for a uniform per-axis resolution.
inline Raster rasterize(const std::function<bool(const Vector&)>& predicate, const Vector& lo,
                        const Vector& hi, int resolution) {
    return rasterize(predicate, lo, hi,
                     std::vector<int>(static_cast<std::size_t>(lo.size()), resolution));
}

/// Batched variant: the evaluator scores whole chunks of cell centers at once,
/// which keeps triangular solves and basis evaluations BLAS-shaped.
inline Raster rasterize_batch(const std::function<Vector(const Matrix&)>& scores,
                              double threshold, const Vector& lo, const Vector& hi,
                              const std::vector<int>& resolution) {
    Raster raster = rasterize([](const Vector&) { return false; }, lo, hi, resolution);
    const std::size_t cells = raster.cell_count();
    const std::size_t chunk = 8192;
    const int p = raster.dimension();
    for (std::size_t base = 0; base < cells; base += chunk) {
        const std::size_t count = std::min(chunk, cells - base);
        Matrix centers(static_cast<Eigen::Index>(count), p);
        for (std::size_t k = 0; k < count; ++k)
            centers.row(static_cast<Eigen::Index>(k)) = raster.cell_center(base + k).transpose();
        const Vector values = scores(centers);
        if (static_cast<std::size_t>(values.size()) != count)
            throw ValidationError("rasterize_batch: evaluator returned wrong count");
        for (std::size_t k = 0; k < count; ++k)
            raster.occupancy[base + k] = values[static_cast<Eigen::Index>(k)] >= threshold ? 1 : 0;
    }
    return raster;
}

inline Raster rasterize_batch(const std::function<Vector(const Matrix&)>& scores,
                              double threshold, const Vector& lo, const Vector& hi,
                              int resolution) {
    return rasterize_batch(scores, threshold, lo, hi,
                           std::vector<int>(static_cast<std::size_t>(lo.size()), resolution));
}

/// Cells occupied in A with at least one unoccupied axis-neighbor; out-of-box
/// counts as unoccupied, so a full raster's boundary is the box edge.
inline Raster boundary_cells(const Raster& A) {
    if (A.occupied_count() == 0) throw ValidationError("boundary_cells: empty raster");
    Raster out = A;
    std::fill(out.occupancy.begin(), out.occupancy.end(), 0);
    const int p = A.dimension();
    std::vector<std::size_t> stride(static_cast<std::size_t>(p), 1);
    for (int i = 1; i < p; ++i)
        stride[static_cast<std::size_t>(i)] =
            stride[static_cast<std::size_t>(i - 1)] *
            static_cast<std::size_t>(A.resolution[static_cast<std::size_t>(i - 1)]);
    const std::size_t cells = A.cell_count();
    std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
    for (std::size_t f = 0; f < cells; ++f) {
        if (A.occupancy[f]) {
            bool boundary = false;
            for (int i = 0; i < p && !boundary; ++i) {
                const std::size_t ii = static_cast<std::size_t>(i);
                const std::size_t res = static_cast<std::size_t>(A.resolution[ii]);
                if (idx[ii] == 0 || !A.occupancy[f - stride[ii]]) boundary = true;
                else if (idx[ii] + 1 == res || !A.occupancy[f + stride[ii]]) boundary = true;
            }
            out.occupancy[f] = boundary ? 1 : 0;
        }
        for (int i = 0; i < p; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            if (++idx[ii] < static_cast<std::size_t>(A.resolution[ii])) break;
            idx[ii] = 0;
        }
    }
    return out;
}

namespace detail {
/// sup over occupied cells of A of the distance to the nearest occupied cell
/// of B.  Only cells of A outside B contribute; their nearest cell of B lies
/// on B's inner boundary.
inline double directed_hausdorff(const Raster& A, const Raster& B) {
    std::vector<Vector> candidates;
    for (std::size_t f = 0; f < A.cell_count(); ++f)
        if (A.occupancy[f] && !B.occupancy[f]) candidates.push_back(A.cell_center(f));
    if (candidates.empty()) return 0.0;
    const Raster bnd = boundary_cells(B);
    std::vector<Vector> targets;
    for (std::size_t f = 0; f < bnd.cell_count(); ++f)
        if (bnd.occupancy[f]) targets.push_back(bnd.cell_center(f));
    double worst = 0.0;
    for (const Vector& c : candidates) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vector& t : targets) best = std::min(best, (c - t).squaredNorm());
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}
}  // namespace detail

/// Discrete Hausdorff distance over occupied cell centers.  Error relative to
/// the continuous quantity is at most one cell diagonal for well-resolved sets.
inline double hausdorff_distance(const Raster& A, const Raster& B) {
    if (!A.same_grid(B)) throw ValidationError("hausdorff_distance: grid mismatch");
    if (A.occupied_count() == 0 || B.occupied_count() == 0)
        throw ValidationError("hausdorff_distance: undefined for empty raster");
    return std::max(detail::directed_hausdorff(A, B), detail::directed_hausdorff(B, A));
}

/// Lebesgue measure of the symmetric difference: XOR cell count * cell volume.
inline double symdiff_measure(const Raster& A, const Raster& B) {
    if (!A.same_grid(B)) throw ValidationError("symdiff_measure: grid mismatch");
    std::size_t count = 0;
    for (std::size_t f = 0; f < A.cell_count(); ++f)
        if (A.occupancy[f] != B.occupancy[f]) ++count;
    return static_cast<double>(count) * A.cell_volume;
}

struct GeometryReport {
    double hausdorff = 0.0;
    double boundary_hausdorff = 0.0;
    double symdiff = 0.0;
    int resolution = 0;
};

inline GeometryReport compare_rasters(const Raster& estimate, const Raster& truth) {
    GeometryReport rep;
    rep.hausdorff = hausdorff_distance(estimate, truth);
    rep.boundary_hausdorff = hausdorff_distance(boundary_cells(estimate), boundary_cells(truth));
    rep.symdiff = symdiff_measure(estimate, truth);
    rep.resolution = truth.resolution[0];
    return rep;
}

using Polyline = std::vector<std::array<double, 2>>;

/// Marching squares over the occupancy field at cell centers (2-D only).  The
/// grid is padded with an unoccupied ring so every contour closes.  Ambiguous
/// saddles use the connect-high rule: the two occupied corners are joined.
inline std::vector<Polyline> contour_polylines(const Raster& A) {
    if (A.dimension() != 2)
        throw ValidationError("contour_polylines: only 2-D rasters supported");
    const int nx = A.resolution[0], ny = A.resolution[1];
    const double dx = (A.hi[0] - A.lo[0]) / nx, dy = (A.hi[1] - A.lo[1]) / ny;
    // padded occupancy lookup, (-1..nx, -1..ny)
    auto occ = [&](int i, int j) -> bool {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
        return A.occupancy[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                           static_cast<std::size_t>(i)] != 0;
    };
    auto center = [&](int i, int j) -> std::array<double, 2> {
        return {A.lo[0] + (i + 0.5) * dx, A.lo[1] + (j + 0.5) * dy};
    };
    // Edge key between centers (i,j) and its +x or +y neighbor.
    struct EdgeKey {
        int i, j, dir;  // dir 0: horizontal (+x), 1: vertical (+y)
        bool operator<(const EdgeKey& o) const {
            return std::tie(i, j, dir) < std::tie(o.i, o.j, o.dir);
        }
    };
    auto edge_point = [&](const EdgeKey& e) -> std::array<double, 2> {
        auto c = center(e.i, e.j);
        if (e.dir == 0) c[0] += 0.5 * dx;
        else c[1] += 0.5 * dy;
        return c;
    };
    // Segments between midpoints of crossed edges.  Every crossed edge is
    // shared by exactly two cells, each contributing one segment end, so each
    // edge point has degree exactly 2 and loops are uniquely determined.
    std::vector<std::pair<EdgeKey, EdgeKey>> segments;
    std::map<EdgeKey, std::vector<std::size_t>> incident;
    auto link = [&](const EdgeKey& a, const EdgeKey& b) {
        incident[a].push_back(segments.size());
        incident[b].push_back(segments.size());
        segments.emplace_back(a, b);
    };
    for (int j = -1; j < ny; ++j) {
        for (int i = -1; i < nx; ++i) {
            const bool a = occ(i, j), b = occ(i + 1, j), c = occ(i + 1, j + 1), d = occ(i, j + 1);
            const int code = (a ? 1 : 0) | (b ? 2 : 0) | (c ? 4 : 0) | (d ? 8 : 0);
            const EdgeKey south{i, j, 0}, east{i + 1, j, 1}, north{i, j + 1, 0}, west{i, j, 1};
            switch (code) {
                case 0: case 15: break;
                case 1: case 14: link(south, west); break;
                case 2: case 13: link(south, east); break;
                case 3: case 12: link(west, east); break;
                case 4: case 11: link(east, north); break;
                case 6: case 9: link(south, north); break;
                case 7: case 8: link(west, north); break;
                case 5:  // occupied at a and c: connect-high
                    link(south, east);
                    link(west, north);
                    break;
                case 10:  // occupied at b and d: connect-high
                    link(south, west);
                    link(east, north);
                    break;
            }
        }
    }
    // Trace closed loops by consuming segments.
    std::vector<Polyline> rings;
    std::vector<bool> used(segments.size(), false);
    for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        Polyline ring;
        const EdgeKey start = segments[s0].first;
        EdgeKey cur = start;
        ring.push_back(edge_point(cur));
        std::size_t seg = s0;
        while (true) {
            used[seg] = true;
            cur = (segments[seg].first < cur || cur < segments[seg].first) ? segments[seg].first
                                                                          : segments[seg].second;
            ring.push_back(edge_point(cur));
            if (!(cur < start) && !(start < cur)) break;
            std::size_t next = segments.size();
            for (std::size_t cand : incident.at(cur))
                if (!used[cand]) next = cand;
            if (next == segments.size()) break;  // degenerate, should not happen
            seg = next;
        }
        rings.push_back(std::move(ring));
    }
    return rings;
}

// --- Export helpers ----------------------------------------------------------

inline void write_raster_text(const Raster& A, std::ostream& os) {
    os << "raster " << A.dimension();
    for (int r : A.resolution) os << " " << r;
    os << "\n";
    if (A.dimension() == 2) {
        const int nx = A.resolution[0], ny = A.resolution[1];
        for (int j = ny - 1; j >= 0; --j) {
            for (int i = 0; i < nx; ++i)
                os << (A.occupancy[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                                   static_cast<std::size_t>(i)]
                           ? '#'
                           : '.');
            os << "\n";
        }
    }
}

inline void write_occupied_centers_csv(const Raster& A, std::ostream& os) {
    for (std::size_t f = 0; f < A.cell_count(); ++f) {
        if (!A.occupancy[f]) continue;
        const Vector c = A.cell_center(f);
        for (Eigen::Index i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
        os << "\n";
    }
}

inline void write_polylines_csv(const std::vector<Polyline>& rings, std::ostream& os) {
    os << "x,y,ring\n";
    for (std::size_t r = 0; r < rings.size(); ++r)
        for (const auto& pt : rings[r]) os << pt[0] << "," << pt[1] << "," << r << "\n";
}

}  // namespace chsup
