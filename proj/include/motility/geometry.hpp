#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "motility/vec2.hpp"

namespace motility {

// Discrete closed curves are uniform samplings p_0..p_{N-1} (first point not
// repeated) of a closed loop, parametrized on [0,1) with spacing h = 1/N.
// Derivatives below are the periodic five-point stencils in that parameter.

Vec2 stencil_d1(std::span<const Vec2> pts, int i, double h);
Vec2 stencil_d2(std::span<const Vec2> pts, int i, double h);

// Signed curvature cross(p', p'') / |p'|^3; positive where the curve bends
// counterclockwise.  Throws DegenerateTangent when |p'| vanishes.
double curvature_at(std::span<const Vec2> pts, int i, double h);

// Signed polygon area (positive for counterclockwise orientation).
double shoelace_signed(std::span<const Vec2> pts);
double polygon_length(std::span<const Vec2> pts);
Vec2 polygon_centroid(std::span<const Vec2> pts);

// One target node of a cubic (four-point Lagrange) resampling in cumulative
// chord length; weights apply to any per-node quantity, so curve points and
// attached fields stay in lockstep.
struct CubicSample {
    int idx[4];
    double w[4];
};

// Equal-arclength resampling map for a closed polygon: n_new targets at
// arclength k * S / n_new, the first anchored at p_0.
std::vector<CubicSample> resample_map(std::span<const Vec2> pts, int n_new);

std::vector<Vec2> apply_resample(std::span<const Vec2> pts, std::span<const CubicSample> map);
std::vector<double> apply_resample(std::span<const double> values,
                                   std::span<const CubicSample> map);

// Proper crossing test over all non-adjacent segment pairs (O(N^2)).
bool polygon_self_intersects(std::span<const Vec2> pts);

class DiscreteCurve {
  public:
    // Takes ownership of the points, validates (N >= 8, no coincident
    // neighbors, nonzero area), and reverses into counterclockwise
    // orientation if handed a clockwise loop.
    explicit DiscreteCurve(std::vector<Vec2> pts);

    static DiscreteCurve circle(double radius, int n, Vec2 center = {0.0, 0.0});
    static DiscreteCurve ellipse(double rx, double ry, int n, Vec2 center = {0.0, 0.0});

    int size() const { return static_cast<int>(pts_.size()); }
    double h() const { return 1.0 / size(); }
    const std::vector<Vec2>& points() const { return pts_; }
    const Vec2& operator[](int i) const;  // periodic index

    Vec2 d1(int i) const { return stencil_d1(pts_, i, h()); }
    Vec2 d2(int i) const { return stencil_d2(pts_, i, h()); }
    double curvature(int i) const { return curvature_at(pts_, i, h()); }

    // Unit normal pointing into the enclosed region (the tangent rotated a
    // quarter turn counterclockwise, for the CCW orientation kept here).
    Vec2 inward_normal(int i) const;

    double area() const;  // absolute enclosed area
    double length() const { return polygon_length(pts_); }
    Vec2 centroid() const { return polygon_centroid(pts_); }
    double isoperimetric_quotient() const;  // 4 pi A / L^2, 1 for circles
    double diameter() const;                // largest pairwise distance
    bool self_intersects() const { return polygon_self_intersects(pts_); }

    DiscreteCurve resample_equal_arclength(int n_new) const;

    // Replace the points in place without re-deriving orientation: the new
    // loop must stay counterclockwise (NumericsError otherwise) so that
    // per-node attachments keep their meaning.
    void update_points(std::vector<Vec2> pts);

  private:
    std::vector<Vec2> pts_;
};

void write_curve_csv(std::span<const Vec2> pts, const std::filesystem::path& path);
std::vector<Vec2> read_curve_csv(const std::filesystem::path& path);

}  // namespace motility
