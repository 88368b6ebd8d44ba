#include "motility/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "motility/csv.hpp"
#include "motility/errors.hpp"

namespace motility {

namespace {

inline int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

}  // namespace

Vec2 stencil_d1(std::span<const Vec2> pts, int i, double h) {
    const int n = static_cast<int>(pts.size());
    const Vec2& m2 = pts[wrap(i - 2, n)];
    const Vec2& m1 = pts[wrap(i - 1, n)];
    const Vec2& p1 = pts[wrap(i + 1, n)];
    const Vec2& p2 = pts[wrap(i + 2, n)];
    const double s = 1.0 / (12.0 * h);
    return {(-p2.x + 8.0 * p1.x - 8.0 * m1.x + m2.x) * s,
            (-p2.y + 8.0 * p1.y - 8.0 * m1.y + m2.y) * s};
}

Vec2 stencil_d2(std::span<const Vec2> pts, int i, double h) {
    const int n = static_cast<int>(pts.size());
    const Vec2& m2 = pts[wrap(i - 2, n)];
    const Vec2& m1 = pts[wrap(i - 1, n)];
    const Vec2& p0 = pts[wrap(i, n)];
    const Vec2& p1 = pts[wrap(i + 1, n)];
    const Vec2& p2 = pts[wrap(i + 2, n)];
    const double s = 1.0 / (12.0 * h * h);
    return {(-p2.x + 16.0 * p1.x - 30.0 * p0.x + 16.0 * m1.x - m2.x) * s,
            (-p2.y + 16.0 * p1.y - 30.0 * p0.y + 16.0 * m1.y - m2.y) * s};
}

double curvature_at(std::span<const Vec2> pts, int i, double h) {
    const Vec2 d = stencil_d1(pts, i, h);
    const Vec2 dd = stencil_d2(pts, i, h);
    const double len = norm(d);
    if (!(len > 1e-150)) {
        throw DegenerateTangent("curvature_at: zero tangent at node " + std::to_string(i));
    }
    return cross(d, dd) / (len * len * len);
}

double shoelace_signed(std::span<const Vec2> pts) {
    const int n = static_cast<int>(pts.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[wrap(i + 1, n)];
        acc += cross(a, b);
    }
    return 0.5 * acc;
}

double polygon_length(std::span<const Vec2> pts) {
    const int n = static_cast<int>(pts.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += norm(pts[wrap(i + 1, n)] - pts[i]);
    return acc;
}

Vec2 polygon_centroid(std::span<const Vec2> pts) {
    const int n = static_cast<int>(pts.size());
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[wrap(i + 1, n)];
        const double w = cross(p, q);
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    if (std::abs(a) < 1e-300) throw std::invalid_argument("polygon_centroid: degenerate polygon");
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

std::vector<CubicSample> resample_map(std::span<const Vec2> pts, int n_new) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw std::invalid_argument("resample_map: need at least 4 points");
    if (n_new < 4) throw std::invalid_argument("resample_map: need at least 4 targets");

    std::vector<double> s(n + 1);
    s[0] = 0.0;
    for (int i = 0; i < n; ++i) s[i + 1] = s[i] + norm(pts[wrap(i + 1, n)] - pts[i]);
    const double total = s[n];
    if (!(total > 0.0)) throw std::invalid_argument("resample_map: zero-length polygon");

    std::vector<CubicSample> map(n_new);
    int seg = 0;
    for (int k = 0; k < n_new; ++k) {
        const double t = total * (static_cast<double>(k) / n_new);
        while (seg + 1 < n && s[seg + 1] <= t) ++seg;
        // Lagrange cubic through the four surrounding nodes, abscissas taken
        // from the (wrapped) cumulative chord length around segment `seg`.
        const double a0 = s[seg] - norm(pts[seg] - pts[wrap(seg - 1, n)]);
        const double a1 = s[seg];
        const double a2 = s[seg + 1];
        const double a3 = s[seg + 1] + norm(pts[wrap(seg + 2, n)] - pts[wrap(seg + 1, n)]);
        CubicSample& cs = map[k];
        cs.idx[0] = wrap(seg - 1, n);
        cs.idx[1] = seg;
        cs.idx[2] = wrap(seg + 1, n);
        cs.idx[3] = wrap(seg + 2, n);
        const double ab[4] = {a0, a1, a2, a3};
        for (int m = 0; m < 4; ++m) {
            double w = 1.0;
            for (int l = 0; l < 4; ++l) {
                if (l != m) w *= (t - ab[l]) / (ab[m] - ab[l]);
            }
            cs.w[m] = w;
        }
    }
    return map;
}

std::vector<Vec2> apply_resample(std::span<const Vec2> pts, std::span<const CubicSample> map) {
    std::vector<Vec2> out(map.size());
    for (std::size_t k = 0; k < map.size(); ++k) {
        const CubicSample& cs = map[k];
        Vec2 acc{0.0, 0.0};
        for (int m = 0; m < 4; ++m) acc += cs.w[m] * pts[cs.idx[m]];
        out[k] = acc;
    }
    return out;
}

std::vector<double> apply_resample(std::span<const double> values,
                                   std::span<const CubicSample> map) {
    std::vector<double> out(map.size());
    for (std::size_t k = 0; k < map.size(); ++k) {
        const CubicSample& cs = map[k];
        out[k] = cs.w[0] * values[cs.idx[0]] + cs.w[1] * values[cs.idx[1]] +
                 cs.w[2] * values[cs.idx[2]] + cs.w[3] * values[cs.idx[3]];
    }
    return out;
}

namespace {

// Strict segment crossing via orientation signs; shared endpoints and
// collinear touches do not count.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 &&
           d3 != 0.0 && d4 != 0.0;
}

}  // namespace

bool polygon_self_intersects(std::span<const Vec2> pts) {
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[wrap(i + 1, n)];
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent around the seam
            if (segments_cross(a, b, pts[j], pts[wrap(j + 1, n)])) return true;
        }
    }
    return false;
}

DiscreteCurve::DiscreteCurve(std::vector<Vec2> pts) : pts_(std::move(pts)) {
    const int n = size();
    if (n < 8) throw std::invalid_argument("DiscreteCurve: need at least 8 points");
    for (int i = 0; i < n; ++i) {
        const Vec2 seg = pts_[wrap(i + 1, n)] - pts_[i];
        if (!(dot(seg, seg) > 0.0)) {
            throw std::invalid_argument("DiscreteCurve: coincident neighbors at node " +
                                        std::to_string(i));
        }
    }
    const double a = shoelace_signed(pts_);
    if (a == 0.0) throw std::invalid_argument("DiscreteCurve: degenerate (zero area) loop");
    if (a < 0.0) std::reverse(pts_.begin() + 1, pts_.end());  // flip to CCW, keep anchor
}

DiscreteCurve DiscreteCurve::circle(double radius, int n, Vec2 center) {
    if (!(radius > 0.0)) throw std::invalid_argument("DiscreteCurve: radius must be > 0");
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        pts[i] = {center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
    }
    return DiscreteCurve(std::move(pts));
}

DiscreteCurve DiscreteCurve::ellipse(double rx, double ry, int n, Vec2 center) {
    if (!(rx > 0.0) || !(ry > 0.0)) throw std::invalid_argument("DiscreteCurve: radii must be > 0");
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        pts[i] = {center.x + rx * std::cos(a), center.y + ry * std::sin(a)};
    }
    return DiscreteCurve(std::move(pts));
}

const Vec2& DiscreteCurve::operator[](int i) const { return pts_[wrap(i, size())]; }

Vec2 DiscreteCurve::inward_normal(int i) const {
    const Vec2 t = d1(i);
    const double len = norm(t);
    if (!(len > 1e-150)) {
        throw DegenerateTangent("inward_normal: zero tangent at node " + std::to_string(i));
    }
    return {-t.y / len, t.x / len};
}

double DiscreteCurve::area() const { return std::abs(shoelace_signed(pts_)); }

double DiscreteCurve::isoperimetric_quotient() const {
    const double l = length();
    return 4.0 * std::numbers::pi * area() / (l * l);
}

double DiscreteCurve::diameter() const {
    const int n = size();
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const Vec2 d = pts_[j] - pts_[i];
            best = std::max(best, dot(d, d));
        }
    }
    return std::sqrt(best);
}

DiscreteCurve DiscreteCurve::resample_equal_arclength(int n_new) const {
    const auto map = resample_map(pts_, n_new);
    return DiscreteCurve(apply_resample(pts_, map));
}

void DiscreteCurve::update_points(std::vector<Vec2> pts) {
    if (pts.size() != pts_.size()) {
        throw std::invalid_argument("update_points: node count must stay fixed");
    }
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i < n; ++i) {
        const Vec2 seg = pts[wrap(i + 1, n)] - pts[i];
        if (!(dot(seg, seg) > 0.0)) {
            throw NumericsError("update_points: coincident neighbors at node " +
                                std::to_string(i));
        }
    }
    if (!(shoelace_signed(pts) > 0.0)) {
        throw NumericsError("update_points: loop lost its counterclockwise orientation");
    }
    pts_ = std::move(pts);
}

void write_curve_csv(std::span<const Vec2> pts, const std::filesystem::path& path) {
    const std::string header[] = {"x", "y"};
    std::vector<std::vector<double>> rows;
    rows.reserve(pts.size());
    for (const Vec2& p : pts) rows.push_back({p.x, p.y});
    write_csv(path, header, rows);
}

std::vector<Vec2> read_curve_csv(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    const std::size_t cx = t.column("x"), cy = t.column("y");
    std::vector<Vec2> pts;
    pts.reserve(t.rows.size());
    for (const auto& r : t.rows) pts.push_back({r[cx], r[cy]});
    return pts;
}

}  // namespace motility
