#include "motility/travelwave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "motility/errors.hpp"
#include "motility/geometry.hpp"
#include "motility/quadrature.hpp"

namespace motility {

double ShootingRhs::argument(double w) const {
    const double r = std::sqrt(1.0 + w * w);
    switch (kind) {
        case ArcKind::Back:
            return velocity / r;
        case ArcKind::Front:
            return -velocity / r;
        case ArcKind::Side:
            return -velocity * w / r;
    }
    return 0.0;
}

double ShootingRhs::operator()(double w) const {
    const double r2 = 1.0 + w * w;
    const double s = argument(w);
    return r2 * std::sqrt(r2) * (s - phi->response(s) + lambda);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dormand-Prince 5(4) tableau for the pair (w, y), w' = rhs(w), y' = w.
struct DpStep {
    double w = 0.0, y = 0.0;   // proposed endpoint
    double err = 0.0;          // weighted error norm (accept when <= 1)
    double fw_end = 0.0;       // rhs at the proposed endpoint (FSAL stage)
    bool finite = true;
};

DpStep dp_trial(const ShootingRhs& rhs, double w, double y, double fw, double h, double rel_tol,
                double abs_tol) {
    const double k1w = fw, k1y = w;
    const double w2 = w + h * (1.0 / 5.0) * k1w;
    const double k2w = rhs(w2);
    const double w3 = w + h * (3.0 / 40.0 * k1w + 9.0 / 40.0 * k2w);
    const double k3w = rhs(w3), k3y = w3;
    const double w4 = w + h * (44.0 / 45.0 * k1w - 56.0 / 15.0 * k2w + 32.0 / 9.0 * k3w);
    const double k4w = rhs(w4), k4y = w4;
    const double w5 = w + h * (19372.0 / 6561.0 * k1w - 25360.0 / 2187.0 * k2w +
                               64448.0 / 6561.0 * k3w - 212.0 / 729.0 * k4w);
    const double k5w = rhs(w5), k5y = w5;
    const double w6 = w + h * (9017.0 / 3168.0 * k1w - 355.0 / 33.0 * k2w +
                               46732.0 / 5247.0 * k3w + 49.0 / 176.0 * k4w -
                               5103.0 / 18656.0 * k5w);
    const double k6w = rhs(w6), k6y = w6;

    DpStep out;
    out.w = w + h * (35.0 / 384.0 * k1w + 500.0 / 1113.0 * k3w + 125.0 / 192.0 * k4w -
                     2187.0 / 6784.0 * k5w + 11.0 / 84.0 * k6w);
    out.y = y + h * (35.0 / 384.0 * k1y + 500.0 / 1113.0 * k3y + 125.0 / 192.0 * k4y -
                     2187.0 / 6784.0 * k5y + 11.0 / 84.0 * k6y);
    if (!std::isfinite(out.w) || !std::isfinite(out.y)) {
        out.finite = false;
        return out;
    }
    const double k7w = rhs(out.w), k7y = out.w;
    out.fw_end = k7w;

    const double ew = h * (71.0 / 57600.0 * k1w - 71.0 / 16695.0 * k3w + 71.0 / 1920.0 * k4w -
                           17253.0 / 339200.0 * k5w + 22.0 / 525.0 * k6w - 1.0 / 40.0 * k7w);
    const double ey = h * (71.0 / 57600.0 * k1y - 71.0 / 16695.0 * k3y + 71.0 / 1920.0 * k4y -
                           17253.0 / 339200.0 * k5y + 22.0 / 525.0 * k6y - 1.0 / 40.0 * k7y);
    const double sw = abs_tol + rel_tol * std::max(std::abs(w), std::abs(out.w));
    const double sy = abs_tol + rel_tol * std::max(std::abs(y), std::abs(out.y));
    out.err = std::sqrt(0.5 * ((ew / sw) * (ew / sw) + (ey / sy) * (ey / sy)));
    if (!std::isfinite(out.err) || !std::isfinite(out.fw_end)) out.finite = false;
    return out;
}

double hermite(double v0, double d0, double v1, double d1, double h, double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * v0 + (s3 - 2.0 * s2 + s) * h * d0 +
           (-2.0 * s3 + 3.0 * s2) * v1 + (s3 - s2) * h * d1;
}

// Fraction of the step [x, x+h] at which the (monotone) cubic interpolant of
// w crosses `target`.
double locate_crossing(double w0, double f0, double w1, double f1, double h, double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (hermite(w0, f0, w1, f1, h, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double grow_shrink(double err) {
    const double fac = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
    return std::clamp(fac, 0.2, 5.0);
}

}  // namespace

ArcSolution shoot_arc(const ShootingRhs& rhs, double w0, double stop_slope,
                      const ShootOptions& opt) {
    if (!(stop_slope > w0)) {
        throw std::invalid_argument("shoot_arc: stop_slope must exceed the initial slope");
    }
    double fw = rhs(w0);
    if (!(fw > 0.0)) {
        throw StalledArc("shoot_arc: rhs not positive at the initial slope w0=" +
                         std::to_string(w0));
    }

    ArcSolution sol;
    sol.x.push_back(0.0);
    sol.y.push_back(0.0);
    sol.w.push_back(w0);

    const bool to_blowup = !std::isfinite(stop_slope);
    const double target = to_blowup ? opt.blowup_w : stop_slope;
    double x = 0.0, w = w0, y = 0.0;
    double h = std::clamp(1e-3 * (1.0 + std::abs(w0)) / fw, 1e-12, 0.1);

    for (int step = 0; step < opt.max_steps; ++step) {
        const DpStep trial = dp_trial(rhs, w, y, fw, h, opt.rel_tol, opt.abs_tol);
        if (!trial.finite || trial.err > 1.0) {
            h *= trial.finite ? grow_shrink(trial.err) : 0.25;
            if (h < 1e-15 * std::max(1.0, std::abs(x))) {
                throw NumericsError("shoot_arc: step size underflow at x=" + std::to_string(x));
            }
            continue;
        }
        if (trial.w >= target) {
            // Passed the event: place it by interpolation inside this step.
            const double s = locate_crossing(w, fw, trial.w, trial.fw_end, h, target);
            sol.x_end = x + s * h;
            sol.y_end = hermite(y, w, trial.y, trial.w, h, s);
            sol.w_end = target;
            sol.x.push_back(sol.x_end);
            sol.y.push_back(sol.y_end);
            sol.w.push_back(sol.w_end);
            sol.reason = to_blowup ? ArcTermination::BlowUp : ArcTermination::SlopeReached;
            return sol;
        }
        if (!(trial.fw_end > 0.0)) {
            throw StalledArc("shoot_arc: rhs root before stop slope (w=" +
                             std::to_string(trial.w) + ")");
        }
        x += h;
        w = trial.w;
        y = trial.y;
        fw = trial.fw_end;
        sol.x.push_back(x);
        sol.y.push_back(y);
        sol.w.push_back(w);
        if (x > opt.max_span) {
            throw SpanExceeded("shoot_arc: span " + std::to_string(x) +
                               " exceeded before reaching the stop slope");
        }
        h *= grow_shrink(trial.err);
    }
    throw NumericsError("shoot_arc: step budget exhausted");
}

double integrate_slope_to(const ShootingRhs& rhs, double w_init, double x_target,
                          const ShootOptions& opt) {
    if (x_target == 0.0) return w_init;
    const double dir = x_target > 0.0 ? 1.0 : -1.0;
    double x = 0.0, w = w_init, y = 0.0;
    double fw = rhs(w);
    double h = dir * std::clamp(1e-3 * (1.0 + std::abs(w)) / std::max(std::abs(fw), 1e-8), 1e-12,
                                0.25 * std::abs(x_target));
    if (h == 0.0) h = dir * 1e-6;

    for (int step = 0; step < opt.max_steps; ++step) {
        bool last = false;
        const double remaining = x_target - x;
        if (std::abs(h) >= std::abs(remaining)) {
            h = remaining;
            last = true;
        }
        const DpStep trial = dp_trial(rhs, w, y, fw, h, opt.rel_tol, opt.abs_tol);
        if (!trial.finite || trial.err > 1.0) {
            h *= trial.finite ? grow_shrink(trial.err) : 0.25;
            if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(x))) {
                // The slope escapes before the target abscissa.
                return std::copysign(kInf, w * dir);
            }
            continue;
        }
        x += h;
        w = trial.w;
        y = trial.y;
        fw = trial.fw_end;
        if (last) return w;
        if (std::abs(w) >= opt.blowup_w) return std::copysign(kInf, w);
        h *= grow_shrink(trial.err);
    }
    throw NumericsError("integrate_slope_to: step budget exhausted");
}

double blowup_abscissa_by_quadrature(const ShootingRhs& rhs, double rel_tol) {
    const auto integrand = [&rhs](double th) {
        const double c = std::cos(th), s = std::sin(th);
        double arg = 0.0;
        switch (rhs.kind) {
            case ArcKind::Back:
                arg = rhs.velocity * c;
                break;
            case ArcKind::Front:
                arg = -rhs.velocity * c;
                break;
            case ArcKind::Side:
                arg = -rhs.velocity * s;
                break;
        }
        const double den = arg - rhs.phi->response(arg) + rhs.lambda;
        if (!(den > 0.0)) {
            throw NonPositiveRhs("blowup_abscissa_by_quadrature: rhs not positive");
        }
        return c / den;
    };
    return integrate_adaptive(integrand, 0.0, 0.5 * std::numbers::pi, rel_tol, 1e-14).value;
}

double lambda_for(double V, const PhiFunction& phi) {
    return 2.0 * phi.response_scale() * phi.sup_abs() + V;
}

double closure_functional_i2(double V, double lambda, const PhiFunction& phi,
                             const ShootOptions& opt) {
    const ShootingRhs back{ArcKind::Back, V, lambda, &phi};
    const ShootingRhs side{ArcKind::Side, V, lambda, &phi};
    const ShootingRhs front{ArcKind::Front, V, lambda, &phi};
    const ArcSolution b = shoot_arc(back, 0.0, 1.0, opt);
    const ArcSolution s = shoot_arc(side, -1.0, 1.0, opt);
    return integrate_slope_to(front, -1.0, b.x_end - s.y_end, opt);
}

double integral_criterion(double V, const PhiFunction& phi, double rel_tol) {
    if (!(V > 0.0)) throw std::invalid_argument("integral_criterion: requires V > 0");
    const double lambda = lambda_for(V, phi);
    const auto integrand = [&](double th) {
        const double z = V * std::sin(th);
        const double pz = phi.response(z), pm = phi.response(-z);
        const double d1 = z - pz + lambda;
        const double d2 = -z - pm + lambda;
        if (!(d1 > 0.0) || !(d2 > 0.0)) {
            throw NonPositiveRhs("integral_criterion: denominator not positive");
        }
        return z * (2.0 * z + pm - pz) / (d1 * d2);
    };
    const QuadResult q = integrate_adaptive(integrand, 0.0, 0.5 * std::numbers::pi, rel_tol, 1e-14);
    return q.value / V;
}

TravelingWaveProfile assemble_profile(double V, double lambda, const PhiFunction& phi,
                                      int n_points, const ShootOptions& opt) {
    if (n_points < 8) throw std::invalid_argument("assemble_profile: need n_points >= 8");
    const ShootingRhs back{ArcKind::Back, V, lambda, &phi};
    const ShootingRhs side{ArcKind::Side, V, lambda, &phi};
    const ShootingRhs front{ArcKind::Front, V, lambda, &phi};

    const ArcSolution b = shoot_arc(back, 0.0, 1.0, opt);
    const ArcSolution s = shoot_arc(side, -1.0, 1.0, opt);
    const ArcSolution f = shoot_arc(front, -1.0, 0.0, opt);  // up to the apex

    const double xi_star = b.x_end - s.y_end;  // abscissa where closure demands the apex

    // Map every arc back into the frame of the back arc.  Each quarter-turn
    // rotation sends local (u, s) to (-s, u) relative to the previous arc's
    // endpoint.
    std::vector<Vec2> right;
    right.reserve(b.x.size() + s.x.size() + f.x.size());
    for (std::size_t i = 0; i < b.x.size(); ++i) right.push_back({b.x[i], b.y[i]});
    for (std::size_t i = 1; i < s.x.size(); ++i) {
        right.push_back({b.x_end - s.y[i], b.y_end + s.x[i]});
    }
    for (std::size_t i = 1; i < f.x.size(); ++i) {
        right.push_back({xi_star - f.x[i], b.y_end + s.x_end - f.y[i]});
    }

    // Drop near-duplicate neighbors that event truncation can produce.
    const double scale = std::max({std::abs(b.x_end), std::abs(b.y_end + s.x_end), 1e-6});
    const double min_sep2 = (1e-12 * scale) * (1e-12 * scale);
    std::vector<Vec2> half;
    half.reserve(right.size());
    for (const Vec2& p : right) {
        if (half.empty()) {
            half.push_back(p);
            continue;
        }
        const Vec2 d = p - half.back();
        if (dot(d, d) > min_sep2) half.push_back(p);
    }
    if (half.size() < 4) throw NumericsError("assemble_profile: degenerate half profile");

    // Mirror across the symmetry axis x = 0 (interior samples only, reversed,
    // so the polygon stays counterclockwise).
    std::vector<Vec2> full = half;
    for (std::size_t i = half.size() - 1; i-- > 1;) full.push_back({-half[i].x, half[i].y});

    TravelingWaveProfile prof;
    prof.velocity = V;
    prof.lambda = lambda;
    prof.closure_gap = 2.0 * std::abs(xi_star - f.x_end);
    prof.closure_residual = std::abs(integrate_slope_to(front, -1.0, xi_star, opt));
    DiscreteCurve curve(std::move(full));
    prof.points = curve.resample_equal_arclength(n_points).points();
    return prof;
}

TwSearchResult find_traveling_waves(const PhiFunction& phi, double v_lo, double v_hi, int nv,
                                    double l_lo, double l_hi, int nl, int profile_points,
                                    const ShootOptions& opt) {
    if (!(v_lo < v_hi) || !(l_lo < l_hi)) {
        throw std::invalid_argument("find_traveling_waves: ranges must be nondegenerate");
    }
    if (nv < 8 || nl < 8) {
        throw std::invalid_argument("find_traveling_waves: grid must be at least 8x8");
    }

    TwSearchResult res;
    res.landscape.reserve(static_cast<std::size_t>(nv) * nl);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (int i = 0; i < nv; ++i) {
        const double v = v_lo + (v_hi - v_lo) * i / (nv - 1);
        std::vector<double> row(nl, nan);
        for (int j = 0; j < nl; ++j) {
            const double lam = l_lo + (l_hi - l_lo) * j / (nl - 1);
            try {
                row[j] = closure_functional_i2(v, lam, phi, opt);
            } catch (const NumericsError&) {
                row[j] = nan;
            }
            res.landscape.push_back({v, lam, row[j]});
        }
        for (int j = 0; j + 1 < nl; ++j) {
            double a = l_lo + (l_hi - l_lo) * j / (nl - 1);
            double bb = l_lo + (l_hi - l_lo) * (j + 1) / (nl - 1);
            double fa = row[j], fb = row[j + 1];
            if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
            if ((fa < 0.0) == (fb < 0.0)) continue;
            double root = nan;
            bool failed = false;
            for (int iter = 0; iter < 200; ++iter) {
                const double mid = 0.5 * (a + bb);
                double fm;
                try {
                    fm = closure_functional_i2(v, mid, phi, opt);
                } catch (const NumericsError&) {
                    failed = true;
                    break;
                }
                if (!std::isfinite(fm)) {
                    failed = true;
                    break;
                }
                if (std::abs(fm) <= 1e-8 || bb - a < 1e-13 * std::max(1.0, std::abs(mid))) {
                    root = mid;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    bb = mid;
                    fb = fm;
                }
            }
            if (failed || !std::isfinite(root)) continue;
            try {
                res.roots.push_back(assemble_profile(v, root, phi, profile_points, opt));
            } catch (const NumericsError&) {
                // Root sits on the edge of arc validity; skip it.
            }
        }
    }
    return res;
}

}  // namespace motility
