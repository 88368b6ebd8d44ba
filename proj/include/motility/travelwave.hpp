#pragma once

#include <vector>

#include "motility/nonlinearity.hpp"
#include "motility/vec2.hpp"

namespace motility {

// The candidate wave is built from three graph arcs, each integrated in its
// own frame (the plane is rotated a quarter turn clockwise between arcs).
// All three share the slope equation w' = (1+w^2)^{3/2} (s - Phi(s) + lambda),
// where Phi enters as the velocity response (PhiFunction::response), and
// differ only in the normal-speed argument s:
//   Back  : s =  V / sqrt(1+w^2)   (bottom arc, facing the motion)
//   Front : s = -V / sqrt(1+w^2)   (top arc, trailing)
//   Side  : s = -V w / sqrt(1+w^2) (flank, in the rotated frame)
enum class ArcKind { Back, Front, Side };

struct ShootingRhs {
    ArcKind kind = ArcKind::Back;
    double velocity = 0.0;  // V
    double lambda = 0.0;
    const PhiFunction* phi = nullptr;

    // Normal speed argument s for slope w.
    double argument(double w) const;
    // Slope derivative w'(w).
    double operator()(double w) const;
};

enum class ArcTermination { SlopeReached, BlowUp };

struct ArcSolution {
    std::vector<double> x, y, w;  // accepted steps, endpoints included
    double x_end = 0.0, y_end = 0.0, w_end = 0.0;
    ArcTermination reason = ArcTermination::SlopeReached;
};

struct ShootOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_span = 100.0;   // abort (SpanExceeded) past this x extent
    double blowup_w = 1e8;     // slope treated as blown up
    int max_steps = 500000;
};

// Integrate the arc system w' = rhs(w), y' = w from (x,y,w) = (0,0,w0) with
// an adaptive 4th/5th-order pair until w reaches stop_slope (event located by
// cubic interpolation of the final step).  stop_slope = +infinity integrates
// to blow-up and reports the blow-up abscissa in x_end.  Throws StalledArc if
// rhs(w) <= 0 is met first and SpanExceeded past opt.max_span.
ArcSolution shoot_arc(const ShootingRhs& rhs, double w0, double stop_slope,
                      const ShootOptions& opt = {});

// Slope value w(x_target) for the same system started at w(0) = w_init;
// x_target may be negative (backward integration).  A slope blow-up before
// the target abscissa returns +/-infinity with the sign of the escape.
double integrate_slope_to(const ShootingRhs& rhs, double w_init, double x_target,
                          const ShootOptions& opt = {});

// Blow-up abscissa of the arc from slope 0, evaluated as the convergent
// integral of 1/rhs over all slopes (substitution w = tan(angle) makes the
// integrand smooth and bounded).  Throws NonPositiveRhs when the rhs is not
// strictly positive along the way.
double blowup_abscissa_by_quadrature(const ShootingRhs& rhs, double rel_tol = 1e-11);

// The multiplier lambda(V) = 2 sup|response| + V that keeps every arc rhs
// positive.
double lambda_for(double V, const PhiFunction& phi);

// Closure mismatch of the three-arc construction at (V, lambda): the front
// slope sampled where the side arc hands over.  Zero means the half profile
// meets the symmetry axis horizontally, i.e. a closed traveling wave.
// Propagates StalledArc / SpanExceeded from the arcs.
double closure_functional_i2(double V, double lambda, const PhiFunction& phi,
                             const ShootOptions& opt = {});

// Scalar existence criterion at the canonical lambda(V): positive for
// symmetric nonlinearities (no nontrivial wave), sign changes flag candidate
// velocities.  Defined for V > 0.
double integral_criterion(double V, const PhiFunction& phi, double rel_tol = 1e-11);

struct LandscapePoint {
    double v = 0.0;
    double lambda = 0.0;
    double i2 = 0.0;  // NaN where an arc failed
};

struct TravelingWaveProfile {
    double velocity = 0.0;
    double lambda = 0.0;
    double closure_residual = 0.0;  // |I2| at the accepted root
    double closure_gap = 0.0;       // top-point mismatch before mirroring
    std::vector<Vec2> points;       // closed polygon, CCW, equal arclength
};

struct TwSearchResult {
    std::vector<LandscapePoint> landscape;  // row-major, v outer, lambda inner
    std::vector<TravelingWaveProfile> roots;
};

// Build the closed profile for one (V, lambda) pair: integrate the three arcs,
// map them back to the common frame, mirror across the symmetry axis, and
// resample to n_points at equal arclength.
TravelingWaveProfile assemble_profile(double V, double lambda, const PhiFunction& phi,
                                      int n_points = 256, const ShootOptions& opt = {});

// Sample I2 on an inclusive (V, lambda) grid, bisect every sign change along
// lambda at fixed V until |I2| <= 1e-8, and assemble a profile at each root.
// Failed cells are masked as NaN in the landscape.
TwSearchResult find_traveling_waves(const PhiFunction& phi, double v_lo, double v_hi, int nv,
                                    double l_lo, double l_hi, int nl, int profile_points = 256,
                                    const ShootOptions& opt = {});

}  // namespace motility
