#include "motility/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "motility/errors.hpp"
#include "motility/tridiag.hpp"

namespace motility {

std::vector<std::string> SimConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("config: beta must be >= 0");
    if (nodes < 8) throw std::invalid_argument("config: nodes must be >= 8");
    if (intervals < 16 || intervals % 2 != 0) {
        throw std::invalid_argument("config: intervals must be even and >= 16");
    }
    if (!(half_width > 0.0)) throw std::invalid_argument("config: half_width must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
    if (!(t_end >= 0.0)) throw std::invalid_argument("config: t_end must be >= 0");
    if (!(area_tol > 0.0)) throw std::invalid_argument("config: area_tol must be > 0");
    if (max_area_iters < 1) throw std::invalid_argument("config: max_area_iters must be >= 1");
    if (!(area_relax > 0.0) || area_relax > 1.0) {
        throw std::invalid_argument("config: area_relax must be in (0, 1]");
    }
    if (resample_every < 0) throw std::invalid_argument("config: resample_every must be >= 0");
    if (output_every < 1) throw std::invalid_argument("config: output_every must be >= 1");
    if (snapshot_every < 0) throw std::invalid_argument("config: snapshot_every must be >= 0");
    if (trace_node < 0 || trace_node >= nodes) {
        throw std::invalid_argument("config: trace_node out of range");
    }
    if (!(jump_threshold > 0.0)) throw std::invalid_argument("config: jump_threshold must be > 0");

    std::vector<std::string> warnings;
    if (dt_h2_ratio() > 1e-2) {
        warnings.push_back("dt/h^2 = " + std::to_string(dt_h2_ratio()) +
                           " exceeds 1e-2; the explicit curve move may be inaccurate");
    }
    return warnings;
}

namespace {

// Curvature, actin drive, normals and arclength weights for every node.
void compute_fields(const StandingWaveProfile& profile, const SimulationState& state,
                    std::vector<double>& kappa, std::vector<double>& drive,
                    std::vector<double>& dslen, std::vector<Vec2>& normal) {
    const auto& pts = state.curve.points();
    const int n = static_cast<int>(pts.size());
    const double h = state.curve.h();
    const int m = state.actin.intervals;
    const double dz = profile.dz();

    kappa.resize(n);
    drive.resize(n);
    dslen.resize(n);
    normal.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 d = stencil_d1(pts, i, h);
        const Vec2 dd = stencil_d2(pts, i, h);
        const double len = norm(d);
        if (!(len > 1e-150)) {
            throw DegenerateTangent("simulator: zero tangent at node " + std::to_string(i));
        }
        kappa[i] = cross(d, dd) / (len * len * len);
        normal[i] = {-d.y / len, d.x / len};
        dslen[i] = len;

        double acc = 0.0;
        const double* col = state.actin.a.data() + static_cast<std::size_t>(i) * (m + 1);
        const double* wgt = profile.weight.data();
        for (int j = 0; j <= m; ++j) acc += col[j] * wgt[j];
        drive[i] = acc * dz;
    }
}

double mean_lambda(const std::vector<double>& kappa, const std::vector<double>& drive,
                   const std::vector<double>& dslen) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        num += (kappa[i] + drive[i]) * dslen[i];
        den += dslen[i];
    }
    return num / den;
}

}  // namespace

SimulationState init_state(const DiscreteCurve& curve, const StandingWaveProfile& profile,
                           const SimConfig& cfg, std::optional<double> tw_speed) {
    cfg.validate();
    if (profile.intervals != cfg.intervals ||
        std::abs(profile.half_width - cfg.half_width) > 1e-12) {
        throw std::invalid_argument("init_state: profile grid does not match the config");
    }

    SimulationState st{curve.resample_equal_arclength(cfg.nodes), {}, 0.0, 0.0, 0.0};
    const int n = cfg.nodes, m = cfg.intervals;
    st.actin.nodes = n;
    st.actin.intervals = m;
    st.actin.a.assign(static_cast<std::size_t>(n) * (m + 1), 0.0);

    for (int i = 0; i < n; ++i) {
        double v = 0.0;
        if (tw_speed) v = *tw_speed * st.curve.inward_normal(i).y;
        const std::vector<double> col = solve_psi(profile, v, cfg.beta);
        std::copy(col.begin(), col.end(),
                  st.actin.a.begin() + static_cast<std::size_t>(i) * (m + 1));
    }

    std::vector<double> kappa, drive, dslen;
    std::vector<Vec2> normal;
    compute_fields(profile, st, kappa, drive, dslen, normal);
    st.lambda = mean_lambda(kappa, drive, dslen);
    st.area0 = st.curve.area();
    return st;
}

Simulator::Simulator(StandingWaveProfile profile, SimConfig cfg)
    : profile_(std::move(profile)), cfg_(cfg) {
    cfg_.validate();
    if (profile_.intervals != cfg_.intervals ||
        std::abs(profile_.half_width - cfg_.half_width) > 1e-12) {
        throw std::invalid_argument("Simulator: profile grid does not match the config");
    }
}

void Simulator::node_fields(const SimulationState& state) {
    compute_fields(profile_, state, kappa_, drive_, dslen_, normal_);
}

DiagnosticsRecord Simulator::step(SimulationState& state) {
    if (state.actin.nodes != cfg_.nodes || state.curve.size() != cfg_.nodes) {
        throw std::invalid_argument("Simulator: state does not match the config");
    }
    node_fields(state);
    const int n = cfg_.nodes;
    const auto& pts = state.curve.points();

    // Trial move p + (kappa + drive - lambda) * normal * dt, with the
    // multiplier corrected until the enclosed area returns to its target.
    double lambda = mean_lambda(kappa_, drive_, dslen_);
    base_.resize(n);
    shift_.resize(n);
    moved_.resize(n);
    for (int i = 0; i < n; ++i) {
        base_[i] = pts[i] + cfg_.dt * (kappa_[i] + drive_[i]) * normal_[i];
        shift_[i] = cfg_.dt * normal_[i];
    }
    const auto move_and_area = [&](double lam) {
        for (int i = 0; i < n; ++i) moved_[i] = base_[i] - lam * shift_[i];
        return shoelace_signed(moved_);
    };

    double area = move_and_area(lambda);
    double defect = (area - state.area0) / state.area0;
    int iters = 0;
    while (std::abs(defect) > cfg_.area_tol) {
        if (iters >= cfg_.max_area_iters) {
            throw AreaLoopDiverged("simulator: area defect " + std::to_string(defect) +
                                   " after " + std::to_string(iters) + " corrections");
        }
        double dsdl = 0.0;  // d(area)/d(lambda) of the moved polygon
        for (int i = 0; i < n; ++i) {
            const int k = (i + 1) % n;
            dsdl -= 0.5 * (cross(shift_[i], moved_[k]) + cross(moved_[i], shift_[k]));
        }
        if (!(std::abs(dsdl) > 1e-300)) {
            throw AreaLoopDiverged("simulator: flat area response to the multiplier");
        }
        lambda += cfg_.area_relax * (state.area0 - area) / dsdl;
        area = move_and_area(lambda);
        defect = (area - state.area0) / state.area0;
        ++iters;
    }

    vel_.resize(n);
    for (int i = 0; i < n; ++i) vel_[i] = kappa_[i] + drive_[i] - lambda;
    state.curve.update_points(std::vector<Vec2>(moved_.begin(), moved_.end()));

    // Implicit actin update per node, advected with the accepted velocity.
    const int m = cfg_.intervals;
    const double dz = profile_.dz();
    const double inv_dz2 = 1.0 / (dz * dz);
    const double mass = cfg_.epsilon / cfg_.dt;
    const int ni = m - 1;
    lo_.resize(ni);
    di_.resize(ni);
    up_.resize(ni);
    rhs_.resize(ni);
    sol_.resize(ni);
    scratch_.resize(ni);
    for (int i = 0; i < n; ++i) {
        const double adv = vel_[i] / (2.0 * dz);
        double* col = state.actin.a.data() + static_cast<std::size_t>(i) * (m + 1);
        for (int j = 0; j < ni; ++j) {
            lo_[j] = -inv_dz2 + adv;
            di_[j] = mass + 1.0 + 2.0 * inv_dz2;
            up_[j] = -inv_dz2 - adv;
            rhs_[j] = mass * col[j + 1] - cfg_.beta * profile_.dtheta[j + 1];
        }
        thomas_solve_inplace(lo_, di_, up_, rhs_, sol_, scratch_);
        for (int j = 0; j < ni; ++j) col[j + 1] = sol_[j];
    }

    state.t += cfg_.dt;
    state.lambda = lambda;

    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.q = state.curve.isoperimetric_quotient();
    rec.area = state.curve.area();
    rec.lambda = lambda;
    rec.centroid = state.curve.centroid();
    rec.area_iters = iters;
    rec.self_intersecting = last_self_check_;
    rec.trace_v = vel_[cfg_.trace_node];
    rec.trace_phi = drive_[cfg_.trace_node];
    if (cfg_.per_node_diagnostics) {
        rec.node_v = vel_;
        rec.node_phi = drive_;
    }
    return rec;
}

DiagnosticsRecord Simulator::diagnose(const SimulationState& state) const {
    std::vector<double> kappa, drive, dslen;
    std::vector<Vec2> normal;
    compute_fields(profile_, state, kappa, drive, dslen, normal);
    const double lambda = mean_lambda(kappa, drive, dslen);

    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.q = state.curve.isoperimetric_quotient();
    rec.area = state.curve.area();
    rec.lambda = lambda;
    rec.centroid = state.curve.centroid();
    rec.area_iters = 0;
    rec.self_intersecting = state.curve.self_intersects();
    rec.trace_v = kappa[cfg_.trace_node] + drive[cfg_.trace_node] - lambda;
    rec.trace_phi = drive[cfg_.trace_node];
    if (cfg_.per_node_diagnostics) {
        rec.node_v.resize(kappa.size());
        for (std::size_t i = 0; i < kappa.size(); ++i) {
            rec.node_v[i] = kappa[i] + drive[i] - lambda;
        }
        rec.node_phi = drive;
    }
    return rec;
}

void Simulator::resample(SimulationState& state) {
    const auto map = resample_map(state.curve.points(), cfg_.nodes);
    std::vector<Vec2> pts = apply_resample(state.curve.points(), map);

    // Carry the actin columns along: each grid level is a periodic per-node
    // scalar, interpolated with the same weights as the points themselves.
    const int n = cfg_.nodes, m = cfg_.intervals;
    std::vector<double> level(n), new_level;
    ActinField fresh;
    fresh.nodes = n;
    fresh.intervals = m;
    fresh.a.assign(static_cast<std::size_t>(n) * (m + 1), 0.0);
    for (int j = 1; j < m; ++j) {
        for (int i = 0; i < n; ++i) level[i] = state.actin.at(i, j);
        new_level = apply_resample(level, map);
        for (int i = 0; i < n; ++i) fresh.at(i, j) = new_level[i];
    }

    state.curve.update_points(std::move(pts));
    state.actin = std::move(fresh);
    last_self_check_ = state.curve.self_intersects();
}

std::vector<DiagnosticsRecord> run(Simulator& sim, SimulationState& state,
                                   const RunCallbacks& cb) {
    const SimConfig& cfg = sim.config();
    const long n_steps = std::max<long>(0, std::lround((cfg.t_end - state.t) / cfg.dt));

    std::vector<DiagnosticsRecord> records;
    records.push_back(sim.diagnose(state));
    if (cb.on_record) cb.on_record(records.back());
    if (cb.on_snapshot) cb.on_snapshot(0, state);

    for (long k = 1; k <= n_steps; ++k) {
        DiagnosticsRecord rec = sim.step(state);
        if (cfg.resample_every > 0 && k % cfg.resample_every == 0) sim.resample(state);
        const bool on_output = (k % cfg.output_every == 0) || k == n_steps;
        if (on_output) {
            records.push_back(std::move(rec));
            if (cb.on_record) cb.on_record(records.back());
        }
        if (cb.on_snapshot) {
            const bool on_snap = cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0;
            if (on_snap || k == n_steps) cb.on_snapshot(k, state);
        }
    }
    return records;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Stationary:
            return "stationary";
        case Regime::Rotating:
            return "rotating";
        case Regime::Wandering:
            return "wandering";
        case Regime::Inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

RegimeReport classify_regime(std::span<const DiagnosticsRecord> series, double diameter,
                             const RegimeThresholds& thr) {
    RegimeReport rep;
    if (series.size() < 8 || !(diameter > 0.0)) return rep;

    const Vec2 disp = series.back().centroid - series.front().centroid;
    rep.net_displacement = norm(disp);
    rep.displacement_diameters = rep.net_displacement / diameter;

    // Longest uniformly spaced prefix (the final record may break cadence).
    std::size_t n_unif = series.size();
    const double dt0 = series[1].t - series[0].t;
    for (std::size_t i = 2; i < series.size(); ++i) {
        if (std::abs(series[i].t - series[i - 1].t - dt0) > 1e-9 * std::max(1.0, dt0)) {
            n_unif = i;
            break;
        }
    }
    const std::size_t start =
        static_cast<std::size_t>(static_cast<double>(n_unif) * (1.0 - thr.window_fraction));
    const std::span<const DiagnosticsRecord> win = series.subspan(start, n_unif - start);
    if (win.size() < 4) return rep;

    double qmin = win[0].q, qmax = win[0].q, qsum = 0.0;
    for (const auto& r : win) {
        qmin = std::min(qmin, r.q);
        qmax = std::max(qmax, r.q);
        qsum += r.q;
    }
    rep.q_mean = qsum / win.size();
    rep.q_band = qmax - qmin;
    rep.q_amplitude = 0.5 * rep.q_band;

    // Autocorrelation of the demeaned shape factor; first peak past the first
    // zero crossing, refined by a parabolic fit through its neighbors.
    const std::size_t nw = win.size();
    std::vector<double> dq(nw);
    for (std::size_t i = 0; i < nw; ++i) dq[i] = win[i].q - rep.q_mean;
    const std::size_t max_lag = nw / 2;
    std::vector<double> r(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < nw; ++i) acc += dq[i] * dq[i + lag];
        r[lag] = acc;
    }
    if (r[0] > 0.0) {
        std::size_t first_neg = 0;
        for (std::size_t lag = 1; lag <= max_lag; ++lag) {
            if (r[lag] < 0.0) {
                first_neg = lag;
                break;
            }
        }
        if (first_neg > 0) {
            std::size_t best = 0;
            for (std::size_t lag = first_neg; lag + 1 <= max_lag; ++lag) {
                if (best == 0 || r[lag] > r[best]) best = lag;
            }
            if (best > 0 && best < max_lag) {
                rep.autocorr_peak = r[best] / r[0];
                if (rep.autocorr_peak >= thr.autocorr_floor) {
                    const double ym = r[best - 1], y0 = r[best], yp = r[best + 1];
                    const double denom = ym - 2.0 * y0 + yp;
                    const double shift = std::abs(denom) > 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
                    rep.q_period = (static_cast<double>(best) + shift) * dt0;
                }
            }
        }
    }

    if (rep.displacement_diameters < thr.stationary_disp && rep.q_band < thr.stationary_q_band) {
        rep.regime = Regime::Stationary;
    } else if (rep.displacement_diameters > thr.wandering_disp) {
        rep.regime = Regime::Wandering;
    } else if (rep.displacement_diameters < thr.rotating_disp && rep.q_period > 0.0) {
        rep.regime = Regime::Rotating;
    } else {
        rep.regime = Regime::Inconclusive;
    }
    return rep;
}

std::vector<TracePoint> hysteresis_trace(std::span<const DiagnosticsRecord> series, int node,
                                         double jump_threshold) {
    if (!(jump_threshold > 0.0)) {
        throw std::invalid_argument("hysteresis_trace: jump_threshold must be > 0");
    }
    std::vector<TracePoint> out;
    out.reserve(series.size());
    for (const auto& rec : series) {
        if (rec.node_v.empty()) {
            throw std::invalid_argument(
                "hysteresis_trace: per-node diagnostics were not recorded");
        }
        if (node < 0 || static_cast<std::size_t>(node) >= rec.node_v.size()) {
            throw std::invalid_argument("hysteresis_trace: node index out of range");
        }
        TracePoint p;
        p.t = rec.t;
        p.v = rec.node_v[node];
        p.v_minus_phi = rec.node_v[node] - rec.node_phi[node];
        p.jump = !out.empty() && std::abs(p.v - out.back().v) > jump_threshold;
        out.push_back(p);
    }
    return out;
}

bool stability_indicator(const PhiFunction& phi, double V, double c0) {
    return phi.derivative(V) < c0;
}

}  // namespace motility
