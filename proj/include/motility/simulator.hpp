#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "motility/geometry.hpp"
#include "motility/nonlinearity.hpp"
#include "motility/potential.hpp"

namespace motility {

// Actin density transported with the curve: one column of M+1 samples on the
// interface-normal grid per curve node, row-major.
struct ActinField {
    int nodes = 0;
    int intervals = 0;
    std::vector<double> a;

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * (intervals + 1) + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * (intervals + 1) + j]; }
    std::span<const double> column(int i) const {
        return {a.data() + static_cast<std::size_t>(i) * (intervals + 1),
                static_cast<std::size_t>(intervals) + 1};
    }
};

struct SimConfig {
    double epsilon = 0.01;     // actin relaxation time scale
    double beta = 100.0;       // actin forcing strength
    int nodes = 256;           // N curve nodes
    int intervals = 400;       // M grid intervals for the actin columns
    double half_width = 20.0;  // L, actin grid covers [-L, L]
    double dt = 2e-5;
    double t_end = 1.0;
    double area_tol = 1e-8;        // relative area defect tolerance per step
    int max_area_iters = 50;       // correction iterations before giving up
    double area_relax = 1.0;       // damping on the multiplier correction
    int resample_every = 50;       // steps between re-equilibrations (0 = off)
    int output_every = 200;        // steps between diagnostics records
    int snapshot_every = 0;        // steps between curve snapshots (0 = ends only)
    int trace_node = 0;            // node reported in every diagnostics record
    bool per_node_diagnostics = false;
    double jump_threshold = 0.5;   // |dV| flagged as a velocity jump

    // Throws std::invalid_argument on out-of-range values; returns
    // human-readable warnings (e.g. an aggressive dt / h^2 ratio).
    std::vector<std::string> validate() const;

    double dt_h2_ratio() const { return dt * nodes * static_cast<double>(nodes); }
};

struct SimulationState {
    DiscreteCurve curve;
    ActinField actin;
    double t = 0.0;
    double lambda = 0.0;
    double area0 = 0.0;  // conserved target area
};

struct DiagnosticsRecord {
    double t = 0.0;
    double q = 0.0;  // isoperimetric quotient
    double area = 0.0;
    double lambda = 0.0;
    Vec2 centroid;
    int area_iters = 0;
    bool self_intersecting = false;
    double trace_v = 0.0;    // velocity of the traced node
    double trace_phi = 0.0;  // nonlinearity sample of the traced node
    std::vector<double> node_v, node_phi;  // per-node copies when enabled
};

// Build the initial state: the curve is resampled to cfg.nodes equal-arclength
// nodes, each actin column solves its stationary balance with the node's
// normal velocity (zero at rest, dot((0, tw_speed), inward normal) for a wave
// translating along +y), and the multiplier starts at the arclength mean of
// curvature plus actin drive.
SimulationState init_state(const DiscreteCurve& curve, const StandingWaveProfile& profile,
                           const SimConfig& cfg, std::optional<double> tw_speed = {});

// One forward step of the coupled system, reused scratch buffers inside.
class Simulator {
  public:
    Simulator(StandingWaveProfile profile, SimConfig cfg);

    // Advance the state by dt: explicit curve move with the area-restoring
    // multiplier correction, then one implicit (backward Euler) actin update
    // per node with the accepted velocities.  Throws AreaLoopDiverged when the
    // correction loop cannot meet area_tol within max_area_iters.
    DiagnosticsRecord step(SimulationState& state);

    // Diagnostics of the current state without advancing it.
    DiagnosticsRecord diagnose(const SimulationState& state) const;

    // Equal-arclength resampling of curve and actin columns together; also
    // refreshes the self-intersection flag reported in later records.
    void resample(SimulationState& state);

    const SimConfig& config() const { return cfg_; }
    const StandingWaveProfile& profile() const { return profile_; }

  private:
    void node_fields(const SimulationState& state);  // curvature, drive, normals

    StandingWaveProfile profile_;
    SimConfig cfg_;
    // scratch, sized on first use
    std::vector<double> kappa_, drive_, dslen_, vel_;
    std::vector<Vec2> normal_, base_, shift_, moved_;
    std::vector<double> lo_, di_, up_, rhs_, sol_, scratch_;
    bool last_self_check_ = false;
};

struct RunCallbacks {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(long step, const SimulationState&)> on_snapshot;
};

// Drive the state from state.t to cfg.t_end in uniform dt steps (the count is
// rounded once, so t never drifts past the target).  Emits the initial record,
// every output_every-th record, and the final one; snapshots follow
// snapshot_every plus both endpoints.  Returns all emitted records.
std::vector<DiagnosticsRecord> run(Simulator& sim, SimulationState& state,
                                   const RunCallbacks& cb = {});

enum class Regime { Stationary, Rotating, Wandering, Inconclusive };

const char* regime_name(Regime r);

struct RegimeThresholds {
    double stationary_disp = 0.05;  // net displacement, in diameters
    double stationary_q_band = 1e-4;
    double rotating_disp = 1.0;
    double wandering_disp = 2.0;
    double autocorr_floor = 0.25;    // normalized autocorrelation peak height
    double window_fraction = 0.6;    // trailing share of the series analyzed
};

struct RegimeReport {
    Regime regime = Regime::Inconclusive;
    double net_displacement = 0.0;
    double displacement_diameters = 0.0;
    double q_mean = 0.0;
    double q_band = 0.0;       // max - min over the analysis window
    double q_amplitude = 0.0;  // half the band
    double q_period = 0.0;     // 0 when no oscillation was detected
    double autocorr_peak = 0.0;
};

// Classify the long-time behavior from the diagnostics series: Stationary
// (no drift, flat shape factor), Wandering (net drift beyond a couple of
// diameters), Rotating (bounded drift with a periodic shape factor), or
// Inconclusive.  `diameter` sets the displacement scale.
RegimeReport classify_regime(std::span<const DiagnosticsRecord> series, double diameter,
                             const RegimeThresholds& thr = {});

struct TracePoint {
    double t = 0.0;
    double v = 0.0;
    double v_minus_phi = 0.0;
    bool jump = false;
};

// Per-node velocity trace (requires per_node_diagnostics records); consecutive
// velocity moves beyond jump_threshold are flagged.
std::vector<TracePoint> hysteresis_trace(std::span<const DiagnosticsRecord> series, int node,
                                         double jump_threshold);

// Linear stability of the flat interface at speed V: stable while the
// nonlinearity responds slower than the interface mobility c0.
bool stability_indicator(const PhiFunction& phi, double V, double c0);

}  // namespace motility
