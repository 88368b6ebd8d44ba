// Long-form verification of the library + CLI against its numerical targets.
// Each check prints one [PASS]/[FAIL] line; the exit status is the number of
// failed checks.  The two long-time regime runs dominate the runtime (hours).

#include <sys/wait.h>

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "motility/csv.hpp"
#include "motility/geometry.hpp"
#include "motility/nonlinearity.hpp"
#include "motility/potential.hpp"
#include "motility/simulator.hpp"
#include "motility/travelwave.hpp"
#include "motility/tridiag.hpp"

using namespace motility;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

fs::path work_root() {
    static fs::path p = [] {
        fs::path d = fs::temp_directory_path() / "motility_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return p;
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(MOTILITY_BIN) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// 1. standing-wave profile vs the quartic-well closed form

Outcome c1_standing_wave() {
    const double t0 = now_s();
    const StandingWaveProfile p =
        solve_standing_wave(PotentialWell::allen_cahn(), 20.0, 2000);
    const double dt = now_s() - t0;
    double worst = 0.0;
    for (std::size_t j = 0; j < p.z.size(); ++j) {
        const double exact = 0.5 * (1.0 + std::tanh(p.z[j] / (2.0 * std::sqrt(2.0))));
        worst = std::max(worst, std::abs(p.theta[j] - exact));
    }
    const bool pass = worst <= 1e-6 && dt < 1.0;
    return {pass, fmt("max |theta - closed form| %.3e (<= 1e-6), solve %.3f s (< 1 s)",
                      worst, dt)};
}

// 2. interface mass of the quartic well

Outcome c2_interface_mass() {
    const StandingWaveProfile p =
        solve_standing_wave(PotentialWell::allen_cahn(), 20.0, 2000);
    const double exact = std::sqrt(2.0) / 12.0;
    const double err = std::abs(p.c0 - exact);
    return {err <= 1e-5, fmt("|c0 - sqrt(2)/12| = %.3e (<= 1e-5)", err)};
}

// 3. zero forcing degenerates the response; response is linear in the forcing

Outcome c3_response_linearity() {
    const StandingWaveProfile prof =
        solve_standing_wave(PotentialWell::allen_cahn(), 20.0, 2000);
    const PhiFunction p0 = PhiFunction::bvp_backed(prof, 0.0, 6.0, 0.01);
    const PhiFunction p50 = PhiFunction::bvp_backed(prof, 50.0, 6.0, 0.01);
    const PhiFunction p100 = PhiFunction::bvp_backed(prof, 100.0, 6.0, 0.01);
    double worst0 = 0.0, worst_lin = 0.0;
    for (double v = -6.0; v <= 6.0 + 1e-12; v += 0.01) {
        worst0 = std::max(worst0, std::abs(p0.value(v)));
        worst_lin = std::max(worst_lin, std::abs(p100.value(v) - 2.0 * p50.value(v)));
    }
    const bool pass = worst0 <= 1e-12 && worst_lin <= 1e-9;
    return {pass, fmt("sup|phi_0| = %.3e (<= 1e-12), sup|phi_100 - 2 phi_50| = %.3e (<= 1e-9)",
                      worst0, worst_lin)};
}

// 4. symmetric well admits no nontrivial wave

Outcome c4_symmetric_no_wave() {
    const double t0 = now_s();
    const StandingWaveProfile prof =
        solve_standing_wave(PotentialWell::allen_cahn(), 20.0, 2000);
    const PhiFunction phi = PhiFunction::bvp_backed(prof, 100.0, 6.0, 0.01);
    bool positive = true;
    double min_i = std::numeric_limits<double>::infinity();
    for (double v : {0.25, 0.5, 1.0, 2.0, 3.0}) {
        const double iv = integral_criterion(v, phi);
        min_i = std::min(min_i, iv);
        positive = positive && iv > 0.0;
    }
    const fs::path out = work_root() / "c4_tw";
    const int rc = run_tool("tw --well allen-cahn --beta 100 --out " + out.string());
    long roots = -1;
    if (rc == 0) {
        const CsvTable t = read_csv(out / "roots.csv");
        roots = static_cast<long>(t.rows.size());
    }
    const double dt = now_s() - t0;
    const bool pass = positive && rc == 0 && roots == 0 && dt < 120.0;
    return {pass, fmt("min I(V) = %.3e (> 0), scan roots = %ld (= 0), %.1f s (< 120 s)",
                      min_i, roots, dt)};
}

// 5. closed-form toy response: root location against the published values

Outcome c5_toy_root() {
    const double t0 = now_s();
    const fs::path out = work_root() / "c5_tw";
    const int rc = run_tool("tw --toy --beta 100 --out " + out.string());
    if (rc != 0) return {false, fmt("tw scan exited %d", rc)};
    const CsvTable t = read_csv(out / "roots.csv");
    const auto v = t.column_values("v");
    const auto lam = t.column_values("lambda");
    const auto resid = t.column_values("closure_residual");
    const auto len = t.column_values("length");
    const double dt = now_s() - t0;

    bool found = false, resid_ok = true;
    double best_score = std::numeric_limits<double>::infinity();
    double bv = std::numeric_limits<double>::quiet_NaN(), bl = bv;
    for (std::size_t k = 0; k < v.size(); ++k) {
        resid_ok = resid_ok && resid[k] <= 1e-4 * len[k];
        const double sv = std::abs(v[k] / 2.15 - 1.0) / 0.05;
        const double sl = std::abs(lam[k] / 9.75 - 1.0) / 0.05;
        const double score = std::max(sv, sl);
        if (score < best_score) {
            best_score = score;
            bv = v[k];
            bl = lam[k];
        }
        if (sv <= 1.0 && sl <= 1.0) found = true;
    }
    const bool pass = found && resid_ok && dt < 120.0 && !v.empty();
    return {pass,
            fmt("%zu roots; target V = 2.15 +-5%%, lambda = 9.75 +-5%%; closest (%.4f, %.4f); "
                "residuals %s; %.1f s (< 120 s)",
                v.size(), bv, bl, resid_ok ? "ok" : "over budget", dt)};
}

// 6. asymmetric well: wave root inside the expected window

Outcome c6_asym_root() {
    const double t0 = now_s();
    const fs::path out = work_root() / "c6_tw";
    const int rc = run_tool(
        "tw --well asym150 --beta 100 --v-max 4 --dv 0.01 --v-range 1.53 1.87 --nv 1361 "
        "--l-range -0.3 0.3 --nl 9 --out " +
        out.string());
    if (rc != 0) return {false, fmt("tw scan exited %d", rc)};
    const CsvTable t = read_csv(out / "roots.csv");
    const auto v = t.column_values("v");
    const auto lam = t.column_values("lambda");
    const double dt = now_s() - t0;
    bool found = false;
    double bv = std::numeric_limits<double>::quiet_NaN(), bl = bv;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (std::abs(v[k] / 1.7 - 1.0) <= 0.10 && std::abs(lam[k]) <= 0.3) {
            found = true;
            bv = v[k];
            bl = lam[k];
            break;
        }
    }
    const bool pass = found && dt < 600.0;
    return {pass, fmt("root (V, lambda) = (%.4f, %.4f) in V = 1.7 +-10%%, |lambda| <= 0.3; "
                      "%.1f s (< 600 s)",
                      bv, bl, dt)};
}

// 7. blow-up abscissa: adaptive shooting vs direct quadrature

Outcome c7_blowup_crosscheck() {
    const PhiFunction zero = PhiFunction::toy(0.0, 6.0, 0.01);
    const PhiFunction toy = PhiFunction::toy(100.0, 6.0, 0.01);
    int count = 0;
    double worst = 0.0, analytic_worst = 0.0;
    const auto sample = [&](ArcKind k, double V, double lamv, const PhiFunction& p,
                            bool analytic) {
        ShootingRhs rhs{k, V, lamv, &p};
        const double xq = blowup_abscissa_by_quadrature(rhs);
        const ArcSolution as =
            shoot_arc(rhs, 0.0, std::numeric_limits<double>::infinity());
        worst = std::max(worst, std::abs(as.x_end - xq) / xq);
        if (analytic) {
            analytic_worst =
                std::max(analytic_worst, std::abs(xq - 1.0 / lamv) * lamv);
        }
        ++count;
    };
    // zero response at V = 0 integrates to x* = 1/lambda exactly
    for (double lamv : {0.5, 1.0, 2.0, 4.0, 8.0}) sample(ArcKind::Back, 0.0, lamv, zero, true);
    for (double V : {0.5, 1.5, 3.0})
        for (double lamv : {240.0, 300.0}) sample(ArcKind::Back, V, lamv, toy, false);
    for (double V : {0.5, 2.0})
        for (double lamv : {240.0, 280.0}) sample(ArcKind::Front, V, lamv, toy, false);
    for (double V : {0.5, 1.0, 2.5}) sample(ArcKind::Side, V, 250.0, toy, false);
    for (double lamv : {2.0, 5.0}) sample(ArcKind::Side, 1.0, lamv, zero, false);
    const bool pass = count == 20 && worst <= 1e-4 && analytic_worst <= 1e-6;
    return {pass, fmt("%d samples, worst rel gap %.3e (<= 1e-4), analytic gap %.3e",
                      count, worst, analytic_worst)};
}

// 8. curvature stencil order on the discretized circle

Outcome c8_curvature_order() {
    const int Ns[3] = {64, 128, 256};
    double errs[3];
    for (int k = 0; k < 3; ++k) {
        const DiscreteCurve c = DiscreteCurve::circle(1.0, Ns[k]);
        double worst = 0.0;
        for (int i = 0; i < Ns[k]; ++i) {
            worst = std::max(worst, std::abs(c.curvature(i) - 1.0));
        }
        errs[k] = worst;
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    const bool pass =
        std::abs(o1 - 4.0) <= 0.3 && std::abs(o2 - 4.0) <= 0.3;
    return {pass, fmt("orders %.3f, %.3f (4.0 +- 0.3); errors %.2e / %.2e / %.2e",
                      o1, o2, errs[0], errs[1], errs[2])};
}

// 9. tridiagonal solves on random diagonally dominant systems

Outcome c9_tridiag() {
    std::mt19937 rng(20260818u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int n = 500;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        std::vector<double> lo(n), di(n), up(n), x(n), b(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = uni(rng);
            up[i] = uni(rng);
            di[i] = 4.0 + std::abs(uni(rng));
            x[i] = uni(rng);
        }
        for (int i = 0; i < n; ++i) {
            b[i] = di[i] * x[i];
            if (i > 0) b[i] += lo[i] * x[i - 1];
            if (i + 1 < n) b[i] += up[i] * x[i + 1];
        }
        const std::vector<double> sol = thomas_solve(lo, di, up, b);
        double rnum = 0.0, rden = 0.0;
        for (int i = 0; i < n; ++i) {
            double ax = di[i] * sol[i];
            if (i > 0) ax += lo[i] * sol[i - 1];
            if (i + 1 < n) ax += up[i] * sol[i + 1];
            rnum = std::max(rnum, std::abs(ax - b[i]));
            rden = std::max(rden, std::abs(b[i]));
        }
        worst = std::max(worst, rnum / rden);
    }
    return {worst <= 1e-10, fmt("worst relative residual %.3e (<= 1e-10) over 100 systems",
                                worst)};
}

// 10. conservation: per-record area drift and a resting circle staying put

Outcome c10_conservation() {
    const StandingWaveProfile prof =
        solve_standing_wave(PotentialWell::allen_cahn(), 10.0, 100);
    SimConfig cfg;
    cfg.epsilon = 0.01;
    cfg.beta = 0.0;
    cfg.nodes = 32;
    cfg.intervals = 100;
    cfg.half_width = 10.0;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;  // 1e4 steps
    cfg.output_every = 1;
    cfg.resample_every = 0;

    const DiscreteCurve init = DiscreteCurve::circle(1.0, cfg.nodes);
    const std::vector<Vec2> p0 = init.points();
    SimulationState st = init_state(init, prof, cfg);
    Simulator sim(prof, cfg);
    const std::vector<DiagnosticsRecord> records = run(sim, st);

    double area_dev = 0.0;
    for (const DiagnosticsRecord& r : records) {
        area_dev = std::max(area_dev, std::abs(r.area / records.front().area - 1.0));
    }
    double moved = 0.0;
    for (int i = 0; i < cfg.nodes; ++i) {
        moved = std::max(moved, norm(st.curve[i] - p0[i]));
    }
    const bool pass = area_dev <= 1e-8 && moved <= 1e-8;
    return {pass, fmt("area drift %.3e (<= 1e-8) over %zu records, node drift %.3e (<= 1e-8)",
                      area_dev, records.size(), moved)};
}

// 11. one explicit step against an independent multiplier bisection

Outcome c11_step_mirror() {
    const StandingWaveProfile prof =
        solve_standing_wave(PotentialWell::allen_cahn(), 10.0, 100);
    SimConfig cfg;
    cfg.epsilon = 0.01;
    cfg.beta = 0.0;  // actin stays identically zero
    cfg.nodes = 32;
    cfg.intervals = 100;
    cfg.half_width = 10.0;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    cfg.area_tol = 1e-13;

    SimulationState st = init_state(DiscreteCurve::ellipse(2.0, 1.0, 32), prof, cfg);
    const std::vector<Vec2> pts = st.curve.points();
    const double area0 = st.area0;
    const int n = cfg.nodes;
    const double h = 1.0 / n;
    std::vector<Vec2> base(n), shift(n), moved(n);
    for (int i = 0; i < n; ++i) {
        const double kap = curvature_at(pts, i, h);
        const Vec2 d = stencil_d1(pts, i, h);
        const Vec2 nin = Vec2{-d.y, d.x} * (1.0 / norm(d));
        base[i] = pts[i] + cfg.dt * kap * nin;
        shift[i] = cfg.dt * nin;
    }
    const auto area_of = [&](double lamv) {
        for (int i = 0; i < n; ++i) moved[i] = base[i] - lamv * shift[i];
        return shoelace_signed(moved);
    };
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (area_of(mid) < area0 ? lo : hi) = mid;
    }
    area_of(0.5 * (lo + hi));

    Simulator sim(prof, cfg);
    sim.step(st);
    double dmax = 0.0;
    bool actin_zero = true;
    for (int i = 0; i < n; ++i) {
        dmax = std::max({dmax, std::abs(st.curve[i].x - moved[i].x),
                         std::abs(st.curve[i].y - moved[i].y)});
    }
    for (int j = 0; j <= cfg.intervals; ++j) actin_zero = actin_zero && st.actin.at(7, j) == 0.0;
    const bool pass = dmax <= 1e-12 && actin_zero;
    return {pass, fmt("max node gap %.3e (<= 1e-12), actin identically zero: %s", dmax,
                      actin_zero ? "yes" : "no")};
}

// 12 + 13. long-time regimes from traveling-wave initial data

struct RegimePair {
    bool ran = false;
    std::string fail_reason;
    RegimeReport rot, wan;
    std::vector<DiagnosticsRecord> rot_records;
    double rot_elapsed = 0.0, wan_elapsed = 0.0;
};

RegimePair run_regime_pair() {
    RegimePair out;
    try {
        const StandingWaveProfile fine =
            solve_standing_wave(PotentialWell::asymmetric(150.0), 20.0, 2000);
        const PhiFunction phi = PhiFunction::bvp_backed(fine, 100.0, 4.0, 0.01);
        const TwSearchResult res =
            find_traveling_waves(phi, 1.55, 1.65, 201, -0.3, 0.3, 13, 256);
        if (res.roots.empty()) {
            out.fail_reason = "no traveling-wave root found for the initial data";
            return out;
        }
        const TravelingWaveProfile& root = res.roots.front();

        // mixed-mode multiplicative perturbation about the centroid; pure
        // mirror-symmetric data would pin the rotation artificially
        std::vector<Vec2> pts = root.points;
        const Vec2 c = polygon_centroid(pts);
        for (Vec2& p : pts) {
            const Vec2 d = p - c;
            const double ang = std::atan2(d.y, d.x);
            const double f =
                1.0 + 0.04 * std::cos(3.0 * ang + 0.9) + 0.02 * std::cos(2.0 * ang - 0.5);
            p = c + d * f;
        }
        double diameter = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                diameter = std::max(diameter, norm(pts[i] - pts[j]));
            }
        }

        const StandingWaveProfile prof =
            solve_standing_wave(PotentialWell::asymmetric(150.0), 20.0, 400);
        SimConfig cfg;
        cfg.beta = 100.0;
        cfg.nodes = 256;
        cfg.intervals = 400;
        cfg.half_width = 20.0;
        cfg.dt = 2.5e-7;
        cfg.resample_every = 50;

        {
            SimConfig rot_cfg = cfg;
            rot_cfg.epsilon = 0.002;
            rot_cfg.t_end = 0.35;
            rot_cfg.output_every = 2000;
            rot_cfg.per_node_diagnostics = true;
            const double t0 = now_s();
            SimulationState st = init_state(DiscreteCurve(pts), prof, rot_cfg, root.velocity);
            Simulator sim(prof, rot_cfg);
            out.rot_records = run(sim, st);
            out.rot_elapsed = now_s() - t0;
            out.rot = classify_regime(out.rot_records, diameter);
            std::printf("    [regime] eps = 0.002 done in %.0f s: %s\n", out.rot_elapsed,
                        regime_name(out.rot.regime));
            std::fflush(stdout);
        }
        {
            SimConfig wan_cfg = cfg;
            wan_cfg.epsilon = 0.01;
            wan_cfg.t_end = 1.75;
            wan_cfg.output_every = 10000;
            const double t0 = now_s();
            SimulationState st = init_state(DiscreteCurve(pts), prof, wan_cfg, root.velocity);
            Simulator sim(prof, wan_cfg);
            const std::vector<DiagnosticsRecord> records = run(sim, st);
            out.wan_elapsed = now_s() - t0;
            out.wan = classify_regime(records, diameter);
            std::printf("    [regime] eps = 0.01 done in %.0f s: %s\n", out.wan_elapsed,
                        regime_name(out.wan.regime));
            std::fflush(stdout);
        }
        out.ran = true;
    } catch (const std::exception& e) {
        out.fail_reason = e.what();
    }
    return out;
}

Outcome c12_regime_split(const RegimePair& rp) {
    if (!rp.ran) return {false, "regime runs failed: " + rp.fail_reason};
    const bool rot_ok = rp.rot.regime == Regime::Rotating;
    const bool wan_ok = rp.wan.regime == Regime::Wandering;
    const bool period_ok =
        rp.rot.q_period > 0.0 && rp.wan.q_period > 0.0 && rp.rot.q_period < rp.wan.q_period;
    const bool amp_ok = rp.rot.q_amplitude < rp.wan.q_amplitude;
    const double periods_covered =
        rp.rot.q_period > 0.0 ? 0.35 / rp.rot.q_period : 0.0;
    const bool pass = rot_ok && wan_ok && period_ok && amp_ok && periods_covered >= 10.0;
    return {pass,
            fmt("eps 0.002 -> %s (Q period %.4g, amp %.3g, %.0f periods covered); "
                "eps 0.01 -> %s (Q period %.4g, amp %.3g); period ordering %s, "
                "amplitude ordering %s; %.0f + %.0f s",
                regime_name(rp.rot.regime), rp.rot.q_period, rp.rot.q_amplitude,
                periods_covered, regime_name(rp.wan.regime), rp.wan.q_period,
                rp.wan.q_amplitude, period_ok ? "ok" : "VIOLATED",
                amp_ok ? "ok" : "VIOLATED", rp.rot_elapsed, rp.wan_elapsed)};
}

Outcome c13_hysteresis_jumps(const RegimePair& rp) {
    if (!rp.ran) return {false, "regime runs failed: " + rp.fail_reason};
    if (!(rp.rot.q_period > 0.0)) {
        return {false, "no Q period measured in the small-relaxation run"};
    }
    const std::vector<TracePoint> trace = hysteresis_trace(rp.rot_records, 0, 0.5);
    long jumps = 0;
    for (const TracePoint& p : trace) jumps += p.jump ? 1 : 0;
    const double span = trace.back().t - trace.front().t;
    const double periods = span / rp.rot.q_period;
    const bool pass = static_cast<double>(jumps) >= std::floor(periods) && periods >= 1.0;
    return {pass, fmt("%ld jump events over %.1f Q periods (need >= 1 per period)",
                      jumps, periods)};
}

// 14. byte-identical diagnostics across repeated runs

Outcome c14_determinism() {
    const fs::path d1 = work_root() / "c14_a";
    const fs::path d2 = work_root() / "c14_b";
    const std::string args =
        "simulate --well allen-cahn --beta 5 --ellipse 2 1 --nodes 48 --intervals 100 "
        "--half-width 10 --epsilon 0.01 --dt 1e-4 --t-end 0.01 --output-every 10 --out ";
    const int r1 = run_tool(args + d1.string());
    const int r2 = run_tool(args + d2.string());
    if (r1 != 0 || r2 != 0) return {false, fmt("runs exited %d / %d", r1, r2)};
    const std::string a = slurp(d1 / "diag.csv");
    const std::string b = slurp(d2 / "diag.csv");
    const bool pass = !a.empty() && a == b;
    return {pass, fmt("diag.csv %zu bytes, identical: %s", a.size(), pass ? "yes" : "no")};
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, Outcome>> results;
    const auto record = [&results](const char* name, Outcome o) {
        results.emplace_back(name, std::move(o));
        const auto& r = results.back();
        std::printf("[%s] %2zu. %s: %s\n", r.second.pass ? "PASS" : "FAIL", results.size(),
                    r.first.c_str(), r.second.detail.c_str());
        std::fflush(stdout);
    };

    record("standing wave matches closed form", c1_standing_wave());
    record("interface mass c0", c2_interface_mass());
    record("response degeneracy and linearity in the forcing", c3_response_linearity());
    record("symmetric well admits no wave", c4_symmetric_no_wave());
    record("toy response root location", c5_toy_root());
    record("asymmetric well root location", c6_asym_root());
    record("blow-up abscissa cross-check", c7_blowup_crosscheck());
    record("curvature stencil order", c8_curvature_order());
    record("tridiagonal solver residuals", c9_tridiag());
    record("area conservation and resting circle", c10_conservation());
    record("one-step multiplier mirror", c11_step_mirror());

    std::printf("  .. running the two long-time regime cases (this takes hours)\n");
    std::fflush(stdout);
    const RegimePair rp = run_regime_pair();
    record("long-time regime split", c12_regime_split(rp));
    record("hysteresis jump cadence", c13_hysteresis_jumps(rp));
    record("byte-identical diagnostics", c14_determinism());

    int failed = 0;
    for (const auto& [name, o] : results) failed += o.pass ? 0 : 1;
    std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failed,
                results.size());
    return failed;
}
