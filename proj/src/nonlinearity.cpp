#include "motility/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "motility/csv.hpp"
#include "motility/errors.hpp"
#include "motility/tridiag.hpp"

namespace motility {

namespace {

// Riemann sum of psi * weight over the grid; boundary weights are
// exponentially small and psi vanishes there, so this matches the trapezoid
// rule to machine precision while mirroring the simulator's convention.
double weighted_integral(const StandingWaveProfile& profile, const std::vector<double>& psi) {
    double acc = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) acc += psi[j] * profile.weight[j];
    return acc * profile.dz();
}

double toy_value(double beta, double V) {
    return -beta * (1.0 - std::tanh(V)) * std::exp(-V * V);
}

double toy_derivative(double beta, double V) {
    const double sech = 1.0 / std::cosh(V);
    return beta * std::exp(-V * V) * (sech * sech + 2.0 * V * (1.0 - std::tanh(V)));
}

}  // namespace

std::vector<double> solve_psi(const StandingWaveProfile& profile, double V, double beta) {
    const int m = profile.intervals;
    if (m < 2 || profile.theta.size() != static_cast<std::size_t>(m) + 1) {
        throw std::invalid_argument("solve_psi: malformed profile");
    }
    const double dz = profile.dz();
    if (!(std::abs(V) * dz < 2.0)) {
        throw SingularSystem("solve_psi: |V| dz >= 2 breaks diagonal dominance (V=" +
                             std::to_string(V) + ")");
    }

    const int n = m - 1;  // interior nodes
    std::vector<double> lower(n), diag(n), upper(n), rhs(n), x(n), scratch(n);
    const double inv_dz2 = 1.0 / (dz * dz);
    const double adv = V / (2.0 * dz);
    for (int j = 0; j < n; ++j) {
        lower[j] = inv_dz2 - adv;
        diag[j] = -2.0 * inv_dz2 - 1.0;
        upper[j] = inv_dz2 + adv;
        rhs[j] = beta * profile.dtheta[j + 1];
    }
    thomas_solve_inplace(lower, diag, upper, rhs, x, scratch);

    std::vector<double> psi(m + 1, 0.0);
    std::copy(x.begin(), x.end(), psi.begin() + 1);
    return psi;
}

PhiFunction PhiFunction::bvp_backed(const StandingWaveProfile& profile, double beta,
                                    double v_max, double dv) {
    if (!(v_max > 0.0) || !(dv > 0.0)) {
        throw std::invalid_argument("PhiFunction: need v_max > 0 and dv > 0");
    }
    PhiFunction f;
    f.kind_ = PhiKind::BvpBacked;
    f.beta_ = beta;
    if (!(profile.c0 > 0.0)) throw std::invalid_argument("PhiFunction: profile has c0 <= 0");
    f.response_scale_ = 1.0 / profile.c0;
    f.profile_ = std::make_shared<StandingWaveProfile>(profile);

    const int half = static_cast<int>(std::llround(v_max / dv));
    const int n = 2 * half + 1;
    auto& t = f.table_;
    t.v_min = -half * dv;
    t.v_max = half * dv;
    t.dv = dv;
    t.v.resize(n);
    t.phi.resize(n);
    t.phi_prime.resize(n);
    // Derivative by five-point central differences on direct solves; the
    // table then carries a derivative good to O(h^4), far below the cubic
    // interpolation error between nodes.
    const double h = 1e-3;
    for (int k = 0; k < n; ++k) {
        const double v = (k - half) * dv;
        t.v[k] = v;
        t.phi[k] = weighted_integral(profile, solve_psi(profile, v, beta));
        const double f1 = weighted_integral(profile, solve_psi(profile, v + h, beta));
        const double f_1 = weighted_integral(profile, solve_psi(profile, v - h, beta));
        const double f2 = weighted_integral(profile, solve_psi(profile, v + 2.0 * h, beta));
        const double f_2 = weighted_integral(profile, solve_psi(profile, v - 2.0 * h, beta));
        t.phi_prime[k] = (f_2 - 8.0 * f_1 + 8.0 * f1 - f2) / (12.0 * h);
    }
    return f;
}

PhiFunction PhiFunction::toy(double beta, double v_max, double dv) {
    if (!(v_max > 0.0) || !(dv > 0.0)) {
        throw std::invalid_argument("PhiFunction: need v_max > 0 and dv > 0");
    }
    PhiFunction f;
    f.kind_ = PhiKind::Toy;
    f.beta_ = beta;
    const int half = static_cast<int>(std::llround(v_max / dv));
    const int n = 2 * half + 1;
    auto& t = f.table_;
    t.v_min = -half * dv;
    t.v_max = half * dv;
    t.dv = dv;
    t.v.resize(n);
    t.phi.resize(n);
    t.phi_prime.resize(n);
    for (int k = 0; k < n; ++k) {
        const double v = (k - half) * dv;
        t.v[k] = v;
        t.phi[k] = toy_value(beta, v);
        t.phi_prime[k] = toy_derivative(beta, v);
    }
    return f;
}

PhiFunction PhiFunction::tabulated(std::vector<double> v, std::vector<double> phi,
                                   std::vector<double> phi_prime, double response_scale) {
    const std::size_t n = v.size();
    if (n < 4 || phi.size() != n || phi_prime.size() != n) {
        throw std::invalid_argument("PhiFunction: table needs >= 4 rows of equal length");
    }
    if (!(response_scale > 0.0)) {
        throw std::invalid_argument("PhiFunction: response_scale must be positive");
    }
    const double dv = v[1] - v[0];
    if (!(dv > 0.0)) throw std::invalid_argument("PhiFunction: table v must be increasing");
    for (std::size_t k = 1; k < n; ++k) {
        if (std::abs(v[k] - v[k - 1] - dv) > 1e-9 * std::max(1.0, std::abs(dv))) {
            throw std::invalid_argument("PhiFunction: table v must be uniformly spaced");
        }
    }
    PhiFunction f;
    f.kind_ = PhiKind::Tabulated;
    f.beta_ = std::nan("");
    f.response_scale_ = response_scale;
    auto& t = f.table_;
    t.v_min = v.front();
    t.v_max = v.back();
    t.dv = dv;
    t.v = std::move(v);
    t.phi = std::move(phi);
    t.phi_prime = std::move(phi_prime);
    return f;
}

PhiFunction PhiFunction::from_csv(const std::filesystem::path& path, double response_scale) {
    CsvTable csv = read_csv(path);
    return tabulated(csv.column_values("v"), csv.column_values("phi"),
                     csv.column_values("phi_prime"), response_scale);
}

// Four-point Lagrange interpolation on the uniform table.  The stencil is
// clamped at the edges, so values inside [v_min, v_max] never extrapolate.
double PhiFunction::interp(const std::vector<double>& col, double V) const {
    const auto& t = table_;
    const int n = static_cast<int>(t.v.size());
    int k = static_cast<int>(std::floor((V - t.v_min) / t.dv));
    k = std::clamp(k, 1, n - 3);
    const double s = (V - t.v[k]) / t.dv;  // in [0,1] away from the edges
    const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return w0 * col[k - 1] + w1 * col[k] + w2 * col[k + 1] + w3 * col[k + 2];
}

double PhiFunction::value(double V) const {
    switch (kind_) {
        case PhiKind::Toy:
            return toy_value(beta_, V);
        case PhiKind::BvpBacked:
            if (V < table_.v_min || V > table_.v_max) {
                return weighted_integral(*profile_, solve_psi(*profile_, V, beta_));
            }
            return interp(table_.phi, V);
        case PhiKind::Tabulated:
            if (V < table_.v_min || V > table_.v_max) {
                throw std::domain_error("PhiFunction: V outside tabulated range");
            }
            return interp(table_.phi, V);
    }
    return 0.0;
}

double PhiFunction::derivative(double V) const {
    switch (kind_) {
        case PhiKind::Toy:
            return toy_derivative(beta_, V);
        case PhiKind::BvpBacked:
            if (V < table_.v_min || V > table_.v_max) {
                const double h = 1e-3;
                const auto& p = *profile_;
                const double f1 = weighted_integral(p, solve_psi(p, V + h, beta_));
                const double f_1 = weighted_integral(p, solve_psi(p, V - h, beta_));
                const double f2 = weighted_integral(p, solve_psi(p, V + 2.0 * h, beta_));
                const double f_2 = weighted_integral(p, solve_psi(p, V - 2.0 * h, beta_));
                return (f_2 - 8.0 * f_1 + 8.0 * f1 - f2) / (12.0 * h);
            }
            return interp(table_.phi_prime, V);
        case PhiKind::Tabulated:
            if (V < table_.v_min || V > table_.v_max) {
                throw std::domain_error("PhiFunction: V outside tabulated range");
            }
            return interp(table_.phi_prime, V);
    }
    return 0.0;
}

double PhiFunction::sup_abs() const {
    double m = 0.0;
    for (double p : table_.phi) m = std::max(m, std::abs(p));
    return m;
}

double PhiFunction::max_abs_derivative(double v_cap) const {
    double m = 0.0;
    for (std::size_t k = 0; k < table_.v.size(); ++k) {
        if (std::abs(table_.v[k]) <= v_cap) m = std::max(m, std::abs(table_.phi_prime[k]));
    }
    return m;
}

void PhiFunction::write_csv(const std::filesystem::path& path) const {
    const std::string header[] = {"v", "phi", "phi_prime"};
    std::vector<std::vector<double>> rows;
    rows.reserve(table_.v.size());
    for (std::size_t k = 0; k < table_.v.size(); ++k) {
        rows.push_back({table_.v[k], table_.phi[k], table_.phi_prime[k]});
    }
    motility::write_csv(path, header, rows);
}

double estimate_beta_crit(const std::function<PhiFunction(double)>& make_phi, double v_max,
                          double beta_hi, double bracket_tol) {
    if (!(beta_hi > 0.0) || !(v_max > 0.0) || !(bracket_tol > 0.0)) {
        throw std::invalid_argument("estimate_beta_crit: bad parameters");
    }
    const auto subcritical = [&](double beta) {
        return make_phi(beta).max_abs_derivative(v_max) < 1.0;
    };
    if (subcritical(beta_hi)) {
        throw BracketFailure("estimate_beta_crit: derivative still below 1 at beta_hi=" +
                             std::to_string(beta_hi));
    }
    double lo = 0.0, hi = beta_hi;  // subcritical at lo (Phi_0 = 0), not at hi
    while (hi - lo > bracket_tol) {
        const double mid = 0.5 * (lo + hi);
        (subcritical(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double estimate_beta_crit_bvp(const StandingWaveProfile& profile, double v_max, double beta_hi,
                              double bracket_tol) {
    return estimate_beta_crit(
        [&](double beta) { return PhiFunction::bvp_backed(profile, beta, v_max, 0.01); }, v_max,
        beta_hi, bracket_tol);
}

double estimate_beta_crit_toy(double v_max, double beta_hi, double bracket_tol) {
    return estimate_beta_crit([=](double beta) { return PhiFunction::toy(beta, v_max, 0.01); },
                              v_max, beta_hi, bracket_tol);
}

}  // namespace motility
