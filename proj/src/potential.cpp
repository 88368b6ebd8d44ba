#include "motility/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "motility/csv.hpp"
#include "motility/errors.hpp"

namespace motility {

PotentialWell::PotentialWell(WellKind kind, double a, std::vector<double> coeffs)
    : kind_(kind), a_(a), coeffs_(std::move(coeffs)) {
    if (kind_ == WellKind::CustomPolynomial) {
        if (coeffs_.size() < 3) {
            throw std::invalid_argument("PotentialWell: polynomial needs degree >= 2");
        }
        dcoeffs_.resize(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) {
            dcoeffs_[k - 1] = static_cast<double>(k) * coeffs_[k];
        }
    }
    validate();
}

PotentialWell PotentialWell::allen_cahn() { return PotentialWell(WellKind::AllenCahn, 0.0, {}); }

PotentialWell PotentialWell::asymmetric(double a) {
    if (!(a >= 0.0)) throw std::invalid_argument("PotentialWell: asymmetry must be >= 0");
    return PotentialWell(WellKind::AsymmetricPolynomial, a, {});
}

PotentialWell PotentialWell::polynomial(std::vector<double> coeffs) {
    return PotentialWell(WellKind::CustomPolynomial, 0.0, std::move(coeffs));
}

double PotentialWell::value(double z) const {
    switch (kind_) {
        case WellKind::AllenCahn: {
            const double q = z * (1.0 - z);
            return 0.25 * q * q;
        }
        case WellKind::AsymmetricPolynomial: {
            const double q = z * (1.0 - z);
            return 0.25 * q * q * (1.0 + a_ * z * z);
        }
        case WellKind::CustomPolynomial: {
            double acc = 0.0;
            for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * z + coeffs_[k];
            return acc;
        }
    }
    return 0.0;
}

double PotentialWell::derivative(double z) const {
    switch (kind_) {
        case WellKind::AllenCahn:
            return 0.5 * z * (1.0 - z) * (1.0 - 2.0 * z);
        case WellKind::AsymmetricPolynomial:
            return 0.5 * z * (1.0 - z) *
                   ((1.0 - 2.0 * z) * (1.0 + a_ * z * z) + a_ * z * z * (1.0 - z));
        case WellKind::CustomPolynomial: {
            double acc = 0.0;
            for (std::size_t k = dcoeffs_.size(); k-- > 0;) acc = acc * z + dcoeffs_[k];
            return acc;
        }
    }
    return 0.0;
}

void PotentialWell::validate() const {
    if (std::abs(value(0.0)) > 1e-12 || std::abs(value(1.0)) > 1e-12) {
        throw DegenerateWell("PotentialWell: W must vanish at 0 and 1");
    }
    // Sample the open interval; the connection problem needs W > 0 there.
    constexpr int kSamples = 1024;
    for (int i = 1; i < kSamples; ++i) {
        const double z = static_cast<double>(i) / kSamples;
        if (value(z) < -1e-14) {
            throw DegenerateWell("PotentialWell: W negative inside (0,1) at z=" +
                                 std::to_string(z));
        }
    }
}

namespace {

// Right-hand side sqrt(2 W(theta)) with the tolerance-guarded clamp.
double profile_slope(const PotentialWell& well, double theta) {
    double two_w = 2.0 * well.value(theta);
    if (two_w < 0.0) {
        if (two_w < -1e-14) {
            throw DegenerateWell("solve_standing_wave: 2W(theta) < 0 at theta=" +
                                 std::to_string(theta));
        }
        two_w = 0.0;
    }
    return std::sqrt(two_w);
}

double rk4_step(const PotentialWell& well, double theta, double h) {
    const double k1 = profile_slope(well, theta);
    const double k2 = profile_slope(well, theta + 0.5 * h * k1);
    const double k3 = profile_slope(well, theta + 0.5 * h * k2);
    const double k4 = profile_slope(well, theta + h * k3);
    return theta + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

StandingWaveProfile solve_standing_wave(const PotentialWell& well, double half_width,
                                        int intervals) {
    if (!(half_width > 0.0)) throw std::invalid_argument("solve_standing_wave: L must be > 0");
    if (intervals < 16) throw std::invalid_argument("solve_standing_wave: need M >= 16");
    if (intervals % 2 != 0) {
        throw std::invalid_argument("solve_standing_wave: M must be even (center node at 0)");
    }
    if (2.0 * well.value(0.5) <= 1e-14) {
        throw DegenerateWell("solve_standing_wave: W(1/2) vanishes; midpoint is critical");
    }

    StandingWaveProfile p;
    p.half_width = half_width;
    p.intervals = intervals;
    const int n = intervals + 1;
    p.z.resize(n);
    p.theta.resize(n);
    const double dz = 2.0 * half_width / intervals;
    for (int j = 0; j < n; ++j) {
        p.z[j] = -half_width + 2.0 * half_width * (static_cast<double>(j) / intervals);
    }

    // The wells 0 and 1 are one-sided fixed points (the slope field is >= 0 on
    // both sides), so a step that lands past a well would escape instead of
    // converging; saturating at the well value is the exact trajectory.
    const int c = p.center_index();
    p.theta[c] = 0.5;
    for (int j = c; j < intervals; ++j) {
        p.theta[j + 1] = std::min(rk4_step(well, p.theta[j], dz), 1.0);
        if (p.theta[j + 1] < p.theta[j] - 1e-14) {
            throw NonMonotoneProfile("solve_standing_wave: profile decreased at j=" +
                                     std::to_string(j + 1));
        }
    }
    for (int j = c; j > 0; --j) {
        p.theta[j - 1] = std::max(rk4_step(well, p.theta[j], -dz), 0.0);
        if (p.theta[j - 1] > p.theta[j] + 1e-14) {
            throw NonMonotoneProfile("solve_standing_wave: profile increased at j=" +
                                     std::to_string(j - 1));
        }
    }

    p.dtheta.resize(n);
    p.weight.resize(n);
    for (int j = 0; j < n; ++j) {
        p.dtheta[j] = profile_slope(well, p.theta[j]);
        p.weight[j] = p.dtheta[j] * p.dtheta[j];
    }
    p.c0 = compute_c0(p);
    return p;
}

double compute_c0(const StandingWaveProfile& profile) {
    const auto& w = profile.weight;
    if (w.size() < 2) throw std::invalid_argument("compute_c0: empty profile");
    double acc = 0.5 * (w.front() + w.back());
    for (std::size_t j = 1; j + 1 < w.size(); ++j) acc += w[j];
    return acc * profile.dz();
}

void write_profile_csv(const StandingWaveProfile& profile, const std::filesystem::path& path) {
    const std::string header[] = {"z", "theta", "dtheta"};
    std::vector<std::vector<double>> rows;
    rows.reserve(profile.z.size());
    for (std::size_t j = 0; j < profile.z.size(); ++j) {
        rows.push_back({profile.z[j], profile.theta[j], profile.dtheta[j]});
    }
    write_csv(path, header, rows);
}

}  // namespace motility
