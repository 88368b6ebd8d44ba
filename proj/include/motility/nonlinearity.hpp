#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "motility/potential.hpp"

namespace motility {

// Solve psi'' + V psi' - psi = beta * theta0' on the profile grid with
// psi(+-L) = 0, using second-order centered differences and the Thomas
// algorithm.  Returns psi on all M+1 nodes (boundary entries exactly zero).
// Requires |V| * dz < 2 so the tridiagonal system stays diagonally dominant;
// violations raise SingularSystem.
std::vector<double> solve_psi(const StandingWaveProfile& profile, double V, double beta);

enum class PhiKind { BvpBacked, Toy, Tabulated };

// The velocity nonlinearity Phi(V).  Three flavors share one evaluation
// surface:
//   BvpBacked - Phi(V) = integral of psi_V * (theta0')^2, from the boundary
//               value problem above; sampled on a uniform V-table with cubic
//               interpolation between nodes and direct solves outside it.
//   Toy       - the closed form -beta * (1 - tanh V) * exp(-V^2) everywhere
//               (the table is still built, for norms and export).
//   Tabulated - a user-supplied table, cubic interpolation only; evaluation
//               outside the covered range throws std::domain_error.
//
// value() is the raw quadrature above.  response() is what enters the
// curve-shape equations: the profile-backed flavor measures force against the
// interface mass c0 (the one-dimensional law reads c0 V = integral, so the
// velocity response is value/c0), while the closed-form and tabulated flavors
// are already expressed as responses (scale 1 unless the caller says
// otherwise).
class PhiFunction {
  public:
    struct Table {
        double v_min = 0.0;
        double v_max = 0.0;
        double dv = 0.0;
        std::vector<double> v;
        std::vector<double> phi;
        std::vector<double> phi_prime;
    };

    static PhiFunction bvp_backed(const StandingWaveProfile& profile, double beta,
                                  double v_max = 10.0, double dv = 0.01);
    static PhiFunction toy(double beta, double v_max = 10.0, double dv = 0.01);
    static PhiFunction tabulated(std::vector<double> v, std::vector<double> phi,
                                 std::vector<double> phi_prime, double response_scale = 1.0);
    // Read a table written by write_csv (columns v, phi, phi_prime).
    static PhiFunction from_csv(const std::filesystem::path& path, double response_scale = 1.0);

    double value(double V) const;
    double operator()(double V) const { return value(V); }
    double derivative(double V) const;

    // Velocity response seen by the curve-shape equations (see class note).
    double response(double V) const { return response_scale_ * value(V); }
    double response_derivative(double V) const { return response_scale_ * derivative(V); }
    double response_scale() const { return response_scale_; }

    // Largest |Phi| over the sample table (toy/BVP tables decay toward the
    // edges, so this is the sup norm for practical purposes).
    double sup_abs() const;
    // Largest |Phi'| over table nodes with |v| <= v_cap.
    double max_abs_derivative(double v_cap) const;

    PhiKind kind() const { return kind_; }
    double beta() const { return beta_; }
    const Table& table() const { return table_; }

    void write_csv(const std::filesystem::path& path) const;

  private:
    PhiFunction() = default;

    double interp(const std::vector<double>& col, double V) const;

    PhiKind kind_ = PhiKind::Toy;
    double beta_ = 0.0;
    double response_scale_ = 1.0;
    Table table_;
    std::shared_ptr<const StandingWaveProfile> profile_;  // BvpBacked fallback solves
};

// Largest beta for which |Phi_beta'| stays below 1 over |V| <= v_max, found by
// bisection on [0, beta_hi] down to bracket width `bracket_tol`.  make_phi
// must produce the Phi object for a given beta.  Throws BracketFailure when
// even beta_hi keeps the derivative below 1.
double estimate_beta_crit(const std::function<PhiFunction(double)>& make_phi, double v_max,
                          double beta_hi, double bracket_tol = 1e-3);

// Convenience wrappers for the two built-in families.
double estimate_beta_crit_bvp(const StandingWaveProfile& profile, double v_max, double beta_hi,
                              double bracket_tol = 1e-3);
double estimate_beta_crit_toy(double v_max, double beta_hi, double bracket_tol = 1e-3);

}  // namespace motility
