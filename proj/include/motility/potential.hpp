#pragma once

#include <filesystem>
#include <vector>

namespace motility {

enum class WellKind { AllenCahn, AsymmetricPolynomial, CustomPolynomial };

// Double-well potential W on [0, 1] with W(0) = W(1) = 0 and W > 0 strictly
// inside.  The named variants use factored closed forms (better conditioned
// near the wells than expanded coefficients); custom wells are polynomials in
// ascending-power coefficient order with the derivative taken term by term at
// construction.
class PotentialWell {
  public:
    static PotentialWell allen_cahn();               // z^2 (1-z)^2 / 4
    static PotentialWell asymmetric(double a);       // z^2 (1-z)^2 (1 + a z^2) / 4
    static PotentialWell polynomial(std::vector<double> coeffs);

    double value(double z) const;
    double derivative(double z) const;

    WellKind kind() const { return kind_; }
    double asymmetry() const { return a_; }

  private:
    PotentialWell(WellKind kind, double a, std::vector<double> coeffs);
    void validate() const;  // throws DegenerateWell on shape violations

    WellKind kind_;
    double a_ = 0.0;                 // AsymmetricPolynomial strength
    std::vector<double> coeffs_;     // CustomPolynomial: W coefficients
    std::vector<double> dcoeffs_;    // CustomPolynomial: W' coefficients
};

// Monotone connection between the two wells: theta' = sqrt(2 W(theta)) with
// theta(0) = 1/2, sampled on the uniform grid z_j = -L + j * dz, dz = 2L/M.
// M must be even so the grid has an exact center node.
struct StandingWaveProfile {
    double half_width = 0.0;      // L
    int intervals = 0;            // M; the grid has M + 1 nodes
    std::vector<double> z;        // grid nodes
    std::vector<double> theta;    // profile values
    std::vector<double> dtheta;   // sqrt(2 W(theta)), evaluated pointwise
    std::vector<double> weight;   // dtheta^2, the interface weight
    double c0 = 0.0;              // trapezoid integral of weight

    double dz() const { return 2.0 * half_width / intervals; }
    int center_index() const { return intervals / 2; }
};

// Classical fixed-step RK4 from the center condition outward in both
// directions.  Negative 2W(theta) beyond -1e-14 aborts with DegenerateWell;
// tiny negative values are clamped to zero.  A non-monotone result raises
// NonMonotoneProfile.  Requires L > 0 and even M >= 16.
StandingWaveProfile solve_standing_wave(const PotentialWell& well, double half_width,
                                        int intervals);

// Trapezoid integral of (theta')^2 over the grid.
double compute_c0(const StandingWaveProfile& profile);

// Write the profile as CSV with columns z, theta, dtheta.
void write_profile_csv(const StandingWaveProfile& profile, const std::filesystem::path& path);

}  // namespace motility
