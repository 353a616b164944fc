// Landau-Lifshitz equation linearized about a constant unit vector a:
//
//   dz/dt = A z + u(t),   A z = nu z_xx + a x z_xx,   z_x = 0 at both ends.
//
// Operator application, its nodal matrix, analytic and numeric spectra, and
// a fixed-step integrator.
#pragma once

#include "llhyst/core.hpp"
#include "llhyst/llpde.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace llhyst::lin {

using ll::LLParams;
using ll::ProbeSpec;

/// Constant equilibrium a with |a| = 1 (to 1e-12).
class LinearizationPoint {
public:
    explicit LinearizationPoint(const Vec3& a);
    const Vec3& a() const noexcept { return a_; }

private:
    Vec3 a_;
};

MagnetizationField apply_A(const MagnetizationField& z, const LLParams& p, const LinearizationPoint& at);

/// Eigenvalues attached to the Neumann mode cos(m pi x / L).
struct SpectrumEntry {
    std::size_t mode = 0;
    /// {0} for mode 0, otherwise {real, upper complex, lower complex}.
    std::vector<std::complex<double>> values;
};

/// Exact eigenvalues of A for modes 0..max_mode:
/// -m^2 pi^2 nu / L^2 and -m^2 pi^2 nu / L^2 +- i m^2 pi^2 / L^2.
std::vector<SpectrumEntry> analytic_spectrum(const LLParams& p, std::size_t max_mode);

/// 3n x 3n matrix of apply_A in the node-major basis (index 3j + c).
Eigen::MatrixXd discretize_A(const LLParams& p, const LinearizationPoint& at);

/// All eigenvalues of a dense real matrix, sorted by real part (descending)
/// then imaginary part (ascending). Throws Error if the solver fails.
std::vector<std::complex<double>> numeric_spectrum(const Eigen::MatrixXd& m);

/// One analytic eigenvalue paired with its nearest numeric one.
struct ModeMatch {
    std::size_t mode = 0;
    std::complex<double> analytic;
    std::complex<double> numeric;
    double abs_error = 0.0;
};

/// Greedy nearest-neighbour pairing: analytic values are visited in order of
/// increasing modulus and each takes the closest unused numeric value.
std::vector<ModeMatch> match_spectrum(const std::vector<SpectrumEntry>& analytic,
                                      const std::vector<std::complex<double>>& numeric);

/// Largest real part of any eigenvalue.
double max_real_part(const std::vector<std::complex<double>>& values);

/// Number of eigenvalues with modulus <= tol.
std::size_t kernel_dimension(const std::vector<std::complex<double>>& values, double tol);

/// RK4 limit for the operator: 2 / rho with rho = (4 / h^2) sqrt(1 + nu^2).
double stability_bound(const LLParams& p);

struct LinearRun {
    Trajectory trajectory;
    ll::ResolvedProbe probe;
    MagnetizationField final_state;
};

/// RK4 on dz/dt = A z + u(t) (u uniform over nodes, on the input's channel).
/// No renormalization. Throws StabilityError / SimulationError.
LinearRun integrate_linear(const MagnetizationField& z0, const LLParams& p,
                           const LinearizationPoint& at, const std::optional<HarmonicInput>& input,
                           const StepPlan& plan, const ProbeSpec& probe);

LinearRun integrate_linear(const MagnetizationField& z0, const LLParams& p,
                           const LinearizationPoint& at, const std::optional<HarmonicInput>& input,
                           double t_end, double dt, const ProbeSpec& probe, std::size_t stride = 1);

}  // namespace llhyst::lin
