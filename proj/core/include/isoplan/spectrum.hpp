#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace isoplan {

/// Endpoints of the support of the squared-singular-value density.
struct Edges {
    double lower = 1.0;
    double upper = 1.0;
};

/// Residual scale below which solve_green accepts a root.
inline constexpr double kGreenTolerance = 1e-12;

/// Scaled residual of skip^{2L} G = (zG - 1) exp((c/skip^2)(1 - 2zG)):
/// |lhs - rhs| / (|lhs| + |rhs|).
double green_residual(std::complex<double> z, std::complex<double> g, double c,
                      double skip = 1.0, std::size_t depth = 1);

/// Physical solution G(z) of skip^{2L} G = (zG - 1) exp((c/skip^2)(1 - 2zG))
/// for Im z > 0: the branch with Im G < 0 and G ~ 1/z at infinity.
///
/// The root is tracked by damped Newton iteration along a vertical path that
/// starts high in the upper half plane (where G ~ 1/z + m1/z^2) and descends
/// geometrically to Im z. The upper half plane contains no branch points, so
/// the continuation cannot switch sheets as long as each step stays small
/// relative to the current height. c = 0 is answered in closed form.
///
/// Throws ContractError when Im z <= 0 or c < 0, NumericalError when the
/// residual cannot be brought below kGreenTolerance.
std::complex<double> solve_green(std::complex<double> z, double c, double skip = 1.0,
                                 std::size_t depth = 1);

/// z_pm = (1 + c +- sqrt(c(2 + c))) exp(+-sqrt(c(2 + c))), valid for skip = 1.
Edges spectral_edges(double c);

/// First moment of the squared singular values, skip^{2L} exp(c/skip^2).
double spectral_mean(double c, double skip = 1.0, std::size_t depth = 1);

/// Support edges found from the density alone: walks outward from the bulk
/// until the density drops below `threshold` and bisects the crossing.
Edges locate_support_edges(double c, double skip = 1.0, std::size_t depth = 1,
                           double threshold = 1e-6);

struct GridSpec {
    std::size_t points = 2000;
    /// Regularization is epsilon_scale * (upper - lower).
    double epsilon_scale = 1e-6;
};

enum class SpectrumAxis { SquaredSingular, Singular };

/// Density of squared singular values (or singular values) on a grid.
struct TheoreticalSpectrum {
    double c = 0.0;
    double skip = 1.0;
    std::size_t depth = 1;
    SpectrumAxis axis = SpectrumAxis::SquaredSingular;
    std::vector<double> grid;     ///< strictly increasing abscissae
    std::vector<double> density;  ///< non-negative, same length as grid
    Edges edges;
    double epsilon = 0.0;
    /// Degenerate spectrum: all mass at `grid[0]`, `density` is {1}.
    bool point_mass = false;

    /// Trapezoid integral of the density (1 for a point mass).
    double normalization() const;
    /// Trapezoid integral of x * density.
    double first_moment() const;
};

/// Cumulative distribution of a TheoreticalSpectrum, normalized to end at 1,
/// linear between grid points (a step for a point mass).
class SpectrumCdf {
public:
    explicit SpectrumCdf(const TheoreticalSpectrum& spectrum);

    double operator()(double x) const;

private:
    std::vector<double> grid_;
    std::vector<double> cumulative_;
    bool point_mass_ = false;
};

/// rho(lambda) = -Im G(lambda + i eps) / pi, Richardson-extrapolated from eps
/// and 2 eps, on a cosine grid clustered at both edges. For skip = 1 the
/// edges come from spectral_edges, otherwise from locate_support_edges.
/// c = 0 yields a point mass at skip^{2L}.
TheoreticalSpectrum spectral_density(double c, double skip = 1.0, std::size_t depth = 1,
                                     const GridSpec& grid = {});

/// Change of variables s = sqrt(lambda), rho_s(s) = 2 s rho(s^2).
/// Throws ContractError if the input is already on the singular axis.
TheoreticalSpectrum to_singular_density(const TheoreticalSpectrum& spectrum);

}  // namespace isoplan
