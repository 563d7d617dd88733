#pragma once

#include <array>
#include <optional>
#include <vector>

namespace memsfold {

// (eps, lambda) with the derived delta = sqrt(eps / lambda). delta is left
// undefined at lambda == 0.
class ModelParams {
public:
    ModelParams(double eps, double lambda);

    double eps() const noexcept { return eps_; }
    double lambda() const noexcept { return lambda_; }
    bool has_delta() const noexcept { return lambda_ > 0.0; }
    // Throws DomainError when lambda == 0.
    double delta() const;

    static ModelParams from_delta(double eps, double delta);

private:
    double eps_;
    double lambda_;
};

enum class Formulation { Original, Desingularized, Rescaled };

// Deflection u in (-1, 0] and slope w = u'.
struct StateOriginal {
    double u;
    double w;
};

// Shifted deflection u = 1 + u_orig in (0, 1], slope w, space xi.
struct StateShifted {
    double u;
    double w;
    double xi;
};

// Shifted deflection with rescaled slope w = delta * w_shifted.
struct StateRescaled {
    double u;
    double w;
    double xi;
};

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// u' = u^4 w, w' = lambda (u^2 - eps^2), xi' = u^4.
Vec3 rhs_desingularized(const StateShifted& s, const ModelParams& p);

// u' = u^4 w, w' = eps (u^2 - eps^2), xi' = delta u^4.
Vec3 rhs_rescaled(const StateRescaled& s, const ModelParams& p);

// u' = w, w' = lambda / (1+u)^2 [1 - eps^2 / (1+u)^2]; requires u > -1.
Vec2 rhs_original(double x, const StateOriginal& s, const ModelParams& p);

StateRescaled to_rescaled(const StateShifted& s, const ModelParams& p);
StateShifted to_shifted(const StateRescaled& s, const ModelParams& p);

double delta_of(double eps, double lambda);
double lambda_of(double eps, double delta);

// Steady-state forcing f(u) of u'' = f(u) in original variables and its
// derivative with respect to u.
double forcing(double u, const ModelParams& p);
double forcing_du(double u, const ModelParams& p);

// Sampled even solution on [-1, 1] in original variables. A breakpoint may be
// repeated to carry a jump in w (piecewise-linear singular profiles).
struct SolutionProfile {
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> w;
    double eps = 0.0;
    double lambda = 0.0;
    double norm2 = 0.0;
    double w0 = 0.0;

    // Cubic Hermite interpolation of u (and w) at x in [-1, 1].
    double u_at(double xq) const;
    double w_at(double xq) const;
};

// ||u||_2^2 over [-1, 1] via ||u||^2 = 2 - 2 ||u~||_1 + ||u~||_2^2, with
// u~ = 1 + u. Uses the endpoint-corrected trapezoid rule on the profile's
// (u, u') samples, which is fourth order on smooth data.
double norm_u2(const SolutionProfile& profile);

} // namespace memsfold
