#pragma once

#include "integrate.hpp"
#include "model.hpp"

#include <optional>
#include <vector>

namespace memsfold {

struct ShootingOptions {
    Tolerance tol{1e-12, 1e-11};
    double root_tol = 1e-10;
    // cap on desingularized pseudo-time for the boundary shot
    double max_pseudo_time = 1e60;
    // cap on the half-length explored by the centre shot
    double max_half_length = 4.0;
};

// Boundary shot: integrates the desingularized system from (u, w, xi) =
// (1, w0, -1) until w first returns to zero.
struct ShotResult {
    double w0 = 0.0;
    bool turned = false;
    double xi_at_turn = 0.0;
    double u_at_turn = 0.0;
    Trajectory<3> half_profile;
};

ShotResult shoot_half(const ModelParams& p, double w0, const ShootingOptions& opt = {});

// xi at the turning point, or +1 when u collapses towards 0 without turning.
double residual(const ModelParams& p, double w0, const ShootingOptions& opt = {});

// Centre shot: starts at the symmetry point with u~ = eps + exp(theta), w = 0
// and integrates outwards in x until u~ = 1. The state is (log v, w / v,
// int (u~ - 1)^2) with v = u~ - eps, which stays well conditioned when the
// solution clings to the saddle level u~ = eps for most of the interval.
struct CenterShot {
    double theta = 0.0;
    double half_length = 0.0; // x distance from the centre to u~ = 1
    bool reached = false;     // false when max_half_length was hit first
    double w0 = 0.0;          // slope at x = -1 after mirroring
    double norm2 = 0.0;       // ||u||_2^2 of the mirrored profile
    double u_min = 0.0;       // u~ at the centre
};

// Largest admissible theta (u~_min = 1).
double theta_max(double eps);

CenterShot center_shot(const ModelParams& p, double theta, const ShootingOptions& opt = {});

// half_length - 1; zero for solutions of the boundary value problem.
double center_residual(const ModelParams& p, double theta, const ShootingOptions& opt = {});

// Mirrored profile on [-1, 1] in original variables.
SolutionProfile build_profile(const ModelParams& p, double theta, const ShootingOptions& opt = {});

struct Solution {
    double theta = 0.0;
    SolutionProfile profile;
};

struct FindOptions {
    ShootingOptions shooting;
    int n_seeds = 400;
    double dedup_tol = 1e-8;
    // optional window on the boundary slope w0
    std::optional<double> w0_min;
    std::optional<double> w0_max;
};

// All solutions at fixed (eps, lambda), sorted by norm2.
std::vector<Solution> find_solutions(const ModelParams& p, const FindOptions& opt = {});

// Root of center_residual in theta inside [lo, hi] (residual must change sign).
double refine_theta(const ModelParams& p, double lo, double hi, const ShootingOptions& opt = {});

} // namespace memsfold
