#pragma once

#include "model.hpp"
#include "shooting.hpp"

#include <string>
#include <vector>

namespace memsfold {

enum class Stability { Stable, Unstable, Unknown };

const char* to_string(Stability s) noexcept;

struct BranchPoint {
    double lambda = 0.0;
    double eps = 0.0;
    double delta = 0.0; // 0 when lambda == 0
    double theta = 0.0; // centre log-gap, see CenterShot
    double w0 = 0.0;
    double norm2 = 0.0;
    double residual = 0.0;
    double arclength = 0.0;
    Stability stability = Stability::Unknown;
    bool is_fold = false;
};

enum class FoldKind { Lower, Upper }; // Lower: local min of lambda, Upper: local max

struct FoldPoint {
    double lambda = 0.0;
    double w0 = 0.0;
    double norm2 = 0.0;
    double theta = 0.0;
    FoldKind kind = FoldKind::Upper;
    double dlambda_ds = 0.0; // residual slope of the refined fold
    std::size_t index = 0;   // position in Branch::points once inserted
};

struct Branch {
    double eps = 0.0;
    std::vector<BranchPoint> points;
    std::vector<FoldPoint> folds;
    bool truncated = false;  // corrector failed at h_min
    std::string diagnostic;
};

struct ContinuationOptions {
    ShootingOptions shooting;
    double h0 = 0.01;
    double h_min = 1e-6;
    double h_max = 0.05;
    double s_max = 20.0;
    double lambda_max = 1.0;
    double lambda_stop_eps0 = 1e-6;
    int max_newton = 12;
    double newton_tol = 1e-10;
    double fd_rel = 1e-7;
    double fd_floor = 1e-9;
    double max_turn_deg = 30.0;
    std::size_t max_points = 20000;
};

struct BranchStart {
    double lambda;
    double theta;
};

// Lower-branch start at small lambda (theta just below theta_max).
BranchStart lower_branch_start(double eps, double lambda0 = 0.005,
                               const ShootingOptions& opt = {});

Branch trace_branch(double eps, const BranchStart& start, const ContinuationOptions& opt = {});
Branch trace_branch(double eps, const ContinuationOptions& opt = {});

// Locates and refines folds; does not modify the branch.
std::vector<FoldPoint> detect_folds(const Branch& branch, const ContinuationOptions& opt = {});

// Copy of the branch with refined folds inserted as flagged points.
Branch with_folds(const Branch& branch, const std::vector<FoldPoint>& folds);

struct StabilityOptions {
    int n = 2001;
    double threshold = 1e-8;
};

// Sign of the smallest Dirichlet eigenvalue of -psi'' + f_u(u) psi.
Stability classify_stability(const SolutionProfile& profile, const ModelParams& p,
                             const StabilityOptions& opt = {});
double smallest_eigenvalue(const SolutionProfile& profile, const ModelParams& p, int n = 2001);

// Fills BranchPoint::stability for every point.
void annotate_stability(Branch& branch, const ContinuationOptions& opt = {},
                        const StabilityOptions& sopt = {});

// Full pipeline: trace, refine folds, classify.
Branch compute_branch(double eps, const ContinuationOptions& opt = {}, bool classify = true);

struct FoldRow {
    double eps = 0.0;
    double lambda_star_numeric = 0.0;
    double lambda_star_asymptotic = 0.0;
    double abs_error = 0.0;
    double lambda_upper_numeric = 0.0;
    bool ok = true;
    std::string error;
};

std::vector<FoldRow> fold_report(const std::vector<double>& eps_list,
                                 const ContinuationOptions& opt = {});

// Solves {R(lambda, theta) = 0, norm2(lambda, theta) = target} near a guess.
// Returns false when Newton fails.
bool solve_at_norm(double eps, double target, double& lambda, double& theta,
                   const ContinuationOptions& opt = {});

// Central difference of the largest-norm solution's norm2 in lambda, over
// [lambda - half_width, lambda + half_width].
double upper_norm_slope(double eps, double lambda, double half_width, const FindOptions& opt = {});

} // namespace memsfold
