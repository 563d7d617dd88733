#pragma once

#include "integrate.hpp"

#include <string>
#include <vector>

namespace memsfold {

// Chart K1: (u, w, xi, eps) = (r1, w1, xi1, r1 eps1).
struct K1State {
    double r1;
    double w1;
    double xi1;
    double eps1;
};

// Chart K2: (u, w, xi, eps) = (r2 u2, w2, xi2, r2).
struct K2State {
    double u2;
    double w2;
    double xi2;
    double r2;
};

// Chart kappa1 of the small-lambda blow-up: (r1, w, xi, lambda1), lambda = r1 lambda1.
struct Kappa1State {
    double r1;
    double w;
    double xi;
    double lambda1;
};

using Vec4 = std::array<double, 4>;

Vec4 rhs_K1(const K1State& s, double delta);
Vec4 rhs_K2(const K2State& s, double delta);
Vec4 rhs_kappa1(const Kappa1State& s, double delta);

K2State kappa12(const K1State& s);
K1State kappa21(const K2State& s);

// Stable (sign < 0) / unstable (sign > 0) manifold of the saddle (1, 0) in K2.
double w2_manifold(double u2, int sign);
// Same graph in K1 coordinates, eps1 = 1/u2.
double w1_manifold(double eps1, int sign);

double hamiltonian_K2(double u2, double w2);

struct SectionSpec {
    double rho = 0.5;
    double sigma = 0.1;
};

struct K1Transition {
    double w1_out = 0.0;
    double xi1_out = 0.0;
    double w1_closed = 0.0; // closed-form slope at eps1 = sigma
};

// From (r1, w1, xi1, eps1) = (1, w_init, -1, eps) to the exit section eps1 = sigma.
K1Transition transition_K1(double w_init, double eps, double delta, double sigma = 0.1,
                           const Tolerance& tol = {1e-12, 1e-12});

struct W0A {
    double w0 = 0.0;
    double leading = 0.0; // -1 + lambda ln lambda
    int iterations = 0;
};

W0A solve_w0A(double lambda, double delta);

// Slope on the K1 orbit from the boundary, in K2 coordinates.
double w2_on_orbit(double u2, double dw, double eps);

struct K2Passage {
    double u2_out = 0.0;   // u2 where w2 returns to zero
    double integral = 0.0; // int du2 / w2 from u2_in to u2_out
    double h_drift = 0.0;  // relative Hamiltonian drift (eps = 0 only)
};

// Integrates the (u2, w2) subsystem from u2_in on the orbit with offset dw.
K2Passage k2_passage(double dw, double eps, double u2_in = 10.0, const Tolerance& tol = {1e-12, 1e-12});

struct CheckItem {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

struct ChecksReport {
    std::vector<CheckItem> items;
    bool all_pass() const;
};

struct ChartsCheckOptions {
    SectionSpec sections;
    Tolerance tol{1e-10, 1e-10};
};

ChecksReport charts_check(const ChartsCheckOptions& opt = {});

} // namespace memsfold
