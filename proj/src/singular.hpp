#pragma once

#include "model.hpp"

#include <string>
#include <vector>

namespace memsfold {

enum class OrbitKind { TypeI, TypeII, TypeIII };

const char* to_string(OrbitKind k) noexcept;

struct SingularOrbit {
    OrbitKind kind = OrbitKind::TypeII;
    double delta = 0.0;  // type I only
    double lambda = 0.0; // type III only (0 otherwise)
    double u_min = 0.0;  // shifted minimum, type III only
    SolutionProfile profile;
    double norm2 = 0.0;
};

// u = |x| - 1.
SingularOrbit type2_orbit(int n = 2001);

// Ramps of slope -+2/(sqrt3 delta) around a plateau at u = -1; 0 <= delta < 2/sqrt3.
SingularOrbit type1_orbit(double delta, int n = 2001);

// G(m) = int_m^1 du / sqrt(1/m - 1/u), by adaptive quadrature after u = m(1+s^2).
double type3_G(double u_min);
// Closed form of the same integral, for testing the quadrature.
double type3_G_closed(double u_min);

struct Type3BranchPoint {
    double u_min = 0.0;
    double lambda = 0.0;
    double norm2 = 0.0;
    bool ok = true;
    std::string error;
};

Type3BranchPoint type3_point(double u_min);
std::vector<Type3BranchPoint> type3_branch(const std::vector<double>& u_min_grid);
SingularOrbit type3_orbit(double u_min, int n = 2001);

// Maximum of lambda over the type-III branch (the eps = 0 fold).
Type3BranchPoint type3_fold();

struct DiagramPoint {
    std::string kind; // B1, B2, B3 or B
    double param = 0.0;
    double lambda = 0.0;
    double norm2 = 0.0;
};

// u_min samples log-spaced towards 0 (approach to B) and towards 1 (flat limit).
std::vector<double> type3_grid(int n);

std::vector<DiagramPoint> singular_diagram(int n = 200);

} // namespace memsfold
