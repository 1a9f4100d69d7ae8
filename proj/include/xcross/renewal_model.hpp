#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

namespace xcross {

struct Exponential {
    double rate = 1.0;
};
struct Gamma {
    double shape = 1.0;
    double rate = 1.0;
};
struct Deterministic {
    double value = 1.0;
};

using DistSpec = std::variant<Exponential, Gamma, Deterministic>;

void validate(const DistSpec& d);
std::string describe(const DistSpec& d);

// Inter-arrival law T, claim law Y and, optionally, a different law for the first arrival T1.
struct ModelSpec {
    DistSpec t = Exponential{1.0};
    DistSpec y = Exponential{1.0};
    std::optional<DistSpec> first_arrival;

    const DistSpec& first_arrival_law() const { return first_arrival ? *first_arrival : t; }
};

struct VariableMoments {
    double mean = 0.0;
    double variance = 0.0;
    double mu3 = 0.0;   // third central moment
    double raw4 = 0.0;  // E X^4
};

struct MomentSet {
    double e_t = 1.0;
    double var_t = 1.0;
    double mu3_t = 2.0;
    double e_t4 = 24.0;
    double e_y = 1.0;
    double var_y = 1.0;
    double mu3_y = 2.0;
    double e_y4 = 24.0;
    double e_y2 = 2.0;

    static MomentSet from(const VariableMoments& t, const VariableMoments& y);
};

// Throws DomainError when a moment invariant fails.
void validate(const MomentSet& m);

VariableMoments moments_of(const DistSpec& d);
MomentSet moments_of(const ModelSpec& model);

struct DerivedConstants {
    double m = 0.0;
    double d2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
    double b4 = 0.0;
    double k_f = 0.0;
    double k_s = 0.0;
    double c_star = 0.0;
    double drift = 0.0;  // the c the K constants were derived for
};

DerivedConstants derive_constants(const MomentSet& moments, double c);

// Only M and D^2 known: enough for I_M, I_F, I_S. B and K fields are NaN.
DerivedConstants constants_from_md2(double m, double d2, double c);

// derive_constants(m, c).k_f minus (ET DY/(c D^2 EY^2) + ET/(c D^2)): the ET DY/(2cD^2 EY^2) + ET/(2cD^2)
// part of the expansion taken with the opposite sign. No default path uses it; see README.
double sign_corrected_k_f(const MomentSet& moments, double c);

// The four normalized kernels evaluated at (n, a, b).
struct IdentityKernels {
    double y_n;       // (a - n EY) / sqrt(n DY)
    double t_n;       // (b - n ET) / sqrt(n DT)
    double delta_n;   // (b EY - a ET) / sqrt(B1 n)
    double lambda_n;  // (B1 n - (B2 a + B3 b)) / sqrt(B1 B4 n)
};
IdentityKernels identity_kernels(const MomentSet& moments, long n, double a, double b);

// Absolute residuals of five kernel identities at (n, a, b); each is zero in exact arithmetic.
//  [0] Y_n^2 + T_n^2 = Delta_n^2 + Lambda_n^2
//  [1] Lambda_{n+1} - Lambda_n = sqrt(B1/(B4 n)) + Lambda_{n+1} (1 - sqrt(1 + 1/n))
//  [2] 1 - a/(n EY) = R_n, with R_n = (sqrt(B4) Lambda_n + B3/EY Delta_n) / sqrt(B1 n)
//  [3] 1 - sqrt(a/(n EY)) = R_n / (1 + sqrt(a/(n EY)))      (needs a >= 0)
//  [4] 1 - b/(n ET) = (sqrt(B4) Lambda_n - B2/ET Delta_n) / sqrt(B1 n)
std::array<double, 5> fundamental_identity_residuals(const MomentSet& moments, long n, double a, double b);

}  // namespace xcross
