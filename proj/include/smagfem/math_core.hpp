#pragma once

// Pointwise tensor algebra for the p-Laplacian (p=3) flux and the
// curl-advection identity used by the stabilization analysis. All
// functions are pure and thread-safe.

#include <array>
#include <cassert>

namespace smagfem {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double max_abs() const;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);

// Small d x d matrix, d in {2,3}. Entry (i,j) is row i, column j; for
// velocity gradients row i holds the gradient of component i (Jacobian
// convention).
struct Tensor2 {
    int d = 2;
    std::array<std::array<double, 3>, 3> a{};

    static Tensor2 zero(int d) { return Tensor2{d, {}}; }
    static Tensor2 identity(int d);

    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    Vec3 row(int i) const { return {a[i][0], a[i][1], a[i][2]}; }
    Tensor2 transposed() const;
};

Tensor2 operator+(const Tensor2& x, const Tensor2& z);
Tensor2 operator-(const Tensor2& x, const Tensor2& z);
Tensor2 operator*(double s, const Tensor2& x);

// (sum_ij G_ij^2)^{1/2}
double frobenius_norm(const Tensor2& g);

// Frobenius inner product X : Z.
double frobenius_dot(const Tensor2& x, const Tensor2& z);

// |G|_F * G, the p=3 p-Laplacian flux.
Tensor2 p_flux(const Tensor2& g);

// 4 (p_flux(X) - p_flux(Z)) : (X - Z) - |X - Z|_F^3. Nonnegative for all
// tensor pairs.
double monotonicity_residual(const Tensor2& x, const Tensor2& z);

// (|X|_F + |Z|_F) |X - Z|_F - |p_flux(X) - p_flux(Z)|_F. Nonnegative for
// all tensor pairs.
double continuity_gap(const Tensor2& x, const Tensor2& z);

// Row-wise matrix cross product of two 3x3 matrices:
//   c1 =  A2.B3 - A3.B2,  c2 = -(A1.B3 - A3.B1),  c3 = A1.B2 - A2.B1.
Vec3 matrix_cross(const Tensor2& a, const Tensor2& b);

// Affine vector field v(x) = value0 + jac x with jac(i,j) = dv_i/dx_j.
struct AffineField3 {
    Vec3 value0;
    Tensor2 jac = Tensor2::zero(3);

    Vec3 eval(const Vec3& x) const;
    Vec3 curl() const;  // constant for an affine field
};

// Max-norm residual of curl(beta . grad v) - beta . grad(curl v)
// - (grad beta)^t x (grad v) over 10 sample points. Exactly zero (to
// round-off) for affine fields.
double curl_advection_identity_residual(const AffineField3& beta,
                                        const AffineField3& v);

// Tolerance used by the inequality contracts: cubic expressions in the
// inputs amplify round-off with the cube of their magnitude.
inline double cubic_roundoff_scale(const Tensor2& x, const Tensor2& z) {
    double m = frobenius_norm(x);
    double n = frobenius_norm(z);
    double s = 1.0 + (m > n ? m : n);
    return 1e-12 * s * s * s;
}

}  // namespace smagfem
