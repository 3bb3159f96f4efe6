#pragma once

#include <complex>
#include <functional>
#include <initializer_list>
#include <vector>

#include "crane/errors.hpp"

// Small dense numerical kernels used across the library: vectors and
// matrices up to ~8x8, LU solves, eigenvalues, polynomials, fixed-step
// RK4 integration, finite-difference Jacobians and a Lyapunov solver.
// Everything is allocation-light and deterministic; nothing here is
// tuned for large-scale problems.

namespace crane::num {

using Vec = std::vector<double>;
using Complex = std::complex<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> entries);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& entries() const { return a_; }

    Matrix transpose() const;
    Vec row(std::size_t i) const;
    Vec col(std::size_t j) const;
    void set_col(std::size_t j, const Vec& v);

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    bool finite() const;

private:
    std::size_t rows_{0}, cols_{0};
    std::vector<double> a_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(Matrix lhs, double s);
Matrix operator*(double s, Matrix rhs);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Vec operator*(const Matrix& m, const Vec& v);

// Column vector as an n x 1 matrix.
Matrix as_column(const Vec& v);
// v * w^T outer product.
Matrix outer(const Vec& v, const Vec& w);

double dot(const Vec& a, const Vec& b);
Vec axpy(double a, const Vec& x, const Vec& y); // a*x + y
Vec scale(double a, Vec x);
double norm2(const Vec& v);
double norm_inf(const Vec& v);
double norm_inf(const Matrix& m);
bool finite(const Vec& v);

// ---------------------------------------------------------------------------
// Linear solves
// ---------------------------------------------------------------------------

// Dense LU with partial pivoting. Throws DomainError on (numerically)
// singular input.
Vec solve(Matrix a, Vec b);
Matrix solve(Matrix a, Matrix b);
Matrix inverse(const Matrix& a);

// Complex variant, used by the Hamiltonian eigenvector route.
std::vector<Complex> solve_complex(std::vector<std::vector<Complex>> a, std::vector<Complex> b);

// Rank via column-pivoted elimination; tol is relative to the largest
// column norm (tol <= 0 picks 1e-9).
int rank(Matrix m, double tol = -1.0);

// ---------------------------------------------------------------------------
// Eigenvalues
// ---------------------------------------------------------------------------

// All eigenvalues of a real square matrix: Hessenberg reduction followed
// by implicit double-shift QR with an iteration cap of 100*n. Throws
// ConvergenceError if the cap is hit (no partial results).
std::vector<Complex> eigenvalues(const Matrix& m);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations (ascending).
Vec symmetric_eigenvalues(Matrix m);

// Singular values (descending) via the symmetric eigenproblem of M^T M.
Vec singular_values(const Matrix& m);

// Right eigenvector for an approximate eigenvalue via shifted inverse
// iteration; works for well-separated eigenvalues of small matrices.
std::vector<Complex> eigenvector(const Matrix& m, Complex lambda);

// Greedy nearest-neighbour pairing distance between two eigenvalue
// multisets; returns the largest matched distance.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b);

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

// Real polynomial, coefficients in descending powers; leading coefficient
// nonzero unless the polynomial is identically zero.
struct Polynomial {
    Vec coeffs;

    std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    double eval(double x) const;
    Complex eval(Complex x) const;
    Polynomial& normalize_monic();
    void trim(double tol = 0.0);
};

// Real monic polynomial from a conjugate-closed root list. Throws
// DomainError if a complex root lacks its conjugate partner.
Polynomial poly_from_roots(const std::vector<Complex>& roots);

// Characteristic polynomial det(sI - A) by the Faddeev-LeVerrier recursion.
Polynomial characteristic_polynomial(const Matrix& a);

// p(A) for a square matrix (Horner).
Matrix polyval_matrix(const Polynomial& p, const Matrix& a);

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

// Autonomous vector field with a scalar input held constant over a step.
using Field = std::function<Vec(const Vec& state, double input)>;

// One classical RK4 step. Throws IntegrationError (time 0) on a
// non-finite stage value.
Vec rk4_step(const Field& field, const Vec& state, double input, double dt);

struct Trajectory {
    Vec times;
    std::vector<Vec> states;
    Vec inputs;

    std::size_t size() const { return times.size(); }
};

// Fixed-step RK4 rollout on [0, t_end] sampling state and input at every
// grid point (floor(t_end/dt) + 1 samples). Deterministic.
Trajectory integrate(const Field& field, const Vec& x0,
                     const std::function<double(double)>& input_fn, double t_end, double dt);

// ---------------------------------------------------------------------------
// Derivatives and Lyapunov
// ---------------------------------------------------------------------------

// Central-difference Jacobian of fn at x, one column per coordinate.
Matrix jacobian_fd(const std::function<Vec(const Vec&)>& fn, const Vec& x, double eps);

// Solve A^T P + P A + Q = 0 for symmetric P via the vectorized n^2 x n^2
// system. Requires A Hurwitz (throws DomainError naming the offending
// eigenvalue) and symmetric Q.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

} // namespace crane::num
