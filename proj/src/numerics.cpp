#include "crane/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crane::num {

namespace {

bool is_finite(double x) { return std::isfinite(x); }

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
    : rows_(rows), cols_(cols), a_(entries) {
    if (a_.size() != rows * cols)
        throw DomainError("Matrix initializer size does not match dimensions");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vec Matrix::row(std::size_t i) const {
    Vec r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
}

Vec Matrix::col(std::size_t j) const {
    Vec c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void Matrix::set_col(std::size_t j, const Vec& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

bool Matrix::finite() const {
    return std::all_of(a_.begin(), a_.end(), is_finite);
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(Matrix lhs, double s) { return lhs *= s; }
Matrix operator*(double s, Matrix rhs) { return rhs *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols() != rhs.rows()) throw DomainError("matrix product dimension mismatch");
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double lik = lhs(i, k);
            if (lik == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += lik * rhs(k, j);
        }
    return out;
}

Vec operator*(const Matrix& m, const Vec& v) {
    if (m.cols() != v.size()) throw DomainError("matrix-vector dimension mismatch");
    Vec out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

Matrix as_column(const Vec& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

Matrix outer(const Vec& v, const Vec& w) {
    Matrix m(v.size(), w.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * w[j];
    return m;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec axpy(double a, const Vec& x, const Vec& y) {
    Vec out(y);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
    return out;
}

Vec scale(double a, Vec x) {
    for (double& v : x) v *= a;
    return x;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double norm_inf(const Matrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::fabs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

bool finite(const Vec& v) { return std::all_of(v.begin(), v.end(), is_finite); }

// ---------------------------------------------------------------------------
// LU
// ---------------------------------------------------------------------------

namespace {

// In-place LU with partial pivoting; perm holds the row permutation.
void lu_factor(Matrix& a, std::vector<std::size_t>& perm) {
    const std::size_t n = a.rows();
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > best) { best = std::fabs(a(i, k)); piv = i; }
        if (best == 0.0) throw DomainError("singular matrix in LU solve");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(perm[k], perm[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const double lik = a(i, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
}

Vec lu_solve(const Matrix& lu, const std::vector<std::size_t>& perm, const Vec& b) {
    const std::size_t n = lu.rows();
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu(ii, j) * x[j];
        x[ii] /= lu(ii, ii);
    }
    return x;
}

} // namespace

Vec solve(Matrix a, Vec b) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw DomainError("solve: dimension mismatch");
    std::vector<std::size_t> perm;
    lu_factor(a, perm);
    return lu_solve(a, perm, b);
}

Matrix solve(Matrix a, Matrix b) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw DomainError("solve: dimension mismatch");
    std::vector<std::size_t> perm;
    lu_factor(a, perm);
    Matrix x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) x.set_col(j, lu_solve(a, perm, b.col(j)));
    return x;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

std::vector<Complex> solve_complex(std::vector<std::vector<Complex>> a, std::vector<Complex> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a[k][k]);
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > best) { best = std::abs(a[i][k]); piv = i; }
        if (best == 0.0) throw DomainError("singular matrix in complex LU solve");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex lik = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= lik * a[k][j];
            b[i] -= lik * b[k];
        }
    }
    std::vector<Complex> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Complex s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j];
        x[ii] = s / a[ii][ii];
    }
    return x;
}

int rank(Matrix m, double tol) {
    const std::size_t rows = m.rows(), cols = m.cols();
    double scale = 0.0;
    for (std::size_t j = 0; j < cols; ++j) scale = std::max(scale, norm2(m.col(j)));
    if (scale == 0.0) return 0;
    const double threshold = (tol > 0.0 ? tol : 1e-9) * scale;

    int r = 0;
    std::size_t row = 0;
    std::vector<bool> used(cols, false);
    while (row < rows) {
        // pick the remaining column with the largest entry below `row`
        std::size_t best_col = cols;
        double best = threshold;
        std::size_t best_row = row;
        for (std::size_t j = 0; j < cols; ++j) {
            if (used[j]) continue;
            for (std::size_t i = row; i < rows; ++i)
                if (std::fabs(m(i, j)) > best) { best = std::fabs(m(i, j)); best_col = j; best_row = i; }
        }
        if (best_col == cols) break;
        used[best_col] = true;
        if (best_row != row)
            for (std::size_t j = 0; j < cols; ++j) std::swap(m(row, j), m(best_row, j));
        for (std::size_t i = row + 1; i < rows; ++i) {
            const double f = m(i, best_col) / m(row, best_col);
            for (std::size_t j = 0; j < cols; ++j) m(i, j) -= f * m(row, j);
        }
        ++r;
        ++row;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Eigenvalues: Hessenberg + implicit double-shift QR (Francis)
// ---------------------------------------------------------------------------

namespace {

void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        // Householder vector annihilating a(k+2..n-1, k)
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (a(k + 1, k) > 0.0) alpha = -alpha;
        Vec v(n, 0.0);
        v[k + 1] = a(k + 1, k) - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;
        // A <- (I - beta v v^T) A (I - beta v v^T)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
    }
}

// Eigenvalues of a 2x2 block.
void eig2(double a, double b, double c, double d, Complex& l1, Complex& l2) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        l1 = Complex(tr / 2.0 + root, 0.0);
        l2 = Complex(tr / 2.0 - root, 0.0);
    } else {
        const double root = std::sqrt(-disc);
        l1 = Complex(tr / 2.0, root);
        l2 = Complex(tr / 2.0, -root);
    }
}

// Apply a Householder reflection defined by (x1,x2,x3) to rows/cols of h
// in the window used by the Francis sweep.
void francis_sweep(Matrix& h, std::size_t lo, std::size_t hi, double shift_s, double shift_t) {
    const std::size_t n = h.rows();
    double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) - shift_s * h(lo, lo) + shift_t;
    double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - shift_s);
    double z = (lo + 2 <= hi) ? h(lo + 2, lo + 1) * h(lo + 1, lo) : 0.0;

    for (std::size_t k = lo; k <= hi - 1; ++k) {
        const bool have_z = (k + 2 <= hi);
        double alpha = std::sqrt(x * x + y * y + z * z);
        if (alpha == 0.0) { // nothing to rotate at this column; advance the bulge
            if (k + 1 <= hi - 1) {
                x = h(k + 1, k);
                y = h(k + 2 <= hi ? k + 2 : k + 1, k);
                z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
            }
            continue;
        }
        if (x > 0.0) alpha = -alpha;
        double v0 = x - alpha, v1 = y, v2 = z;
        const double vn2 = v0 * v0 + v1 * v1 + v2 * v2;
        if (vn2 > 0.0) {
            const double beta = 2.0 / vn2;
            const std::size_t r0 = k, r1 = k + 1, r2 = have_z ? k + 2 : k + 1;
            // rows
            const std::size_t jstart = (k > lo + 1) ? k - 1 : lo;
            for (std::size_t j = (jstart > 0 ? jstart - (jstart > lo ? 1 : 0) : 0); j < n; ++j) {
                double s = v0 * h(r0, j) + v1 * h(r1, j) + (have_z ? v2 * h(r2, j) : 0.0);
                s *= beta;
                h(r0, j) -= s * v0;
                h(r1, j) -= s * v1;
                if (have_z) h(r2, j) -= s * v2;
            }
            // cols
            const std::size_t iend = std::min(hi, k + 3);
            for (std::size_t i = 0; i <= iend; ++i) {
                double s = v0 * h(i, r0) + v1 * h(i, r1) + (have_z ? v2 * h(i, r2) : 0.0);
                s *= beta;
                h(i, r0) -= s * v0;
                h(i, r1) -= s * v1;
                if (have_z) h(i, r2) -= s * v2;
            }
        }
        if (k + 1 <= hi - 1) {
            x = h(k + 1, k);
            y = h(k + 2, k);
            z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
        }
    }
}

} // namespace

std::vector<Complex> eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) throw DomainError("eigenvalues: matrix must be square");
    if (!m.finite()) throw DomainError("eigenvalues: non-finite entries");
    const std::size_t n = m.rows();
    std::vector<Complex> out;
    if (n == 0) return out;
    if (n == 1) return {Complex(m(0, 0), 0.0)};

    Matrix h = m;
    hessenberg(h);

    const std::size_t max_iter = 100 * n;
    std::size_t iter = 0, stall = 0;
    std::size_t hi = n - 1;
    const double eps = std::numeric_limits<double>::epsilon();

    while (true) {
        // deflate tiny subdiagonals
        for (std::size_t i = 0; i < hi; ++i) {
            const double s = std::fabs(h(i, i)) + std::fabs(h(i + 1, i + 1));
            if (std::fabs(h(i + 1, i)) <= eps * std::max(s, 1e-290)) h(i + 1, i) = 0.0;
        }
        // find active block [lo, hi]
        while (hi > 0 && h(hi, hi - 1) == 0.0) {
            out.emplace_back(h(hi, hi), 0.0);
            if (hi == 0) break;
            --hi;
        }
        if (hi == 0) {
            out.emplace_back(h(0, 0), 0.0);
            break;
        }
        if (hi == 1 || h(hi - 1, hi - 2) == 0.0) {
            const std::size_t lo2 = hi - 1;
            Complex l1, l2;
            eig2(h(lo2, lo2), h(lo2, hi), h(hi, lo2), h(hi, hi), l1, l2);
            out.push_back(l1);
            out.push_back(l2);
            if (lo2 == 0) break;
            hi = lo2 - 1;
            continue;
        }

        std::size_t lo = hi;
        while (lo > 0 && h(lo, lo - 1) != 0.0) --lo;

        if (++iter > max_iter)
            throw ConvergenceError("eigenvalues: QR iteration cap reached",
                                   std::fabs(h(hi, hi - 1)));

        double s = h(hi - 1, hi - 1) + h(hi, hi);
        double t = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
        if (++stall % 17 == 0) { // exceptional shift to break symmetric stalls
            const double d = std::fabs(h(hi, hi - 1)) + std::fabs(h(hi - 1, hi - 2));
            s = 1.5 * d;
            t = d * d;
        }
        francis_sweep(h, lo, hi, s, t);
    }

    return out;
}

Vec symmetric_eigenvalues(Matrix m) {
    const std::size_t n = m.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
    }
    Vec ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

Vec singular_values(const Matrix& m) {
    const Matrix mtm = m.transpose() * m;
    Vec ev = symmetric_eigenvalues(mtm);
    Vec sv(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i)
        sv[i] = std::sqrt(std::max(ev[ev.size() - 1 - i], 0.0));
    return sv;
}

std::vector<Complex> eigenvector(const Matrix& m, Complex lambda) {
    const std::size_t n = m.rows();
    // tiny diagonal perturbation keeps the shifted matrix invertible
    const double shift = 1e-9 * (1.0 + std::abs(lambda));
    std::vector<std::vector<Complex>> a(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = Complex(m(i, j), 0.0) - ((i == j) ? (lambda + Complex(shift, shift)) : Complex(0.0));

    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Complex(1.0 / std::sqrt(double(n)), 0.0);
    for (int it = 0; it < 4; ++it) {
        v = solve_complex(a, v);
        double nv = 0.0;
        for (const auto& x : v) nv += std::norm(x);
        nv = std::sqrt(nv);
        if (nv == 0.0) throw DomainError("eigenvector: inverse iteration collapsed");
        for (auto& x : v) x /= nv;
    }
    return v;
}

double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) throw DomainError("multiset_distance: size mismatch");
    double worst = 0.0;
    while (!a.empty()) {
        // globally closest remaining pair
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                if (std::abs(a[i] - b[j]) < best) { best = std::abs(a[i] - b[j]); bi = i; bj = j; }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

double Polynomial::eval(double x) const {
    double y = 0.0;
    for (double c : coeffs) y = y * x + c;
    return y;
}

Complex Polynomial::eval(Complex x) const {
    Complex y = 0.0;
    for (double c : coeffs) y = y * x + c;
    return y;
}

Polynomial& Polynomial::normalize_monic() {
    trim();
    if (coeffs.empty()) return *this;
    const double lead = coeffs.front();
    if (lead == 0.0) throw DomainError("normalize_monic: zero polynomial");
    for (double& c : coeffs) c /= lead;
    return *this;
}

void Polynomial::trim(double tol) {
    std::size_t first = 0;
    while (first + 1 < coeffs.size() && std::fabs(coeffs[first]) <= tol) ++first;
    coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(first));
    if (coeffs.size() == 1 && std::fabs(coeffs[0]) <= tol) coeffs[0] = 0.0;
}

Polynomial poly_from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> pending = roots;
    std::vector<Complex> coeffs{1.0};
    const double pair_tol = 1e-9;

    auto multiply_linear = [&coeffs](Complex r) {
        coeffs.push_back(0.0);
        for (std::size_t i = coeffs.size() - 1; i > 0; --i) coeffs[i] -= r * coeffs[i - 1];
    };

    while (!pending.empty()) {
        const Complex r = pending.front();
        pending.erase(pending.begin());
        if (std::fabs(r.imag()) <= pair_tol * (1.0 + std::abs(r))) {
            multiply_linear(Complex(r.real(), 0.0));
            continue;
        }
        auto partner = std::find_if(pending.begin(), pending.end(), [&](Complex q) {
            return std::abs(q - std::conj(r)) <= pair_tol * (1.0 + std::abs(r));
        });
        if (partner == pending.end())
            throw DomainError("poly_from_roots: complex root without conjugate partner");
        pending.erase(partner);
        multiply_linear(r);
        multiply_linear(std::conj(r));
    }

    Polynomial p;
    p.coeffs.resize(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) p.coeffs[i] = coeffs[i].real();
    return p;
}

Polynomial characteristic_polynomial(const Matrix& a) {
    const std::size_t n = a.rows();
    Polynomial p;
    p.coeffs.assign(n + 1, 0.0);
    p.coeffs[0] = 1.0;
    Matrix mk = Matrix::identity(n); // M_1 = I
    for (std::size_t k = 1; k <= n; ++k) {
        const Matrix am = a * mk;
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        const double ck = -tr / static_cast<double>(k);
        p.coeffs[k] = ck;
        if (k < n) {
            mk = am;
            for (std::size_t i = 0; i < n; ++i) mk(i, i) += ck;
        }
    }
    return p;
}

Matrix polyval_matrix(const Polynomial& p, const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix y(n, n);
    for (double c : p.coeffs) {
        y = y * a;
        for (std::size_t i = 0; i < n; ++i) y(i, i) += c;
    }
    return y;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

Vec rk4_step(const Field& field, const Vec& state, double input, double dt) {
    if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be positive");
    const Vec k1 = field(state, input);
    const Vec k2 = field(axpy(0.5 * dt, k1, state), input);
    const Vec k3 = field(axpy(0.5 * dt, k2, state), input);
    const Vec k4 = field(axpy(dt, k3, state), input);
    Vec out(state);
    for (std::size_t i = 0; i < state.size(); ++i)
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!finite(out)) throw IntegrationError("rk4_step: non-finite stage value", 0.0);
    return out;
}

Trajectory integrate(const Field& field, const Vec& x0,
                     const std::function<double(double)>& input_fn, double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw DomainError("integrate: t_end and dt must be positive");
    const std::size_t n_steps = static_cast<std::size_t>(t_end / dt);
    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.inputs.reserve(n_steps + 1);

    Vec x = x0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double u = input_fn(t);
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.inputs.push_back(u);
        if (k == n_steps) break;
        try {
            x = rk4_step(field, x, u, dt);
        } catch (const IntegrationError&) {
            throw IntegrationError("integrate: non-finite stage value", t);
        }
    }
    return traj;
}

Matrix jacobian_fd(const std::function<Vec(const Vec&)>& fn, const Vec& x, double eps) {
    if (!(eps > 0.0)) throw DomainError("jacobian_fd: eps must be positive");
    const Vec f0 = fn(x);
    Matrix j(f0.size(), x.size());
    Vec xp = x, xm = x;
    for (std::size_t c = 0; c < x.size(); ++c) {
        xp[c] = x[c] + eps;
        xm[c] = x[c] - eps;
        const Vec fp = fn(xp);
        const Vec fm = fn(xm);
        for (std::size_t r = 0; r < f0.size(); ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * eps);
        xp[c] = x[c];
        xm[c] = x[c];
    }
    return j;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
    const std::size_t n = a.rows();
    if (a.cols() != n || q.rows() != n || q.cols() != n)
        throw DomainError("solve_lyapunov: dimension mismatch");
    for (const auto& l : eigenvalues(a))
        if (l.real() >= 0.0)
            throw DomainError("solve_lyapunov: A is not Hurwitz (eigenvalue " +
                              std::to_string(l.real()) + (l.imag() >= 0 ? "+" : "-") +
                              std::to_string(std::fabs(l.imag())) + "i)");

    // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P) = -vec(Q)
    Matrix big(n * n, n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t r = i * n + j;
            for (std::size_t k = 0; k < n; ++k) {
                big(r, k * n + j) += a(k, i); // (A^T P)_{ij} = sum_k a(k,i) p(k,j)
                big(r, i * n + k) += a(k, j); // (P A)_{ij}  = sum_k p(i,k) a(k,j)
            }
        }
    Vec rhs(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rhs[i * n + j] = -q(i, j);

    const Vec sol = solve(big, rhs);
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) = sol[i * n + j];
    // exact symmetrization of roundoff
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = m;
            p(j, i) = m;
        }
    return p;
}

} // namespace crane::num
