#pragma once

#include <killrange/rational.hpp>

#include <stdexcept>
#include <utility>
#include <vector>

namespace killrange {

/// Dense matrix over Rat. Row-major.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(size_t(rows) * cols, Rat(0)) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Rat(1);
        return m;
    }
    static Matrix from_rows(const std::vector<std::vector<Rat>>& rows) {
        if (rows.empty()) return Matrix();
        Matrix m(int(rows.size()), int(rows[0].size()));
        for (int i = 0; i < m.rows_; ++i) {
            if (int(rows[i].size()) != m.cols_)
                throw std::invalid_argument("ragged rows");
            for (int j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rat& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
    const Rat& operator()(int i, int j) const {
        return data_[size_t(i) * cols_ + j];
    }

    std::vector<Rat> row(int i) const {
        std::vector<Rat> r(cols_);
        for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
        return r;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                if (a(i, k) == 0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }
    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("shape mismatch");
        Matrix c = a;
        for (size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
        return c;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("shape mismatch");
        Matrix c = a;
        for (size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
        return c;
    }
    friend Matrix operator*(const Rat& s, const Matrix& a) {
        Matrix c = a;
        for (auto& x : c.data_) x *= s;
        return c;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::vector<Rat> apply(const std::vector<Rat>& v) const {
        if (int(v.size()) != cols_) throw std::invalid_argument("shape mismatch");
        std::vector<Rat> r(rows_, Rat(0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    bool is_zero() const {
        for (const auto& x : data_)
            if (x != 0) return false;
        return true;
    }

private:
    int rows_, cols_;
    std::vector<Rat> data_;
};

/// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<int> rref_in_place(Matrix& m) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int p = -1;
        for (int i = r; i < m.rows(); ++i)
            if (m(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        Rat inv = 1 / m(r, c);
        for (int j = c; j < m.cols(); ++j) m(r, j) *= inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0) continue;
            Rat f = m(i, c);
            for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline int rank(Matrix m) { return int(rref_in_place(m).size()); }

inline Matrix inverse(const Matrix& m) {
    const int n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("not square");
    Matrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = Rat(1);
    }
    auto piv = rref_in_place(aug);
    if (int(piv.size()) < n || piv[n - 1] != n - 1)
        throw std::domain_error("singular matrix");
    Matrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

/// Subspace of Q^n stored as the RREF basis of its row span, so equal
/// subspaces have identical representations.
class Subspace {
public:
    Subspace() : ambient_(0) {}
    explicit Subspace(int ambient) : ambient_(ambient) {}
    Subspace(int ambient, const std::vector<std::vector<Rat>>& spanning)
        : ambient_(ambient) {
        if (spanning.empty()) return;
        Matrix m = Matrix::from_rows(spanning);
        if (m.cols() != ambient) throw std::invalid_argument("ambient mismatch");
        auto pivots = rref_in_place(m);
        for (size_t i = 0; i < pivots.size(); ++i) basis_.push_back(m.row(int(i)));
    }

    static Subspace full(int ambient) {
        std::vector<std::vector<Rat>> rows(ambient,
                                           std::vector<Rat>(ambient, Rat(0)));
        for (int i = 0; i < ambient; ++i) rows[i][i] = Rat(1);
        return Subspace(ambient, rows);
    }

    int ambient() const { return ambient_; }
    int dim() const { return int(basis_.size()); }
    const std::vector<std::vector<Rat>>& basis() const { return basis_; }

    Matrix basis_matrix() const {
        if (basis_.empty()) return Matrix(0, ambient_);
        return Matrix::from_rows(basis_);
    }

    bool contains(const std::vector<Rat>& v) const {
        if (int(v.size()) != ambient_) throw std::invalid_argument("dim mismatch");
        std::vector<Rat> w = v;
        for (const auto& b : basis_) {
            int p = pivot_col(b);
            if (w[p] != 0) {
                Rat f = w[p];
                for (int j = 0; j < ambient_; ++j) w[j] -= f * b[j];
            }
        }
        for (const auto& x : w)
            if (x != 0) return false;
        return true;
    }
    bool contains(const Subspace& s) const {
        for (const auto& b : s.basis_)
            if (!contains(b)) return false;
        return true;
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }
    friend bool operator!=(const Subspace& a, const Subspace& b) {
        return !(a == b);
    }

    /// Coordinates of v in the RREF basis; throws if v is not in the span.
    std::vector<Rat> coordinates(const std::vector<Rat>& v) const {
        std::vector<Rat> w = v, coords;
        for (const auto& b : basis_) {
            int p = pivot_col(b);
            Rat f = w[p];
            coords.push_back(f);
            if (f != 0)
                for (int j = 0; j < ambient_; ++j) w[j] -= f * b[j];
        }
        for (const auto& x : w)
            if (x != 0) throw std::domain_error("vector not in subspace");
        return coords;
    }

    static int pivot_col(const std::vector<Rat>& row) {
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) return int(j);
        throw std::logic_error("zero basis row");
    }

private:
    int ambient_;
    std::vector<std::vector<Rat>> basis_;
};

inline Subspace sum(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient())
        throw std::invalid_argument("ambient mismatch");
    auto rows = a.basis();
    rows.insert(rows.end(), b.basis().begin(), b.basis().end());
    return Subspace(a.ambient(), rows);
}

/// Null space of m as a subspace of Q^cols.
inline Subspace kernel(Matrix m) {
    const int n = m.cols();
    auto pivots = rref_in_place(m);
    std::vector<bool> is_pivot(n, false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Rat>> rows;
    for (int c = 0; c < n; ++c) {
        if (is_pivot[c]) continue;
        std::vector<Rat> v(n, Rat(0));
        v[c] = Rat(1);
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(int(r), c);
        rows.push_back(std::move(v));
    }
    return Subspace(n, rows);
}

/// Column span of m as a subspace of Q^rows.
inline Subspace image(const Matrix& m) {
    std::vector<std::vector<Rat>> rows;
    for (int j = 0; j < m.cols(); ++j) {
        std::vector<Rat> v(m.rows());
        for (int i = 0; i < m.rows(); ++i) v[i] = m(i, j);
        rows.push_back(std::move(v));
    }
    return Subspace(m.rows(), rows);
}

inline Subspace intersection(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient())
        throw std::invalid_argument("ambient mismatch");
    // x in both spans: solve [A^T | -B^T] (u;v) = 0, intersection = A^T u.
    const int da = a.dim(), db = b.dim(), n = a.ambient();
    if (da == 0 || db == 0) return Subspace(n);
    Matrix m(n, da + db);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < da; ++j) m(i, j) = a.basis()[j][i];
        for (int j = 0; j < db; ++j) m(i, da + j) = -b.basis()[j][i];
    }
    Subspace ker = kernel(m);
    std::vector<std::vector<Rat>> rows;
    for (const auto& k : ker.basis()) {
        std::vector<Rat> v(n, Rat(0));
        for (int j = 0; j < da; ++j)
            for (int i = 0; i < n; ++i) v[i] += k[j] * a.basis()[j][i];
        rows.push_back(std::move(v));
    }
    return Subspace(n, rows);
}

/// {x : m x in target}. Uses the annihilator of target: rows N with
/// N t = 0 for all t in target, then preimage = ker(N m).
inline Subspace preimage_subspace(const Matrix& m, const Subspace& target) {
    if (m.rows() != target.ambient())
        throw std::invalid_argument("ambient mismatch");
    Matrix ann = kernel(target.basis_matrix()).basis_matrix();
    if (ann.rows() == 0) return Subspace::full(m.cols());
    return kernel(ann * m);
}

/// Orthogonal complement of s inside Q^n with respect to bilinear form B:
/// {x : (basis of s) B x = 0}.
inline Subspace perp(const Subspace& s, const Matrix& form) {
    if (form.rows() != s.ambient() || form.cols() != s.ambient())
        throw std::invalid_argument("form shape mismatch");
    if (s.dim() == 0) return Subspace::full(s.ambient());
    return kernel(s.basis_matrix() * form);
}

/// Whether form restricted to s is nondegenerate, i.e. s and its
/// B-complement intersect trivially.
inline bool is_nondegenerate_on(const Subspace& s, const Matrix& form) {
    return intersection(s, perp(s, form)).dim() == 0;
}

/// Signature (p, q, z) of a symmetric rational matrix: positive, negative
/// and zero inertia indices, by symmetric congruence diagonalization.
inline std::tuple<int, int, int> signature(Matrix m) {
    const int n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("not square");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (m(i, j) != m(j, i)) throw std::invalid_argument("not symmetric");
    int p = 0, q = 0, z = 0;
    for (int k = 0; k < n; ++k) {
        if (m(k, k) == 0) {
            int j = -1;
            for (int i = k + 1; i < n; ++i)
                if (m(k, i) != 0) {
                    j = i;
                    break;
                }
            if (j < 0) {
                ++z;
                continue;
            }
            // add row/col j into k to expose a nonzero diagonal entry
            for (int c = 0; c < n; ++c) m(k, c) += m(j, c);
            for (int r = 0; r < n; ++r) m(r, k) += m(r, j);
        }
        Rat d = m(k, k);
        if (d > 0)
            ++p;
        else
            ++q;
        for (int i = 0; i < n; ++i) {
            if (i == k || m(i, k) == 0) continue;
            Rat f = m(i, k) / d;
            for (int c = 0; c < n; ++c) m(i, c) -= f * m(k, c);
            for (int r = 0; r < n; ++r) m(r, i) -= f * m(r, k);
        }
    }
    return {p, q, z};
}

}  // namespace killrange
