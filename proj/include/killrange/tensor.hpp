#pragma once

#include <killrange/linalg.hpp>
#include <killrange/ratfunc.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace killrange {

enum class Slot { Up, Down };

/// Ordered list of index variances; empty = scalar.
using Valence = std::vector<Slot>;

/// Dense tensor over Scalar with fixed fiber dimension. Components are
/// stored row-major in the multi-index.
class Tensor {
public:
    Tensor() : dim_(0) {}
    Tensor(int dim, Valence valence)
        : dim_(dim),
          valence_(std::move(valence)),
          comps_(pow_size(dim, valence_.size())) {}

    static Tensor scalar(int dim, const Scalar& s) {
        Tensor t(dim, {});
        t.comps_[0] = s;
        return t;
    }
    static Tensor delta(int dim) {
        Tensor t(dim, {Slot::Down, Slot::Up});
        for (int i = 0; i < dim; ++i) t.at({i, i}) = Scalar(1);
        return t;
    }
    /// Metric-like 2-tensor from a rational matrix.
    static Tensor from_matrix(const Matrix& m, Slot variance) {
        Tensor t(m.rows(), {variance, variance});
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) t.at({i, j}) = Scalar(m(i, j));
        return t;
    }
    static Tensor basis_vector(int dim, int i, Slot variance) {
        Tensor t(dim, {variance});
        t.at({i}) = Scalar(1);
        return t;
    }

    int dim() const { return dim_; }
    const Valence& valence() const { return valence_; }
    int order() const { return int(valence_.size()); }
    const std::vector<Scalar>& components() const { return comps_; }

    Scalar& at(const std::vector<int>& idx) { return comps_[flatten(idx)]; }
    const Scalar& at(const std::vector<int>& idx) const {
        return comps_[flatten(idx)];
    }

    bool is_zero() const {
        for (const auto& c : comps_)
            if (!c.is_zero()) return false;
        return true;
    }

    friend Tensor operator+(const Tensor& a, const Tensor& b) {
        a.require_shape(b);
        Tensor r = a;
        for (size_t i = 0; i < r.comps_.size(); ++i) r.comps_[i] += b.comps_[i];
        return r;
    }
    friend Tensor operator-(const Tensor& a, const Tensor& b) {
        a.require_shape(b);
        Tensor r = a;
        for (size_t i = 0; i < r.comps_.size(); ++i) r.comps_[i] -= b.comps_[i];
        return r;
    }
    Tensor operator-() const {
        Tensor r = *this;
        for (auto& c : r.comps_) c = -c;
        return r;
    }
    friend Tensor operator*(const Scalar& s, const Tensor& a) {
        Tensor r = a;
        for (auto& c : r.comps_) c *= s;
        return r;
    }
    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.dim_ == b.dim_ && a.valence_ == b.valence_ &&
               a.comps_ == b.comps_;
    }
    friend bool operator!=(const Tensor& a, const Tensor& b) {
        return !(a == b);
    }

    /// Outer product; valences concatenate.
    friend Tensor tensor_product(const Tensor& a, const Tensor& b) {
        if (a.dim_ != b.dim_) throw std::invalid_argument("dim mismatch");
        Valence v = a.valence_;
        v.insert(v.end(), b.valence_.begin(), b.valence_.end());
        Tensor r(a.dim_, v);
        for (size_t i = 0; i < a.comps_.size(); ++i) {
            if (a.comps_[i].is_zero()) continue;
            for (size_t j = 0; j < b.comps_.size(); ++j)
                r.comps_[i * b.comps_.size() + j] = a.comps_[i] * b.comps_[j];
        }
        return r;
    }

    /// Iterates f over all multi-indices of the given order.
    template <class F>
    static void for_each_index(int dim, int order, F&& f) {
        std::vector<int> idx(order, 0);
        while (true) {
            f(idx);
            int k = order - 1;
            while (k >= 0 && ++idx[k] == dim) idx[k--] = 0;
            if (k < 0) break;
        }
    }

    size_t flatten(const std::vector<int>& idx) const {
        if (idx.size() != valence_.size())
            throw std::invalid_argument("index order mismatch");
        size_t f = 0;
        for (size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < 0 || idx[k] >= dim_)
                throw std::out_of_range("index out of range");
            f = f * dim_ + size_t(idx[k]);
        }
        return f;
    }

private:
    static size_t pow_size(int dim, size_t order) {
        size_t s = 1;
        for (size_t k = 0; k < order; ++k) s *= size_t(dim);
        return s;
    }
    void require_shape(const Tensor& o) const {
        if (dim_ != o.dim_ || valence_ != o.valence_)
            throw std::invalid_argument("tensor shape mismatch");
    }

    int dim_;
    Valence valence_;
    std::vector<Scalar> comps_;
};

/// Trace over slots i and j, which must have opposite variance.
inline Tensor contract(const Tensor& t, int i, int j) {
    const int r = t.order();
    if (i < 0 || j < 0 || i >= r || j >= r || i == j)
        throw std::invalid_argument("bad contraction slots");
    if (t.valence()[i] == t.valence()[j])
        throw std::invalid_argument("contraction requires up/down pair");
    if (i > j) std::swap(i, j);
    Valence v;
    for (int k = 0; k < r; ++k)
        if (k != i && k != j) v.push_back(t.valence()[k]);
    Tensor out(t.dim(), v);
    Tensor::for_each_index(t.dim(), r - 2, [&](const std::vector<int>& oi) {
        Scalar s(0);
        std::vector<int> full(r);
        for (int c = 0; c < t.dim(); ++c) {
            int p = 0;
            for (int k = 0; k < r; ++k)
                full[k] = (k == i || k == j) ? c : oi[p++];
            s += t.at(full);
        }
        out.at(oi) = s;
    });
    return out;
}

namespace detail {

/// All permutations of {0..k-1} with their signs.
inline std::vector<std::pair<std::vector<int>, int>> signed_permutations(int k) {
    std::vector<int> p(k);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::pair<std::vector<int>, int>> out;
    do {
        int inv = 0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b)
                if (p[a] > p[b]) ++inv;
        out.emplace_back(p, inv % 2 ? -1 : 1);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline Tensor permutation_average(const Tensor& t, const std::vector<int>& slots,
                                  bool signed_sum) {
    const int k = int(slots.size());
    if (k == 0) return t;
    Slot var = t.valence()[slots[0]];
    for (int s : slots)
        if (t.valence()[s] != var)
            throw std::invalid_argument("mixed-variance slot list");
    auto perms = signed_permutations(k);
    Tensor out(t.dim(), t.valence());
    Scalar w = Scalar(1) / Scalar(long(perms.size()));
    Tensor::for_each_index(t.dim(), t.order(), [&](const std::vector<int>& idx) {
        Scalar s(0);
        std::vector<int> pidx = idx;
        for (const auto& [p, sign] : perms) {
            for (int a = 0; a < k; ++a) pidx[slots[a]] = idx[slots[size_t(p[a])]];
            const Scalar& c = t.at(pidx);
            if (c.is_zero()) continue;
            s += (signed_sum && sign < 0) ? -c : c;
        }
        if (!s.is_zero()) out.at(idx) = s * w;
    });
    return out;
}

}  // namespace detail

/// Average over permutations of the listed slots; includes the 1/p! weight.
inline Tensor symmetrize(const Tensor& t, const std::vector<int>& slots) {
    return detail::permutation_average(t, slots, false);
}

/// Signed average over permutations of the listed slots (1/p! weight).
inline Tensor antisymmetrize(const Tensor& t, const std::vector<int>& slots) {
    return detail::permutation_average(t, slots, true);
}

/// Flips the variance of one slot by contracting with g (to lower) or its
/// inverse (to raise).
inline Tensor raise_lower(const Tensor& t, int slot, const Tensor& g,
                          const Tensor& g_inv) {
    if (slot < 0 || slot >= t.order())
        throw std::invalid_argument("bad slot");
    const bool lowering = t.valence()[slot] == Slot::Up;
    const Tensor& m = lowering ? g : g_inv;
    Valence v = t.valence();
    v[slot] = lowering ? Slot::Down : Slot::Up;
    Tensor out(t.dim(), v);
    Tensor::for_each_index(t.dim(), t.order(), [&](const std::vector<int>& idx) {
        Scalar s(0);
        std::vector<int> src = idx;
        for (int e = 0; e < t.dim(); ++e) {
            src[slot] = e;
            const Scalar& c = t.at(src);
            if (c.is_zero()) continue;
            s += m.at({idx[slot], e}) * c;
        }
        if (!s.is_zero()) out.at(idx) = s;
    });
    return out;
}

enum class YoungShape { RiemannBox, HookBox, Hook3 };

struct YoungCheckResult {
    bool member;
    Tensor residual;  // zero iff member
};

/// Decides membership in the Young-symmetry bundle given by `shape` via its
/// defining skew relations; residual is the first violated projection.
inline YoungCheckResult young_check(const Tensor& t, YoungShape shape) {
    auto finish = [&](std::vector<Tensor> residuals) -> YoungCheckResult {
        for (auto& r : residuals)
            if (!r.is_zero()) return {false, r};
        return {true, Tensor(t.dim(), t.valence())};
    };
    switch (shape) {
        case YoungShape::RiemannBox: {
            if (t.order() != 4) throw std::invalid_argument("RiemannBox needs 4 slots");
            Tensor pair_skew = antisymmetrize(antisymmetrize(t, {0, 1}), {2, 3});
            return finish({t - pair_skew, antisymmetrize(t, {0, 1, 2})});
        }
        case YoungShape::HookBox: {
            if (t.order() != 5) throw std::invalid_argument("HookBox needs 5 slots");
            Tensor skew = antisymmetrize(antisymmetrize(t, {0, 1, 2}), {3, 4});
            return finish({t - skew, antisymmetrize(t, {0, 1, 2, 3})});
        }
        case YoungShape::Hook3: {
            if (t.order() != 3) throw std::invalid_argument("Hook3 needs 3 slots");
            return finish({t - antisymmetrize(t, {1, 2}), antisymmetrize(t, {0, 1, 2})});
        }
    }
    throw std::logic_error("unknown shape");
}

/// Evaluates every component at a rational point.
inline Tensor eval_tensor(const Tensor& t, const std::map<std::string, Rat>& pt) {
    Tensor out(t.dim(), t.valence());
    Tensor::for_each_index(t.dim(), t.order(), [&](const std::vector<int>& idx) {
        out.at(idx) = Scalar(t.at(idx).eval(pt));
    });
    return out;
}

}  // namespace killrange
