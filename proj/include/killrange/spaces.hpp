#pragma once

#include <killrange/tensor.hpp>

#include <optional>
#include <string>
#include <vector>

namespace killrange {

/// Built-in symmetric-space models.
struct SpaceSpec {
    enum class Kind { Flat, ConstCurv, Sphere, Hyperbolic, CahenWallach, Product };
    Kind kind;
    int p = 0, q = 0;        // Flat / ConstCurv signature (negatives, positives)
    int n = 0;               // Sphere / Hyperbolic dimension
    int curvature_sign = 0;  // ConstCurv
    bool hermitian = false;  // Sphere{2} only
    Matrix Q;                // CahenWallach
    std::vector<SpaceSpec> factors;

    static SpaceSpec flat(int p, int q) {
        SpaceSpec s;
        s.kind = Kind::Flat;
        s.p = p;
        s.q = q;
        return s;
    }
    static SpaceSpec const_curv(int dim, int p, int q, int sign) {
        if (p + q != dim || (sign != 1 && sign != -1))
            throw std::invalid_argument("bad constant-curvature spec");
        SpaceSpec s;
        s.kind = Kind::ConstCurv;
        s.p = p;
        s.q = q;
        s.curvature_sign = sign;
        return s;
    }
    static SpaceSpec sphere(int n, bool hermitian = false) {
        if (hermitian && n != 2)
            throw std::invalid_argument("hermitian flag only supported for n=2");
        SpaceSpec s;
        s.kind = Kind::Sphere;
        s.n = n;
        s.hermitian = hermitian;
        return s;
    }
    static SpaceSpec hyperbolic(int n) {
        SpaceSpec s;
        s.kind = Kind::Hyperbolic;
        s.n = n;
        return s;
    }
    static SpaceSpec cahen_wallach(const Matrix& Q) {
        if (Q.rows() != Q.cols()) throw std::invalid_argument("Q not square");
        for (int i = 0; i < Q.rows(); ++i)
            for (int j = 0; j < Q.cols(); ++j)
                if (Q(i, j) != Q(j, i))
                    throw std::invalid_argument("Q not symmetric");
        SpaceSpec s;
        s.kind = Kind::CahenWallach;
        s.Q = Q;
        return s;
    }
    static SpaceSpec product(std::vector<SpaceSpec> factors) {
        if (factors.size() < 2)
            throw std::invalid_argument("product needs at least 2 factors");
        SpaceSpec s;
        s.kind = Kind::Product;
        s.factors = std::move(factors);
        return s;
    }

    int dim() const {
        switch (kind) {
            case Kind::Flat:
            case Kind::ConstCurv:
                return p + q;
            case Kind::Sphere:
            case Kind::Hyperbolic:
                return n;
            case Kind::CahenWallach:
                return Q.rows() + 2;
            case Kind::Product: {
                int d = 0;
                for (const auto& f : factors) d += f.dim();
                return d;
            }
        }
        return 0;
    }

    /// (negatives, positives) of the metric signature.
    std::pair<int, int> signature_counts() const {
        switch (kind) {
            case Kind::Flat:
            case Kind::ConstCurv:
                return {p, q};
            case Kind::Sphere:
            case Kind::Hyperbolic:
                return {0, n};
            case Kind::CahenWallach:
                return {1, Q.rows() + 1};
            case Kind::Product: {
                int np = 0, nq = 0;
                for (const auto& f : factors) {
                    auto [fp, fq] = f.signature_counts();
                    np += fp;
                    nq += fq;
                }
                return {np, nq};
            }
        }
        return {0, 0};
    }
    bool is_lorentzian() const { return signature_counts().first == 1; }
};

/// Constant-frame data at a fixed point of a locally symmetric space.
struct PointFrame {
    int dim = 0;
    Matrix metric;
    Tensor curvature;  // R_abcd, all slots down, constant entries
    std::optional<Tensor> kahler;
    std::vector<int> factor_offsets;  // start index of each factor block
    std::vector<int> factor_dims;
};

/// Coordinate chart with a rational-function metric.
struct Chart {
    int dim = 0;
    std::vector<std::string> coords;
    Tensor metric;      // g_ab
    Tensor metric_inv;  // g^ab
    std::string domain_note;
    std::vector<int> factor_offsets;
    std::vector<int> factor_dims;
    // scale s_a with e_a = s_a * d/dx^a matching the point frame at the origin
    std::vector<Rat> frame_scale;
};

/// Rescales a constant tensor from chart coordinates at the origin into the
/// point-frame basis.
inline Tensor align_to_frame(const Chart& ch, const Tensor& t) {
    Tensor out = t;
    Tensor::for_each_index(t.dim(), t.order(), [&](const std::vector<int>& idx) {
        Scalar f(1);
        for (int k = 0; k < t.order(); ++k) {
            Rat s = ch.frame_scale[idx[k]];
            if (t.valence()[k] == Slot::Up) s = Rat(1) / s;
            f *= Scalar(s);
        }
        if (f != Scalar(1)) out.at(idx) *= f;
    });
    return out;
}

namespace detail {

/// Gauss-Jordan inverse over the rational-function field.
inline Tensor field_matrix_inverse(const Tensor& g) {
    const int n = g.dim();
    std::vector<std::vector<Scalar>> a(n, std::vector<Scalar>(2 * n, Scalar(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = g.at({i, j});
        a[i][n + i] = Scalar(1);
    }
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!a[r][c].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("singular metric");
        std::swap(a[c], a[piv]);
        Scalar inv = Scalar(1) / a[c][c];
        for (int j = 0; j < 2 * n; ++j) a[c][j] *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == c || a[r][c].is_zero()) continue;
            Scalar f = a[r][c];
            for (int j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    Tensor out(n, {Slot::Up, Slot::Up});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.at({i, j}) = a[i][n + j];
    return out;
}

inline void set_riemann_pair_symmetric(Tensor& R, int a, int b, int c, int d,
                                       const Scalar& v) {
    // fills the orbit of R_abcd under the pair symmetries
    R.at({a, b, c, d}) = v;
    R.at({b, a, c, d}) = -v;
    R.at({a, b, d, c}) = -v;
    R.at({b, a, d, c}) = v;
    R.at({c, d, a, b}) = v;
    R.at({d, c, a, b}) = -v;
    R.at({c, d, b, a}) = -v;
    R.at({d, c, b, a}) = v;
}

inline Tensor const_curv_curvature(const Matrix& g, int sign) {
    const int m = g.rows();
    Tensor R(m, {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
    Rat c(sign);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int e = 0; e < m; ++e)
                for (int d = 0; d < m; ++d) {
                    Rat v = c * (g(a, e) * g(b, d) - g(a, d) * g(b, e));
                    if (v != 0) R.at({a, b, e, d}) = Scalar(v);
                }
    return R;
}

inline Matrix diag_signature(int p, int q) {
    Matrix g(p + q, p + q);
    for (int i = 0; i < p; ++i) g(i, i) = Rat(-1);
    for (int i = p; i < p + q; ++i) g(i, i) = Rat(1);
    return g;
}

}  // namespace detail

inline PointFrame build_point_frame(const SpaceSpec& spec) {
    using K = SpaceSpec::Kind;
    PointFrame pf;
    switch (spec.kind) {
        case K::Flat: {
            pf.dim = spec.dim();
            pf.metric = detail::diag_signature(spec.p, spec.q);
            pf.curvature = Tensor(
                pf.dim, {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
            break;
        }
        case K::ConstCurv:
        case K::Sphere:
        case K::Hyperbolic: {
            int p = spec.kind == K::ConstCurv ? spec.p : 0;
            int q = spec.kind == K::ConstCurv ? spec.q : spec.n;
            int sign = spec.kind == K::Hyperbolic ? -1
                       : spec.kind == K::Sphere  ? 1
                                                 : spec.curvature_sign;
            pf.dim = p + q;
            pf.metric = detail::diag_signature(p, q);
            pf.curvature = detail::const_curv_curvature(pf.metric, sign);
            if (spec.kind == K::Sphere && spec.hermitian) {
                // frame volume form of S^2: omega_12 = 1
                Tensor w(2, {Slot::Down, Slot::Down});
                w.at({0, 1}) = Scalar(1);
                w.at({1, 0}) = Scalar(-1);
                pf.kahler = w;
            }
            break;
        }
        case K::CahenWallach: {
            const int n = spec.Q.rows();
            pf.dim = n + 2;
            // basis order (e_-, e_1..e_n, e_+); g(e_-,e_+)=1, g(e_i,e_j)=delta
            Matrix g(pf.dim, pf.dim);
            g(0, n + 1) = g(n + 1, 0) = Rat(1);
            for (int i = 1; i <= n; ++i) g(i, i) = Rat(1);
            pf.metric = g;
            Tensor R(pf.dim,
                     {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
            const int plus = n + 1;
            for (int i = 1; i <= n; ++i)
                for (int j = i; j <= n; ++j) {
                    Rat qij = spec.Q(i - 1, j - 1);
                    if (qij == 0) continue;
                    // R_{+ i j +} = Q_ij
                    detail::set_riemann_pair_symmetric(R, plus, i, j, plus,
                                                       Scalar(qij));
                }
            pf.curvature = R;
            break;
        }
        case K::Product: {
            std::vector<PointFrame> parts;
            int total = 0;
            for (const auto& f : spec.factors) {
                parts.push_back(build_point_frame(f));
                total += parts.back().dim;
            }
            pf.dim = total;
            pf.metric = Matrix(total, total);
            pf.curvature = Tensor(
                total, {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
            int off = 0;
            for (const auto& part : parts) {
                pf.factor_offsets.push_back(off);
                pf.factor_dims.push_back(part.dim);
                for (int i = 0; i < part.dim; ++i)
                    for (int j = 0; j < part.dim; ++j)
                        pf.metric(off + i, off + j) = part.metric(i, j);
                Tensor::for_each_index(
                    part.dim, 4, [&](const std::vector<int>& idx) {
                        const Scalar& v = part.curvature.at(idx);
                        if (v.is_zero()) return;
                        pf.curvature.at({off + idx[0], off + idx[1],
                                         off + idx[2], off + idx[3]}) = v;
                    });
                if (part.kahler && !pf.kahler) {
                    Tensor w(total, {Slot::Down, Slot::Down});
                    for (int i = 0; i < part.dim; ++i)
                        for (int j = 0; j < part.dim; ++j)
                            w.at({off + i, off + j}) = part.kahler->at({i, j});
                    pf.kahler = w;
                }
                off += part.dim;
            }
            return pf;
        }
    }
    pf.factor_offsets = {0};
    pf.factor_dims = {pf.dim};
    return pf;
}

inline Chart build_chart(const SpaceSpec& spec, const std::string& prefix = "") {
    using K = SpaceSpec::Kind;
    Chart ch;
    auto coord = [&](const std::string& base) { return prefix + base; };
    switch (spec.kind) {
        case K::Flat: {
            ch.dim = spec.dim();
            for (int i = 1; i <= ch.dim; ++i)
                ch.coords.push_back(coord("x" + std::to_string(i)));
            ch.metric = Tensor::from_matrix(
                detail::diag_signature(spec.p, spec.q), Slot::Down);
            ch.domain_note = "all of R^" + std::to_string(ch.dim);
            break;
        }
        case K::ConstCurv:
        case K::Sphere:
        case K::Hyperbolic: {
            int p = spec.kind == K::ConstCurv ? spec.p : 0;
            int q = spec.kind == K::ConstCurv ? spec.q : spec.n;
            int sign = spec.kind == K::Hyperbolic ? -1
                       : spec.kind == K::Sphere  ? 1
                                                 : spec.curvature_sign;
            ch.dim = p + q;
            for (int i = 1; i <= ch.dim; ++i)
                ch.coords.push_back(coord("x" + std::to_string(i)));
            // projective-type chart: g = 4 eta / (1 + c x.eta.x)^2
            Matrix eta = detail::diag_signature(p, q);
            Scalar s(0);
            for (int i = 0; i < ch.dim; ++i) {
                Scalar xi = Scalar::variable(ch.coords[i]);
                s += Scalar(eta(i, i)) * xi * xi;
            }
            Scalar conf = Scalar(4) / ((Scalar(1) + Scalar(long(sign)) * s) *
                                       (Scalar(1) + Scalar(long(sign)) * s));
            ch.metric = Tensor(ch.dim, {Slot::Down, Slot::Down});
            for (int i = 0; i < ch.dim; ++i)
                ch.metric.at({i, i}) = Scalar(eta(i, i)) * conf;
            ch.domain_note = sign == -1 ? "interior of the unit ball"
                                        : "complement of the antipode";
            ch.frame_scale.assign(size_t(ch.dim), Rat(1, 2));
            break;
        }
        case K::CahenWallach: {
            const int n = spec.Q.rows();
            ch.dim = n + 2;
            ch.coords.push_back(coord("xm"));
            for (int i = 1; i <= n; ++i)
                ch.coords.push_back(coord("x" + std::to_string(i)));
            ch.coords.push_back(coord("xp"));
            ch.metric = Tensor(ch.dim, {Slot::Down, Slot::Down});
            ch.metric.at({0, n + 1}) = Scalar(1);
            ch.metric.at({n + 1, 0}) = Scalar(1);
            for (int i = 1; i <= n; ++i) ch.metric.at({i, i}) = Scalar(1);
            Scalar qxx(0);
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j)
                    qxx += Scalar(spec.Q(i - 1, j - 1)) *
                           Scalar::variable(ch.coords[i]) *
                           Scalar::variable(ch.coords[j]);
            ch.metric.at({n + 1, n + 1}) = qxx;
            ch.domain_note = "global Brinkmann coordinates";
            break;
        }
        case K::Product: {
            std::vector<Chart> parts;
            int total = 0;
            for (size_t k = 0; k < spec.factors.size(); ++k) {
                parts.push_back(build_chart(
                    spec.factors[k],
                    prefix + std::string(1, char('a' + k)) + "_"));
                total += parts.back().dim;
            }
            ch.dim = total;
            ch.metric = Tensor(total, {Slot::Down, Slot::Down});
            int off = 0;
            for (const auto& part : parts) {
                ch.factor_offsets.push_back(off);
                ch.factor_dims.push_back(part.dim);
                ch.coords.insert(ch.coords.end(), part.coords.begin(),
                                 part.coords.end());
                ch.frame_scale.insert(ch.frame_scale.end(),
                                      part.frame_scale.begin(),
                                      part.frame_scale.end());
                for (int i = 0; i < part.dim; ++i)
                    for (int j = 0; j < part.dim; ++j)
                        ch.metric.at({off + i, off + j}) =
                            part.metric.at({i, j});
                if (!ch.domain_note.empty()) ch.domain_note += " x ";
                ch.domain_note += part.domain_note;
                off += part.dim;
            }
            ch.metric_inv = detail::field_matrix_inverse(ch.metric);
            return ch;
        }
    }
    ch.factor_offsets = {0};
    ch.factor_dims = {ch.dim};
    if (ch.frame_scale.empty()) ch.frame_scale.assign(size_t(ch.dim), Rat(1));
    ch.metric_inv = detail::field_matrix_inverse(ch.metric);
    return ch;
}

/// Levi-Civita connection coefficients Gamma^a_{bc}.
inline Tensor christoffel(const Chart& ch) {
    const int m = ch.dim;
    Tensor dg(m, {Slot::Down, Slot::Down, Slot::Down});  // partial_a g_bc
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                dg.at({a, b, c}) = ch.metric.at({b, c}).derivative(ch.coords[a]);
    Tensor gamma(m, {Slot::Up, Slot::Down, Slot::Down});
    Scalar half(Rat(1, 2));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = b; c < m; ++c) {
                Scalar s(0);
                for (int d = 0; d < m; ++d) {
                    const Scalar& gi = ch.metric_inv.at({a, d});
                    if (gi.is_zero()) continue;
                    s += gi * (dg.at({b, d, c}) + dg.at({c, d, b}) -
                               dg.at({d, b, c}));
                }
                s *= half;
                gamma.at({a, b, c}) = s;
                gamma.at({a, c, b}) = s;
            }
    return gamma;
}

/// Curvature with the convention (nabla_a nabla_b - nabla_b nabla_a) X^c
/// = R_ab{}^c{}_d X^d; returned valence (down, down, up, down).
inline Tensor riemann_updown(const Chart& ch, const Tensor& gamma) {
    const int m = ch.dim;
    Tensor R(m, {Slot::Down, Slot::Down, Slot::Up, Slot::Down});
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    Scalar s = gamma.at({c, b, d}).derivative(ch.coords[a]) -
                               gamma.at({c, a, d}).derivative(ch.coords[b]);
                    for (int e = 0; e < m; ++e) {
                        const Scalar &gae = gamma.at({c, a, e}),
                                     &gbe = gamma.at({c, b, e});
                        if (!gae.is_zero()) s += gae * gamma.at({e, b, d});
                        if (!gbe.is_zero()) s -= gbe * gamma.at({e, a, d});
                    }
                    if (s.is_zero()) continue;
                    R.at({a, b, c, d}) = s;
                    R.at({b, a, c, d}) = -s;
                }
    return R;
}
inline Tensor riemann_updown(const Chart& ch) {
    return riemann_updown(ch, christoffel(ch));
}

/// R_abcd = g_ce R_ab{}^e{}_d, all slots down.
inline Tensor riemann_lowered(const Chart& ch) {
    return raise_lower(riemann_updown(ch), 2, ch.metric, ch.metric_inv);
}

/// nabla_a T, new covariant slot in front.
inline Tensor covariant_derivative(const Chart& ch, const Tensor& gamma,
                                   const Tensor& t) {
    const int m = ch.dim;
    Valence v{Slot::Down};
    v.insert(v.end(), t.valence().begin(), t.valence().end());
    Tensor out(m, v);
    std::vector<int> tidx(t.order());
    Tensor::for_each_index(m, int(v.size()), [&](const std::vector<int>& idx) {
        const int a = idx[0];
        for (int k = 0; k < t.order(); ++k) tidx[k] = idx[k + 1];
        Scalar s = t.at(tidx).derivative(ch.coords[a]);
        for (int k = 0; k < t.order(); ++k) {
            const int orig = tidx[k];
            for (int e = 0; e < m; ++e) {
                tidx[k] = e;
                const Scalar& comp = t.at(tidx);
                if (!comp.is_zero()) {
                    if (t.valence()[k] == Slot::Up)
                        s += gamma.at({orig, a, e}) * comp;
                    else
                        s -= gamma.at({e, a, orig}) * comp;
                }
            }
            tidx[k] = orig;
        }
        if (!s.is_zero()) out.at(idx) = s;
    });
    return out;
}
inline Tensor covariant_derivative(const Chart& ch, const Tensor& t) {
    return covariant_derivative(ch, christoffel(ch), t);
}

/// Fixed basis of so(T,g): pairs (i,j), i<j, lexicographic; the element with
/// coordinates {A_ij} is the endomorphism with lowered form A_ab antisymmetric.
inline std::vector<std::pair<int, int>> so_basis_pairs(int m) {
    std::vector<std::pair<int, int>> ps;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) ps.emplace_back(i, j);
    return ps;
}

/// so-coordinates of a skew endomorphism A^a_b (valence up,down).
inline std::vector<Rat> so_coordinates(const Tensor& endo, const Matrix& g) {
    const int m = endo.dim();
    Matrix A(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Rat s(0);
            for (int c = 0; c < m; ++c)
                s += g(a, c) * endo.at({c, b}).constant_value();
            A(a, b) = s;
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (A(a, b) != -A(b, a))
                throw std::invalid_argument("endomorphism not metric-skew");
    std::vector<Rat> coords;
    for (auto [i, j] : so_basis_pairs(m)) coords.push_back(A(i, j));
    return coords;
}

/// Endomorphism A^a_b from so-coordinates.
inline Tensor so_endomorphism(const std::vector<Rat>& coords, const Matrix& g) {
    const int m = g.rows();
    Matrix low(m, m);
    auto ps = so_basis_pairs(m);
    for (size_t k = 0; k < ps.size(); ++k) {
        low(ps[k].first, ps[k].second) = coords[k];
        low(ps[k].second, ps[k].first) = -coords[k];
    }
    Matrix up = inverse(g) * low;
    Tensor endo(m, {Slot::Up, Slot::Down});
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (up(a, b) != 0) endo.at({a, b}) = Scalar(up(a, b));
    return endo;
}

/// span{ R(e_a, e_b) } inside so(T,g): the endomorphism R(e_a,e_b)^c{}_d has
/// lowered form R_abcd, so its so-coordinates are just curvature components.
inline Subspace holonomy_algebra(const PointFrame& pf) {
    const int m = pf.dim;
    auto ps = so_basis_pairs(m);
    std::vector<std::vector<Rat>> gens;
    for (auto [a, b] : ps) {
        std::vector<Rat> v;
        for (auto [c, d] : ps)
            v.push_back(pf.curvature.at({a, b, c, d}).constant_value());
        gens.push_back(std::move(v));
    }
    return Subspace(int(ps.size()), gens);
}

/// {v : R(X,Y)v = 0 for all X,Y}, the parallel directions by the holonomy
/// principle on symmetric spaces.
inline Subspace parallel_vectors(const PointFrame& pf) {
    const int m = pf.dim;
    Subspace hol = holonomy_algebra(pf);
    Matrix ginv = inverse(pf.metric);
    std::vector<std::vector<Rat>> rows;
    for (const auto& h : hol.basis()) {
        Tensor endo = so_endomorphism(h, pf.metric);
        for (int a = 0; a < m; ++a) {
            std::vector<Rat> row(m);
            for (int b = 0; b < m; ++b) row[b] = endo.at({a, b}).constant_value();
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) return Subspace::full(m);
    return kernel(Matrix::from_rows(rows));
}

inline std::optional<Tensor> kahler_form(const PointFrame& pf) {
    return pf.kahler;
}

}  // namespace killrange
