#pragma once

#include <algorithm>
#include <array>
#include <json.hpp>
#include <killrange/killing.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace killrange {

/// Connection D_a s = d_a s + omega[a] s on a trivial rank-r bundle over a
/// chart; omega[a] is an r x r matrix of Scalar coefficients.
struct GenericConnection {
    Chart chart;
    int rank = 0;
    std::vector<std::vector<std::vector<Scalar>>> omega;
};

inline GenericConnection trivial_connection(Chart ch, int rank) {
    GenericConnection gc{std::move(ch), rank, {}};
    gc.omega.assign(size_t(gc.chart.dim),
                    std::vector<std::vector<Scalar>>(
                        size_t(rank), std::vector<Scalar>(size_t(rank))));
    return gc;
}

/// Ascending chain of generalized curvature kernels E_0 <= E_1 <= ...; the
/// last stored step is the first stable one.
struct Filtration {
    std::vector<Subspace> steps;
    bool stabilized = false;

    std::vector<int> dims() const {
        std::vector<int> d;
        for (const auto& s : steps) d.push_back(s.dim());
        return d;
    }
    int stabilized_at() const { return int(steps.size()) - 1; }
};

inline nlohmann::json filtration_report(const Filtration& f, bool parallel) {
    return nlohmann::json{{"dims", f.dims()},
                          {"stabilized_at", f.stabilized_at()},
                          {"parallel", parallel}};
}

/// (A.R)_abcd = -2(R_ab{}^e{}_[c A_d]e + R_cd{}^e{}_[a A_b]e) for a
/// g-skew endomorphism A^a_b acting on a lowered curvature tensor.
inline Tensor act_on_R(const Tensor& A, const Tensor& R, const Matrix& g) {
    const int m = A.dim();
    Matrix low(m, m);
    for (int d = 0; d < m; ++d)
        for (int e = 0; e < m; ++e) {
            Rat s(0);
            for (int f = 0; f < m; ++f)
                s += g(d, f) * A.at({f, e}).constant_value();
            low(d, e) = s;
        }
    for (int d = 0; d < m; ++d)
        for (int e = 0; e < m; ++e)
            if (low(d, e) != -low(e, d))
                throw std::invalid_argument("A not metric-skew");
    Tensor Alow(m, {Slot::Down, Slot::Down});
    for (int d = 0; d < m; ++d)
        for (int e = 0; e < m; ++e)
            if (low(d, e) != 0) Alow.at({d, e}) = Scalar(low(d, e));
    Tensor gd = Tensor::from_matrix(g, Slot::Down);
    Tensor gu = Tensor::from_matrix(inverse(g), Slot::Up);
    Tensor Rud = raise_lower(R, 2, gd, gu);
    // kappa = -(A.R)/2
    return Scalar(Rat(-2)) * detail::kappa_mu_value(Rud, Alow);
}

namespace detail {

inline std::vector<Rat> constant_flatten(const Tensor& t) {
    std::vector<Rat> v;
    Tensor::for_each_index(t.dim(), int(t.valence().size()),
                           [&](const std::vector<int>& i) {
                               v.push_back(t.at(i).constant_value());
                           });
    return v;
}

/// Matrix of A -> [A, H] on so-coordinates, H a fixed so element.
inline Matrix ad_matrix(const std::vector<Rat>& h, const Matrix& g) {
    const int m = g.rows();
    Tensor H = so_endomorphism(h, g);
    auto ps = so_basis_pairs(m);
    const int P = int(ps.size());
    Matrix M(P, P);
    for (int col = 0; col < P; ++col) {
        std::vector<Rat> e(size_t(P), Rat(0));
        e[size_t(col)] = Rat(1);
        Tensor A = so_endomorphism(e, g);
        Tensor br(m, {Slot::Up, Slot::Down});
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                Scalar s;
                for (int c = 0; c < m; ++c)
                    s = s + A.at({a, c}) * H.at({c, b}) -
                        H.at({a, c}) * A.at({c, b});
                br.at({a, b}) = s;
            }
        std::vector<Rat> coords = so_coordinates(br, g);
        for (int row = 0; row < P; ++row) M(row, col) = coords[size_t(row)];
    }
    return M;
}

/// Subspace {w in (Lambda^2 (x) V) : every two-form block of w lies in s}.
inline Subspace blockwise(const Subspace& s, int blocks) {
    const int n = s.ambient();
    std::vector<std::vector<Rat>> rows;
    for (int k = 0; k < blocks; ++k)
        for (const auto& b : s.basis()) {
            std::vector<Rat> w(size_t(blocks) * size_t(n), Rat(0));
            for (int j = 0; j < n; ++j) w[size_t(k * n + j)] = b[size_t(j)];
            rows.push_back(std::move(w));
        }
    return Subspace(blocks * n, rows);
}

inline Filtration kernel_chain(const Matrix& K, int blocks) {
    Filtration f;
    f.steps.push_back(kernel(K));
    while (true) {
        Subspace next =
            preimage_subspace(K, blockwise(f.steps.back(), blocks));
        if (next == f.steps.back()) {
            f.stabilized = true;
            return f;
        }
        f.steps.push_back(next);
    }
}

}  // namespace detail

/// h_0 = aut(R) = {A in so(T,g) : A.R = 0}.
inline Subspace aut_R(const PointFrame& pf) {
    const int m = pf.dim;
    auto ps = so_basis_pairs(m);
    const int P = int(ps.size());
    Matrix M(m * m * m * m, P);
    for (int col = 0; col < P; ++col) {
        std::vector<Rat> e(size_t(P), Rat(0));
        e[size_t(col)] = Rat(1);
        Tensor val =
            act_on_R(so_endomorphism(e, pf.metric), pf.curvature, pf.metric);
        std::vector<Rat> v = detail::constant_flatten(val);
        for (int row = 0; row < int(v.size()); ++row)
            M(row, col) = v[size_t(row)];
    }
    return kernel(M);
}

/// h_k = {A : [A, H] in h_{k-1} for all H in hol}, starting from aut(R).
inline Filtration h_filtration(const PointFrame& pf) {
    const int P = int(so_basis_pairs(pf.dim).size());
    Subspace hol = holonomy_algebra(pf);
    Filtration f;
    f.steps.push_back(aut_R(pf));
    while (true) {
        Subspace next = Subspace::full(P);
        for (const auto& h : hol.basis())
            next = intersection(
                next, preimage_subspace(detail::ad_matrix(h, pf.metric),
                                        f.steps.back()));
        if (next == f.steps.back()) {
            f.stabilized = true;
            return f;
        }
        f.steps.push_back(next);
    }
}

/// Curvature filtration of the Killing connection in flattened E coordinates.
inline Filtration E_filtration(const PointFrame& pf) {
    return detail::kernel_chain(kappa_matrix(pf),
                                int(so_basis_pairs(pf.dim).size()));
}

namespace detail {

inline std::vector<std::map<std::string, Rat>> sample_points(const Chart& ch) {
    std::vector<std::map<std::string, Rat>> pts;
    const Rat bases[5] = {Rat(0), Rat(1), Rat(-1), Rat(1) / Rat(2),
                          Rat(-3) / Rat(2)};
    for (int k = 0; k < 5; ++k) {
        std::map<std::string, Rat> p;
        for (int i = 0; i < ch.dim; ++i)
            p[ch.coords[size_t(i)]] = bases[k] + Rat(i) / Rat(3);
        pts.push_back(std::move(p));
    }
    return pts;
}

using ScalarMatrix = std::vector<std::vector<Scalar>>;

inline ScalarMatrix scalar_mat(int r) {
    return ScalarMatrix(size_t(r), std::vector<Scalar>(size_t(r)));
}

inline ScalarMatrix mat_commutator(const ScalarMatrix& a,
                                   const ScalarMatrix& b) {
    const int r = int(a.size());
    ScalarMatrix c = scalar_mat(r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            Scalar s;
            for (int k = 0; k < r; ++k)
                s = s + a[size_t(i)][size_t(k)] * b[size_t(k)][size_t(j)] -
                    b[size_t(i)][size_t(k)] * a[size_t(k)][size_t(j)];
            c[size_t(i)][size_t(j)] = s;
        }
    return c;
}

/// kappa_ab = d_a omega_b - d_b omega_a + [omega_a, omega_b], per a < b.
inline std::vector<ScalarMatrix> generic_curvature(const GenericConnection& gc) {
    std::vector<ScalarMatrix> ks;
    for (auto [a, b] : so_basis_pairs(gc.chart.dim)) {
        ScalarMatrix k = mat_commutator(gc.omega[size_t(a)], gc.omega[size_t(b)]);
        for (int i = 0; i < gc.rank; ++i)
            for (int j = 0; j < gc.rank; ++j)
                k[size_t(i)][size_t(j)] =
                    k[size_t(i)][size_t(j)] +
                    differentiate(gc.omega[size_t(b)][size_t(i)][size_t(j)],
                                  gc.chart.coords[size_t(a)]) -
                    differentiate(gc.omega[size_t(a)][size_t(i)][size_t(j)],
                                  gc.chart.coords[size_t(b)]);
        ks.push_back(std::move(k));
    }
    return ks;
}

/// Exact row-reduction rank of a matrix of rational functions.
inline int scalar_rank(std::vector<std::vector<Scalar>> m) {
    if (m.empty()) return 0;
    const int rows = int(m.size()), cols = int(m[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (!m[size_t(i)][size_t(c)].is_zero()) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(m[size_t(p)], m[size_t(r)]);
        for (int i = r + 1; i < rows; ++i) {
            if (m[size_t(i)][size_t(c)].is_zero()) continue;
            Scalar f = m[size_t(i)][size_t(c)] / m[size_t(r)][size_t(c)];
            for (int j = c; j < cols; ++j)
                m[size_t(i)][size_t(j)] =
                    m[size_t(i)][size_t(j)] - f * m[size_t(r)][size_t(j)];
        }
        ++r;
    }
    return r;
}

/// Stacked curvature matrix (pairs x rank rows) evaluated at a point.
inline Matrix stacked_curvature_at(const std::vector<ScalarMatrix>& ks, int r,
                                   const std::map<std::string, Rat>& pt) {
    Matrix K(int(ks.size()) * r, r);
    for (size_t p = 0; p < ks.size(); ++p)
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                K(int(p) * r + i, j) = ks[p][size_t(i)][size_t(j)].eval(pt);
    return K;
}

}  // namespace detail

/// Fibre curvature filtration of a generic connection, computed at sampled
/// points and cross-checked for constant rank against the symbolic matrix.
inline Filtration E_filtration(const GenericConnection& gc) {
    auto ks = detail::generic_curvature(gc);
    std::vector<std::vector<Scalar>> stacked;
    for (const auto& k : ks)
        stacked.insert(stacked.end(), k.begin(), k.end());
    const int symbolic = detail::scalar_rank(stacked);
    auto pts = detail::sample_points(gc.chart);
    std::optional<Filtration> result;
    for (const auto& pt : pts) {
        Matrix K = detail::stacked_curvature_at(ks, gc.rank, pt);
        if (rank(K) != symbolic)
            throw std::runtime_error("constant-rank assumption violated");
        Filtration f = detail::kernel_chain(K, int(ks.size()));
        if (!result)
            result = f;
        else if (f.dims() != result->dims())
            throw std::runtime_error("constant-rank assumption violated");
    }
    return *result;
}

struct ParallelnessResult {
    bool parallel = false;
    std::optional<int> failing_level;
};

/// Tests criterion (3): (D_a kappa_bc)(phi) lands in Lambda^1 (x) Lambda^2
/// (x) E_{r-1} for every phi in E_r. Always passes on a symmetric point
/// frame, where D kappa [xi; A] = [(A.R)(Y,Z)X; 0].
inline ParallelnessResult parallelness_check(const PointFrame& pf) {
    const int m = pf.dim, N = e_rank(m);
    auto ps = so_basis_pairs(m);
    Matrix ginv = inverse(pf.metric);
    Tensor Rud = detail::frame_riemann_updown(pf);
    Filtration f = E_filtration(pf);
    for (int r = 0; r < int(f.steps.size()); ++r)
        for (const auto& eta : f.steps[size_t(r)].basis()) {
            KSection s = e_unflatten(m, eta);
            Tensor AR = Scalar(Rat(-2)) * detail::kappa_mu_value(Rud, s.mu);
            for (auto [b, c] : ps)
                for (int a = 0; a < m; ++a) {
                    // ((A.R)(e_b,e_c)e_a)^d = -(A.R)_bca{}^d
                    std::vector<Rat> v(size_t(N), Rat(0));
                    for (int d = 0; d < m; ++d) {
                        Rat x(0);
                        for (int e = 0; e < m; ++e)
                            x -= ginv(d, e) *
                                 AR.at({b, c, a, e}).constant_value();
                        v[size_t(d)] = x;
                    }
                    bool ok = r == 0
                                  ? std::all_of(v.begin(), v.end(),
                                                [](const Rat& x) {
                                                    return x == 0;
                                                })
                                  : f.steps[size_t(r - 1)].contains(v);
                    if (!ok) return {false, r};
                }
        }
    return {true, std::nullopt};
}

/// Same criterion for a generic connection, with the flat coordinate
/// connection as the auxiliary affine connection, checked at sample points.
inline ParallelnessResult parallelness_check(const GenericConnection& gc) {
    auto ks = detail::generic_curvature(gc);
    auto prs = so_basis_pairs(gc.chart.dim);
    std::optional<int> failing;
    for (const auto& pt : detail::sample_points(gc.chart)) {
        Matrix K = detail::stacked_curvature_at(ks, gc.rank, pt);
        Filtration f = detail::kernel_chain(K, int(ks.size()));
        for (int r = 0; r < int(f.steps.size()); ++r) {
            if (failing && *failing <= r) break;
            for (size_t p = 0; p < ks.size(); ++p)
                for (int a = 0; a < gc.chart.dim; ++a) {
                    // D_a kappa_bc = d_a kappa_bc + [omega_a, kappa_bc]
                    detail::ScalarMatrix dk = detail::mat_commutator(
                        gc.omega[size_t(a)], ks[p]);
                    for (int i = 0; i < gc.rank; ++i)
                        for (int j = 0; j < gc.rank; ++j)
                            dk[size_t(i)][size_t(j)] =
                                dk[size_t(i)][size_t(j)] +
                                differentiate(ks[p][size_t(i)][size_t(j)],
                                              gc.chart.coords[size_t(a)]);
                    for (const auto& phi : f.steps[size_t(r)].basis()) {
                        std::vector<Rat> v(size_t(gc.rank), Rat(0));
                        for (int i = 0; i < gc.rank; ++i)
                            for (int j = 0; j < gc.rank; ++j)
                                v[size_t(i)] +=
                                    dk[size_t(i)][size_t(j)].eval(pt) *
                                    phi[size_t(j)];
                        bool ok =
                            r == 0 ? std::all_of(v.begin(), v.end(),
                                                 [](const Rat& x) {
                                                     return x == 0;
                                                 })
                                   : f.steps[size_t(r - 1)].contains(v);
                        if (!ok && (!failing || r < *failing)) failing = r;
                    }
                }
        }
    }
    if (failing) return {false, failing};
    return {true, std::nullopt};
}

namespace detail {

/// kappa^(1): phi_c{}^beta -> kappa_{[ab}{}^alpha{}_{|beta|} phi_{c]}{}^beta,
/// assembled from the per-pair curvature blocks of K.
template <class Entry, class MatrixLike>
inline bool kappa1_injective(int m, int fiber, MatrixLike at) {
    if (m < 3) return false;
    auto ps = so_basis_pairs(m);
    auto pidx = [&](int a, int b) {
        // signed index of (a,b) in the pair basis
        for (size_t k = 0; k < ps.size(); ++k) {
            if (ps[k].first == a && ps[k].second == b) return std::pair{int(k), 1};
            if (ps[k].first == b && ps[k].second == a)
                return std::pair{int(k), -1};
        }
        throw std::logic_error("bad pair");
    };
    std::vector<std::array<int, 3>> triples;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = b + 1; c < m; ++c) triples.push_back({a, b, c});
    std::vector<std::vector<Entry>> M(
        triples.size() * size_t(fiber),
        std::vector<Entry>(size_t(m) * size_t(fiber)));
    for (size_t t = 0; t < triples.size(); ++t) {
        auto [a, b, c] = triples[t];
        const int cyc[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
        for (const auto& q : cyc) {
            auto [k, sign] = pidx(q[0], q[1]);
            for (int al = 0; al < fiber; ++al)
                for (int be = 0; be < fiber; ++be) {
                    Entry e = at(k, al, be);
                    if (sign < 0) e = Entry{} - e;
                    M[t * size_t(fiber) + size_t(al)]
                     [size_t(q[2]) * size_t(fiber) + size_t(be)] =
                         M[t * size_t(fiber) + size_t(al)]
                          [size_t(q[2]) * size_t(fiber) + size_t(be)] +
                         e;
                }
        }
    }
    std::vector<std::vector<Scalar>> S(M.size());
    for (size_t i = 0; i < M.size(); ++i)
        for (const auto& e : M[i]) S[i].push_back(Scalar(e));
    return scalar_rank(S) == m * fiber;
}

}  // namespace detail

/// Genericity of the Killing connection: kappa^(1) injective. Never holds
/// (the one-form part of E sits in ker kappa).
inline bool genericity_test(const PointFrame& pf) {
    Matrix K = kappa_matrix(pf);
    const int N = e_rank(pf.dim);
    return detail::kappa1_injective<Rat>(
        pf.dim, N, [&](int k, int al, int be) { return K(k * N + al, be); });
}

inline bool genericity_test(const GenericConnection& gc) {
    auto ks = detail::generic_curvature(gc);
    return detail::kappa1_injective<Scalar>(
        gc.chart.dim, gc.rank, [&](int k, int al, int be) {
            return ks[size_t(k)][size_t(al)][size_t(be)];
        });
}

struct TraceFormResult {
    bool nondegenerate = false;
    std::optional<Subspace> h0_perp;
    bool E0_equals_E1 = false;
};

/// Decomposition so(T,g) = h_0 + h_0-perp with respect to the trace form
/// B(A,B') = tr(A B'), when h_0 is B-nondegenerate (Riemannian case).
inline TraceFormResult trace_form_decomposition(const PointFrame& pf) {
    const int m = pf.dim;
    auto ps = so_basis_pairs(m);
    const int P = int(ps.size());
    std::vector<Tensor> basis;
    for (int k = 0; k < P; ++k) {
        std::vector<Rat> e(size_t(P), Rat(0));
        e[size_t(k)] = Rat(1);
        basis.push_back(so_endomorphism(e, pf.metric));
    }
    Matrix B(P, P);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            Rat tr(0);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    tr += basis[size_t(i)].at({a, b}).constant_value() *
                          basis[size_t(j)].at({b, a}).constant_value();
            B(i, j) = tr;
        }
    Subspace h0 = aut_R(pf);
    Filtration f = E_filtration(pf);
    TraceFormResult res;
    res.E0_equals_E1 =
        f.steps.size() < 2 || f.steps[0] == f.steps[1];
    res.nondegenerate = is_nondegenerate_on(h0, B);
    if (res.nondegenerate) res.h0_perp = perp(h0, B);
    return res;
}

}  // namespace killrange
