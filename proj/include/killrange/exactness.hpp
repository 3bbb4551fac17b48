#pragma once

#include <functional>
#include <killrange/filtration.hpp>
#include <set>
#include <utility>

namespace killrange {

enum class FactorTag {
    Flat,
    ConstCurvNonzero,
    CahenWallach,
    RiemIrredHermitian,
    RiemIrredNonHermitian
};

struct FactorClass {
    FactorTag tag;
    bool has_parallel_vector = false;
};

inline const char* factor_tag_name(FactorTag t) {
    switch (t) {
        case FactorTag::Flat: return "flat";
        case FactorTag::ConstCurvNonzero: return "const_curv";
        case FactorTag::CahenWallach: return "cahen_wallach";
        case FactorTag::RiemIrredHermitian: return "hermitian";
        case FactorTag::RiemIrredNonHermitian: return "non_hermitian";
    }
    return "?";
}

/// Solution space of R_ac{}^{ef} w_ef = +-2 w_ac after normalizing the
/// factor to Ric = +-g; a nonzero solution flags a Hermitian factor with
/// w a multiple of the Kahler form.
inline Subspace eigenvalue_test(const PointFrame& pf) {
    const int m = pf.dim;
    Matrix ginv = inverse(pf.metric);
    Tensor big = tensor_product(Tensor::from_matrix(ginv, Slot::Up),
                                pf.curvature);
    Tensor ric = contract(contract(big, 0, 2), 0, 2);
    Rat lambda(0);
    for (int i = 0; i < m && lambda == 0; ++i)
        for (int j = 0; j < m; ++j)
            if (pf.metric(i, j) != 0) {
                lambda = ric.at({i, j}).constant_value() / pf.metric(i, j);
                break;
            }
    if (lambda == 0)
        throw std::invalid_argument(
            "eigenvalue test requires an Einstein factor with nonzero scale");
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (ric.at({i, j}).constant_value() != lambda * pf.metric(i, j))
                throw std::invalid_argument(
                    "eigenvalue test requires an Einstein factor with nonzero "
                    "scale");
    const Rat scale = lambda > 0 ? lambda : -lambda;
    const Rat target = lambda > 0 ? Rat(2) : Rat(-2);
    // R_ac{}^{ef}, normalized so that Ric = sign(lambda) g
    Tensor Ruu = raise_lower(
        raise_lower(pf.curvature, 2, Tensor::from_matrix(pf.metric, Slot::Down),
                    Tensor::from_matrix(ginv, Slot::Up)),
        3, Tensor::from_matrix(pf.metric, Slot::Down),
        Tensor::from_matrix(ginv, Slot::Up));
    auto ps = so_basis_pairs(m);
    const int P = int(ps.size());
    Matrix M(P, P);
    for (int r = 0; r < P; ++r)
        for (int c = 0; c < P; ++c) {
            auto [a, b] = ps[size_t(r)];
            auto [e, f] = ps[size_t(c)];
            M(r, c) = Rat(2) * Ruu.at({a, b, e, f}).constant_value() / scale;
            if (r == c) M(r, c) -= target;
        }
    return kernel(M);
}

/// Per-factor classification of the de Rham decomposition.
inline std::vector<FactorClass> classify(const SpaceSpec& spec) {
    using K = SpaceSpec::Kind;
    std::vector<FactorClass> out;
    std::vector<const SpaceSpec*> leaves;
    std::function<void(const SpaceSpec&)> flatten = [&](const SpaceSpec& s) {
        if (s.kind == K::Product)
            for (const auto& f : s.factors) flatten(f);
        else
            leaves.push_back(&s);
    };
    flatten(spec);
    for (const SpaceSpec* f : leaves) {
        FactorClass c;
        switch (f->kind) {
            case K::Flat:
                c.tag = FactorTag::Flat;
                break;
            case K::ConstCurv:
                c.tag = FactorTag::ConstCurvNonzero;
                break;
            case K::Sphere:
            case K::Hyperbolic: {
                bool herm = f->hermitian;
                if (!herm)
                    herm = eigenvalue_test(build_point_frame(*f)).dim() > 0;
                c.tag = herm ? FactorTag::RiemIrredHermitian
                             : FactorTag::RiemIrredNonHermitian;
                break;
            }
            case K::CahenWallach:
                c.tag = FactorTag::CahenWallach;
                break;
            default:
                throw std::invalid_argument(
                    "unsupported factor type; supported: flat, const_curv, "
                    "sphere, hyperbolic, cahen_wallach");
        }
        c.has_parallel_vector =
            parallel_vectors(build_point_frame(*f)).dim() > 0;
        out.push_back(c);
    }
    return out;
}

struct Verdict {
    bool classified = false;
    bool exact = false;
    std::string rule;
    std::optional<std::pair<int, int>> pair;
    std::vector<std::string> citations;
};

inline nlohmann::json verdict_json(const Verdict& v) {
    nlohmann::json j;
    j["exact"] = v.classified ? nlohmann::json(v.exact) : nlohmann::json();
    j["rule"] = v.rule;
    if (v.pair) j["pair"] = {v.pair->first, v.pair->second};
    j["citations"] = v.citations;
    return j;
}

/// The Lorentzian classification: exact unless some Hermitian factor meets
/// some flat or Cahen-Wallach factor. Other signatures are out of scope.
inline Verdict verdict(const SpaceSpec& spec) {
    Verdict v;
    if (!spec.is_lorentzian()) {
        v.rule = "unclassified";
        return v;
    }
    v.classified = true;
    std::vector<FactorClass> fs = classify(spec);
    std::optional<int> herm, degen;
    bool has_cw = false;
    for (size_t i = 0; i < fs.size(); ++i) {
        if (fs[i].tag == FactorTag::RiemIrredHermitian && !herm)
            herm = int(i);
        if ((fs[i].tag == FactorTag::Flat ||
             fs[i].tag == FactorTag::CahenWallach) &&
            !degen)
            degen = int(i);
        if (fs[i].tag == FactorTag::CahenWallach) has_cw = true;
    }
    if (herm && degen) {
        v.exact = false;
        v.rule = "hermitian×(flat|CW)";
        v.pair = {*herm, *degen};
        v.citations = {"Thm 6.2", "Ex 5.8"};
    } else {
        v.exact = true;
        v.rule = "no obstruction pair";
        v.citations = {"Thm 6.2"};
        if (has_cw) v.citations.push_back("Thm 6.1");
    }
    return v;
}

struct CWStructure {
    Subspace hol, h0, h1, h2;
    std::vector<int> h_dims, E_dims;
    bool exact = false;
};

namespace detail {

inline std::vector<Rat> cw_so_coords(const PointFrame& pf, const Matrix& endo) {
    const int m = pf.dim;
    Tensor t(m, {Slot::Up, Slot::Down});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (endo(i, j) != 0) t.at({i, j}) = Scalar(endo(i, j));
    return so_coordinates(t, pf.metric);
}

/// Centralizer of Q inside so(n), in the so(n) pair basis.
inline std::vector<Matrix> so_centralizer(const Matrix& Q) {
    const int n = Q.rows();
    auto ps = so_basis_pairs(n);
    const int P = int(ps.size());
    Matrix M(n * n, P);
    for (int col = 0; col < P; ++col) {
        Matrix B(n, n);
        B(ps[size_t(col)].first, ps[size_t(col)].second) = Rat(1);
        B(ps[size_t(col)].second, ps[size_t(col)].first) = Rat(-1);
        Matrix c = B * Q - Q * B;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i * n + j, col) = c(i, j);
    }
    std::vector<Matrix> out;
    Subspace ker = kernel(M);
    for (const auto& v : ker.basis()) {
        Matrix B(n, n);
        for (int k = 0; k < P; ++k) {
            B(ps[size_t(k)].first, ps[size_t(k)].second) = v[size_t(k)];
            B(ps[size_t(k)].second, ps[size_t(k)].first) = -v[size_t(k)];
        }
        out.push_back(B);
    }
    return out;
}

}  // namespace detail

/// Cahen-Wallach structure: closed-form h_0 = Z_so(n)(Q) |x R^n,
/// h_1 = co(n) |x R^n, h_2 = so(1,n+1), cross-checked against the bracket
/// filtration, with E = E_2 and exactness via the parallel filtration.
inline CWStructure cw_structure(const Matrix& Q) {
    const int n = Q.rows();
    if (n == 0 || Matrix(Q).is_zero())
        throw std::invalid_argument("Q must be nonzero");
    PointFrame pf = build_point_frame(SpaceSpec::cahen_wallach(Q));
    const int m = pf.dim, P = int(so_basis_pairs(m).size());

    auto trans = [&](int i) {
        Matrix A(m, m);
        A(0, 1 + i) = Rat(1);
        A(1 + i, m - 1) = Rat(-1);
        return detail::cw_so_coords(pf, A);
    };
    std::vector<std::vector<Rat>> h0rows, h1rows, holrows;
    for (int i = 0; i < n; ++i) {
        h0rows.push_back(trans(i));
        h1rows.push_back(trans(i));
    }
    for (const Matrix& B : detail::so_centralizer(Q)) {
        Matrix A(m, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(1 + i, 1 + j) = B(i, j);
        h0rows.push_back(detail::cw_so_coords(pf, A));
    }
    for (auto [i, j] : so_basis_pairs(n)) {
        Matrix A(m, m);
        A(1 + i, 1 + j) = Rat(1);
        A(1 + j, 1 + i) = Rat(-1);
        h1rows.push_back(detail::cw_so_coords(pf, A));
    }
    {
        Matrix A(m, m);  // the boost fixing the null line
        A(0, 0) = Rat(1);
        A(m - 1, m - 1) = Rat(-1);
        h1rows.push_back(detail::cw_so_coords(pf, A));
    }
    for (int i = 0; i < n; ++i) {
        // hol = {R(e_i, e_+)} = translations by the columns of Q
        Matrix A(m, m);
        for (int j = 0; j < n; ++j) {
            A(0, 1 + j) = Q(j, i);
            A(1 + j, m - 1) = -Q(j, i);
        }
        holrows.push_back(detail::cw_so_coords(pf, A));
    }

    CWStructure s;
    s.hol = Subspace(P, holrows);
    s.h0 = Subspace(P, h0rows);
    s.h1 = Subspace(P, h1rows);
    s.h2 = Subspace::full(P);

    Filtration hf = h_filtration(pf);
    if (holonomy_algebra(pf) != s.hol || hf.steps.size() != 3 ||
        hf.steps[0] != s.h0 || hf.steps[1] != s.h1 || hf.steps[2] != s.h2)
        throw std::runtime_error(
            "structural and computed filtrations disagree");
    s.h_dims = hf.dims();

    Filtration ef = E_filtration(pf);
    s.E_dims = ef.dims();
    s.exact = ef.steps.back() == Subspace::full(e_rank(m)) &&
              parallelness_check(pf).parallel;
    return s;
}

struct WitnessReport {
    Tensor h, psi, mu;
    EValuedForm residual;
    Tensor obstruction;
    Tensor phi;
};

namespace detail {

inline Scalar scalar_pow(const Scalar& s, int k) {
    Scalar r(1);
    for (int i = 0; i < k; ++i) r = r * s;
    return r;
}

inline std::map<std::string, Rat> poly_coeffs(const Poly& p) {
    std::map<std::string, Rat> m;
    const auto& vars = p.vars();
    for (const auto& [e, c] : p.terms()) {
        std::string key;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0)
                key += vars[i] + "^" + std::to_string(e[i]) + " ";
        m[key] += c;
    }
    return m;
}

/// Kahler potential on the stereographic chart block: solves
/// d phi = w with phi = p(x,y) (x dy - y dx) / (1+r^2)^k, deg p <= 2, k <= 3.
inline std::pair<Scalar, Scalar> kahler_potential(const Chart& ch, int off,
                                                  const Scalar& w) {
    Scalar x = Scalar::variable(ch.coords[size_t(off)]);
    Scalar y = Scalar::variable(ch.coords[size_t(off) + 1]);
    const Scalar base = Scalar(1) + x * x + y * y;
    const std::vector<Scalar> mono{Scalar(1), x, y, x * x, x * y, y * y};
    const std::string cx = ch.coords[size_t(off)];
    const std::string cy = ch.coords[size_t(off) + 1];
    for (int k = 0; k <= 3; ++k) {
        Scalar denk = scalar_pow(base, k);
        std::vector<Scalar> fx, fy, curls;
        for (const Scalar& p : mono) {
            Scalar px = Scalar(0) - y * p / denk, py = x * p / denk;
            fx.push_back(px);
            fy.push_back(py);
            curls.push_back(differentiate(py, cx) - differentiate(px, cy));
        }
        // clear denominators and match polynomial coefficients
        Scalar mult = scalar_pow(base, k + 3);
        std::vector<std::map<std::string, Rat>> cols;
        bool bad = false;
        for (const Scalar& f : curls) {
            Scalar g = f * mult;
            if (!g.den().is_constant()) {
                bad = true;
                break;
            }
            cols.push_back(
                poly_coeffs(g.num() * Poly(Rat(1) / g.den().constant_value())));
        }
        Scalar wg = w * mult;
        if (bad || !wg.den().is_constant()) continue;
        std::map<std::string, Rat> rhs =
            poly_coeffs(wg.num() * Poly(Rat(1) / wg.den().constant_value()));
        std::set<std::string> keys;
        for (const auto& c : cols)
            for (const auto& [kk, vv] : c) keys.insert(kk);
        for (const auto& [kk, vv] : rhs) keys.insert(kk);
        Matrix A(int(keys.size()), int(mono.size()) + 1);
        int row = 0;
        for (const auto& kk : keys) {
            for (size_t j = 0; j < cols.size(); ++j) {
                auto it = cols[j].find(kk);
                if (it != cols[j].end()) A(row, int(j)) = it->second;
            }
            auto it = rhs.find(kk);
            if (it != rhs.end()) A(row, int(mono.size())) = it->second;
            ++row;
        }
        Subspace ker = kernel(A);
        for (const auto& v : ker.basis()) {
            if (v.back() == 0) continue;
            Scalar px, py;
            for (size_t j = 0; j < mono.size(); ++j) {
                Rat c = -v[j] / v.back();
                px = px + Scalar(c) * fx[j];
                py = py + Scalar(c) * fy[j];
            }
            if (differentiate(py, cx) - differentiate(px, cy) == w)
                return {px, py};
        }
    }
    throw std::runtime_error("potential search failed: raise degree bound");
}

}  // namespace detail

/// The non-exactness witness of a Hermitian x (flat|CW) product:
/// h = phi_( A xi_B), psi = 2 grad_[C h_D]B, mu = phi_[A xi_B]; then
/// D-wedge [h; psi] equals the curvature image of mu while the would-be
/// potential forces the contradiction w (x) xi = 0.
inline WitnessReport nonexactness_witness(const SpaceSpec& spec) {
    using K = SpaceSpec::Kind;
    if (spec.kind != K::Product)
        throw std::invalid_argument("witness needs a product space");
    std::vector<FactorClass> fs = classify(spec);
    std::optional<int> fh, fp;
    for (size_t i = 0; i < fs.size(); ++i) {
        if (fs[i].tag == FactorTag::RiemIrredHermitian && !fh) fh = int(i);
        if (fs[i].has_parallel_vector && !fp) fp = int(i);
    }
    if (!fh)
        throw std::invalid_argument(
            "witness needs a Hermitian factor with a Kahler potential");
    if (!fp)
        throw std::invalid_argument(
            "witness needs a factor with a parallel one-form");
    if (spec.factors[size_t(*fh)].kind != K::Sphere)
        throw std::invalid_argument(
            "witness needs a Hermitian factor with a Kahler potential");

    Chart ch = build_chart(spec);
    Tensor gamma = christoffel(ch);
    const int m = ch.dim;
    const int offh = ch.factor_offsets[size_t(*fh)];
    const int offp = ch.factor_offsets[size_t(*fp)];

    // Kahler form of the stereographic block is its conformal volume form
    Tensor omega(m, {Slot::Down, Slot::Down});
    omega.at({offh, offh + 1}) = ch.metric.at({offh, offh});
    omega.at({offh + 1, offh}) = Scalar(0) - ch.metric.at({offh, offh});
    if (!covariant_derivative(ch, gamma, omega).is_zero())
        throw std::logic_error("Kahler form not parallel");

    auto [px, py] = detail::kahler_potential(ch, offh,
                                             ch.metric.at({offh, offh}));
    Tensor phi(m, {Slot::Down});
    phi.at({offh}) = px;
    phi.at({offh + 1}) = py;

    // parallel one-form on the other factor
    Tensor xi(m, {Slot::Down});
    if (spec.factors[size_t(*fp)].kind == K::CahenWallach)
        xi.at({offp + spec.factors[size_t(*fp)].dim() - 1}) = Scalar(1);
    else
        xi.at({offp}) = Scalar(1);
    if (!covariant_derivative(ch, gamma, xi).is_zero())
        throw std::logic_error("xi not parallel");

    WitnessReport rep;
    rep.phi = phi;
    rep.h = Scalar(Rat(1) / Rat(2)) *
            (tensor_product(phi, xi) + tensor_product(xi, phi));
    Tensor dh = covariant_derivative(ch, gamma, rep.h);
    rep.psi = Tensor(m, {Slot::Down, Slot::Down, Slot::Down});
    Tensor::for_each_index(m, 3, [&](const std::vector<int>& i) {
        // psi_BCD = 2 grad_[C h_D]B
        rep.psi.at(i) = dh.at({i[1], i[2], i[0]}) - dh.at({i[2], i[1], i[0]});
    });
    rep.mu = Scalar(Rat(1) / Rat(2)) *
             (tensor_product(phi, xi) - tensor_product(xi, phi));

    EValuedForm eta{1, rep.h, rep.psi};
    EValuedForm lhs = dwedge(ch, gamma, eta);
    Tensor Rud = riemann_updown(ch, gamma);
    Tensor expected = detail::kappa_mu_value(Rud, rep.mu);
    rep.residual = EValuedForm{2, lhs.sig, lhs.mu - expected};

    rep.obstruction = Tensor(m, {Slot::Down, Slot::Down, Slot::Down});
    Tensor::for_each_index(m, 3, [&](const std::vector<int>& i) {
        Scalar v = omega.at({i[0], i[1]}) * xi.at({i[2]});
        if (!v.is_zero()) rep.obstruction.at(i) = v;
    });
    if (rep.obstruction.is_zero())
        throw std::logic_error("vanishing obstruction");
    return rep;
}

struct MixedKernelResult {
    Tensor hypothesis;    // grad_[A phi_B]CD
    Tensor conclusion_1;  // R_ab{}^e{}_c phi_(bar a) e (bar b)
    Tensor conclusion_2;  // R_(bar a)(bar b){}^(bar e)_(bar c) phi_ab(bar e)
};

/// Residuals of the mixed-kernel constraints on a two-factor product.
inline MixedKernelResult mixed_kernel_check(const Chart& ch,
                                            const Tensor& phi) {
    if (ch.factor_offsets.size() != 2)
        throw std::invalid_argument("mixed kernel check needs two factors");
    const int m = ch.dim;
    auto factor_of = [&](int i) {
        return i >= ch.factor_offsets[1] ? 1 : 0;
    };
    Tensor gamma = christoffel(ch);
    Tensor Rud = riemann_updown(ch, gamma);
    MixedKernelResult res;
    res.hypothesis =
        antisymmetrize(covariant_derivative(ch, gamma, phi), {0, 1});
    Tensor c1(m, {Slot::Down, Slot::Down, Slot::Down, Slot::Down, Slot::Down});
    Tensor c2 = c1;
    Tensor::for_each_index(m, 5, [&](const std::vector<int>& i) {
        // i = (A,B,C,X,Y): R_AB{}^E{}_C phi_X E Y
        int fr = factor_of(i[0]);
        if (factor_of(i[1]) != fr || factor_of(i[2]) != fr) return;
        if (factor_of(i[3]) == fr || factor_of(i[4]) == fr) return;
        Scalar s;
        for (int e = 0; e < m; ++e)
            s = s + Rud.at({i[0], i[1], e, i[2]}) * phi.at({i[3], e, i[4]});
        if (s.is_zero()) return;
        (fr == 0 ? c1 : c2).at(i) = s;
    });
    res.conclusion_1 = c1;
    res.conclusion_2 = c2;
    return res;
}

}  // namespace killrange
