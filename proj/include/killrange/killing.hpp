#pragma once

#include <killrange/spaces.hpp>

#include <utility>

namespace killrange {

/// Section of the Killing bundle E = Lambda^1 (+) Lambda^2.
struct KSection {
    Tensor sigma;  // sigma_a
    Tensor mu;     // mu_ab, antisymmetric
};

/// E-valued p-form. The E value splits into a one-form part and a 2-form
/// part; form slots come first, E slots last, all lowered.
struct EValuedForm {
    int degree = 0;
    Tensor sig;  // (p form slots, c)
    Tensor mu;   // (p form slots, c, d)

    bool is_zero() const { return sig.is_zero() && mu.is_zero(); }
    friend EValuedForm operator-(const EValuedForm& a, const EValuedForm& b) {
        return {a.degree, a.sig - b.sig, a.mu - b.mu};
    }
    friend bool operator==(const EValuedForm& a, const EValuedForm& b) {
        return a.degree == b.degree && a.sig == b.sig && a.mu == b.mu;
    }
    friend bool operator!=(const EValuedForm& a, const EValuedForm& b) {
        return !(a == b);
    }
};

inline EValuedForm zero_form(int m, int degree) {
    Valence vs(size_t(degree) + 1, Slot::Down);
    Valence vm(size_t(degree) + 2, Slot::Down);
    return {degree, Tensor(m, vs), Tensor(m, vm)};
}

inline EValuedForm as_form(const KSection& s) { return {0, s.sigma, s.mu}; }

inline void ksection_check(const KSection& s) {
    if (s.sigma.order() != 1 || s.mu.order() != 2)
        throw std::invalid_argument("bad KSection shape");
    if (antisymmetrize(s.mu, {0, 1}) != s.mu)
        throw std::invalid_argument("mu not antisymmetric");
}

/// Section of Delta^2 (x) E: nu is the 2-form block, tau the hook block
/// tau_abc^alpha with tau_[abc] = 0.
struct Delta2Section {
    EValuedForm nu;  // degree 2
    Tensor tau_sig;  // (a, b, c, e)
    Tensor tau_mu;   // (a, b, c, d, e)
};

/// Killing operator X_a -> nabla_(a X_b).
inline Tensor killing_op(const Chart& ch, const Tensor& gamma, const Tensor& X) {
    return symmetrize(covariant_derivative(ch, gamma, X), {0, 1});
}
inline Tensor killing_op(const Chart& ch, const Tensor& X) {
    return killing_op(ch, christoffel(ch), X);
}

/// Calabi operator on a symmetric 2-tensor,
///   C(h)_abcd = nabla_(a nabla_c) h_bd - nabla_(b nabla_c) h_ad
///             - nabla_(a nabla_d) h_bc + nabla_(b nabla_d) h_ac
///             - R_ab{}^e{}_[c h_d]e - R_cd{}^e{}_[a h_b]e.
inline Tensor calabi(const Chart& ch, const Tensor& gamma, const Tensor& h) {
    const int m = ch.dim;
    if (symmetrize(h, {0, 1}) != h)
        throw std::invalid_argument("calabi needs a symmetric tensor");
    Tensor ddh = covariant_derivative(ch, gamma,
                                      covariant_derivative(ch, gamma, h));
    Tensor Rud = riemann_updown(ch, gamma);
    Tensor out(m, {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
    Scalar half(Rat(1, 2));
    Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
        const int a = i[0], b = i[1], c = i[2], d = i[3];
        Scalar s = half * (ddh.at({a, c, b, d}) + ddh.at({c, a, b, d}) -
                           ddh.at({b, c, a, d}) - ddh.at({c, b, a, d}) -
                           ddh.at({a, d, b, c}) - ddh.at({d, a, b, c}) +
                           ddh.at({b, d, a, c}) + ddh.at({d, b, a, c}));
        for (int e = 0; e < m; ++e) {
            Scalar cur = Rud.at({a, b, e, c}) * h.at({d, e}) -
                         Rud.at({a, b, e, d}) * h.at({c, e}) +
                         Rud.at({c, d, e, a}) * h.at({b, e}) -
                         Rud.at({c, d, e, b}) * h.at({a, e});
            if (!cur.is_zero()) s -= half * cur;
        }
        if (!s.is_zero()) out.at(i) = s;
    });
    return out;
}
inline Tensor calabi(const Chart& ch, const Tensor& h) {
    return calabi(ch, christoffel(ch), h);
}

/// Coupled exterior covariant derivative D^wedge (1/p! skew convention).
/// On degree 0 this is the Killing connection itself,
///   D_b [sigma_c; mu_cd] = [nabla_b sigma_c - mu_bc;
///                           nabla_b mu_cd - R_cd{}^e{}_b sigma_e].
inline EValuedForm dwedge(const Chart& ch, const Tensor& gamma,
                          const EValuedForm& phi) {
    const int m = ch.dim, p = phi.degree;
    Tensor Rud = riemann_updown(ch, gamma);
    Tensor ds = covariant_derivative(ch, gamma, phi.sig);  // (a, B, c)
    Tensor dm = covariant_derivative(ch, gamma, phi.mu);   // (a, B, c, d)
    Tensor rsig(m, ds.valence());
    Tensor::for_each_index(m, p + 2, [&](const std::vector<int>& i) {
        // sig'(a, B, c) = nabla_a s_Bc - m_B,ac
        std::vector<int> mi(size_t(p) + 2);
        for (int k = 0; k < p; ++k) mi[k] = i[k + 1];
        mi[p] = i[0];
        mi[p + 1] = i[p + 1];
        Scalar s = ds.at(i) - phi.mu.at(mi);
        if (!s.is_zero()) rsig.at(i) = s;
    });
    Tensor rmu(m, dm.valence());
    Tensor::for_each_index(m, p + 3, [&](const std::vector<int>& i) {
        // mu'(a, B, c, d) = nabla_a m_Bcd - R_cd{}^e{}_a s_Be
        const int a = i[0], c = i[p + 1], d = i[p + 2];
        Scalar s = dm.at(i);
        std::vector<int> si(size_t(p) + 1);
        for (int k = 0; k < p; ++k) si[k] = i[k + 1];
        for (int e = 0; e < m; ++e) {
            const Scalar& r = Rud.at({c, d, e, a});
            if (r.is_zero()) continue;
            si[p] = e;
            s -= r * phi.sig.at(si);
        }
        if (!s.is_zero()) rmu.at(i) = s;
    });
    std::vector<int> form_slots(size_t(p) + 1);
    std::iota(form_slots.begin(), form_slots.end(), 0);
    return {p + 1, antisymmetrize(rsig, form_slots),
            antisymmetrize(rmu, form_slots)};
}
inline EValuedForm dwedge(const Chart& ch, const EValuedForm& phi) {
    return dwedge(ch, christoffel(ch), phi);
}

inline EValuedForm killing_connection(const Chart& ch, const Tensor& gamma,
                                      const KSection& s) {
    ksection_check(s);
    return dwedge(ch, gamma, as_form(s));
}
inline EValuedForm killing_connection(const Chart& ch, const KSection& s) {
    return killing_connection(ch, christoffel(ch), s);
}

namespace detail {

/// mu-block of the Killing curvature kappa = D^[a D^b] on a constant 2-form
/// value mu: R_ab{}^e{}_[c mu_d]e + R_cd{}^e{}_[a mu_b]e, as a 4-tensor.
inline Tensor kappa_mu_value(const Tensor& Rud, const Tensor& mu) {
    const int m = Rud.dim();
    Tensor out(m, {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
    bool constant = true;
    Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
        if (!Rud.at(i).is_constant()) constant = false;
    });
    Tensor::for_each_index(m, 2, [&](const std::vector<int>& i) {
        if (!mu.at(i).is_constant()) constant = false;
    });
    if (constant) {
        // pure rational data: bypass the rational-function arithmetic
        std::vector<Rat> R, M;
        Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
            R.push_back(Rud.at(i).constant_value());
        });
        Tensor::for_each_index(m, 2, [&](const std::vector<int>& i) {
            M.push_back(mu.at(i).constant_value());
        });
        auto rv = [&](int a, int b, int c, int d) -> const Rat& {
            return R[size_t(((a * m + b) * m + c) * m + d)];
        };
        auto mv = [&](int a, int b) -> const Rat& {
            return M[size_t(a * m + b)];
        };
        Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
            const int a = i[0], b = i[1], c = i[2], d = i[3];
            Rat s(0);
            for (int e = 0; e < m; ++e)
                s += rv(a, b, e, c) * mv(d, e) - rv(a, b, e, d) * mv(c, e) +
                     rv(c, d, e, a) * mv(b, e) - rv(c, d, e, b) * mv(a, e);
            if (s != 0) out.at(i) = Scalar(s / 2);
        });
        return out;
    }
    Scalar half(Rat(1, 2));
    Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
        const int a = i[0], b = i[1], c = i[2], d = i[3];
        Scalar s(0);
        for (int e = 0; e < m; ++e) {
            Scalar t = Rud.at({a, b, e, c}) * mu.at({d, e}) -
                       Rud.at({a, b, e, d}) * mu.at({c, e}) +
                       Rud.at({c, d, e, a}) * mu.at({b, e}) -
                       Rud.at({c, d, e, b}) * mu.at({a, e});
            if (!t.is_zero()) s += t;
        }
        if (!s.is_zero()) out.at(i) = half * s;
    });
    return out;
}

}  // namespace detail

/// kappa^(p) applied pointwise: skew of the curvature endomorphism over all
/// form slots. Equals D^wedge(D^wedge(phi)) (tested).
inline EValuedForm kappa_wedge(const Chart& ch, const Tensor& gamma,
                               const EValuedForm& phi) {
    const int m = ch.dim, p = phi.degree;
    Tensor Rud = riemann_updown(ch, gamma);
    Tensor Rlow = raise_lower(Rud, 2, ch.metric, ch.metric_inv);
    Tensor dR = covariant_derivative(ch, gamma, Rlow);
    const bool symmetric_space = dR.is_zero();
    Valence v(size_t(p) + 4, Slot::Down);
    Tensor raw(m, v);
    Scalar half(Rat(1, 2));
    Tensor::for_each_index(m, p + 4, [&](const std::vector<int>& i) {
        const int a = i[0], b = i[1], c = i[p + 2], d = i[p + 3];
        std::vector<int> mi(size_t(p) + 2);
        for (int k = 0; k < p; ++k) mi[k] = i[k + 2];
        Scalar s(0);
        for (int e = 0; e < m; ++e) {
            mi[p + 1] = e;
            mi[p] = d;
            Scalar t = Rud.at({a, b, e, c}) * phi.mu.at(mi);
            mi[p] = c;
            t -= Rud.at({a, b, e, d}) * phi.mu.at(mi);
            mi[p] = b;
            t += Rud.at({c, d, e, a}) * phi.mu.at(mi);
            mi[p] = a;
            t -= Rud.at({c, d, e, b}) * phi.mu.at(mi);
            if (!t.is_zero()) s += t;
        }
        if (!symmetric_space) {
            // -(nabla^e R_abcd) sigma_e
            std::vector<int> si(size_t(p) + 1);
            for (int k = 0; k < p; ++k) si[k] = i[k + 2];
            for (int e = 0; e < m; ++e) {
                si[p] = e;
                const Scalar& se = phi.sig.at(si);
                if (se.is_zero()) continue;
                for (int f = 0; f < m; ++f) {
                    const Scalar& gi = ch.metric_inv.at({e, f});
                    if (gi.is_zero()) continue;
                    s -= Scalar(2) * gi * dR.at({f, a, b, c, d}) * se;
                }
            }
        }
        if (!s.is_zero()) raw.at(i) = half * s;
    });
    std::vector<int> form_slots(size_t(p) + 2);
    std::iota(form_slots.begin(), form_slots.end(), 0);
    EValuedForm out = zero_form(m, p + 2);
    out.mu = antisymmetrize(raw, form_slots);
    return out;
}
inline EValuedForm kappa_wedge(const Chart& ch, const EValuedForm& phi) {
    return kappa_wedge(ch, christoffel(ch), phi);
}

inline EValuedForm kappa_apply(const Chart& ch, const Tensor& gamma,
                               const KSection& s) {
    return kappa_wedge(ch, gamma, as_form(s));
}
inline EValuedForm kappa_apply(const Chart& ch, const KSection& s) {
    return kappa_apply(ch, christoffel(ch), s);
}

/// Rank of the flattened E fiber: m one-form plus m(m-1)/2 two-form
/// coordinates, basis {dx^a} followed by {dx^a ^ dx^b : a < b}.
inline int e_rank(int m) { return m + m * (m - 1) / 2; }

inline std::vector<Rat> e_flatten(const Tensor& sig, const Tensor& mu) {
    const int m = sig.dim();
    std::vector<Rat> v;
    v.reserve(size_t(e_rank(m)));
    for (int a = 0; a < m; ++a) v.push_back(sig.at({a}).constant_value());
    for (auto [a, b] : so_basis_pairs(m))
        v.push_back(mu.at({a, b}).constant_value());
    return v;
}

inline KSection e_unflatten(int m, const std::vector<Rat>& v) {
    if (int(v.size()) != e_rank(m))
        throw std::invalid_argument("bad E coordinate length");
    KSection s{Tensor(m, {Slot::Down}), Tensor(m, {Slot::Down, Slot::Down})};
    for (int a = 0; a < m; ++a) s.sigma.at({a}) = Scalar(v[a]);
    auto ps = so_basis_pairs(m);
    for (size_t k = 0; k < ps.size(); ++k) {
        s.mu.at({ps[k].first, ps[k].second}) = Scalar(v[m + k]);
        s.mu.at({ps[k].second, ps[k].first}) = Scalar(-v[m + k]);
    }
    return s;
}

namespace detail {

inline Tensor frame_riemann_updown(const PointFrame& pf) {
    Tensor gd = Tensor::from_matrix(pf.metric, Slot::Down);
    Tensor gu = Tensor::from_matrix(inverse(pf.metric), Slot::Up);
    return raise_lower(pf.curvature, 2, gd, gu);
}

inline Tensor basis_two_form(int m, int a, int b) {
    Tensor mu(m, {Slot::Down, Slot::Down});
    mu.at({a, b}) = Scalar(1);
    mu.at({b, a}) = Scalar(-1);
    return mu;
}

}  // namespace detail

/// Curvature of the Killing connection at a locally symmetric point, as a
/// matrix E -> Lambda^2 (x) E in the flattened bases. Sigma columns vanish
/// because nabla R = 0.
inline Matrix kappa_matrix(const PointFrame& pf) {
    const int m = pf.dim, N = e_rank(m);
    auto ps = so_basis_pairs(m);
    const int P = int(ps.size());
    Tensor Rud = detail::frame_riemann_updown(pf);
    Matrix K(P * N, N);
    for (int col = 0; col < P; ++col) {
        auto [c, d] = ps[size_t(col)];
        Tensor val =
            detail::kappa_mu_value(Rud, detail::basis_two_form(m, c, d));
        for (int ri = 0; ri < P; ++ri) {
            auto [a, b] = ps[size_t(ri)];
            for (int rj = 0; rj < P; ++rj) {
                auto [e, f] = ps[size_t(rj)];
                K(ri * N + m + rj, m + col) =
                    val.at({a, b, e, f}).constant_value();
            }
        }
    }
    return K;
}

/// The homomorphism R-script of the introduction,
///   (sigma, mu) -> 2R_ab{}^e{}_[c mu_d]e + 2R_cd{}^e{}_[a mu_b]e
///                  - (nabla^e R_abcd) sigma_e,
/// as a matrix E -> (x)^4 Lambda^1 (image lies in the Riemann-symmetry
/// bundle; the sigma term dies on locally symmetric spaces).
inline Matrix curvature_hom_R(const PointFrame& pf) {
    const int m = pf.dim, N = e_rank(m);
    auto ps = so_basis_pairs(m);
    Tensor Rud = detail::frame_riemann_updown(pf);
    Matrix M(m * m * m * m, N);
    for (size_t col = 0; col < ps.size(); ++col) {
        auto [c, d] = ps[col];
        Tensor val =
            detail::kappa_mu_value(Rud, detail::basis_two_form(m, c, d));
        Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
            const Scalar& s = val.at(i);
            if (s.is_zero()) return;
            size_t row = size_t(val.flatten(i));
            M(int(row), m + int(col)) = Rat(2) * s.constant_value();
        });
    }
    return M;
}

/// Augmented curvature E -> Delta^2 (x) E at a locally symmetric point:
/// nu-block = kappa, tau-block = the (A.R)(Y,Z)X term of nabla kappa, which
/// takes values in the one-form part of E only.
inline Matrix augmented_curvature(const PointFrame& pf) {
    const int m = pf.dim, N = e_rank(m);
    auto ps = so_basis_pairs(m);
    const int P = int(ps.size());
    Tensor Rud = detail::frame_riemann_updown(pf);
    Matrix M(P * N + m * P * N, N);
    for (int col = 0; col < P; ++col) {
        auto [c, d] = ps[size_t(col)];
        Tensor val =
            detail::kappa_mu_value(Rud, detail::basis_two_form(m, c, d));
        for (int ri = 0; ri < P; ++ri) {
            auto [a, b] = ps[size_t(ri)];
            for (int rj = 0; rj < P; ++rj) {
                auto [e, f] = ps[size_t(rj)];
                M(ri * N + m + rj, m + col) =
                    val.at({a, b, e, f}).constant_value();
            }
        }
        // tau_abc with value kappa-val_{bcad} in the sigma slot d
        for (int a = 0; a < m; ++a)
            for (int ri = 0; ri < P; ++ri) {
                auto [b, c] = ps[size_t(ri)];
                for (int d = 0; d < m; ++d)
                    M(P * N + (a * P + ri) * N + d, m + col) =
                        val.at({b, c, a, d}).constant_value();
            }
    }
    return M;
}

/// Augmented curvature applied to a constant section over the frame.
inline Delta2Section augmented_apply(const PointFrame& pf, const KSection& s) {
    const int m = pf.dim;
    Tensor Rud = detail::frame_riemann_updown(pf);
    Tensor val = detail::kappa_mu_value(Rud, s.mu);
    Delta2Section out{zero_form(m, 2),
                      Tensor(m, {Slot::Down, Slot::Down, Slot::Down, Slot::Down}),
                      Tensor(m, Valence(5, Slot::Down))};
    out.nu.mu = val;
    Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
        const Scalar& v = val.at({i[1], i[2], i[0], i[3]});
        if (!v.is_zero()) out.tau_sig.at(i) = v;
    });
    return out;
}

struct SphereRangeResult {
    bool nec_holds = false;
    Tensor phi_c;           // solved candidate one-form
    Tensor nec_residual;    // nabla_[b phi_c]^d - delta_[b^d phi_c]
    Tensor suff_residual;   // nabla_a nabla_[b phi_c]^d + phi_a[b delta_c]^d
};

/// Range conditions for nabla on the tangent bundle of the unit sphere:
/// solves the first (necessary) condition for phi_c by its trace and reports
/// the residual of the second (necessary and sufficient) one.
inline SphereRangeResult sphere_range_conditions(const Chart& ch,
                                                 const Tensor& phi) {
    const int m = ch.dim;
    if (phi.valence() != Valence{Slot::Down, Slot::Up})
        throw std::invalid_argument("expected a (1,1)-tensor phi_c^d");
    Tensor gamma = christoffel(ch);
    Tensor T = antisymmetrize(covariant_derivative(ch, gamma, phi), {0, 1});
    Tensor tr = contract(T, 0, 2);  // T_bc{}^b
    SphereRangeResult out;
    out.phi_c = Scalar(Rat(2) / Rat(m - 1)) * tr;
    Scalar half(Rat(1, 2));
    Tensor nec(m, {Slot::Down, Slot::Down, Slot::Up});
    Tensor::for_each_index(m, 3, [&](const std::vector<int>& i) {
        const int b = i[0], c = i[1], d = i[2];
        Scalar s = T.at(i);
        if (b == d) s -= half * out.phi_c.at({c});
        if (c == d) s += half * out.phi_c.at({b});
        if (!s.is_zero()) nec.at(i) = s;
    });
    out.nec_residual = nec;
    out.nec_holds = nec.is_zero();
    Tensor dT = covariant_derivative(ch, gamma, T);
    Tensor phi_low = raise_lower(phi, 1, ch.metric, ch.metric_inv);
    Tensor suff(m, {Slot::Down, Slot::Down, Slot::Down, Slot::Up});
    Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
        const int a = i[0], b = i[1], c = i[2], d = i[3];
        Scalar s = dT.at(i);
        if (c == d) s += half * phi_low.at({a, b});
        if (b == d) s -= half * phi_low.at({a, c});
        if (!s.is_zero()) suff.at(i) = s;
    });
    out.suff_residual = suff;
    return out;
}

// --- maps of the prolonged diagram ---

/// First top-row operator: lambda_de -> [-lambda_cd; nabla_[c lambda_d]e].
inline std::pair<Tensor, Tensor> top_row_1(const Chart& ch, const Tensor& gamma,
                                           const Tensor& lambda) {
    return {-lambda,
            antisymmetrize(covariant_derivative(ch, gamma, lambda), {0, 1})};
}

/// Second top-row operator:
/// [sigma_cd; lambda_cde] -> [nabla_[b sigma_c]d + lambda_bcd;
///                            nabla_[b lambda_cd]e + R_e[b{}^f{}_c sigma_d]f].
inline std::pair<Tensor, Tensor> top_row_2(const Chart& ch, const Tensor& gamma,
                                           const Tensor& sigma,
                                           const Tensor& lambda) {
    const int m = ch.dim;
    Tensor first =
        antisymmetrize(covariant_derivative(ch, gamma, sigma), {0, 1}) + lambda;
    Tensor Rud = riemann_updown(ch, gamma);
    Tensor W(m, Valence(4, Slot::Down));  // R_eb{}^f{}_c sigma_df at (b,c,d,e)
    Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
        const int b = i[0], c = i[1], d = i[2], e = i[3];
        Scalar s(0);
        for (int f = 0; f < m; ++f) {
            const Scalar& r = Rud.at({e, b, f, c});
            if (r.is_zero()) continue;
            s += r * sigma.at({d, f});
        }
        if (!s.is_zero()) W.at(i) = s;
    });
    Tensor second =
        antisymmetrize(covariant_derivative(ch, gamma, lambda), {0, 1, 2}) +
        antisymmetrize(W, {0, 1, 2});
    return {first, second};
}

/// Splitting operator sigma_d -> [sigma_d; nabla_[d sigma_e]].
inline KSection split_sigma(const Chart& ch, const Tensor& gamma,
                            const Tensor& sigma) {
    return {sigma,
            antisymmetrize(covariant_derivative(ch, gamma, sigma), {0, 1})};
}
inline KSection split_sigma(const Chart& ch, const Tensor& sigma) {
    return split_sigma(ch, christoffel(ch), sigma);
}

/// Splitting operator h_cd -> [h_cd; 2 nabla_[d h_e]c].
inline EValuedForm split_h(const Chart& ch, const Tensor& gamma,
                           const Tensor& h) {
    const int m = ch.dim;
    Tensor dh = covariant_derivative(ch, gamma, h);  // (a, b, c)
    Tensor mu(m, Valence(3, Slot::Down));
    Tensor::for_each_index(m, 3, [&](const std::vector<int>& i) {
        const int c = i[0], d = i[1], e = i[2];
        Scalar s = dh.at({d, e, c}) - dh.at({e, d, c});
        if (!s.is_zero()) mu.at(i) = s;
    });
    return {1, h, mu};
}
inline EValuedForm split_h(const Chart& ch, const Tensor& h) {
    return split_h(ch, christoffel(ch), h);
}

/// Quotient of the first column, E -> Lambda^2.
inline Tensor quotient_col1(const Chart& ch, const Tensor& gamma,
                            const KSection& s) {
    return s.mu -
           antisymmetrize(covariant_derivative(ch, gamma, s.sigma), {0, 1});
}

/// Quotient of the second column, Lambda^1 (x) E -> Lambda^2 (+)
/// Lambda^2 (x) Lambda^1, with h_de = sigma_(de).
inline std::pair<Tensor, Tensor> quotient_col2(const Chart& ch,
                                               const Tensor& gamma,
                                               const EValuedForm& phi) {
    if (phi.degree != 1) throw std::invalid_argument("degree 1 expected");
    Tensor h = symmetrize(phi.sig, {0, 1});
    Tensor dh = covariant_derivative(ch, gamma, h);
    return {antisymmetrize(phi.sig, {0, 1}),
            antisymmetrize(phi.mu, {0, 1}) + antisymmetrize(dh, {0, 1})};
}

/// Third-column injection of Lambda^2 (x) Lambda^2 into Lambda^2 (x) E.
inline EValuedForm inject_col3(int m, const Tensor& mu4) {
    EValuedForm out = zero_form(m, 2);
    out.mu = mu4;
    return out;
}

/// Third-column quotient of Lambda^2 (x) E.
inline std::pair<Tensor, Tensor> quotient_col3(const EValuedForm& phi) {
    if (phi.degree != 2) throw std::invalid_argument("degree 2 expected");
    return {phi.sig, antisymmetrize(phi.mu, {0, 1, 2})};
}

/// Bottom-row operator B: mu_bcde -> nabla_[a mu_bc]de.
inline Tensor operator_B(const Chart& ch, const Tensor& gamma,
                         const Tensor& mu4) {
    return antisymmetrize(covariant_derivative(ch, gamma, mu4), {0, 1, 2});
}
inline Tensor operator_B(const Chart& ch, const Tensor& mu4) {
    return operator_B(ch, christoffel(ch), mu4);
}

/// image of the curvature homomorphism in chart components; requires the
/// curvature components to be constant along the chart (true in a parallel
/// coordinate frame such as the flat or Brinkmann charts).
inline Subspace curvature_image_subspace(const Chart& ch) {
    const int m = ch.dim;
    Tensor gamma = christoffel(ch);
    Tensor Rud = riemann_updown(ch, gamma);
    bool constant = true;
    Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
        if (!Rud.at(i).is_constant()) constant = false;
    });
    if (!constant)
        throw std::invalid_argument(
            "curvature components not constant in this chart");
    std::vector<std::vector<Rat>> rows;
    for (auto [c, d] : so_basis_pairs(m)) {
        Tensor val =
            detail::kappa_mu_value(Rud, detail::basis_two_form(m, c, d));
        std::vector<Rat> v;
        v.reserve(size_t(m) * m * m * m);
        Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
            v.push_back(val.at(i).constant_value());
        });
        rows.push_back(std::move(v));
    }
    return Subspace(m * m * m * m, rows);
}

/// The reduced operator L = (projection mod image of the curvature
/// homomorphism) composed with the Calabi operator.
inline Tensor calabi_mod_range(const Chart& ch, const Tensor& h) {
    const int m = ch.dim;
    Subspace im = curvature_image_subspace(ch);
    Tensor out = calabi(ch, h);
    for (const auto& row : im.basis()) {
        int p = Subspace::pivot_col(row);
        std::vector<int> pi(4);
        for (int k = 3; k >= 0; --k) {
            pi[size_t(k)] = p % m;
            p /= m;
        }
        Scalar coeff = out.at(pi);
        if (coeff.is_zero()) continue;
        size_t flat = 0;
        Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
            const Rat& r = row[flat++];
            if (r != 0) out.at(i) -= coeff * Scalar(r);
        });
    }
    return out;
}

}  // namespace killrange
