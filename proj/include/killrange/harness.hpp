#pragma once

#include <killrange/exactness.hpp>
#include <random>
#include <sstream>

namespace killrange {

/// Reproducible polynomial test field: same (chart, valence, degree, seed)
/// always yields the same components. Seed 0 is the zero-field sentinel.
struct TestField {
    Chart chart;
    Valence valence;
    int degree = 0;
    unsigned long seed = 0;
    Tensor components;
};

inline TestField random_field(const Chart& ch, const Valence& v, int degree,
                              unsigned long seed, int max_degree = 3) {
    if (degree < 0 || degree > max_degree)
        throw std::invalid_argument("degree exceeds the configured bound");
    TestField f{ch, v, degree, seed, Tensor(ch.dim, v)};
    if (seed == 0) return f;
    std::mt19937_64 rng(seed);
    // exponent tuples of total degree <= degree, in a fixed order
    std::vector<std::vector<int>> expos;
    std::vector<int> cur(size_t(ch.dim), 0);
    std::function<void(int, int)> gen = [&](int k, int left) {
        if (k == ch.dim) {
            expos.push_back(cur);
            return;
        }
        for (int e = 0; e <= left; ++e) {
            cur[size_t(k)] = e;
            gen(k + 1, left - e);
        }
        cur[size_t(k)] = 0;
    };
    gen(0, degree);
    Tensor::for_each_index(ch.dim, int(v.size()), [&](const std::vector<int>& i) {
        Scalar s;
        for (const auto& e : expos) {
            Rat c(long(rng() % 11) - 5);
            if (c == 0) continue;
            Scalar mono{c};
            for (int k = 0; k < ch.dim; ++k)
                for (int p = 0; p < e[size_t(k)]; ++p)
                    mono = mono * Scalar::variable(ch.coords[size_t(k)]);
            s = s + mono;
        }
        if (!s.is_zero()) f.components.at(i) = s;
    });
    return f;
}

struct CheckResult {
    bool pass = false;
    bool residual_norm_zero = false;
    std::string details;
};

struct SuiteReport {
    std::map<std::string, CheckResult> checks;

    bool pass() const {
        for (const auto& [k, v] : checks)
            if (!v.pass) return false;
        return true;
    }
    nlohmann::json to_json() const {
        nlohmann::json cj = nlohmann::json::object();
        for (const auto& [k, v] : checks)
            cj[k] = {{"pass", v.pass},
                     {"residual_norm_zero", v.residual_norm_zero},
                     {"details", v.details}};
        return {{"pass", pass()}, {"checks", cj}};
    }
};

namespace detail {

inline Tensor field_or_zero(const Chart& ch, const Valence& v, int deg,
                            unsigned long seed) {
    return random_field(ch, v, deg, seed).components;
}

inline KSection suite_section(const Chart& ch, int deg, unsigned long seed) {
    return {field_or_zero(ch, {Slot::Down}, deg, seed * 2 + 1),
            antisymmetrize(
                field_or_zero(ch, {Slot::Down, Slot::Down}, deg, seed * 2 + 2),
                {0, 1})};
}

/// Polynomial charts (flat, Brinkmann) take degree-2 fields; conformal
/// charts stay at degree 1 to keep the rational arithmetic small.
inline int suite_degree(const Chart& ch) {
    bool poly = true;
    Tensor::for_each_index(ch.dim, 2, [&](const std::vector<int>& i) {
        if (!ch.metric.at(i).den().is_constant()) poly = false;
    });
    return poly ? 2 : 1;
}

inline Subspace tm_plus_h_sub(int m, const Subspace& h) {
    const int N = e_rank(m);
    std::vector<std::vector<Rat>> rows;
    for (int i = 0; i < m; ++i) {
        std::vector<Rat> v(size_t(N), Rat(0));
        v[size_t(i)] = Rat(1);
        rows.push_back(std::move(v));
    }
    for (const auto& w : h.basis()) {
        std::vector<Rat> v(size_t(N), Rat(0));
        for (size_t k = 0; k < w.size(); ++k) v[size_t(m) + k] = w[k];
        rows.push_back(std::move(v));
    }
    return Subspace(N, rows);
}

/// A Killing covector the chart is known to admit: a parallel coordinate
/// covector on flat and Cahen-Wallach blocks, a linear eta-isometry
/// generator on curved blocks. Products use their first factor.
inline Tensor known_killing_covector(const Chart& ch, const SpaceSpec& spec) {
    using K = SpaceSpec::Kind;
    const SpaceSpec* f = &spec;
    while (f->kind == K::Product) f = &f->factors.front();
    Tensor sigma(ch.dim, {Slot::Down});
    const int d = f->dim();
    if (f->kind == K::Flat) {
        sigma.at({0}) = Scalar(1);
        return sigma;
    }
    if (f->kind == K::CahenWallach) {
        sigma.at({d - 1}) = Scalar(1);
        return sigma;
    }
    // rotation or boost in the (0,1)-plane, lowered with the block metric
    Scalar x0 = Scalar::variable(ch.coords[0]);
    Scalar x1 = Scalar::variable(ch.coords[1]);
    std::map<std::string, Rat> origin;
    for (const auto& c : ch.coords) origin[c] = Rat(0);
    bool same_sign = ch.metric.at({0, 0}).eval(origin) ==
                     ch.metric.at({1, 1}).eval(origin);
    Tensor X(ch.dim, {Slot::Up});
    X.at({0}) = same_sign ? Scalar(0) - x1 : x1;
    X.at({1}) = x0;
    return raise_lower(X, 0, ch.metric, ch.metric_inv);
}

/// Flattened connection matrices of the Killing connection over the chart:
/// D_b v = d_b v + omega_b v on (sigma_c; mu_{c<d}) coordinates.
inline std::vector<ScalarMatrix> killing_omega(const Chart& ch,
                                               const Tensor& gamma) {
    const int m = ch.dim, N = e_rank(m);
    auto ps = so_basis_pairs(m);
    auto pair_col = [&](int x, int y) {  // (index, sign) of mu_xy
        for (size_t k = 0; k < ps.size(); ++k) {
            if (ps[k] == std::pair{x, y}) return std::pair{int(k), 1};
            if (ps[k] == std::pair{y, x}) return std::pair{int(k), -1};
        }
        return std::pair{-1, 0};
    };
    Tensor Rud = riemann_updown(ch, gamma);
    std::vector<ScalarMatrix> om(size_t(m), scalar_mat(N));
    for (int b = 0; b < m; ++b) {
        auto& w = om[size_t(b)];
        for (int c = 0; c < m; ++c) {
            // sigma'_c = d_b sigma_c - Gamma^e_bc sigma_e - mu_bc
            for (int e = 0; e < m; ++e)
                w[size_t(c)][size_t(e)] =
                    w[size_t(c)][size_t(e)] - gamma.at({e, b, c});
            auto [q, s] = pair_col(b, c);
            if (q >= 0)
                w[size_t(c)][size_t(m + q)] =
                    w[size_t(c)][size_t(m + q)] - Scalar(Rat(s));
        }
        for (size_t r = 0; r < ps.size(); ++r) {
            // mu'_cd = d_b mu_cd - Gamma^e_bc mu_ed - Gamma^e_bd mu_ce
            //          - R_cd{}^e{}_b sigma_e
            auto [c, d] = ps[r];
            auto& row = w[size_t(m) + r];
            for (int e = 0; e < m; ++e) {
                if (auto [q, s] = pair_col(e, d); q >= 0)
                    row[size_t(m + q)] = row[size_t(m + q)] -
                                         Scalar(Rat(s)) * gamma.at({e, b, c});
                if (auto [q, s] = pair_col(c, e); q >= 0)
                    row[size_t(m + q)] = row[size_t(m + q)] -
                                         Scalar(Rat(s)) * gamma.at({e, b, d});
                row[size_t(e)] = row[size_t(e)] - Rud.at({c, d, e, b});
            }
        }
    }
    return om;
}

inline GenericConnection toy_section3_connection() {
    GenericConnection gc =
        trivial_connection(build_chart(SpaceSpec::flat(0, 2)), 2);
    gc.omega[0][1][0] = Scalar(1);
    gc.omega[0][0][1] = Scalar::variable(gc.chart.coords[1]);
    return gc;
}

}  // namespace detail

/// Replays the structural identities on the given built-in space with exact
/// zero-residual checking; expected-failure entries assert a NONzero
/// residual. Deterministic given (spec, seeds).
inline SuiteReport run_suite(const SpaceSpec& spec,
                             const std::vector<unsigned long>& seeds,
                             int max_degree = 3) {
    SuiteReport rep;
    Chart ch = build_chart(spec);
    Tensor gamma = christoffel(ch);
    PointFrame pf = build_point_frame(spec);
    const int m = ch.dim;
    const int deg = std::min(detail::suite_degree(ch), max_degree);
    auto record = [&](const std::string& name, bool pass, bool zero,
                      std::string details) {
        rep.checks[name] = {pass, zero, std::move(details)};
    };

    {  // 1: dwedge of the connection equals the curvature
        bool ok = true;
        std::string bad;
        for (unsigned long s : seeds) {
            KSection sec = detail::suite_section(ch, deg, s);
            EValuedForm res =
                dwedge(ch, gamma, killing_connection(ch, gamma, sec)) -
                kappa_apply(ch, gamma, sec);
            if (!res.is_zero()) {
                ok = false;
                bad = "nonzero residual at seed " + std::to_string(s);
                break;
            }
        }
        record("01_curvature_identity", ok, ok, ok ? "ok" : bad);
    }

    {  // 2: Bianchi identities and the hook symmetry of the tau block
        Tensor Rlow = riemann_lowered(ch);
        bool first = antisymmetrize(Rlow, {0, 1, 2}).is_zero();
        bool second =
            antisymmetrize(covariant_derivative(ch, gamma, Rlow), {0, 1, 2})
                .is_zero();
        bool hook = true;
        for (auto [c, d] : so_basis_pairs(m)) {
            KSection s = e_unflatten(m, std::vector<Rat>(size_t(e_rank(m))));
            s.mu.at({c, d}) = Scalar(1);
            s.mu.at({d, c}) = Scalar(-1);
            Delta2Section out = augmented_apply(pf, s);
            for (int e = 0; e < m && hook; ++e) {
                Tensor slice(m, Valence(3, Slot::Down));
                Tensor::for_each_index(m, 3, [&](const std::vector<int>& i) {
                    slice.at(i) = out.tau_sig.at({i[0], i[1], i[2], e});
                });
                hook = young_check(slice, YoungShape::Hook3).member;
            }
            if (!out.tau_mu.is_zero()) hook = false;
        }
        bool ok = first && second && hook;
        record("02_bianchi", ok, ok,
               ok ? "ok"
                  : std::string(!first    ? "first Bianchi fails"
                                : !second ? "second Bianchi fails"
                                          : "tau block lacks hook symmetry"));
    }

    {  // 3: the prolonged diagram commutes
        bool ok = true;
        std::string bad;
        for (unsigned long s : seeds) {
            Tensor sigma = detail::field_or_zero(ch, {Slot::Down}, deg, s * 7 + 1);
            if (killing_connection(ch, gamma, split_sigma(ch, gamma, sigma)) !=
                split_h(ch, gamma, killing_op(ch, gamma, sigma))) {
                ok = false;
                bad = "lower-left square, seed " + std::to_string(s);
                break;
            }
            if (!quotient_col1(ch, gamma, split_sigma(ch, gamma, sigma))
                     .is_zero()) {
                ok = false;
                bad = "column-1 quotient, seed " + std::to_string(s);
                break;
            }
            Tensor h = symmetrize(
                detail::field_or_zero(ch, {Slot::Down, Slot::Down}, deg,
                                      s * 7 + 2),
                {0, 1});
            EValuedForm rhs = zero_form(m, 2);
            rhs.mu = Scalar(Rat(1) / Rat(2)) * calabi(ch, gamma, h);
            if (dwedge(ch, gamma, split_h(ch, gamma, h)) != rhs) {
                ok = false;
                bad = "lower-right square, seed " + std::to_string(s);
                break;
            }
            auto [q1, q2] = quotient_col2(ch, gamma, split_h(ch, gamma, h));
            if (!q1.is_zero() || !q2.is_zero()) {
                ok = false;
                bad = "column-2 quotient, seed " + std::to_string(s);
                break;
            }
            Tensor mu4 = calabi(ch, gamma, h);
            EValuedForm dw = dwedge(ch, gamma, inject_col3(m, mu4));
            auto [q3a, q3b] = quotient_col3(inject_col3(m, mu4));
            if (!dw.sig.is_zero() || dw.mu != operator_B(ch, gamma, mu4) ||
                !q3a.is_zero() || !q3b.is_zero()) {
                ok = false;
                bad = "column-3 square, seed " + std::to_string(s);
                break;
            }
            Tensor lambda = antisymmetrize(
                detail::field_or_zero(ch, {Slot::Down, Slot::Down}, deg,
                                      s * 7 + 3),
                {0, 1});
            auto [t1, t2] = top_row_1(ch, gamma, lambda);
            auto [u1, u2] = top_row_2(ch, gamma, t1, t2);
            if (!u1.is_zero() || !u2.is_zero()) {
                ok = false;
                bad = "top row not a complex, seed " + std::to_string(s);
                break;
            }
        }
        record("03_diagram", ok, ok, ok ? "ok" : bad);
    }

    {  // 4: Killing covectors split to parallel sections, non-Killing do not
        Tensor sig = detail::known_killing_covector(ch, spec);
        bool known =
            killing_connection(ch, gamma, split_sigma(ch, gamma, sig)).is_zero();
        bool converse = true;
        for (unsigned long s : seeds) {
            Tensor r = detail::field_or_zero(ch, {Slot::Down}, deg, s * 3 + 2);
            if (killing_op(ch, gamma, r).is_zero()) continue;  // accidentally Killing
            if (killing_connection(ch, gamma, split_sigma(ch, gamma, r))
                    .is_zero())
                converse = false;
        }
        bool ok = known && converse;
        record("04_killing_parallel", ok, known,
               ok ? "ok"
                  : std::string(!known ? "known Killing covector not parallel"
                                       : "non-Killing covector came out parallel"));
    }

    {  // 5: L compose K = 0 (mod the curvature image)
        bool ok = true;
        std::string bad;
        bool constant_R = true;
        Tensor Rud = riemann_updown(ch, gamma);
        Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
            if (!Rud.at(i).is_constant()) constant_R = false;
        });
        Tensor Rlow = riemann_lowered(ch);
        for (unsigned long s : seeds) {
            Tensor X = detail::field_or_zero(ch, {Slot::Down}, deg, s * 5 + 4);
            Tensor C = calabi(ch, gamma, killing_op(ch, gamma, X));
            if (constant_R) {
                if (!calabi_mod_range(ch, killing_op(ch, gamma, X)).is_zero()) {
                    ok = false;
                    bad = "nonzero mod-range residual at seed " +
                          std::to_string(s);
                    break;
                }
                continue;
            }
            // conformal chart: project into the pointwise curvature image
            for (const auto& pt : detail::sample_points(ch)) {
                Tensor Rpt = eval_tensor(Rlow, pt);
                Matrix gm(m, m);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        gm(i, j) = ch.metric.at({i, j}).eval(pt);
                PointFrame local{m, gm, Rpt, std::nullopt, {}, {}};
                Subspace im = image(curvature_hom_R(local));
                Tensor Cpt = eval_tensor(C, pt);
                std::vector<Rat> v;
                Tensor::for_each_index(m, 4, [&](const std::vector<int>& i) {
                    v.push_back(Cpt.at(i).constant_value());
                });
                if (!im.contains(v)) {
                    ok = false;
                    bad = "value outside the curvature image at seed " +
                          std::to_string(s);
                    break;
                }
            }
            if (!ok) break;
        }
        record("05_calabi_complex", ok, ok, ok ? "ok" : bad);
    }

    {  // 6: E filtration = TM (+) h filtration
        Filtration ef = E_filtration(pf);
        Filtration hf = h_filtration(pf);
        bool ok = ef.steps.size() == hf.steps.size();
        for (size_t k = 0; ok && k < ef.steps.size(); ++k)
            ok = ef.steps[k] == detail::tm_plus_h_sub(m, hf.steps[k]);
        record("06_filtration_splits", ok, ok,
               ok ? "ok" : "filtrations disagree");
    }

    {  // 7: symbolic gradient of kappa equals the closed form [(A.R)(Y,Z)X; 0]
        const int N = e_rank(m);
        auto ps = so_basis_pairs(m);
        auto om = detail::killing_omega(ch, gamma);
        GenericConnection gc{ch, N, om};
        auto ks = detail::generic_curvature(gc);
        auto kappa_of = [&](int x, int y) {
            detail::ScalarMatrix z = detail::scalar_mat(N);
            for (size_t k = 0; k < ps.size(); ++k) {
                if (ps[k] == std::pair{x, y}) return ks[k];
                if (ps[k] == std::pair{y, x}) {
                    for (int i = 0; i < N; ++i)
                        for (int j = 0; j < N; ++j)
                            z[size_t(i)][size_t(j)] =
                                Scalar(0) - ks[k][size_t(i)][size_t(j)];
                    return z;
                }
            }
            return z;
        };
        Tensor Rud = riemann_updown(ch, gamma);
        bool ok = true;
        std::string bad;
        for (int a = 0; a < m && ok; ++a)
            for (size_t p = 0; p < ps.size() && ok; ++p) {
                auto [b, c] = ps[p];
                detail::ScalarMatrix dk = detail::mat_commutator(om[size_t(a)], ks[p]);
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j)
                        dk[size_t(i)][size_t(j)] =
                            dk[size_t(i)][size_t(j)] +
                            differentiate(ks[p][size_t(i)][size_t(j)],
                                          ch.coords[size_t(a)]);
                for (int e = 0; e < m; ++e) {
                    const Scalar& gb = gamma.at({e, a, b});
                    const Scalar& gcs = gamma.at({e, a, c});
                    if (gb.is_zero() && gcs.is_zero()) continue;
                    detail::ScalarMatrix keb = kappa_of(e, c), kbe = kappa_of(b, e);
                    for (int i = 0; i < N; ++i)
                        for (int j = 0; j < N; ++j)
                            dk[size_t(i)][size_t(j)] =
                                dk[size_t(i)][size_t(j)] -
                                gb * keb[size_t(i)][size_t(j)] -
                                gcs * kbe[size_t(i)][size_t(j)];
                }
                // expected: sigma columns vanish; the mu column for the
                // basis two-form A yields [(A.R)(Y,Z)X; 0]
                for (int j = 0; j < N && ok; ++j) {
                    for (int i = m; i < N; ++i)
                        if (!dk[size_t(i)][size_t(j)].is_zero()) {
                            ok = false;
                            bad = "mu block of grad kappa nonzero";
                        }
                    if (j < m) {
                        for (int i = 0; i < m; ++i)
                            if (!dk[size_t(i)][size_t(j)].is_zero()) {
                                ok = false;
                                bad = "sigma column of grad kappa nonzero";
                            }
                        continue;
                    }
                    auto [e, f] = ps[size_t(j - m)];
                    Tensor kv = detail::kappa_mu_value(
                        Rud, detail::basis_two_form(m, e, f));
                    for (int r = 0; r < m; ++r)
                        if (dk[size_t(r)][size_t(j)] !=
                            Scalar(-2) * kv.at({b, c, a, r})) {
                            ok = false;
                            bad = "closed form mismatch";
                        }
                }
            }
        record("07_dkappa_closed_form", ok, ok, ok ? "ok" : bad);
    }

    {  // 8: Cahen-Wallach structure chain (fixed reference instance)
        bool ok = true;
        std::string bad = "ok";
        try {
            Matrix Q(2, 2);
            Q(0, 0) = Rat(1);
            Q(1, 1) = Rat(2);
            CWStructure s = cw_structure(Q);
            ok = s.h_dims == std::vector<int>{2, 4, 6} &&
                 s.E_dims == std::vector<int>{6, 8, 10} && s.exact;
            if (!ok) bad = "dimension chain mismatch";
        } catch (const std::exception& e) {
            ok = false;
            bad = e.what();
        }
        record("08_cw_structure", ok, ok, bad);
    }

    {  // 9: the witness on the reference obstructed product
        bool ok = true, zero = false;
        std::string bad = "ok";
        try {
            WitnessReport w = nonexactness_witness(SpaceSpec::product(
                {SpaceSpec::sphere(2, true), SpaceSpec::flat(1, 1)}));
            zero = w.residual.sig.is_zero() && w.residual.mu.is_zero();
            ok = zero && !w.obstruction.is_zero();
            if (!ok) bad = zero ? "obstruction vanished" : "nonzero residual";
        } catch (const std::exception& e) {
            ok = false;
            bad = e.what();
        }
        record("09_witness", ok, zero, bad);
    }

    {  // 10: the toy connection fails parallelness at level 0 (expected failure)
        GenericConnection gc = detail::toy_section3_connection();
        ParallelnessResult pr = parallelness_check(gc);
        bool ok = !pr.parallel && pr.failing_level == 0;
        record("10_toy_connection", ok, false,
               ok ? "non-parallel as asserted"
                  : "toy connection unexpectedly parallel");
    }

    {  // 11: the round-sphere delta counterexample (expected failure)
        Chart s2 = build_chart(SpaceSpec::sphere(2));
        SphereRangeResult r = sphere_range_conditions(s2, Tensor::delta(2));
        Tensor expected(2, {Slot::Down, Slot::Down, Slot::Down, Slot::Up});
        Scalar half(Rat(1) / Rat(2));
        Tensor::for_each_index(2, 4, [&](const std::vector<int>& i) {
            Scalar v;
            if (i[2] == i[3]) v = v + half * s2.metric.at({i[0], i[1]});
            if (i[1] == i[3]) v = v - half * s2.metric.at({i[0], i[2]});
            if (!v.is_zero()) expected.at(i) = v;
        });
        bool ok = r.nec_holds && r.phi_c.is_zero() &&
                  !r.suff_residual.is_zero() && r.suff_residual == expected;
        record("11_sphere_range_delta", ok, false,
               ok ? "second condition fails with the predicted residual"
                  : "counterexample did not behave as predicted");
    }

    return rep;
}

}  // namespace killrange
