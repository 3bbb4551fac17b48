#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <killrange/killing.hpp>

#include <random>

using namespace killrange;

namespace {

std::mt19937_64 rng(4711);

Matrix diagQ(std::vector<long> d) {
    Matrix q(int(d.size()), int(d.size()));
    for (size_t i = 0; i < d.size(); ++i) q(int(i), int(i)) = Rat(d[i]);
    return q;
}

Scalar rand_poly(const Chart& ch, int deg) {
    std::uniform_int_distribution<int> c(-3, 3);
    Scalar s{Rat(c(rng))};
    if (deg >= 1)
        for (const auto& v : ch.coords)
            s += Scalar(Rat(c(rng))) * Scalar::variable(v);
    if (deg >= 2)
        for (size_t i = 0; i < ch.coords.size(); ++i)
            for (size_t j = i; j < ch.coords.size(); ++j)
                s += Scalar(Rat(c(rng))) * Scalar::variable(ch.coords[i]) *
                     Scalar::variable(ch.coords[j]);
    return s;
}

Tensor rand_tensor(const Chart& ch, const Valence& v, int deg) {
    Tensor t(ch.dim, v);
    Tensor::for_each_index(ch.dim, int(v.size()),
                           [&](const std::vector<int>& i) {
                               t.at(i) = rand_poly(ch, deg);
                           });
    return t;
}

KSection rand_section(const Chart& ch, int deg) {
    return {rand_tensor(ch, {Slot::Down}, deg),
            antisymmetrize(rand_tensor(ch, {Slot::Down, Slot::Down}, deg),
                           {0, 1})};
}

/// rotation Killing field in the (i,j)-plane, as a vector field
Tensor rotation_vector(const Chart& ch, int i, int j) {
    Tensor X(ch.dim, {Slot::Up});
    X.at({i}) = -Scalar::variable(ch.coords[size_t(j)]);
    X.at({j}) = Scalar::variable(ch.coords[size_t(i)]);
    return X;
}

Tensor lower(const Chart& ch, const Tensor& X) {
    return raise_lower(X, 0, ch.metric, ch.metric_inv);
}

}  // namespace

TEST_CASE("killing operator") {
    Chart fl = build_chart(SpaceSpec::flat(0, 2));
    CHECK(killing_op(fl, lower(fl, rotation_vector(fl, 0, 1))).is_zero());
    // radial field X_a = x_a gives the metric back
    Tensor X(2, {Slot::Down});
    X.at({0}) = Scalar::variable(fl.coords[0]);
    X.at({1}) = Scalar::variable(fl.coords[1]);
    CHECK(killing_op(fl, X) == fl.metric);

    Chart s2 = build_chart(SpaceSpec::sphere(2));
    CHECK(killing_op(s2, lower(s2, rotation_vector(s2, 0, 1))).is_zero());
}

TEST_CASE("calabi operator") {
    Chart fl = build_chart(SpaceSpec::flat(1, 2));
    Tensor gamma = christoffel(fl);
    for (int t = 0; t < 3; ++t) {
        Tensor X = rand_tensor(fl, {Slot::Down}, 2);
        CHECK(calabi(fl, gamma, killing_op(fl, gamma, X)).is_zero());
    }
    // Riemann symmetries hold identically for arbitrary symmetric h
    for (const SpaceSpec& spec :
         {SpaceSpec::cahen_wallach(diagQ({1, 2})), SpaceSpec::sphere(2),
          SpaceSpec::flat(1, 2)}) {
        Chart ch = build_chart(spec);
        Tensor g2 = christoffel(ch);
        Tensor h = symmetrize(
            rand_tensor(ch, {Slot::Down, Slot::Down}, 1), {0, 1});
        CHECK(young_check(calabi(ch, g2, h), YoungShape::RiemannBox).member);
    }
    CHECK_THROWS(calabi(fl, rand_tensor(fl, {Slot::Down, Slot::Down}, 1)));
}

TEST_CASE("killing connection kills parallel sections") {
    Chart fl = build_chart(SpaceSpec::flat(1, 1));
    KSection con{Tensor(2, {Slot::Down}), Tensor(2, {Slot::Down, Slot::Down})};
    con.sigma.at({0}) = Scalar(3);
    con.sigma.at({1}) = Scalar(-2);
    CHECK(killing_connection(fl, con).is_zero());

    // CW: the parallel null covector dx^p lifts to a parallel section
    Chart cw = build_chart(SpaceSpec::cahen_wallach(diagQ({1, 2})));
    KSection par{Tensor(4, {Slot::Down}), Tensor(4, {Slot::Down, Slot::Down})};
    par.sigma.at({3}) = Scalar(1);
    CHECK(killing_connection(cw, par).is_zero());

    // sphere: a Killing covector with mu = nabla_[b sigma_c]
    Chart s2 = build_chart(SpaceSpec::sphere(2));
    Tensor sigma = lower(s2, rotation_vector(s2, 0, 1));
    CHECK(killing_connection(s2, split_sigma(s2, sigma)).is_zero());
}

TEST_CASE("dwedge of the connection is the curvature") {
    for (const SpaceSpec& spec :
         {SpaceSpec::cahen_wallach(diagQ({1, 2})), SpaceSpec::sphere(2),
          SpaceSpec::flat(1, 2),
          SpaceSpec::product({SpaceSpec::sphere(2), SpaceSpec::flat(1, 1)})}) {
        Chart ch = build_chart(spec);
        Tensor gamma = christoffel(ch);
        int deg = spec.kind == SpaceSpec::Kind::Sphere ||
                          spec.kind == SpaceSpec::Kind::Product
                      ? 1
                      : 2;
        for (int t = 0; t < 2; ++t) {
            KSection s = rand_section(ch, deg);
            EValuedForm lhs = dwedge(ch, gamma, killing_connection(ch, gamma, s));
            CHECK(lhs == kappa_apply(ch, gamma, s));
        }
    }
}

TEST_CASE("dwedge squared on 1-forms") {
    Chart fl = build_chart(SpaceSpec::flat(1, 2));
    Tensor gflat = christoffel(fl);
    EValuedForm phi{1, rand_tensor(fl, Valence(2, Slot::Down), 2),
                    antisymmetrize(rand_tensor(fl, Valence(3, Slot::Down), 2),
                                   {1, 2})};
    CHECK(dwedge(fl, gflat, dwedge(fl, gflat, phi)).is_zero());

    Chart s2 = build_chart(SpaceSpec::sphere(2));
    Tensor gs = christoffel(s2);
    EValuedForm psi{1, rand_tensor(s2, Valence(2, Slot::Down), 1),
                    antisymmetrize(rand_tensor(s2, Valence(3, Slot::Down), 1),
                                   {1, 2})};
    CHECK(dwedge(s2, gs, dwedge(s2, gs, psi)) == kappa_wedge(s2, gs, psi));
}

TEST_CASE("kappa matrix") {
    CHECK(kappa_matrix(build_point_frame(SpaceSpec::sphere(2))).is_zero());
    CHECK(kappa_matrix(build_point_frame(SpaceSpec::sphere(3))).is_zero());
    CHECK(kappa_matrix(build_point_frame(SpaceSpec::flat(1, 2))).is_zero());
    Matrix K =
        kappa_matrix(build_point_frame(SpaceSpec::cahen_wallach(diagQ({1, 2}))));
    CHECK(rank(K) == 4);
    CHECK(kernel(K).dim() == 6);
}

TEST_CASE("curvature homomorphism") {
    PointFrame cw = build_point_frame(SpaceSpec::cahen_wallach(diagQ({1, 2})));
    Matrix R = curvature_hom_R(cw);
    CHECK(rank(R) == 4);
    // sigma columns vanish on a locally symmetric frame
    const int m = cw.dim;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < R.rows(); ++i) CHECK(R(i, j) == 0);
    // each column obeys the Riemann symmetries
    for (int j = m; j < R.cols(); ++j) {
        Tensor col(m, Valence(4, Slot::Down));
        int i = 0;
        Tensor::for_each_index(m, 4, [&](const std::vector<int>& idx) {
            col.at(idx) = Scalar(R(i++, j));
        });
        CHECK(young_check(col, YoungShape::RiemannBox).member);
    }
    CHECK(curvature_hom_R(build_point_frame(SpaceSpec::sphere(3))).is_zero());
}

TEST_CASE("augmented curvature") {
    CHECK(augmented_curvature(build_point_frame(SpaceSpec::sphere(2))).is_zero());
    PointFrame cw = build_point_frame(SpaceSpec::cahen_wallach(diagQ({1, 2})));
    Matrix aug = augmented_curvature(cw);
    Subspace k_aug = kernel(aug);
    Subspace k_kappa = kernel(kappa_matrix(cw));
    CHECK(k_aug == k_kappa);
    CHECK(k_aug.dim() == 6);
    // Bianchi: the tau block has hook symmetry in every so-direction
    const int m = cw.dim;
    for (auto [c, d] : so_basis_pairs(m)) {
        KSection s = e_unflatten(m, std::vector<Rat>(size_t(e_rank(m))));
        s.mu.at({c, d}) = Scalar(1);
        s.mu.at({d, c}) = Scalar(-1);
        Delta2Section out = augmented_apply(cw, s);
        for (int e = 0; e < m; ++e) {
            Tensor slice(m, Valence(3, Slot::Down));
            Tensor::for_each_index(m, 3, [&](const std::vector<int>& i) {
                slice.at(i) = out.tau_sig.at({i[0], i[1], i[2], e});
            });
            CHECK(young_check(slice, YoungShape::Hook3).member);
        }
        CHECK(out.tau_mu.is_zero());
    }
}

TEST_CASE("sphere range conditions") {
    Chart s3 = build_chart(SpaceSpec::sphere(3));
    Tensor gamma = christoffel(s3);
    // phi in the range: the derivative of a Killing field
    Tensor phi = covariant_derivative(s3, gamma, rotation_vector(s3, 0, 1));
    auto res = sphere_range_conditions(s3, phi);
    CHECK(res.nec_holds);
    CHECK(res.suff_residual.is_zero());

    // the identity endomorphism passes nec with phi_c = 0 but fails suff
    auto bad = sphere_range_conditions(s3, Tensor::delta(3));
    CHECK(bad.nec_holds);
    CHECK(bad.phi_c.is_zero());
    Tensor expected(3, {Slot::Down, Slot::Down, Slot::Down, Slot::Up});
    Scalar half(Rat(1, 2));
    Tensor::for_each_index(3, 4, [&](const std::vector<int>& i) {
        Scalar s(0);
        if (i[2] == i[3]) s += half * s3.metric.at({i[0], i[1]});
        if (i[1] == i[3]) s -= half * s3.metric.at({i[0], i[2]});
        if (!s.is_zero()) expected.at(i) = s;
    });
    CHECK(bad.suff_residual == expected);

    auto zero = sphere_range_conditions(s3, Tensor(3, {Slot::Down, Slot::Up}));
    CHECK(zero.nec_holds);
    CHECK(zero.suff_residual.is_zero());

    // in two dimensions nec is vacuous: any phi admits a trace solution
    Chart s2 = build_chart(SpaceSpec::sphere(2));
    CHECK(sphere_range_conditions(s2, rand_tensor(s2, {Slot::Down, Slot::Up}, 1))
              .nec_holds);
}

TEST_CASE("diagram commutes") {
    Chart cw = build_chart(SpaceSpec::cahen_wallach(diagQ({1, 2})));
    Tensor gamma = christoffel(cw);
    const int m = cw.dim;

    // lower left square, which is also Theorem 4.1(2) constructively
    Tensor sigma = rand_tensor(cw, {Slot::Down}, 2);
    CHECK(killing_connection(cw, gamma, split_sigma(cw, gamma, sigma)) ==
          split_h(cw, gamma, killing_op(cw, gamma, sigma)));
    CHECK(quotient_col1(cw, gamma, split_sigma(cw, gamma, sigma)).is_zero());

    // lower right square
    Tensor h =
        symmetrize(rand_tensor(cw, {Slot::Down, Slot::Down}, 2), {0, 1});
    EValuedForm rhs = zero_form(m, 2);
    rhs.mu = Scalar(Rat(1, 2)) * calabi(cw, gamma, h);
    CHECK(dwedge(cw, gamma, split_h(cw, gamma, h)) == rhs);

    // middle column: the splitting is a section of the quotient
    auto [q1, q2] = quotient_col2(cw, gamma, split_h(cw, gamma, h));
    CHECK(q1.is_zero());
    CHECK(q2.is_zero());

    // third column square: dwedge of an injected Riemann-symmetric mu
    Tensor mu4 = calabi(cw, gamma, h);
    EValuedForm dw = dwedge(cw, gamma, inject_col3(m, mu4));
    CHECK(dw.sig.is_zero());
    CHECK(dw.mu == operator_B(cw, gamma, mu4));
}

TEST_CASE("top row is a complex") {
    for (const SpaceSpec& spec :
         {SpaceSpec::cahen_wallach(diagQ({1, 2})), SpaceSpec::sphere(2)}) {
        Chart ch = build_chart(spec);
        Tensor gamma = christoffel(ch);
        int deg = spec.kind == SpaceSpec::Kind::Sphere ? 1 : 2;
        Tensor lambda = antisymmetrize(
            rand_tensor(ch, {Slot::Down, Slot::Down}, deg), {0, 1});
        auto [s1, l1] = top_row_1(ch, gamma, lambda);
        auto [s2, l2] = top_row_2(ch, gamma, s1, l1);
        CHECK(s2.is_zero());
        CHECK(l2.is_zero());
    }
}

TEST_CASE("reduced operator") {
    Chart cw = build_chart(SpaceSpec::cahen_wallach(diagQ({1, 2})));
    Tensor gamma = christoffel(cw);
    // L vanishes on the range of the Killing operator
    for (int t = 0; t < 2; ++t) {
        Tensor X = rand_tensor(cw, {Slot::Down}, 2);
        CHECK(calabi_mod_range(cw, killing_op(cw, gamma, X)).is_zero());
    }
    // C(g) = 2R lies in the image of the curvature homomorphism
    Tensor g_field(cw.dim, {Slot::Down, Slot::Down});
    Tensor::for_each_index(cw.dim, 2, [&](const std::vector<int>& i) {
        g_field.at(i) = cw.metric.at(i);
    });
    CHECK(calabi(cw, gamma, g_field) ==
          Scalar(2) * riemann_lowered(cw));
    CHECK(calabi_mod_range(cw, g_field).is_zero());
    // conformal charts do not have constant curvature components
    Chart s2 = build_chart(SpaceSpec::sphere(2));
    CHECK_THROWS(calabi_mod_range(s2, Tensor(2, {Slot::Down, Slot::Down})));
}
