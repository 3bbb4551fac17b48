#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <killrange/json_io.hpp>
#include <killrange/spaces.hpp>

using namespace killrange;

namespace {

Matrix diagQ(std::vector<long> d) {
    Matrix q(int(d.size()), int(d.size()));
    for (size_t i = 0; i < d.size(); ++i) q(int(i), int(i)) = Rat(d[i]);
    return q;
}

std::map<std::string, Rat> origin(const Chart& ch) {
    std::map<std::string, Rat> pt;
    for (const auto& c : ch.coords) pt[c] = Rat(0);
    return pt;
}

Tensor const_curv_expected(const Chart& ch, int sign) {
    Tensor E(ch.dim, {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
    Scalar c{Rat(sign)};
    for (int a = 0; a < ch.dim; ++a)
        for (int b = 0; b < ch.dim; ++b)
            for (int e = 0; e < ch.dim; ++e)
                for (int d = 0; d < ch.dim; ++d)
                    E.at({a, b, e, d}) =
                        c * (ch.metric.at({a, e}) * ch.metric.at({b, d}) -
                             ch.metric.at({a, d}) * ch.metric.at({b, e}));
    return E;
}

Tensor ricci(const Chart& ch, const Tensor& R_low) {
    // Ric_bd = g^{ac} R_abcd
    Tensor big = tensor_product(Tensor(ch.metric_inv), R_low);
    return contract(contract(big, 0, 2), 0, 2);
}

}  // namespace

TEST_CASE("point frames") {
    PointFrame cw = build_point_frame(
        SpaceSpec::cahen_wallach(diagQ({1, 2})));
    CHECK(cw.dim == 4);
    const int plus = 3;
    CHECK(cw.curvature.at({plus, 1, 1, plus}) == Scalar(1));
    CHECK(cw.curvature.at({plus, 2, 2, plus}) == Scalar(2));
    CHECK(cw.curvature.at({plus, 1, 2, plus}).is_zero());
    CHECK(cw.metric(0, plus) == Rat(1));
    CHECK(young_check(cw.curvature, YoungShape::RiemannBox).member);

    PointFrame fl = build_point_frame(SpaceSpec::flat(1, 1));
    CHECK(fl.curvature.is_zero());
    CHECK(fl.metric(0, 0) == Rat(-1));

    PointFrame s2 = build_point_frame(SpaceSpec::sphere(2, true));
    CHECK(s2.curvature.at({0, 1, 0, 1}) == Scalar(1));
    REQUIRE(s2.kahler.has_value());
    CHECK(s2.kahler->at({0, 1}) == Scalar(1));
    // Ricci of the constant-curvature frame equals g
    Tensor big = tensor_product(
        Tensor::from_matrix(inverse(s2.metric), Slot::Up), s2.curvature);
    Tensor ric = contract(contract(big, 0, 2), 0, 2);
    CHECK(ric == Tensor::from_matrix(s2.metric, Slot::Down));
}

TEST_CASE("charts") {
    Chart cw = build_chart(SpaceSpec::cahen_wallach(diagQ({1})));
    CHECK(cw.metric.at({0, 2}) == Scalar(1));
    CHECK(cw.metric.at({1, 1}) == Scalar(1));
    Scalar x1 = Scalar::variable(cw.coords[1]);
    CHECK(cw.metric.at({2, 2}) == x1 * x1);

    Chart fl = build_chart(SpaceSpec::flat(0, 2));
    CHECK(fl.metric == Tensor::from_matrix(Matrix::identity(2), Slot::Down));
    CHECK(christoffel(fl).is_zero());
    CHECK(riemann_lowered(fl).is_zero());
}

TEST_CASE("sphere chart certification") {
    for (int n : {2, 3}) {
        Chart ch = build_chart(SpaceSpec::sphere(n));
        Tensor gamma = christoffel(ch);
        Tensor R = riemann_lowered(ch);
        CHECK(R == const_curv_expected(ch, 1));
        CHECK(ricci(ch, R) == Scalar(long(n - 1)) * ch.metric);
        CHECK(covariant_derivative(ch, gamma, R).is_zero());
        CHECK(covariant_derivative(ch, gamma, ch.metric).is_zero());
    }
}

TEST_CASE("hyperbolic chart") {
    Chart ch = build_chart(SpaceSpec::hyperbolic(2));
    CHECK(riemann_lowered(ch) == const_curv_expected(ch, -1));
}

TEST_CASE("chart curvature identities") {
    for (const SpaceSpec& spec :
         {SpaceSpec::cahen_wallach(diagQ({1, 2})), SpaceSpec::flat(1, 2),
          SpaceSpec::sphere(2)}) {
        Chart ch = build_chart(spec);
        Tensor gamma = christoffel(ch);
        Tensor R = riemann_lowered(ch);
        CHECK(young_check(R, YoungShape::RiemannBox).member);
        CHECK(covariant_derivative(ch, gamma, ch.metric).is_zero());
        Tensor dR = covariant_derivative(ch, gamma, R);
        // second Bianchi
        CHECK(antisymmetrize(dR, {0, 1, 2}).is_zero());
        // local symmetry
        CHECK(dR.is_zero());
    }
}

TEST_CASE("chart agrees with point frame at the origin") {
    for (const SpaceSpec& spec :
         {SpaceSpec::cahen_wallach(diagQ({1, 2})), SpaceSpec::flat(1, 1),
          SpaceSpec::sphere(2),
          SpaceSpec::product({SpaceSpec::sphere(2), SpaceSpec::flat(1, 1)})}) {
        Chart ch = build_chart(spec);
        PointFrame pf = build_point_frame(spec);
        CHECK(align_to_frame(ch, eval_tensor(riemann_lowered(ch), origin(ch))) ==
              pf.curvature);
        CHECK(align_to_frame(ch, eval_tensor(ch.metric, origin(ch))) ==
              Tensor::from_matrix(pf.metric, Slot::Down));
    }
}

TEST_CASE("product curvature has no mixed components") {
    SpaceSpec spec =
        SpaceSpec::product({SpaceSpec::sphere(2), SpaceSpec::flat(1, 1)});
    PointFrame pf = build_point_frame(spec);
    CHECK(pf.factor_offsets == std::vector<int>{0, 2});
    auto factor_of = [&](int i) { return i < 2 ? 0 : 1; };
    Tensor::for_each_index(pf.dim, 4, [&](const std::vector<int>& idx) {
        int f0 = factor_of(idx[0]);
        for (int k = 1; k < 4; ++k)
            if (factor_of(idx[k]) != f0) {
                CHECK(pf.curvature.at(idx).is_zero());
                return;
            }
    });
    // same identity symbolically on the chart
    Chart ch = build_chart(spec);
    Tensor R = riemann_lowered(ch);
    Tensor::for_each_index(ch.dim, 4, [&](const std::vector<int>& idx) {
        int f0 = factor_of(idx[0]);
        for (int k = 1; k < 4; ++k)
            if (factor_of(idx[k]) != f0) {
                CHECK(R.at(idx).is_zero());
                return;
            }
    });
}

TEST_CASE("holonomy algebra") {
    Matrix Qd = diagQ({1, 0});  // degenerate, rank 1
    CHECK(holonomy_algebra(build_point_frame(SpaceSpec::cahen_wallach(Qd)))
              .dim() == 1);
    CHECK(holonomy_algebra(
              build_point_frame(SpaceSpec::cahen_wallach(diagQ({1, 2}))))
              .dim() == 2);
    CHECK(holonomy_algebra(build_point_frame(SpaceSpec::flat(1, 1))).dim() == 0);
    CHECK(holonomy_algebra(build_point_frame(SpaceSpec::sphere(2))).dim() == 1);
    CHECK(holonomy_algebra(build_point_frame(SpaceSpec::sphere(3))).dim() == 3);
}

TEST_CASE("parallel vectors") {
    CHECK(parallel_vectors(build_point_frame(SpaceSpec::flat(1, 1))).dim() == 2);
    Subspace cw_par = parallel_vectors(
        build_point_frame(SpaceSpec::cahen_wallach(diagQ({1, 2}))));
    CHECK(cw_par.dim() == 1);
    CHECK(cw_par.contains({Rat(1), Rat(0), Rat(0), Rat(0)}));  // e_-
    CHECK(parallel_vectors(build_point_frame(SpaceSpec::sphere(2))).dim() == 0);
}

TEST_CASE("so helpers roundtrip") {
    PointFrame pf = build_point_frame(SpaceSpec::cahen_wallach(diagQ({1, 2})));
    auto ps = so_basis_pairs(pf.dim);
    CHECK(ps.size() == 6);
    std::vector<Rat> coords{Rat(1), Rat(-2), Rat(0), Rat(3), Rat(5), Rat(-1)};
    Tensor endo = so_endomorphism(coords, pf.metric);
    CHECK(so_coordinates(endo, pf.metric) == coords);
    // non-skew endomorphism rejected
    CHECK_THROWS(so_coordinates(Tensor::delta(pf.dim), pf.metric));
}

TEST_CASE("spec JSON roundtrip") {
    using nlohmann::json;
    json cw = {{"type", "cahen_wallach"}, {"Q", {{1, 0}, {0, 2}}}};
    SpaceSpec s = spec_from_json(cw);
    CHECK(s.kind == SpaceSpec::Kind::CahenWallach);
    CHECK(s.Q(1, 1) == 2);
    CHECK(spec_to_json(s) == cw);

    json prod = {{"type", "product"},
                 {"factors",
                  {{{"type", "sphere"}, {"n", 2}, {"hermitian", true}},
                   {{"type", "flat"}, {"p", 1}, {"q", 1}}}}};
    SpaceSpec p = spec_from_json(prod);
    CHECK(p.factors.size() == 2);
    CHECK(p.factors[0].hermitian);
    CHECK(spec_to_json(p) == prod);

    // rational entries as "a/b" strings
    json q3 = {{"type", "cahen_wallach"}, {"Q", {{"1/3"}}}};
    CHECK(spec_from_json(q3).Q(0, 0) == Rat(1) / Rat(3));
    CHECK(spec_to_json(spec_from_json(q3)) == q3);

    CHECK_THROWS_AS(spec_from_json(json{{"type", "torus"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json(json{{"type", "flat"}, {"p", 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        spec_from_json(json{{"type", "cahen_wallach"}, {"Q", {{"1/0"}}}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        spec_from_json(json{{"type", "cahen_wallach"}, {"Q", {{"x"}}}}),
        std::invalid_argument);
}

TEST_CASE("canonical hash is permutation invariant") {
    SpaceSpec a = SpaceSpec::product(
        {SpaceSpec::sphere(2, true), SpaceSpec::flat(1, 1)});
    SpaceSpec b = SpaceSpec::product(
        {SpaceSpec::flat(1, 1), SpaceSpec::sphere(2, true)});
    CHECK(content_hash(a) == content_hash(b));
    CHECK(content_hash(a) != content_hash(SpaceSpec::flat(1, 1)));
    // nested products flatten before hashing
    SpaceSpec c = SpaceSpec::product(
        {SpaceSpec::flat(1, 1),
         SpaceSpec::product({SpaceSpec::sphere(2, true), SpaceSpec::flat(0, 1)})});
    SpaceSpec d = SpaceSpec::product(
        {SpaceSpec::flat(0, 1),
         SpaceSpec::product({SpaceSpec::flat(1, 1), SpaceSpec::sphere(2, true)})});
    CHECK(content_hash(c) == content_hash(d));
}

TEST_CASE("tensor and subspace serialization") {
    Chart s2 = build_chart(SpaceSpec::sphere(2));
    nlohmann::json tj = tensor_to_json(s2.metric);
    CHECK(tj["valence"] == nlohmann::json({"down", "down"}));
    CHECK(tj["components"][0][1] == "0");
    CHECK(tj["components"][0][0].get<std::string>().find("/") !=
          std::string::npos);

    Subspace sub(3, {{Rat(1), Rat(0), Rat(1) / Rat(2)}});
    nlohmann::json sj = subspace_to_json(sub);
    CHECK(sj["ambient"] == 3);
    CHECK(sj["dim"] == 1);
    CHECK(sj["basis"][0][2] == "1/2");
}
