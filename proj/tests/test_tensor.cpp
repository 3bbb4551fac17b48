#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <killrange/tensor.hpp>

#include <random>

using namespace killrange;

namespace {

std::mt19937_64 rng(20260823);

Tensor random_tensor(int dim, const Valence& v) {
    std::uniform_int_distribution<int> d(-4, 4);
    Tensor t(dim, v);
    Tensor::for_each_index(dim, int(v.size()), [&](const std::vector<int>& idx) {
        t.at(idx) = Scalar(Rat(d(rng)));
    });
    return t;
}

Matrix euclid(int n) { return Matrix::identity(n); }

Tensor const_curv_R(const Matrix& g) {
    // R_abcd = g_ac g_bd - g_ad g_bc
    const int n = g.rows();
    Tensor R(n, {Slot::Down, Slot::Down, Slot::Down, Slot::Down});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    R.at({a, b, c, d}) =
                        Scalar(g(a, c) * g(b, d) - g(a, d) * g(b, c));
    return R;
}

}  // namespace

TEST_CASE("contract") {
    CHECK(contract(Tensor::delta(4), 0, 1) == Tensor::scalar(4, Scalar(4)));
    // g^{ab} g_{bc} = delta^a_c
    Matrix g(2, 2);
    g(0, 0) = Rat(2);
    g(0, 1) = g(1, 0) = Rat(1);
    g(1, 1) = Rat(3);
    Tensor gd = Tensor::from_matrix(g, Slot::Down);
    Tensor gu = Tensor::from_matrix(inverse(g), Slot::Up);
    Tensor prod = tensor_product(gu, gd);  // g^{ab} g_{cd}
    Tensor mixed = contract(prod, 1, 2);   // over b=c
    // compare against delta with matching valence (Up, Down)
    Tensor expect(2, {Slot::Up, Slot::Down});
    expect.at({0, 0}) = expect.at({1, 1}) = Scalar(1);
    CHECK(mixed == expect);
    CHECK_THROWS(contract(gd, 0, 1));
}

TEST_CASE("constant curvature Ricci contraction") {
    // R_abcd = g_ac g_bd - g_ad g_bc over n=3 Euclidean; g^{bd} R_abcd = 2 g_ac
    Matrix g = euclid(3);
    Tensor R = const_curv_R(g);
    Tensor gu = Tensor::from_matrix(inverse(g), Slot::Up);
    Tensor big = tensor_product(gu, R);  // slots: ^b ^d _a _b _c _d
    Tensor ric = contract(contract(big, 0, 3), 0, 3);
    CHECK(ric == Scalar(2) * Tensor::from_matrix(g, Slot::Down));
}

TEST_CASE("antisymmetrize includes the 1/p! weight") {
    Tensor e1 = Tensor::basis_vector(2, 0, Slot::Down);
    Tensor e2 = Tensor::basis_vector(2, 1, Slot::Down);
    Tensor w = antisymmetrize(tensor_product(e1, e2), {0, 1});
    CHECK(w.at({0, 1}) == Scalar(Rat(1, 2)));
    CHECK(w.at({1, 0}) == Scalar(Rat(-1, 2)));
    CHECK(w.at({0, 0}).is_zero());
    // antisymmetrizing a symmetric tensor kills it
    Tensor h = random_tensor(3, {Slot::Down, Slot::Down});
    h = symmetrize(h, {0, 1});
    CHECK(antisymmetrize(h, {0, 1}).is_zero());
}

TEST_CASE("symmetrizers are projections") {
    for (int t = 0; t < 5; ++t) {
        Tensor T = random_tensor(3, {Slot::Down, Slot::Down, Slot::Down});
        Tensor s = symmetrize(T, {0, 2});
        CHECK(symmetrize(s, {0, 2}) == s);
        Tensor a = antisymmetrize(T, {0, 1, 2});
        CHECK(antisymmetrize(a, {0, 1, 2}) == a);
        // mixed symmetrizer annihilation
        CHECK(antisymmetrize(symmetrize(T, {0, 1}), {0, 1}).is_zero());
    }
}

TEST_CASE("contracting a symmetrized pair against an antisymmetric tensor") {
    Tensor S = symmetrize(random_tensor(3, {Slot::Down, Slot::Down}), {0, 1});
    Tensor A = antisymmetrize(random_tensor(3, {Slot::Up, Slot::Up}), {0, 1});
    Tensor p = tensor_product(S, A);  // _a _b ^c ^d
    Tensor full = contract(contract(p, 0, 2), 0, 1);
    CHECK(full.is_zero());
}

TEST_CASE("raise and lower") {
    Matrix g(2, 2);
    g(0, 0) = Rat(-1);
    g(1, 1) = Rat(1);
    Tensor gd = Tensor::from_matrix(g, Slot::Down);
    Tensor gu = Tensor::from_matrix(inverse(g), Slot::Up);
    Tensor X(2, {Slot::Up});
    X.at({0}) = Scalar(1);
    Tensor low = raise_lower(X, 0, gd, gu);
    CHECK(low.at({0}) == Scalar(-1));
    CHECK(low.at({1}).is_zero());
    CHECK(raise_lower(low, 0, gd, gu) == X);
    // roundtrip on a random higher tensor
    Tensor T = random_tensor(2, {Slot::Down, Slot::Up, Slot::Down});
    CHECK(raise_lower(raise_lower(T, 2, gd, gu), 2, gd, gu) == T);
}

TEST_CASE("raise_lower commutes with contraction on disjoint slots") {
    Matrix g(3, 3);
    g(0, 0) = Rat(2);
    g(1, 1) = Rat(-1);
    g(2, 2) = Rat(1);
    g(0, 1) = g(1, 0) = Rat(1);
    Tensor gd = Tensor::from_matrix(g, Slot::Down);
    Tensor gu = Tensor::from_matrix(inverse(g), Slot::Up);
    Tensor T = random_tensor(3, {Slot::Up, Slot::Down, Slot::Down});
    // contract slots 0,1; flip slot 2
    Tensor lhs = raise_lower(contract(T, 0, 1), 0, gd, gu);
    Tensor rhs = contract(raise_lower(T, 2, gd, gu), 0, 1);
    CHECK(lhs == rhs);
}

TEST_CASE("young_check") {
    Matrix g = euclid(3);
    Tensor R = const_curv_R(g);
    CHECK(young_check(R, YoungShape::RiemannBox).member);
    Tensor gd = Tensor::from_matrix(g, Slot::Down);
    auto bad = young_check(tensor_product(gd, gd), YoungShape::RiemannBox);
    CHECK(!bad.member);
    CHECK(!bad.residual.is_zero());
    // Hook3: tau_abc = tau_a[bc], tau_[abc] = 0
    Tensor raw = random_tensor(3, {Slot::Down, Slot::Down, Slot::Down});
    Tensor tau = antisymmetrize(raw, {1, 2});
    tau = tau - antisymmetrize(tau, {0, 1, 2});
    CHECK(young_check(tau, YoungShape::Hook3).member);
    Tensor sym = symmetrize(raw, {0, 1, 2});
    CHECK(!young_check(sym, YoungShape::Hook3).member);
}

TEST_CASE("symbolic components survive tensor ops") {
    Scalar x = Scalar::variable("x");
    Tensor T(2, {Slot::Down, Slot::Down});
    T.at({0, 1}) = x;
    T.at({1, 0}) = -x;
    CHECK(antisymmetrize(T, {0, 1}) == T);
    CHECK(eval_tensor(T, {{"x", Rat(3)}}).at({0, 1}) == Scalar(3));
}
