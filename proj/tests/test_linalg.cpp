#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <killrange/linalg.hpp>

#include <random>

using namespace killrange;

namespace {

std::mt19937_64 rng(20260823);

Matrix random_matrix(int r, int c) {
    std::uniform_int_distribution<int> d(-4, 4);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Rat(d(rng));
    return m;
}

Subspace random_subspace(int ambient, int gens) {
    std::vector<std::vector<Rat>> rows;
    std::uniform_int_distribution<int> d(-3, 3);
    for (int i = 0; i < gens; ++i) {
        std::vector<Rat> v(ambient);
        for (auto& x : v) x = Rat(d(rng));
        rows.push_back(v);
    }
    return Subspace(ambient, rows);
}

}  // namespace

TEST_CASE("rref and rank") {
    Matrix m = Matrix::from_rows({{Rat(1), Rat(2), Rat(3)},
                                  {Rat(2), Rat(4), Rat(6)},
                                  {Rat(0), Rat(1), Rat(1)}});
    CHECK(rank(m) == 2);
    auto piv = rref_in_place(m);
    CHECK(piv == std::vector<int>{0, 1});
    CHECK(m(0, 0) == 1);
    CHECK(m(0, 1) == 0);
    CHECK(m(0, 2) == 1);
    CHECK(m(1, 2) == 1);
}

TEST_CASE("kernel and image dimensions") {
    for (int t = 0; t < 20; ++t) {
        Matrix m = random_matrix(4, 6);
        int r = rank(m);
        Subspace ker = kernel(m);
        CHECK(ker.dim() == 6 - r);
        CHECK(image(m).dim() == r);
        // every kernel basis vector maps to zero
        for (const auto& v : ker.basis()) {
            auto w = m.apply(v);
            for (const auto& x : w) CHECK(x == 0);
        }
    }
}

TEST_CASE("subspace canonical form and membership") {
    Subspace a(3, {{Rat(1), Rat(1), Rat(0)}, {Rat(0), Rat(0), Rat(1)}});
    Subspace b(3, {{Rat(2), Rat(2), Rat(2)}, {Rat(0), Rat(0), Rat(-5)}});
    CHECK(a == b);
    CHECK(a.contains({Rat(3), Rat(3), Rat(7)}));
    CHECK(!a.contains({Rat(1), Rat(0), Rat(0)}));
    auto coords = a.coordinates({Rat(3), Rat(3), Rat(7)});
    CHECK(coords == std::vector<Rat>{Rat(3), Rat(7)});
}

TEST_CASE("sum and intersection satisfy the dimension formula") {
    for (int t = 0; t < 20; ++t) {
        Subspace a = random_subspace(5, 3), b = random_subspace(5, 3);
        Subspace s = sum(a, b), i = intersection(a, b);
        CHECK(s.dim() + i.dim() == a.dim() + b.dim());
        CHECK(a.contains(i));
        CHECK(b.contains(i));
        CHECK(s.contains(a));
        CHECK(s.contains(b));
    }
}

TEST_CASE("preimage of a subspace") {
    for (int t = 0; t < 20; ++t) {
        Matrix m = random_matrix(4, 5);
        Subspace target = random_subspace(4, 2);
        Subspace pre = preimage_subspace(m, target);
        for (const auto& v : pre.basis()) CHECK(target.contains(m.apply(v)));
        // maximality: preimage contains the kernel
        CHECK(pre.contains(kernel(m)));
        CHECK(pre.dim() ==
              kernel(m).dim() + intersection(image(m), target).dim());
    }
    // full target gives the whole domain
    Matrix m = random_matrix(3, 4);
    CHECK(preimage_subspace(m, Subspace::full(3)) == Subspace::full(4));
}

TEST_CASE("perp and nondegeneracy") {
    // Minkowski form diag(-1, 1, 1)
    Matrix g(3, 3);
    g(0, 0) = Rat(-1);
    g(1, 1) = Rat(1);
    g(2, 2) = Rat(1);
    Subspace null_line(3, {{Rat(1), Rat(1), Rat(0)}});
    Subspace space_line(3, {{Rat(0), Rat(1), Rat(0)}});
    CHECK(perp(null_line, g).contains(null_line));
    CHECK(!is_nondegenerate_on(null_line, g));
    CHECK(is_nondegenerate_on(space_line, g));
    CHECK(perp(null_line, g).dim() == 2);
    for (int t = 0; t < 10; ++t) {
        Subspace s = random_subspace(3, 2);
        CHECK(perp(s, g).dim() == 3 - s.dim());
    }
}

TEST_CASE("signature") {
    Matrix g(4, 4);
    g(0, 0) = Rat(-2);
    g(1, 1) = Rat(3);
    g(2, 2) = Rat(5);
    CHECK(signature(g) == std::tuple<int, int, int>{2, 1, 1});
    // hyperbolic plane: off-diagonal ones, signature (1,1)
    Matrix h(2, 2);
    h(0, 1) = Rat(1);
    h(1, 0) = Rat(1);
    CHECK(signature(h) == std::tuple<int, int, int>{1, 1, 0});
    // congruence invariance on a random change of basis
    Matrix p = random_matrix(4, 4);
    while (rank(p) < 4) p = random_matrix(4, 4);
    CHECK(signature(p.transpose() * g * p) == signature(g));
}
