#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <killrange/harness.hpp>

using namespace killrange;

namespace {

Matrix diagQ(std::vector<long> d) {
    Matrix q(int(d.size()), int(d.size()));
    for (size_t i = 0; i < d.size(); ++i) q(int(i), int(i)) = Rat(d[i]);
    return q;
}

void check_all_pass(const SuiteReport& rep) {
    REQUIRE(rep.checks.size() == 11);
    for (const auto& [name, res] : rep.checks) {
        INFO(name, ": ", res.details);
        CHECK(res.pass);
    }
    CHECK(rep.pass());
}

}  // namespace

TEST_CASE("random fields are reproducible") {
    Chart ch = build_chart(SpaceSpec::flat(1, 1));
    TestField a = random_field(ch, {Slot::Down, Slot::Down}, 2, 42);
    TestField b = random_field(ch, {Slot::Down, Slot::Down}, 2, 42);
    CHECK(a.components == b.components);
    CHECK_FALSE(a.components.is_zero());

    TestField c = random_field(ch, {Slot::Down, Slot::Down}, 2, 43);
    CHECK(a.components != c.components);

    // zero-seed sentinel and constant fields
    CHECK(random_field(ch, {Slot::Down}, 2, 0).components.is_zero());
    TestField k = random_field(ch, {Slot::Down}, 0, 7);
    for (int i = 0; i < 2; ++i) CHECK(k.components.at({i}).is_constant());

    CHECK_THROWS(random_field(ch, {Slot::Down}, 4, 1));
    CHECK(random_field(ch, {Slot::Down}, 4, 1, 5).components.order() == 1);
}

TEST_CASE("suite passes on the acceptance spaces") {
    std::vector<unsigned long> seeds{1, 2, 3};

    SuiteReport cw =
        run_suite(SpaceSpec::cahen_wallach(diagQ({1, 2})), seeds);
    check_all_pass(cw);

    SuiteReport fl = run_suite(SpaceSpec::flat(1, 2), seeds);
    check_all_pass(fl);

    SuiteReport s2 = run_suite(SpaceSpec::sphere(2), seeds);
    check_all_pass(s2);

    // expected-failure entries assert a nonzero residual
    CHECK_FALSE(s2.checks.at("10_toy_connection").residual_norm_zero);
    CHECK_FALSE(s2.checks.at("11_sphere_range_delta").residual_norm_zero);

    // report serialization
    nlohmann::json j = s2.to_json();
    CHECK(j["pass"] == true);
    CHECK(j["checks"].size() == 11);
    CHECK(j["checks"]["01_curvature_identity"]["pass"] == true);
}

TEST_CASE("report fails iff a check fails") {
    SuiteReport rep;
    rep.checks["a"] = {true, true, "ok"};
    rep.checks["b"] = {true, false, "expected failure"};
    CHECK(rep.pass());
    rep.checks["c"] = {false, false, "bad"};
    CHECK_FALSE(rep.pass());
    CHECK(rep.to_json()["pass"] == false);
}
