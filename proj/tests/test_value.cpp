#include <catch2/catch_amalgamated.hpp>

#include "pslola/value.hpp"

using namespace pslola;

TEST_CASE("value printing is canonical") {
    REQUIRE(to_string(Value{std::int64_t{42}}) == "42");
    REQUIRE(to_string(Value{std::int64_t{-7}}) == "-7");
    REQUIRE(to_string(Value{true}) == "true");
    REQUIRE(to_string(Value{false}) == "false");
    REQUIRE(to_string(Value{2.5}) == "2.5");
    REQUIRE(to_string(Value{-0.125}) == "-0.125");
    // Shortest round-trip form, not fixed precision.
    REQUIRE(to_string(Value{0.1}) == "0.1");
    REQUIRE(to_string(Value{3.0}) == "3");
}

TEST_CASE("float printing round-trips through parse") {
    for (double d : {0.1, 1.0 / 3.0, 87620.0, 1e-9, 123456.789, -2.5e17}) {
        REQUIRE(std::stod(to_string(Value{d})) == d);
    }
}

TEST_CASE("type_of and default_value") {
    REQUIRE(type_of(Value{std::int64_t{1}}) == Type::Int);
    REQUIRE(type_of(Value{1.0}) == Type::Float);
    REQUIRE(type_of(Value{true}) == Type::Bool);
    REQUIRE(default_value(Type::Int) == Value{std::int64_t{0}});
    REQUIRE(default_value(Type::Float) == Value{0.0});
    REQUIRE(default_value(Type::Bool) == Value{false});
}

TEST_CASE("approx_equal separates types and tolerates float noise") {
    REQUIRE(approx_equal(Value{std::int64_t{3}}, Value{std::int64_t{3}}));
    REQUIRE_FALSE(approx_equal(Value{std::int64_t{3}}, Value{3.0}));
    REQUIRE(approx_equal(Value{1.0}, Value{1.0 + 1e-12}));
    REQUIRE_FALSE(approx_equal(Value{1.0}, Value{1.001}));
    REQUIRE_FALSE(approx_equal(Value{true}, Value{false}));
}

TEST_CASE("value sets order deterministically and print sorted") {
    ValueSet s;
    s.insert(Value{std::int64_t{5}});
    s.insert(Value{std::int64_t{-1}});
    s.insert(Value{std::int64_t{3}});
    REQUIRE(to_string(s) == "{-1, 3, 5}");
    ValueSet mixed;
    mixed.insert(Value{true});
    mixed.insert(Value{false});
    REQUIRE(to_string(mixed) == "{false, true}");
}

TEST_CASE("set containment and equality") {
    ValueSet a;
    a.insert(Value{std::int64_t{1}});
    a.insert(Value{std::int64_t{2}});
    ValueSet b = a;
    b.insert(Value{std::int64_t{3}});
    REQUIRE(is_subset(a, b));
    REQUIRE_FALSE(is_subset(b, a));
    REQUIRE(set_equal(a, a));
    REQUIRE_FALSE(set_equal(a, b));
}

TEST_CASE("float membership falls back to approximate comparison") {
    ValueSet target;
    target.insert(Value{0.1 + 0.2});
    ValueSet probe;
    probe.insert(Value{0.3});
    REQUIRE(is_subset(probe, target));
}
