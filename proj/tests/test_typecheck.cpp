#include <catch2/catch_amalgamated.hpp>

#include "pslola/typecheck.hpp"

using namespace pslola;

TEST_CASE("types of outputs are inferred") {
    Spec spec = parse_and_check(
        "input x : int\n"
        "input f : float\n"
        "input b : bool\n"
        "output i := x + 1\n"
        "output g := f * 2\n"
        "output c := x <= 3 && b\n");
    REQUIRE(spec.stream_type("i") == Type::Int);
    REQUIRE(spec.stream_type("g") == Type::Float);
    REQUIRE(spec.stream_type("c") == Type::Bool);
}

TEST_CASE("self-referential counters infer through their defaults") {
    Spec spec = parse_and_check(
        "input read : bool\n"
        "output count := ite(read, count[-1, 0] + 1, count[-1, 0])\n");
    REQUIRE(spec.stream_type("count") == Type::Int);
}

TEST_CASE("mutually recursive outputs infer as a group") {
    Spec spec = parse_and_check(
        "input a : uint\n"
        "output b1 := b2[1, 0] + ite(b2[-1, 7] <= a[1, 0], b2[-2, 0], 6)\n"
        "output b2 := b1[-1, 8]\n");
    REQUIRE(spec.stream_type("b1") == Type::Int);
    REQUIRE(spec.stream_type("b2") == Type::Int);
}

TEST_CASE("unresolvable output types ask for an annotation") {
    try {
        parse_and_check("input x : int\noutput loop := loop[-1, 0]\n");
        SUCCEED("default literal resolves the type");
    } catch (const TypeError&) {
        FAIL("default literal should resolve the type");
    }
    try {
        parse_and_check("input x : int\noutput a := b\noutput b := a\n");
        FAIL("expected a type error");
    } catch (const TypeError& e) {
        REQUIRE(std::string(e.what()).find("annotation") != std::string::npos);
    }
}

TEST_CASE("declared output types reconcile with inferred ones") {
    Spec spec = parse_and_check("input x : int\noutput f : float := x + 1\n");
    REQUIRE(spec.stream_type("f") == Type::Float);
    REQUIRE_THROWS_AS(parse_and_check("input x : int\noutput b : bool := x + 1\n"), TypeError);
}

TEST_CASE("logical operators require booleans") {
    REQUIRE_THROWS_AS(parse_and_check("input x : int\noutput y := x && x > 0\n"), TypeError);
    REQUIRE_THROWS_AS(parse_and_check("input x : int\noutput y := !x\n"), TypeError);
}

TEST_CASE("comparisons require matching kinds") {
    REQUIRE_NOTHROW(parse_and_check("input x : int\ninput f : float\noutput y := x > 0 == (f > 0)\n"));
    REQUIRE_THROWS_AS(parse_and_check("input x : int\noutput y := x == (x > 0)\n"), TypeError);
}

TEST_CASE("integer and float streams do not mix silently") {
    REQUIRE_THROWS_AS(parse_and_check("input x : int\ninput f : float\noutput y := x + f\n"),
                      TypeError);
    // Literals promote to either side.
    REQUIRE_NOTHROW(parse_and_check("input f : float\noutput y := f + 1\n"));
    REQUIRE_NOTHROW(parse_and_check("input x : int\noutput y := x + 1\n"));
}

TEST_CASE("modulo is integer-only and sqrt produces floats") {
    REQUIRE_THROWS_AS(parse_and_check("input f : float\noutput y := f % 2\n"), TypeError);
    Spec spec = parse_and_check("input x : int\noutput r := sqrt(pow(x, 2))\n");
    REQUIRE(spec.stream_type("r") == Type::Float);
}

TEST_CASE("reference defaults must match the stream type") {
    REQUIRE_THROWS_AS(parse_and_check("input b : bool\noutput y := b[-1, 3]\n"), TypeError);
    REQUIRE_THROWS_AS(parse_and_check("input x : int\noutput y := x[-1, true]\n"), TypeError);
    // Integer literals are fine as float-stream defaults.
    REQUIRE_NOTHROW(parse_and_check("input f : float\noutput y := f[-1, 1000] + 0.5\n"));
}

TEST_CASE("ite conditions must be boolean and branches must join") {
    REQUIRE_THROWS_AS(parse_and_check("input x : int\noutput y := ite(x, 1, 2)\n"), TypeError);
    REQUIRE_THROWS_AS(
        parse_and_check("input x : int\ninput b : bool\noutput y := ite(b, x, b)\n"), TypeError);
}

TEST_CASE("references to unknown streams are reported") {
    REQUIRE_THROWS_AS(parse_and_check("input x : int\noutput y := z + 1\n"), TypeError);
}
