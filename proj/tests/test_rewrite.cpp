#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "../tests/helpers.hpp"
#include "pslola/rewrite.hpp"

using namespace pslola;
using Catch::Matchers::ContainsSubstring;

namespace {

// Spec with one equation reading both inputs at the same position.
Spec sum_spec() {
    return parse_and_check(
        "input x : int\n"
        "input y : int\n"
        "output s := x + y\n");
}

DistributedStream pair_at(int sigma, std::int64_t xv, std::int64_t yv, int n) {
    DistributedStream ds;
    ds.n = n;
    ds.events["x"] = {{sigma, Value{xv}}};
    ds.events["y"] = {{sigma, Value{yv}}};
    return ds;
}

}  // namespace

TEST_CASE("symbolic equations fold unobservable references to constants") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);

    // At position 0 both offset -1 references fall off the trace and fold.
    REQUIRE(to_string(*make_symbolic(spec, ds, "c", 0)) == "ite(0 <= b(1), a(1), 0)");
    // At position 6 the +1 references fall off the other end.
    REQUIRE(to_string(*make_symbolic(spec, ds, "c", 6)) == "ite(a(5) <= 0, 0, b(5))");
}

TEST_CASE("positions with no scheduled event fold to the boundary value") {
    Spec spec = sum_spec();
    DistributedStream ds = pair_at(2, 5, 7, 4);
    // x and y only carry events at position 2; elsewhere the equation is
    // ground immediately because the event schedule is shared knowledge.
    REQUIRE(to_string(*make_symbolic(spec, ds, "s", 0)) == "0 + 0");
    REQUIRE(to_string(*make_symbolic(spec, ds, "s", 2)) == "x(2) + y(2)");
}

TEST_CASE("output references stay symbolic even without events") {
    Spec spec = testing::load_spec_asset("counters.lola");
    auto ds = testing::load_trace_asset("counters.csv", spec);
    // No read event at position 1, so the pulse is ground false and the
    // equation reduces to the previous count.
    auto e = rewrite_equation(spec, ds, "countRead", 1, {});
    REQUIRE_FALSE(e.resolved);
    REQUIRE(to_string(*e.rewritten) == "countRead(0)");
    auto refs = collect_sym_refs(e.rewritten);
    REQUIRE(refs.size() == 1);
    REQUIRE(refs[0].is_output);
    REQUIRE(refs[0].stream == "countRead");
    REQUIRE(refs[0].pos == 0);
}

TEST_CASE("ground equations resolve during rewriting") {
    Spec spec = testing::load_spec_asset("counters.lola");
    auto ds = testing::load_trace_asset("counters.csv", spec);
    auto e = rewrite_equation(spec, ds, "countRead", 0, {});
    REQUIRE(e.resolved);
    REQUIRE(e.values == testing::ints({0}));

    Bindings known;
    known[SymKey{true, "countRead", 0}] = Value{std::int64_t{0}};
    auto e1 = rewrite_equation(spec, ds, "countRead", 1, known);
    REQUIRE(e1.resolved);
    REQUIRE(e1.values == testing::ints({0}));
}

TEST_CASE("simplification folds ground subtrees and ground conditionals only") {
    auto ref = make_sym(SymExpr{SymRef{"x", 3, Value{std::int64_t{0}}, false}});
    auto add = make_sym(SymExpr{SymBinary{BinOp::Add, sym_const(Value{std::int64_t{1}}),
                                          sym_const(Value{std::int64_t{2}})}});
    auto mixed = make_sym(SymExpr{SymBinary{BinOp::Le, add, ref}});
    REQUIRE(to_string(*simplify(mixed)) == "3 <= x(3)");

    // Boolean connectives do not short-circuit on one ground side.
    auto gated = make_sym(SymExpr{SymBinary{
        BinOp::And, sym_const(Value{false}),
        make_sym(SymExpr{SymRef{"p", 1, Value{false}, false}})}});
    REQUIRE(to_string(*simplify(gated)) == "false && p(1)");

    auto picked = make_sym(SymExpr{SymIte{sym_const(Value{true}), ref, add}});
    REQUIRE(to_string(*simplify(picked)) == "x(3)");
    auto held = make_sym(SymExpr{
        SymIte{make_sym(SymExpr{SymRef{"p", 1, Value{false}, false}}), ref, add}});
    REQUIRE(to_string(*simplify(held)) == "ite(p(1), x(3), 3)");
}

TEST_CASE("simplification is idempotent") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);
    for (int j = 0; j <= ds.n; ++j) {
        SymPtr once = simplify(make_symbolic(spec, ds, "c", j));
        SymPtr twice = simplify(once);
        REQUIRE(to_string(*twice) == to_string(*once));
    }
}

TEST_CASE("substitution binds references and reuses untouched subtrees") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);
    SymPtr orig = make_symbolic(spec, ds, "c", 0);  // ite(0 <= b(1), a(1), 0)

    REQUIRE(substitute(orig, {}).get() == orig.get());

    Bindings b;
    b[SymKey{false, "b", 1}] = Value{std::int64_t{3}};
    SymPtr step = simplify(substitute(orig, b));
    REQUIRE(to_string(*step) == "a(1)");

    b[SymKey{false, "a", 1}] = Value{std::int64_t{1}};
    SymPtr done = simplify(substitute(orig, b));
    REQUIRE(as_const(*done).has_value());
    REQUIRE(*as_const(*done) == Value{std::int64_t{1}});
}

TEST_CASE("bindings are recovered by aligning a rewrite against its source") {
    Spec spec = sum_spec();
    DistributedStream ds = pair_at(2, 5, 7, 4);
    SymPtr orig = make_symbolic(spec, ds, "s", 2);  // x(2) + y(2)

    Bindings partial;
    partial[SymKey{false, "x", 2}] = Value{std::int64_t{5}};
    SymPtr rewritten = simplify(substitute(orig, partial));
    REQUIRE(to_string(*rewritten) == "5 + y(2)");

    Bindings got;
    extract_bindings(orig, rewritten, got);
    REQUIRE(got.size() == 1);
    REQUIRE(got.at(SymKey{false, "x", 2}) == Value{std::int64_t{5}});
}

TEST_CASE("binding recovery stops at a reshaped root") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);
    SymPtr orig = make_symbolic(spec, ds, "c", 0);
    Bindings b;
    b[SymKey{false, "b", 1}] = Value{std::int64_t{3}};
    SymPtr collapsed = simplify(substitute(orig, b));  // a(1): no longer an ite

    Bindings got;
    extract_bindings(orig, collapsed, got);
    REQUIRE(got.empty());
}

TEST_CASE("observation classes count only the input references") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);
    // c(1) references exactly the input events a@2 and b@2.

    View none;
    REQUIRE(classify(spec, ds, "c", 1, none) == Observation::Unobserved);
    View half;
    half.reads[{"a", 2}] = Value{std::int64_t{7}};
    REQUIRE(classify(spec, ds, "c", 1, half) == Observation::PartiallyObserved);
    View full = half;
    full.reads[{"b", 2}] = Value{std::int64_t{5}};
    REQUIRE(classify(spec, ds, "c", 1, full) == Observation::Observed);

    // A key with no input references at all counts as observed.
    Spec counters = testing::load_spec_asset("counters.lola");
    auto cds = testing::load_trace_asset("counters.csv", counters);
    REQUIRE(classify(counters, cds, "countRead", 1, none) == Observation::Observed);
    REQUIRE(to_string(Observation::PartiallyObserved) == std::string("partially-observed"));
}

TEST_CASE("values survive the wire encoding") {
    for (const Value& v : {Value{std::int64_t{-42}}, Value{std::int64_t{0}}, Value{true},
                           Value{false}, Value{2.5}, Value{-0.125}, Value{3.0}}) {
        REQUIRE(decode_value(encode_value(v)) == v);
    }
    REQUIRE(std::isnan(std::get<double>(decode_value("fnan"))));
    REQUIRE(std::get<double>(decode_value("finf")) ==
            std::numeric_limits<double>::infinity());
    REQUIRE(std::get<double>(decode_value("f-inf")) ==
            -std::numeric_limits<double>::infinity());
    REQUIRE_THROWS_AS(decode_value(""), TraceError);
    REQUIRE_THROWS_AS(decode_value("x1"), TraceError);
}

TEST_CASE("expressions survive the wire encoding") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);
    std::vector<SymPtr> samples;
    for (int j = 0; j <= ds.n; ++j) samples.push_back(make_symbolic(spec, ds, "c", j));
    samples.push_back(make_sym(SymExpr{SymCall{Builtin::Sqrt, {sym_const(Value{2.0})}}}));
    samples.push_back(make_sym(
        SymExpr{SymUnary{UnOp::Neg, make_sym(SymExpr{SymRef{"x", 2, Value{std::int64_t{1}},
                                                            false}})}}));
    samples.push_back(make_sym(SymExpr{SymUnary{UnOp::Not, sym_const(Value{false})}}));
    for (const auto& e : samples) {
        std::string wire;
        encode_sym(wire, *e);
        SymPtr back = detail::SexpParser(wire).parse();
        REQUIRE(to_string(*back) == to_string(*e));
    }
}

TEST_CASE("link-state messages survive the wire encoding") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);

    LsMessage msg;
    msg.monitor = 2;
    msg.round = 3;
    LsEntry resolved;
    resolved.resolved = true;
    resolved.values = testing::ints({1, 4});
    msg.entries[LsKey{"c", 0}] = resolved;
    msg.entries[LsKey{"c", 3}] = rewrite_equation(spec, ds, "c", 3, {});
    REQUIRE_FALSE(msg.entries[LsKey{"c", 3}].resolved);

    LsMessage back = decode_ls(encode_ls(msg));
    REQUIRE(back.monitor == 2);
    REQUIRE(back.round == 3);
    REQUIRE(to_string(back.entries) == to_string(msg.entries));
    REQUIRE(to_string(*back.entries[LsKey{"c", 3}].original) ==
            to_string(*msg.entries[LsKey{"c", 3}].original));
}

TEST_CASE("merging prefers resolved entries and unions their sets") {
    Spec spec = sum_spec();
    DistributedStream ds = pair_at(2, 5, 7, 4);
    LsKey key{"s", 2};

    LsMap pending_src;
    pending_src[key] = rewrite_equation(spec, ds, "s", 2, {});
    LsMap resolved_src;
    resolved_src[key] = resolved_entry(spec, "s", Value{std::int64_t{12}});
    LsMap other_resolved;
    other_resolved[key] = resolved_entry(spec, "s", Value{std::int64_t{13}});

    auto merged = merge_lc(spec, {&pending_src, &resolved_src}, View{});
    REQUIRE(merged.at(key).resolved);
    REQUIRE(merged.at(key).values == testing::ints({12}));

    auto unioned = merge_lc(spec, {&resolved_src, &other_resolved}, View{});
    REQUIRE(unioned.at(key).values == testing::ints({12, 13}));
}

TEST_CASE("pending entries pool their bindings until the key grounds") {
    Spec spec = sum_spec();
    DistributedStream ds = pair_at(2, 5, 7, 4);
    LsKey key{"s", 2};

    Bindings knows_x;
    knows_x[SymKey{false, "x", 2}] = Value{std::int64_t{5}};
    Bindings knows_y;
    knows_y[SymKey{false, "y", 2}] = Value{std::int64_t{7}};

    LsMap a, b;
    a[key] = rewrite_equation(spec, ds, "s", 2, knows_x);  // 5 + y(2)
    b[key] = rewrite_equation(spec, ds, "s", 2, knows_y);  // x(2) + 7
    REQUIRE_FALSE(a[key].resolved);
    REQUIRE_FALSE(b[key].resolved);

    auto merged = merge_lc(spec, {&a, &b}, View{});
    REQUIRE(merged.at(key).resolved);
    REQUIRE(merged.at(key).values == testing::ints({12}));
}

TEST_CASE("the receiver's own view grounds foreign pendings") {
    Spec spec = sum_spec();
    DistributedStream ds = pair_at(2, 5, 7, 4);
    LsKey key{"s", 2};
    LsMap a;
    a[key] = rewrite_equation(spec, ds, "s", 2, {});

    View own;
    own.reads[{"x", 2}] = Value{std::int64_t{5}};
    own.reads[{"y", 2}] = Value{std::int64_t{7}};
    auto merged = merge_lc(spec, {&a}, own);
    REQUIRE(merged.at(key).resolved);
    REQUIRE(merged.at(key).values == testing::ints({12}));
}

TEST_CASE("resolved output positions feed later equations during a merge") {
    Spec spec = testing::load_spec_asset("counters.lola");
    auto ds = testing::load_trace_asset("counters.csv", spec);

    LsMap src;
    src[LsKey{"countRead", 0}] = resolved_entry(spec, "countRead", Value{std::int64_t{0}});
    src[LsKey{"countRead", 1}] = rewrite_equation(spec, ds, "countRead", 1, {});
    REQUIRE_FALSE(src[LsKey{"countRead", 1}].resolved);

    auto merged = merge_lc(spec, {&src}, View{});
    REQUIRE(merged.at(LsKey{"countRead", 1}).resolved);
    REQUIRE(merged.at(LsKey{"countRead", 1}).values == testing::ints({0}));
}

TEST_CASE("a surviving pending key keeps the candidate with the fewest references") {
    Spec spec = parse_and_check(
        "input x : int\n"
        "input y : int\n"
        "output c := ite(x <= 3, y, 7)\n");
    DistributedStream ds = pair_at(1, 2, 9, 1);
    LsKey key{"c", 1};

    Bindings knows_x;
    knows_x[SymKey{false, "x", 1}] = Value{std::int64_t{2}};
    LsMap a, b;
    a[key] = rewrite_equation(spec, ds, "c", 1, knows_x);  // collapses to y(1)
    b[key] = rewrite_equation(spec, ds, "c", 1, {});       // full ite, two refs
    REQUIRE(to_string(*a[key].rewritten) == "y(1)");

    // The collapse reshaped the root, so nothing can be extracted from it;
    // the merged entry stays pending on the shorter candidate.
    auto merged = merge_lc(spec, {&b, &a}, View{});
    REQUIRE_FALSE(merged.at(key).resolved);
    REQUIRE(to_string(*merged.at(key).rewritten) == "y(1)");
}

TEST_CASE("merging is idempotent and order-insensitive") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);
    auto views = load_views_csv(testing::slurp(testing::asset_path("views/select_views.csv")),
                                ds, 2);

    LsMap m1, m2;
    for (int j = 0; j <= 3; ++j) {
        m1[LsKey{"c", j}] = rewrite_equation(spec, ds, "c", j, view_bindings(views[0]));
        m2[LsKey{"c", j}] = rewrite_equation(spec, ds, "c", j, view_bindings(views[1]));
    }
    auto ab = merge_lc(spec, {&m1, &m2}, views[0]);
    auto ba = merge_lc(spec, {&m2, &m1}, views[0]);
    REQUIRE(to_string(ab) == to_string(ba));
    auto again = merge_lc(spec, {&ab}, views[0]);
    REQUIRE(to_string(again) == to_string(ab));
    // Under the two full views every key grounds: the second monitor's
    // rewrites donate a(2) and the first monitor's donate b(2) via the
    // shared originals.
    REQUIRE(to_string(ab) == "{c(0) = 1, c(1) = 7, c(2) = 5, c(3) = 5}");
}

TEST_CASE("terminal discharge grounds every leftover reference") {
    Spec spec = parse_and_check(
        "input x : int\n"
        "input y : int\n"
        "output s := x[1, 3] + y[1, 4]\n");
    DistributedStream ds = pair_at(2, 5, 7, 2);
    LsMap lc;
    lc[LsKey{"s", 1}] = rewrite_equation(spec, ds, "s", 1, {});
    REQUIRE_FALSE(lc[LsKey{"s", 1}].resolved);

    int discharged = discharge_terminal(spec, lc);
    REQUIRE(discharged == 2);
    REQUIRE(lc.at(LsKey{"s", 1}).resolved);
    REQUIRE(lc.at(LsKey{"s", 1}).values == testing::ints({7}));

    // Already-resolved entries are untouched and count nothing.
    REQUIRE(discharge_terminal(spec, lc) == 0);
}

TEST_CASE("discharged output references fall back to the stream type default") {
    Spec spec = testing::load_spec_asset("counters.lola");
    auto ds = testing::load_trace_asset("counters.csv", spec);
    LsMap lc;
    lc[LsKey{"countRead", 1}] = rewrite_equation(spec, ds, "countRead", 1, {});
    REQUIRE(discharge_terminal(spec, lc) == 1);
    REQUIRE(lc.at(LsKey{"countRead", 1}).values == testing::ints({0}));
}

TEST_CASE("pending maps print in the equation style") {
    Spec spec = testing::load_spec_asset("select.lola");
    auto ds = testing::load_trace_asset("select.csv", spec);
    LsMap lc;
    lc[LsKey{"c", 0}] = rewrite_equation(spec, ds, "c", 0, {});
    lc[LsKey{"c", 2}] = resolved_entry(spec, "c", Value{std::int64_t{5}});
    REQUIRE(to_string(lc) == "{c(0) = ite(0 <= b(1), a(1), 0), c(2) = 5}");

    LsEntry multi;
    multi.resolved = true;
    multi.values = testing::ints({1, 4});
    REQUIRE(to_string(multi) == "{1, 4}");
}
