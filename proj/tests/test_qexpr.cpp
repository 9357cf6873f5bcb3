#include <doctest.h>

#include <vermakit/qexpr.hpp>

#include "helpers.hpp"

using namespace vermakit;
using testutil::seq;
using testutil::vs;

namespace {

QBuilder builder_abcd() { return QBuilder{Order{seq({"A", "B", "C", "D"})}}; }

}  // namespace

TEST_CASE("factor conditioning lists are ordered latest-first") {
    QBuilder qb = builder_abcd();
    QExpr f = qb.factor(NodeId{"D"}, vs({"A", "B", "C"}));
    CHECK(render(f) == "P(d|c,b,a)");
    CHECK(render(qb.factor(NodeId{"A"}, {})) == "P(a)");
}

TEST_CASE("products flatten, drop ones, and sort by latest child") {
    QBuilder qb = builder_abcd();
    QExpr fb = qb.factor(NodeId{"B"}, vs({"A"}));
    QExpr fd = qb.factor(NodeId{"D"}, vs({"A", "B", "C"}));
    QExpr p = qb.product({fb, fd});
    CHECK(render(p) == "P(d|c,b,a) * P(b|a)");
    CHECK(render(qb.product({qb.one(), p})) == "P(d|c,b,a) * P(b|a)");
    CHECK(render(qb.product({qb.product({fb, fd}), qb.factor(NodeId{"A"}, {})})) ==
          "P(d|c,b,a) * P(b|a) * P(a)");
    CHECK(render(qb.product({})) == "1");
    CHECK(render(qb.product({fb})) == "P(b|a)");
}

TEST_CASE("sums bind ascending, flatten, and cancel lone conditionals") {
    QBuilder qb = builder_abcd();
    QExpr fb = qb.factor(NodeId{"B"}, vs({"A"}));
    QExpr fd = qb.factor(NodeId{"D"}, vs({"A", "B", "C"}));
    QExpr q = qb.product({fb, fd});

    SUBCASE("no cancellation when the bound variable occurs elsewhere") {
        CHECK(render(qb.sum(vs({"B"}), q)) == "\xCE\xA3_{b}[ P(d|c,b,a) * P(b|a) ]");
    }
    SUBCASE("a lone conditional of the bound variable sums away") {
        CHECK(render(qb.sum(vs({"D"}), q)) == "P(b|a)");
        CHECK(render(qb.sum(vs({"B", "D"}), q)) == "1");
        CHECK(render(qb.sum(vs({"B"}), fb)) == "1");
    }
    SUBCASE("nested sums flatten into one binder") {
        QExpr inner = qb.sum(vs({"B"}), q);
        QExpr outer = qb.sum(vs({"C"}), inner);
        CHECK(render(outer) == "\xCE\xA3_{b,c}[ P(d|c,b,a) * P(b|a) ]");
    }
    SUBCASE("summing over an empty set is the identity") { CHECK(qb.sum({}, q) == q); }
    SUBCASE("summing a variable that is not free is a caller bug") {
        CHECK_THROWS_AS(qb.sum(vs({"C"}), fb), std::logic_error);
    }
}

TEST_CASE("quotients keep their shape except division by one") {
    QBuilder qb = builder_abcd();
    QExpr fb = qb.factor(NodeId{"B"}, vs({"A"}));
    QExpr fd = qb.factor(NodeId{"D"}, vs({"A", "B", "C"}));
    CHECK(qb.quotient(fb, qb.one()) == fb);
    CHECK(render(qb.quotient(fd, fb)) == "( P(d|c,b,a) ) / ( P(b|a) )");
}

TEST_CASE("free_args") {
    QBuilder qb = builder_abcd();
    QExpr fb = qb.factor(NodeId{"B"}, vs({"A"}));
    QExpr fd = qb.factor(NodeId{"D"}, vs({"A", "B", "C"}));
    QExpr q = qb.product({fb, fd});
    CHECK(free_args(q) == vs({"A", "B", "C", "D"}));
    CHECK(free_args(qb.sum(vs({"B"}), q)) == vs({"A", "C", "D"}));
    CHECK(free_args(qb.one()) == VarSet{});
    CHECK(free_args(qb.quotient(fd, fb)) == vs({"A", "B", "C", "D"}));
}

TEST_CASE("rendering quotients of sums matches the canonical layout") {
    QBuilder qb{Order{seq({"V1", "V2", "V3", "V4"})}};
    QExpr f1 = qb.factor(NodeId{"V1"}, {});
    QExpr f3 = qb.factor(NodeId{"V3"}, vs({"V1", "V2"}));
    QExpr f4 = qb.factor(NodeId{"V4"}, vs({"V1", "V2", "V3"}));
    QExpr q = qb.product({f1, f3, f4});
    QExpr num = qb.sum(vs({"V1"}), q);
    QExpr den = qb.sum(vs({"V1", "V4"}), q);
    CHECK(render(qb.quotient(num, den)) ==
          "( \xCE\xA3_{v1}[ P(v4|v3,v2,v1) * P(v3|v2,v1) * P(v1) ] ) / "
          "( \xCE\xA3_{v1}[ P(v3|v2,v1) * P(v1) ] )");
}

TEST_CASE("rendering is injective on the expressions we build") {
    QBuilder qb = builder_abcd();
    QExpr fb = qb.factor(NodeId{"B"}, vs({"A"}));
    QExpr fd = qb.factor(NodeId{"D"}, vs({"A", "B", "C"}));
    std::vector<QExpr> exprs{qb.one(),
                             fb,
                             fd,
                             qb.product({fb, fd}),
                             qb.sum(vs({"B"}), qb.product({fb, fd})),
                             qb.quotient(fd, fb),
                             qb.quotient(fb, fd)};
    for (std::size_t i = 0; i < exprs.size(); ++i)
        for (std::size_t j = i + 1; j < exprs.size(); ++j)
            CHECK(render(exprs[i]) != render(exprs[j]));
}
