#pragma once

// Symbolic expressions over observed conditional-probability factors:
// products, sums over variables, quotients, and the constant 1. Expressions
// are immutable trees, fully canonicalized at construction against a fixed
// topological order, so rendering is deterministic and injective.

#include <map>
#include <memory>
#include <stdexcept>
#include <variant>

#include "varset.hpp"

namespace vermakit {

// A topological order over the observed variables, with position lookup.
class Order {
  public:
    Order() = default;
    explicit Order(std::vector<NodeId> seq) : seq_(std::move(seq)) {
        for (std::size_t i = 0; i < seq_.size(); ++i) pos_[seq_[i]] = static_cast<int>(i);
    }
    const std::vector<NodeId>& seq() const { return seq_; }
    int pos(const NodeId& n) const {
        auto it = pos_.find(n);
        if (it == pos_.end()) throw std::invalid_argument("node '" + n.name + "' not in order");
        return it->second;
    }
    bool operator==(const Order& o) const { return seq_ == o.seq_; }

  private:
    std::vector<NodeId> seq_;
    std::map<NodeId, int> pos_;
};

struct QNode;

class QExpr {
  public:
    enum class Kind { one, factor, product, sum, quotient };

    QExpr();  // the constant 1

    Kind kind() const;
    // factor
    const NodeId& child() const;
    const std::vector<NodeId>& given() const;
    // product
    const std::vector<QExpr>& terms() const;
    // sum
    const std::vector<NodeId>& bound() const;
    const QExpr& body() const;
    // quotient
    const QExpr& num() const;
    const QExpr& den() const;

    bool operator==(const QExpr& o) const;

    static QExpr make(std::shared_ptr<const QNode> p) {
        QExpr e;
        e.p_ = std::move(p);
        return e;
    }
    const QNode& node() const { return *p_; }

  private:
    std::shared_ptr<const QNode> p_;
};

struct OneT {};
struct FactorT {
    NodeId child;
    std::vector<NodeId> given;  // sorted descending by the construction order
};
struct ProductT {
    std::vector<QExpr> terms;  // >= 2, flattened, sorted, no constant 1
};
struct SumT {
    std::vector<NodeId> bound;  // non-empty, ascending by order, all free in body
    QExpr body;
};
struct QuotientT {
    QExpr num, den;
};

struct QNode {
    std::variant<OneT, FactorT, ProductT, SumT, QuotientT> v;
};

inline QExpr::QExpr() : p_(std::make_shared<const QNode>(QNode{OneT{}})) {}

inline QExpr::Kind QExpr::kind() const {
    switch (p_->v.index()) {
        case 0: return Kind::one;
        case 1: return Kind::factor;
        case 2: return Kind::product;
        case 3: return Kind::sum;
        default: return Kind::quotient;
    }
}
inline const NodeId& QExpr::child() const { return std::get<FactorT>(p_->v).child; }
inline const std::vector<NodeId>& QExpr::given() const { return std::get<FactorT>(p_->v).given; }
inline const std::vector<QExpr>& QExpr::terms() const { return std::get<ProductT>(p_->v).terms; }
inline const std::vector<NodeId>& QExpr::bound() const { return std::get<SumT>(p_->v).bound; }
inline const QExpr& QExpr::body() const { return std::get<SumT>(p_->v).body; }
inline const QExpr& QExpr::num() const { return std::get<QuotientT>(p_->v).num; }
inline const QExpr& QExpr::den() const { return std::get<QuotientT>(p_->v).den; }

// Observed variables appearing free in e.
inline VarSet free_args(const QExpr& e) {
    switch (e.kind()) {
        case QExpr::Kind::one:
            return {};
        case QExpr::Kind::factor: {
            VarSet r{e.child()};
            r.insert(e.given().begin(), e.given().end());
            return r;
        }
        case QExpr::Kind::product: {
            VarSet r;
            for (const QExpr& t : e.terms()) r = r | free_args(t);
            return r;
        }
        case QExpr::Kind::sum:
            return free_args(e.body()) - to_varset(e.bound());
        case QExpr::Kind::quotient:
            return free_args(e.num()) | free_args(e.den());
    }
    return {};
}

// Canonical text form: P(d|c,b,a) * P(b|a), Σ_{b}[ ... ], ( ... ) / ( ... ).
inline std::string render(const QExpr& e) {
    switch (e.kind()) {
        case QExpr::Kind::one:
            return "1";
        case QExpr::Kind::factor: {
            std::string s = "P(" + value_name(e.child());
            if (!e.given().empty()) {
                s += "|";
                for (std::size_t i = 0; i < e.given().size(); ++i)
                    s += (i ? "," : "") + value_name(e.given()[i]);
            }
            return s + ")";
        }
        case QExpr::Kind::product: {
            std::string s;
            for (const QExpr& t : e.terms()) {
                if (!s.empty()) s += " * ";
                bool wrap = t.kind() == QExpr::Kind::quotient;
                s += wrap ? "[" + render(t) + "]" : render(t);
            }
            return s;
        }
        case QExpr::Kind::sum: {
            std::string s = "\xCE\xA3_{";
            for (std::size_t i = 0; i < e.bound().size(); ++i)
                s += (i ? "," : "") + value_name(e.bound()[i]);
            return s + "}[ " + render(e.body()) + " ]";
        }
        case QExpr::Kind::quotient:
            return "( " + render(e.num()) + " ) / ( " + render(e.den()) + " )";
    }
    return {};
}

inline bool QExpr::operator==(const QExpr& o) const {
    if (p_ == o.p_) return true;
    return render(*this) == render(o);  // injective on canonical forms
}

namespace detail {

// Position of the latest factor child occurring anywhere in e; products are
// ordered latest-first by this anchor.
inline int anchor(const QExpr& e, const Order& order) {
    switch (e.kind()) {
        case QExpr::Kind::one:
            return -1;
        case QExpr::Kind::factor:
            return order.pos(e.child());
        case QExpr::Kind::product: {
            int m = -1;
            for (const QExpr& t : e.terms()) m = std::max(m, anchor(t, order));
            return m;
        }
        case QExpr::Kind::sum:
            return anchor(e.body(), order);
        case QExpr::Kind::quotient:
            return anchor(e.num(), order);
    }
    return -1;
}

}  // namespace detail

// Factory bound to the topological order in force; every expression built
// through one builder is canonical with respect to that order.
class QBuilder {
  public:
    explicit QBuilder(Order order) : order_(std::move(order)) {}

    const Order& order() const { return order_; }

    QExpr one() const { return QExpr(); }

    QExpr factor(const NodeId& child, const VarSet& given) const {
        FactorT f;
        f.child = child;
        f.given.assign(given.begin(), given.end());
        std::sort(f.given.begin(), f.given.end(), [&](const NodeId& a, const NodeId& b) {
            return order_.pos(a) > order_.pos(b);
        });
        return QExpr::make(std::make_shared<const QNode>(QNode{std::move(f)}));
    }

    QExpr product(std::vector<QExpr> terms) const {
        std::vector<QExpr> flat;
        for (QExpr& t : terms) {
            if (t.kind() == QExpr::Kind::one) continue;
            if (t.kind() == QExpr::Kind::product)
                flat.insert(flat.end(), t.terms().begin(), t.terms().end());
            else
                flat.push_back(std::move(t));
        }
        if (flat.empty()) return one();
        if (flat.size() == 1) return flat[0];
        std::stable_sort(flat.begin(), flat.end(), [&](const QExpr& a, const QExpr& b) {
            int pa = detail::anchor(a, order_), pb = detail::anchor(b, order_);
            if (pa != pb) return pa > pb;
            return render(a) < render(b);
        });
        return QExpr::make(std::make_shared<const QNode>(QNode{ProductT{std::move(flat)}}));
    }

    // Sum of `body` over `over`. Nested sums are flattened, and a factor
    // P(x|...) whose child x is summed and occurs nowhere else in a product
    // body sums to one and is dropped together with x.
    QExpr sum(const VarSet& over, const QExpr& body) const {
        if (over.empty()) return body;
        VarSet vars = over;
        QExpr inner = body;
        while (inner.kind() == QExpr::Kind::sum) {
            vars.insert(inner.bound().begin(), inner.bound().end());
            inner = inner.body();
        }
        VarSet body_free = free_args(inner);
        if (!subset_of(vars, body_free))
            throw std::logic_error("sum over a variable not free in the body");

        std::vector<QExpr> terms;
        if (inner.kind() == QExpr::Kind::product)
            terms = inner.terms();
        else
            terms.push_back(inner);

        bool changed = true;
        while (changed) {
            changed = false;
            for (const NodeId& x : vars) {
                int holder = -1;
                bool elsewhere = false;
                for (std::size_t i = 0; i < terms.size(); ++i) {
                    if (!contains(free_args(terms[i]), x)) continue;
                    bool own = terms[i].kind() == QExpr::Kind::factor && terms[i].child() == x;
                    if (own && holder < 0)
                        holder = static_cast<int>(i);
                    else
                        elsewhere = true;
                }
                if (holder >= 0 && !elsewhere) {
                    terms.erase(terms.begin() + holder);
                    vars.erase(x);
                    changed = true;
                    break;
                }
            }
        }
        QExpr reduced = product(std::move(terms));
        if (vars.empty()) return reduced;
        if (!subset_of(vars, free_args(reduced)))
            throw std::logic_error("sum reduction dropped a bound variable");
        SumT s;
        s.bound.assign(vars.begin(), vars.end());
        std::sort(s.bound.begin(), s.bound.end(), [&](const NodeId& a, const NodeId& b) {
            return order_.pos(a) < order_.pos(b);
        });
        s.body = std::move(reduced);
        return QExpr::make(std::make_shared<const QNode>(QNode{std::move(s)}));
    }

    QExpr quotient(const QExpr& num, const QExpr& den) const {
        if (den.kind() == QExpr::Kind::one) return num;
        return QExpr::make(std::make_shared<const QNode>(QNode{QuotientT{num, den}}));
    }

  private:
    Order order_;
};

}  // namespace vermakit
