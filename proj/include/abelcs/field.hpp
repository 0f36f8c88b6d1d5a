#pragma once

// Smooth scalar fields on a chart, represented as expression graphs whose
// nodes evaluate on the dual-number tower J0..J3.  Derivative queries in the
// Wirtinger directions come out of nested forward-mode AD, so repeated
// exterior derivatives stay exact at float precision.

#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "abelcs/chart.hpp"
#include "abelcs/dual.hpp"

namespace abelcs {

class FieldNode {
  public:
    virtual ~FieldNode() = default;
    virtual J0 e0(const Point& p) const = 0;
    virtual J1 e1(const Point& p) const = 0;
    virtual J2 e2(const Point& p) const = 0;
    virtual J3 e3(const Point& p) const = 0;
};

using FieldPtr = std::shared_ptr<const FieldNode>;

template <class T>
T feval(const FieldNode& n, const Point& p);

template <>
inline J0 feval<J0>(const FieldNode& n, const Point& p) { return n.e0(p); }
template <>
inline J1 feval<J1>(const FieldNode& n, const Point& p) { return n.e1(p); }
template <>
inline J2 feval<J2>(const FieldNode& n, const Point& p) { return n.e2(p); }
template <>
inline J3 feval<J3>(const FieldNode& n, const Point& p) { return n.e3(p); }

// CRTP helper: Derived supplies `template<class T> T ev(const Point&) const`.
template <class Derived>
class FieldOp : public FieldNode {
  public:
    J0 e0(const Point& p) const override { return self().template ev<J0>(p); }
    J1 e1(const Point& p) const override { return self().template ev<J1>(p); }
    J2 e2(const Point& p) const override { return self().template ev<J2>(p); }
    J3 e3(const Point& p) const override { return self().template ev<J3>(p); }

  private:
    const Derived& self() const { return *static_cast<const Derived*>(this); }
};

namespace detail {

class ConstNode final : public FieldOp<ConstNode> {
  public:
    explicit ConstNode(cplx c) : c_(c) {}
    template <class T>
    T ev(const Point&) const { return scalar_traits<T>::from(c_); }

  private:
    cplx c_;
};

// Coordinate z_i (conjugated == zbar_i), seeded as an AD variable.
class CoordNode final : public FieldOp<CoordNode> {
  public:
    CoordNode(int i, bool conjugated) : var_(conjugated ? i + 3 : i), i_(i), conj_(conjugated) {}
    template <class T>
    T ev(const Point& p) const {
        cplx v = conj_ ? std::conj(p[i_]) : p[i_];
        return seeder<T>::seed(v, var_);
    }

  private:
    int var_, i_;
    bool conj_;
};

template <class F>
class UnaryNode final : public FieldOp<UnaryNode<F>> {
  public:
    UnaryNode(FieldPtr a, F f) : a_(std::move(a)), f_(std::move(f)) {}
    template <class T>
    T ev(const Point& p) const { return f_(feval<T>(*a_, p)); }

  private:
    FieldPtr a_;
    F f_;
};

template <class F>
class BinaryNode final : public FieldOp<BinaryNode<F>> {
  public:
    BinaryNode(FieldPtr a, FieldPtr b, F f) : a_(std::move(a)), b_(std::move(b)), f_(std::move(f)) {}
    template <class T>
    T ev(const Point& p) const { return f_(feval<T>(*a_, p), feval<T>(*b_, p)); }

  private:
    FieldPtr a_, b_;
    F f_;
};

// Wirtinger derivative d/dx_var of the child field.  Each level pulls one
// more dual level from the child; the tower depth caps total nesting at 3.
class DerivNode final : public FieldNode {
  public:
    DerivNode(FieldPtr a, int var) : a_(std::move(a)), var_(var) {}
    J0 e0(const Point& p) const override { return a_->e1(p).d[var_]; }
    J1 e1(const Point& p) const override { return a_->e2(p).d[var_]; }
    J2 e2(const Point& p) const override { return a_->e3(p).d[var_]; }
    J3 e3(const Point&) const override {
        throw std::logic_error("AD tower depth exceeded (4 nested derivatives)");
    }

  private:
    FieldPtr a_;
    int var_;
};

}  // namespace detail

class ScalarField {
  public:
    ScalarField() : node_(std::make_shared<detail::ConstNode>(cplx{})) {}
    /* implicit */ ScalarField(cplx c) : node_(std::make_shared<detail::ConstNode>(c)) {}
    /* implicit */ ScalarField(double c) : node_(std::make_shared<detail::ConstNode>(cplx(c, 0))) {}
    explicit ScalarField(FieldPtr n) : node_(std::move(n)) {}

    cplx operator()(const Point& p) const { return node_->e0(p); }
    J1 jet1(const Point& p) const { return node_->e1(p); }
    J2 jet2(const Point& p) const { return node_->e2(p); }

    cplx deriv_at(const Point& p, int var) const { return node_->e1(p).d[static_cast<size_t>(var)]; }

    const FieldPtr& node() const { return node_; }

  private:
    FieldPtr node_;
};

// ---- factories -----------------------------------------------------------

inline ScalarField coord(int i) {
    return ScalarField(std::make_shared<detail::CoordNode>(i, false));
}
inline ScalarField coord_conj(int i) {
    return ScalarField(std::make_shared<detail::CoordNode>(i, true));
}

template <class F>
ScalarField lift_unary(const ScalarField& a, F f) {
    return ScalarField(std::make_shared<detail::UnaryNode<F>>(a.node(), std::move(f)));
}

template <class F>
ScalarField lift_binary(const ScalarField& a, const ScalarField& b, F f) {
    return ScalarField(std::make_shared<detail::BinaryNode<F>>(a.node(), b.node(), std::move(f)));
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return lift_binary(a, b, [](const auto& x, const auto& y) { return x + y; });
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return lift_binary(a, b, [](const auto& x, const auto& y) { return x - y; });
}
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return lift_binary(a, b, [](const auto& x, const auto& y) { return x * y; });
}
inline ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    return lift_binary(a, b, [](const auto& x, const auto& y) { return x / y; });
}
inline ScalarField operator-(const ScalarField& a) {
    return lift_unary(a, [](const auto& x) { return -x; });
}

inline ScalarField fexp(const ScalarField& a) {
    return lift_unary(a, [](const auto& x) { using std::exp; return exp(x); });
}
inline ScalarField flog(const ScalarField& a) {
    return lift_unary(a, [](const auto& x) { using std::log; return log(x); });
}
inline ScalarField fsqrt(const ScalarField& a) {
    return lift_unary(a, [](const auto& x) { using std::sqrt; return sqrt(x); });
}
inline ScalarField fsin(const ScalarField& a) {
    return lift_unary(a, [](const auto& x) { using std::sin; return sin(x); });
}
inline ScalarField fcos(const ScalarField& a) {
    return lift_unary(a, [](const auto& x) { using std::cos; return cos(x); });
}
inline ScalarField fconj(const ScalarField& a) {
    return lift_unary(a, [](const auto& x) { return wconj(x); });
}
inline ScalarField freal(const ScalarField& a) { return (a + fconj(a)) * ScalarField(cplx(0.5)); }
inline ScalarField fimag(const ScalarField& a) {
    return (a - fconj(a)) * ScalarField(cplx(0, -0.5));
}

inline ScalarField deriv(const ScalarField& a, int var) {
    return ScalarField(std::make_shared<detail::DerivNode>(a.node(), var));
}

}  // namespace abelcs
