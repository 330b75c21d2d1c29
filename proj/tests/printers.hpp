#pragma once

// Readable doctest failure messages for the algebra types.

#include "doctest.h"
#include "rd/miura.hpp"

namespace doctest {

template <>
struct StringMaker<rd::DiffPoly> {
    static String convert(const rd::DiffPoly& p) { return p.to_string().c_str(); }
};
template <>
struct StringMaker<rd::LocalFunctional> {
    static String convert(const rd::LocalFunctional& f) { return f.to_string().c_str(); }
};
template <>
struct StringMaker<rd::DiffOperator> {
    static String convert(const rd::DiffOperator& k) { return k.to_string().c_str(); }
};
template <>
struct StringMaker<rd::MiuraTransformation> {
    static String convert(const rd::MiuraTransformation& m) { return m.to_string().c_str(); }
};
template <>
struct StringMaker<rd::ParamExpr> {
    static String convert(const rd::ParamExpr& e) { return e.to_string().c_str(); }
};

} // namespace doctest
