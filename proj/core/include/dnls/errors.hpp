#pragma once

#include <stdexcept>

namespace dnls {

// A parameter lies outside its documented domain. The CLI maps this to exit code 2.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical procedure failed (bracketing, quadrature, linear solve).
// The CLI maps this to exit code 1.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dnls
