#include "dnls/format.hpp"

#include <cstdio>

namespace dnls {

std::string g15(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", value);
    return buf;
}

} // namespace dnls
