#include "sdcexp/util.hpp"

#include <cstdio>

namespace sdcexp {

std::string format_sig(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace sdcexp
