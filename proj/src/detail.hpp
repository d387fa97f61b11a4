#ifndef TWOMIX_SRC_DETAIL_HPP
#define TWOMIX_SRC_DETAIL_HPP

#include <cstddef>
#include <sstream>
#include <string>

namespace twomix::detail {

inline std::string num(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

inline std::string num(std::size_t v) { return std::to_string(v); }

} // namespace twomix::detail

#endif
