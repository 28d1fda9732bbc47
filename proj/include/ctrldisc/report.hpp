#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

namespace ctrldisc {

/// %.17g, so every double round-trips; non-finite values become null.
inline std::string format_double(double v)
{
    if (!std::isfinite(v))
        return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

namespace detail {

inline void write_json(std::ostream& os, const nlohmann::json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case nlohmann::json::value_t::number_float:
        os << format_double(j.get<double>());
        break;
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            break;
        }
        // Arrays of scalars stay on one line.
        bool flat = true;
        for (const auto& e : j)
            flat = flat && !e.is_structured();
        os << '[';
        bool first = true;
        for (const auto& e : j) {
            os << (first ? "" : ",");
            if (!flat)
                os << '\n' << pad;
            else if (!first)
                os << ' ';
            write_json(os, e, indent, depth + 1);
            first = false;
        }
        if (!flat)
            os << '\n' << close_pad;
        os << ']';
        break;
    }
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            break;
        }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            os << (first ? "\n" : ",\n") << pad << nlohmann::json(it.key()).dump() << ": ";
            write_json(os, it.value(), indent, depth + 1);
            first = false;
        }
        os << '\n' << close_pad << '}';
        break;
    }
    default:
        os << j.dump();
    }
}

} // namespace detail

/// Deterministic pretty printer: sorted keys, fixed 17-digit floats.
inline void write_json(std::ostream& os, const nlohmann::json& j)
{
    detail::write_json(os, j, 2, 0);
    os << '\n';
}

inline std::string dump_json(const nlohmann::json& j)
{
    std::ostringstream os;
    write_json(os, j);
    return os.str();
}

} // namespace ctrldisc
