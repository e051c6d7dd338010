#include "suitgraph/canonical_json.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace suitgraph {

std::string format_double17(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite number cannot be written as JSON");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

namespace {

void write(const nlohmann::json& v, std::string& out) {
    using value_t = nlohmann::json::value_t;
    switch (v.type()) {
        case value_t::object: {
            // nlohmann::json objects are std::map-backed, so iteration is
            // already in key order.
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += nlohmann::json(it.key()).dump();
                out += ':';
                write(it.value(), out);
            }
            out += '}';
            break;
        }
        case value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ',';
                write(v[i], out);
            }
            out += ']';
            break;
        }
        case value_t::number_float:
            out += format_double17(v.get<double>());
            break;
        default:
            out += v.dump();
    }
}

}  // namespace

std::string dump_canonical(const nlohmann::json& value) {
    std::string out;
    write(value, out);
    return out;
}

}  // namespace suitgraph
