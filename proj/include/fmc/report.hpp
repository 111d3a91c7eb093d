#pragma once

// JSON report fragments shared by the CLI commands.

#include <cmath>
#include <cstdint>
#include <string>

#include "json.hpp"

#include "fmc/analysis.hpp"
#include "fmc/io.hpp"
#include "fmc/multiplier.hpp"

namespace fmc::report {

using Json = nlohmann::ordered_json;

/// Integral doubles are emitted as integers ("6", not "6.0"); everything else
/// uses the shortest round-trip form; non-finite values become null.
inline Json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    if (x == std::trunc(x) && std::abs(x) < 9007199254740992.0) return static_cast<std::int64_t>(x);
    return x;
}

inline Json complex_value(Complex z) { return Json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

inline Json invariance(const InvarianceReport& r) {
    Json j;
    j["verdict"] = r.invariant;
    j["leakage"] = number(r.max_leakage);
    if (r.worst_pair) {
        j["worst_pair"] = Json::array({r.worst_pair->source, r.worst_pair->target});
    } else {
        j["worst_pair"] = nullptr;
    }
    j["tolerance"] = number(r.tolerance_used);
    return j;
}

inline Json sobolev(const SobolevFit& fit) {
    return Json{{"nu", number(fit.nu)}, {"m", number(fit.m)}, {"C", number(fit.C)}};
}

/// Key used for an exponent in the "schatten" object.
inline std::string exponent_key(const SchattenExponent& r) {
    return r.is_infinite() ? std::string("inf") : io::format_double(r.value());
}

inline std::string dump(const Json& j) { return j.dump() + "\n"; }

}  // namespace fmc::report
