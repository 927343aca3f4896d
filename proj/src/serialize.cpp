#include "bregcr/serialize.hpp"

#include <charconv>
#include <cmath>

namespace bregcr {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void to_json(nlohmann::json& j, const RiskEstimate& r) {
    j = nlohmann::json{{"mean", r.mean}, {"std_error", r.std_error}, {"n_samples", r.n_samples}, {"seed", r.seed}};
}

void to_json(nlohmann::json& j, const BoundValue& b) {
    j = nlohmann::json{{"value", b.value}, {"valid", b.valid}, {"assumptions", b.assumptions}, {"formula", b.formula}};
    if (b.std_error != 0.0) j["std_error"] = b.std_error;
}

}  // namespace bregcr
