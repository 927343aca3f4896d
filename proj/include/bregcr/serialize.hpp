#pragma once

#include "bregcr/bounds.hpp"
#include "bregcr/risk.hpp"

#include <json.hpp>

#include <string>

namespace bregcr {

// Locale-independent text with 17 significant digits, so
// a parsed value round-trips exactly.  Non-finite values print as inf, -inf, nan.
std::string format_number(double v);

// {mean, std_error, n_samples, seed}
void to_json(nlohmann::json& j, const RiskEstimate& r);
// {value, valid, assumptions, formula}, plus std_error for Monte-Carlo bounds.
void to_json(nlohmann::json& j, const BoundValue& b);

}  // namespace bregcr
