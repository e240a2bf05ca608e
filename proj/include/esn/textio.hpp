#pragma once

#include <optional>
#include <string>

namespace esn {

// Shortest decimal form that round-trips a double (up to 17 significant
// digits); all persisted numbers go through this.
std::string format_g17(double v);

// Fixed 4-significant-digit rendering for human-facing report tables.
std::string format_g4(double v);

// Strict full-token parse; nullopt when the token is not a single number.
std::optional<double> parse_double(const std::string& token);

std::string trim(const std::string& s);

}  // namespace esn
