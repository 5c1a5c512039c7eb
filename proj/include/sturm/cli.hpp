#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sturm::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kCheckFailed = 2;

/// "A@index" pairs separated by commas, e.g. "1@1,-0.5@3".
std::vector<std::pair<int, double>> parse_coeffs(const std::string& text);

/// "start:stop:step", inclusive of stop up to rounding.
std::vector<double> parse_time_grid(const std::string& text);

/// Runs one command; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sturm::cli
