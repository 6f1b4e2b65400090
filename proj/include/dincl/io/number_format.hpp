#ifndef DINCL_IO_NUMBER_FORMAT_HPP
#define DINCL_IO_NUMBER_FORMAT_HPP

#include <string>
#include <string_view>

namespace dincl::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Parses the whole of `text` as a double; throws ConfigError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);

} // namespace dincl::io

#endif // DINCL_IO_NUMBER_FORMAT_HPP
