#include "dincl/io/number_format.hpp"

#include <array>
#include <charconv>

#include "dincl/errors.hpp"

namespace dincl::io {

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw ContractViolation("format_double: conversion failed");
    }
    return std::string(buf.data(), end);
}

double parse_double(std::string_view text, std::string_view what)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(what) + ": cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

} // namespace dincl::io
