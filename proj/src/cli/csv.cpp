#include "remlab/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace remlab::cli {

std::string format_number(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (res.ec != std::errc()) {
        throw std::runtime_error("format_number: conversion failed");
    }
    return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

struct Render
{
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(int x) const { return std::to_string(x); }
    std::string operator()(bool x) const { return x ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return quote(s); }
};

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), width_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << quote(header[i]);
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells)
{
    if (cells.size() != width_) {
        throw std::logic_error("CsvWriter: row width does not match the header");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out_ << (i ? "," : "") << std::visit(Render{}, cells[i]);
    }
    out_ << '\n';
    ++rows_;
}

}  // namespace remlab::cli
