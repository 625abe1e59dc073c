#include <aspl/text.hpp>

#include <aspl/error.hpp>

#include <charconv>
#include <cmath>

namespace aspl {

std::string format_number(double v) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument, "cannot serialize a non-finite number");
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view token) {
    double v = 0.0;
    const char* end = token.data() + token.size();
    const auto res = std::from_chars(token.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, "bad number '" + std::string(token) + "'");
    }
    return v;
}

long parse_integer(std::string_view token) {
    long v = 0;
    const char* end = token.data() + token.size();
    const auto res = std::from_chars(token.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw Error(ErrorCode::ParseError, "bad integer '" + std::string(token) + "'");
    }
    return v;
}

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

std::vector<std::string_view> content_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string_view::npos && line[first] != '#') {
            out.push_back(line);
        }
        pos = nl + 1;
    }
    return out;
}

} // namespace aspl
