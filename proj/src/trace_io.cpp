#include "kmsec/trace_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "kmsec/errors.hpp"

namespace kmsec::trace_io {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::uint32_t load_le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

estimate::EnvelopeTrace read_csv(std::istream& in) {
    estimate::EnvelopeTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view field = trim(line);
        if (field.empty()) continue;
        // Only the first field of a row is read.
        field = trim(field.substr(0, field.find(',')));
        double v = 0.0;
        if (!parse_double(field, v)) {
            if (!seen_content) {
                seen_content = true;  // header
                continue;
            }
            throw FormatError("line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
        }
        seen_content = true;
        if (!std::isfinite(v) || v < 0.0) {
            throw FormatError("line " + std::to_string(line_no) + ": samples must be finite and >= 0");
        }
        trace.samples.push_back(v);
    }
    if (in.bad()) throw FormatError("read error");
    if (trace.samples.empty()) throw FormatError("trace contains no samples");
    return trace;
}

estimate::EnvelopeTrace read_binary(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kBinaryMagic, 8) != 0) {
        throw FormatError("missing KMUTRC01 header");
    }
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (body.size() % 4 != 0) throw FormatError("binary trace length is not a multiple of 4 bytes");
    if (body.empty()) throw FormatError("trace contains no samples");
    estimate::EnvelopeTrace trace;
    trace.samples.reserve(body.size() / 4);
    const auto* bytes = reinterpret_cast<const unsigned char*>(body.data());
    for (std::size_t i = 0; i < body.size(); i += 4) {
        const float v = std::bit_cast<float>(load_le32(bytes + i));
        if (!std::isfinite(v) || v < 0.0f) {
            throw FormatError("sample " + std::to_string(i / 4) + " is negative or not finite");
        }
        trace.samples.push_back(v);
    }
    return trace;
}

void write_csv(std::ostream& out, const estimate::EnvelopeTrace& trace, bool header) {
    if (header) out << "envelope\n";
    char buf[64];
    for (double v : trace.samples) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, res.ptr - buf);
        out.put('\n');
    }
}

void write_binary(std::ostream& out, const estimate::EnvelopeTrace& trace) {
    out.write(kBinaryMagic, 8);
    for (double v : trace.samples) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        const char le[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                            static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
        out.write(le, 4);
    }
}

estimate::EnvelopeTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    char magic[8] = {};
    in.read(magic, 8);
    const bool binary = in.gcount() == 8 && std::memcmp(magic, kBinaryMagic, 8) == 0;
    in.clear();
    in.seekg(0);
    return binary ? read_binary(in) : read_csv(in);
}

}  // namespace kmsec::trace_io
