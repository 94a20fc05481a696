#pragma once

// Envelope trace files.
//
// CSV: one value per line, optional non-numeric header line, blank lines skipped.
// Binary: the 8 ASCII bytes "KMUTRC01" followed by little-endian IEEE float32 samples.

#include <filesystem>
#include <iosfwd>

#include "kmsec/estimate.hpp"

namespace kmsec::trace_io {

inline constexpr char kBinaryMagic[8] = {'K', 'M', 'U', 'T', 'R', 'C', '0', '1'};

estimate::EnvelopeTrace read_csv(std::istream& in);
estimate::EnvelopeTrace read_binary(std::istream& in);
void write_csv(std::ostream& out, const estimate::EnvelopeTrace& trace, bool header = true);
void write_binary(std::ostream& out, const estimate::EnvelopeTrace& trace);

// Picks the format from the magic bytes. Throws FormatError on unreadable or
// malformed files.
estimate::EnvelopeTrace read_trace(const std::filesystem::path& path);

}  // namespace kmsec::trace_io
