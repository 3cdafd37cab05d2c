#pragma once

#include <cstdint>
#include <string>

namespace curvmeas {

// Stable text form for doubles ('.' decimal, shortest consistent form);
// infinities serialize as "inf"/"-inf". Reports must be byte-identical
// across runs with the same config.
std::string fmt_double(double v);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace curvmeas
