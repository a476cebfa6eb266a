#pragma once

#include <string>

#include "vfbd/mor/bilinear.hpp"

namespace vfbd::mor {

/// Text container: a header line "vfbd-rom 1 <N> <r>", then one block per matrix
/// ("<name> <rows> <cols>" followed by rows of hexadecimal floats) in the order
/// Ar, Qr1..Qr5, Br, Cr, V, W, T. Hex floats make the round trip bit-exact.
void save_rom(const std::string& path, const RomSystem& rom, const RomBasis& basis);

struct RomFile {
    RomSystem rom;
    RomBasis basis;
};

/// Throws IoError for unreadable files and ConfigError for malformed content.
RomFile load_rom(const std::string& path);

} // namespace vfbd::mor
