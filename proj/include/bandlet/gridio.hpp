#pragma once
#include <string>

#include "bandlet/image.hpp"

namespace bandlet {

// Text grid: first line the side, then side rows of side decimal reals.
// PGM (P2/P5, 8-bit) is accepted on read and chosen on write by a .pgm
// extension, mapped linearly to [0,1]. Side must be a power of two.
Image read_grid(const std::string& path);
void write_grid(const Image& img, const std::string& path);

}  // namespace bandlet
