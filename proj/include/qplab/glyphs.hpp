#pragma once

// 7x13 monospace glyphs for printable ASCII, one byte per row, MSB on the left.

#include <cstdint>

namespace qplab::detail {

inline constexpr int kGlyphW = 7;
inline constexpr int kGlyphH = 13;

inline constexpr std::uint8_t kGlyphs[95][13] = {
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x00, 0x08, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x14, 0x14, 0x14, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x0a, 0x12, 0x3f, 0x14, 0x14, 0x7e, 0x28, 0x28, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x08, 0x1e, 0x28, 0x28, 0x1c, 0x0a, 0x0a, 0x3c, 0x08, 0x08, 0x00},
    {0x00, 0x00, 0x30, 0x48, 0x32, 0x04, 0x10, 0x2e, 0x0a, 0x0e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x20, 0x30, 0x30, 0x28, 0x46, 0x66, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x08, 0x08, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x04, 0x08, 0x08, 0x18, 0x10, 0x10, 0x18, 0x08, 0x08, 0x04, 0x00, 0x00},
    {0x00, 0x10, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x18, 0x10, 0x00, 0x00},
    {0x00, 0x00, 0x08, 0x2a, 0x1c, 0x1c, 0x2a, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x08, 0x08, 0x7e, 0x08, 0x08, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x08, 0x08, 0x10, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1c, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x08, 0x08, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x06, 0x04, 0x04, 0x08, 0x08, 0x10, 0x10, 0x20, 0x20, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x36, 0x22, 0x22, 0x2a, 0x22, 0x36, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x38, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3c, 0x26, 0x06, 0x04, 0x08, 0x18, 0x30, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x26, 0x06, 0x1c, 0x06, 0x02, 0x26, 0x3c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x0c, 0x0c, 0x14, 0x24, 0x24, 0x7e, 0x04, 0x04, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3c, 0x20, 0x20, 0x3c, 0x06, 0x02, 0x06, 0x3c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x30, 0x20, 0x3c, 0x26, 0x22, 0x26, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3e, 0x04, 0x04, 0x04, 0x08, 0x08, 0x18, 0x10, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x26, 0x26, 0x1c, 0x26, 0x22, 0x26, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x26, 0x22, 0x26, 0x1e, 0x02, 0x04, 0x3c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x08, 0x08, 0x00, 0x00, 0x08, 0x08, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x08, 0x08, 0x00, 0x00, 0x08, 0x08, 0x10, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x02, 0x1c, 0x60, 0x1c, 0x02, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x7e, 0x00, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x60, 0x1c, 0x06, 0x1c, 0x60, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3c, 0x06, 0x04, 0x08, 0x08, 0x08, 0x00, 0x08, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x22, 0x22, 0x4e, 0x52, 0x52, 0x4e, 0x20, 0x30, 0x1c, 0x00},
    {0x00, 0x00, 0x18, 0x18, 0x14, 0x14, 0x24, 0x3e, 0x22, 0x62, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3c, 0x26, 0x26, 0x3c, 0x22, 0x22, 0x22, 0x3c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x32, 0x20, 0x20, 0x20, 0x20, 0x32, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x38, 0x24, 0x22, 0x22, 0x22, 0x22, 0x24, 0x38, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3e, 0x20, 0x20, 0x3e, 0x20, 0x20, 0x20, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3e, 0x20, 0x20, 0x3e, 0x20, 0x20, 0x20, 0x20, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x32, 0x20, 0x20, 0x26, 0x22, 0x32, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x22, 0x22, 0x22, 0x3e, 0x22, 0x22, 0x22, 0x22, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3e, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04, 0x38, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x22, 0x24, 0x28, 0x38, 0x28, 0x24, 0x26, 0x22, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x20, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x66, 0x76, 0x76, 0x7a, 0x6a, 0x62, 0x62, 0x62, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x22, 0x32, 0x32, 0x2a, 0x2a, 0x2e, 0x26, 0x26, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x26, 0x22, 0x22, 0x22, 0x22, 0x26, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3c, 0x22, 0x22, 0x26, 0x3c, 0x20, 0x20, 0x20, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x26, 0x22, 0x22, 0x22, 0x22, 0x26, 0x1c, 0x04, 0x00, 0x00},
    {0x00, 0x00, 0x3c, 0x26, 0x26, 0x26, 0x3c, 0x24, 0x22, 0x22, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x1c, 0x20, 0x20, 0x30, 0x0c, 0x02, 0x26, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x7e, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x22, 0x22, 0x22, 0x22, 0x22, 0x22, 0x26, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x62, 0x22, 0x26, 0x24, 0x14, 0x14, 0x18, 0x18, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x43, 0x42, 0x4a, 0x7a, 0x32, 0x36, 0x36, 0x26, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x22, 0x34, 0x14, 0x08, 0x18, 0x14, 0x26, 0x62, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x62, 0x26, 0x14, 0x18, 0x08, 0x08, 0x08, 0x08, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x3e, 0x02, 0x04, 0x08, 0x08, 0x10, 0x20, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x1c, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x1c, 0x00, 0x00},
    {0x00, 0x00, 0x20, 0x20, 0x10, 0x10, 0x08, 0x08, 0x04, 0x04, 0x06, 0x00, 0x00},
    {0x00, 0x18, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x18, 0x00, 0x00},
    {0x00, 0x00, 0x18, 0x14, 0x22, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x7f},
    {0x00, 0x10, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x06, 0x3e, 0x22, 0x26, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x20, 0x20, 0x20, 0x3c, 0x36, 0x22, 0x22, 0x36, 0x3c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x1e, 0x30, 0x20, 0x20, 0x30, 0x1e, 0x00, 0x00, 0x00},
    {0x00, 0x02, 0x02, 0x02, 0x1e, 0x26, 0x26, 0x26, 0x26, 0x1e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x1c, 0x22, 0x3e, 0x20, 0x20, 0x1e, 0x00, 0x00, 0x00},
    {0x00, 0x0e, 0x08, 0x08, 0x3e, 0x08, 0x08, 0x08, 0x08, 0x08, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x1e, 0x26, 0x26, 0x26, 0x26, 0x1e, 0x04, 0x3c, 0x00},
    {0x00, 0x20, 0x20, 0x20, 0x3c, 0x36, 0x22, 0x22, 0x22, 0x22, 0x00, 0x00, 0x00},
    {0x00, 0x08, 0x00, 0x00, 0x38, 0x08, 0x08, 0x08, 0x08, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x08, 0x00, 0x00, 0x38, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x38, 0x00},
    {0x00, 0x20, 0x20, 0x20, 0x26, 0x2c, 0x38, 0x3c, 0x24, 0x22, 0x00, 0x00, 0x00},
    {0x00, 0x38, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x0e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x3e, 0x2a, 0x2a, 0x2a, 0x2a, 0x2a, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x36, 0x22, 0x22, 0x22, 0x22, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x1c, 0x26, 0x22, 0x22, 0x26, 0x1c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x36, 0x22, 0x22, 0x36, 0x3c, 0x20, 0x20, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x1e, 0x26, 0x22, 0x22, 0x26, 0x1e, 0x02, 0x02, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x1e, 0x18, 0x10, 0x10, 0x10, 0x10, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x1c, 0x20, 0x38, 0x0c, 0x06, 0x3c, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x10, 0x10, 0x3e, 0x10, 0x10, 0x10, 0x18, 0x0e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x22, 0x22, 0x22, 0x22, 0x26, 0x1e, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x22, 0x26, 0x24, 0x14, 0x1c, 0x18, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x43, 0x42, 0x2a, 0x3a, 0x36, 0x34, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x26, 0x14, 0x18, 0x18, 0x34, 0x22, 0x00, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x22, 0x22, 0x14, 0x14, 0x18, 0x08, 0x18, 0x30, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x3e, 0x04, 0x08, 0x10, 0x10, 0x3e, 0x00, 0x00, 0x00},
    {0x00, 0x0e, 0x08, 0x08, 0x08, 0x30, 0x18, 0x08, 0x08, 0x08, 0x0e, 0x00, 0x00},
    {0x00, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x00},
    {0x00, 0x30, 0x08, 0x08, 0x08, 0x0e, 0x08, 0x08, 0x08, 0x08, 0x30, 0x00, 0x00},
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x38, 0x0e, 0x00, 0x00, 0x00, 0x00, 0x00},
};

}  // namespace qplab::detail
