#pragma once

namespace gvlab {

inline constexpr const char* kVersion = "0.1.0";

}
