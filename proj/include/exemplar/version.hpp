#pragma once

#define EXEMPLAR_VERSION_MAJOR 0
#define EXEMPLAR_VERSION_MINOR 1
#define EXEMPLAR_VERSION_PATCH 0

namespace exemplar {
inline constexpr const char* kVersion = "0.1.0";
}
