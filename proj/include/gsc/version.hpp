#pragma once

namespace gsc {

inline constexpr const char* kArtifactName = "gsclab";
inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace gsc
