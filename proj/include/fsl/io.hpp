#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fsl {

inline constexpr const char* kVersion = "0.1.0";

// shortest round-trippable decimal form
std::string format_g17(double v);

// Writes to <path>.tmp in the same directory and renames onto <path>, so a
// reader never observes a partial file. Throws std::runtime_error on any
// filesystem failure.
void write_text_atomic(const std::string& path, const std::string& text);

std::string read_text(const std::string& path);

// FNV-1a over the raw bytes
std::uint64_t fnv1a64(const std::string& bytes);

// Writes <manifest_path> recording the program version, the command, the
// resolved key=value config, wall time, and per-output byte counts and
// FNV-1a hashes (reading each output back from disk). Atomic like
// write_text_atomic.
void write_manifest(const std::string& manifest_path, const std::string& command,
                    const std::map<std::string, std::string>& config, double wall_time_s,
                    const std::vector<std::string>& outputs);

}  // namespace fsl
