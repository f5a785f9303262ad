#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "ctk/toda.hpp"

namespace ctk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerification = 2;

// Parses argv and runs one subcommand; every run writes manifest.json into
// the output directory next to its artifacts.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Worker count: hardware concurrency capped by TOOLKIT_THREADS.
int worker_count();

// JSON text with sorted keys and doubles printed with 17 significant digits.
std::string dump_json(const nlohmann::json& j);

// "a=0;0.5,b=1;1" -> a = (0, 0.5), b = (1, 1); entries parse as complex numbers.
TodaState parse_state(const std::string& text);

}  // namespace ctk::cli
