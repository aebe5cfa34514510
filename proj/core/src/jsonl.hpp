#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace satdebias::detail {

using json = nlohmann::json;

/// Calls `fn(line_number, line)` for every non-blank line. Throws
/// satdebias::Error when the file cannot be opened.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn);

/// Parses one JSON object, rethrowing parse failures as ParseError.
json parse_object(const std::filesystem::path& path, std::size_t line, std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Field accessors that throw ParseError naming the field.
std::string require_string(const json& obj, const char* key, const std::filesystem::path& path,
                           std::size_t line);
std::optional<std::string> optional_string(const json& obj, const char* key,
                                           const std::filesystem::path& path, std::size_t line);

/// Appends one line and flushes it to stable storage (fsync).
void append_durable(const std::filesystem::path& path, std::string_view line);

}  // namespace satdebias::detail
