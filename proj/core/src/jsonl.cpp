#include "jsonl.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "satdebias/error.hpp"
#include "satdebias/utf8.hpp"

namespace satdebias::detail {

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::trim(line).empty()) continue;
    fn(number, line);
  }
  if (in.bad()) throw Error("read error on " + path.string());
}

json parse_object(const std::filesystem::path& path, std::size_t line, std::string_view text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), line, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(path.string(), line, "expected a JSON object");
  return obj;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed on " + path.string());
}

std::string require_string(const json& obj, const char* key, const std::filesystem::path& path,
                           std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.string(), line, std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ParseError(path.string(), line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           const std::filesystem::path& path, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(path.string(), line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

void append_durable(const std::filesystem::path& path, std::string_view line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
  std::string buf(line);
  buf.push_back('\n');
  std::size_t written = 0;
  while (written < buf.size()) {
    const ssize_t n = ::write(fd, buf.data() + written, buf.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw Error("append to " + path.string() + " failed: " + std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw Error("fsync on " + path.string() + " failed: " + std::strerror(err));
  }
  ::close(fd);
}

}  // namespace satdebias::detail
