#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "satdebias/biasstats.hpp"
#include "satdebias/error.hpp"

namespace satdebias::biasstats {

DictionaryLemmatizer::DictionaryLemmatizer(std::vector<std::pair<std::string, std::string>> entries)
    : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
}

DictionaryLemmatizer DictionaryLemmatizer::from_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, number, "expected form<TAB>lemma");
    entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return DictionaryLemmatizer(std::move(entries));
}

std::vector<std::string> DictionaryLemmatizer::lemmatize(const std::vector<std::string>& tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                               [](const auto& e, const std::string& key) { return e.first < key; });
    out.push_back(it != entries_.end() && it->first == t ? it->second : t);
  }
  return out;
}

std::vector<std::string> ProcessLemmatizer::lemmatize(const std::vector<std::string>& tokens) const {
  if (tokens.empty()) return {};
  // Tokens go through a temp file so the child never blocks on a full pipe
  // while we are still writing.
  char name[] = "/tmp/satdebias-lemma-XXXXXX";
  const int fd = ::mkstemp(name);
  if (fd < 0) throw Error("cannot create temporary file for lemmatizer input");
  ::close(fd);
  const std::filesystem::path input(name);
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  } cleanup{input};
  {
    std::ofstream out(input, std::ios::binary);
    for (const auto& t : tokens) out << t << '\n';
    if (!out) throw Error("cannot write lemmatizer input");
  }
  const std::string command = command_ + " < '" + input.string() + "'";
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) throw Error("cannot start lemmatizer: " + command_);
  std::vector<std::string> lemmas;
  lemmas.reserve(tokens.size());
  std::string line;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) {
    line += buf;
    if (!line.empty() && line.back() == '\n') {
      line.pop_back();
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lemmas.push_back(std::move(line));
      line.clear();
    }
  }
  if (!line.empty()) lemmas.push_back(std::move(line));
  const int status = ::pclose(pipe);
  if (status != 0) throw Error("lemmatizer '" + command_ + "' exited with status " + std::to_string(status));
  if (lemmas.size() != tokens.size())
    throw Error("lemmatizer '" + command_ + "' produced " + std::to_string(lemmas.size()) +
                " lines for " + std::to_string(tokens.size()) + " tokens");
  return lemmas;
}

}  // namespace satdebias::biasstats
