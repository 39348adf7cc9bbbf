#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <openssl/evp.h>

namespace rcsc {

/// One CSV cell: text, integer or real.
using Cell = std::variant<std::string, std::int64_t, double>;

/// Reals are printed as %.12e so reports are byte-stable across runs.
inline std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const double v = std::get<double>(c);
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match table " + name);
    rows.push_back(std::move(row));
  }
};

inline constexpr const char* kCsvVersion = "v1";

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  os << "# rcsc-csv " << kCsvVersion << ' ' << t.name << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

/// Hex SHA-1 of "blob <size>\0<content>", the hash git assigns to a file.
inline std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Writes `content` to dir/name, throwing std::ios_base::failure on error.
inline void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create directory " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

struct Manifest {
  std::string config_text;
  std::uint64_t seed = 0;
  std::string task;
  std::vector<std::string> artifacts;
};

inline std::string to_text(const Manifest& m) {
  std::ostringstream os;
  os << "rcsc manifest v1\n";
  os << "task: " << m.task << '\n';
  os << "seed: " << m.seed << '\n';
  os << "config-hash: " << git_blob_hash(m.config_text) << '\n';
  for (const auto& a : m.artifacts) os << "artifact: " << a << '\n';
  os << "config:\n";
  std::istringstream in(m.config_text);
  std::string line;
  while (std::getline(in, line)) os << "  " << line << '\n';
  return os.str();
}

}  // namespace rcsc
