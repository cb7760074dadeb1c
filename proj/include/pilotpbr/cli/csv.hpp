#pragma once

// CSV output: header row, comma separator, '\n' line endings, '.' decimal
// point. Doubles use the shortest representation that round-trips
// (std::to_chars); undefined values are written as empty fields.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace pilotpbr::cli {

std::string format_number(double value);

class CsvWriter {
 public:
  using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string_view, std::optional<double>>;

  // Throws ConfigError when the file cannot be created.
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  void row(std::initializer_list<Cell> cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace pilotpbr::cli
