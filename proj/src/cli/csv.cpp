#include "pilotpbr/cli/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "pilotpbr/error.hpp"

namespace pilotpbr::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw ConfigError("cannot write " + path.string());
  bool first = true;
  for (auto h : header) {
    if (!first) out_ << ',';
    out_ << h;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Cell> cells) {
  if (cells.size() != columns_) throw DimensionError("CSV row width does not match the header");
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out_ << ',';
    first = false;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_number(v);
          } else if constexpr (std::is_same_v<T, std::optional<double>>) {
            if (v) out_ << format_number(*v);
          } else {
            out_ << v;
          }
        },
        c);
  }
  out_ << '\n';
}

}  // namespace pilotpbr::cli
