#pragma once

// CSV output with locale-independent, round-trip number formatting
// (17 significant digits, shortest general form).

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace remlab::cli {

std::string format_number(double x);

using Cell = std::variant<double, std::int64_t, std::uint64_t, int, bool, std::string>;

class CsvWriter
{
  public:
    CsvWriter(std::ostream& out, std::vector<std::string> header);

    void row(const std::vector<Cell>& cells);
    std::size_t rows() const noexcept { return rows_; }

  private:
    std::ostream& out_;
    std::size_t width_;
    std::size_t rows_ = 0;
};

}  // namespace remlab::cli
