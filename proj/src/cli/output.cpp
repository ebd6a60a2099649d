#include <fstream>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

#include "csv.hpp"
#include "qphonon/cli.hpp"

namespace qphonon::cli {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.17g}", v);
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::logic_error(fmt::format("csv row has {} cells, header has {}", cells.size(), header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& row : rows_) line(row);
  return out;
}

namespace {

void write_atomic(const fs::path& target, const std::string& contents) {
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    file.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    file.flush();
    if (!file) throw std::runtime_error("write failed for " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    throw std::runtime_error("cannot rename " + temp.string() + ": " + ec.message());
  }
}

}  // namespace

void write_outputs(const CommandResult& result, const std::string& command, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& file : result.files) write_atomic(dir / file.name, file.contents);
  write_atomic(dir / (command + "_report.json"), result.report.dump(2) + "\n");
}

}  // namespace qphonon::cli
