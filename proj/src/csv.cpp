#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string_view>

#include "blrs/data.hpp"
#include "blrs/errors.hpp"

namespace blrs {

namespace {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

class RecordReader {
 public:
  RecordReader(std::istream& in, char delimiter)
      : in_(in), delimiter_(delimiter) {}

  std::optional<Record> next() {
    while (true) {
      if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
      Record rec = read_one();
      const bool blank = rec.fields.size() == 1 && trim(rec.fields[0]).empty();
      if (!blank) return rec;
    }
  }

  static std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

 private:
  Record read_one() {
    Record rec;
    rec.line = line_;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      const char c = static_cast<char>(ch);
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"' && !was_quoted && trim(field).empty()) {
        field.clear();
        quoted = was_quoted = true;
      } else if (c == delimiter_) {
        rec.fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c != '\r') {
        field.push_back(c);
      }
    }
    if (quoted) {
      throw DataError("line " + std::to_string(rec.line) +
                      ": unterminated quoted field");
    }
    rec.fields.push_back(std::move(field));
    return rec;
  }

  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 1;
};

std::optional<double> parse_number(std::string_view text) {
  text = RecordReader::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

void strip_bom(std::istream& in) {
  if (in.peek() == 0xEF) {
    char bom[3];
    in.read(bom, 3);
    if (!(static_cast<unsigned char>(bom[1]) == 0xBB &&
          static_cast<unsigned char>(bom[2]) == 0xBF)) {
      throw DataError("line 1: invalid byte sequence at start of file");
    }
  }
}

}  // namespace

Index find_column(const std::vector<std::string>& names, Index column_count,
                  const std::string& ref) {
  const auto key = RecordReader::trim(ref);
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (RecordReader::trim(names[j]) == key) return static_cast<Index>(j);
  }
  if (key.empty() ||
      !std::all_of(key.begin(), key.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return -1;
  }
  Index index = 0;
  std::from_chars(key.data(), key.data() + key.size(), index);
  return index < column_count ? index : -1;
}

CsvTable read_csv(std::istream& in, const CsvOptions& options) {
  strip_bom(in);
  RecordReader reader(in, options.delimiter);

  auto first = reader.next();
  if (!first) throw DataError("empty file");

  CsvTable table;
  const std::size_t width = first->fields.size();
  if (options.has_header) {
    for (const auto& f : first->fields) {
      table.column_names.emplace_back(RecordReader::trim(f));
    }
  }

  std::vector<bool> keep(width, true);
  for (const auto& ref : options.ignore_columns) {
    const Index j =
        find_column(table.column_names, static_cast<Index>(width), ref);
    if (j < 0) throw DataError("unknown column to ignore: " + ref);
    keep[static_cast<std::size_t>(j)] = false;
  }
  const auto kept = static_cast<Index>(std::count(keep.begin(), keep.end(), true));

  std::vector<std::string> kept_names;
  for (std::size_t j = 0; j < table.column_names.size(); ++j) {
    if (keep[j]) kept_names.push_back(table.column_names[j]);
  }
  table.column_names = std::move(kept_names);

  std::vector<double> cells;
  Index rows = 0;
  auto consume = [&](const Record& rec) {
    if (rec.fields.size() != width) {
      throw DataError("line " + std::to_string(rec.line) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(rec.fields.size()));
    }
    for (std::size_t j = 0; j < width; ++j) {
      if (!keep[j]) continue;
      const auto value = parse_number(rec.fields[j]);
      if (!value) {
        const std::string column =
            options.has_header
                ? "'" + std::string(RecordReader::trim(first->fields[j])) + "'"
                : std::to_string(j);
        throw DataError("line " + std::to_string(rec.line) + ", column " +
                        column + ": non-numeric cell '" + rec.fields[j] + "'");
      }
      cells.push_back(*value);
    }
    ++rows;
  };

  if (!options.has_header) consume(*first);
  while (auto rec = reader.next()) consume(*rec);
  if (rows == 0) throw DataError("no data rows");

  table.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), rows, kept);
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_csv(in, options);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace blrs
