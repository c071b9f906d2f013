// Minimal CSV writer with RFC-4180-style quoting and a mandatory header row.

#ifndef RBM_CSV_HPP
#define RBM_CSV_HPP

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbm {

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open CSV output: " + path);
    write_row(header);
  }

  void write_row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
      throw std::logic_error("CSV row width mismatch");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(fields[i]);
    }
    out_ << "\r\n";
  }

  static std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    return quoted;
  }

  static std::string num(double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    return os.str();
  }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace rbm

#endif  // RBM_CSV_HPP
