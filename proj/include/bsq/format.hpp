#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bsq {

/// Shortest decimal string that round-trips to the same double; '.' decimal
/// point regardless of locale.
std::string fmt_double(double x);

/// Minimal CSV writer: fields are written verbatim, comma separated.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& cols) { row(cols); }
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

}  // namespace bsq
