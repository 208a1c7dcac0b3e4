#ifndef FB_CORE_CSV_HPP
#define FB_CORE_CSV_HPP

#include <iosfwd>
#include <set>
#include <string>

#include "core/dataset.hpp"

namespace fb {

// Column-role map for the wide CSV format. Columns named `y@<t>` form the
// response block, `<name>@<s>` a functional covariate, anything else a
// scalar column unless listed as categorical.
struct CsvSchema {
  std::string response_name = "y";
  std::set<std::string> categorical;
};

FunctionalDataset ingest_csv(std::istream& in, const CsvSchema& schema = {});
FunctionalDataset ingest_csv_file(const std::string& path,
                                  const CsvSchema& schema = {});

void write_csv(std::ostream& out, const FunctionalDataset& ds,
               const std::string& response_name = "y");
void write_csv_file(const std::string& path, const FunctionalDataset& ds,
                    const std::string& response_name = "y");

// Serializes a double so that parsing it back yields the identical value.
std::string format_double(double v);

}  // namespace fb

#endif
