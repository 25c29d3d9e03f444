#ifndef SHRINKAGE_HARNESS_RESULTS_HPP
#define SHRINKAGE_HARNESS_RESULTS_HPP

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace shrinkage::harness {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct ResultRow {
    std::string tag;
    long d = 0;
    double beta_norm = kMissing;
    std::string density;
    double estimate = kMissing;
    double se = kMissing;
    long n = 0;
    std::uint64_t seed = 0;
    std::string point;
    std::string quantity;
    std::string error;
};

inline const char* const kCsvHeader = "tag,d,beta_norm,density,estimate,se,n,seed,point,quantity,error";

// 17 significant digits; NaN is written as an empty field.
std::string format_double(double x);
std::string csv_escape(const std::string& s);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::string to_csv(const std::vector<ResultRow>& rows);

// Rows back from CSV text written by write_csv.
std::vector<ResultRow> parse_csv(const std::string& text);

// Writes <dir>/<stem>.csv and <dir>/<stem>.meta.json, creating dir. Throws
// IoError.
void write_outputs(const std::string& dir, const std::string& stem,
                   const std::vector<ResultRow>& rows, const nlohmann::json& metadata);

}  // namespace shrinkage::harness

#endif
