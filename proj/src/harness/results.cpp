#include "shrinkage/harness/results.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shrinkage/harness/config.hpp"

namespace shrinkage::harness {

std::string format_double(double x) {
    if (std::isnan(x)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << csv_escape(r.tag) << ',' << r.d << ',' << format_double(r.beta_norm) << ','
            << csv_escape(r.density) << ',' << format_double(r.estimate) << ','
            << format_double(r.se) << ',' << r.n << ',' << r.seed << ',' << csv_escape(r.point)
            << ',' << csv_escape(r.quantity) << ',' << csv_escape(r.error) << '\n';
    }
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

namespace {

std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s) { return s.empty() ? kMissing : std::stod(s); }

}  // namespace

std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<ResultRow> rows;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("parse_csv: unexpected header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_record(line);
        if (f.size() != 11) throw std::runtime_error("parse_csv: wrong field count");
        ResultRow r;
        r.tag = f[0];
        r.d = std::stol(f[1]);
        r.beta_norm = parse_number(f[2]);
        r.density = f[3];
        r.estimate = parse_number(f[4]);
        r.se = parse_number(f[5]);
        r.n = std::stol(f[6]);
        r.seed = std::stoull(f[7]);
        r.point = f[8];
        r.quantity = f[9];
        r.error = f[10];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_outputs(const std::string& dir, const std::string& stem,
                   const std::vector<ResultRow>& rows, const nlohmann::json& metadata) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    const fs::path base = fs::path(dir) / stem;
    {
        std::ofstream csv(base.string() + ".csv", std::ios::binary);
        if (!csv) throw IoError("cannot write " + base.string() + ".csv");
        write_csv(csv, rows);
        if (!csv) throw IoError("write failed for " + base.string() + ".csv");
    }
    std::ofstream meta(base.string() + ".meta.json", std::ios::binary);
    if (!meta) throw IoError("cannot write " + base.string() + ".meta.json");
    meta << metadata.dump(2) << '\n';
    if (!meta) throw IoError("write failed for " + base.string() + ".meta.json");
}

}  // namespace shrinkage::harness
