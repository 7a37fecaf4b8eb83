#ifndef HCOPT_REPORTS_HPP
#define HCOPT_REPORTS_HPP

#include <string>
#include <vector>

#include "hcopt/linalg.hpp"

namespace hcopt {

// Deterministic formatting: fixed "%.12g" floats, no timestamps, no locale.
// Identical inputs produce byte-identical report bodies.
std::string fmt_g(double v);
std::string fmt_vec(const Vec& v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    std::string to_string() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Report text accumulated line by line.
class TextReport {
public:
    void line(const std::string& s = "");
    void kv(const std::string& key, const std::string& value);
    std::string to_string() const { return body_; }

private:
    std::string body_;
};

void write_file(const std::string& dir, const std::string& name, const std::string& body);

} // namespace hcopt

#endif
