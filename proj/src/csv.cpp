#include "optidesign/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace optidesign {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        // trim whitespace
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line_no) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        std::ostringstream os;
        os << path.string() << ":" << line_no << ": cannot parse number '" << s << "'";
        throw std::invalid_argument(os.str());
    }
    return v;
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open dataset file '" + path.string() + "'");

    std::string line;
    int line_no = 0;

    // header: x1,...,xm[,y]
    if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty file");
    ++line_no;
    std::vector<std::string> header = split_line(line);
    bool has_y = !header.empty() && header.back() == "y";
    int m = static_cast<int>(header.size()) - (has_y ? 1 : 0);
    if (m < 1)
        throw std::invalid_argument(path.string() + ":1: header must be x1,...,xm[,y]");
    for (int a = 0; a < m; ++a) {
        if (header[a] != "x" + std::to_string(a + 1))
            throw std::invalid_argument(path.string() + ":1: expected column 'x" +
                                        std::to_string(a + 1) + "', got '" + header[a] + "'");
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> fields = split_line(line);
        if (static_cast<int>(fields.size()) != m + (has_y ? 1 : 0)) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": expected " << m + (has_y ? 1 : 0)
               << " fields, got " << fields.size();
            throw std::invalid_argument(os.str());
        }
        std::vector<double> row;
        for (const std::string& f : fields) row.push_back(parse_double(f, path, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument(path.string() + ": no data rows");

    Dataset d;
    d.X.resize(rows.size(), m);
    Vector y(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        for (int a = 0; a < m; ++a) d.X(j, a) = rows[j][a];
        if (has_y) y(j) = rows[j][m];
    }
    if (has_y) d.y = y;
    d.validate();
    return d;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    std::vector<std::string> header;
    for (int a = 0; a < data.m(); ++a) header.push_back("x" + std::to_string(a + 1));
    if (data.has_y()) header.push_back("y");
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < data.n(); ++j) {
        std::vector<double> row;
        for (int a = 0; a < data.m(); ++a) row.push_back(data.X(j, a));
        if (data.has_y()) row.push_back((*data.y)(j));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file '" + path.string() + "'");
    for (std::size_t a = 0; a < header.size(); ++a)
        out << header[a] << (a + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width differs from header");
        for (std::size_t a = 0; a < row.size(); ++a)
            out << format_double(row[a]) << (a + 1 < row.size() ? "," : "\n");
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace optidesign
