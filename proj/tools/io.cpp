#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace twomix::cli {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delim)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == delim) {
        out.emplace_back();
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_value(const std::string& text, std::size_t line_no) {
    const auto t = trim(text);
    if (t == "inf" || t == "Inf" || t == "nan" || t == "NaN" || t == "-inf") {
        return t == "-inf" ? -INFINITY : (t[0] == 'n' || t[0] == 'N' ? NAN : INFINITY);
    }
    double v = 0;
    const auto* begin = t.data();
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (t.empty() || ec != std::errc() || ptr != end) {
        throw InputError("ParseError", "line " + std::to_string(line_no) + ": cannot parse '" + t + "' as a number");
    }
    return v;
}

} // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("IoError", "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExpressionMatrix read_expression_table(const std::filesystem::path& path, AxisKind axis) {
    std::istringstream in(read_text(path));
    std::string line;
    std::size_t line_no = 0;

    std::string header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = line;
            break;
        }
    }
    if (header.empty()) {
        throw InputError("ParseError", "'" + path.string() + "' is empty");
    }

    const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
    const auto columns = split(header, delim);
    if (columns.size() != 3) {
        throw InputError("ParseError", "header must have 3 columns (gene_id, sample1, sample2), found " +
                                           std::to_string(columns.size()));
    }

    std::vector<std::string> ids;
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split(line, delim);
        if (fields.size() != 3) {
            throw InputError("ParseError", "line " + std::to_string(line_no) + ": expected 3 fields, found " +
                                               std::to_string(fields.size()));
        }
        ids.push_back(trim(fields[0]));
        rows.push_back({parse_value(fields[1], line_no), parse_value(fields[2], line_no)});
    }
    if (rows.empty()) {
        throw InputError("ParseError", "'" + path.string() + "' has no data rows");
    }
    return ExpressionMatrix::create(std::move(ids), std::move(rows), axis);
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_table(const std::vector<std::string>& ids, const std::vector<Row>& rows,
                         const std::string& col1, const std::string& col2) {
    std::string out = "gene_id\t" + col1 + "\t" + col2 + "\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += ids[i];
        out += '\t';
        out += format_double(rows[i][0]);
        out += '\t';
        out += format_double(rows[i][1]);
        out += '\n';
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("IoError", "cannot write '" + tmp.string() + "'");
        }
        out << contents;
        if (!out) {
            throw InputError("IoError", "failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw InputError("IoError", "cannot rename into '" + path.string() + "': " + ec.message());
    }
}

nlohmann::json read_json(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("ParseError", "'" + path.string() + "': " + e.what());
    }
}

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

double json_to_double(const nlohmann::json& j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return INFINITY;
        }
        if (s == "-inf") {
            return -INFINITY;
        }
        if (s == "nan") {
            return NAN;
        }
    }
    throw InputError("ParseError", "expected a number, found " + j.dump());
}

nlohmann::json mixing_to_json(const MixingMatrix& a) {
    return nlohmann::json::array({{a(0, 0), a(0, 1)}, {a(1, 0), a(1, 1)}});
}

MixingMatrix mixing_from_json(const nlohmann::json& j, MixingForm form) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() || j[1].size() != 2) {
        throw InputError("ParseError", "mixing matrix must be a 2x2 array");
    }
    MixingMatrix::Entries m{};
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            m[r][c] = json_to_double(j[r][c]);
        }
    }
    return MixingMatrix::create(m, form);
}

} // namespace twomix::cli
