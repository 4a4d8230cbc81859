#include "lifeline/csvio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lifeline/errors.hpp"

namespace lifeline {
namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

double parse_cell(const std::string& cell, int line_no) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw DomainError("csv: line " + std::to_string(line_no) + ": '" + cell +
                          "' is not a number");
    return v;
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_to_string(const CsvTable& table) {
    if (table.headers.size() != table.columns.size())
        throw DomainError("csv: " + std::to_string(table.headers.size()) + " headers but " +
                          std::to_string(table.columns.size()) + " columns");
    if (table.headers.empty()) throw DomainError("csv: table has no columns");
    const std::size_t n = table.columns.front().size();
    for (std::size_t c = 1; c < table.columns.size(); ++c)
        if (table.columns[c].size() != n)
            throw DomainError("csv: column '" + table.headers[c] + "' has " +
                              std::to_string(table.columns[c].size()) + " rows, expected " +
                              std::to_string(n));
    std::string out;
    for (const auto& c : table.comments) out += "# " + c + "\n";
    for (std::size_t c = 0; c < table.headers.size(); ++c) {
        if (table.headers[c].find_first_of(",\n#") != std::string::npos)
            throw DomainError("csv: header '" + table.headers[c] + "' contains a delimiter");
        out += (c ? "," : "") + table.headers[c];
    }
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += ',';
            out += format_double(table.columns[c][i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv_atomic(const std::string& path, const CsvTable& table) {
    const std::string body = csv_to_string(table);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("csv: cannot open '" + tmp + "' for writing");
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        out.flush();
        if (!out) throw DomainError("csv: short write to '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DomainError("csv: cannot move '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (have_header)
                throw DomainError("csv: line " + std::to_string(line_no) +
                                  ": comments must precede the header");
            std::size_t start = line.find_first_not_of(" \t", 1);
            table.comments.push_back(start == std::string::npos ? "" : line.substr(start));
            continue;
        }
        std::vector<std::string> cells = split_commas(line);
        if (!have_header) {
            table.headers = std::move(cells);
            table.columns.assign(table.headers.size(), {});
            have_header = true;
            continue;
        }
        if (cells.size() != table.headers.size())
            throw DomainError("csv: line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(table.headers.size()));
        for (std::size_t c = 0; c < cells.size(); ++c)
            table.columns[c].push_back(parse_cell(cells[c], line_no));
    }
    if (!have_header) throw DomainError("csv: no header row found");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("csv: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

void write_batch_csv(const std::string& path, const SampleBatch& batch) {
    if (batch.rows.empty()) throw DomainError("csv: refusing to write an empty sample batch");
    CsvTable table;
    table.comments.push_back("seed=" + std::to_string(batch.seed));
    table.comments.push_back("ties_resampled=" + std::to_string(batch.ties_resampled));
    if (!batch.model_fingerprint.empty())
        table.comments.push_back("model=" + batch.model_fingerprint);
    table.headers.reserve(batch.r);
    table.columns.assign(batch.r, {});
    for (int j = 0; j < batch.r; ++j) {
        table.headers.push_back("unit" + std::to_string(j + 1));
        table.columns[j].reserve(batch.rows.size());
    }
    for (const auto& row : batch.rows)
        for (int j = 0; j < batch.r; ++j) table.columns[j].push_back(row[j]);
    write_csv_atomic(path, table);
}

SampleBatch read_batch_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    SampleBatch batch;
    batch.r = static_cast<int>(table.headers.size());
    for (int j = 0; j < batch.r; ++j) {
        const std::string expect = "unit" + std::to_string(j + 1);
        if (table.headers[j] != expect)
            throw DomainError("csv: '" + path + "' is not a sample batch: column " +
                              std::to_string(j + 1) + " is '" + table.headers[j] +
                              "', expected '" + expect + "'");
    }
    for (const auto& c : table.comments) {
        std::size_t eq = c.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = c.substr(0, eq), value = c.substr(eq + 1);
        try {
            if (key == "seed") batch.seed = std::stoull(value);
            if (key == "ties_resampled") batch.ties_resampled = std::stoll(value);
        } catch (const std::exception&) {
            throw DomainError("csv: malformed metadata line '# " + c + "' in '" + path + "'");
        }
        if (key == "model") batch.model_fingerprint = value;
    }
    const int n = table.rows();
    batch.rows.assign(n, std::vector<double>(batch.r, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < batch.r; ++j) batch.rows[i][j] = table.columns[j][i];
    return batch;
}

} // namespace lifeline
