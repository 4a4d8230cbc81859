#pragma once

#include <string>
#include <vector>

#include "lifeline/montecarlo.hpp"

namespace lifeline {

// Column-oriented numeric CSV.  Leading lines starting with '#' carry
// key=value metadata; then one header row, then the data.  Numbers are
// written with 17 significant digits, so write -> read roundtrips are exact
// for doubles and equal inputs produce byte-identical files.
struct CsvTable {
    std::vector<std::string> comments;         // without the leading "# "
    std::vector<std::string> headers;          // one per column
    std::vector<std::vector<double>> columns;  // parallel to headers, equal lengths

    int rows() const { return columns.empty() ? 0 : static_cast<int>(columns.front().size()); }
};

// 17-significant-digit rendering used for every CSV cell.
std::string format_double(double x);

// Serialize; the inverse of read_csv.
std::string csv_to_string(const CsvTable& table);

// Write via a temporary file in the same directory plus an atomic rename,
// so readers never observe a half-written file.
void write_csv_atomic(const std::string& path, const CsvTable& table);

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// Sample batches on disk: columns unit1..unitr, one row per replication,
// with seed / ties_resampled / model fingerprint in the comment lines.
void write_batch_csv(const std::string& path, const SampleBatch& batch);
SampleBatch read_batch_csv(const std::string& path);

} // namespace lifeline
