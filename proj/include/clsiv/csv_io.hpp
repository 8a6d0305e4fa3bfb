#pragma once

#include <string>
#include <vector>

#include "clsiv/data_model.hpp"

namespace clsiv {

/// Names the roles of CSV columns for ingestion.
struct ColumnSpec {
    std::string response;
    std::vector<std::string> endogenous;
    std::vector<std::string> exogenous;    // may be empty
    std::vector<std::string> instruments;  // outside instruments Z1
    bool intercept = false;
};

/// Loads a comma-separated file (UTF-8, mandatory header row, scientific
/// notation accepted, no quoting) into a PartitionedDataset. Any row with an
/// unparseable cell fails the whole file; the error lists every offending
/// line number. Also fails when a named column is missing or when n <= k or
/// n <= l after the load.
PartitionedDataset load_csv(const std::string& path, const ColumnSpec& spec);

/// Serializes a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

/// Writes a dataset as CSV with the given column names (header row first).
/// Values are emitted with format_double, so a load_csv round trip
/// reproduces the matrices bit for bit.
void write_dataset_csv(const std::string& path, const PartitionedDataset& data,
                       const ColumnSpec& spec);

}  // namespace clsiv
