#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "awlm/types.hpp"

namespace awlm::io {

/// One exposure regime in the interchange schema. Exactly one of `counts`
/// and `probabilities` may be present.
struct RegimeRecord {
    std::map<std::string, double> exposure;
    std::optional<std::map<std::string, std::int64_t>> counts;
    std::optional<std::int64_t> n;
    std::optional<std::map<std::string, double>> probabilities;
};

/// The JSON dataset schema (schema_version 1):
/// {
///   "schema_version": 1,
///   "universe": ["a", ...],
///   "menu": {"feasible": [...], "influencer": [...]},
///   "regimes": [{"exposure": {...}, "counts": {...}, "n": 60}, ...]
/// }
struct DatasetFile {
    int schema_version = 1;
    std::vector<std::string> universe;
    std::vector<std::string> feasible;
    std::vector<std::string> influencer;
    std::vector<RegimeRecord> regimes;
};

DatasetFile parse_dataset(const std::string& json_text);
std::string serialize_dataset(const DatasetFile& dataset, int indent = 2);
DatasetFile load_dataset_file(const std::string& path);
void save_dataset_file(const DatasetFile& dataset, const std::string& path);

/// Schema invariants: label containment, exposure normalization (1e-9),
/// counts/probabilities exclusivity, count totals.
void validate_dataset(const DatasetFile& dataset);

/// Same checks for a design file: regimes carry exposures (and optionally n)
/// but no observations yet.
void validate_design(const DatasetFile& dataset);

/// Merges counts from CSV into a dataset (counts-only side channel; all other
/// fields stay JSON). Format: a header of feasible labels, then one row of
/// nonnegative integers per regime, in regime order.
void apply_counts_csv(DatasetFile& dataset, const std::string& csv_text);

/// A regime bound to library types. Vectors are aligned with the feasible
/// set's canonical order.
struct BoundRegime {
    Dist exposure;
    std::optional<std::vector<std::int64_t>> counts;
    std::optional<std::vector<double>> probabilities;
    std::optional<std::int64_t> n;

    std::vector<double> shares() const;
    std::int64_t effective_n() const;
};

struct BoundDataset {
    Universe universe;
    MenuPair menu;
    std::vector<BoundRegime> regimes;
};

/// Validates and converts the schema representation into library types.
BoundDataset bind_dataset(const DatasetFile& dataset);

/// bind_dataset for design files (observations optional).
BoundDataset bind_design(const DatasetFile& dataset);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace awlm::io
