#include "awlm/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace awlm::io {

using nlohmann::json;

namespace {

constexpr double kExposureTol = 1e-9;

json map_to_json(const std::map<std::string, double>& m) {
    json out = json::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
}

json map_to_json(const std::map<std::string, std::int64_t>& m) {
    json out = json::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
}

} // namespace

DatasetFile parse_dataset(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("dataset is not valid JSON: ") + e.what());
    }
    try {
        DatasetFile out;
        if (!j.contains("schema_version")) {
            throw ValidationError("dataset is missing schema_version");
        }
        out.schema_version = j.at("schema_version").get<int>();
        if (out.schema_version != 1) {
            throw ValidationError("unsupported dataset schema_version");
        }
        out.universe = j.at("universe").get<std::vector<std::string>>();
        out.feasible = j.at("menu").at("feasible").get<std::vector<std::string>>();
        out.influencer = j.at("menu").at("influencer").get<std::vector<std::string>>();
        for (const auto& r : j.at("regimes")) {
            RegimeRecord rec;
            rec.exposure = r.at("exposure").get<std::map<std::string, double>>();
            if (r.contains("counts")) {
                rec.counts = r.at("counts").get<std::map<std::string, std::int64_t>>();
            }
            if (r.contains("probabilities")) {
                rec.probabilities = r.at("probabilities").get<std::map<std::string, double>>();
            }
            if (r.contains("n")) rec.n = r.at("n").get<std::int64_t>();
            out.regimes.push_back(std::move(rec));
        }
        return out;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("dataset schema error: ") + e.what());
    }
}

std::string serialize_dataset(const DatasetFile& dataset, int indent) {
    json j;
    j["schema_version"] = dataset.schema_version;
    j["universe"] = dataset.universe;
    j["menu"] = {{"feasible", dataset.feasible}, {"influencer", dataset.influencer}};
    j["regimes"] = json::array();
    for (const auto& r : dataset.regimes) {
        json jr;
        jr["exposure"] = map_to_json(r.exposure);
        if (r.counts) jr["counts"] = map_to_json(*r.counts);
        if (r.probabilities) jr["probabilities"] = map_to_json(*r.probabilities);
        if (r.n) jr["n"] = *r.n;
        j["regimes"].push_back(std::move(jr));
    }
    return j.dump(indent);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << text;
}

DatasetFile load_dataset_file(const std::string& path) {
    return parse_dataset(read_text_file(path));
}

void save_dataset_file(const DatasetFile& dataset, const std::string& path) {
    write_text_file(path, serialize_dataset(dataset) + "\n");
}

namespace {

void validate_impl(const DatasetFile& dataset, bool require_observations) {
    const Universe universe(dataset.universe);
    const MenuPair menu(universe, dataset.feasible, dataset.influencer);
    (void)menu;
    if (dataset.regimes.empty()) {
        throw ValidationError("dataset has no regimes");
    }
    for (size_t i = 0; i < dataset.regimes.size(); ++i) {
        const auto& r = dataset.regimes[i];
        const std::string where = "regime " + std::to_string(i);
        double total = 0.0;
        for (const auto& [label, mass] : r.exposure) {
            universe.index_of(label);
            if (!(mass >= 0.0) || !std::isfinite(mass)) {
                throw ValidationError(where + ": exposure masses must be finite and nonnegative");
            }
            total += mass;
        }
        if (std::abs(total - 1.0) > kExposureTol) {
            throw ValidationError(where + ": exposure masses must sum to 1 within 1e-9");
        }
        if (require_observations) {
            if (r.counts.has_value() == r.probabilities.has_value()) {
                throw ValidationError(where + ": exactly one of counts or probabilities is required");
            }
        } else if (r.counts && r.probabilities) {
            throw ValidationError(where + ": counts and probabilities are exclusive");
        }
        if (r.counts) {
            std::int64_t count_total = 0;
            for (const auto& [label, c] : *r.counts) {
                if (std::find(dataset.feasible.begin(), dataset.feasible.end(), label) ==
                    dataset.feasible.end()) {
                    throw ValidationError(where + ": counts on label outside the feasible set: " + label);
                }
                if (c < 0) throw ValidationError(where + ": counts must be nonnegative");
                count_total += c;
            }
            if (count_total < 1) throw ValidationError(where + ": counts must total at least 1");
            if (r.n && *r.n != count_total) {
                throw ValidationError(where + ": n disagrees with the count total");
            }
        }
        if (r.probabilities) {
            double p_total = 0.0;
            for (const auto& [label, p] : *r.probabilities) {
                if (std::find(dataset.feasible.begin(), dataset.feasible.end(), label) ==
                    dataset.feasible.end()) {
                    throw ValidationError(where + ": probabilities on label outside the feasible set: " +
                                          label);
                }
                if (!(p >= 0.0) || !std::isfinite(p)) {
                    throw ValidationError(where + ": probabilities must be finite and nonnegative");
                }
                p_total += p;
            }
            if (std::abs(p_total - 1.0) > kExposureTol) {
                throw ValidationError(where + ": probabilities must sum to 1 within 1e-9");
            }
        }
    }
}

} // namespace

void validate_dataset(const DatasetFile& dataset) { validate_impl(dataset, true); }

void validate_design(const DatasetFile& dataset) { validate_impl(dataset, false); }

void apply_counts_csv(DatasetFile& dataset, const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<std::int64_t>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string field;
        if (first) {
            while (std::getline(fields, field, ',')) header.push_back(field);
            first = false;
            continue;
        }
        std::vector<std::int64_t> row;
        while (std::getline(fields, field, ',')) {
            try {
                row.push_back(std::stoll(field));
            } catch (const std::exception&) {
                throw ValidationError("counts CSV: non-integer cell: " + field);
            }
        }
        if (row.size() != header.size()) {
            throw ValidationError("counts CSV: row width does not match the header");
        }
        rows.push_back(std::move(row));
    }
    if (header.empty()) throw ValidationError("counts CSV: missing header");
    if (rows.size() != dataset.regimes.size()) {
        throw ValidationError("counts CSV: row count must match the dataset regimes");
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        std::map<std::string, std::int64_t> counts;
        for (size_t c = 0; c < header.size(); ++c) counts[header[c]] = rows[i][c];
        dataset.regimes[i].counts = std::move(counts);
        dataset.regimes[i].probabilities.reset();
        dataset.regimes[i].n.reset();
    }
}

std::vector<double> BoundRegime::shares() const {
    if (probabilities) return *probabilities;
    std::vector<double> out(counts->size());
    const double total = static_cast<double>(effective_n());
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<double>((*counts)[i]) / total;
    }
    return out;
}

std::int64_t BoundRegime::effective_n() const {
    if (n) return *n;
    if (counts) {
        std::int64_t total = 0;
        for (auto c : *counts) total += c;
        return total;
    }
    return 1;
}

namespace {

BoundDataset bind_impl(const DatasetFile& dataset) {
    Universe universe(dataset.universe);
    MenuPair menu(universe, dataset.feasible, dataset.influencer);
    const IndexSet& S = menu.feasible();

    std::vector<BoundRegime> regimes;
    for (const auto& r : dataset.regimes) {
        IndexSet support;
        std::vector<double> mass;
        std::vector<std::pair<int, double>> entries;
        double total = 0.0;
        for (const auto& [label, value] : r.exposure) {
            entries.emplace_back(universe.index_of(label), value);
            total += value;
        }
        std::sort(entries.begin(), entries.end());
        for (const auto& [idx, value] : entries) {
            support.push_back(idx);
            mass.push_back(value / total); // renormalize 1e-9 slack away
        }
        Dist exposure(std::move(support), std::move(mass));

        BoundRegime bound{std::move(exposure), std::nullopt, std::nullopt, r.n};
        if (r.counts) {
            std::vector<std::int64_t> counts(S.size(), 0);
            for (const auto& [label, c] : *r.counts) {
                const int idx = universe.index_of(label);
                const auto it = std::lower_bound(S.begin(), S.end(), idx);
                counts[static_cast<size_t>(it - S.begin())] = c;
            }
            bound.counts = std::move(counts);
        }
        if (r.probabilities) {
            std::vector<double> probs(S.size(), 0.0);
            double p_total = 0.0;
            for (const auto& [label, p] : *r.probabilities) {
                const int idx = universe.index_of(label);
                const auto it = std::lower_bound(S.begin(), S.end(), idx);
                probs[static_cast<size_t>(it - S.begin())] = p;
                p_total += p;
            }
            for (double& p : probs) p /= p_total;
            bound.probabilities = std::move(probs);
        }
        regimes.push_back(std::move(bound));
    }
    return BoundDataset{std::move(universe), std::move(menu), std::move(regimes)};
}

} // namespace

BoundDataset bind_dataset(const DatasetFile& dataset) {
    validate_dataset(dataset);
    return bind_impl(dataset);
}

BoundDataset bind_design(const DatasetFile& dataset) {
    validate_design(dataset);
    return bind_impl(dataset);
}

} // namespace awlm::io
