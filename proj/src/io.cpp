#include "twowell/io.hpp"

#include "twowell/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace twowell {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size())
        throw StructuralError("CsvTable: row width does not match header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::ostringstream ss;
    for (size_t k = 0; k < header_.size(); ++k) ss << (k ? "," : "") << header_[k];
    ss << "\n";
    for (const auto& row : rows_) {
        for (size_t k = 0; k < row.size(); ++k) ss << (k ? "," : "") << row[k];
        ss << "\n";
    }
    return ss.str();
}

namespace {

std::vector<std::string> meta_cells(const RunMeta& m) {
    return {std::to_string(m.n), fmt_g17(m.a), fmt_g17(m.lambda), std::to_string(m.seed),
            m.fixture_version.empty() ? "-" : m.fixture_version};
}

const std::vector<std::string> kMetaHeader = {"n", "a", "lambda", "seed", "fixture"};

std::vector<std::string> with_meta_header(std::vector<std::string> cols) {
    std::vector<std::string> h = kMetaHeader;
    h.insert(h.end(), cols.begin(), cols.end());
    return h;
}

} // namespace

std::string energy_report_csv(const EnergyReport& rep, const LatticeDomain& dom,
                              const RunMeta& meta) {
    CsvTable t(with_meta_header({"i", "j", "h_site", "dist_wells", "bracket_u0", "bracket_u1"}));
    for (int32_t id = 0; id < dom.num_nodes(); ++id) {
        auto row = meta_cells(meta);
        Eigen::Vector2i ij = dom.coord(id);
        row.push_back(std::to_string(ij.x()));
        row.push_back(std::to_string(ij.y()));
        row.push_back(fmt_g17(rep.site_density[size_t(id)]));
        row.push_back(fmt_g17(rep.dist_wells[size_t(id)]));
        row.push_back(fmt_g17(rep.bracket0[size_t(id)]));
        row.push_back(fmt_g17(rep.bracket1[size_t(id)]));
        t.add_row(std::move(row));
    }
    return t.str();
}

json energy_report_summary(const EnergyReport& rep, const RunMeta& meta) {
    return json{{"total", rep.total},   {"rescaled", rep.rescaled}, {"n", rep.n},
                {"a", meta.a},          {"lambda", meta.lambda},    {"seed", meta.seed},
                {"fixture", meta.fixture_version}};
}

std::string spin_field_csv(const SpinField& sf, const RunMeta& meta) {
    CsvTable t(with_meta_header({"i", "j", "sigma"}));
    const LatticeDomain& dom = *sf.domain;
    for (int32_t id = 0; id < dom.num_nodes(); ++id) {
        auto row = meta_cells(meta);
        Eigen::Vector2i ij = dom.coord(id);
        row.push_back(std::to_string(ij.x()));
        row.push_back(std::to_string(ij.y()));
        row.push_back(std::to_string(int(sf.sigma[size_t(id)])));
        t.add_row(std::move(row));
    }
    return t.str();
}

json spin_field_summary(const SpinField& sf, const RunMeta& meta) {
    return json{{"h_spin", sf.h_spin},
                {"mismatch_count", sf.mismatch_edges.size()},
                {"n", meta.n},
                {"a", meta.a},
                {"lambda", meta.lambda},
                {"seed", meta.seed},
                {"fixture", meta.fixture_version}};
}

void Manifest::emit(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + name;
    write_text_file(path, content);
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", (unsigned long long)fnv1a64(content));
    artifacts_.push_back(json{{"path", name}, {"bytes", content.size()}, {"fnv1a64", hash}});
}

void Manifest::write(const std::string& dir) const {
    json m{{"command", command_}, {"config", config_}, {"artifacts", artifacts_}};
    write_text_file(dir + "/manifest.json", m.dump(2) + "\n");
}

} // namespace twowell
