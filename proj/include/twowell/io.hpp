#ifndef TWOWELL_IO_HPP
#define TWOWELL_IO_HPP

#include "twowell/hamiltonian.hpp"
#include "twowell/spin.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace twowell {

using json = nlohmann::json;

std::string fmt_g17(double v);

uint64_t fnv1a64(const std::string& bytes);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Deterministic CSV table; all doubles rendered with %.17g.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> row);
    std::string str() const;

    static std::string cell(double v) { return fmt_g17(v); }
    static std::string cell(int64_t v) { return std::to_string(v); }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct RunMeta {
    int n = 0;
    double a = 0.0;
    double lambda = 0.0;
    uint64_t seed = 0;
    std::string fixture_version; // empty when no fixtures involved
};

// Per-site energy CSV: metadata columns followed by
// (i, j, h_site, dist_wells, bracket_u0, bracket_u1).
std::string energy_report_csv(const EnergyReport& rep, const LatticeDomain& dom,
                              const RunMeta& meta);
json energy_report_summary(const EnergyReport& rep, const RunMeta& meta);

// Spin CSV (i, j, sigma) and summary JSON.
std::string spin_field_csv(const SpinField& sf, const RunMeta& meta);
json spin_field_summary(const SpinField& sf, const RunMeta& meta);

// Records every artifact of a run with content hashes.
class Manifest {
  public:
    Manifest(std::string command, json config_echo)
        : command_(std::move(command)), config_(std::move(config_echo)) {}

    // Writes content under dir/name and records it.
    void emit(const std::string& dir, const std::string& name, const std::string& content);
    void write(const std::string& dir) const; // dir/manifest.json

  private:
    std::string command_;
    json config_;
    json artifacts_ = json::array();
};

} // namespace twowell

#endif
