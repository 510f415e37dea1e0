#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "omtnet/types.hpp"

namespace omtnet {

/// CSV emitter with a provenance comment header: the config hash and the
/// unit convention, so outputs are traceable and bit-identical across runs.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, std::uint64_t config_hash, double reference_hz,
              const std::vector<std::string>& columns)
        : out_(path), columns_(columns.size()) {
        if (!out_) throw ConfigError("csv: cannot open " + path + " for writing");
        char head[160];
        std::snprintf(head, sizeof(head), "# config_hash=%016llx",
                      static_cast<unsigned long long>(config_hash));
        out_ << head << "\n";
        std::snprintf(head, sizeof(head),
                      "# units: angular frequencies, reference value/2pi = %.9g Hz = 1",
                      reference_hz);
        out_ << head << "\n";
        for (size_t k = 0; k < columns.size(); ++k)
            out_ << columns[k] << (k + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw ConfigError("csv: column count mismatch");
        char buf[40];
        for (size_t k = 0; k < values.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.12g", values[k]);
            out_ << buf << (k + 1 < values.size() ? "," : "\n");
        }
    }

    /// Row with optional entries; missing values print empty fields.
    void row_optional(const std::vector<std::pair<bool, double>>& values) {
        if (values.size() != columns_) throw ConfigError("csv: column count mismatch");
        char buf[40];
        for (size_t k = 0; k < values.size(); ++k) {
            if (values[k].first) {
                std::snprintf(buf, sizeof(buf), "%.12g", values[k].second);
                out_ << buf;
            }
            out_ << (k + 1 < values.size() ? "," : "\n");
        }
    }

  private:
    std::ofstream out_;
    size_t columns_;
};

}  // namespace omtnet
