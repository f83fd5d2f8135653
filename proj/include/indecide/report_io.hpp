#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "indecide/calibration.hpp"

namespace indecide {

/// Flat `key = value` document. '#' starts a comment line; order is preserved.
class KeyValueDoc {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);

    bool has(const std::string& key) const;
    /// Throws SchemaError naming the key when missing.
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    void write(std::ostream& out, const std::string& title) const;
    static KeyValueDoc read(std::istream& in);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::size_t> lines_;
};

constexpr int kDocumentVersion = 1;

KeyValueDoc rule_document(const Rule& rule);
/// Throws SchemaError on an unknown kind, missing keys or a version mismatch.
Rule rule_from_document(const KeyValueDoc& doc);

KeyValueDoc report_document(const CalibrationReport& report);

void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace indecide
