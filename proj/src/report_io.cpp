#include "indecide/report_io.hpp"

#include <istream>
#include <ostream>
#include <type_traits>
#include <variant>

#include "indecide/csv.hpp"
#include "indecide/errors.hpp"

namespace indecide {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void check_version(const KeyValueDoc& doc) {
    const std::string& v = doc.get("format_version");
    if (v != std::to_string(kDocumentVersion)) throw SchemaError("unsupported document version " + v);
}

}  // namespace

void KeyValueDoc::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
    lines_.push_back(0);
}

void KeyValueDoc::set(const std::string& key, double value) { set(key, format_double(value)); }

bool KeyValueDoc::has(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.first == key) return true;
    return false;
}

const std::string& KeyValueDoc::get(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.first == key) return e.second;
    throw SchemaError("missing key '" + key + "'");
}

double KeyValueDoc::get_double(const std::string& key) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].first == key) return parse_double(entries_[i].second, lines_[i]);
    throw SchemaError("missing key '" + key + "'");
}

void KeyValueDoc::write(std::ostream& out, const std::string& title) const {
    out << "# " << title << '\n';
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

KeyValueDoc KeyValueDoc::read(std::istream& in) {
    KeyValueDoc doc;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw SchemaError("expected 'key = value'", line_no);
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw SchemaError("empty key", line_no);
        if (doc.has(key)) throw SchemaError("duplicate key '" + key + "'", line_no);
        doc.entries_.emplace_back(key, trim(t.substr(eq + 1)));
        doc.lines_.push_back(line_no);
    }
    return doc;
}

KeyValueDoc rule_document(const Rule& rule) {
    KeyValueDoc d;
    d.set("format_version", std::to_string(kDocumentVersion));
    d.set("kind", rule_kind(rule));
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, SelectiveBinaryRule> || std::is_same_v<T, MlrAccuracyRule>) {
                d.set("tau", r.tau);
            } else if constexpr (std::is_same_v<T, MulticlassRule>) {
                d.set("threshold", r.threshold);
            } else {
                d.set("tau1", r.tau1);
                d.set("tau2", r.tau2);
            }
        },
        rule);
    return d;
}

Rule rule_from_document(const KeyValueDoc& doc) {
    check_version(doc);
    const std::string& kind = doc.get("kind");
    if (kind == "accuracy") return SelectiveBinaryRule{doc.get_double("tau")};
    if (kind == "np" || kind == "mlr-np") {
        const double t1 = doc.get_double("tau1"), t2 = doc.get_double("tau2");
        if (kind == "np" && t1 > t2) throw SchemaError("np rule needs tau1 <= tau2");
        if (kind == "mlr-np" && t2 > t1) throw SchemaError("mlr-np rule needs tau2 <= tau1");
        if (kind == "np") return NpRule{t1, t2};
        return MlrNpRule{t1, t2};
    }
    if (kind == "multiclass") return MulticlassRule{doc.get_double("threshold")};
    if (kind == "mlr-accuracy") return MlrAccuracyRule{doc.get_double("tau")};
    throw SchemaError("unknown rule kind '" + kind + "'");
}

KeyValueDoc report_document(const CalibrationReport& report) {
    KeyValueDoc d;
    d.set("format_version", std::to_string(kDocumentVersion));
    d.set("mode", report.mode);
    d.set("feasible", report.feasible ? "true" : "false");
    d.set("gamma_hat", report.gamma_hat);
    const KeyValueDoc rule = rule_document(report.rule);
    for (const auto& [k, v] : rule.entries())
        if (k != "format_version") d.set("rule." + k, v);
    for (const auto& [k, v] : report.achieved) d.set("achieved." + k, v);
    d.set("trace_rows", std::to_string(report.trace.rows.size()));
    return d;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    write_csv_row(out, trace.columns);
    std::vector<std::string> fields;
    for (const auto& row : trace.rows) {
        fields.clear();
        for (double v : row) fields.push_back(format_double(v));
        write_csv_row(out, fields);
    }
}

}  // namespace indecide
