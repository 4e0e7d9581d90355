#include "viewagg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace viewagg {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_score(const std::string& text, std::size_t row, std::size_t col) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorKind::UnparsableScore,
                    "unparsable score '" + text + "' at row " + std::to_string(row) +
                        ", column " + std::to_string(col));
    }
    return value;
}

void check_unique_class_names(const std::vector<std::string>& names) {
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) {
            throw Error(ErrorKind::MalformedHeader, "empty class name in header");
        }
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::MalformedHeader, "duplicate class name '" + name + "'");
        }
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for reading");
    }
    return in;
}

}  // namespace

std::string format_score(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::pair<std::vector<std::string>, std::vector<PredictionRecord>>
read_predictions(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::MalformedHeader, "'" + path + "' is empty");
    }
    strip_cr(line);
    auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "image_id" || header[1] != "study_id" ||
        header[2] != "view") {
        throw Error(ErrorKind::MalformedHeader,
                    "'" + path + "': expected header image_id,study_id,view,<classes...>");
    }
    std::vector<std::string> class_names(header.begin() + 3, header.end());
    check_unique_class_names(class_names);
    const std::size_t k = class_names.size();

    std::vector<PredictionRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3 + k) {
            throw Error(ErrorKind::RowArity,
                        "row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " columns, expected " +
                            std::to_string(3 + k));
        }
        PredictionRecord rec;
        rec.image_id = fields[0];
        rec.study_id = fields[1];
        rec.view = parse_view(fields[2]);
        rec.scores.reserve(k);
        for (std::size_t c = 0; c < k; ++c) {
            rec.scores.push_back(parse_score(fields[3 + c], row, 4 + c));
        }
        records.push_back(std::move(rec));
    }
    return {std::move(class_names), std::move(records)};
}

LabelTable read_labels(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::MalformedHeader, "'" + path + "' is empty");
    }
    strip_cr(line);
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "study_id") {
        throw Error(ErrorKind::MalformedHeader,
                    "'" + path + "': expected header study_id,<classes...>");
    }
    LabelTable table;
    table.class_names.assign(header.begin() + 1, header.end());
    check_unique_class_names(table.class_names);
    const std::size_t k = table.class_names.size();

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 1 + k) {
            throw Error(ErrorKind::RowArity,
                        "row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " columns, expected " +
                            std::to_string(1 + k));
        }
        std::vector<std::uint8_t> values(k);
        for (std::size_t c = 0; c < k; ++c) {
            const std::string& cell = fields[1 + c];
            if (cell == "0") {
                values[c] = 0;
            } else if (cell == "1") {
                values[c] = 1;
            } else {
                throw Error(ErrorKind::NonBinaryLabel,
                            "label '" + cell + "' at row " + std::to_string(row) +
                                " is not 0 or 1");
            }
        }
        if (!table.rows.emplace(fields[0], std::move(values)).second) {
            throw Error(ErrorKind::DuplicateStudyId,
                        "duplicate study_id '" + fields[0] + "' at row " + std::to_string(row));
        }
    }
    return table;
}

std::vector<StudyGroup> group_by_study(const std::vector<PredictionRecord>& records) {
    std::map<std::string, StudyGroup> by_study;  // ordered: output sorted by study_id
    for (const auto& rec : records) {
        auto& group = by_study[rec.study_id];
        group.study_id = rec.study_id;
        (rec.view == ViewKind::Frontal ? group.frontal : group.lateral).push_back(rec);
    }
    std::vector<StudyGroup> groups;
    groups.reserve(by_study.size());
    for (auto& [_, group] : by_study) {
        groups.push_back(std::move(group));
    }
    return groups;
}

void write_study_predictions(const std::string& path,
                             const std::vector<std::string>& class_names,
                             const std::vector<StudyPrediction>& rows) {
    for (const auto& row : rows) {
        if (row.p_final.size() != class_names.size()) {
            throw Error(ErrorKind::ClassCountMismatch,
                        "study '" + row.study_id + "' has " +
                            std::to_string(row.p_final.size()) + " scores, expected " +
                            std::to_string(class_names.size()));
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
    }
    out << "study_id";
    for (const auto& name : class_names) out << ',' << name;
    out << '\n';
    for (const auto& row : rows) {
        out << row.study_id;
        for (double s : row.p_final) out << ',' << format_score(s);
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorKind::IoFailure, "write to '" + path + "' failed");
    }
}

void write_predictions(const std::string& path,
                       const std::vector<std::string>& class_names,
                       const std::vector<PredictionRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
    }
    out << "image_id,study_id,view";
    for (const auto& name : class_names) out << ',' << name;
    out << '\n';
    for (const auto& rec : records) {
        out << rec.image_id << ',' << rec.study_id << ',' << view_name(rec.view);
        for (double s : rec.scores) out << ',' << format_score(s);
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorKind::IoFailure, "write to '" + path + "' failed");
    }
}

std::pair<std::vector<std::string>, std::vector<StudyPrediction>>
read_study_predictions(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::MalformedHeader, "'" + path + "' is empty");
    }
    strip_cr(line);
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "study_id") {
        throw Error(ErrorKind::MalformedHeader,
                    "'" + path + "': expected header study_id,<classes...>");
    }
    std::vector<std::string> class_names(header.begin() + 1, header.end());
    check_unique_class_names(class_names);
    const std::size_t k = class_names.size();

    std::vector<StudyPrediction> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 1 + k) {
            throw Error(ErrorKind::RowArity,
                        "row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " columns, expected " +
                            std::to_string(1 + k));
        }
        StudyPrediction pred;
        pred.study_id = fields[0];
        pred.p_final.reserve(k);
        for (std::size_t c = 0; c < k; ++c) {
            pred.p_final.push_back(parse_score(fields[1 + c], row, 2 + c));
        }
        rows.push_back(std::move(pred));
    }
    return {std::move(class_names), std::move(rows)};
}

}  // namespace viewagg
