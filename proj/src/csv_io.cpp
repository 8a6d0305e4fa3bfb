#include "clsiv/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace clsiv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_cell(const std::string& cell, double* out) {
    if (cell.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size()) return false;
    *out = v;
    return true;
}

std::vector<int> resolve_columns(const std::vector<std::string>& header,
                                 const std::vector<std::string>& names,
                                 std::vector<std::string>* missing) {
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) index.emplace(header[i], i);
    std::vector<int> cols;
    cols.reserve(names.size());
    for (const auto& name : names) {
        auto it = index.find(name);
        if (it == index.end()) {
            missing->push_back(name);
            cols.push_back(-1);
        } else {
            cols.push_back(it->second);
        }
    }
    return cols;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

PartitionedDataset load_csv(const std::string& path, const ColumnSpec& spec) {
    std::ifstream in(path);
    if (!in) throw csv_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw csv_error("'" + path + "': empty file, header row required");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_line(line);

    std::vector<std::string> missing;
    const auto y_col = resolve_columns(header, {spec.response}, &missing);
    const auto x1_cols = resolve_columns(header, spec.endogenous, &missing);
    const auto x2_cols = resolve_columns(header, spec.exogenous, &missing);
    const auto z1_cols = resolve_columns(header, spec.instruments, &missing);
    if (!missing.empty()) {
        throw csv_error("'" + path + "': missing columns: " + join(missing, ", "));
    }
    if (spec.endogenous.empty()) throw csv_error("'" + path + "': no endogenous columns named");
    if (spec.instruments.empty()) throw csv_error("'" + path + "': no instrument columns named");

    std::vector<std::vector<double>> rows;
    std::vector<int> bad_lines;
    int line_no = 1;  // header is line 1
    const std::size_t width = header.size();
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != width) {
            bad_lines.push_back(line_no);
            continue;
        }
        std::vector<double> parsed(width);
        bool ok = true;
        for (std::size_t c = 0; c < width && ok; ++c) ok = parse_cell(cells[c], &parsed[c]);
        if (!ok) {
            bad_lines.push_back(line_no);
            continue;
        }
        rows.push_back(std::move(parsed));
    }

    if (!bad_lines.empty()) {
        std::string msg = "'" + path + "': unparseable rows at line";
        msg += bad_lines.size() > 1 ? "s " : " ";
        for (std::size_t i = 0; i < bad_lines.size(); ++i) {
            if (i) msg += ", ";
            msg += std::to_string(bad_lines[i]);
        }
        throw csv_error(msg);
    }

    const Index n = static_cast<Index>(rows.size());
    PartitionedDataset p;
    p.intercept = spec.intercept;
    p.y.resize(n);
    p.X1.resize(n, static_cast<Index>(x1_cols.size()));
    p.X2.resize(n, static_cast<Index>(x2_cols.size()));
    p.Z1.resize(n, static_cast<Index>(z1_cols.size()));
    for (Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        p.y(i) = r[y_col[0]];
        for (std::size_t j = 0; j < x1_cols.size(); ++j) p.X1(i, static_cast<Index>(j)) = r[x1_cols[j]];
        for (std::size_t j = 0; j < x2_cols.size(); ++j) p.X2(i, static_cast<Index>(j)) = r[x2_cols[j]];
        for (std::size_t j = 0; j < z1_cols.size(); ++j) p.Z1(i, static_cast<Index>(j)) = r[z1_cols[j]];
    }

    const Index k = p.k1() + p.k2();
    const Index l = p.l1() + p.k2();
    if (n <= k) {
        throw csv_error("'" + path + "': n=" + std::to_string(n) +
                        " rows do not exceed k=" + std::to_string(k) + " predictors");
    }
    if (n <= l) {
        throw csv_error("'" + path + "': n=" + std::to_string(n) +
                        " rows do not exceed l=" + std::to_string(l) + " instruments");
    }
    return p;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_dataset_csv(const std::string& path, const PartitionedDataset& data,
                       const ColumnSpec& spec) {
    if (static_cast<Index>(spec.endogenous.size()) != data.X1.cols() ||
        static_cast<Index>(spec.exogenous.size()) != data.X2.cols() ||
        static_cast<Index>(spec.instruments.size()) != data.Z1.cols()) {
        throw validation_error("write_dataset_csv: column-name counts do not match blocks");
    }
    std::ofstream out(path);
    if (!out) throw csv_error("cannot write '" + path + "'");

    std::vector<std::string> header{spec.response};
    header.insert(header.end(), spec.endogenous.begin(), spec.endogenous.end());
    header.insert(header.end(), spec.exogenous.begin(), spec.exogenous.end());
    header.insert(header.end(), spec.instruments.begin(), spec.instruments.end());
    out << join(header, ",") << "\n";

    for (Index i = 0; i < data.n(); ++i) {
        out << format_double(data.y(i));
        for (Index j = 0; j < data.X1.cols(); ++j) out << "," << format_double(data.X1(i, j));
        for (Index j = 0; j < data.X2.cols(); ++j) out << "," << format_double(data.X2(i, j));
        for (Index j = 0; j < data.Z1.cols(); ++j) out << "," << format_double(data.Z1(i, j));
        out << "\n";
    }
}

}  // namespace clsiv
