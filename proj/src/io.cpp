#include "reliefe/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "reliefe/error.hpp"

namespace reliefe {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view tok, std::size_t line) {
    tok = trim(tok);
    if (tok.empty()) parse_fail(line, "empty numeric cell");
    // strtod accepts forms from_chars rejects in older libstdc++ (leading '+').
    std::string buf(tok);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) parse_fail(line, "not a number: '" + buf + "'");
    if (!std::isfinite(v)) parse_fail(line, "non-finite value '" + buf + "'");
    return v;
}

std::size_t parse_index(std::string_view tok, std::size_t line) {
    tok = trim(tok);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
        parse_fail(line, "not an index: '" + std::string(tok) + "'");
    return v;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t p = 0; p <= s.size(); ++p) {
        if (p == s.size() || s[p] == sep) {
            out.push_back(s.substr(start, p - start));
            start = p + 1;
        }
    }
    return out;
}

}  // namespace

LabeledMatrix read_svmlight(std::istream& in, std::optional<std::size_t> n_features) {
    std::vector<std::size_t> offsets{0};
    std::vector<Index> cols;
    std::vector<double> vals;
    LabeledMatrix out;
    std::size_t max_col = 0;
    std::string raw;
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t line = 1; std::getline(in, raw); ++line) {
        std::string_view s(raw);
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        std::istringstream tokens{std::string(s)};
        std::string tok;
        tokens >> tok;
        out.labels.push_back(parse_double(tok, line));
        entries.clear();
        while (tokens >> tok) {
            if (tok.rfind("qid:", 0) == 0) continue;
            const auto colon = tok.find(':');
            if (colon == std::string::npos) parse_fail(line, "expected idx:val, got '" + tok + "'");
            const std::size_t idx = parse_index(std::string_view(tok).substr(0, colon), line);
            if (idx == 0) parse_fail(line, "svmlight indices are 1-based");
            const double v = parse_double(std::string_view(tok).substr(colon + 1), line);
            entries.emplace_back(idx - 1, v);
        }
        std::sort(entries.begin(), entries.end());
        for (std::size_t p = 0; p < entries.size(); ++p) {
            if (p > 0 && entries[p].first == entries[p - 1].first) parse_fail(line, "duplicate feature index");
            max_col = std::max(max_col, entries[p].first + 1);
            if (entries[p].second == 0.0) continue;
            cols.push_back(static_cast<Index>(entries[p].first));
            vals.push_back(entries[p].second);
        }
        offsets.push_back(vals.size());
    }
    std::size_t n_cols = max_col;
    if (n_features) {
        if (*n_features < max_col) throw Error(ErrorKind::ParseError, "feature index exceeds declared count");
        n_cols = *n_features;
    }
    const std::size_t n_rows = offsets.size() - 1;
    out.features = SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
    return out;
}

void write_svmlight(std::ostream& out, const SparseMatrix& x, const std::vector<double>& labels) {
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        out << (labels.empty() ? std::string("0") : format_double(labels.at(i)));
        const RowView r = x.row(i);
        for (std::size_t p = 0; p < r.nnz(); ++p) out << ' ' << (r.cols[p] + 1) << ':' << format_double(r.vals[p]);
        out << '\n';
    }
}

LabeledMatrix read_csv(std::istream& in, const CsvOptions& options) {
    LabeledMatrix out;
    std::optional<std::size_t> width;
    std::size_t label_col = 0;
    std::vector<std::vector<std::pair<Index, double>>> rows;
    std::string raw;
    bool header_pending = options.header;
    for (std::size_t line = 1; std::getline(in, raw); ++line) {
        const std::string_view s = trim(raw);
        if (s.empty()) continue;
        const auto cells = split(s, ',');
        if (!width) {
            width = cells.size();
            if (options.label_column) {
                const long lc = *options.label_column;
                const long resolved = lc < 0 ? static_cast<long>(cells.size()) + lc : lc;
                if (resolved < 0 || resolved >= static_cast<long>(cells.size()))
                    parse_fail(line, "label column out of range");
                label_col = static_cast<std::size_t>(resolved);
            }
        } else if (cells.size() != *width) {
            parse_fail(line, "ragged row: expected " + std::to_string(*width) + " cells, got " +
                                 std::to_string(cells.size()));
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        auto& row = rows.emplace_back();
        Index col = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double v = parse_double(cells[c], line);
            if (options.label_column && c == label_col) {
                out.labels.push_back(v);
                continue;
            }
            if (v != 0.0) row.emplace_back(col, v);
            ++col;
        }
    }
    const std::size_t n_cols = width ? *width - (options.label_column ? 1 : 0) : 0;
    SparseBuilder b(n_cols);
    for (const auto& row : rows) {
        for (const auto& [c, v] : row) b.push(c, v);
        b.finish_row();
    }
    out.features = std::move(b).build();
    return out;
}

void write_csv(std::ostream& out, const SparseMatrix& x, const std::vector<double>& labels, bool header) {
    if (header) {
        for (std::size_t j = 0; j < x.n_cols(); ++j) out << (j ? "," : "") << 'f' << j;
        if (!labels.empty()) out << (x.n_cols() ? "," : "") << "label";
        out << '\n';
    }
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        const RowView r = x.row(i);
        std::size_t p = 0;
        for (std::size_t j = 0; j < x.n_cols(); ++j) {
            double v = 0.0;
            if (p < r.nnz() && r.cols[p] == j) v = r.vals[p++];
            out << (j ? "," : "") << format_double(v);
        }
        if (!labels.empty()) out << (x.n_cols() ? "," : "") << format_double(labels.at(i));
        out << '\n';
    }
}

SparseMatrix read_label_lists(std::istream& in, std::optional<std::size_t> n_labels) {
    std::vector<std::size_t> offsets{0};
    std::vector<Index> cols;
    std::size_t max_label = 0;
    std::string raw;
    for (std::size_t line = 1; std::getline(in, raw); ++line) {
        const std::string_view s = trim(raw);
        std::vector<std::size_t> ids;
        if (!s.empty()) {
            for (std::string_view tok : split(s, ',')) {
                const std::size_t id = parse_index(tok, line);
                if (n_labels && id >= *n_labels)
                    parse_fail(line, "label " + std::to_string(id) + " not below declared count " +
                                         std::to_string(*n_labels));
                ids.push_back(id);
            }
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (std::size_t id : ids) {
            cols.push_back(static_cast<Index>(id));
            max_label = std::max(max_label, id + 1);
        }
        offsets.push_back(cols.size());
    }
    // A trailing newline does not add an instance; blank lines in between do.
    const std::size_t n_cols = n_labels.value_or(max_label);
    std::vector<double> vals(cols.size(), 1.0);
    const std::size_t n_rows = offsets.size() - 1;
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

void write_label_lists(std::ostream& out, const SparseMatrix& labels) {
    for (std::size_t i = 0; i < labels.n_rows(); ++i) {
        const RowView r = labels.row(i);
        for (std::size_t p = 0; p < r.nnz(); ++p) out << (p ? "," : "") << r.cols[p];
        out << '\n';
    }
}

ClassVector to_class_ids(const std::vector<double>& labels) {
    const bool natural = std::all_of(labels.begin(), labels.end(), [](double v) {
        return v >= 0.0 && v == std::floor(v) && v < 1e9;
    });
    ClassVector ids(labels.size());
    if (natural) {
        for (std::size_t i = 0; i < labels.size(); ++i) ids[i] = static_cast<std::size_t>(labels[i]);
        return ids;
    }
    std::map<double, std::size_t> id_of;
    for (double v : labels) id_of.emplace(v, 0);
    std::size_t next = 0;
    for (auto& [v, id] : id_of) id = next++;
    for (std::size_t i = 0; i < labels.size(); ++i) ids[i] = id_of[labels[i]];
    return ids;
}

FileFormat parse_format(const std::string& name) {
    if (name == "svmlight" || name == "libsvm") return FileFormat::svmlight;
    if (name == "csv") return FileFormat::csv;
    throw Error(ErrorKind::InvalidConfig, "unknown format '" + name + "'");
}

Dataset load_dataset(const LoadOptions& options) {
    std::ifstream in(options.path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + options.path.string());
    LabeledMatrix lm;
    if (options.format == FileFormat::svmlight) {
        lm = read_svmlight(in, options.n_features);
    } else {
        CsvOptions csv = options.csv;
        // Multi-label CSV features come without a label column.
        if (options.task == Task::mlc && options.target_path) csv.label_column.reset();
        lm = read_csv(in, csv);
    }
    Dataset ds{std::move(lm.features), ClassVector{}};
    if (options.task == Task::mcc) {
        if (lm.labels.size() != ds.features.n_rows())
            throw Error(ErrorKind::ParseError, "class labels missing for some rows");
        ds.targets = to_class_ids(lm.labels);
    } else {
        if (!options.target_path) throw Error(ErrorKind::ParseError, "multi-label data needs a label file");
        std::ifstream tin(*options.target_path);
        if (!tin) throw Error(ErrorKind::ParseError, "cannot open " + options.target_path->string());
        ds.targets = read_label_lists(tin, options.n_labels);
    }
    ds.validate();
    return ds;
}

namespace {

struct Fnv {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    template <class T>
    void add(const std::vector<T>& v) {
        const auto* p = reinterpret_cast<const unsigned char*>(v.data());
        for (std::size_t i = 0; i < v.size() * sizeof(T); ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    }
    void add(const SparseMatrix& m) {
        add(std::vector<std::uint64_t>{m.n_rows(), m.n_cols()});
        add(m.row_offsets());
        add(m.col_indices());
        add(m.values());
    }
};

}  // namespace

std::string fingerprint(const Dataset& dataset) {
    Fnv f;
    f.add(dataset.features);
    if (dataset.task() == Task::mcc) {
        std::vector<std::uint64_t> c(dataset.classes().begin(), dataset.classes().end());
        f.add(c);
    } else {
        f.add(dataset.labels());
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(f.h));
    return buf;
}

}  // namespace reliefe
