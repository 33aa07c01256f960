#include "diter/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace diter {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for reading");
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}

struct MmHeader {
    std::string format;    // coordinate | array
    std::string field;     // real | ...
    std::string symmetry;  // general | symmetric | ...
};

MmHeader read_banner(std::istream& in, const std::string& path, int& line) {
    std::string banner;
    if (!std::getline(in, banner)) fail(path, 1, "empty file");
    line = 1;
    std::istringstream ss(banner);
    std::string magic, object, format, field, symmetry;
    ss >> magic >> object >> format >> field >> symmetry;
    if (lower(magic) != "%%matrixmarket" || lower(object) != "matrix")
        fail(path, 1, "not a MatrixMarket matrix file");
    return {lower(format), lower(field), lower(symmetry)};
}

// Next non-comment, non-blank line; returns false at EOF.
bool next_data_line(std::istream& in, const std::string& path, int& line, std::string& out) {
    (void)path;
    while (std::getline(in, out)) {
        ++line;
        std::size_t i = out.find_first_not_of(" \t\r\n");
        if (i == std::string::npos) continue;
        if (out[i] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream f = open_in(path);
    int line = 0;
    const MmHeader h = read_banner(f, path, line);
    if (h.format != "coordinate")
        fail(path, 1, "coordinate format required, found '" + h.format + "'");
    if (h.field != "real")
        fail(path, 1, "real values required, found '" + h.field + "'");
    const bool symmetric = h.symmetry == "symmetric";
    if (!symmetric && h.symmetry != "general")
        fail(path, 1, "general or symmetric symmetry required, found '" + h.symmetry + "'");

    std::string text;
    if (!next_data_line(f, path, line, text)) fail(path, line, "missing size line");
    long rows = 0, cols = 0, entries = 0;
    {
        std::istringstream ss(text);
        if (!(ss >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
            fail(path, line, "malformed size line");
    }
    if (rows != cols)
        fail(path, line, "non-square matrix (" + std::to_string(rows) + "x" +
                             std::to_string(cols) + ")");

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(entries));
    for (long e = 0; e < entries; ++e) {
        if (!next_data_line(f, path, line, text))
            fail(path, line, "expected " + std::to_string(entries) + " entries, got " +
                                 std::to_string(e));
        std::istringstream ss(text);
        long r = 0, c = 0;
        double v = 0.0;
        if (!(ss >> r >> c >> v)) fail(path, line, "malformed entry");
        std::string extra;
        if (ss >> extra) fail(path, line, "unexpected trailing token '" + extra + "'");
        if (r < 1 || r > rows || c < 1 || c > cols) fail(path, line, "index out of range");
        trips.push_back({static_cast<int>(r - 1), static_cast<int>(c - 1), v});
        if (symmetric && r != c) trips.push_back({static_cast<int>(c - 1), static_cast<int>(r - 1), v});
    }
    if (next_data_line(f, path, line, text)) fail(path, line, "unexpected trailing data");
    return SparseMatrix::from_triplets(static_cast<int>(rows), std::move(trips));
}

void write_matrix_market(const std::string& path, const SparseMatrix& m) {
    std::ofstream f = open_out(path);
    f << "%%MatrixMarket matrix coordinate real general\n";
    f << m.size() << " " << m.size() << " " << m.nnz() << "\n";
    for (const Triplet& t : m.triplets())
        f << t.row + 1 << " " << t.col + 1 << " " << format_number(t.value) << "\n";
    if (!f) throw std::runtime_error("failed writing " + path);
}

DenseVector read_vector(const std::string& path) {
    std::ifstream f = open_in(path);
    int line = 0;
    const MmHeader h = read_banner(f, path, line);
    if (h.format != "array") fail(path, 1, "array format required, found '" + h.format + "'");
    if (h.field != "real") fail(path, 1, "real values required, found '" + h.field + "'");
    if (h.symmetry != "general") fail(path, 1, "general symmetry required");

    std::string text;
    if (!next_data_line(f, path, line, text)) fail(path, line, "missing size line");
    long rows = 0, cols = 0;
    {
        std::istringstream ss(text);
        if (!(ss >> rows >> cols) || rows < 0) fail(path, line, "malformed size line");
    }
    if (cols != 1) fail(path, line, "expected a single column vector");

    DenseVector v;
    v.reserve(static_cast<std::size_t>(rows));
    while (static_cast<long>(v.size()) < rows) {
        if (!next_data_line(f, path, line, text)) fail(path, line, "missing vector entries");
        std::istringstream ss(text);
        double x = 0.0;
        while (ss >> x) {
            if (static_cast<long>(v.size()) == rows) fail(path, line, "too many entries");
            v.push_back(x);
        }
        if (!ss.eof()) fail(path, line, "malformed entry");
    }
    if (next_data_line(f, path, line, text)) fail(path, line, "unexpected trailing data");
    return v;
}

void write_vector(const std::string& path, const DenseVector& v) {
    std::ofstream f = open_out(path);
    f << "%%MatrixMarket matrix array real general\n";
    f << v.size() << " 1\n";
    for (double x : v) f << format_number(x) << "\n";
    if (!f) throw std::runtime_error("failed writing " + path);
}

SparseMatrix read_edge_list(const std::string& path, WeightMode mode,
                            std::vector<int>* dangling) {
    std::ifstream f = open_in(path);
    struct Edge {
        int src, dst;
        double weight;
        bool has_weight;
        int line;
    };
    std::vector<Edge> edges;
    int max_node = -1;
    std::string text;
    int line = 0;
    while (std::getline(f, text)) {
        ++line;
        const std::size_t i = text.find_first_not_of(" \t\r\n");
        if (i == std::string::npos || text[i] == '#') continue;
        std::istringstream ss(text);
        long src = 0, dst = 0;
        double w = 1.0;
        if (!(ss >> src >> dst)) fail(path, line, "malformed edge line");
        bool has_w = static_cast<bool>(ss >> w);
        if (!has_w && !ss.eof()) fail(path, line, "malformed weight");
        std::string extra;
        if (ss >> extra) fail(path, line, "unexpected trailing token '" + extra + "'");
        if (src < 0 || dst < 0) fail(path, line, "negative node id");
        if (mode == WeightMode::Uniform && has_w && w < 0.0)
            fail(path, line, "negative weight in uniform mode");
        edges.push_back({static_cast<int>(src), static_cast<int>(dst), has_w ? w : 1.0,
                         has_w, line});
        max_node = std::max({max_node, static_cast<int>(src), static_cast<int>(dst)});
    }
    if (edges.empty()) throw std::runtime_error(path + ": empty edge list");

    const int n = max_node + 1;
    std::vector<int> outdeg(n, 0);
    for (const Edge& e : edges) ++outdeg[e.src];

    std::vector<Triplet> trips;
    trips.reserve(edges.size());
    for (const Edge& e : edges) {
        const double w = mode == WeightMode::Uniform ? 1.0 / outdeg[e.src] : e.weight;
        trips.push_back({e.dst, e.src, w});
    }
    if (dangling) {
        dangling->clear();
        for (int i = 0; i < n; ++i)
            if (outdeg[i] == 0) dangling->push_back(i);
    }
    return SparseMatrix::from_triplets(n, std::move(trips));
}

void write_trace_csv(const std::string& path, const std::string& method, const Trace& trace) {
    std::ofstream f = open_out(path);
    bool with_true = false;
    for (const TraceRow& r : trace.rows)
        if (r.true_error) with_true = true;
    f << "method,step,link_cost,matvec_equiv,residual_l1,error_bound";
    if (with_true) f << ",true_error";
    f << "\n";
    for (const TraceRow& r : trace.rows) {
        f << method << "," << r.step << "," << r.link_cost << ","
          << format_number(r.matvec_equiv) << "," << format_number(r.residual_l1) << ","
          << format_number(r.error_bound);
        if (with_true) f << "," << format_number(r.true_error ? *r.true_error : -1.0);
        f << "\n";
    }
    if (!f) throw std::runtime_error("failed writing " + path);
}

void write_gnuplot_script(const std::string& path, const std::vector<std::string>& csv_files,
                          const std::string& output_png) {
    std::ofstream f = open_out(path);
    f << "set terminal pngcairo size 1000,700\n";
    f << "set output '" << output_png << "'\n";
    f << "set datafile separator ','\n";
    f << "set logscale y\n";
    f << "set xlabel 'link cost'\n";
    f << "set ylabel 'residual (L1)'\n";
    f << "set key top right\n";
    f << "plot ";
    for (std::size_t i = 0; i < csv_files.size(); ++i) {
        if (i) f << ", \\\n     ";
        std::string title = csv_files[i];
        const std::size_t slash = title.find_last_of('/');
        if (slash != std::string::npos) title = title.substr(slash + 1);
        const std::size_t dot = title.find_last_of('.');
        if (dot != std::string::npos) title = title.substr(0, dot);
        f << "'" << csv_files[i] << "' skip 1 using 3:5 with lines title '" << title << "'";
    }
    f << "\n";
    if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace diter
