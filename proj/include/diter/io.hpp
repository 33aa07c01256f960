#ifndef DITER_IO_HPP
#define DITER_IO_HPP

#include <string>
#include <vector>

#include "diter/core.hpp"
#include "diter/engine.hpp"

namespace diter {

/// Matrix Market "coordinate real general" reader (the symmetric variant
/// is expanded on read). 1-based indices are mapped to 0-based and
/// duplicates are summed. Malformed input throws with the line number.
SparseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const SparseMatrix& m);

/// Matrix Market "array real general" single-column reader/writer.
DenseVector read_vector(const std::string& path);
void write_vector(const std::string& path, const DenseVector& v);

enum class WeightMode { Uniform, Given };

/// TSV edge list "src dst [weight]", 0-based. Uniform mode weights every
/// out-link of node i as 1/outdeg(i) (weight fields, if present, must be
/// nonnegative and are otherwise ignored); Given mode uses the stated
/// weight, defaulting to 1. Nodes with no out-links produce zero columns
/// and are reported through `dangling` when supplied.
SparseMatrix read_edge_list(const std::string& path, WeightMode mode,
                            std::vector<int>* dangling = nullptr);

/// CSV trace with the exact header
/// method,step,link_cost,matvec_equiv,residual_l1,error_bound[,true_error];
/// the last column appears when the rows carry a true error.
void write_trace_csv(const std::string& path, const std::string& method, const Trace& trace);

/// 17-significant-digit formatting (round-trip safe) used by all writers.
std::string format_number(double v);

/// Companion gnuplot script plotting residual against link cost for each
/// CSV produced by a bench run.
void write_gnuplot_script(const std::string& path, const std::vector<std::string>& csv_files,
                          const std::string& output_png);

}  // namespace diter

#endif
