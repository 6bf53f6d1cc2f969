#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ismnet/complex.hpp"
#include "ismnet/scores.hpp"
#include "ismnet/sparse.hpp"

namespace ismnet::io {

/// One whitespace-separated pair per line; '#' lines and blank lines skipped.
/// ParseError carries the zero-based line index.
std::vector<std::pair<NodeLabel, NodeLabel>> read_edge_list(std::istream& in);
std::vector<std::pair<NodeLabel, NodeLabel>> read_edge_list(const std::filesystem::path& path);

/// One record per line: vertex labels, optionally followed by `w=<number>`.
std::vector<SimplexRecord> read_simplex_list(std::istream& in);
std::vector<SimplexRecord> read_simplex_list(const std::filesystem::path& path);

/// Writes layer_<h>.csv files plus manifest.json into `dir` (created if needed).
void save_complex(const SimplicialComplex& complex, const std::filesystem::path& dir);
SimplicialComplex load_complex(const std::filesystem::path& dir);

/// "simplex_id,score" rows for observed entries only.
void write_scores_csv(const std::filesystem::path& path, const InfluenceScores& scores);
/// Ids absent from the file are unobserved.
InfluenceScores read_scores_csv(const std::filesystem::path& path, std::size_t n);

/// "simplex_id,<names...>" header then one row per simplex.
void write_features_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                        const DenseMatrix& features);
DenseMatrix read_features_csv(const std::filesystem::path& path, std::vector<std::string>* names = nullptr);

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& m);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace ismnet::io
