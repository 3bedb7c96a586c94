#pragma once

// JSON problem files and report serialization.
//
// Problem file layout:
//   {
//     "algebra":    {"block_dims": [2], "tensor_factors": [d1, d2]},   // factors optional
//     "states":     {"name": [[[re, im], ...], ...], ...},             // row-major densities
//     "generators": [{"name": "sx", "matrix": [[[re, im], ...], ...]}, ...]
//                   or one of "pauli", "hermitian_basis", "first_factor_basis",
//     "mode":       "modular" | "all",                                 // optional
//     "solver":     {"eps_abs": ..., "eps_rel": ..., "max_iter": ...,
//                    "relaxation": ..., "rho": ..., "adaptive_rho": ...}  // optional
//   }

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "ncot/verify.hpp"

namespace ncot {

using Json = nlohmann::json;

struct ProblemFile {
  FdAlgebra algebra;
  std::map<std::string, State> states;
  GeneratorSet generators;
  Mode mode = Mode::Modular;
  SolverOptions solver;

  const State& state(const std::string& name) const;
};

/// Validates every field; errors name the offending JSON path.
ProblemFile parse_problem(const Json& j);
/// Parse errors report the line and column.
ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);

Json to_json(const ProblemFile& p);
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j, const std::string& where);

Json to_json(const SolverOptions& o);
Json to_json(const W2Result& r, const GeneratorSet& k);
Json to_json(const AxiomReport& r);
Json to_json(const KmsReport& r);
Json to_json(const SubadditivityReport& r);
Json to_json(const PseudometricReport& r);
Json to_json(const NonfaithfulReport& r);

}  // namespace ncot
