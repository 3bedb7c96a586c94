#include "ncot/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ncot {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::size_t to_size(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) fail(where, "expected a positive integer");
  return j.get<std::size_t>();
}

double to_number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

FdAlgebra parse_algebra(const Json& j) {
  const std::string where = "algebra";
  const Json& dims = field(j, "block_dims", where);
  if (!dims.is_array() || dims.empty()) fail(where + ".block_dims", "expected a non-empty array");
  std::vector<std::size_t> blocks;
  for (std::size_t i = 0; i < dims.size(); ++i)
    blocks.push_back(to_size(dims[i], where + ".block_dims[" + std::to_string(i) + "]"));
  std::optional<std::pair<std::size_t, std::size_t>> factors;
  if (const auto it = j.find("tensor_factors"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2) fail(where + ".tensor_factors", "expected [d1, d2]");
    factors = std::pair{to_size((*it)[0], where + ".tensor_factors[0]"), to_size((*it)[1], where + ".tensor_factors[1]")};
  }
  try {
    return FdAlgebra(std::move(blocks), factors);
  } catch (const InputError& e) {
    fail(where, e.what());
  }
}

GeneratorSet parse_generators(const Json& j, const FdAlgebra& alg) {
  const std::string where = "generators";
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "pauli") {
      if (!(alg == FdAlgebra::full(2))) fail(where, "\"pauli\" requires the algebra M_2");
      return pauli_generators();
    }
    if (name == "hermitian_basis") return hermitian_basis(alg);
    if (name == "first_factor_basis") return first_factor_basis(alg);
    fail(where, "unknown generator family '" + name + "'");
  }
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array or a family name");
  std::vector<CMatrix> k;
  std::vector<std::string> names;
  for (std::size_t l = 0; l < j.size(); ++l) {
    const std::string at = where + "[" + std::to_string(l) + "]";
    const Json& name = field(j[l], "name", at);
    if (!name.is_string()) fail(at + ".name", "expected a string");
    names.push_back(name.get<std::string>());
    CMatrix m = matrix_from_json(field(j[l], "matrix", at), at + ".matrix");
    if (m.rows() != alg.dim() || m.cols() != alg.dim()) fail(at + ".matrix", "wrong shape for the algebra");
    if (!alg.contains(m)) fail(at + ".matrix", "not block diagonal for the algebra");
    k.push_back(std::move(m));
  }
  return GeneratorSet(std::move(k), std::move(names));
}

SolverOptions parse_solver(const Json& j) {
  SolverOptions o;
  if (!j.is_object()) fail("solver", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string at = "solver." + key;
    if (key == "eps_abs") o.eps_abs = to_number(value, at);
    else if (key == "eps_rel") o.eps_rel = to_number(value, at);
    else if (key == "max_iter") o.max_iter = static_cast<int>(to_size(value, at));
    else if (key == "relaxation") o.relaxation = to_number(value, at);
    else if (key == "rho") o.rho = to_number(value, at);
    else if (key == "adapt_every") o.adapt_every = static_cast<int>(to_size(value, at));
    else if (key == "adaptive_rho") {
      if (!value.is_boolean()) fail(at, "expected a boolean");
      o.adaptive_rho = value.get<bool>();
    } else fail(at, "unknown option");
  }
  if (!(o.eps_abs > 0.0) || !(o.eps_rel > 0.0)) fail("solver", "tolerances must be positive");
  if (!(o.relaxation > 0.0 && o.relaxation < 2.0)) fail("solver.relaxation", "must lie in (0, 2)");
  if (!(o.rho > 0.0)) fail("solver.rho", "must be positive");
  return o;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Json indiscernible_json(const IndiscernibleOutcome& o) {
  return {{"w2", o.w2}, {"trace_distance", o.trace_distance}, {"identity_residual", o.identity_residual}};
}

}  // namespace

const State& ProblemFile::state(const std::string& name) const {
  const auto it = states.find(name);
  if (it == states.end()) {
    std::string known;
    for (const auto& [n, s] : states) known += (known.empty() ? "" : ", ") + n;
    throw InputError("no state named '" + name + "' (available: " + known + ")");
  }
  return it->second;
}

CMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(where, "expected rows of [re, im] pairs");
  CMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_at = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) fail(row_at, "expected " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      const std::string at = row_at + "[" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2) fail(at, "expected [re, im]");
      m(r, c) = Complex(to_number(e[0], at + "[0]"), to_number(e[1], at + "[1]"));
    }
  }
  return m;
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ProblemFile parse_problem(const Json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  ProblemFile p;
  p.algebra = parse_algebra(field(j, "algebra", "<root>"));

  const Json& states = field(j, "states", "<root>");
  if (!states.is_object() || states.empty()) fail("states", "expected a non-empty object of named matrices");
  for (const auto& [name, value] : states.items()) {
    const std::string at = "states." + name;
    const CMatrix rho = matrix_from_json(value, at);
    if (rho.square())
      for (std::size_t r = 0; r < rho.rows(); ++r)
        for (std::size_t c = r; c < rho.cols(); ++c)
          if (rho(r, c) != std::conj(rho(c, r)))
            fail(at + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", "density is not Hermitian");
    try {
      p.states.emplace(name, make_state(p.algebra, rho));
    } catch (const InputError& e) {
      fail(at, e.what());
    }
  }

  p.generators = parse_generators(field(j, "generators", "<root>"), p.algebra);
  if (const auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) fail("mode", "expected a string");
    try {
      p.mode = parse_mode(it->get<std::string>());
    } catch (const InputError& e) {
      fail("mode", e.what());
    }
  }
  if (const auto it = j.find("solver"); it != j.end()) p.solver = parse_solver(*it);
  return p;
}

ProblemFile parse_problem_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw InputError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON (" +
                     e.what() + ")");
  }
  return parse_problem(j);
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str());
}

Json to_json(const SolverOptions& o) {
  return {{"eps_abs", o.eps_abs},       {"eps_rel", o.eps_rel},       {"max_iter", o.max_iter},
          {"relaxation", o.relaxation}, {"rho", o.rho},               {"adaptive_rho", o.adaptive_rho},
          {"adapt_every", o.adapt_every}};
}

Json to_json(const ProblemFile& p) {
  Json alg = {{"block_dims", p.algebra.block_dims()}};
  if (const auto& f = p.algebra.tensor_factors()) alg["tensor_factors"] = {f->first, f->second};
  Json states = Json::object();
  for (const auto& [name, s] : p.states) states[name] = matrix_to_json(s.density());
  Json gens = Json::array();
  for (std::size_t l = 0; l < p.generators.size(); ++l)
    gens.push_back({{"name", p.generators.names()[l]}, {"matrix", matrix_to_json(p.generators[l])}});
  return {{"algebra", alg},
          {"states", states},
          {"generators", gens},
          {"mode", to_string(p.mode)},
          {"solver", to_json(p.solver)}};
}

Json to_json(const W2Result& r, const GeneratorSet& k) {
  Json per = Json::array();
  for (std::size_t l = 0; l < r.cost_report.per_generator.size(); ++l) {
    const std::string name = l < k.names().size() ? k.names()[l] : "k" + std::to_string(l + 1);
    per.push_back({{"name", name}, {"cost", r.cost_report.per_generator[l]}});
  }
  return {{"w2", r.w2},
          {"cost", r.cost},
          {"mode", to_string(r.mode)},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"per_generator", per},
          {"residuals",
           {{"primal", r.primal_residual},
            {"dual", r.dual_residual},
            {"gap", r.gap},
            {"covariance", r.covariance_residual},
            {"unitality", r.unitality_residual},
            {"marginal", r.marginal_residual},
            {"cp_slack", r.cp_slack}}},
          {"variables", r.variables},
          {"affine_rows", r.affine_rows},
          {"warnings", r.warnings}};
}

Json to_json(const AxiomReport& r) {
  Json ind = Json::array();
  for (const auto& o : r.indiscernibles) ind.push_back(indiscernible_json(o));
  return {{"suite", r.suite},
          {"mode", to_string(r.mode)},
          {"trials", r.trials},
          {"seed", r.seed},
          {"generating", r.generating},
          {"passed", r.passed},
          {"tolerances",
           {{"symmetry_triangle", r.options.tolerance},
            {"self_distance", r.options.self_tolerance},
            {"separation_distance", r.options.separation_distance},
            {"separation_floor", r.options.separation_floor},
            {"mode_excess", r.options.mode_tolerance}}},
          {"solver", to_json(r.options.solver)},
          {"max_symmetry_gap", r.max_symmetry_gap},
          {"symmetry_asserted", r.symmetry_asserted},
          {"symmetry_gaps", r.symmetry_gaps},
          {"max_triangle_violation", r.max_triangle_violation},
          {"max_self_distance", r.max_self_distance},
          {"max_identity_residual", r.max_identity_residual},
          {"max_mode_excess", r.max_mode_excess},
          {"indiscernible_failures", r.indiscernible_failures},
          {"indiscernibles", ind},
          {"nonconverged", r.nonconverged}};
}

Json to_json(const KmsReport& r) {
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"passed", r.passed},
          {"max_term_gap", r.max_term_gap},
          {"max_involution_gap", r.max_involution_gap},
          {"max_marginal_residual", r.max_marginal_residual},
          {"max_ucp_defect", r.max_ucp_defect}};
}

Json to_json(const SubadditivityReport& r) {
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"max_violation", r.max_violation},
          {"passed", r.passed}};
}

Json to_json(const PseudometricReport& r) {
  return {{"passed", r.passed},
          {"states_equal", r.states_equal},
          {"trace_distance", r.trace_distance},
          {"w2", r.w2},
          {"slice_cost", r.slice_cost},
          {"slice_covariance_residual", r.slice_covariance},
          {"slice_marginal_residual", r.slice_marginal},
          {"solver_cost", r.solver_cost},
          {"generated_dim", r.generated_dim},
          {"algebra_dim", r.algebra_dim},
          {"w2_generating", r.w2_generating}};
}

Json to_json(const NonfaithfulReport& r) {
  return {{"passed", r.passed},
          {"self_distance", r.self_distance},
          {"orthogonal_distance", r.orthogonal_distance},
          {"orthogonal_expected", r.orthogonal_expected}};
}

}  // namespace ncot
