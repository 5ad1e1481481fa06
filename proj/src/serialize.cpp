#include "roofbound/serialize.hpp"

#include <cmath>
#include <fstream>

namespace roofbound {

namespace {

Json matrix_part(const CMatrix& m, bool imaginary) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_part(const CVector& v, bool imaginary) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(imaginary ? v(i).imag() : v(i).real());
  return out;
}

// Non-finite doubles are written as null by nlohmann; keep them readable.
Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

void read_part(const Json& rows, const char* key, int dim, CMatrix& out, bool imaginary) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
    throw Error(ErrorCode::kInvalidArgument, std::string("'") + key + "' must be an array of " + std::to_string(dim) +
                                                 " rows");
  }
  for (int i = 0; i < dim; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw Error(ErrorCode::kInvalidArgument, std::string("row ") + std::to_string(i) + " of '" + key +
                                                   "' must have " + std::to_string(dim) + " entries");
    }
    for (int j = 0; j < dim; ++j) {
      const Json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) {
        throw Error(ErrorCode::kInvalidArgument, std::string("'") + key + "'[" + std::to_string(i) + "][" +
                                                     std::to_string(j) + "] is not a number");
      }
      const double v = x.get<double>();
      if (imaginary) {
        out(i, j).imag(v);
      } else {
        out(i, j).real(v);
      }
    }
  }
}

}  // namespace

Json density_to_json(const DensityMatrix& rho) {
  return Json{{"n_qubits", rho.n_qubits()}, {"re", matrix_part(rho.matrix(), false)},
              {"im", matrix_part(rho.matrix(), true)}};
}

DensityMatrix density_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidArgument, "density matrix document must be a JSON object");
  for (const char* key : {"n_qubits", "re", "im"}) {
    if (!doc.contains(key)) throw Error(ErrorCode::kInvalidArgument, std::string("missing key '") + key + "'");
  }
  if (!doc["n_qubits"].is_number_integer()) throw Error(ErrorCode::kInvalidArgument, "'n_qubits' must be an integer");
  const int n = doc["n_qubits"].get<int>();
  if (n < 1 || n > 10) throw Error(ErrorCode::kInvalidArgument, "'n_qubits' out of range: " + std::to_string(n));
  const int dim = 1 << n;
  CMatrix m = CMatrix::Zero(dim, dim);
  read_part(doc["re"], "re", dim, m, false);
  read_part(doc["im"], "im", dim, m, true);
  return DensityMatrix::from_matrix(m);
}

DensityMatrix read_density_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return density_from_json(doc);
}

void write_density_file(const std::filesystem::path& path, const DensityMatrix& rho) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << density_to_json(rho).dump(2) << '\n';
}

Json to_json(const PureState& psi) {
  return Json{{"re", vector_part(psi.amplitudes(), false)}, {"im", vector_part(psi.amplitudes(), true)}};
}

Json to_json(const Ensemble& ensemble) {
  Json out = Json::array();
  for (const auto& m : ensemble.members()) {
    Json entry = to_json(m.state);
    entry["weight"] = m.weight;
    out.push_back(std::move(entry));
  }
  return out;
}

Json monomials_to_json(const InvariantSpec& spec) {
  Json out = Json::array();
  for (const auto& m : spec.monomials()) {
    out.push_back({{"coeff_re", m.coefficient.real()}, {"coeff_im", m.coefficient.imag()}, {"exponents", m.exponents}});
  }
  return out;
}

Json to_json(const SubtractionStep& step) {
  Json zeros = Json::array();
  for (const auto& z : step.zero_states) {
    Json entry = to_json(z.state);
    entry["weight"] = z.weight;
    zeros.push_back(std::move(entry));
  }
  return Json{{"lambda_pi", step.lambda_pi},
              {"k", step.k},
              {"dist_parent_pi", step.dist_parent_pi},
              {"dist_sigma_pi", step.dist_sigma_pi},
              {"ratio", step.ratio},
              {"sigma_rank", step.sigma.rank()},
              {"zero_states", std::move(zeros)}};
}

Json to_json(const ChainResult& chain) {
  Json steps = Json::array();
  for (const auto& s : chain.steps) steps.push_back(to_json(s));
  return Json{{"steps", std::move(steps)},
              {"final_state", to_json(chain.final_state)},
              {"final_value", chain.final_value},
              {"accumulated_weight", chain.accumulated_weight},
              {"ratio_product", chain.ratio_product},
              {"bound", chain.bound},
              {"ensemble", to_json(chain.ensemble)}};
}

Json to_json(const BoundResult& result) {
  Json values = Json::array();
  for (double v : result.restart_values) values.push_back(number(v));
  Json out{{"value", result.value},
           {"best_restart", result.best_restart},
           {"seed", result.seed},
           {"wall_time_s", result.wall_time_s},
           {"restart_values", std::move(values)},
           {"failures", result.failures},
           {"certificate", to_json(result.certificate)}};
  if (result.best_chain) out["best_chain"] = to_json(*result.best_chain);
  return out;
}

Json to_json(const SPoint& point) {
  Json out{{"psi", to_json(point.psi)},
           {"k", number(point.k)},
           {"remainder_bound", number(point.remainder_bound)},
           {"objective", number(point.objective)},
           {"warning", point.warning}};
  if (point.remainder) out["remainder"] = density_to_json(*point.remainder);
  return out;
}

Json zero_states_to_json(const InvariantSpec& spec, const std::vector<PureState>& states) {
  Json out = Json::array();
  for (const auto& s : states) {
    Json entry = to_json(s);
    entry["residual"] = spec.measure(s);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace roofbound
