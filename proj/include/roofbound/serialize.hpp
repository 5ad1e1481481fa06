#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "roofbound/invariants.hpp"
#include "roofbound/qcore.hpp"
#include "roofbound/refine.hpp"
#include "roofbound/sdecomp.hpp"

namespace roofbound {

using Json = nlohmann::json;

/// {"n_qubits": n, "re": [[...]], "im": [[...]]}
Json density_to_json(const DensityMatrix& rho);
/// Throws kInvalidArgument for a malformed document (missing keys, ragged or
/// non-numeric arrays, size not 2^n_qubits) and kInvalidState listing every
/// violated density-matrix invariant.
DensityMatrix density_from_json(const Json& doc);
/// As density_from_json; unreadable files and JSON syntax errors are kInvalidArgument.
DensityMatrix read_density_file(const std::filesystem::path& path);
void write_density_file(const std::filesystem::path& path, const DensityMatrix& rho);

/// {"re": [...], "im": [...]}
Json to_json(const PureState& psi);
Json to_json(const Ensemble& ensemble);
/// [{"coeff_re", "coeff_im", "exponents"}, ...]
Json monomials_to_json(const InvariantSpec& spec);
Json to_json(const SubtractionStep& step);
Json to_json(const ChainResult& chain);
Json to_json(const BoundResult& result);
Json to_json(const SPoint& point);
/// [{"re", "im", "residual"}, ...] for a list of zero-E states.
Json zero_states_to_json(const InvariantSpec& spec, const std::vector<PureState>& states);

}  // namespace roofbound
