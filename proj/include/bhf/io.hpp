#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "bhf/counterexample.hpp"
#include "bhf/energy.hpp"
#include "bhf/grid.hpp"
#include "bhf/solver.hpp"
#include "bhf/sweep.hpp"
#include "bhf/verify.hpp"

namespace bhf {

nlohmann::json to_json(const EnergyBreakdown& e, const GridConfig& config);
nlohmann::json to_json(const MinimizeResult& r, const GridConfig& config);
nlohmann::json to_json(const PropertyReport& r);
nlohmann::json to_json(const CounterexampleReport& r, const GridConfig& config);
nlohmann::json to_json(const SweepRecord& r);
nlohmann::json to_json(const FitResult& r);
nlohmann::json to_json(const ScalingCheckReport& r, const GridConfig& config);

// Grid dump for cross-implementation comparison: nodes, weights, polarization.
nlohmann::json grid_to_json(const MomentumGrid& grid);

// Operator (de)serialization: {"dim": N, "rows": [[...], ...]}.
nlohmann::json operator_to_json(const SymOperator& z);
SymOperator operator_from_json(const nlohmann::json& j);

void write_operator(const std::string& path, const SymOperator& z);
SymOperator read_operator(const std::string& path);

// CSV schema: header
// lambda,g,sigma,n,e_min,e_trial,lower_bound,paper_upper,derived_upper,iters,wall_ms
// one row per record, ordered by lambda.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

// Plain-text key=value config file (lambda, sigma, g, nr, ntheta, nphi,
// normalization). Unknown keys are rejected.
GridConfig read_config_file(const std::string& path);

}  // namespace bhf
