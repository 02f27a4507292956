// Serialization: trajectory CSV (stable schema, byte-deterministic), the
// simulation summary document, and verification report text.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rbm/montecarlo.hpp"
#include "rbm/sde.hpp"

namespace rbm {

// Round-trip exact, locale-independent float formatting (%.17g).
std::string format_double(double v);

// Columns: path_id, step, time, state_0..state_{d-1}, residual.
// Rows ordered by (path_id, step). Bytes depend only on the ensemble content,
// never on worker count or scheduling.
void write_csv(std::ostream& os, const TrajectoryEnsemble& e);
std::string ensemble_csv(const TrajectoryEnsemble& e);

// Structured-text run summary with stable key order; schema_version first.
std::string simulation_summary(const TrajectoryEnsemble& e, const std::string& csv_path,
                               double wall_seconds);

}  // namespace rbm
