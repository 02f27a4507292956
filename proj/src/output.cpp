#include "rbm/output.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

namespace rbm {

std::string format_double(double v) {
    // printf %.17g semantics, locale-free; 17 significant digits round-trip
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const TrajectoryEnsemble& e) {
    int dim = e.trajectories.empty() ? 0
                                     : static_cast<int>(e.trajectories[0].states.cols());
    os << "path_id,step,time";
    for (int j = 0; j < dim; ++j) os << ",state_" << j;
    os << ",residual\n";
    for (const auto& tr : e.trajectories) {
        for (std::size_t k = 0; k < e.stored_steps.size(); ++k) {
            os << tr.path_id << ',' << e.stored_steps[k] << ','
               << format_double(e.time_of(k));
            for (int j = 0; j < dim; ++j)
                os << ',' << format_double(tr.states(static_cast<int>(k), j));
            os << ',' << format_double(tr.residuals(static_cast<int>(k))) << '\n';
        }
    }
}

std::string ensemble_csv(const TrajectoryEnsemble& e) {
    std::ostringstream os;
    write_csv(os, e);
    return os.str();
}

std::string simulation_summary(const TrajectoryEnsemble& e, const std::string& csv_path,
                               double wall_seconds) {
    int dim = e.trajectories.empty() ? 0
                                     : static_cast<int>(e.trajectories[0].states.cols());
    std::int64_t refines = 0;
    for (const auto& tr : e.trajectories) refines += tr.refine_events;
    double final_time =
        e.stored_steps.empty() ? 0.0 : e.time_of(e.stored_steps.size() - 1);

    std::string out;
    out += "schema_version: 1\n";
    out += "kind: simulation_summary\n";
    out += "manifold: " + e.manifold_name + "\n";
    out += "backend: " + to_string(e.backend) + "\n";
    out += "formulation: " + to_string(e.formulation) + "\n";
    out += "scheme: " + to_string(e.config.scheme) + "\n";
    out += "dt: " + format_double(e.config.dt) + "\n";
    out += "t_final: " + format_double(e.config.t_final) + "\n";
    out += "paths: " + std::to_string(e.config.paths) + "\n";
    out += "seed: " + std::to_string(e.config.seed) + "\n";
    out += "workers: " + std::to_string(e.config.workers) + "\n";
    out += "thin: " + std::to_string(e.config.thin) + "\n";
    out += "stored_steps: " + std::to_string(e.stored_steps.size()) + "\n";
    out += "state_dim: " + std::to_string(dim) + "\n";
    out += "final_time: " + format_double(final_time) + "\n";
    out += "absorbed_paths: " + std::to_string(e.absorbed_count()) + "\n";
    out += "refine_events_total: " + std::to_string(refines) + "\n";
    out += "csv: " + csv_path + "\n";
    out += "wall_seconds: " + format_double(wall_seconds) + "\n";
    return out;
}

}  // namespace rbm
