#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ddag/cpsd.hpp"
#include "ddag/harness.hpp"
#include "ddag/lds.hpp"
#include "ddag/reconstruct.hpp"

namespace ddag {

using Json = nlohmann::json;

/// 64-bit FNV-1a over p, the edge list, B and the noise parameters, as 16
/// hex digits.
std::string model_hash(const LdsModel& model);

/// Node ids are 1-based in every serialised form.
Json model_to_json(const LdsModel& model);
/// Rebuilds the model from the graph, B and noise; constants are recomputed.
LdsModel model_from_json(const Json& j);

Json noise_to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const Json& j);

/// Writes traj_0001.csv … traj_<n>.csv (columns t,node1..nodep) and
/// manifest.json into `dir`.
void write_trajectories(const std::filesystem::path& dir, const TrajectorySet& traj,
                        const LdsModel& model);
TrajectorySet read_trajectories(const std::filesystem::path& manifest);

/// First line "# omega=<ω>,n=<n>,N=<N>,p=<p>", then "row,col,re,im" rows
/// for every entry (1-based indices).
void write_psdm_csv(std::ostream& os, const PsdmEstimate& est);
PsdmEstimate read_psdm_csv(std::istream& is);

Json audit_to_json(const ReconstructionResult& result, const ReconstructionParams& params);

/// Reads an ExperimentConfig. Unknown keys are rejected; missing keys keep
/// their defaults. "noise" may be a single object or an array.
ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base = {});

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ddag
