#pragma once
// Spec files, result records, run manifests, and small SVG plots.
//
// Result records are deterministic: serializing the same values twice gives
// the same bytes (keys are sorted, doubles print shortest-round-trip, and no
// timestamps or machine data appear). The run manifest is the one place a
// wall-clock timestamp is allowed.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tube/bloch.hpp"
#include "tube/deadzone.hpp"
#include "tube/effective.hpp"
#include "tube/geometry.hpp"
#include "tube/homog.hpp"
#include "tube/montecarlo.hpp"

namespace tube {

using json = nlohmann::json;

json spec_to_json(const TubeSpec& spec);
TubeSpec spec_from_json(const json& j);  // throws BadSpec on malformed input
TubeSpec load_spec(const std::string& path);
void save_spec(const TubeSpec& spec, const std::string& path);

std::string read_text(const std::string& path);  // throws BadSpec when unreadable
void write_text(const std::string& path, const std::string& text);

uint64_t fnv1a64(const std::string& bytes);
std::string hex64(uint64_t v);

// Shortest exact decimal for CSV output.
std::string g17(double v);

json record_effective(const TubeSpec& spec, const EffectiveResult& r);
json record_bloch(const TubeSpec& spec, const BlochScan& scan,
                  const BlochFit& fit);
json record_mc(const TubeSpec& spec, const McConfig& cfg, const McEstimate& e);
json record_homog(const TubeSpec& spec, const HomogConfig& cfg,
                  const HomogResult& r);
json record_deadzone(const std::vector<DeadZoneRow>& rows,
                     const DeadZoneFit& fit);

// Autoscaled polyline chart of the series ys[k] against x; names label the
// legend. Enough to eyeball decay rates and profiles.
std::string svg_polyline_plot(const std::vector<double>& x,
                              const std::vector<std::vector<double>>& ys,
                              const std::vector<std::string>& names,
                              const std::string& title);

// Describes one CLI run for later audit: command line, geometry hash,
// parameters, and fnv1a64 of every file written. Carries the timestamp.
json make_manifest(const std::string& command, const TubeSpec& spec,
                   const json& params,
                   const std::vector<std::pair<std::string, std::string>>&
                       outputs);

}  // namespace tube
