#pragma once

#include <map>
#include <string>
#include <vector>

#include "axisdesc/descriptor.hpp"

namespace axisdesc {

// Extraction parameters as exposed on the CLI and recorded in database
// manifests. Zero/negative sentinel values mean "derive from the mask".
struct ExtractParams {
    FieldMode mode = FieldMode::diffusion;
    double rho = 16.0;        // screened mode
    double tau_start = 0.0;   // 0 = max(width,height)/4
    double tau_growth = 2.0;
    double tau_max = 0.0;     // 0 = 64 * tau_start
    AnnealTarget target = AnnealTarget::single_center;
    int fg_threshold = 128;
    double min_length = -1.0;  // < 0 = 3% of sqrt(interior area)

    std::map<std::string, std::string> to_key_values() const;
    static ExtractParams from_key_values(const std::map<std::string, std::string>& kv,
                                         const std::string& origin_hint);
    friend bool operator==(const ExtractParams&, const ExtractParams&) = default;
};

struct ExtractResult {
    ShapeMask mask;
    Field field;
    std::vector<CriticalPoint> criticals;
    Topology topology = Topology::single_center;
    CriticalPoint origin;  // center (single-center) or saddle (dumbbell)
    std::vector<SymmetryBranch> branches;  // pruned
    struct Alternative {
        FramePair frames;
        Cell origin;
        Topology topology = Topology::single_center;
    };
    std::vector<Alternative> alternatives;
    std::vector<ShapeDescriptor> descriptors;  // one per alternative
    bool dumbbell_fallback = false;  // saddle lacked axes; per-lobe descriptors
};

// load -> anneal/solve -> detect -> group -> prune -> frames -> descriptors.
ExtractResult run_extraction(ShapeMask mask, const ExtractParams& params);
ExtractResult extract_file(const std::string& path, const ExtractParams& params);

// Name helper shared by the CLI and the database: alternative 0 maps to
// <base>.desc, alternative k to <base>.alt<k>.desc.
std::string descriptor_path(const std::string& base, std::size_t alternative);

}  // namespace axisdesc
