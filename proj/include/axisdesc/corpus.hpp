#pragma once

#include <string>
#include <vector>

#include "axisdesc/pnm.hpp"

namespace axisdesc {

// Pose of a generated silhouette. Rotation and scale are applied analytically
// to the shape primitives before rasterization, so transformed copies are
// resampling-free. articulation is a family-specific knob in [-1, 1] (finger
// pose, neck width, limb angle, ...); noise_bumps adds small rim bumps seeded
// by noise_seed.
struct ShapePose {
    double scale = 1.0;
    double rot_deg = 0.0;
    double tx = 0.0, ty = 0.0;
    double articulation = 0.0;
    int noise_bumps = 0;
    unsigned noise_seed = 1;
};

// Families: hand, star3, star4, star5, ellipse, quadruped, human, vase, tee,
// ell, ubend, comb, plane, fish (the retrieval corpus), plus dogbone, square
// and disk for topology tests. Throws PipelineError on unknown names.
// The hand family also accepts hand4 (one finger missing).
RasterImage make_shape_image(const std::string& family, const ShapePose& pose = {});

// The 14 retrieval categories.
const std::vector<std::string>& corpus_families();

struct CorpusEntry {
    std::string id;
    std::string category;
    ShapePose pose;
};

// 14 categories x 4 shapes varying in orientation, scale, articulation and
// small boundary details.
std::vector<CorpusEntry> corpus_entries();

// Writes <dir>/<id>.pgm for every corpus entry plus a corpus.txt listing
// ("<id> <category> <file>" per line). Returns the entries.
std::vector<CorpusEntry> write_corpus(const std::string& dir);

}  // namespace axisdesc
