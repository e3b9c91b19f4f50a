#pragma once

#include <span>
#include <string>
#include <vector>

#include "axisdesc/matcher.hpp"
#include "axisdesc/pipeline.hpp"

namespace axisdesc {

struct DbEntry {
    std::string id;
    std::string category;
    std::string source;
    std::vector<ShapeDescriptor> alternatives;
};

// Directory of .desc files plus a "manifest" text file recording the
// extraction parameters and the entry table. All entries must be extracted
// with identical parameters.
struct DescriptorDatabase {
    std::string dir;
    ExtractParams params;
    std::vector<DbEntry> entries;

    const DbEntry* find(const std::string& id) const;
};

// Adds one entry (id must be unique, id/category must be whitespace-free).
// Creates the manifest on first use; afterwards refuses mismatched params.
void db_add(const std::string& dir, const std::string& id, const std::string& category,
            const std::string& source, std::span<const ShapeDescriptor> descriptors,
            const ExtractParams& params);

DescriptorDatabase db_load(const std::string& dir);

struct QueryHit {
    std::string id;
    std::string category;
    double score = 0.0;
};

// match_multi against every entry; ranked by score, ties broken by shape id.
std::vector<QueryHit> db_query(const DescriptorDatabase& db,
                               std::span<const ShapeDescriptor> query, std::size_t k,
                               const SimilarityThresholds& thr = {},
                               MatchMode mode = MatchMode::invariant);

}  // namespace axisdesc
