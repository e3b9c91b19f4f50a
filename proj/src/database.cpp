#include "axisdesc/database.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace axisdesc {

namespace {

const char* kManifestName = "manifest";

struct Manifest {
    ExtractParams params;
    struct Row {
        std::string id, category, source;
        std::size_t n_alts = 0;
    };
    std::vector<Row> rows;
};

Manifest read_manifest(const std::string& dir) {
    const std::string path = dir + "/" + kManifestName;
    std::ifstream in(path);
    if (!in) throw PipelineError(path + ": cannot open manifest");
    std::string line;
    if (!std::getline(in, line) || line != "AXISDB 1") {
        throw PipelineError(path + ": missing AXISDB 1 header");
    }
    Manifest m;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "param") {
            std::string key, value;
            if (!(ls >> key >> value)) throw PipelineError(path + ": bad param line: " + line);
            kv[key] = value;
        } else if (tag == "entry") {
            Manifest::Row r;
            if (!(ls >> r.id >> r.category >> r.n_alts)) {
                throw PipelineError(path + ": bad entry line: " + line);
            }
            std::getline(ls, r.source);
            if (!r.source.empty() && r.source.front() == ' ') r.source.erase(0, 1);
            m.rows.push_back(std::move(r));
        } else {
            throw PipelineError(path + ": unknown manifest line: " + line);
        }
    }
    m.params = ExtractParams::from_key_values(kv, path);
    return m;
}

void write_manifest(const std::string& dir, const Manifest& m) {
    const std::string path = dir + "/" + kManifestName;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError(path + ": cannot open for writing");
    out << "AXISDB 1\n";
    for (const auto& [key, value] : m.params.to_key_values()) {
        out << "param " << key << " " << value << "\n";
    }
    for (const Manifest::Row& r : m.rows) {
        out << "entry " << r.id << " " << r.category << " " << r.n_alts << " " << r.source
            << "\n";
    }
    if (!out) throw PipelineError(path + ": write failed");
}

bool token_ok(const std::string& s) {
    return !s.empty() && s.find_first_of(" \t\n\r") == std::string::npos;
}

}  // namespace

const DbEntry* DescriptorDatabase::find(const std::string& id) const {
    for (const DbEntry& e : entries) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

void db_add(const std::string& dir, const std::string& id, const std::string& category,
            const std::string& source, std::span<const ShapeDescriptor> descriptors,
            const ExtractParams& params) {
    if (!token_ok(id) || !token_ok(category)) {
        throw PipelineError("db_add: id and category must be non-empty single tokens");
    }
    if (descriptors.empty()) throw PipelineError("db_add: no descriptors for " + id);
    std::filesystem::create_directories(dir);

    Manifest m;
    if (std::filesystem::exists(dir + "/" + kManifestName)) {
        m = read_manifest(dir);
        if (!(m.params == params)) {
            throw PipelineError(dir + ": extraction parameters differ from the manifest; "
                                      "rebuild the database or match the recorded parameters");
        }
        for (const Manifest::Row& r : m.rows) {
            if (r.id == id) throw PipelineError(dir + ": duplicate shape id " + id);
        }
    } else {
        m.params = params;
    }

    for (std::size_t k = 0; k < descriptors.size(); ++k) {
        save_descriptor(descriptors[k], dir + "/" + descriptor_path(id, k));
    }
    m.rows.push_back({id, category, source, descriptors.size()});
    write_manifest(dir, m);
}

DescriptorDatabase db_load(const std::string& dir) {
    Manifest m = read_manifest(dir);
    DescriptorDatabase db;
    db.dir = dir;
    db.params = m.params;
    for (const Manifest::Row& r : m.rows) {
        DbEntry e;
        e.id = r.id;
        e.category = r.category;
        e.source = r.source;
        for (std::size_t k = 0; k < r.n_alts; ++k) {
            e.alternatives.push_back(load_descriptor(dir + "/" + descriptor_path(r.id, k)));
        }
        db.entries.push_back(std::move(e));
    }
    return db;
}

std::vector<QueryHit> db_query(const DescriptorDatabase& db,
                               std::span<const ShapeDescriptor> query, std::size_t k,
                               const SimilarityThresholds& thr, MatchMode mode) {
    if (db.entries.empty()) throw PipelineError(db.dir + ": empty database");
    if (k < 1) throw PipelineError("db_query: k must be >= 1");
    std::vector<QueryHit> hits;
    hits.reserve(db.entries.size());
    for (const DbEntry& e : db.entries) {
        const MatchResult r = match_multi(query, e.alternatives, thr, mode);
        hits.push_back({e.id, e.category, r.total});
    }
    std::sort(hits.begin(), hits.end(), [](const QueryHit& a, const QueryHit& b) {
        return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

}  // namespace axisdesc
