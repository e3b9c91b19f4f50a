// axisdesc: axis-based 2D shape description and matching.
//
// Subcommands: extract | match | query | render | gen-corpus.
// Exit codes: 0 ok, 1 usage, 2 pipeline failure, 3 topology unresolved.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "axisdesc/corpus.hpp"
#include "axisdesc/database.hpp"
#include "axisdesc/kernels.hpp"
#include "axisdesc/matcher.hpp"
#include "axisdesc/pipeline.hpp"
#include "axisdesc/render.hpp"

namespace {

using namespace axisdesc;

std::string fmt3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

struct ExtractFlags {
    ExtractParams params;
    std::string mode = "diffusion";
    std::string target = "center";
    int explicit_count = 0;

    void attach(CLI::App* cmd) {
        auto track = [this](CLI::Option* o) { o->each([this](const std::string&) { ++explicit_count; }); };
        track(cmd->add_option("--mode", mode, "Field mode: screened|diffusion")
                  ->check(CLI::IsMember({"screened", "diffusion"})));
        track(cmd->add_option("--rho", params.rho, "Screening length (screened mode)"));
        track(cmd->add_option("--tau-start", params.tau_start,
                              "First diffusion time (0 = max(w,h)/4)"));
        track(cmd->add_option("--tau-growth", params.tau_growth, "Schedule growth factor"));
        track(cmd->add_option("--tau-max", params.tau_max,
                              "Diffusion time cap (0 = 64*tau_start)"));
        track(cmd->add_option("--target", target, "Annealing target: center|dumbbell")
                  ->check(CLI::IsMember({"center", "dumbbell"})));
        track(cmd->add_option("--fg-threshold", params.fg_threshold,
                              "Foreground gray threshold (pixel < threshold)")
                  ->check(CLI::Range(0, 255)));
        track(cmd->add_option("--min-length", params.min_length,
                              "Pruning length in pixels (<0 = 3% of sqrt(area))"));
    }

    ExtractParams resolve() {
        params.mode = mode == "screened" ? FieldMode::screened : FieldMode::diffusion;
        params.target =
            target == "dumbbell" ? AnnealTarget::retain_dumbbell : AnnealTarget::single_center;
        return params;
    }
};

struct MatchFlags {
    SimilarityThresholds thr;
    std::string mode = "invariant";

    void attach(CLI::App* cmd) {
        cmd->add_option("--mode", mode, "Scoring mode: invariant|variant")
            ->check(CLI::IsMember({"invariant", "variant"}));
        cmd->add_option("--thr-r", thr.r_thr, "Radial similarity threshold");
        cmd->add_option("--thr-theta", thr.theta_thr, "Angular similarity threshold (rad)");
        cmd->add_option("--thr-len", thr.len_thr, "Length similarity threshold");
    }

    MatchMode match_mode() const {
        return mode == "variant" ? MatchMode::variant : MatchMode::invariant;
    }
};

void print_match(const MatchResult& r) {
    std::cout << "total " << fmt3(r.total) << "\n";
    for (const MatchResult::Pair& p : r.pairs) {
        std::cout << "pair " << p.a << " " << p.b << " " << fmt3(p.score) << "\n";
    }
    for (int i : r.unmatched_a) std::cout << "unmatched a " << i << "\n";
    for (int i : r.unmatched_b) std::cout << "unmatched b " << i << "\n";
}

std::string default_base(const std::string& image) {
    std::filesystem::path p(image);
    p.replace_extension();
    return p.string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Axis-based shape descriptor toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value config file; CLI flags override");
    std::string kernels_backend;
    app.add_option("--kernels", kernels_backend, "Force kernel backend: scalar|avx2")
        ->check(CLI::IsMember({"scalar", "avx2"}));

    // extract
    auto* cmd_extract = app.add_subcommand("extract", "Extract shape descriptors from an image");
    std::string ex_image, ex_out, ex_db, ex_id, ex_category = "none", ex_field, ex_svg;
    cmd_extract->add_option("image", ex_image, "Input PGM/PBM image")->required();
    cmd_extract->add_option("--out", ex_out, "Output base path (default: image sans extension)");
    cmd_extract->add_option("--db", ex_db, "Add to a descriptor database directory");
    cmd_extract->add_option("--id", ex_id, "Shape id (required with --db)");
    cmd_extract->add_option("--category", ex_category, "Category label for the database entry");
    cmd_extract->add_option("--dump-field", ex_field, "Write the solved field grid");
    cmd_extract->add_option("--render", ex_svg, "Write an SVG overlay of axes and frames");
    ExtractFlags ex_flags;
    ex_flags.attach(cmd_extract);

    // match
    auto* cmd_match = app.add_subcommand("match", "Match two descriptor files");
    std::string ma_a, ma_b;
    cmd_match->add_option("a", ma_a, "First .desc file")->required();
    cmd_match->add_option("b", ma_b, "Second .desc file")->required();
    MatchFlags ma_flags;
    ma_flags.attach(cmd_match);

    // query
    auto* cmd_query = app.add_subcommand("query", "Rank database entries against a query image");
    std::string qu_db, qu_image;
    std::size_t qu_k = 5;
    cmd_query->add_option("db", qu_db, "Database directory")->required();
    cmd_query->add_option("image", qu_image, "Query image")->required();
    cmd_query->add_option("-k,--top", qu_k, "Number of results");
    MatchFlags qu_match;
    qu_match.attach(cmd_query);
    ExtractFlags qu_flags;
    qu_flags.attach(cmd_query);

    // render
    auto* cmd_render = app.add_subcommand("render", "Render the axes of an image to SVG");
    std::string re_image, re_svg = "axes.svg";
    cmd_render->add_option("image", re_image, "Input image")->required();
    cmd_render->add_option("--axes", re_svg, "Output SVG path");
    ExtractFlags re_flags;
    re_flags.attach(cmd_render);

    // gen-corpus
    auto* cmd_gen = app.add_subcommand("gen-corpus", "Generate the synthetic shape corpus");
    std::string gc_dir;
    cmd_gen->add_option("dir", gc_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!kernels_backend.empty()) kernels::force_backend(kernels_backend);

        if (*cmd_extract) {
            const ExtractParams params = ex_flags.resolve();
            const ExtractResult res = extract_file(ex_image, params);
            if (!ex_db.empty()) {
                if (ex_id.empty()) throw PipelineError("extract: --db requires --id");
                db_add(ex_db, ex_id, ex_category, ex_image, res.descriptors, params);
                std::cout << "added " << ex_id << " (" << res.descriptors.size()
                          << (res.descriptors.size() == 1 ? " descriptor)" : " descriptors)")
                          << " to " << ex_db << "\n";
            } else {
                const std::string base = ex_out.empty() ? default_base(ex_image) : ex_out;
                for (std::size_t k = 0; k < res.descriptors.size(); ++k) {
                    const std::string path = descriptor_path(base, k);
                    save_descriptor(res.descriptors[k], path);
                    std::cout << "wrote " << path << "\n";
                }
            }
            if (!ex_field.empty()) {
                write_field(res.field, ex_field);
                std::cout << "wrote " << ex_field << "\n";
            }
            if (!ex_svg.empty()) {
                render_svg(res, ex_svg);
                std::cout << "wrote " << ex_svg << "\n";
            }
        } else if (*cmd_match) {
            const ShapeDescriptor a = load_descriptor(ma_a);
            const ShapeDescriptor b = load_descriptor(ma_b);
            print_match(match_shapes(a, b, ma_flags.thr, ma_flags.match_mode()));
        } else if (*cmd_query) {
            const DescriptorDatabase db = db_load(qu_db);
            ExtractParams params = db.params;
            if (qu_flags.explicit_count > 0 && !(qu_flags.resolve() == db.params)) {
                throw PipelineError(qu_db +
                                    ": query extraction parameters differ from the manifest");
            }
            const ExtractResult res = extract_file(qu_image, params);
            const std::vector<QueryHit> hits =
                db_query(db, res.descriptors, qu_k, qu_match.thr, qu_match.match_mode());
            std::cout << "query " << qu_image << "\n";
            for (std::size_t i = 0; i < hits.size(); ++i) {
                std::cout << (i + 1) << " " << hits[i].id << " " << hits[i].category << " "
                          << fmt3(hits[i].score) << "\n";
            }
        } else if (*cmd_render) {
            const ExtractParams params = re_flags.resolve();
            ExtractResult res;
            try {
                res = extract_file(re_image, params);
            } catch (const PipelineError&) {
                // Frames are optional in a rendering: retry without the
                // descriptor stage by rebuilding the partial result.
                const ShapeMask mask = load_mask(re_image, params.fg_threshold);
                ExtractParams relaxed = params;
                res.mask = mask;
                DiffusionSchedule sched = DiffusionSchedule::defaults_for(mask, relaxed.target);
                if (relaxed.tau_start > 0) sched.tau_start = relaxed.tau_start;
                if (relaxed.tau_growth > 1) sched.growth_factor = relaxed.tau_growth;
                if (relaxed.tau_max > 0) sched.tau_max = relaxed.tau_max;
                AnnealResult ar = relaxed.mode == FieldMode::screened
                                      ? AnnealResult{solve_screened(mask, relaxed.rho),
                                                     {},
                                                     {},
                                                     Topology::single_center}
                                      : anneal_to_center(mask, sched);
                res.field = std::move(ar.field);
                res.criticals = ar.criticals.empty() ? find_critical_points(res.field)
                                                     : std::move(ar.criticals);
                const auto pts = detect_symmetry_points(res.field);
                auto grouped = group_branches(pts, res.field, res.criticals);
                const double min_len = relaxed.min_length >= 0
                                           ? relaxed.min_length
                                           : default_min_length(mask);
                res.branches = prune(std::move(grouped), min_len, res.field, res.criticals);
            }
            render_svg(res, re_svg);
            std::cout << "wrote " << re_svg << "\n";
        } else if (*cmd_gen) {
            const auto entries = write_corpus(gc_dir);
            std::cout << "wrote " << entries.size() << " shapes to " << gc_dir << "\n";
        }
    } catch (const TopologyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
