#include "axisdesc/pipeline.hpp"

#include <cmath>
#include <cstdio>

namespace axisdesc {

namespace {

std::string fmt_param(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback, const std::string& origin) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw PipelineError(origin + ": bad value for " + key + ": " + it->second);
    }
}

}  // namespace

std::map<std::string, std::string> ExtractParams::to_key_values() const {
    return {
        {"mode", mode == FieldMode::screened ? "screened" : "diffusion"},
        {"rho", fmt_param(rho)},
        {"tau-start", fmt_param(tau_start)},
        {"tau-growth", fmt_param(tau_growth)},
        {"tau-max", fmt_param(tau_max)},
        {"target", target == AnnealTarget::retain_dumbbell ? "dumbbell" : "center"},
        {"fg-threshold", std::to_string(fg_threshold)},
        {"min-length", fmt_param(min_length)},
    };
}

ExtractParams ExtractParams::from_key_values(const std::map<std::string, std::string>& kv,
                                             const std::string& origin_hint) {
    ExtractParams p;
    for (const auto& [key, value] : kv) {
        if (key == "mode") {
            if (value == "screened") {
                p.mode = FieldMode::screened;
            } else if (value == "diffusion") {
                p.mode = FieldMode::diffusion;
            } else {
                throw PipelineError(origin_hint + ": bad mode " + value);
            }
        } else if (key == "target") {
            if (value == "dumbbell") {
                p.target = AnnealTarget::retain_dumbbell;
            } else if (value == "center") {
                p.target = AnnealTarget::single_center;
            } else {
                throw PipelineError(origin_hint + ": bad target " + value);
            }
        } else if (key != "rho" && key != "tau-start" && key != "tau-growth" &&
                   key != "tau-max" && key != "fg-threshold" && key != "min-length") {
            throw PipelineError(origin_hint + ": unknown parameter " + key);
        }
    }
    p.rho = parse_double(kv, "rho", p.rho, origin_hint);
    p.tau_start = parse_double(kv, "tau-start", p.tau_start, origin_hint);
    p.tau_growth = parse_double(kv, "tau-growth", p.tau_growth, origin_hint);
    p.tau_max = parse_double(kv, "tau-max", p.tau_max, origin_hint);
    p.fg_threshold =
        static_cast<int>(parse_double(kv, "fg-threshold", p.fg_threshold, origin_hint));
    p.min_length = parse_double(kv, "min-length", p.min_length, origin_hint);
    return p;
}

namespace {

struct FieldStage {
    Field field;
    std::vector<CriticalPoint> criticals;
    Topology topology = Topology::single_center;
    CriticalPoint origin;
};

FieldStage screened_stage(const ShapeMask& mask, const ExtractParams& params) {
    FieldStage s;
    s.field = solve_screened(mask, params.rho);
    s.criticals = significant_criticals(cluster_criticals(
        find_critical_points(s.field),
        std::max(2.0, 0.05 * std::sqrt(static_cast<double>(mask.interior_count)))));
    int n_ell = 0, n_hyp = 0;
    for (const CriticalPoint& c : s.criticals) {
        (c.kind == CriticalKind::elliptic ? n_ell : n_hyp)++;
    }
    if (n_ell == 1 && n_hyp == 0) {
        s.topology = Topology::single_center;
        s.origin = s.criticals.front();
    } else if (params.target == AnnealTarget::retain_dumbbell && n_ell == 2 && n_hyp == 1) {
        s.topology = Topology::dumbbell;
        for (const CriticalPoint& c : s.criticals) {
            if (c.kind == CriticalKind::hyperbolic) s.origin = c;
        }
    } else {
        throw TopologyError("screened field has " + std::to_string(n_ell) + " elliptic and " +
                            std::to_string(n_hyp) +
                            " hyperbolic points; raise rho or use diffusion mode");
    }
    return s;
}

FieldStage diffusion_stage(const ShapeMask& mask, const ExtractParams& params) {
    DiffusionSchedule sched = DiffusionSchedule::defaults_for(mask, params.target);
    if (params.tau_start > 0.0) sched.tau_start = params.tau_start;
    if (params.tau_growth > 1.0) sched.growth_factor = params.tau_growth;
    sched.tau_max = params.tau_max > 0.0 ? params.tau_max : 64.0 * sched.tau_start;
    AnnealResult ar = anneal_to_center(mask, sched);
    return {std::move(ar.field), std::move(ar.criticals), ar.topology, ar.center};
}

}  // namespace

namespace {

ExtractResult extract_from_stage(FieldStage stage, const ShapeMask& mask,
                                 const ExtractParams& params);

}  // namespace

// A single-center shape may reach one resolved elliptic point before its
// level curves have evolved enough for major branches to flow into the
// center (n-fold symmetric masks are the worst case). When anchoring fails,
// the diffusion trajectory is continued along the schedule and the symmetry
// stages run again.
ExtractResult run_extraction(ShapeMask mask, const ExtractParams& params) {
    FieldStage stage;
    try {
        stage = params.mode == FieldMode::screened ? screened_stage(mask, params)
                                                   : diffusion_stage(mask, params);
    } catch (const TopologyError&) {
        throw;
    } catch (const PipelineError& e) {
        throw PipelineError(std::string("field stage: ") + e.what());
    }

    const double tau_start = params.tau_start > 0.0
                                 ? params.tau_start
                                 : DiffusionSchedule::defaults_for(mask).tau_start;
    const double growth = params.tau_growth > 1.0 ? params.tau_growth : 2.0;
    const double tau_max = params.tau_max > 0.0 ? params.tau_max : 64.0 * tau_start;
    const double cluster_radius =
        std::max(2.0, 0.05 * std::sqrt(static_cast<double>(mask.interior_count)));

    const auto restage = [&](FieldStage& st, Field f) {
        st.field = std::move(f);
        st.criticals = significant_criticals(
            cluster_criticals(find_critical_points(st.field), cluster_radius));
        int n_ell = 0;
        for (const CriticalPoint& c : st.criticals) {
            if (c.kind == CriticalKind::elliptic) {
                ++n_ell;
                st.origin = c;
            }
        }
        return n_ell == 1;
    };

    FieldStage low = stage;  // highest tau known to fail anchoring
    bool have_low = false;
    while (true) {
        try {
            ExtractResult out = extract_from_stage(stage, mask, params);
            // Anchoring succeeded; land on the smallest anchorable tau so
            // rescaled copies stop at comparable evolution levels.
            while (have_low && stage.field.tau / low.field.tau > 1.2) {
                const double mid = std::sqrt(stage.field.tau * low.field.tau);
                FieldStage probe = low;
                if (!restage(probe, continue_diffusion(probe.field, mid))) break;
                try {
                    out = extract_from_stage(probe, mask, params);
                    stage = std::move(probe);
                } catch (const PipelineError&) {
                    low = std::move(probe);
                }
            }
            return out;
        } catch (const PipelineError& e) {
            const bool anchoring = std::string(e.what()).find("insufficient major axes") !=
                                   std::string::npos;
            const bool can_retry = anchoring && params.mode == FieldMode::diffusion &&
                                   stage.topology == Topology::single_center &&
                                   stage.field.tau * growth <= tau_max * (1.0 + 1e-12);
            if (!can_retry) throw;
            low = stage;
            have_low = true;
            if (!restage(stage, continue_diffusion(std::move(stage.field),
                                                   stage.field.tau * growth))) {
                throw;  // the smoothed-out field lost its center
            }
        }
    }
}

namespace {

ExtractResult extract_from_stage(FieldStage stage, const ShapeMask& mask,
                                 const ExtractParams& params) {
    ExtractResult out;
    (void)mask;

    out.field = std::move(stage.field);
    out.criticals = std::move(stage.criticals);
    out.topology = stage.topology;
    out.origin = stage.origin;
    out.mask = out.field.mask;

    const std::vector<SymmetryPoint> points = detect_symmetry_points(out.field);
    std::vector<SymmetryBranch> grouped = group_branches(points, out.field, out.criticals);
    grouped = drop_rim_noise(std::move(grouped), out.field, out.criticals);
    const double min_len =
        params.min_length >= 0.0 ? params.min_length : default_min_length(out.mask);
    grouped = prune(std::move(grouped), min_len, out.field, out.criticals);
    out.branches = drop_minor_branches(std::move(grouped), 0.03, out.field, out.criticals);

    if (out.topology == Topology::dumbbell) {
        try {
            for (FramePair& fp : dumbbell_frames(out.criticals, out.branches, out.field)) {
                out.alternatives.push_back({fp, out.origin.cell, Topology::dumbbell});
            }
        } catch (const PipelineError& saddle_err) {
            // Per-lobe fallback: one single-center descriptor set per elliptic
            // point of the dumbbell.
            for (const CriticalPoint& c : out.criticals) {
                if (c.kind != CriticalKind::elliptic) continue;
                const MajorAxes majors = find_major_axes(out.branches, c, out.field);
                if (majors.positive.size() < 2) continue;
                for (FramePair& fp :
                     build_frames(out.branches, majors.positive, c.cell, out.field)) {
                    out.alternatives.push_back({fp, c.cell, Topology::single_center});
                }
            }
            if (out.alternatives.empty()) {
                throw PipelineError(std::string("descriptor stage: ") + saddle_err.what());
            }
            out.dumbbell_fallback = true;
        }
    } else {
        const MajorAxes majors = find_major_axes(out.branches, out.origin, out.field);
        try {
            for (FramePair& fp :
                 build_frames(out.branches, majors.positive, out.origin.cell, out.field)) {
                out.alternatives.push_back({fp, out.origin.cell, Topology::single_center});
            }
        } catch (const PipelineError& e) {
            throw PipelineError(std::string("descriptor stage: ") + e.what() + " (interior " +
                                std::to_string(out.mask.interior_count) + " cells, " +
                                std::to_string(out.branches.size()) + " branches)");
        }
    }

    out.descriptors.reserve(out.alternatives.size());
    for (const ExtractResult::Alternative& alt : out.alternatives) {
        out.descriptors.push_back(
            build_descriptor(out.branches, alt.frames, alt.origin, out.field, alt.topology));
    }
    return out;
}

}  // namespace

ExtractResult extract_file(const std::string& path, const ExtractParams& params) {
    return run_extraction(load_mask(path, params.fg_threshold), params);
}

std::string descriptor_path(const std::string& base, std::size_t alternative) {
    if (alternative == 0) return base + ".desc";
    return base + ".alt" + std::to_string(alternative) + ".desc";
}

}  // namespace axisdesc
