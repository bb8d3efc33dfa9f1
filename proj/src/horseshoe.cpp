#include "varhorse/horseshoe.hpp"

#include <algorithm>
#include <cmath>

namespace varhorse {

void SymbolicWord::validate(int n_branches) const {
    if (letters.empty()) throw PreconditionError("symbolic word must be nonempty");
    for (int l : letters)
        if (l < 0 || l >= n_branches) throw PreconditionError("symbolic letter out of range");
}

SymbolicWord SymbolicWord::rotated(int r) const {
    SymbolicWord w = *this;
    int n = size();
    for (int j = 0; j < n; ++j) w.letters[j] = letters[((j + r) % n + n) % n];
    return w;
}

int VariableTimeHorseshoe::max_return_time() const {
    int m = 0;
    for (const auto& b : branches) m = std::max(m, b.return_time);
    return m;
}

int VariableTimeHorseshoe::word_period(const SymbolicWord& w) const {
    int p = 0;
    for (int l : w.letters) p += branches[l].return_time;
    return p;
}

double VariableTimeHorseshoe::lambda_bar() const {
    double lb = 0.0;
    for (const auto& b : branches)
        lb = std::max(lb, 1.0 / b.cone_certificate.min_expansion_u);
    return lb;
}

VariableTimeHorseshoe build_horseshoe(const MapSystem& map, const Rectangle& rect,
                                      const std::vector<HyperbolicBranch>& branches) {
    if (branches.empty()) throw PreconditionError("build_horseshoe: no branches");
    const int n = static_cast<int>(branches.size());
    for (int i = 0; i < n; ++i) {
        const auto& b = branches[i];
        if (b.source.kind != CylKind::stable || b.target.kind != CylKind::unstable)
            throw PreconditionError("build_horseshoe: branch cylinder kinds are wrong");
        if (!b.source.inside_rectangle(1e-12) || !b.target.inside_rectangle(1e-12))
            throw CrossingIncomplete(i, i);
        double gamma = b.cone_certificate.gamma;
        if (!b.source.admissible(gamma) || !b.target.admissible(gamma))
            throw CrossingIncomplete(i, i);
        if (!b.cone_certificate.pass)
            throw PreconditionError("build_horseshoe: cone certificate does not pass");
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (cylinder_gap(branches[i].source, branches[j].source) <= 0.0)
                throw PreconditionError("build_horseshoe: sources overlap");
            if (cylinder_gap(branches[i].target, branches[j].target) <= 0.0)
                throw PreconditionError("build_horseshoe: targets overlap");
        }
    VariableTimeHorseshoe h;
    h.map = map;
    h.rectangle = rect;
    h.branches = branches;
    h.degenerate = (n == 1);
    // admissible full-span cylinders inside one rectangle cross pairwise
    h.crossing_matrix.assign(n, std::vector<bool>(n, true));
    return h;
}

namespace {

// S_{i w} = f^{-m_i}(U_i \cap S_w): pull the parent's graphs back through branch i
std::optional<Cylinder> pullback_stable_child(const VariableTimeHorseshoe& h, int i,
                                              const Cylinder& parent, int nodes) {
    const auto& br = h.branches[i];
    const double hw = h.rectangle.half_width;
    Cylinder out;
    out.kind = CylKind::stable;
    out.h = hw;
    out.lo.samples.assign(nodes, 0.0);
    out.hi.samples.assign(nodes, 0.0);
    for (int j = 0; j < nodes; ++j) {
        double a = -hw + 2.0 * hw * j / (nodes - 1);
        double blo = br.source.lo.value(a, hw);
        double bhi = br.source.hi.value(a, hw);
        auto b1 = solve_fiber_on_graph(h.map, h.rectangle, a, br.return_time, blo, bhi,
                                       parent.lo, hw);
        auto b2 = solve_fiber_on_graph(h.map, h.rectangle, a, br.return_time, blo, bhi,
                                       parent.hi, hw);
        if (!b1 || !b2) return std::nullopt;
        out.lo.samples[j] = std::min(*b1, *b2);
        out.hi.samples[j] = std::max(*b1, *b2);
    }
    if (h.map.affine_hint) {
        auto fit = [&](Graph1D& g) {
            Graph1D tmp = g;
            int k = static_cast<int>(tmp.samples.size());
            double c1 = (tmp.samples[k - 1] - tmp.samples[0]) / (2.0 * hw);
            double c0 = 0.5 * (tmp.samples[k - 1] + tmp.samples[0]);
            for (int q = 0; q < k; ++q) {
                double t = -hw + 2.0 * hw * q / (k - 1);
                if (std::fabs(c0 + c1 * t - tmp.samples[q]) > 1e-12) return;
            }
            g = Graph1D::make_affine(c0, c1);
        };
        fit(out.lo);
        fit(out.hi);
    }
    return out;
}

// U_{w i} = f^{m_i}(S_i \cap U_w): push the parent's graphs forward through branch i
std::optional<Cylinder> pushforward_unstable_child(const VariableTimeHorseshoe& h, int i,
                                                   const Cylinder& parent, int nodes) {
    const auto& br = h.branches[i];
    const double hw = h.rectangle.half_width;
    auto ext = br.source.pinched_extent();
    double width = ext[1] - ext[0];
    Cylinder out;
    out.kind = CylKind::unstable;
    out.h = hw;
    std::array<std::vector<double>, 2> graphs;
    const Graph1D* parents[2] = {&parent.lo, &parent.hi};
    for (int side = 0; side < 2; ++side) {
        graphs[side].assign(nodes, 0.0);
        for (int j = 0; j < nodes; ++j) {
            double level = -hw + 2.0 * hw * j / (nodes - 1);
            std::optional<CurveLevelHit> hit;
            for (double pad : {1e-9 * hw, 0.05 * width, 0.25 * width}) {
                hit = solve_curve_to_level(h.map, h.rectangle, *parents[side], br.return_time,
                                           ext[0] - pad, ext[1] + pad, level, hw);
                if (hit) break;
            }
            if (!hit) return std::nullopt;
            graphs[side][j] = hit->a_img;
        }
    }
    double mean0 = 0.0, mean1 = 0.0;
    for (int j = 0; j < nodes; ++j) {
        mean0 += graphs[0][j];
        mean1 += graphs[1][j];
    }
    out.lo.samples = mean0 <= mean1 ? std::move(graphs[0]) : std::move(graphs[1]);
    out.hi.samples = mean0 <= mean1 ? std::move(graphs[1]) : std::move(graphs[0]);
    if (h.map.affine_hint) {
        auto fit = [&](Graph1D& g) {
            int k = static_cast<int>(g.samples.size());
            double c1 = (g.samples[k - 1] - g.samples[0]) / (2.0 * hw);
            double c0 = 0.5 * (g.samples[k - 1] + g.samples[0]);
            for (int q = 0; q < k; ++q) {
                double t = -hw + 2.0 * hw * q / (k - 1);
                if (std::fabs(c0 + c1 * t - g.samples[q]) > 1e-12) return;
            }
            g = Graph1D::make_affine(c0, c1);
        };
        fit(out.lo);
        fit(out.hi);
    }
    return out;
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
}

CylinderRefinement refine_impl(const VariableTimeHorseshoe& h, int n, const RefineOptions& opt,
                               bool parallel_levels) {
    if (n < 1) throw PreconditionError("refine: depth must be >= 1");
    const int nb = h.n_branches();
    if (ipow(nb, n) > opt.cap) throw CapExceeded("refine: N^n exceeds the enumeration cap");

    CylinderRefinement ref;
    ref.depth = n;
    // depth 1: the branch sources / targets themselves
    for (int i = 0; i < nb; ++i) {
        ref.stable_cylinders[{i}] = h.branches[i].source;
        ref.unstable_cylinders[{i}] = h.branches[i].target;
    }
    for (int level = 2; level <= n; ++level) {
        const auto prev_s = std::move(ref.stable_cylinders);
        const auto prev_u = std::move(ref.unstable_cylinders);
        ref.stable_cylinders.clear();
        ref.unstable_cylinders.clear();

        std::vector<std::pair<std::vector<int>, const Cylinder*>> parents_s, parents_u;
        for (const auto& [w, c] : prev_s) parents_s.emplace_back(w, &c);
        for (const auto& [w, c] : prev_u) parents_u.emplace_back(w, &c);

        const std::int64_t tasks = static_cast<std::int64_t>(parents_s.size()) * nb;
        std::vector<std::optional<Cylinder>> out_s(tasks), out_u(tasks);
        auto body = [&](std::int64_t t) {
            int i = static_cast<int>(t % nb);
            std::int64_t p = t / nb;
            out_s[t] = pullback_stable_child(h, i, *parents_s[p].second, opt.nodes);
            out_u[t] = pushforward_unstable_child(h, i, *parents_u[p].second, opt.nodes);
        };
        sweep(parallel_levels ? opt.exec : Exec::serial, tasks, body);

        for (std::int64_t t = 0; t < tasks; ++t) {
            int i = static_cast<int>(t % nb);
            std::int64_t p = t / nb;
            if (!out_s[t] || !out_u[t])
                throw DynError("refine: cylinder pullback failed at depth " +
                               std::to_string(level));
            std::vector<int> ws;  // stable: prepend branch letter
            ws.push_back(i);
            ws.insert(ws.end(), parents_s[p].first.begin(), parents_s[p].first.end());
            ref.stable_cylinders[std::move(ws)] = std::move(*out_s[t]);
            std::vector<int> wu = parents_u[p].first;  // unstable: append branch letter
            wu.push_back(i);
            ref.unstable_cylinders[std::move(wu)] = std::move(*out_u[t]);
        }
    }
    for (const auto& [w, c] : ref.stable_cylinders)
        ref.max_diameter_unstable = std::max(ref.max_diameter_unstable, c.max_width());
    for (const auto& [w, c] : ref.unstable_cylinders)
        ref.max_diameter_stable = std::max(ref.max_diameter_stable, c.max_width());
    return ref;
}

}  // namespace

CylinderRefinement refine(const VariableTimeHorseshoe& h, int n, const RefineOptions& opt) {
    return refine_impl(h, n, opt, true);
}

CylinderRefinement refine_serial_reference(const VariableTimeHorseshoe& h, int n,
                                           const RefineOptions& opt) {
    return refine_impl(h, n, opt, false);
}

namespace {

// fold a word into one stable cylinder, right to left; stops once the width
// saturates double resolution
Cylinder stable_cylinder_of_word(const VariableTimeHorseshoe& h, const std::vector<int>& word,
                                 int nodes) {
    const double hw = h.rectangle.half_width;
    Cylinder s = h.branches[word.back()].source;
    for (int j = static_cast<int>(word.size()) - 2; j >= 0; --j) {
        if (s.max_width() < 64.0 * 2.2e-16 * hw) break;
        auto next = pullback_stable_child(h, word[j], s, nodes);
        if (!next) throw DynError("stable_cylinder_of_word: pullback failed");
        s = std::move(*next);
    }
    return s;
}

Cylinder unstable_cylinder_of_word(const VariableTimeHorseshoe& h, const std::vector<int>& word,
                                   int nodes) {
    const double hw = h.rectangle.half_width;
    Cylinder u = h.branches[word.front()].target;
    for (size_t j = 1; j < word.size(); ++j) {
        if (u.max_width() < 64.0 * 2.2e-16 * hw) break;
        auto next = pushforward_unstable_child(h, word[j], u, nodes);
        if (!next) throw DynError("unstable_cylinder_of_word: pushforward failed");
        u = std::move(*next);
    }
    return u;
}

}  // namespace

CodedPoint point_from_word(const VariableTimeHorseshoe& h, const SymbolicWord& past,
                           const SymbolicWord& future, int nodes) {
    past.validate(h.n_branches());
    future.validate(h.n_branches());
    if (past.size() > 256 || future.size() > 256)
        throw CapExceeded("point_from_word: word depth exceeds cap");
    Cylinder s = stable_cylinder_of_word(h, future.letters, nodes);
    Cylinder u = unstable_cylinder_of_word(h, past.letters, nodes);
    const double hw = h.rectangle.half_width;

    // intersection of a flat b-strip with a flat a-strip: alternate projections
    double a = 0.5 * (u.lo.value(0.0, hw) + u.hi.value(0.0, hw));
    double b = 0.5 * (s.lo.value(a, hw) + s.hi.value(a, hw));
    for (int it = 0; it < 64; ++it) {
        double na = 0.5 * (u.lo.value(b, hw) + u.hi.value(b, hw));
        double nb = 0.5 * (s.lo.value(na, hw) + s.hi.value(na, hw));
        if (std::fabs(na - a) + std::fabs(nb - b) < 1e-17) {
            a = na;
            b = nb;
            break;
        }
        a = na;
        b = nb;
    }
    double gamma = h.branches[0].cone_certificate.gamma;
    double chart_rad = (s.max_width() + u.max_width()) * (1.0 + gamma);
    chart_rad = std::max(chart_rad, 16.0 * 2.2e-16 * hw);
    Mat2 frame = Mat2::columns(h.rectangle.frame_s, h.rectangle.frame_u);
    CodedPoint out;
    out.point = h.rectangle.from_chart({a, b});
    out.error_radius = chart_rad * h.rectangle.scale * frame.sigma_max();
    return out;
}

std::vector<Point> saturate_orbit(const VariableTimeHorseshoe& h, const SymbolicWord& itinerary,
                                  int length, double* error_radius_out) {
    if (itinerary.kind != SymbolicWord::Kind::periodic)
        throw PreconditionError("saturate_orbit: itinerary must be periodic");
    itinerary.validate(h.n_branches());
    if (length < 1) throw PreconditionError("saturate_orbit: length must be >= 1");

    const int wl = itinerary.size();
    // depth sufficient to saturate double resolution at the slowest contraction
    double lb = std::min(h.lambda_bar(), 0.9);
    int depth = std::min(128, std::max(wl, static_cast<int>(std::ceil(40.0 / -std::log10(lb))) + 2));

    // anchors: the coded return points of the rotated itineraries (periodic,
    // so only wl distinct ones)
    std::vector<Point> anchors(wl);
    double worst_rad = 0.0;
    for (int r = 0; r < wl; ++r) {
        SymbolicWord fut{.letters = {}, .kind = SymbolicWord::Kind::forward};
        SymbolicWord pas{.letters = {}, .kind = SymbolicWord::Kind::backward};
        for (int j = 0; j < depth; ++j) fut.letters.push_back(itinerary.letters[(r + j) % wl]);
        for (int j = depth; j >= 1; --j)
            pas.letters.push_back(itinerary.letters[((r - j) % wl + wl) % wl]);
        CodedPoint cp = point_from_word(h, pas, fut, 5);
        anchors[r] = cp.point;
        worst_rad = std::max(worst_rad, cp.error_radius);
    }
    if (error_radius_out) *error_radius_out = worst_rad;

    std::vector<Point> orbit;
    orbit.reserve(length);
    int r = 0;
    Point p = anchors[0];
    int offset = 0;
    for (int j = 0; j < length; ++j) {
        orbit.push_back(p);
        ++offset;
        if (offset >= h.branches[itinerary.letters[r % wl]].return_time) {
            ++r;
            offset = 0;
            p = anchors[r % wl];  // re-anchor at the next return: no drift build-up
        } else {
            p = h.map.forward(p);
            if (!p.finite()) throw OrbitEscape(j + 1);
        }
    }
    return orbit;
}

}  // namespace varhorse
