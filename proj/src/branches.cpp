#include "varhorse/branches.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace varhorse {

double delta_modulus(const TestFunctionFamily& family, double rho, int s) {
    if (!(rho > 0.0)) throw PreconditionError("delta_modulus: rho must be > 0");
    if (s < 1 || s > family.count()) throw PreconditionError("delta_modulus: s out of range");
    double lip = family.max_lipschitz(s);
    if (lip == 0.0) return 0.1;  // all-constant family: configured cap
    return 0.99 * rho / (2.0 * lip);
}

QGCheck quasi_generic_point(const MapSystem& map, const Point& x, int n,
                            const TestFunctionFamily& family, const ReferenceMeasure& mu,
                            double rho, int s) {
    if (n < 1) throw PreconditionError("quasi_generic_point: n must be >= 1");
    if (s > family.count() || s > static_cast<int>(mu.integrals.size()))
        throw PreconditionError("quasi_generic_point: s out of range");
    std::vector<double> sums(s, 0.0);
    Point p = x;
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < s; ++i) sums[i] += family.eval(i, p);
        if (k + 1 < n) {
            p = map.forward(p);
            if (!p.finite()) throw OrbitEscape(k + 1);
        }
    }
    QGCheck out;
    out.max_residual = 0.0;
    for (int i = 0; i < s; ++i) {
        double r = std::fabs(sums[i] / n - mu.integrals[i]);
        if (r > out.max_residual) {
            out.max_residual = r;
            out.witness = i;
        }
    }
    out.pass = out.max_residual <= rho - mu.integral_error;
    if (out.pass) out.witness = -1;
    return out;
}

std::vector<std::pair<Point, int>> detect_returns(const MapSystem& map, const Rectangle& rect,
                                                  const std::vector<Point>& seeds, int n_min,
                                                  int m_max, Exec exec) {
    const int n = static_cast<int>(seeds.size());
    std::vector<int> found(n, -1);
    sweep(exec, n, [&](std::int64_t i) {
        const Point& z = seeds[i];
        if (!rect.in_core(z)) return;
        try {
            Point p = z;
            for (int m = 1; m <= m_max; ++m) {
                p = map.forward(p);
                if (!p.finite()) return;
                if (m >= n_min && rect.in_core(p)) {
                    found[i] = m;
                    return;
                }
            }
        } catch (const DynError&) {
        }
    });
    std::vector<std::pair<Point, int>> out;
    for (int i = 0; i < n; ++i)
        if (found[i] > 0) out.emplace_back(seeds[i], found[i]);
    return out;
}

namespace {

// worst chart-b residual of the source representation under f^m (nodes must
// land on the rectangle's unstable extent)
double representation_residual(const MapSystem& map, const Rectangle& rect, const Cylinder& s,
                               int m) {
    const double h = s.h;
    const int k = s.lo.affine ? 9 : static_cast<int>(s.lo.samples.size());
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
        double a = -h + 2.0 * h * j / (k - 1);
        for (const Graph1D* g : {&s.lo, &s.hi}) {
            auto img = chart_image(map, rect, {a, g->value(a, h)}, m);
            if (!img) return 1e300;
            worst = std::max(worst, std::fabs(std::fabs(img->y) - h));
        }
    }
    return worst;
}

}  // namespace

BranchResult certify_branch(const MapSystem& map, const Rectangle& rect, const ConeField& cones,
                            const Point& z, int m, const TestFunctionFamily& family,
                            const ReferenceMeasure& mu, double rho, int s,
                            const BranchBuildOptions& opt) {
    if (m < 1) throw PreconditionError("certify_branch: m must be >= 1");
    if (!rect.in_core(z)) throw PreconditionError("certify_branch: z outside the chart core");
    {
        Point fz = iterate(map, z, m);
        if (!rect.in_core(fz)) throw PreconditionError("certify_branch: f^m(z) outside the core");
    }
    BranchResult res;

    CylinderBuildOptions copt;
    copt.nodes = opt.polyline;
    copt.gamma = cones.gamma;
    copt.affine_track = map.affine_hint;

    // (a) full crossing: source and target stretch fully and stay admissible
    auto source = build_source_cylinder(map, rect, z, m, copt);
    if (!source) {
        res.fail = BranchFail::cross;
        res.detail = "source cylinder construction failed";
        return res;
    }
    auto target = build_target_cylinder(map, rect, *source, m, copt);
    if (!target) {
        res.fail = BranchFail::cross;
        res.detail = "target cylinder construction failed";
        return res;
    }
    double rep = representation_residual(map, rect, *source, m);
    if (rep > opt.tau_branch) {
        res.fail = BranchFail::cross;
        res.detail = "S -> U representation residual above tau_branch";
        return res;
    }

    // (b) cone preservation over the sampled grid
    ConeCheck cone = cone_preserved(map, rect, *source, m, cones, opt.cone_samples, opt.exec);
    if (!cone.pass) {
        res.fail = BranchFail::cone;
        res.detail = "cone field not strictly preserved";
        return res;
    }

    // (c) diameter profile against delta(rho, s)
    double delta = delta_modulus(family, rho, s);
    std::vector<double> profile = diameter_profile(map, rect, *source, m);
    double max_diam = 0.0;
    for (int j = 0; j < m; ++j) {
        max_diam = std::max(max_diam, profile[j]);
        if (profile[j] > delta) {
            res.fail = BranchFail::diam;
            res.fail_index = j;
            res.detail = "diam(f^j(S)) exceeds delta(rho, s)";
            return res;
        }
    }

    // (d) base point quasi-generic at rho/2; the branch then carries (rho, s)
    QGCheck qg = quasi_generic_point(map, z, m, family, mu, rho / 2.0, s);
    if (!qg.pass) {
        res.fail = BranchFail::qg;
        res.fail_index = qg.witness;
        res.detail = "base point not (rho/2, s, m) quasi-generic";
        return res;
    }

    HyperbolicBranch b;
    b.return_time = m;
    b.source = std::move(*source);
    b.target = std::move(*target);
    b.base_point = z;
    b.cone_certificate = cone;
    b.diameter_profile = std::move(profile);
    b.qg_certificate = {rho, s, qg.max_residual, delta, max_diam};
    b.rep_residual = rep;
    res.branch = std::move(b);
    return res;
}

namespace {

bool disjoint_from(const HyperbolicBranch& cand, const std::vector<HyperbolicBranch>& accepted,
                   double min_gap) {
    for (const auto& b : accepted) {
        if (cylinder_gap(cand.source, b.source) <= min_gap) return false;
        if (cylinder_gap(cand.target, b.target) <= min_gap) return false;
    }
    return true;
}

// true when every base point lies on the f-orbit of the first one (the
// non-atomicity rejection rule)
bool all_on_one_orbit(const MapSystem& map, const std::vector<HyperbolicBranch>& branches,
                      double tol) {
    if (branches.size() < 2) return false;
    int span = 0;
    for (const auto& b : branches) span += b.return_time;
    span *= 2;
    try {
        for (size_t j = 1; j < branches.size(); ++j) {
            bool on_orbit = false;
            Point p = branches[0].base_point;
            for (int k = 1; k <= span && !on_orbit; ++k) {
                p = map.forward(p);
                if (!p.finite()) return false;
                if (distance(p, branches[j].base_point) < tol) on_orbit = true;
            }
            if (!on_orbit) return false;
        }
    } catch (const DynError&) {
        return false;
    }
    return true;
}

}  // namespace

BranchSetResult build_branch_set(const MapSystem& map, const Rectangle& rect,
                                 const ConeField& cones, const TestFunctionFamily& family,
                                 const ReferenceMeasure& mu, double rho, int s, int n_target,
                                 const std::vector<Point>& seeds, const BranchSearchBudget& budget,
                                 const BranchBuildOptions& opt) {
    if (n_target < 1) throw PreconditionError("build_branch_set: n_target must be >= 1");
    const double min_gap = map.affine_hint ? 0.0 : 10.0 * opt.tau_branch;

    // candidate stream: every admissible return (not only the first) of every
    // seed, ordered by return time then seed index
    struct Cand {
        int m;
        int seed;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
        if (!rect.in_core(seeds[i])) continue;
        try {
            Point p = seeds[i];
            for (int m = 1; m <= budget.m_max; ++m) {
                p = map.forward(p);
                if (!p.finite()) break;
                if (m >= budget.n_min && rect.in_core(p)) cands.push_back({m, i});
            }
        } catch (const DynError&) {
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.m != b.m) return a.m < b.m;
        return a.seed < b.seed;
    });

    BranchSetResult out;
    long fails_pesin = 0, fails_cert = 0, fails_disjoint = 0;
    auto try_certify = [&](const Point& z, int m) -> BranchResult {
        ++out.attempts;
        return certify_branch(map, rect, cones, z, m, family, mu, rho, s, opt);
    };

    for (const auto& cand : cands) {
        if (static_cast<int>(out.branches.size()) >= n_target) break;
        if (out.attempts >= budget.certify_attempts) break;
        const Point& z = seeds[cand.seed];

        // membership gate: fresh Pesin certificate at the landing point
        try {
            Point fz = iterate(map, z, cand.m);
            PesinCertificate pc =
                pesin_certificate(map, fz, budget.pesin_horizon, budget.chi);
            if (pc.ell > budget.ell0) {
                ++fails_pesin;
                continue;
            }
        } catch (const DynError&) {
            ++fails_pesin;
            continue;
        }

        BranchResult res;
        try {
            res = try_certify(z, cand.m);
        } catch (const DynError&) {
            ++fails_cert;
            continue;
        }
        if (!res.ok()) {
            ++fails_cert;
            continue;
        }
        if (!disjoint_from(*res.branch, out.branches, min_gap)) {
            // repair: iterate the branch into itself, narrowing both cylinders
            bool repaired = false;
            int m_rep = cand.m;
            for (int r = 0; r < budget.repair_rounds && out.attempts < budget.certify_attempts;
                 ++r) {
                m_rep += cand.m;
                try {
                    Point p = iterate(map, z, m_rep);
                    if (!rect.in_core(p)) break;
                    BranchResult rr = try_certify(z, m_rep);
                    if (rr.ok() && disjoint_from(*rr.branch, out.branches, min_gap)) {
                        res = std::move(rr);
                        repaired = true;
                        break;
                    }
                } catch (const DynError&) {
                    break;
                }
            }
            if (!repaired) {
                ++fails_disjoint;
                continue;
            }
        }
        out.branches.push_back(std::move(*res.branch));
        // honor non-atomicity: a set living on a single periodic orbit is not
        // enough; drop the newest branch and keep looking
        if (static_cast<int>(out.branches.size()) == n_target &&
            all_on_one_orbit(map, out.branches, 1e-9)) {
            out.branches.pop_back();
            ++fails_disjoint;
        }
    }

    std::ostringstream diag;
    diag << "candidates=" << cands.size() << " attempts=" << out.attempts
         << " accepted=" << out.branches.size() << " pesin_rejects=" << fails_pesin
         << " certify_fails=" << fails_cert << " disjoint_fails=" << fails_disjoint;
    out.diagnostics = diag.str();
    if (static_cast<int>(out.branches.size()) < n_target)
        throw BudgetExhausted(static_cast<int>(out.branches.size()), out.diagnostics);
    return out;
}

}  // namespace varhorse
