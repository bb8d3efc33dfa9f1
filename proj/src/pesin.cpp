#include "varhorse/pesin.hpp"

#include <cmath>

namespace varhorse {

PesinCertificate pesin_certificate(const MapSystem& map, const Point& x, int n, double chi) {
    if (chi <= 0.0) throw PreconditionError("pesin_certificate: chi must be > 0");
    if (n < 1) throw PreconditionError("pesin_certificate: n must be >= 1");
    SplittingEstimate split = oseledec_splitting_estimate(map, x, n, n);

    // log ell must dominate, for every 0 <= k <= n:
    //   log|Df^k e_s| + k chi,   k chi - log|Df^-k e_s|,
    //   log|Df^-k e_u| + k chi,  k chi - log|Df^k e_u|,
    // plus -log(angle) and 0.
    double log_ell = std::max(0.0, -std::log(split.angle));
    MapSystem inv = inverse_system(map);

    auto sweep = [&](const MapSystem& sys, Vec2 v, bool contracting) {
        Point p = x;
        double log_norm = 0.0;
        for (int k = 1; k <= n; ++k) {
            Mat2 j = sys.jacobian(p);
            Vec2 w = j * v;
            double growth = w.norm();
            if (!(growth > 0.0)) throw DegenerateCocycle(k);
            log_norm += std::log(growth);
            v = w / growth;
            double term = contracting ? log_norm + k * chi : k * chi - log_norm;
            log_ell = std::max(log_ell, term);
            p = sys.forward(p);
            if (!p.finite()) throw OrbitEscape(k);
        }
    };
    sweep(map, split.e_s, true);    // |Df^k e_s| <= ell e^{-k chi}
    sweep(inv, split.e_s, false);   // |Df^-k e_s| >= ell^-1 e^{k chi}
    sweep(inv, split.e_u, true);    // |Df^-k e_u| <= ell e^{-k chi}
    sweep(map, split.e_u, false);   // |Df^k e_u| >= ell^-1 e^{k chi}

    double raw = std::exp(log_ell);
    if (raw > 1e6) throw NoFiniteCertificate(raw);
    // minimal ell to resolution 1e-3, never below 1
    double ell = std::ceil(raw * 1000.0 - 1e-9) / 1000.0;
    ell = std::max(ell, 1.0);

    PesinCertificate cert;
    cert.base_point = x;
    cert.horizon = n;
    cert.chi = chi;
    cert.ell = ell;
    cert.e_s = split.e_s;
    cert.e_u = split.e_u;
    cert.angle = split.angle;
    return cert;
}

Rectangle build_rectangle(const MapSystem& map, const PesinCertificate& cert, double h) {
    if (!(h > 0.0) || h > 1.0) throw PreconditionError("build_rectangle: h must be in (0, 1]");
    Mat2 f = Mat2::columns(cert.e_s, cert.e_u);
    double dt = std::fabs(f.det());
    if (dt < 1e-9) throw ChartDegenerate();
    double gram_inv_norm = f.inverse().sigma_max();
    gram_inv_norm *= gram_inv_norm;  // |(F^T F)^-1| = sigma_max(F^-1)^2
    const double rho_chart = 0.25;
    double scale = std::min(rho_chart, 1.0 / (4.0 * gram_inv_norm)) * 0.5;
    if (!(scale > 0.0)) throw ChartDegenerate();
    // chart injectivity on the torus: image diameter under half the period
    if (map.space == Space::torus2 && 2.0 * scale * h * f.sigma_max() >= 0.5)
        throw ChartDegenerate();
    Rectangle r;
    r.center = cert.base_point;
    r.half_width = h;
    r.frame_s = cert.e_s;
    r.frame_u = cert.e_u;
    r.scale = scale;
    r.cert_ell = cert.ell;
    return r;
}

double Graph1D::value(double t, double h) const {
    if (affine) return c0 + c1 * t;
    int k = static_cast<int>(samples.size());
    if (k == 1) return samples[0];
    double s = (t + h) / (2.0 * h) * (k - 1);
    int i = std::min(std::max(static_cast<int>(std::floor(s)), 0), k - 2);
    double frac = s - i;
    return samples[i] + frac * (samples[i + 1] - samples[i]);
}

double Graph1D::max_abs_slope(double h) const {
    if (affine) return std::fabs(c1);
    int k = static_cast<int>(samples.size());
    if (k < 2) return 0.0;
    double dt = 2.0 * h / (k - 1);
    double m = 0.0;
    for (int i = 0; i + 1 < k; ++i) m = std::max(m, std::fabs(samples[i + 1] - samples[i]) / dt);
    return m;
}

double Graph1D::min_value(double h) const {
    if (affine) return c0 - std::fabs(c1) * h;
    double m = samples[0];
    for (double v : samples) m = std::min(m, v);
    return m;
}

double Graph1D::max_value(double h) const {
    if (affine) return c0 + std::fabs(c1) * h;
    double m = samples[0];
    for (double v : samples) m = std::max(m, v);
    return m;
}

Graph1D Graph1D::constant(double v) {
    Graph1D g;
    g.affine = true;
    g.c0 = v;
    g.c1 = 0.0;
    return g;
}

Graph1D Graph1D::make_affine(double c0, double c1) {
    Graph1D g;
    g.affine = true;
    g.c0 = c0;
    g.c1 = c1;
    return g;
}

double Cylinder::max_width() const {
    if (lo.affine && hi.affine) {
        // width is affine in t; extremes at t = +-h
        double w0 = (hi.c0 - hi.c1 * h) - (lo.c0 - lo.c1 * h);
        double w1 = (hi.c0 + hi.c1 * h) - (lo.c0 + lo.c1 * h);
        return std::max(w0, w1);
    }
    int k = static_cast<int>(std::max(lo.samples.size(), hi.samples.size()));
    if (k == 0) k = 2;
    double m = 0.0;
    for (int i = 0; i < k; ++i) {
        double t = -h + 2.0 * h * i / (k - 1);
        m = std::max(m, hi.value(t, h) - lo.value(t, h));
    }
    return m;
}

ConeCheck cone_preserved(const MapSystem& map, const Rectangle& rect, const Cylinder& domain,
                         int m, const ConeField& cones, int samples, Exec exec) {
    const double gamma = cones.gamma;
    const double h = domain.h;
    const Mat2 frame = Mat2::columns(rect.frame_s, rect.frame_u);
    const Mat2 frame_inv = frame.inverse();

    struct Slot {
        double margin = 1e300;
        double exp_u = 1e300;
        double exp_s = 1e300;
        bool valid = true;
        Point witness{};
        Vec2 witness_dir{};
    };
    const int total = samples * samples;
    std::vector<Slot> slots(total);

    // directional push with renormalization; returns chart log-growth
    auto push_dir = [&](const MapSystem& sys, Point p, Vec2 chart_dir, int steps, Vec2& out_chart,
                        double& log_growth) {
        Vec2 v = frame * chart_dir;
        double ln = -std::log(v.norm());
        v = v.normalized();
        for (int k = 0; k < steps; ++k) {
            Vec2 w = sys.jacobian(p) * v;
            double g = w.norm();
            ln += std::log(g);
            v = w / g;
            p = sys.forward(p);
            if (!p.finite()) throw OrbitEscape(k + 1);
        }
        Vec2 c = frame_inv * v;
        double cn = c.norm();
        out_chart = c / cn;
        log_growth = ln + std::log(cn) + std::log(chart_dir.norm());
    };

    MapSystem inv = inverse_system(map);
    auto body = [&](std::int64_t idx) {
        int i = static_cast<int>(idx) / samples;
        int j = static_cast<int>(idx) % samples;
        double a, b;
        double ti = samples == 1 ? 0.0 : -1.0 + 2.0 * i / (samples - 1.0);
        double tj = samples == 1 ? 0.5 : static_cast<double>(j) / (samples - 1.0);
        if (domain.kind == CylKind::stable) {
            a = ti * h;
            double blo = domain.lo.value(a, h), bhi = domain.hi.value(a, h);
            b = blo + tj * (bhi - blo);
        } else {
            b = ti * h;
            double alo = domain.lo.value(b, h), ahi = domain.hi.value(b, h);
            a = alo + tj * (ahi - alo);
        }
        Slot& sl = slots[idx];
        try {
            Point z = rect.from_chart({a, b});
            Point fz = iterate(map, z, m);
            // unstable cone boundary (+-gamma, 1) forward under Df^m
            for (double sgn : {-1.0, 1.0}) {
                Vec2 cdir{sgn * gamma, 1.0};
                Vec2 img;
                double lg;
                push_dir(map, z, cdir, m, img, lg);
                double slope = std::fabs(img.x) / std::fabs(img.y);
                double mg = std::atan(gamma) - std::atan(slope);
                if (mg < sl.margin) {
                    sl.margin = mg;
                    sl.witness = z;
                    sl.witness_dir = cdir;
                }
                sl.exp_u = std::min(sl.exp_u, std::exp(lg));
            }
            // stable cone boundary (1, +-gamma) backward under Df^-m from the image
            for (double sgn : {-1.0, 1.0}) {
                Vec2 cdir{1.0, sgn * gamma};
                Vec2 img;
                double lg;
                push_dir(inv, fz, cdir, m, img, lg);
                double slope = std::fabs(img.y) / std::fabs(img.x);
                double mg = std::atan(gamma) - std::atan(slope);
                if (mg < sl.margin) {
                    sl.margin = mg;
                    sl.witness = fz;
                    sl.witness_dir = cdir;
                }
                sl.exp_s = std::min(sl.exp_s, std::exp(lg));
            }
        } catch (const DynError&) {
            sl.valid = false;
        }
    };
    sweep(exec, total, body);

    // deterministic reduction in index order
    ConeCheck out;
    out.samples = samples;
    out.gamma = gamma;
    out.margin = 1e300;
    out.min_expansion_u = 1e300;
    out.min_expansion_s = 1e300;
    for (int idx = 0; idx < total; ++idx) {
        const Slot& sl = slots[idx];
        if (!sl.valid) {
            out.pass = false;
            out.margin = -1e300;
            out.witness = sl.witness;
            return out;
        }
        if (sl.margin < out.margin) {
            out.margin = sl.margin;
            out.witness = sl.witness;
            out.witness_dir = sl.witness_dir;
        }
        out.min_expansion_u = std::min(out.min_expansion_u, sl.exp_u);
        out.min_expansion_s = std::min(out.min_expansion_s, sl.exp_s);
    }
    out.pass = out.margin > 0.0;
    return out;
}

}  // namespace varhorse
