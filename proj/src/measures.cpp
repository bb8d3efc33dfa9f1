#include "varhorse/measures.hpp"

#include <algorithm>
#include <cmath>

namespace varhorse {

int saturation_time(const std::vector<HyperbolicBranch>& branches,
                    const TestFunctionFamily& family, double rho, int s) {
    if (!(rho > 0.0)) throw PreconditionError("saturation_time: rho must be > 0");
    int max_m = 0;
    for (const auto& b : branches) max_m = std::max(max_m, b.return_time);
    double sup = family.max_sup_norm(s);
    return static_cast<int>(std::ceil(max_m * sup / rho - 1e-12));
}

int saturation_time(const VariableTimeHorseshoe& h, const TestFunctionFamily& family, double rho,
                    int s) {
    return saturation_time(h.branches, family, rho, s);
}

OrbitDecomposition decompose(const VariableTimeHorseshoe& h, const SymbolicWord& itinerary,
                             int L) {
    if (L < 1) throw PreconditionError("decompose: L must be >= 1");
    itinerary.validate(h.n_branches());
    const bool cyclic = itinerary.kind == SymbolicWord::Kind::periodic;
    const int wl = itinerary.size();

    OrbitDecomposition d;
    d.L = L;
    d.block_counts.assign(h.n_branches(), 0);
    int t = 0;   // consumed iterates
    int r = 0;   // consumed symbols
    while (true) {
        if (r >= wl && !cyclic) {
            if (t < L) throw InsufficientItinerary();
            break;
        }
        int sym = itinerary.letters[r % wl];
        int m = h.branches[sym].return_time;
        if (t + m > L) break;  // next whole block does not fit
        d.blocks.push_back({sym, t, m});
        d.block_counts[sym] += 1;
        t += m;
        ++r;
        if (t == L) break;
    }
    d.L_prime = t;
    d.remainder = L - t;
    // the paper's bookkeeping: 0 <= R < max_k m_k
    if (d.remainder < 0 || d.remainder >= h.max_return_time())
        throw DynError("decompose: remainder invariant violated");
    long check = 0;
    for (int k = 0; k < h.n_branches(); ++k)
        check += static_cast<long>(d.block_counts[k]) * h.branches[k].return_time;
    if (check != d.L_prime) throw DynError("decompose: block-count identity violated");
    return d;
}

PeriodicOrbitMeasure periodic_measure(const VariableTimeHorseshoe& h,
                                      const TestFunctionFamily& family,
                                      const SymbolicWord& word) {
    if (word.kind != SymbolicWord::Kind::periodic)
        throw PreconditionError("periodic_measure: word must be periodic");
    PeriodicOrbitMeasure m;
    m.word = word;
    m.period = h.word_period(word);
    double rad = 0.0;
    m.support_orbit = saturate_orbit(h, word, m.period, &rad);
    m.error_radius = rad;
    m.integrals.assign(family.count(), 0.0);
    for (const Point& p : m.support_orbit)
        for (int i = 0; i < family.count(); ++i) m.integrals[i] += family.eval(i, p);
    for (double& v : m.integrals) v /= m.period;
    for (const auto& f : family.functions) m.lipschitz.push_back(f.lipschitz);
    return m;
}

namespace {

double error_slack(double error_radius, const TestFunctionFamily& family, int s,
                   const ReferenceMeasure& mu) {
    return error_radius * family.max_lipschitz(s) + mu.integral_error;
}

void require_certified(const VariableTimeHorseshoe& h, double rho, int s) {
    for (const auto& b : h.branches) {
        if (b.qg_certificate.rho > rho + 1e-15 || b.qg_certificate.s < s)
            throw PreconditionError("horseshoe branches are not certified at (rho, s)");
    }
}

}  // namespace

RhoCheck check_two_rho(const VariableTimeHorseshoe& h, const SymbolicWord& word, int L,
                       const TestFunctionFamily& family, const ReferenceMeasure& mu, double rho,
                       int s) {
    require_certified(h, rho, s);
    int T = saturation_time(h, family, rho, s);
    if (L < T) throw PreconditionError("check_two_rho: L below the saturation time");
    double rad = 0.0;
    std::vector<Point> orbit = saturate_orbit(h, word, L, &rad);
    RhoCheck out;
    out.slack = error_slack(rad, family, s, mu);
    out.threshold = 2.0 * rho + out.slack;
    for (int i = 0; i < s; ++i) {
        double sum = 0.0;
        for (const Point& p : orbit) sum += family.eval(i, p);
        double r = std::fabs(sum / L - mu.integrals[i]);
        if (r > out.value) {
            out.value = r;
            out.witness = i;
        }
    }
    out.pass = out.value < out.threshold;
    return out;
}

RhoCheck check_three_rho(const VariableTimeHorseshoe& h, const PeriodicOrbitMeasure& cand,
                         const ReferenceMeasure& mu, double rho, int s) {
    require_certified(h, rho, s);
    RhoCheck out;
    double lip = 0.0;
    for (int i = 0; i < s && i < static_cast<int>(cand.lipschitz.size()); ++i)
        lip = std::max(lip, cand.lipschitz[i]);
    out.slack = cand.error_radius * lip + mu.integral_error;
    out.threshold = 3.0 * rho + out.slack;
    for (int i = 0; i < s; ++i) {
        double d = std::fabs(cand.integrals[i] - mu.integrals[i]);
        if (d > out.value) {
            out.value = d;
            out.witness = i;
        }
    }
    out.pass = out.value < out.threshold;
    return out;
}

std::vector<std::vector<int>> enumerate_cyclic_words(int n_branches, int max_len,
                                                     std::int64_t cap) {
    std::vector<std::vector<int>> out;
    std::int64_t counted = 0;
    for (int len = 1; len <= max_len; ++len) {
        std::int64_t total = 1;
        for (int j = 0; j < len; ++j) {
            total *= n_branches;
            if (total > cap) throw CapExceeded("enumerate_cyclic_words: N^len exceeds cap");
        }
        std::vector<int> w(len, 0);
        for (std::int64_t idx = 0; idx < total; ++idx) {
            std::int64_t v = idx;
            for (int j = len - 1; j >= 0; --j) {
                w[j] = static_cast<int>(v % n_branches);
                v /= n_branches;
            }
            // canonical: lexicographically least rotation, and not a power
            bool canonical = true;
            for (int r = 1; r < len && canonical; ++r) {
                for (int j = 0; j < len; ++j) {
                    int a = w[(j + r) % len];
                    if (a != w[j]) {
                        canonical = a > w[j];
                        break;
                    }
                    if (j == len - 1) canonical = false;  // rotation equals w: a power
                }
            }
            if (!canonical) continue;
            out.push_back(w);
            if (++counted > cap) throw CapExceeded("enumerate_cyclic_words: cap exceeded");
        }
    }
    return out;
}

StageReport measure_sweep(const VariableTimeHorseshoe& h, const TestFunctionFamily& family,
                          const ReferenceMeasure& mu, double rho, int s, int max_word_len,
                          std::int64_t word_cap, Exec exec) {
    StageReport rep;
    rep.rho = rho;
    rep.s = s;
    rep.built = true;
    for (const auto& b : h.branches) rep.return_times.push_back(b.return_time);

    auto words = enumerate_cyclic_words(h.n_branches(), max_word_len, word_cap);
    rep.rows.assign(words.size(), {});
    sweep(exec, static_cast<std::int64_t>(words.size()), [&](std::int64_t i) {
        SymbolicWord w{words[i], SymbolicWord::Kind::periodic};
        PeriodicOrbitMeasure pm = periodic_measure(h, family, w);
        RhoCheck chk = check_three_rho(h, pm, mu, rho, s);
        rep.rows[i] = {words[i], pm.period, chk.value, chk.slack, chk.pass};
    });
    rep.pass = true;
    for (const auto& row : rep.rows) {
        rep.d_n = std::max(rep.d_n, row.distance);
        rep.slack = std::max(rep.slack, row.slack);
        rep.pass = rep.pass && row.pass;
    }
    rep.pass = rep.pass && rep.d_n < 3.0 * rho + rep.slack;
    return rep;
}

ExperimentReport convergence_experiment(const MapSystem& map, const ReferenceMeasure& mu,
                                        const TestFunctionFamily& family,
                                        const ExperimentPlan& plan) {
    for (size_t n = 1; n < plan.schedule.size(); ++n) {
        if (!(plan.schedule[n].rho < plan.schedule[n - 1].rho))
            throw PreconditionError("convergence_experiment: rho must be strictly decreasing");
        if (plan.schedule[n].s < plan.schedule[n - 1].s)
            throw PreconditionError("convergence_experiment: s must be nondecreasing");
    }
    ExperimentReport report;
    for (const auto& stage : plan.schedule) {
        StageReport rep;
        rep.rho = stage.rho;
        rep.s = stage.s;
        try {
            BranchSetResult bs =
                build_branch_set(map, plan.rectangle, plan.cones, family, mu, stage.rho, stage.s,
                                 plan.n_target, plan.seeds, plan.search, plan.build);
            VariableTimeHorseshoe h = build_horseshoe(map, plan.rectangle, bs.branches);
            rep = measure_sweep(h, family, mu, stage.rho, stage.s, plan.max_word_len,
                                plan.word_cap, plan.exec);
        } catch (const BudgetExhausted& e) {
            rep.built = false;
            rep.pass = false;
            rep.error = e.what();
        }
        report.all_pass = report.all_pass && rep.pass;
        report.stages.push_back(std::move(rep));
    }
    return report;
}

}  // namespace varhorse
