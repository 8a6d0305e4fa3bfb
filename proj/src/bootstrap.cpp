#include "clsiv/bootstrap.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "clsiv/parallel.hpp"
#include "clsiv/rng.hpp"

namespace clsiv {

namespace {

// Domain tags keep the replicate streams disjoint from any other use of the
// same seed (outer Monte Carlo loops, nested plans).
constexpr std::uint64_t kResampleDomain = 0x626f6f74u;   // replicate index streams
constexpr std::uint64_t kInnerPlanDomain = 0x696e6e72u;  // nested plans inside replicates

Dataset resample(const Dataset& d, const std::vector<Index>& idx) {
    const Index n = d.n();
    Vector y(n);
    Matrix x(n, d.k());
    Matrix z(n, d.l());
    for (Index i = 0; i < n; ++i) {
        y(i) = d.y(idx[static_cast<std::size_t>(i)]);
        x.row(i) = d.X.row(idx[static_cast<std::size_t>(i)]);
        z.row(i) = d.Z.row(idx[static_cast<std::size_t>(i)]);
    }
    return Dataset(std::move(y), std::move(x), std::move(z));
}

// Order-stable first and second moments over replicate slots. Compensated
// summation entry by entry, always iterating in replicate order, so the
// outcome is bitwise identical for any worker count.
class MomentAccumulator {
public:
    explicit MomentAccumulator(Index k) : k_(k), mean_sums_(static_cast<std::size_t>(k)) {}

    void add(const Vector& v) {
        for (Index j = 0; j < k_; ++j) mean_sums_[static_cast<std::size_t>(j)].add(v(j));
        ++count_;
    }

    int count() const { return count_; }

    Vector mean() const {
        Vector m(k_);
        for (Index j = 0; j < k_; ++j) m(j) = mean_sums_[static_cast<std::size_t>(j)].sum;
        return m / static_cast<double>(count_);
    }

private:
    Index k_;
    std::vector<KahanSum> mean_sums_;
    int count_ = 0;
};

// sum_b (a_b - ca)(b_b - cb)' / divisor, entries Kahan-compensated.
template <typename SlotRange, typename GetA, typename GetB>
Matrix centered_cross(const SlotRange& slots, const GetA& get_a, const GetB& get_b,
                      const Vector& center_a, const Vector& center_b, double divisor) {
    const Index ka = center_a.size();
    const Index kb = center_b.size();
    std::vector<KahanSum> sums(static_cast<std::size_t>(ka * kb));
    for (const auto& s : slots) {
        if (!s.ok) continue;
        const Vector da = get_a(s) - center_a;
        const Vector db = get_b(s) - center_b;
        for (Index i = 0; i < ka; ++i) {
            for (Index j = 0; j < kb; ++j) {
                sums[static_cast<std::size_t>(i * kb + j)].add(da(i) * db(j));
            }
        }
    }
    Matrix out(ka, kb);
    for (Index i = 0; i < ka; ++i) {
        for (Index j = 0; j < kb; ++j) {
            out(i, j) = sums[static_cast<std::size_t>(i * kb + j)].sum / divisor;
        }
    }
    return out;
}

void check_failures(int failures, int B) {
    if (failures > B / 2) {
        throw bootstrap_error("bootstrap: " + std::to_string(failures) + " of " +
                                  std::to_string(B) +
                                  " replicates failed (singular resamples); aborting",
                              failures, B);
    }
    if (B - failures < 2) {
        throw bootstrap_error("bootstrap: fewer than 2 successful replicates", failures, B);
    }
}

}  // namespace

std::vector<Index> BootstrapPlan::indices(int b, Index n) const {
    RngStream stream(substream(substream(seed, kResampleDomain), static_cast<std::uint64_t>(b)));
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (auto& i : idx) i = static_cast<Index>(stream.uniform_below(static_cast<std::uint64_t>(n)));
    return idx;
}

BootstrapMoments bootstrap_moments(const Dataset& d, const BootstrapPlan& plan,
                                   const std::function<Vector(const Dataset&)>& fit,
                                   int workers) {
    if (plan.B < 2) throw validation_error("bootstrap_moments: B >= 2 required");

    struct Slot {
        bool ok = false;
        Vector beta;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(plan.B));

    parallel_for_indexed(static_cast<std::size_t>(plan.B), workers, [&](std::size_t b) {
        const auto idx = plan.indices(static_cast<int>(b), d.n());
        try {
            slots[b].beta = fit(resample(d, idx));
            slots[b].ok = true;
        } catch (const numeric_error&) {
            slots[b].ok = false;
        }
    });

    int failures = 0;
    MomentAccumulator acc(d.k());
    for (const auto& s : slots) {
        if (!s.ok) {
            ++failures;
            continue;
        }
        acc.add(s.beta);
    }
    check_failures(failures, plan.B);

    BootstrapMoments moments;
    moments.replicates = plan.B;
    moments.failures = failures;
    moments.mean = acc.mean();
    auto get_beta = [](const Slot& s) -> const Vector& { return s.beta; };
    moments.cov = centered_cross(slots, get_beta, get_beta, moments.mean, moments.mean,
                                 static_cast<double>(acc.count() - 1));
    moments.replicate_values.resize(d.k(), acc.count());
    Index col = 0;
    for (const auto& s : slots) {
        if (s.ok) moments.replicate_values.col(col++) = s.beta;
    }
    return moments;
}

std::pair<PiEstimate, BootstrapMoments> bootstrap_pi(const Dataset& d, Unbiased unbiased,
                                                     const BootstrapPlan& plan, int workers) {
    if (plan.B < 2) throw validation_error("bootstrap_pi: B >= 2 required");

    struct Slot {
        bool ok = false;
        Vector b_ols;
        Vector b_dag;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(plan.B));

    parallel_for_indexed(static_cast<std::size_t>(plan.B), workers, [&](std::size_t b) {
        const auto idx = plan.indices(static_cast<int>(b), d.n());
        try {
            const Dataset db = resample(d, idx);
            Slot s;
            s.b_ols = fit_ols(db).beta;
            s.b_dag = (unbiased == Unbiased::Tsls ? fit_tsls(db) : fit_jive(db)).beta;
            s.ok = true;
            slots[b] = std::move(s);
        } catch (const numeric_error&) {
            slots[b].ok = false;
        }
    });

    int failures = 0;
    MomentAccumulator acc_dag(d.k());
    MomentAccumulator acc_ols(d.k());
    for (const auto& s : slots) {
        if (!s.ok) {
            ++failures;
            continue;
        }
        acc_ols.add(s.b_ols);
        acc_dag.add(s.b_dag);
    }
    check_failures(failures, plan.B);

    const int Bs = plan.B - failures;
    const double divisor = static_cast<double>(Bs - 1);
    // The bootstrap truth is E*[unbiased]; the OLS bootstrap MSE and the cross
    // term are centered there, so the quadratic decomposition is exact.
    const Vector center = acc_dag.mean();
    const Vector mean_ols = acc_ols.mean();

    auto get_ols = [](const Slot& s) -> const Vector& { return s.b_ols; };
    auto get_dag = [](const Slot& s) -> const Vector& { return s.b_dag; };

    const Matrix var_ols = centered_cross(slots, get_ols, get_ols, mean_ols, mean_ols, divisor);
    const Matrix var_dag = centered_cross(slots, get_dag, get_dag, center, center, divisor);
    const Matrix cov_cross = centered_cross(slots, get_ols, get_dag, center, center, divisor);
    const Vector bias_ols = mean_ols - center;
    const Matrix bias2_ols =
        (static_cast<double>(Bs) / divisor) * (bias_ols * bias_ols.transpose());

    BootstrapMoments moments;
    moments.replicates = plan.B;
    moments.failures = failures;
    moments.mse_parts_star = MseParts::from(var_ols, var_dag, cov_cross, bias2_ols);

    const PiEstimate est = estimate_pi(*moments.mse_parts_star);

    // Mean and covariance of the resulting combination at the pooled pi.
    MomentAccumulator acc_cls(d.k());
    std::vector<Vector> cls_values;
    cls_values.reserve(static_cast<std::size_t>(Bs));
    for (const auto& s : slots) {
        if (!s.ok) continue;
        cls_values.push_back(est.pi * s.b_ols + (1.0 - est.pi) * s.b_dag);
        acc_cls.add(cls_values.back());
    }
    moments.mean = acc_cls.mean();

    struct ClsSlot {
        bool ok = true;
        Vector v;
    };
    std::vector<ClsSlot> cls_slots;
    cls_slots.reserve(cls_values.size());
    for (auto& v : cls_values) cls_slots.push_back({true, std::move(v)});
    auto get_v = [](const ClsSlot& s) -> const Vector& { return s.v; };
    moments.cov = centered_cross(cls_slots, get_v, get_v, moments.mean, moments.mean, divisor);

    return {est, moments};
}

BootstrapMoments bootstrap_variance_cls(const Dataset& d, const BootstrapPlan& plan,
                                        Unbiased unbiased, int workers) {
    if (plan.B < 2) throw validation_error("bootstrap_variance_cls: B >= 2 required");

    struct Slot {
        bool ok = false;
        Vector beta;
        double pi = 0.0;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(plan.B));

    parallel_for_indexed(static_cast<std::size_t>(plan.B), workers, [&](std::size_t b) {
        const auto idx = plan.indices(static_cast<int>(b), d.n());
        try {
            const Dataset db = resample(d, idx);
            BootstrapPlan inner;
            Slot s;
            if (unbiased == Unbiased::Jive) {
                inner.B = plan.B;
                inner.seed = substream(substream(plan.seed, kInnerPlanDomain),
                                       static_cast<std::uint64_t>(b));
                const ClsResult r = fit_cls(db, unbiased, &inner);
                s.beta = r.beta_cls;
                s.pi = r.pi_hat;
            } else {
                const ClsResult r = fit_cls(db, unbiased);
                s.beta = r.beta_cls;
                s.pi = r.pi_hat;
            }
            s.ok = true;
            slots[b] = std::move(s);
        } catch (const numeric_error&) {
            slots[b].ok = false;
        }
    });

    int failures = 0;
    MomentAccumulator acc(d.k());
    std::vector<double> pis;
    for (const auto& s : slots) {
        if (!s.ok) {
            ++failures;
            continue;
        }
        acc.add(s.beta);
        pis.push_back(s.pi);
    }
    check_failures(failures, plan.B);

    BootstrapMoments moments;
    moments.replicates = plan.B;
    moments.failures = failures;
    moments.mean = acc.mean();
    auto get_beta = [](const Slot& s) -> const Vector& { return s.beta; };
    moments.cov = centered_cross(slots, get_beta, get_beta, moments.mean, moments.mean,
                                 static_cast<double>(acc.count() - 1));
    moments.pi_values = Eigen::Map<Vector>(pis.data(), static_cast<Index>(pis.size()));
    moments.replicate_values.resize(d.k(), acc.count());
    Index col = 0;
    for (const auto& s : slots) {
        if (s.ok) moments.replicate_values.col(col++) = s.beta;
    }
    return moments;
}

bool bootstrap_mse_optimality_check(const BootstrapMoments& moments, double pi_star) {
    if (!moments.mse_parts_star) {
        throw validation_error("bootstrap_mse_optimality_check: moments lack MSE parts");
    }
    const MseParts& parts = *moments.mse_parts_star;
    const double at_pi = empirical_mse_trace(parts, pi_star);
    return at_pi <= std::min(parts.t_mse_ols, parts.t_var_unbiased) + 1e-10;
}

}  // namespace clsiv
