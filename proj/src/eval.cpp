#include "badsci/eval.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <thread>

namespace badsci {

namespace {

constexpr int kHardDimensionCap = 30;  // vertex masks are 32-bit

int effective_cap(const EvalOptions& opts) { return std::min(opts.max_n, kHardDimensionCap); }

void check_dimension(int n, const EvalOptions& opts) {
    if (n > effective_cap(opts))
        throw DimensionCapError("n = " + std::to_string(n) + " exceeds the enumeration cap " +
                                std::to_string(effective_cap(opts)));
}

int resolve_threads(const EvalOptions& opts) {
    if (opts.threads > 0) return opts.threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

std::uint64_t gray(std::uint64_t t) { return t ^ (t >> 1); }

// Runs fn(chunk_id) over [0, num_chunks), claimed through an atomic cursor.
void parallel_chunks(std::uint64_t num_chunks, int threads,
                     const std::function<void(std::uint64_t, int)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || num_chunks <= 1) {
        for (std::uint64_t c = 0; c < num_chunks; ++c) fn(c, 0);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (;;) {
                std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
                if (c >= num_chunks) return;
                fn(c, t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

Integer integer_from_u128(unsigned __int128 v) {
    Integer hi(static_cast<unsigned long>(v >> 64));
    Integer lo(static_cast<unsigned long>(v & ~0ull));
    return (hi << 64) + lo;
}

// ---------------------------------------------------------------------------
// Exact engine. Per vertex the winning row maximizes |c_i.x|/sqrt(N_i),
// decided by the integer comparison (c_i.x)^2 * N_j vs (c_j.x)^2 * N_i, ties
// to the smallest row index. Winning |c.x| values are accumulated per distinct
// N and turned into a SurdValue once at the end.

struct Arith64 {
    using Dot = std::int64_t;
    using Abs = std::uint64_t;
    using Norm = std::uint64_t;
    using Sum = unsigned __int128;

    static Abs abs_of(Dot d) { return d < 0 ? Abs(0) - Abs(d) : Abs(d); }
    static bool strictly_greater(Abs a, Norm na, Abs b, Norm nb) {
        return static_cast<unsigned __int128>(a) * a * nb >
               static_cast<unsigned __int128>(b) * b * na;
    }
    static Integer to_integer(const Sum& s) { return integer_from_u128(s); }
    static Integer norm_to_integer(Norm n) { return Integer(static_cast<unsigned long>(n)); }
    static Integer abs_to_integer(Abs a) { return Integer(static_cast<unsigned long>(a)); }
};

struct ArithMpz {
    using Dot = Integer;
    using Abs = Integer;
    using Norm = Integer;
    using Sum = Integer;

    static Abs abs_of(const Dot& d) { return abs(d); }
    static bool strictly_greater(const Abs& a, const Norm& na, const Abs& b, const Norm& nb) {
        return a * a * nb > b * b * na;
    }
    static Integer to_integer(const Sum& s) { return s; }
    static Integer norm_to_integer(const Norm& n) { return n; }
    static Integer abs_to_integer(const Abs& a) { return a; }
};

// int64 arithmetic is safe when max(sum|c_ij|)^2 * maxN and 2^n * max sum|c_ij|
// stay below 2^126 and every entry/norm fits its word.
bool fits_fast_path(const Matrix& a) {
    Integer max_l = 0, max_n = 0;
    for (const auto& row : a.int_rows()) {
        Integer l = 0;
        for (const Integer& v : row.c) {
            if (!v.fits_slong_p()) return false;
            l += abs(v);
        }
        if (!row.norm_sq.fits_ulong_p() || !l.fits_slong_p()) return false;
        max_l = std::max(max_l, l);
        max_n = std::max(max_n, row.norm_sq);
    }
    Integer bound = Integer(1) << 126;
    if (max_l * max_l * max_n >= bound) return false;
    if ((Integer(1) << a.n()) * max_l >= bound) return false;
    return true;
}

struct ExactOutput {
    SurdValue beta;
    // attained |c.x|/sqrt(N) -> vertex count, as canonical single-term values
    std::vector<std::pair<SurdValue, std::uint64_t>> histogram;
    std::vector<std::uint64_t> set_sizes;
    std::vector<std::vector<VertexMask>> sets;
    bool sets_complete = false;
};

template <class A>
ExactOutput run_exact(const Matrix& a, const EvalOptions& opts, bool want_partition) {
    const auto& rows = a.int_rows();
    const int m = a.m(), n = a.n();
    const int threads = resolve_threads(opts);
    const bool capture_sets = want_partition && n <= opts.partition_sets_max_n;

    std::vector<typename A::Dot> c(static_cast<size_t>(m) * n);
    std::vector<typename A::Norm> norm(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            if constexpr (std::is_same_v<A, Arith64>)
                c[i * n + j] = rows[i].c[j].get_si();
            else
                c[i * n + j] = rows[i].c[j];
        }
        if constexpr (std::is_same_v<A, Arith64>)
            norm[i] = rows[i].norm_sq.get_ui();
        else
            norm[i] = rows[i].norm_sq;
    }

    // distinct norms -> accumulator class
    std::vector<typename A::Norm> class_norm;
    std::vector<int> klass(m);
    for (int i = 0; i < m; ++i) {
        auto it = std::find(class_norm.begin(), class_norm.end(), norm[i]);
        if (it == class_norm.end()) {
            klass[i] = static_cast<int>(class_norm.size());
            class_norm.push_back(norm[i]);
        } else {
            klass[i] = static_cast<int>(it - class_norm.begin());
        }
    }

    const int chunk_bits = std::min(n, 12);
    const std::uint64_t chunk_len = std::uint64_t(1) << chunk_bits;
    const std::uint64_t num_chunks = std::uint64_t(1) << (n - chunk_bits);

    struct ThreadState {
        std::vector<typename A::Sum> class_sums;
        std::map<std::pair<typename A::Abs, typename A::Norm>, std::uint64_t> hist;
        std::vector<std::uint64_t> set_sizes;
    };
    std::vector<ThreadState> states(threads);
    for (auto& s : states) {
        s.class_sums.assign(class_norm.size(), typename A::Sum(0));
        s.set_sizes.assign(m, 0);
    }
    // per-chunk winner lists, concatenated in chunk order for determinism
    std::vector<std::vector<std::vector<VertexMask>>> chunk_sets;
    if (capture_sets) chunk_sets.resize(num_chunks);

    parallel_chunks(num_chunks, threads, [&](std::uint64_t chunk, int tid) {
        ThreadState& st = states[tid];
        std::vector<typename A::Dot> dots(m);
        const std::uint64_t t0 = chunk << chunk_bits;
        VertexMask mask = static_cast<VertexMask>(gray(t0));
        for (int i = 0; i < m; ++i) {
            typename A::Dot d = 0;
            for (int j = 0; j < n; ++j)
                d += (mask >> j & 1u) ? c[i * n + j] : -c[i * n + j];
            dots[i] = d;
        }
        auto* sets = capture_sets ? &chunk_sets[chunk] : nullptr;
        if (sets) sets->resize(m);

        auto visit = [&](VertexMask x) {
            int best = 0;
            typename A::Abs best_abs = A::abs_of(dots[0]);
            for (int i = 1; i < m; ++i) {
                typename A::Abs ai = A::abs_of(dots[i]);
                if (A::strictly_greater(ai, norm[i], best_abs, norm[best])) {
                    best = i;
                    best_abs = ai;
                }
            }
            st.class_sums[klass[best]] += best_abs;
            if (want_partition) {
                ++st.hist[{best_abs, norm[best]}];
                ++st.set_sizes[best];
                if (sets) (*sets)[best].push_back(x);
            }
        };

        visit(mask);
        for (std::uint64_t t = t0 + 1; t < t0 + chunk_len; ++t) {
            const int bit = std::countr_zero(t);
            mask ^= VertexMask(1) << bit;
            if (mask >> bit & 1u) {
                for (int i = 0; i < m; ++i) dots[i] += 2 * c[i * n + bit];
            } else {
                for (int i = 0; i < m; ++i) dots[i] -= 2 * c[i * n + bit];
            }
            visit(mask);
        }
    });

    ExactOutput out;
    const Integer denom = Integer(1) << n;
    for (size_t k = 0; k < class_norm.size(); ++k) {
        Integer total = 0;
        for (const auto& st : states) total += A::to_integer(st.class_sums[k]);
        if (total == 0) continue;
        const Integer nk = A::norm_to_integer(class_norm[k]);
        out.beta += SurdValue::sqrt_term(Rational(total, denom * nk), nk);
    }

    if (want_partition) {
        std::map<std::pair<typename A::Abs, typename A::Norm>, std::uint64_t> merged;
        for (auto& st : states)
            for (auto& [key, cnt] : st.hist) merged[key] += cnt;
        std::vector<std::pair<SurdValue, std::uint64_t>> buckets;
        for (auto& [key, cnt] : merged) {
            const Integer ad = A::abs_to_integer(key.first);
            const Integer nk = A::norm_to_integer(key.second);
            SurdValue v = ad == 0 ? SurdValue::zero()
                                  : SurdValue::sqrt_term(Rational(ad, nk), nk);
            bool found = false;
            for (auto& [bv, bc] : buckets) {
                if (bv == v) {
                    bc += cnt;
                    found = true;
                    break;
                }
            }
            if (!found) buckets.emplace_back(std::move(v), cnt);
        }
        std::sort(buckets.begin(), buckets.end(), [](const auto& x, const auto& y) {
            return compare(x.first, y.first) == Ordering::Less;
        });
        out.histogram = std::move(buckets);
        out.set_sizes.assign(m, 0);
        for (const auto& st : states)
            for (int i = 0; i < m; ++i) out.set_sizes[i] += st.set_sizes[i];
        if (capture_sets) {
            out.sets.resize(m);
            for (int i = 0; i < m; ++i) out.sets[i].reserve(out.set_sizes[i]);
            for (auto& cs : chunk_sets)
                for (int i = 0; i < m; ++i)
                    out.sets[i].insert(out.sets[i].end(), cs[i].begin(), cs[i].end());
            out.sets_complete = true;
        }
    }
    return out;
}

ExactOutput exact_dispatch(const Matrix& a, const EvalOptions& opts, bool want_partition) {
    check_dimension(a.n(), opts);
    if (a.kind() != RowKind::Int)
        throw std::invalid_argument("exact engine requires integer-form rows");
    if (fits_fast_path(a)) return run_exact<Arith64>(a, opts, want_partition);
    return run_exact<ArithMpz>(a, opts, want_partition);
}

// ---------------------------------------------------------------------------
// Float engine. Same Gray-code walk over unit double rows. Per-chunk sums are
// reduced in chunk order so results do not depend on the thread count.

struct FloatOutput {
    double beta = 0.0;
    std::vector<std::pair<double, std::uint64_t>> histogram;
    std::vector<std::uint64_t> set_sizes;
    std::vector<std::vector<VertexMask>> sets;
    bool sets_complete = false;
};

FloatOutput run_float(const Matrix& a, const EvalOptions& opts, bool want_partition) {
    check_dimension(a.n(), opts);
    const int m = a.m(), n = a.n();
    const int threads = resolve_threads(opts);
    const bool capture_sets = want_partition && n <= opts.partition_sets_max_n;

    const auto unit = a.unit_rows_double();
    std::vector<double> c(static_cast<size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) c[i * n + j] = unit[i][j];

    const int chunk_bits = std::min(n, 12);
    const std::uint64_t chunk_len = std::uint64_t(1) << chunk_bits;
    const std::uint64_t num_chunks = std::uint64_t(1) << (n - chunk_bits);

    std::vector<double> chunk_sums(num_chunks, 0.0);
    struct ThreadState {
        std::map<double, std::uint64_t> hist;
        std::vector<std::uint64_t> set_sizes;
    };
    std::vector<ThreadState> states(threads);
    for (auto& s : states) s.set_sizes.assign(m, 0);
    std::vector<std::vector<std::vector<VertexMask>>> chunk_sets;
    if (capture_sets) chunk_sets.resize(num_chunks);

    parallel_chunks(num_chunks, threads, [&](std::uint64_t chunk, int tid) {
        ThreadState& st = states[tid];
        std::vector<double> dots(m);
        const std::uint64_t t0 = chunk << chunk_bits;
        VertexMask mask = static_cast<VertexMask>(gray(t0));
        for (int i = 0; i < m; ++i) {
            double d = 0;
            for (int j = 0; j < n; ++j) d += (mask >> j & 1u) ? c[i * n + j] : -c[i * n + j];
            dots[i] = d;
        }
        auto* sets = capture_sets ? &chunk_sets[chunk] : nullptr;
        if (sets) sets->resize(m);
        double local = 0.0;

        auto visit = [&](VertexMask x) {
            int best = 0;
            double best_abs = std::abs(dots[0]);
            for (int i = 1; i < m; ++i) {
                const double ai = std::abs(dots[i]);
                if (ai > best_abs) {
                    best = i;
                    best_abs = ai;
                }
            }
            local += best_abs;
            if (want_partition) {
                ++st.hist[best_abs];
                ++st.set_sizes[best];
                if (sets) (*sets)[best].push_back(x);
            }
        };

        visit(mask);
        for (std::uint64_t t = t0 + 1; t < t0 + chunk_len; ++t) {
            const int bit = std::countr_zero(t);
            mask ^= VertexMask(1) << bit;
            const double step = (mask >> bit & 1u) ? 2.0 : -2.0;
            for (int i = 0; i < m; ++i) dots[i] += step * c[i * n + bit];
            visit(mask);
        }
        chunk_sums[chunk] = local;
    });

    FloatOutput out;
    double total = 0.0;
    for (double s : chunk_sums) total += s;
    out.beta = total / std::ldexp(1.0, n);

    if (want_partition) {
        std::map<double, std::uint64_t> merged;
        for (auto& st : states)
            for (auto& [v, cnt] : st.hist) merged[v] += cnt;
        // cluster attained values closer than 1e-9
        for (auto& [v, cnt] : merged) {
            if (!out.histogram.empty() && v - out.histogram.back().first <= 1e-9)
                out.histogram.back().second += cnt;
            else
                out.histogram.emplace_back(v, cnt);
        }
        out.set_sizes.assign(m, 0);
        for (const auto& st : states)
            for (int i = 0; i < m; ++i) out.set_sizes[i] += st.set_sizes[i];
        if (capture_sets) {
            out.sets.resize(m);
            for (auto& cs : chunk_sets)
                for (int i = 0; i < m; ++i)
                    out.sets[i].insert(out.sets[i].end(), cs[i].begin(), cs[i].end());
            out.sets_complete = true;
        }
    }
    return out;
}

}  // namespace

BetaResult beta_exact(const Matrix& a, const EvalOptions& opts) {
    ExactOutput out = exact_dispatch(a, opts, /*want_partition=*/false);
    BetaResult r;
    r.exact = out.beta;
    r.approx = out.beta.to_double();
    r.engine = Engine::Exact;
    r.vertex_count = std::uint64_t(1) << a.n();
    return r;
}

BetaResult beta_float(const Matrix& a, const EvalOptions& opts) {
    FloatOutput out = run_float(a, opts, /*want_partition=*/false);
    BetaResult r;
    r.approx = out.beta;
    r.engine = Engine::Float;
    r.vertex_count = std::uint64_t(1) << a.n();
    return r;
}

BetaResult beta_auto(const Matrix& a, const EvalOptions& opts) {
    return a.kind() == RowKind::Int ? beta_exact(a, opts) : beta_float(a, opts);
}

PartitionReport partition(const Matrix& a, const EvalOptions& opts) {
    PartitionReport rep;
    if (a.kind() == RowKind::Int) {
        ExactOutput out = exact_dispatch(a, opts, /*want_partition=*/true);
        rep.beta.exact = out.beta;
        rep.beta.approx = out.beta.to_double();
        rep.beta.engine = Engine::Exact;
        for (auto& [v, cnt] : out.histogram)
            rep.histogram.push_back({v, v.to_double(), cnt});
        rep.sets = std::move(out.sets);
        rep.sets_complete = out.sets_complete;
        rep.set_sizes = std::move(out.set_sizes);
    } else {
        FloatOutput out = run_float(a, opts, /*want_partition=*/true);
        rep.beta.approx = out.beta;
        rep.beta.engine = Engine::Float;
        for (auto& [v, cnt] : out.histogram)
            rep.histogram.push_back({std::nullopt, v, cnt});
        rep.sets = std::move(out.sets);
        rep.sets_complete = out.sets_complete;
        rep.set_sizes = std::move(out.set_sizes);
    }
    rep.beta.vertex_count = std::uint64_t(1) << a.n();
    return rep;
}

double lp_beta(const Matrix& a, double p, const EvalOptions& opts) {
    if (std::isinf(p)) return beta_float(a, opts).approx;
    if (!(p >= 1.0)) throw std::invalid_argument("lp_beta requires p >= 1");
    check_dimension(a.n(), opts);
    const int m = a.m(), n = a.n();
    const int threads = resolve_threads(opts);
    const auto unit = a.unit_rows_double();
    std::vector<double> c(static_cast<size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) c[i * n + j] = unit[i][j];

    const int chunk_bits = std::min(n, 12);
    const std::uint64_t chunk_len = std::uint64_t(1) << chunk_bits;
    const std::uint64_t num_chunks = std::uint64_t(1) << (n - chunk_bits);
    std::vector<double> chunk_sums(num_chunks, 0.0);

    parallel_chunks(num_chunks, threads, [&](std::uint64_t chunk, int) {
        std::vector<double> dots(m);
        const std::uint64_t t0 = chunk << chunk_bits;
        VertexMask mask = static_cast<VertexMask>(gray(t0));
        for (int i = 0; i < m; ++i) {
            double d = 0;
            for (int j = 0; j < n; ++j) d += (mask >> j & 1u) ? c[i * n + j] : -c[i * n + j];
            dots[i] = d;
        }
        double local = 0.0;
        auto norm_p = [&]() {
            if (p == 1.0) {
                double s = 0;
                for (double d : dots) s += std::abs(d);
                return s;
            }
            if (p == 2.0) {
                double s = 0;
                for (double d : dots) s += d * d;
                return std::sqrt(s);
            }
            double s = 0;
            for (double d : dots) s += std::pow(std::abs(d), p);
            return std::pow(s, 1.0 / p);
        };
        local += norm_p();
        for (std::uint64_t t = t0 + 1; t < t0 + chunk_len; ++t) {
            const int bit = std::countr_zero(t);
            mask ^= VertexMask(1) << bit;
            const double step = (mask >> bit & 1u) ? 2.0 : -2.0;
            for (int i = 0; i < m; ++i) dots[i] += step * c[i * n + bit];
            local += norm_p();
        }
        chunk_sums[chunk] = local;
    });

    double total = 0.0;
    for (double s : chunk_sums) total += s;
    return total / std::ldexp(1.0, n);
}

double khintchine_bound(int n, double p) {
    if (n < 1) throw std::invalid_argument("khintchine_bound requires n >= 1");
    if (!(p > 2.0)) throw std::invalid_argument("khintchine_bound requires p > 2");
    return std::exp((std::log(static_cast<double>(n)) + (p / 2.0) * std::log(2.0) +
                     std::lgamma(p / 2.0 + 1.0)) /
                    p);
}

}  // namespace badsci
