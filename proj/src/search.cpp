#include "badsci/search.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

namespace badsci {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char b : data) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::string candidate_hash_of(int n, const std::vector<CanonicalRow>& rows) {
    std::string blob = "n=" + std::to_string(n) + ";R=" + std::to_string(rows.size());
    for (const auto& r : rows) {
        blob += ";";
        for (const auto& e : r.p) blob += e.get_str() + ",";
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(blob)));
    return buf;
}

// ---------------------------------------------------------------------------
// Candidate-row generation

// Subset sums over all vertices of {-1,1}^n; index = subset bitmask over the
// 2^n vertex masks.
std::vector<std::array<int, 4>> all_vertex_sums(int n) {
    const std::uint32_t verts = 1u << n;
    std::vector<std::array<int, 4>> sums(std::uint64_t(1) << verts, {0, 0, 0, 0});
    for (std::uint64_t s = 1; s < sums.size(); ++s) {
        const int v = std::countr_zero(s);
        sums[s] = sums[s & (s - 1)];
        for (int j = 0; j < n; ++j) sums[s][j] += vertex_coord(static_cast<VertexMask>(v), j);
    }
    return sums;
}

struct RowCollector {
    int n;
    std::uint64_t nonzero = 0;
    std::set<std::vector<long>> unique;     // primitive direction, sign kept
    std::set<std::vector<long>> canonical;  // sign-normalized

    void add(const std::array<int, 4>& sum) {
        std::vector<long> v(sum.begin(), sum.begin() + n);
        long g = 0;
        for (long e : v) g = std::gcd(g, std::labs(e));
        if (g == 0) return;
        ++nonzero;
        for (long& e : v) e /= g;
        unique.insert(v);
        for (long e : v) {
            if (e > 0) break;
            if (e < 0) {
                for (long& x : v) x = -x;
                break;
            }
        }
        canonical.insert(std::move(v));
    }
};

}  // namespace

CandidateRowSet candidate_rows(int n, bool antipode_free) {
    if (n < 1 || n > 4)
        throw std::invalid_argument("candidate_rows requires 1 <= n <= 4 (2^(2^n) subsets)");

    RowCollector collect{n};
    std::uint64_t raw = 0;

    if (!antipode_free) {
        auto sums = all_vertex_sums(n);
        raw = sums.size();
        for (const auto& s : sums) collect.add(s);
    } else {
        // One representative per antipodal pair (coordinate n-1 fixed to +1);
        // each pair independently contributes +rep, -rep or nothing, which
        // realizes exactly the sums of antipode-free subsets.
        const int pairs = 1 << (n - 1);
        std::vector<VertexMask> rep(pairs);
        for (int p = 0; p < pairs; ++p)
            rep[p] = static_cast<VertexMask>(p) | (VertexMask(1) << (n - 1));
        std::vector<int> digit(pairs, 0);  // 0 = skip, 1 = +rep, 2 = -rep
        std::uint64_t patterns = 1;
        for (int p = 0; p < pairs; ++p) patterns *= 3;
        raw = patterns;
        for (std::uint64_t it = 0; it < patterns; ++it) {
            std::array<int, 4> sum{0, 0, 0, 0};
            for (int p = 0; p < pairs; ++p) {
                if (digit[p] == 0) continue;
                const int sgn = digit[p] == 1 ? 1 : -1;
                for (int j = 0; j < n; ++j) sum[j] += sgn * vertex_coord(rep[p], j);
            }
            collect.add(sum);
            for (int p = 0; p < pairs; ++p) {  // ternary odometer
                if (++digit[p] < 3) break;
                digit[p] = 0;
            }
        }
    }

    CandidateRowSet out;
    out.n = n;
    out.raw_subsets = raw;
    out.nonzero_subsets = collect.nonzero;
    out.unique_rows = collect.unique.size();
    out.antipode_free = antipode_free ? 1 : 0;
    out.rows.reserve(collect.canonical.size());
    for (const auto& v : collect.canonical) {
        CanonicalRow row;
        row.norm_sq = 0;
        for (long e : v) {
            row.p.emplace_back(e);
            row.norm_sq += Integer(e) * Integer(e);
        }
        out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end());
    out.hash = candidate_hash_of(n, out.rows);
    return out;
}

Matrix matrix_from_tuple(const CandidateRowSet& rows, const std::vector<std::uint32_t>& tuple) {
    std::vector<std::vector<Integer>> r;
    r.reserve(tuple.size());
    std::string label = "candidates(" + std::to_string(rows.n) + ")[";
    for (size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] >= rows.rows.size()) throw std::invalid_argument("tuple index out of range");
        r.push_back(rows.rows[tuple[i]].p);
        label += (i ? "," : "") + std::to_string(tuple[i]);
    }
    return Matrix::from_int_rows(std::move(r), label + "]");
}

// ---------------------------------------------------------------------------
// Exhaustive search

namespace {

constexpr std::uint64_t kHuge = ~std::uint64_t(0);

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return (a == kHuge || b == kHuge || a + b < a) ? kHuge : a + b;
}

// C[i][j] for 0 <= i <= rows, 0 <= j <= m, saturating at 2^64-1.
std::vector<std::vector<std::uint64_t>> binom_table(int rows, int m) {
    std::vector<std::vector<std::uint64_t>> c(rows + 1, std::vector<std::uint64_t>(m + 1, 0));
    for (int i = 0; i <= rows; ++i) {
        c[i][0] = 1;
        for (int j = 1; j <= std::min(i, m); ++j)
            c[i][j] = sat_add(c[i - 1][j - 1], i - 1 >= j ? c[i - 1][j] : 0);
    }
    return c;
}

// Lexicographic unranking of m-combinations of {0..R-1}.
void unrank_combination(std::uint64_t rank, int rows, int m,
                        const std::vector<std::vector<std::uint64_t>>& c,
                        std::vector<int>& idx) {
    idx.resize(m);
    int v = 0;
    for (int t = 0; t < m; ++t) {
        for (;;) {
            const std::uint64_t block = c[rows - 1 - v][m - 1 - t];
            if (rank < block) break;
            rank -= block;
            ++v;
        }
        idx[t] = v++;
    }
}

struct VertexState {
    std::int64_t dotsq = 0;
    std::int32_t norm = 1;
    std::int32_t absdot = 0;
    std::int8_t slot = -1;
};

struct BlockResult {
    bool has = false;
    SurdValue best;
    double approx = 0.0;
    std::vector<std::vector<std::uint32_t>> tuples;
    std::uint64_t count = 0;  // maximizers found in this block (tuples may be capped)
};

struct GlobalBest {
    bool has = false;
    SurdValue best;
    double approx = 0.0;
    std::vector<std::vector<std::uint32_t>> tuples;
    std::uint64_t count = 0;
};

nlohmann::ordered_json surd_terms_json(const SurdValue& v) {
    auto obj = nlohmann::ordered_json::object();
    for (const auto& [d, q] : v.terms()) obj[d.get_str()] = rational_to_string(q);
    return obj;
}

SurdValue surd_from_terms_json(const nlohmann::json& obj) {
    SurdValue v;
    for (const auto& [key, val] : obj.items()) {
        Integer d;
        if (mpz_set_str(d.get_mpz_t(), key.c_str(), 10) != 0 || d < 1)
            throw ParseError("bad radicand key in checkpoint: " + key);
        v += SurdValue::sqrt_term(parse_rational(val.get<std::string>()), d);
    }
    return v;
}

void write_checkpoint(const std::string& path, const std::string& hash, int m, int n,
                      std::uint64_t cursor, std::uint64_t total, const GlobalBest& g,
                      bool complete) {
    nlohmann::ordered_json j;
    j["format"] = "badsci-search-checkpoint-v1";
    j["candidate_hash"] = hash;
    j["m"] = m;
    j["n"] = n;
    j["cursor"] = cursor;
    j["checked"] = cursor;
    j["total"] = total;
    j["best_beta_terms"] = surd_terms_json(g.best);
    j["best_approx"] = g.approx;
    j["best_tuples"] = g.tuples;
    j["maximizer_count"] = g.count;
    j["complete"] = complete;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ParseError("cannot write checkpoint: " + path);
        out << j.dump(2) << "\n";
    }
    std::rename(tmp.c_str(), path.c_str());
}

struct Checkpoint {
    std::uint64_t cursor = 0;
    GlobalBest best;
};

Checkpoint read_checkpoint(const std::string& path, const std::string& hash, int m, int n,
                           std::uint64_t total) {
    std::ifstream in(path);
    if (!in) throw ParseError("checkpoint not found: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("corrupt checkpoint: ") + e.what());
    }
    try {
        if (j.at("candidate_hash").get<std::string>() != hash)
            throw ParseError("checkpoint candidate_hash mismatch (different candidate set)");
        if (j.at("m").get<int>() != m || j.at("n").get<int>() != n)
            throw ParseError("checkpoint dimensions mismatch");
        if (j.contains("total") && j["total"].get<std::uint64_t>() != total)
            throw ParseError("checkpoint total mismatch");
        Checkpoint cp;
        cp.cursor = j.at("cursor").get<std::uint64_t>();
        if (cp.cursor > total) throw ParseError("checkpoint cursor out of range");
        cp.best.count = j.value("maximizer_count", std::uint64_t(0));
        cp.best.best = surd_from_terms_json(j.at("best_beta_terms"));
        cp.best.has = cp.cursor > 0 && !cp.best.best.is_zero();
        cp.best.approx = cp.best.best.to_double();
        for (const auto& t : j.at("best_tuples"))
            cp.best.tuples.push_back(t.get<std::vector<std::uint32_t>>());
        return cp;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("corrupt checkpoint: ") + e.what());
    }
}

}  // namespace

std::string SearchState::to_json(bool pretty) const {
    nlohmann::ordered_json j;
    j["m"] = m;
    j["n"] = n;
    j["candidate_hash"] = candidate_hash;
    j["total_combinations"] = total_combinations;
    j["checked"] = checked;
    j["cursor"] = cursor;
    j["best"] = {{"terms", surd_terms_json(best_beta)}, {"approx", best_approx}};
    j["best_rendered"] = best_beta.to_string();
    j["maximizer_count"] = maximizer_count;
    j["best_tuples"] = best_tuples;
    j["complete"] = complete;
    j["elapsed_seconds"] = elapsed_seconds;
    return pretty ? j.dump(2) : j.dump();
}

SearchState exhaustive_search(int m, int n, const SearchOptions& opts) {
    const auto started = Clock::now();
    CandidateRowSet cand = candidate_rows(n, opts.antipode_free);
    const int rows = static_cast<int>(cand.rows.size());
    if (m < 1) throw std::invalid_argument("exhaustive_search requires m >= 1");
    if (m > rows)
        throw std::invalid_argument("m exceeds the candidate count " + std::to_string(rows));

    const auto binom = binom_table(rows, m);
    const std::uint64_t total = binom[rows][m];
    if (total == kHuge) throw BudgetError("combination count overflows 64 bits");
    if (total > opts.budget && !opts.force)
        throw BudgetError("search size " + std::to_string(total) + " exceeds budget " +
                          std::to_string(opts.budget) + " (use force to run anyway)");

    // Per-candidate vertex tables. Bounds: |dot| <= n * 2^(n-1) <= 64 and
    // N <= n * 4^(n-1) <= 1024 for n <= 4, far inside int64 products.
    const std::uint32_t verts = 1u << n;
    std::vector<std::int32_t> dot(static_cast<size_t>(rows) * verts);
    std::vector<std::int64_t> dotsq(static_cast<size_t>(rows) * verts);
    std::vector<std::int32_t> absdot(static_cast<size_t>(rows) * verts);
    std::vector<std::int32_t> norm(rows);
    std::vector<double> inv_sqrt(rows);
    for (int r = 0; r < rows; ++r) {
        norm[r] = static_cast<std::int32_t>(cand.rows[r].norm_sq.get_si());
        inv_sqrt[r] = 1.0 / std::sqrt(static_cast<double>(norm[r]));
        for (std::uint32_t v = 0; v < verts; ++v) {
            int d = 0;
            for (int j = 0; j < n; ++j)
                d += static_cast<int>(cand.rows[r].p[j].get_si()) *
                     vertex_coord(static_cast<VertexMask>(v), j);
            dot[r * verts + v] = d;
            dotsq[r * verts + v] = static_cast<std::int64_t>(d) * d;
            absdot[r * verts + v] = std::abs(d);
        }
    }

    std::uint64_t cursor0 = 0;
    GlobalBest global;
    if (opts.resume) {
        if (opts.checkpoint_path.empty())
            throw std::invalid_argument("resume requires a checkpoint path");
        Checkpoint cp = read_checkpoint(opts.checkpoint_path, cand.hash, m, n, total);
        cursor0 = cp.cursor;
        global = std::move(cp.best);
    }

    const std::uint64_t remaining = total - cursor0;
    const std::uint64_t block_size =
        opts.block_size ? opts.block_size : std::min<std::uint64_t>(remaining ? remaining : 1,
                                                                    std::uint64_t(1) << 20);
    std::uint64_t num_blocks = remaining ? (remaining + block_size - 1) / block_size : 0;
    if (opts.max_blocks) num_blocks = std::min(num_blocks, opts.max_blocks);

    std::mutex mu;
    std::map<std::uint64_t, BlockResult> pending;
    std::uint64_t next_merge = 0;
    std::atomic<std::uint64_t> next_claim{0};
    auto last_write = Clock::now();
    const double margin = 1e-9;

    auto merge_into_global = [&](BlockResult& br) {
        if (!br.has) return;
        if (!global.has) {
            global.has = true;
            global.best = std::move(br.best);
            global.approx = br.approx;
            global.tuples = std::move(br.tuples);
            global.count = br.count;
            return;
        }
        switch (compare(br.best, global.best)) {
            case Ordering::Greater:
                global.best = std::move(br.best);
                global.approx = br.approx;
                global.tuples = std::move(br.tuples);
                global.count = br.count;
                break;
            case Ordering::Equal:
                global.count += br.count;
                for (auto& t : br.tuples) {
                    if (global.tuples.size() >= opts.maximizer_cap) break;
                    global.tuples.push_back(std::move(t));
                }
                break;
            case Ordering::Less:
                break;
        }
    };

    auto process_block = [&](std::uint64_t block_id) {
        const std::uint64_t lo = cursor0 + block_id * block_size;
        const std::uint64_t hi = std::min(total, lo + block_size);

        BlockResult br;
        {  // seed the pruning threshold with the merged best so far
            std::lock_guard<std::mutex> lk(mu);
            if (global.has) {
                br.has = true;
                br.best = global.best;
                br.approx = global.approx;
            }
        }

        std::vector<int> idx;
        unrank_combination(lo, rows, m, binom, idx);
        // prefix[t][v] = winner state over rows idx[0..t]
        std::vector<std::vector<VertexState>> prefix(std::max(0, m - 1),
                                                     std::vector<VertexState>(verts));
        auto fill_level = [&](int t) {
            const std::int32_t* ad = &absdot[std::uint64_t(idx[t]) * verts];
            const std::int64_t* ds = &dotsq[std::uint64_t(idx[t]) * verts];
            const std::int32_t nr = norm[idx[t]];
            const VertexState* prev = t > 0 ? prefix[t - 1].data() : nullptr;
            VertexState* cur = prefix[t].data();
            for (std::uint32_t v = 0; v < verts; ++v) {
                VertexState s = prev ? prev[v] : VertexState{};
                if (ds[v] * s.norm > s.dotsq * nr) {
                    s.dotsq = ds[v];
                    s.norm = nr;
                    s.absdot = ad[v];
                    s.slot = static_cast<std::int8_t>(t);
                }
                cur[v] = s;
            }
        };
        for (int t = 0; t + 1 < m; ++t) fill_level(t);

        std::vector<std::uint32_t> acc(m);
        std::vector<int> acc_row(m);
        for (std::uint64_t cur = lo; cur < hi; ++cur) {
            const int last = idx[m - 1];
            const std::int32_t* ad = &absdot[std::uint64_t(last) * verts];
            const std::int64_t* ds = &dotsq[std::uint64_t(last) * verts];
            const std::int32_t nl = norm[last];
            const VertexState* pre = m > 1 ? prefix[m - 2].data() : nullptr;

            std::fill(acc.begin(), acc.end(), 0u);
            static const VertexState kEmpty{};
            for (std::uint32_t v = 0; v < verts; ++v) {
                const VertexState& s = pre ? pre[v] : kEmpty;
                if (ds[v] * s.norm > s.dotsq * nl) {
                    acc[m - 1] += static_cast<std::uint32_t>(ad[v]);
                } else if (s.slot >= 0) {
                    acc[s.slot] += static_cast<std::uint32_t>(s.absdot);
                }
            }
            double approx = 0.0;
            for (int t = 0; t < m; ++t) approx += acc[t] * inv_sqrt[idx[t]];
            approx = std::ldexp(approx, -n);

            if (!br.has || approx > br.approx - margin) {
                // exact path: group winner sums by row norm, canonicalize once
                std::map<std::int64_t, std::uint64_t> by_norm;
                for (int t = 0; t < m; ++t)
                    if (acc[t]) by_norm[norm[idx[t]]] += acc[t];
                SurdValue val;
                const Integer denom = Integer(1) << n;
                for (const auto& [nk, sum] : by_norm) {
                    const Integer nz(static_cast<long>(nk));
                    val += SurdValue::sqrt_term(
                        Rational(Integer(static_cast<unsigned long>(sum)), denom * nz), nz);
                }
                if (!br.has) {
                    br.has = true;
                    br.best = std::move(val);
                    br.approx = br.best.to_double();
                    br.tuples.push_back({idx.begin(), idx.end()});
                    br.count = 1;
                } else {
                    switch (compare(val, br.best)) {
                        case Ordering::Greater:
                            br.best = std::move(val);
                            br.approx = br.best.to_double();
                            br.tuples.clear();
                            br.tuples.push_back({idx.begin(), idx.end()});
                            br.count = 1;
                            break;
                        case Ordering::Equal:
                            ++br.count;
                            if (br.tuples.size() < opts.maximizer_cap)
                                br.tuples.push_back({idx.begin(), idx.end()});
                            break;
                        case Ordering::Less:
                            break;
                    }
                }
            }

            if (cur + 1 == hi) break;
            // next combination in lexicographic order
            int t = m - 1;
            while (t >= 0 && idx[t] == rows - m + t) --t;
            ++idx[t];
            for (int s = t + 1; s < m; ++s) idx[s] = idx[s - 1] + 1;
            for (int s = t; s + 1 < m; ++s) fill_level(s);
        }
        return br;
    };

    const int threads = std::max(1, opts.threads);
    auto worker = [&] {
        for (;;) {
            const std::uint64_t bid = next_claim.fetch_add(1, std::memory_order_relaxed);
            if (bid >= num_blocks) return;
            BlockResult br = process_block(bid);
            std::lock_guard<std::mutex> lk(mu);
            pending.emplace(bid, std::move(br));
            bool advanced = false;
            while (!pending.empty() && pending.begin()->first == next_merge) {
                merge_into_global(pending.begin()->second);
                pending.erase(pending.begin());
                ++next_merge;
                advanced = true;
            }
            if (advanced && !opts.checkpoint_path.empty()) {
                const auto now = Clock::now();
                const bool final_block = next_merge == num_blocks;
                if (final_block || now - last_write > std::chrono::seconds(2)) {
                    const std::uint64_t cursor =
                        std::min(total, cursor0 + next_merge * block_size);
                    write_checkpoint(opts.checkpoint_path, cand.hash, m, n, cursor, total,
                                     global, cursor == total);
                    last_write = now;
                }
            }
            if (opts.progress && advanced) {
                std::fprintf(stderr, "search %dx%d: %llu/%llu blocks merged\r", m, n,
                             static_cast<unsigned long long>(next_merge),
                             static_cast<unsigned long long>(num_blocks));
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (opts.progress) std::fprintf(stderr, "\n");

    SearchState st;
    st.m = m;
    st.n = n;
    st.candidate_hash = cand.hash;
    st.total_combinations = total;
    st.cursor = std::min(total, cursor0 + next_merge * block_size);
    st.checked = st.cursor;
    st.best_beta = global.best;
    st.best_approx = global.approx;
    st.best_tuples = global.tuples;
    st.maximizer_count = global.count;
    st.complete = st.cursor == total;
    st.elapsed_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    return st;
}

// ---------------------------------------------------------------------------
// Structure iteration and checking

namespace {

// Sum over U_i built from the winner set W_i: vertices join with the sign of
// a_i.x; zero-dot vertices contribute the lexicographically larger of {x,-x}.
// Returns all-zero when the sum vanishes.
template <class DotFn>
std::vector<long> positive_half_sum(const std::vector<VertexMask>& wi, int n, DotFn&& dot_sign) {
    std::vector<long> sum(n, 0);
    std::set<VertexMask> seen;  // one representative per antipodal pair
    for (VertexMask x : wi) {
        const int s = dot_sign(x);
        VertexMask rep = x;
        if (s < 0)
            rep = vertex_negate(x, n);
        else if (s == 0)
            rep = std::max(x, vertex_negate(x, n));
        if (!seen.insert(rep).second) continue;
        for (int j = 0; j < n; ++j) sum[j] += vertex_coord(rep, j);
    }
    return sum;
}

bool all_zero(const std::vector<long>& v) {
    return std::all_of(v.begin(), v.end(), [](long x) { return x == 0; });
}

// Unit-row equality for integer directions: primitive vectors with orientation
// kept must match entrywise.
bool same_direction(const std::vector<Integer>& a, const std::vector<Integer>& b) {
    if (a.size() != b.size()) return false;
    Integer ga = 0, gb = 0;
    for (const Integer& v : a) mpz_gcd(ga.get_mpz_t(), ga.get_mpz_t(), v.get_mpz_t());
    for (const Integer& v : b) mpz_gcd(gb.get_mpz_t(), gb.get_mpz_t(), v.get_mpz_t());
    for (size_t j = 0; j < a.size(); ++j)
        if (a[j] * gb != b[j] * ga) return false;
    return true;
}

}  // namespace

IterateResult structure_iterate(const Matrix& a, int max_iters, const EvalOptions& eval_opts) {
    if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
    if (a.n() > eval_opts.partition_sets_max_n)
        throw DimensionCapError("structure_iterate needs explicit winner sets (n <= " +
                                std::to_string(eval_opts.partition_sets_max_n) + ")");
    IterateResult res;
    Matrix cur = a;
    PartitionReport rep = partition(cur, eval_opts);
    res.trace.push_back(rep.beta);

    for (int iter = 0; iter < max_iters; ++iter) {
        Matrix next = cur;
        const int n = cur.n();
        if (cur.kind() == RowKind::Int) {
            std::vector<std::vector<Integer>> rows;
            rows.reserve(cur.m());
            for (int i = 0; i < cur.m(); ++i) {
                const IntRow& row = cur.int_rows()[i];
                if (rep.sets[i].empty()) {
                    rows.push_back(row.c);
                    continue;
                }
                auto sum = positive_half_sum(rep.sets[i], n, [&](VertexMask x) {
                    Integer d = 0;
                    for (int j = 0; j < n; ++j)
                        d += (x >> j & 1u) ? row.c[j] : -row.c[j];
                    return sgn(d);
                });
                if (all_zero(sum)) {
                    rows.push_back(row.c);
                    continue;
                }
                std::vector<Integer> c(n);
                for (int j = 0; j < n; ++j) c[j] = sum[j];
                rows.push_back(std::move(c));
            }
            next = Matrix::from_int_rows(std::move(rows), cur.label());
            // fixed point when every unit direction is unchanged
            bool same = true;
            for (int i = 0; same && i < cur.m(); ++i)
                same = same_direction(cur.int_rows()[i].c, next.int_rows()[i].c);
            if (same) {
                res.fixed_point = true;
                break;
            }
        } else {
            std::vector<std::vector<double>> rows;
            rows.reserve(cur.m());
            const auto unit = cur.unit_rows_double();
            for (int i = 0; i < cur.m(); ++i) {
                if (rep.sets[i].empty()) {
                    rows.push_back(unit[i]);
                    continue;
                }
                auto sum = positive_half_sum(rep.sets[i], n, [&](VertexMask x) {
                    double d = 0;
                    for (int j = 0; j < n; ++j)
                        d += (x >> j & 1u) ? unit[i][j] : -unit[i][j];
                    if (std::abs(d) <= 1e-12) return 0;
                    return d > 0 ? 1 : -1;
                });
                if (all_zero(sum)) {
                    rows.push_back(unit[i]);
                    continue;
                }
                double nrm = 0;
                for (long v : sum) nrm += double(v) * double(v);
                nrm = std::sqrt(nrm);
                std::vector<double> r(n);
                for (int j = 0; j < n; ++j) r[j] = sum[j] / nrm;
                rows.push_back(std::move(r));
            }
            next = Matrix::from_float_rows(std::move(rows), cur.label(),
                                           /*force_normalize=*/true);
            bool same = true;
            const auto ou = cur.unit_rows_double();
            const auto nu = next.unit_rows_double();
            for (int i = 0; same && i < cur.m(); ++i)
                for (int j = 0; j < n; ++j)
                    if (std::abs(ou[i][j] - nu[i][j]) > 1e-12) {
                        same = false;
                        break;
                    }
            if (same) {
                res.fixed_point = true;
                break;
            }
        }
        cur = std::move(next);
        rep = partition(cur, eval_opts);
        res.trace.push_back(rep.beta);
        ++res.iterations;
    }
    res.matrix = std::move(cur);
    return res;
}

StructureReport check_structure(const Matrix& a, const EvalOptions& eval_opts) {
    if (a.n() > eval_opts.partition_sets_max_n)
        throw DimensionCapError("check_structure needs explicit winner sets (n <= " +
                                std::to_string(eval_opts.partition_sets_max_n) + ")");
    PartitionReport rep = partition(a, eval_opts);
    const int n = a.n();
    const auto unit = a.unit_rows_double();
    StructureReport out;
    out.all_nonempty_pass = true;

    for (int i = 0; i < a.m(); ++i) {
        RowStructureReport r;
        r.row = i;
        r.wi_size = rep.sets[i].size();
        if (r.wi_size == 0) {
            r.passes = true;  // vacuous; wi_size flags it
            out.rows.push_back(r);
            continue;
        }
        std::vector<long> sum;
        if (a.kind() == RowKind::Int) {
            const IntRow& row = a.int_rows()[i];
            sum = positive_half_sum(rep.sets[i], n, [&](VertexMask x) {
                Integer d = 0;
                for (int j = 0; j < n; ++j) d += (x >> j & 1u) ? row.c[j] : -row.c[j];
                return sgn(d);
            });
        } else {
            sum = positive_half_sum(rep.sets[i], n, [&](VertexMask x) {
                double d = 0;
                for (int j = 0; j < n; ++j) d += (x >> j & 1u) ? unit[i][j] : -unit[i][j];
                if (std::abs(d) <= 1e-12) return 0;
                return d > 0 ? 1 : -1;
            });
        }
        if (all_zero(sum)) {
            r.passes = false;
            r.residual = 1.0;
            out.all_nonempty_pass = false;
            out.rows.push_back(r);
            continue;
        }
        double nrm = 0;
        for (long v : sum) nrm += double(v) * double(v);
        nrm = std::sqrt(nrm);
        double plus = 0, minus = 0;
        for (int j = 0; j < n; ++j) {
            const double u = sum[j] / nrm;
            plus += (unit[i][j] - u) * (unit[i][j] - u);
            minus += (unit[i][j] + u) * (unit[i][j] + u);
        }
        r.residual = std::sqrt(std::min(plus, minus));
        if (a.kind() == RowKind::Int) {
            std::vector<Integer> c(n);
            for (int j = 0; j < n; ++j) c[j] = sum[j];
            r.passes = canonical_row(IntRow(std::move(c))) == canonical_row(a.int_rows()[i]);
        } else {
            r.passes = r.residual <= 1e-9;
        }
        if (!r.passes) out.all_nonempty_pass = false;
        out.rows.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Subset-norm oracle

SubsetNormResult subset_norm_max(int n) {
    if (n < 1 || n > 4)
        throw std::invalid_argument("subset_norm_max requires 1 <= n <= 4 (2^(2^n) subsets)");
    const std::uint32_t verts = 1u << n;
    auto sums = all_vertex_sums(n);
    std::vector<std::uint32_t> norm_sq(sums.size());
    std::uint32_t best = 0;
    for (std::uint64_t s = 0; s < sums.size(); ++s) {
        std::uint32_t q = 0;
        for (int j = 0; j < n; ++j) q += static_cast<std::uint32_t>(sums[s][j] * sums[s][j]);
        norm_sq[s] = q;
        best = std::max(best, q);
    }

    SubsetNormResult res;
    res.n = n;
    res.max_norm_sq = best;
    res.maximizers_all_half_size = true;
    res.maximizers_antipode_free = true;
    const std::uint32_t half = verts / 2;
    for (std::uint64_t s = 0; s < sums.size(); ++s) {
        if (norm_sq[s] != best) continue;
        ++res.maximizer_count;
        if (static_cast<std::uint32_t>(std::popcount(s)) != half)
            res.maximizers_all_half_size = false;
        for (std::uint32_t v = 0; v < verts; ++v) {
            if (!(s >> v & 1)) continue;
            const VertexMask anti = vertex_negate(static_cast<VertexMask>(v), n);
            if (s >> anti & 1) {
                res.maximizers_antipode_free = false;
                break;
            }
        }
    }

    res.half_cubes_attain = true;
    for (int coord = 0; coord < n; ++coord) {
        for (int want : {0, 1}) {
            std::uint64_t subset = 0;
            for (std::uint32_t v = 0; v < verts; ++v)
                if (static_cast<int>(v >> coord & 1u) == want) subset |= std::uint64_t(1) << v;
            if (norm_sq[subset] != best) res.half_cubes_attain = false;
        }
    }
    return res;
}

}  // namespace badsci
