#include "sans/neighborhood.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numeric>

#include "sans/binary_io.hpp"
#include "sans/parallel.hpp"
#include "sans/rng.hpp"

namespace sans {

namespace {

constexpr char kMagic[9] = "SANSKHOP";
constexpr uint16_t kFormatVersion = 1;

// Appends the unique neighbors of every node in frontier to out, using a
// stamp array instead of clearing a visited bitmap between levels.
void expand_frontier(const TripleStore& store, Directedness direction,
                     const std::vector<EntityId>& frontier, std::vector<EntityId>& out,
                     std::vector<uint32_t>& stamp, uint32_t epoch) {
    out.clear();
    for (EntityId u : frontier) {
        for (const Edge& e : store.out_edges(u)) {
            if (stamp[e.neighbor] != epoch) {
                stamp[e.neighbor] = epoch;
                out.push_back(e.neighbor);
            }
        }
        if (direction == Directedness::Symmetric) {
            for (const Edge& e : store.in_edges(u)) {
                if (stamp[e.neighbor] != epoch) {
                    stamp[e.neighbor] = epoch;
                    out.push_back(e.neighbor);
                }
            }
        }
    }
}

void flatten_rows(KHopNeighborhood& hood, std::vector<std::vector<EntityId>>& rows,
                  std::vector<std::vector<uint32_t>>* count_rows) {
    uint64_t n = rows.size();
    hood.row_offsets.assign(n + 1, 0);
    uint64_t total = 0;
    for (uint64_t e = 0; e < n; ++e) {
        total += rows[e].size();
        hood.row_offsets[e + 1] = total;
    }
    hood.members.reserve(total);
    if (count_rows) hood.counts.reserve(total);
    for (uint64_t e = 0; e < n; ++e) {
        hood.members.insert(hood.members.end(), rows[e].begin(), rows[e].end());
        std::vector<EntityId>().swap(rows[e]);  // release as we go
        if (count_rows) {
            hood.counts.insert(hood.counts.end(), (*count_rows)[e].begin(), (*count_rows)[e].end());
            std::vector<uint32_t>().swap((*count_rows)[e]);
        }
    }
}

}  // namespace

void KHopNeighborhood::finalize() {
    count_cum.clear();
    if (kind != NeighborhoodKind::Walks) return;
    count_cum.resize(counts.size());
    for (uint64_t e = 0; e < num_entities; ++e) {
        uint64_t running = 0;
        for (uint64_t i = row_offsets[e]; i < row_offsets[e + 1]; ++i) {
            running += counts[i];
            count_cum[i] = running;
        }
    }
}

KHopNeighborhood build_exact_khop(const TripleStore& store, uint32_t k,
                                  const ExactBuildOptions& options) {
    if (k == 0) throw ContractError("build_exact_khop: k must be >= 1");

    uint64_t n = store.num_entities();
    std::vector<std::vector<EntityId>> rows(n);
    std::atomic<uint64_t> total_entries{0};
    std::atomic<bool> over_budget{false};

    int threads = std::max(1, options.threads);
    std::vector<std::vector<uint32_t>> stamps(static_cast<size_t>(threads));
    std::vector<uint32_t> epochs(static_cast<size_t>(threads), 0);

    parallel_for_chunks(n, threads, 64, [&](int worker, uint64_t begin, uint64_t end) {
        auto& stamp = stamps[static_cast<size_t>(worker)];
        if (stamp.empty()) stamp.assign(n, 0);
        auto& epoch = epochs[static_cast<size_t>(worker)];
        std::vector<EntityId> prev, cur, next;

        for (uint64_t src = begin; src < end; ++src) {
            if (over_budget.load(std::memory_order_relaxed))
                return;
            // Running pair of exact-walk-length sets: cur = nodes reachable by
            // a walk of length l, prev = length l-1. Starts at l = 0 ({src}).
            prev.clear();
            cur.assign(1, static_cast<EntityId>(src));
            for (uint32_t step = 0; step < k; ++step) {
                ++epoch;
                expand_frontier(store, options.direction, cur, next, stamp, epoch);
                prev.swap(cur);
                cur.swap(next);
            }
            // Row = (walk length k) ∪ (walk length k-1), self excluded.
            auto& row = rows[src];
            row.reserve(prev.size() + cur.size());
            ++epoch;
            for (EntityId v : cur) {
                stamp[v] = epoch;
                if (v != src) row.push_back(v);
            }
            for (EntityId v : prev) {
                if (stamp[v] != epoch && v != src) row.push_back(v);
            }
            std::sort(row.begin(), row.end());
            if (total_entries.fetch_add(row.size()) + row.size() > options.max_entries) {
                over_budget.store(true, std::memory_order_relaxed);
                return;
            }
        }
    });

    if (over_budget.load())
        throw ResourceError("exact k-hop construction exceeds the memory budget of " +
                            std::to_string(options.max_entries) +
                            " entries; use the random-walk approximation instead");

    KHopNeighborhood hood;
    hood.kind = NeighborhoodKind::Exact;
    hood.k = k;
    hood.num_entities = n;
    flatten_rows(hood, rows, nullptr);
    hood.finalize();
    return hood;
}

KHopNeighborhood build_rw_khop(const TripleStore& store, uint32_t k, uint32_t omega,
                               uint64_t seed, int threads) {
    if (k == 0) throw ContractError("build_rw_khop: k must be >= 1");
    if (omega == 0) throw ContractError("build_rw_khop: omega must be >= 1");

    uint64_t n = store.num_entities();
    std::vector<std::vector<EntityId>> member_rows(n);
    std::vector<std::vector<uint32_t>> count_rows(n);

    threads = std::max(1, threads);
    std::vector<std::vector<uint32_t>> count_bufs(static_cast<size_t>(threads));

    parallel_for_chunks(n, threads, 256, [&](int worker, uint64_t begin, uint64_t end) {
        auto& count = count_bufs[static_cast<size_t>(worker)];
        if (count.empty()) count.assign(n, 0);
        std::vector<EntityId> touched;

        for (uint64_t src = begin; src < end; ++src) {
            EntityId source = static_cast<EntityId>(src);
            if (store.degree(source) == 0) continue;  // isolated: empty row

            // Per-entity stream keeps rows independent of scheduling and
            // makes omega = a walks a prefix of omega = a + b.
            Rng rng(mix_seed(seed, src));
            touched.clear();
            for (uint32_t w = 0; w < omega; ++w) {
                EntityId cur = source;
                for (uint32_t step = 0; step < k; ++step) {
                    uint64_t deg = store.degree(cur);
                    cur = store.neighbor(cur, rng.uniform(deg));
                    if (cur != source) {
                        if (count[cur] == 0) touched.push_back(cur);
                        ++count[cur];
                    }
                }
            }
            std::sort(touched.begin(), touched.end());
            auto& members = member_rows[src];
            auto& counts = count_rows[src];
            members.assign(touched.begin(), touched.end());
            counts.resize(touched.size());
            for (size_t i = 0; i < touched.size(); ++i) {
                counts[i] = count[touched[i]];
                count[touched[i]] = 0;
            }
        }
    });

    KHopNeighborhood hood;
    hood.kind = NeighborhoodKind::Walks;
    hood.k = k;
    hood.omega = omega;
    hood.construction_seed = seed;
    hood.num_entities = n;
    flatten_rows(hood, member_rows, &count_rows);
    hood.finalize();
    return hood;
}

FillReport fill_percentage(const KHopNeighborhood& n, uint64_t num_entities) {
    FillReport report;
    report.k = n.k;
    if (num_entities == 0) return report;
    report.filled_fraction = static_cast<double>(n.total_entries()) /
                             (static_cast<double>(num_entities) * static_cast<double>(num_entities));
    return report;
}

void save_neighborhood(const KHopNeighborhood& n, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());

    io::write_bytes(out, kMagic, 8);
    io::write_pod<uint16_t>(out, kFormatVersion);
    io::write_pod<uint8_t>(out, static_cast<uint8_t>(n.kind));
    io::write_pod<uint32_t>(out, n.k);
    io::write_pod<uint32_t>(out, n.kind == NeighborhoodKind::Walks ? n.omega : 0);
    io::write_pod<uint64_t>(out, n.construction_seed);
    io::write_pod<uint64_t>(out, n.num_entities);

    bool weighted = n.kind == NeighborhoodKind::Walks;
    for (uint64_t e = 0; e < n.num_entities; ++e) {
        auto row = n.row(static_cast<EntityId>(e));
        io::write_pod<uint32_t>(out, static_cast<uint32_t>(row.size()));
        if (weighted) {
            auto counts = n.row_counts(static_cast<EntityId>(e));
            for (size_t i = 0; i < row.size(); ++i) {
                io::write_pod<uint32_t>(out, row[i]);
                io::write_pod<uint32_t>(out, counts[i]);
            }
        } else {
            io::write_bytes(out, row.data(), row.size() * sizeof(EntityId));
        }
    }
    if (!out) throw DataError("write failed: " + path.string());
}

KHopNeighborhood load_neighborhood(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("neighborhood file not found: " + path.string());

    io::expect_magic(in, kMagic, "SANSKHOP neighborhood");
    uint16_t version = io::read_pod<uint16_t>(in, "version");
    if (version != kFormatVersion)
        throw FormatError("unsupported neighborhood format version " + std::to_string(version));

    KHopNeighborhood n;
    uint8_t kind = io::read_pod<uint8_t>(in, "kind");
    if (kind > 1) throw FormatError("bad neighborhood kind byte");
    n.kind = static_cast<NeighborhoodKind>(kind);
    n.k = io::read_pod<uint32_t>(in, "k");
    n.omega = io::read_pod<uint32_t>(in, "omega");
    n.construction_seed = io::read_pod<uint64_t>(in, "seed");
    n.num_entities = io::read_pod<uint64_t>(in, "entity count");

    bool weighted = n.kind == NeighborhoodKind::Walks;
    n.row_offsets.assign(n.num_entities + 1, 0);
    for (uint64_t e = 0; e < n.num_entities; ++e) {
        uint32_t len = io::read_pod<uint32_t>(in, "row length");
        n.row_offsets[e + 1] = n.row_offsets[e] + len;
        size_t base = n.members.size();
        n.members.resize(base + len);
        if (weighted) {
            n.counts.resize(base + len);
            for (uint32_t i = 0; i < len; ++i) {
                n.members[base + i] = io::read_pod<uint32_t>(in, "row entry");
                n.counts[base + i] = io::read_pod<uint32_t>(in, "row count");
            }
        } else {
            io::read_bytes(in, n.members.data() + base, len * sizeof(EntityId), "row entries");
        }
    }
    n.finalize();
    return n;
}

}  // namespace sans
