#include "sans/graph.hpp"

#include <algorithm>
#include <fstream>

namespace sans {

uint32_t Vocabulary::get_or_add(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    if (names_.size() >= kMaxVocabSize)
        throw DataError("vocabulary exceeds the 2^21 id budget of the packed triple index");
    uint32_t id = static_cast<uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
}

std::optional<uint32_t> Vocabulary::lookup(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

uint64_t TripleStore::pack(const Triple& t) const {
    return (static_cast<uint64_t>(t.head) << 42) | (static_cast<uint64_t>(t.relation) << 21) |
           static_cast<uint64_t>(t.tail);
}

void TripleStore::check_ids(const Triple& t) const {
    if (t.head >= num_entities() || t.tail >= num_entities() || t.relation >= num_relations())
        throw ContractError("triple id out of range: (" + std::to_string(t.head) + ", " +
                            std::to_string(t.relation) + ", " + std::to_string(t.tail) + ")");
}

bool TripleStore::is_observed(const Triple& t) const {
    check_ids(t);
    return observed_.find(pack(t)) != observed_.end();
}

bool TripleStore::is_observed(const Triple& t, ObservedFilter filter) const {
    check_ids(t);
    auto it = observed_.find(pack(t));
    if (it == observed_.end()) return false;
    if (filter == ObservedFilter::AllSplits) return true;
    return (it->second & kInTrain) != 0;
}

std::span<const EntityId> TripleStore::observed_tails(EntityId h, RelationId r) const {
    auto it = tails_by_hr_.find((static_cast<uint64_t>(h) << 21) | r);
    if (it == tails_by_hr_.end()) return {};
    return it->second;
}

std::span<const EntityId> TripleStore::observed_heads(EntityId t, RelationId r) const {
    auto it = heads_by_tr_.find((static_cast<uint64_t>(t) << 21) | r);
    if (it == heads_by_tr_.end()) return {};
    return it->second;
}

void TripleStore::build_indexes() {
    observed_.clear();
    tails_by_hr_.clear();
    heads_by_tr_.clear();

    auto add_split = [&](const std::vector<Triple>& triples, uint8_t bit) {
        for (const Triple& t : triples) {
            check_ids(t);
            uint8_t& mask = observed_[pack(t)];
            bool fresh = mask == 0;
            mask |= bit;
            if (fresh) {
                tails_by_hr_[(static_cast<uint64_t>(t.head) << 21) | t.relation].push_back(t.tail);
                heads_by_tr_[(static_cast<uint64_t>(t.tail) << 21) | t.relation].push_back(t.head);
            }
        }
    };
    add_split(train, kInTrain);
    add_split(valid, kInValid);
    add_split(test, kInTest);

    for (auto& [key, v] : tails_by_hr_) std::sort(v.begin(), v.end());
    for (auto& [key, v] : heads_by_tr_) std::sort(v.begin(), v.end());

    // CSR adjacency over train, counting sort by endpoint.
    uint64_t e = num_entities();
    out_offsets_.assign(e + 1, 0);
    in_offsets_.assign(e + 1, 0);
    for (const Triple& t : train) {
        ++out_offsets_[t.head + 1];
        ++in_offsets_[t.tail + 1];
    }
    for (uint64_t i = 0; i < e; ++i) {
        out_offsets_[i + 1] += out_offsets_[i];
        in_offsets_[i + 1] += in_offsets_[i];
    }
    out_edges_.resize(train.size());
    in_edges_.resize(train.size());
    std::vector<uint64_t> out_cursor(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<uint64_t> in_cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (const Triple& t : train) {
        out_edges_[out_cursor[t.head]++] = {t.relation, t.tail};
        in_edges_[in_cursor[t.tail]++] = {t.relation, t.head};
    }
}

TripleStore make_store(Vocabulary entities, Vocabulary relations, std::vector<Triple> train,
                       std::vector<Triple> valid, std::vector<Triple> test) {
    TripleStore store;
    store.entities = std::move(entities);
    store.relations = std::move(relations);
    store.train = std::move(train);
    store.valid = std::move(valid);
    store.test = std::move(test);
    store.build_indexes();
    return store;
}

namespace {

void read_split(const std::filesystem::path& path, Vocabulary& entities, Vocabulary& relations,
                std::vector<Triple>& out) {
    std::ifstream in(path);
    if (!in) throw DataError("dataset file not found: " + path.string());

    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        size_t tab1 = line.find('\t');
        size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos ||
            line.find('\t', tab2 + 1) != std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 3 tab-separated fields");

        std::string_view head(line.data(), tab1);
        std::string_view rel(line.data() + tab1 + 1, tab2 - tab1 - 1);
        std::string_view tail(line.data() + tab2 + 1, line.size() - tab2 - 1);
        Triple t;
        t.head = entities.get_or_add(head);
        t.relation = relations.get_or_add(rel);
        t.tail = entities.get_or_add(tail);
        out.push_back(t);
    }
}

}  // namespace

TripleStore load_dataset(const std::filesystem::path& dir) {
    Vocabulary entities, relations;
    std::vector<Triple> train, valid, test;
    read_split(dir / "train.txt", entities, relations, train);
    read_split(dir / "valid.txt", entities, relations, valid);
    read_split(dir / "test.txt", entities, relations, test);
    return make_store(std::move(entities), std::move(relations), std::move(train),
                      std::move(valid), std::move(test));
}

void write_dict(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    for (uint32_t id = 0; id < vocab.size(); ++id) out << id << '\t' << vocab.name(id) << '\n';
}

}  // namespace sans
