#include "sans/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "sans/binary_io.hpp"
#include "sans/errors.hpp"
#include "sans/rng.hpp"

namespace sans {

namespace {

constexpr char kMagic[9] = "SANSCKPT";
constexpr uint16_t kFormatVersion = 1;
constexpr double kInitEpsilon = 2.0;

void check_row_ids(const EmbeddingModel& m, EntityId h, RelationId r, EntityId t) {
    if (h >= m.num_entities || t >= m.num_entities || r >= m.num_relations)
        throw ContractError("model score: id out of range");
}

double transe_score(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, bool l2) {
    double acc = 0.0;
    if (l2) {
        for (size_t i = 0; i < h.size(); ++i) {
            double d = h[i] + r[i] - t[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    for (size_t i = 0; i < h.size(); ++i) acc += std::fabs(h[i] + r[i] - t[i]);
    return acc;
}

double distmult_score(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t) {
    double acc = 0.0;
    for (size_t i = 0; i < h.size(); ++i) acc += h[i] * r[i] * t[i];
    return -acc;
}

// d complex coordinates; relation row holds phases.
double rotate_score(std::span<const double> h, std::span<const double> phases,
                    std::span<const double> t, uint32_t dim) {
    double acc = 0.0;
    for (uint32_t i = 0; i < dim; ++i) {
        double c = std::cos(phases[i]), s = std::sin(phases[i]);
        double re = h[i] * c - h[i + dim] * s - t[i];
        double im = h[i] * s + h[i + dim] * c - t[i + dim];
        acc += re * re + im * im;
    }
    return std::sqrt(acc);
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::TransE: return "transe";
        case ModelKind::DistMult: return "distmult";
        default: return "rotate";
    }
}

double EmbeddingModel::score(EntityId h, RelationId r, EntityId t) const {
    check_row_ids(*this, h, r, t);
    switch (kind) {
        case ModelKind::TransE:
            return transe_score(entity_row(h), relation_row(r), entity_row(t), transe_l2);
        case ModelKind::DistMult:
            return distmult_score(entity_row(h), relation_row(r), entity_row(t));
        default:
            return rotate_score(entity_row(h), relation_row(r), entity_row(t), dim);
    }
}

EmbeddingModel init_model(ModelKind kind, uint64_t num_entities, uint64_t num_relations,
                          uint32_t dim, double gamma, uint64_t seed, bool transe_l2) {
    if (dim == 0) throw ContractError("init_model: dim must be >= 1");

    EmbeddingModel m;
    m.kind = kind;
    m.transe_l2 = transe_l2;
    m.dim = dim;
    m.gamma = gamma;
    m.num_entities = num_entities;
    m.num_relations = num_relations;
    m.entity_params.resize(num_entities * m.entity_width());
    m.relation_params.resize(num_relations * m.relation_width());

    double bound = (gamma + kInitEpsilon) / dim;
    Rng rng(seed);
    for (double& p : m.entity_params) p = rng.uniform_real(-bound, bound);
    if (kind == ModelKind::RotatE) {
        for (double& p : m.relation_params)
            p = rng.uniform_real(-std::numbers::pi, std::numbers::pi);
    } else {
        for (double& p : m.relation_params) p = rng.uniform_real(-bound, bound);
    }
    return m;
}

double score_gradients(const EmbeddingModel& model, EntityId h, RelationId r, EntityId t,
                       std::span<double> grad_h, std::span<double> grad_r,
                       std::span<double> grad_t) {
    check_row_ids(model, h, r, t);
    auto hv = model.entity_row(h);
    auto rv = model.relation_row(r);
    auto tv = model.entity_row(t);
    uint32_t d = model.dim;

    switch (model.kind) {
        case ModelKind::TransE: {
            if (model.transe_l2) {
                double acc = 0.0;
                for (uint32_t i = 0; i < d; ++i) {
                    double diff = hv[i] + rv[i] - tv[i];
                    grad_h[i] = diff;  // stash diff, scale below
                    acc += diff * diff;
                }
                double dist = std::sqrt(acc);
                double inv = dist > 0.0 ? 1.0 / dist : 0.0;
                for (uint32_t i = 0; i < d; ++i) {
                    double g = grad_h[i] * inv;
                    grad_h[i] = g;
                    grad_r[i] = g;
                    grad_t[i] = -g;
                }
                return dist;
            }
            double dist = 0.0;
            for (uint32_t i = 0; i < d; ++i) {
                double diff = hv[i] + rv[i] - tv[i];
                dist += std::fabs(diff);
                double g = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
                grad_h[i] = g;
                grad_r[i] = g;
                grad_t[i] = -g;
            }
            return dist;
        }
        case ModelKind::DistMult: {
            double acc = 0.0;
            for (uint32_t i = 0; i < d; ++i) {
                acc += hv[i] * rv[i] * tv[i];
                grad_h[i] = -rv[i] * tv[i];
                grad_r[i] = -hv[i] * tv[i];
                grad_t[i] = -hv[i] * rv[i];
            }
            return -acc;
        }
        default: {  // RotatE
            double acc = 0.0;
            for (uint32_t i = 0; i < d; ++i) {
                double c = std::cos(rv[i]), s = std::sin(rv[i]);
                double hr_re = hv[i] * c - hv[i + d] * s;
                double hr_im = hv[i] * s + hv[i + d] * c;
                double re = hr_re - tv[i];
                double im = hr_im - tv[i + d];
                acc += re * re + im * im;
                // d(acc)/d(param) stashed; scaled by 1/(2 dist) below.
                grad_h[i] = 2.0 * (re * c + im * s);
                grad_h[i + d] = 2.0 * (-re * s + im * c);
                grad_r[i] = 2.0 * (-re * hr_im + im * hr_re);
                grad_t[i] = -2.0 * re;
                grad_t[i + d] = -2.0 * im;
            }
            double dist = std::sqrt(acc);
            double inv = dist > 0.0 ? 0.5 / dist : 0.0;
            for (size_t i = 0; i < grad_h.size(); ++i) {
                grad_h[i] *= inv;
                grad_t[i] *= inv;
            }
            for (uint32_t i = 0; i < d; ++i) grad_r[i] *= inv;
            return dist;
        }
    }
}

void score_candidates(const EmbeddingModel& model, Side side, const Triple& triple,
                      std::span<double> out) {
    check_row_ids(model, triple.head, triple.relation, triple.tail);
    uint32_t d = model.dim;
    uint64_t n = model.num_entities;
    auto rv = model.relation_row(triple.relation);

    switch (model.kind) {
        case ModelKind::TransE: {
            // Tail side: d(c) = ||base - c||, base = h + r. Head side:
            // d(c) = ||c + base||, base = r - t.
            std::vector<double> base(d);
            if (side == Side::Tail) {
                auto hv = model.entity_row(triple.head);
                for (uint32_t i = 0; i < d; ++i) base[i] = hv[i] + rv[i];
            } else {
                auto tv = model.entity_row(triple.tail);
                for (uint32_t i = 0; i < d; ++i) base[i] = rv[i] - tv[i];
            }
            double sign = side == Side::Tail ? -1.0 : 1.0;
            for (uint64_t c = 0; c < n; ++c) {
                const double* cv = model.entity_params.data() + c * d;
                double acc = 0.0;
                if (model.transe_l2) {
                    for (uint32_t i = 0; i < d; ++i) {
                        double diff = base[i] + sign * cv[i];
                        acc += diff * diff;
                    }
                    out[c] = std::sqrt(acc);
                } else {
                    for (uint32_t i = 0; i < d; ++i) acc += std::fabs(base[i] + sign * cv[i]);
                    out[c] = acc;
                }
            }
            return;
        }
        case ModelKind::DistMult: {
            std::vector<double> base(d);
            auto fixed = side == Side::Tail ? model.entity_row(triple.head)
                                            : model.entity_row(triple.tail);
            for (uint32_t i = 0; i < d; ++i) base[i] = fixed[i] * rv[i];
            for (uint64_t c = 0; c < n; ++c) {
                const double* cv = model.entity_params.data() + c * d;
                double acc = 0.0;
                for (uint32_t i = 0; i < d; ++i) acc += base[i] * cv[i];
                out[c] = -acc;
            }
            return;
        }
        default: {  // RotatE
            std::vector<double> base_re(d), base_im(d);
            if (side == Side::Tail) {
                // base = h ∘ r; d(c) = |base - c|
                auto hv = model.entity_row(triple.head);
                for (uint32_t i = 0; i < d; ++i) {
                    double c = std::cos(rv[i]), s = std::sin(rv[i]);
                    base_re[i] = hv[i] * c - hv[i + d] * s;
                    base_im[i] = hv[i] * s + hv[i + d] * c;
                }
                for (uint64_t cand = 0; cand < n; ++cand) {
                    const double* cv = model.entity_params.data() + cand * 2ull * d;
                    double acc = 0.0;
                    for (uint32_t i = 0; i < d; ++i) {
                        double re = base_re[i] - cv[i];
                        double im = base_im[i] - cv[i + d];
                        acc += re * re + im * im;
                    }
                    out[cand] = std::sqrt(acc);
                }
            } else {
                // d(c) = |c ∘ r - t|; rotating c by r preserves nothing we can
                // precompute beyond cos/sin and t.
                auto tv = model.entity_row(triple.tail);
                std::vector<double> cs(d), sn(d);
                for (uint32_t i = 0; i < d; ++i) {
                    cs[i] = std::cos(rv[i]);
                    sn[i] = std::sin(rv[i]);
                }
                for (uint64_t cand = 0; cand < n; ++cand) {
                    const double* cv = model.entity_params.data() + cand * 2ull * d;
                    double acc = 0.0;
                    for (uint32_t i = 0; i < d; ++i) {
                        double re = cv[i] * cs[i] - cv[i + d] * sn[i] - tv[i];
                        double im = cv[i] * sn[i] + cv[i + d] * cs[i] - tv[i + d];
                        acc += re * re + im * im;
                    }
                    out[cand] = std::sqrt(acc);
                }
            }
            return;
        }
    }
}

void save_checkpoint(const EmbeddingModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());

    uint8_t kind_byte = static_cast<uint8_t>(model.kind);
    if (model.kind == ModelKind::TransE && model.transe_l2) kind_byte = 3;

    io::write_bytes(out, kMagic, 8);
    io::write_pod<uint16_t>(out, kFormatVersion);
    io::write_pod<uint8_t>(out, kind_byte);
    io::write_pod<uint32_t>(out, model.dim);
    io::write_pod<double>(out, model.gamma);
    io::write_pod<uint64_t>(out, model.num_entities);
    io::write_pod<uint64_t>(out, model.num_relations);

    auto write_table = [&](const std::vector<double>& table) {
        std::vector<float> buf(table.size());
        for (size_t i = 0; i < table.size(); ++i) buf[i] = static_cast<float>(table[i]);
        io::write_bytes(out, buf.data(), buf.size() * sizeof(float));
    };
    write_table(model.entity_params);
    write_table(model.relation_params);
    if (!out) throw DataError("write failed: " + path.string());
}

EmbeddingModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint file not found: " + path.string());

    io::expect_magic(in, kMagic, "SANSCKPT checkpoint");
    uint16_t version = io::read_pod<uint16_t>(in, "version");
    if (version != kFormatVersion)
        throw FormatError("unsupported checkpoint format version " + std::to_string(version));

    EmbeddingModel m;
    uint8_t kind_byte = io::read_pod<uint8_t>(in, "kind");
    if (kind_byte > 3) throw FormatError("bad checkpoint kind byte");
    if (kind_byte == 3) {
        m.kind = ModelKind::TransE;
        m.transe_l2 = true;
    } else {
        m.kind = static_cast<ModelKind>(kind_byte);
    }
    m.dim = io::read_pod<uint32_t>(in, "dim");
    if (m.dim == 0) throw FormatError("checkpoint dim is zero");
    m.gamma = io::read_pod<double>(in, "gamma");
    m.num_entities = io::read_pod<uint64_t>(in, "entity count");
    m.num_relations = io::read_pod<uint64_t>(in, "relation count");

    auto read_table = [&](size_t count, const char* what) {
        std::vector<float> buf(count);
        io::read_bytes(in, buf.data(), count * sizeof(float), what);
        std::vector<double> table(count);
        for (size_t i = 0; i < count; ++i) table[i] = static_cast<double>(buf[i]);
        return table;
    };
    m.entity_params = read_table(m.num_entities * m.entity_width(), "entity rows");
    m.relation_params = read_table(m.num_relations * m.relation_width(), "relation rows");
    return m;
}

}  // namespace sans
