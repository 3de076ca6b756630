#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "rate/errors.hpp"
#include "rate/scoring.hpp"

namespace rate {

// Checkpoint layout (little-endian):
//   bytes 0..7   magic "RATEKGE1"
//   byte  8      model kind (0 transe, 1 rotate, 2 rate)
//   byte  9      flags (bit 0: shared weight matrix)
//   bytes 10..11 reserved, zero
//   u32          dim
//   u64          num_entities
//   u64          num_relations
//   f64          margin
//   u64          seed
//   u64          weight matrix count
//   f32[]        entity_re, entity_im, relation_theta, relation_w (in order)
//   u64          fnv1a-64 checksum of the float payload
//
// Arrays are stored as 32-bit floats for compactness; in-memory parameters
// stay 64-bit. A text manifest alongside records counts and the checksum.

inline constexpr char kCheckpointMagic[8] = {'R', 'A', 'T', 'E', 'K', 'G', 'E', '1'};

inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError("checkpoint truncated");
    return v;
}

inline std::uint64_t write_f32_array(std::ostream& out, const std::vector<double>& a,
                                     std::uint64_t hash) {
    std::vector<float> buf(a.begin(), a.end());
    if (!buf.empty()) {
        out.write(reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(float));
        hash = fnv1a64(buf.data(), buf.size() * sizeof(float), hash);
    }
    return hash;
}

inline std::uint64_t read_f32_array(std::istream& in, std::vector<double>& a, std::size_t n,
                                    std::uint64_t hash) {
    std::vector<float> buf(n);
    if (n > 0) {
        in.read(reinterpret_cast<char*>(buf.data()), n * sizeof(float));
        if (!in) throw ParseError("checkpoint truncated in array section");
        hash = fnv1a64(buf.data(), n * sizeof(float), hash);
    }
    a.assign(buf.begin(), buf.end());
    return hash;
}

}  // namespace detail

struct CheckpointInfo {
    std::uint64_t payload_hash = 0;
    std::uint64_t payload_floats = 0;
};

inline CheckpointInfo save_checkpoint(const ParameterStore& p, std::ostream& out) {
    static_assert(sizeof(float) == 4 && sizeof(double) == 8);
    out.write(kCheckpointMagic, 8);
    detail::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(p.kind));
    detail::write_pod<std::uint8_t>(out, p.shared_w ? 1 : 0);
    detail::write_pod<std::uint16_t>(out, 0);
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(p.dim));
    detail::write_pod<std::uint64_t>(out, p.num_entities);
    detail::write_pod<std::uint64_t>(out, p.num_relations);
    detail::write_pod<double>(out, p.margin);
    detail::write_pod<std::uint64_t>(out, p.seed);
    detail::write_pod<std::uint64_t>(out, p.w_matrices());

    std::uint64_t hash = 0xcbf29ce484222325ULL;
    hash = detail::write_f32_array(out, p.entity_re, hash);
    hash = detail::write_f32_array(out, p.entity_im, hash);
    hash = detail::write_f32_array(out, p.relation_theta, hash);
    hash = detail::write_f32_array(out, p.relation_w, hash);
    detail::write_pod<std::uint64_t>(out, hash);
    if (!out) throw IoError("checkpoint write failed");

    CheckpointInfo info;
    info.payload_hash = hash;
    info.payload_floats =
        p.entity_re.size() + p.entity_im.size() + p.relation_theta.size() + p.relation_w.size();
    return info;
}

inline ParameterStore load_checkpoint(std::istream& in, CheckpointInfo* info = nullptr) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw ParseError("not a checkpoint file (bad magic)");

    ParameterStore p;
    const auto kind = detail::read_pod<std::uint8_t>(in);
    if (kind > 2) throw ParseError("checkpoint has unknown model kind");
    p.kind = static_cast<ModelKind>(kind);
    p.shared_w = (detail::read_pod<std::uint8_t>(in) & 1) != 0;
    detail::read_pod<std::uint16_t>(in);
    p.dim = detail::read_pod<std::uint32_t>(in);
    p.num_entities = detail::read_pod<std::uint64_t>(in);
    p.num_relations = detail::read_pod<std::uint64_t>(in);
    p.margin = detail::read_pod<double>(in);
    p.seed = detail::read_pod<std::uint64_t>(in);
    const auto w_matrices = detail::read_pod<std::uint64_t>(in);

    std::uint64_t hash = 0xcbf29ce484222325ULL;
    hash = detail::read_f32_array(in, p.entity_re, p.num_entities * p.dim, hash);
    hash = detail::read_f32_array(in, p.entity_im, p.num_entities * p.dim, hash);
    hash = detail::read_f32_array(in, p.relation_theta, p.num_relations * p.dim, hash);
    hash = detail::read_f32_array(in, p.relation_w, w_matrices * 8, hash);
    if (detail::read_pod<std::uint64_t>(in) != hash)
        throw ParseError("checkpoint checksum mismatch");
    if (info != nullptr) {
        info->payload_hash = hash;
        info->payload_floats =
            p.entity_re.size() + p.entity_im.size() + p.relation_theta.size() + p.relation_w.size();
    }
    return p;
}

inline void save_checkpoint_file(const ParameterStore& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    const CheckpointInfo info = save_checkpoint(p, out);
    out.close();

    std::ofstream manifest(path + ".manifest");
    if (!manifest) throw IoError("cannot open checkpoint manifest for writing: " + path + ".manifest");
    manifest << "model\t" << model_name(p.kind) << '\n'
             << "dim\t" << p.dim << '\n'
             << "entities\t" << p.num_entities << '\n'
             << "relations\t" << p.num_relations << '\n'
             << "margin\t" << p.margin << '\n'
             << "seed\t" << p.seed << '\n'
             << "weight_matrices\t" << p.w_matrices() << '\n'
             << "payload_floats\t" << info.payload_floats << '\n'
             << "payload_fnv1a64\t" << std::hex << info.payload_hash << std::dec << '\n';
}

inline ParameterStore load_checkpoint_file(const std::string& path, CheckpointInfo* info = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    return load_checkpoint(in, info);
}

}  // namespace rate
