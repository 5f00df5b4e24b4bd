#include "cgs/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cgs::nn {

namespace {

constexpr char kMagic[8] = {'C', 'G', 'S', 'C', 'K', 'P', 'T', '\0'};

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Writer {
public:
    template <typename T>
    void put(T value) {
        auto u = static_cast<std::uint64_t>(value);
        for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
    }
    void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void put_bytes(std::string_view s) { out_.append(s); }
    std::string& str() { return out_; }

private:
    std::string out_;
};

class Reader {
public:
    Reader(std::string_view bytes, std::string_view source) : bytes_(bytes), source_(source) {}

    template <typename T>
    T get(const char* what) {
        need(sizeof(T), what);
        std::uint64_t u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }
    double get_f64(const char* what) { return std::bit_cast<double>(get<std::uint64_t>(what)); }
    std::string_view get_bytes(std::size_t n, const char* what) {
        need(n, what);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    [[noreturn]] void fail(const std::string& message) const {
        throw CheckpointError("checkpoint '" + std::string(source_) + "': " + message);
    }

private:
    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n)
            fail(std::string("corrupted or truncated file (ran out of data reading ") + what + ")");
    }

    std::string_view bytes_;
    std::string_view source_;
    std::size_t pos_ = 0;
};

}  // namespace

const Mlp& Checkpoint::get(std::string_view name) const {
    for (const auto& m : models)
        if (m.name == name) return m.model;
    throw CheckpointError("checkpoint has no model named '" + std::string(name) + "'");
}

bool Checkpoint::contains(std::string_view name) const noexcept {
    for (const auto& m : models)
        if (m.name == name) return true;
    return false;
}

std::string encode_checkpoint(const Checkpoint& checkpoint) {
    Writer w;
    w.put_bytes(std::string_view(kMagic, sizeof(kMagic)));
    w.put<std::uint32_t>(kCheckpointVersion);
    w.put<std::uint64_t>(checkpoint.seed);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(checkpoint.models.size()));
    for (const auto& [name, model] : checkpoint.models) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
        w.put_bytes(name);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(model.num_layers()));
        for (const Layer& layer : model.layers()) {
            w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.in_dim()));
            w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.out_dim()));
            w.put<std::uint8_t>(static_cast<std::uint8_t>(layer.activation.kind));
            w.put_f64(layer.activation.slope);
            for (double v : layer.weight.values()) w.put_f64(v);
            for (double v : layer.bias) w.put_f64(v);
        }
    }
    const std::uint64_t checksum = fnv1a(w.str());
    w.put<std::uint64_t>(checksum);
    return std::move(w.str());
}

Checkpoint decode_checkpoint(std::string_view bytes, std::string_view source) {
    Reader r(bytes, source);
    if (r.get_bytes(sizeof(kMagic), "magic") != std::string_view(kMagic, sizeof(kMagic)))
        r.fail("not a checkpoint file (bad magic)");
    const auto version = r.get<std::uint32_t>("version");
    if (version != kCheckpointVersion)
        r.fail("unsupported format version: expected " + std::to_string(kCheckpointVersion) + ", found " +
               std::to_string(version));
    if (bytes.size() < sizeof(kMagic) + 4 + 8)
        r.fail("corrupted or truncated file");
    const std::uint64_t stored = [&] {
        if (bytes.size() < 8) r.fail("corrupted or truncated file");
        Reader tail(bytes.substr(bytes.size() - 8), source);
        return tail.get<std::uint64_t>("checksum");
    }();
    if (fnv1a(bytes.substr(0, bytes.size() - 8)) != stored) r.fail("corrupted or truncated file (checksum mismatch)");

    Checkpoint ck;
    ck.seed = r.get<std::uint64_t>("seed");
    const auto model_count = r.get<std::uint32_t>("model count");
    for (std::uint32_t m = 0; m < model_count; ++m) {
        const auto name_len = r.get<std::uint32_t>("model name length");
        std::string name(r.get_bytes(name_len, "model name"));
        const auto layer_count = r.get<std::uint32_t>("layer count");
        if (layer_count == 0) r.fail("model '" + name + "' has no layers");
        std::vector<Layer> layers;
        for (std::uint32_t i = 0; i < layer_count; ++i) {
            const auto in = r.get<std::uint32_t>("layer input width");
            const auto out = r.get<std::uint32_t>("layer output width");
            const auto tag = r.get<std::uint8_t>("activation tag");
            const double slope = r.get_f64("activation slope");
            if (tag > static_cast<std::uint8_t>(ActivationKind::Identity))
                r.fail("unknown activation tag " + std::to_string(tag));
            const std::size_t count = static_cast<std::size_t>(in) * out;
            if (r.remaining() < (count + out) * 8) r.fail("corrupted or truncated file (layer payload)");
            std::vector<double> w(count);
            for (double& v : w) v = r.get_f64("weights");
            std::vector<double> b(out);
            for (double& v : b) v = r.get_f64("bias");
            try {
                layers.push_back(Layer{Matrix2D(in, out, std::move(w)), std::move(b),
                                       Activation{static_cast<ActivationKind>(tag), slope}});
            } catch (const std::invalid_argument& e) {
                r.fail(std::string("invalid layer data: ") + e.what());
            }
        }
        try {
            ck.models.push_back({std::move(name), Mlp(std::move(layers))});
        } catch (const std::invalid_argument& e) {
            r.fail(std::string("invalid model: ") + e.what());
        }
    }
    if (r.remaining() != 8) r.fail("corrupted file (trailing bytes)");
    return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    const std::string bytes = encode_checkpoint(checkpoint);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes, path.string());
}

}  // namespace cgs::nn
