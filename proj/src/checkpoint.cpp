#include "sptc/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "sptc/crc64.hpp"

namespace sptc {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'P', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

class CrcWriter {
public:
    explicit CrcWriter(std::ostream& os) : os_(os) {}

    void write(const void* p, std::size_t n) {
        os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        crc_.update(p, n);
    }
    template <class T>
    void write_pod(T v) {
        write(&v, sizeof(v));
    }
    std::uint64_t crc() const { return crc_.value(); }

private:
    std::ostream& os_;
    Crc64 crc_;
};

class CrcReader {
public:
    explicit CrcReader(std::istream& is) : is_(is) {}

    void read(void* p, std::size_t n) {
        is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!is_) throw DataError("truncated checkpoint");
        crc_.update(p, n);
    }
    template <class T>
    T read_pod() {
        T v;
        read(&v, sizeof(v));
        return v;
    }
    std::uint64_t crc() const { return crc_.value(); }

private:
    std::istream& is_;
    Crc64 crc_;
};

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open checkpoint for writing: " + path);
    CrcWriter w(os);
    w.write(kMagic, 4);
    w.write_pod(kVersion);
    w.write_pod(static_cast<std::uint32_t>(params.tensor_count()));
    for (const auto& [name, t] : params) {
        w.write_pod(static_cast<std::uint32_t>(name.size()));
        w.write(name.data(), name.size());
        w.write_pod(static_cast<std::uint32_t>(t.shape.size()));
        for (std::size_t d : t.shape) w.write_pod(static_cast<std::uint64_t>(d));
        w.write(t.data.data(), t.data.size() * sizeof(float));
    }
    std::uint64_t crc = w.crc();
    os.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
    if (!os) throw DataError("checkpoint write failed: " + path);
}

ParamSet load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint: " + path);
    CrcReader r(is);
    char magic[4];
    r.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("bad checkpoint magic: " + path);
    std::uint32_t version = r.read_pod<std::uint32_t>();
    if (version != kVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }
    std::uint32_t count = r.read_pod<std::uint32_t>();
    ParamSet params;
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t name_len = r.read_pod<std::uint32_t>();
        if (name_len > 4096) throw DataError("implausible tensor name length");
        std::string name(name_len, '\0');
        r.read(name.data(), name_len);
        std::uint32_t rank = r.read_pod<std::uint32_t>();
        if (rank > 8) throw DataError("implausible tensor rank");
        Tensor t;
        t.shape.resize(rank);
        std::size_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            std::uint64_t dim = r.read_pod<std::uint64_t>();
            t.shape[d] = static_cast<std::size_t>(dim);
            n *= t.shape[d];
        }
        if (n > (1ULL << 32)) throw DataError("implausible tensor size");
        t.data.resize(n);
        r.read(t.data.data(), n * sizeof(float));
        params.insert(name, std::move(t));
    }
    std::uint64_t expected = r.crc();
    std::uint64_t stored;
    is.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    if (!is) throw DataError("truncated checkpoint trailer");
    if (stored != expected) throw DataError("checkpoint CRC mismatch: " + path);
    return params;
}

}  // namespace sptc
