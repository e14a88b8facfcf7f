#include "core/binio.hpp"

#include <bit>
#include <cstring>

namespace vmn {

BinWriter::BinWriter(const std::string& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    require(out_.good(), ErrorCode::Io, "cannot open for writing: " + path);
}

BinWriter::~BinWriter() {
    if (out_.is_open()) out_.close();
}

void BinWriter::write_bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), std::streamsize(n));
    require(out_.good(), ErrorCode::Io, "write failed: " + path_);
}

void BinWriter::write_u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    write_bytes(b, 4);
}

void BinWriter::write_u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    write_bytes(b, 8);
}

void BinWriter::write_f64(double v) { write_u64(std::bit_cast<std::uint64_t>(v)); }

void BinWriter::write_f64s(const std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        if (!v.empty()) write_bytes(v.data(), v.size() * sizeof(double));
    } else {
        for (double d : v) write_f64(d);
    }
}

void BinWriter::write_string(const std::string& s) {
    write_u64(s.size());
    if (!s.empty()) write_bytes(s.data(), s.size());
}

void BinWriter::close() {
    out_.close();
    require(out_.good(), ErrorCode::Io, "close failed: " + path_);
}

BinReader::BinReader(const std::string& path) : path_(path) {
    in_.open(path, std::ios::binary);
    require(in_.good(), ErrorCode::Io, "cannot open for reading: " + path);
}

void BinReader::read_bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), std::streamsize(n));
    require(std::size_t(in_.gcount()) == n, ErrorCode::BadFormat, "truncated file: " + path_);
}

std::uint32_t BinReader::read_u32() {
    unsigned char b[4];
    read_bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}

std::uint64_t BinReader::read_u64() {
    unsigned char b[8];
    read_bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

double BinReader::read_f64() { return std::bit_cast<double>(read_u64()); }

std::vector<double> BinReader::read_f64s(std::size_t n) {
    std::vector<double> v(n);
    if constexpr (std::endian::native == std::endian::little) {
        if (n > 0) read_bytes(v.data(), n * sizeof(double));
    } else {
        for (std::size_t i = 0; i < n; ++i) v[i] = read_f64();
    }
    return v;
}

std::string BinReader::read_string() {
    std::uint64_t n = read_u64();
    require(n < (1ull << 32), ErrorCode::BadFormat, "implausible string length: " + path_);
    std::string s(n, '\0');
    if (n > 0) read_bytes(s.data(), n);
    return s;
}

bool BinReader::at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

std::uint64_t fnv1a_bytes(const void* data, std::size_t n, std::uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a_bytes(buf, std::size_t(in.gcount()), h);
    }
    return h;
}

} // namespace vmn
