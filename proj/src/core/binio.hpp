#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace vmn {

// Little-endian binary file helpers shared by every on-disk format
// (mesh, trajectory, dataset, model). Byte order is explicit so files
// are portable and byte-reproducible.

class BinWriter {
  public:
    explicit BinWriter(const std::string& path);
    ~BinWriter();

    void write_bytes(const void* data, std::size_t n);
    void write_u32(std::uint32_t v);
    void write_u64(std::uint64_t v);
    void write_f64(double v);
    void write_f64s(const std::vector<double>& v);
    void write_string(const std::string& s); // u64 length + bytes
    void close();

  private:
    std::ofstream out_;
    std::string path_;
};

class BinReader {
  public:
    explicit BinReader(const std::string& path);

    std::uint32_t read_u32();
    std::uint64_t read_u64();
    double read_f64();
    std::vector<double> read_f64s(std::size_t n);
    std::string read_string();
    void read_bytes(void* data, std::size_t n);
    bool at_eof();

  private:
    std::ifstream in_;
    std::string path_;
};

// FNV-1a over a whole file; used for dataset provenance hashes.
std::uint64_t fnv1a_file(const std::string& path);
std::uint64_t fnv1a_bytes(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);

} // namespace vmn
