#pragma once

// Optional on-disk spill of the H(D) and trace memo caches, enabled by LT_AVG_CACHE_DIR.
//
// Layout (native-endian, fixed-width records, no header):
//   hurwitz.bin : { int64 D; int64 num; int64 den; }            24 bytes per record
//   traces.bin  : { uint64 p; uint64 a; uint64 b; int64 trace; } 32 bytes per record
// Records are written sorted by key, so identical caches produce identical files.
// A trailing partial record is ignored on load.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <tuple>

#include "classnumber.hpp"
#include "curves.hpp"

namespace ltavg {

inline std::optional<std::filesystem::path> cache_dir_from_env()
{
    const char* dir = std::getenv("LT_AVG_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    return std::filesystem::path(dir);
}

namespace detail {

template <class T>
void put(std::ofstream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::ifstream& is, T& v)
{
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

} // namespace detail

/// Loads whatever spill files exist; returns the number of records read.
inline std::size_t load_cache_spill(const std::filesystem::path& dir)
{
    std::size_t n = 0;
    if (std::ifstream is{dir / "hurwitz.bin", std::ios::binary}) {
        std::int64_t D, num, den;
        while (detail::get(is, D) && detail::get(is, num) && detail::get(is, den)) {
            detail::hurwitz_cache().insert(D, Rational(num, den));
            ++n;
        }
    }
    if (std::ifstream is{dir / "traces.bin", std::ios::binary}) {
        std::uint64_t p, a, b;
        std::int64_t t;
        while (detail::get(is, p) && detail::get(is, a) && detail::get(is, b) && detail::get(is, t)) {
            trace_cache().insert({p, a, b}, t);
            ++n;
        }
    }
    return n;
}

inline void save_cache_spill(const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto H = detail::hurwitz_cache().snapshot();
    std::sort(H.begin(), H.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    {
        std::ofstream os(dir / "hurwitz.bin", std::ios::binary | std::ios::trunc);
        for (const auto& [D, h] : H) {
            detail::put<std::int64_t>(os, D);
            detail::put<std::int64_t>(os, h.num());
            detail::put<std::int64_t>(os, h.den());
        }
    }
    auto T = trace_cache().snapshot();
    std::sort(T.begin(), T.end(), [](const auto& x, const auto& y) {
        return std::tie(x.first.p, x.first.a, x.first.b) < std::tie(y.first.p, y.first.a, y.first.b);
    });
    std::ofstream os(dir / "traces.bin", std::ios::binary | std::ios::trunc);
    for (const auto& [k, t] : T) {
        detail::put<std::uint64_t>(os, k.p);
        detail::put<std::uint64_t>(os, k.a);
        detail::put<std::uint64_t>(os, k.b);
        detail::put<std::int64_t>(os, t);
    }
}

} // namespace ltavg
