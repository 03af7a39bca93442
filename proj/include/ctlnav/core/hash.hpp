#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace ctlnav {

// 64-bit FNV-1a, used for config hashes and parameter checksums.
class Fnv1a {
public:
    void update(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    void update(std::string_view s) { update(s.data(), s.size()); }
    void update(double v) { update(&v, sizeof v); }

    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view s)
{
    Fnv1a h;
    h.update(s);
    return h.digest();
}

} // namespace ctlnav
