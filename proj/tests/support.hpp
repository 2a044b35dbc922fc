#pragma once

#include <optional>

#include "triplet_forge/error.hpp"

namespace support {

/// Kind of the triplet_forge::Error thrown by f, or nullopt if it returns normally.
template <class F>
std::optional<triplet_forge::ErrorKind> thrown_kind(F&& f) {
    try {
        f();
    } catch (const triplet_forge::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

}  // namespace support
