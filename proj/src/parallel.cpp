#include "cmsum/parallel.hpp"

#include <cstdlib>
#include <string>

namespace cmsum {

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CMSUM_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1)
                n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
            // Unparsable values leave the default in place.
        }
    }
    return n;
}

} // namespace cmsum
