#include "klab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace klab {

int default_workers() {
    if (const char* env = std::getenv("KESTEN_LAB_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace klab
