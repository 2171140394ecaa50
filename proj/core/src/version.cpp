#include "simcap/version.hpp"

namespace simcap {

const char* version() noexcept { return SIMCAP_VERSION_STRING; }

}  // namespace simcap
