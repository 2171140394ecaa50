#pragma once

namespace simcap {

const char* version() noexcept;

}  // namespace simcap
