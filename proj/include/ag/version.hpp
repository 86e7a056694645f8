#pragma once

namespace ag {

inline const char* version() { return "0.1.0"; }

}  // namespace ag
