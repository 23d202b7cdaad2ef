#pragma once

#include <iosfwd>
#include <string>

#include "adact/network.hpp"

namespace adact {

/// Versioned plain-text model format. All floats are written with 17
/// significant digits, so save -> load -> forward is bitwise identical to
/// the pre-save model.
void save_network(const Network& net, std::ostream& os);
void save_network(const Network& net, const std::string& path);

Network load_network(std::istream& is);
Network load_network(const std::string& path);

}  // namespace adact
